//! MOP pairs related by constant polynomial coefficients,
//! `psi_{n+r} = X phi_n + Y phi_n*` for every `n >= 0`.
//!
//! Apart from one degree one family, such pairs have constant Schur
//! parameters `(a, a, ...)` for `u` and `(b_1, ..., b_r, b, b, ...)` for `v`.

use serde::Serialize;

use crate::algebra::{ComplexPoly, JMatrix};
use crate::opuc::{mop, szego_forward, SchurSequence};
use crate::{Error, Result, Tolerance, C64};

/// Constant coefficients `X`, `Y` with the Schur data they relate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantSolution {
    pub r: usize,
    pub a: C64,
    pub b_head: Vec<C64>,
    pub b: C64,
    pub x: ComplexPoly,
    pub y: ComplexPoly,
    pub zeta: C64,
    /// Remainder of the division by `z - zeta`, relative.
    pub division_remainder: f64,
    /// `a psi_r - b psi_r* - (z(1 - conj a) - (1 - a)) Y`, relative.
    pub reduced_residual: f64,
}

impl ConstantSolution {
    /// `u`'s parameters `(a, ..., a)`, `n` of them.
    pub fn u_sequence(&self, n: usize) -> SchurSequence {
        SchurSequence::new(vec![self.a; n])
    }

    /// `v`'s parameters `(b_1, ..., b_r, b, ..., b)`, `n` of them.
    pub fn v_sequence(&self, n: usize) -> SchurSequence {
        let mut v: Vec<C64> = self.b_head.iter().copied().take(n).collect();
        v.resize(n, self.b);
        SchurSequence::new(v)
    }

    /// `A = X X* - z Y Y*`.
    pub fn perturbation(&self) -> Result<ComplexPoly> {
        Ok(JMatrix::new(self.x.clone(), self.y.clone(), self.r)?.det())
    }

    /// `max |Y* - (conj(a)/b) Y|` relative to `Y`; zero when `Y = 0`.
    pub fn reciprocity_residual(&self) -> Result<f64> {
        if self.y.is_zero() {
            return Ok(0.0);
        }
        let ys = self.y.reverse_signed(self.r as isize - 1)?;
        let k = self.a.conj() / self.b;
        Ok(ys.max_diff(&self.y.scale(k)) / self.y.max_abs())
    }
}

fn zeta_of(a: C64) -> C64 {
    if a.im == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        (C64::new(1.0, 0.0) - a) / (C64::new(1.0, 0.0) - a.conj())
    }
}

fn check_modulus(w: C64, index: usize, tol: Tolerance) -> Result<()> {
    if tol.negligible(w.norm() - 1.0, 1.0) {
        return Err(Error::UnitModulus { index });
    }
    Ok(())
}

/// `b = a psi_r(zeta)/psi_r*(zeta)`, `Y` by division by `z - zeta`, `X = psi_r - Y`.
pub fn constant_solution(a: C64, b_head: &[C64], tol: Tolerance) -> Result<ConstantSolution> {
    let r = b_head.len();
    if r == 0 {
        return Err(Error::Invalid("need r >= 1 parameters b_1..b_r".into()));
    }
    check_modulus(a, 0, tol)?;
    for (j, &bj) in b_head.iter().enumerate() {
        check_modulus(bj, j + 1, tol)?;
    }
    let zeta = zeta_of(a);
    let pair = mop(b_head);
    let (p, ps) = (&pair.psi, &pair.psi_star);
    let (pz, psz) = (p.eval(zeta), ps.eval(zeta));
    if psz.norm() <= tol.value() * ps.max_abs() {
        return Err(Error::Pole("psi_r*(zeta) = 0".into()));
    }
    let b = a * pz / psz;
    let num = &p.scale(psz) - &ps.scale(pz);
    let (quot, rem) = num.div_linear(zeta);
    let division_remainder = rem.norm() / num.max_abs().max(1.0);
    if division_remainder > 1e-10 {
        return Err(Error::Invalid(format!("division by z - zeta left remainder {division_remainder:e}")));
    }
    let one = C64::new(1.0, 0.0);
    let y = quot.scale(a / ((one - a.conj()) * psz)).truncated(r);
    let x = p - &y;
    let lin = ComplexPoly::new(vec![a - one, one - a.conj()]);
    let lhs = &p.scale(a) - &ps.scale(b);
    let reduced_residual = lhs.max_diff(&(&lin * &y)) / p.max_abs();
    Ok(ConstantSolution {
        r,
        a,
        b_head: b_head.to_vec(),
        b,
        x,
        y,
        zeta,
        division_remainder,
        reduced_residual,
    })
}

/// `max_n max |psi_{n+r} - X phi_n - Y phi_n*|` over `n <= n_max`.
pub fn verify_constant_relation(sol: &ConstantSolution, n_max: usize) -> f64 {
    relation_residual(&sol.x, &sol.y, &sol.u_sequence(n_max), &sol.v_sequence(n_max + sol.r), sol.r)
}

/// Residual of `psi_{n+r} = X phi_n + Y phi_n*` for given families.
pub fn relation_residual(x: &ComplexPoly, y: &ComplexPoly, u: &SchurSequence, v: &SchurSequence, r: usize) -> f64 {
    let phi = szego_forward(u);
    let psi = szego_forward(v);
    (0..=u.len())
        .filter(|n| n + r <= v.len())
        .map(|n| {
            let rhs = &(x * phi.psi(n)) + &(y * phi.psi_star(n));
            psi.psi(n + r).max_diff(&rhs)
        })
        .fold(0.0, f64::max)
}

/// Residuals of `conj(a) Y = b Y*` and `a X - b X* = (z - 1) Y`.
pub fn constant_system_residual(x: &ComplexPoly, y: &ComplexPoly, r: usize, a: C64, b: C64) -> Result<(f64, f64)> {
    let ys = y.reverse_signed(r as isize - 1)?;
    let xs = x.reverse(r)?;
    let first = y.scale(a.conj()).max_diff(&ys.scale(b));
    let zm1 = ComplexPoly::new(vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]);
    let second = (&x.scale(a) - &xs.scale(b)).max_diff(&(&zm1 * y));
    Ok((first, second))
}

/// Point `y (1/2 + i t)` on the perpendicular bisector of `[0, y]`.
pub fn bisector_point(b1: C64, t: f64) -> C64 {
    (b1 + 1.0) * C64::new(0.5, t)
}

/// Mirror image of `a_n` in the line through `0` and `y = 1 + b_1`.
pub fn bisector_family_step(b1: C64, a_n: C64, tol: Tolerance) -> Result<C64> {
    let y = b1 + 1.0;
    if y.norm() == 0.0 {
        return Err(Error::Invalid("b_1 = -1".into()));
    }
    if !tol.negligible(a_n.norm() - (a_n - y).norm(), 1.0 + y.norm()) {
        return Err(Error::Invalid("a_n is off the bisector of [0, 1 + b_1]".into()));
    }
    check_modulus(a_n, 0, tol)?;
    Ok(a_n.conj() * y / y.conj())
}

/// `v`'s parameters `(b_1, b_2, ...)` for a sequence `a_1, a_2, ...` on the bisector.
pub fn bisector_family(b1: C64, a: &[C64], tol: Tolerance) -> Result<SchurSequence> {
    let mut b = vec![b1];
    for &an in a {
        b.push(bisector_family_step(b1, an, tol)?);
    }
    Ok(SchurSequence::new(b))
}

/// Residual of `psi_{n+1} = (z - 1) phi_n + y phi_n*` over the given `a`.
pub fn verify_bisector_family(b1: C64, a: &[C64], tol: Tolerance) -> Result<f64> {
    let v = bisector_family(b1, a, tol)?;
    let x = ComplexPoly::new(vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]);
    let y = ComplexPoly::constant(b1 + 1.0);
    Ok(relation_residual(&x, &y, &SchurSequence::new(a.to_vec()), &v, 1))
}

/// Verdict on a degree one pair `X = z + x`, `Y = y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum R1Verdict {
    /// Constant parameters `(a, a, ...)` and `(b_1, b, b, ...)`.
    Admissible { b1: C64, a: C64 },
    /// `X = z - 1`: any sequence on the bisector of `[0, y]` works.
    Bisector { b1: C64 },
    /// `x` on the unit circle, other than `-1`.
    XOnCircle,
    /// `b_1 = x + y` on the unit circle.
    B1OnCircle,
    /// The constant parameter `a` would be unimodular.
    AOnCircle,
}

pub fn r1_admissibility(x: C64, y: C64, tol: Tolerance) -> R1Verdict {
    let b1 = x + y;
    if tol.negligible(b1.norm() - 1.0, 1.0) {
        return R1Verdict::B1OnCircle;
    }
    if tol.negligible((x + 1.0).norm(), 1.0) {
        return R1Verdict::Bisector { b1 };
    }
    let q = 1.0 - x.norm_sqr();
    if tol.negligible(q, 1.0) {
        return R1Verdict::XOnCircle;
    }
    let a = y * (x.conj() + 1.0) / q;
    if tol.negligible(a.norm() - 1.0, 1.0) {
        return R1Verdict::AOnCircle;
    }
    R1Verdict::Admissible { b1, a }
}

/// Outcome of [`degree_drop_test`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeDrop {
    /// `X(0) = 0`, so `deg P < r`.
    pub dropped: bool,
    /// Largest `s` with `b_s != b`, which is `deg P`.
    pub effective_degree: usize,
    /// `max_{s <= j <= r} |b - a psi_j(zeta)/psi_j*(zeta)|`.
    pub stability: f64,
}

pub fn degree_drop_test(sol: &ConstantSolution, tol: Tolerance) -> DegreeDrop {
    let dropped = tol.negligible(sol.x.coeff(0).norm(), sol.x.max_abs());
    let loose = tol.value().sqrt();
    let effective_degree = sol
        .b_head
        .iter()
        .rposition(|&bj| (bj - sol.b).norm() > loose * (1.0 + sol.b.norm()))
        .map_or(0, |i| i + 1);
    let stability = (effective_degree..=sol.r)
        .map(|j| {
            let p = mop(&sol.b_head[..j]);
            (sol.b - sol.a * p.psi.eval(sol.zeta) / p.psi_star.eval(sol.zeta)).norm()
        })
        .fold(0.0, f64::max);
    DegreeDrop { dropped, effective_degree, stability }
}
