//! Complex polynomials, reversal, 2x2 polynomial matrices and the
//! J-self-reciprocal matrices that drive both recurrences.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Matrix};
use crate::{Error, Result, Tolerance, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Polynomial with complex coefficients in ascending order.
///
/// Exact trailing zeros are trimmed, so the zero polynomial has no
/// coefficients and nominal degree -1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|z| *z == ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut v = vec![ZERO; k + 1];
        v[k] = ONE;
        Self { coeffs: v }
    }

    /// `z - root`.
    pub fn linear(root: C64) -> Self {
        Self::new(vec![-root, ONE])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero past the end.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn nominal_degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, l: usize) -> Self {
        (0..l).fold(self.clone(), |p, _| p.derivative())
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Self { coeffs: v }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Keeps the coefficients of `z^0 .. z^(len-1)`.
    pub fn truncated(&self, len: usize) -> Self {
        Self::new(self.coeffs.iter().take(len).copied().collect())
    }

    /// Largest coefficient modulus from index `from` on.
    pub fn tail_norm(&self, from: usize) -> f64 {
        self.coeffs.iter().skip(from).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.tail_norm(0)
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// `z^n conj(p)(1/z)`: coefficient `k` becomes `conj(c_{n-k})`.
    pub fn reverse(&self, n: usize) -> Result<Self> {
        if self.coeffs.len() > n + 1 {
            return Err(Error::ReversalOrder {
                degree: self.coeffs.len() - 1,
                order: n as isize,
            });
        }
        Ok(Self::new((0..=n).map(|k| self.coeff(n - k).conj()).collect()))
    }

    /// Reversal at order `n >= -1`; order -1 only accepts the zero polynomial.
    pub fn reverse_signed(&self, n: isize) -> Result<Self> {
        if n < 0 {
            if self.is_zero() {
                return Ok(Self::zero());
            }
            return Err(Error::ReversalOrder { degree: self.coeffs.len() - 1, order: n });
        }
        self.reverse(n as usize)
    }

    /// Division by `z - root`: returns quotient and remainder.
    pub fn div_linear(&self, root: C64) -> (Self, C64) {
        if self.is_zero() {
            return (Self::zero(), ZERO);
        }
        let n = self.coeffs.len();
        let mut q = vec![ZERO; n - 1];
        let mut carry = ZERO;
        for k in (0..n).rev() {
            let v = self.coeffs[k] + carry * root;
            if k == 0 {
                return (Self::new(q), v);
            }
            q[k - 1] = v;
            carry = v;
        }
        unreachable!()
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut v = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        ComplexPoly::new(v)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(-ONE)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for ComplexPoly {
            type Output = ComplexPoly;
            fn $f(self, rhs: ComplexPoly) -> ComplexPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// `p` equals its own reversal at order `n`, up to `tol` relative to its
/// largest coefficient.
pub fn is_self_reciprocal(p: &ComplexPoly, n: usize, tol: Tolerance) -> bool {
    match p.reverse(n) {
        Ok(r) => tol.negligible(p.max_diff(&r), p.max_abs()),
        Err(_) => false,
    }
}

/// Real factor `t` with `p = t q`, if one exists within `tol`.
pub fn proportional(p: &ComplexPoly, q: &ComplexPoly, tol: Tolerance) -> Result<Option<f64>> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let k = (0..q.coeffs.len())
        .max_by(|&i, &j| q.coeff(i).norm().total_cmp(&q.coeff(j).norm()))
        .unwrap();
    let ratio = p.coeff(k) / q.coeff(k);
    if !tol.negligible(ratio.im, ratio.norm()) {
        return Ok(None);
    }
    let t = ratio.re;
    let resid = p.max_diff(&q.scale(C64::new(t, 0.0)));
    Ok(tol.negligible(resid, p.max_abs()).then_some(t))
}

/// Relative residual of the best real-multiple fit `p ~ t q` (least squares).
pub fn proportionality_residual(p: &ComplexPoly, q: &ComplexPoly) -> (f64, f64) {
    let n = p.coeffs.len().max(q.coeffs.len());
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..n {
        num += (p.coeff(k) * q.coeff(k).conj()).re;
        den += q.coeff(k).norm_sqr();
    }
    if den == 0.0 {
        return (0.0, p.max_abs());
    }
    let t = num / den;
    let scale = p.max_abs().max(f64::MIN_POSITIVE);
    (t, p.max_diff(&q.scale(C64::new(t, 0.0))) / scale)
}

/// 2x2 matrix of polynomials `[[m00, m01], [m10, m11]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix2 {
    pub m: [[ComplexPoly; 2]; 2],
}

impl PolyMatrix2 {
    pub fn new(m00: ComplexPoly, m01: ComplexPoly, m10: ComplexPoly, m11: ComplexPoly) -> Self {
        Self { m: [[m00, m01], [m10, m11]] }
    }

    /// Constant matrix `[[1, w], [conj(w), 1]]`.
    pub fn hermitian_unit(w: C64) -> Self {
        Self::new(
            ComplexPoly::one(),
            ComplexPoly::constant(w),
            ComplexPoly::constant(w.conj()),
            ComplexPoly::one(),
        )
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let e = |i: usize, j: usize| &(&self.m[i][0] * &rhs.m[0][j]) + &(&self.m[i][1] * &rhs.m[1][j]);
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.m[0][0].scale(s),
            self.m[0][1].scale(s),
            self.m[1][0].scale(s),
            self.m[1][1].scale(s),
        )
    }

    pub fn apply(&self, v: &[ComplexPoly; 2]) -> [ComplexPoly; 2] {
        [
            &(&self.m[0][0] * &v[0]) + &(&self.m[0][1] * &v[1]),
            &(&self.m[1][0] * &v[0]) + &(&self.m[1][1] * &v[1]),
        ]
    }

    pub fn det(&self) -> ComplexPoly {
        &(&self.m[0][0] * &self.m[1][1]) - &(&self.m[0][1] * &self.m[1][0])
    }

    /// `[[m11, -m01], [-m10, m00]]`.
    pub fn adjugate(&self) -> Self {
        Self::new(
            self.m[1][1].clone(),
            -&self.m[0][1],
            -&self.m[1][0],
            self.m[0][0].clone(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|p| p.max_abs()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| self.m[i][j].max_diff(&other.m[i][j]))
            .fold(0.0, f64::max)
    }
}

/// J-self-reciprocal matrix `[[C, D], [z D*, C*]]` of order `r`, with
/// `C` of degree at most `r` and `D` of degree at most `r - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JMatrix {
    pub c: ComplexPoly,
    pub d: ComplexPoly,
    pub r: usize,
}

impl JMatrix {
    pub fn new(c: ComplexPoly, d: ComplexPoly, r: usize) -> Result<Self> {
        if c.nominal_degree() > r as isize {
            return Err(Error::Invalid(format!("C has degree above {r}")));
        }
        if d.nominal_degree() > r as isize - 1 {
            return Err(Error::Invalid(format!("D has degree above {}", r as isize - 1)));
        }
        Ok(Self { c, d, r })
    }

    pub fn c_star(&self) -> ComplexPoly {
        self.c.reverse(self.r).expect("degree checked on construction")
    }

    pub fn d_star(&self) -> ComplexPoly {
        self.d
            .reverse_signed(self.r as isize - 1)
            .expect("degree checked on construction")
    }

    pub fn to_matrix(&self) -> PolyMatrix2 {
        PolyMatrix2::new(self.c.clone(), self.d.clone(), self.d_star().shift(1), self.c_star())
    }

    /// `[[C, z D], [D*, C*]]`.
    pub fn tilde(&self) -> PolyMatrix2 {
        PolyMatrix2::new(self.c.clone(), self.d.shift(1), self.d_star(), self.c_star())
    }

    /// `C C* - z D D*`, self-reciprocal of order `2r`.
    pub fn det(&self) -> ComplexPoly {
        &(&self.c * &self.c_star()) - &(&self.d * &self.d_star()).shift(1)
    }

    /// `C(0)` is negligible against the largest coefficient of `C`.
    pub fn is_regular(&self, tol: Tolerance) -> bool {
        !tol.negligible(self.c.coeff(0).norm(), self.c.max_abs())
    }
}

/// Coefficients of the unique splitting `omega = C psi + D psi*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub c: ComplexPoly,
    pub d: ComplexPoly,
    /// Pivot ratio of the solve when it exceeded the conditioning threshold.
    pub condition_warning: Option<f64>,
}

/// Writes `omega` (degree at most `2r`) as `C psi + D psi*` with
/// `C` in degree `r`, `D` in degree `r - 1`, where `psi` is monic of degree `r`
/// and `psi* = reverse(psi, r)`.
pub fn decompose_in_mop_basis(omega: &ComplexPoly, psi: &ComplexPoly, r: usize) -> Result<Decomposition> {
    if omega.nominal_degree() > 2 * r as isize {
        return Err(Error::Invalid(format!("degree of omega exceeds {}", 2 * r)));
    }
    if psi.nominal_degree() != r as isize {
        return Err(Error::Invalid(format!("basis polynomial must have degree {r}")));
    }
    let psi_star = psi.reverse(r)?;
    let n = 2 * r + 1;
    let mut a = Matrix::zeros(n);
    for k in 0..n {
        for i in 0..=r {
            if k >= i {
                a.set(k, i, psi.coeff(k - i));
            }
        }
        for i in 0..r {
            if k >= i {
                a.set(k, r + 1 + i, psi_star.coeff(k - i));
            }
        }
    }
    let rhs: Vec<C64> = (0..n).map(|k| omega.coeff(k)).collect();
    let sol = linalg::solve(&a, &rhs)?;
    Ok(Decomposition {
        c: ComplexPoly::new(sol.x[..=r].to_vec()),
        d: ComplexPoly::new(sol.x[r + 1..].to_vec()),
        condition_warning: sol.ill_conditioned().then_some(sol.pivot_ratio),
    })
}

/// Hermitian Laurent polynomial `L = P + P_*` with `P(0)` real.
///
/// It is stored through `P` and through the self-reciprocal polynomial
/// `A = z^r L` of degree `2r`. The coefficient of `z^j` in `L` is the
/// coefficient of `z^(j+r)` in `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermitianLaurent {
    p: ComplexPoly,
    a: ComplexPoly,
    r: usize,
}

impl HermitianLaurent {
    /// Builds `L` from `P`; the imaginary part of `P(0)` must be negligible.
    pub fn from_p(p: &ComplexPoly, tol: Tolerance) -> Result<Self> {
        let r = p.nominal_degree();
        if r < 1 {
            return Err(Error::Invalid("P must have degree at least 1".into()));
        }
        let r = r as usize;
        let p0 = p.coeff(0);
        if !tol.negligible(p0.im, p.max_abs()) {
            return Err(Error::NotHermitian(format!("P(0) = {p0} is not real")));
        }
        let mut pc = p.coeffs().to_vec();
        pc[0] = C64::new(p0.re, 0.0);
        let p = ComplexPoly::new(pc);
        let mut a = vec![ZERO; 2 * r + 1];
        a[r] = C64::new(2.0 * p0.re, 0.0);
        for j in 1..=r {
            a[r + j] = p.coeff(j);
            a[r - j] = p.coeff(j).conj();
        }
        Ok(Self { p, a: ComplexPoly::new(a), r })
    }

    /// Builds `L = z^-r A` from a self-reciprocal `A` of even degree.
    pub fn from_a(a: &ComplexPoly, tol: Tolerance) -> Result<Self> {
        let d = a.nominal_degree();
        if d < 2 || d % 2 != 0 {
            return Err(Error::Invalid("A must have even degree at least 2".into()));
        }
        if !is_self_reciprocal(a, d as usize, tol) {
            return Err(Error::NotHermitian("A is not self-reciprocal".into()));
        }
        let r = d as usize / 2;
        let mut p = vec![C64::new(a.coeff(r).re / 2.0, 0.0)];
        p.extend((1..=r).map(|j| a.coeff(r + j)));
        Self::from_p(&ComplexPoly::new(p), tol)
    }

    /// Degree one case `P = alpha z + beta`.
    pub fn from_alpha_beta(alpha: C64, beta: f64) -> Result<Self> {
        if alpha == ZERO {
            return Err(Error::Invalid("alpha must be nonzero".into()));
        }
        Self::from_p(&ComplexPoly::new(vec![C64::new(beta, 0.0), alpha]), Tolerance::DEFAULT)
    }

    pub fn degree(&self) -> usize {
        self.r
    }

    pub fn p(&self) -> &ComplexPoly {
        &self.p
    }

    pub fn a(&self) -> &ComplexPoly {
        &self.a
    }

    /// Leading coefficient of `P` and of `A`.
    pub fn alpha(&self) -> C64 {
        self.p.leading()
    }

    /// `P(0)`.
    pub fn beta(&self) -> f64 {
        self.p.coeff(0).re
    }

    /// Coefficient of `z^j` in `L`, for `|j| <= r`.
    pub fn coefficient(&self, j: isize) -> C64 {
        let k = j + self.r as isize;
        if k < 0 {
            ZERO
        } else {
            self.a.coeff(k as usize)
        }
    }

    pub fn eval_a(&self, z: C64) -> C64 {
        self.a.eval(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use proptest::prelude::*;

    fn poly(v: &[(f64, f64)]) -> ComplexPoly {
        ComplexPoly::new(v.iter().map(|&(a, b)| c(a, b)).collect())
    }

    fn arb_poly(max_len: usize) -> impl Strategy<Value = ComplexPoly> {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..=max_len)
            .prop_map(|v| poly(&v))
    }

    #[test]
    fn reverse_examples() {
        let p = poly(&[(1.0, 0.0), (0.0, 2.0)]);
        assert_eq!(p.reverse(1).unwrap(), poly(&[(0.0, -2.0), (1.0, 0.0)]));
        let q = poly(&[(1.0, 0.0), (0.0, 0.0), (3.0, 0.0)]);
        assert_eq!(q.reverse(3).unwrap(), poly(&[(0.0, 0.0), (3.0, 0.0), (0.0, 0.0), (1.0, 0.0)]));
        assert_eq!(ComplexPoly::zero().reverse(4).unwrap(), ComplexPoly::zero());
        assert!(matches!(q.reverse(1), Err(Error::ReversalOrder { .. })));
    }

    #[test]
    fn self_reciprocal_examples() {
        let tol = Tolerance::DEFAULT;
        assert!(is_self_reciprocal(&ComplexPoly::from_real(&[1.0, 2.0, 1.0]), 2, tol));
        assert!(is_self_reciprocal(&poly(&[(0.0, -1.0), (0.0, 0.0), (0.0, 1.0)]), 2, tol));
        assert!(!is_self_reciprocal(&ComplexPoly::from_real(&[0.0, 1.0]), 1, tol));
    }

    #[test]
    fn jmatrix_det_example() {
        // C = z + 1/2, D = 1/4, r = 1.
        let j = JMatrix::new(ComplexPoly::from_real(&[0.5, 1.0]), ComplexPoly::from_real(&[0.25]), 1).unwrap();
        let d = j.det();
        let expect = ComplexPoly::from_real(&[0.5, 1.25 - 0.0625, 0.5]);
        assert!(d.max_diff(&expect) < 1e-15);
        assert!(is_self_reciprocal(&d, 2, Tolerance::DEFAULT));
    }

    #[test]
    fn decomposition_of_unity_basis() {
        // psi = z: A = z^2 + 2z + 1 = (z + 2) z + 1 * 1.
        let a = ComplexPoly::from_real(&[1.0, 2.0, 1.0]);
        let dec = decompose_in_mop_basis(&a, &ComplexPoly::monomial(1), 1).unwrap();
        assert!(dec.c.max_diff(&ComplexPoly::from_real(&[2.0, 1.0])) < 1e-15);
        assert!(dec.d.max_diff(&ComplexPoly::from_real(&[1.0])) < 1e-15);
    }

    #[test]
    fn laurent_from_p() {
        let l = HermitianLaurent::from_p(&ComplexPoly::from_real(&[1.0, 1.0]), Tolerance::DEFAULT).unwrap();
        assert_eq!(l.a(), &ComplexPoly::from_real(&[1.0, 2.0, 1.0]));
        assert_eq!(l.coefficient(0), c(2.0, 0.0));
        assert!(HermitianLaurent::from_p(&poly(&[(1.0, 1.0), (1.0, 0.0)]), Tolerance::DEFAULT).is_err());
        assert!(HermitianLaurent::from_p(&ComplexPoly::from_real(&[1.0]), Tolerance::DEFAULT).is_err());
        let back = HermitianLaurent::from_a(l.a(), Tolerance::DEFAULT).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn proportional_examples() {
        let q = ComplexPoly::from_real(&[1.0, 2.0, 1.0]);
        let p = q.scale(c(-3.0, 0.0));
        assert_eq!(proportional(&p, &q, Tolerance::DEFAULT).unwrap(), Some(-3.0));
        let p = q.scale(c(0.0, 1.0));
        assert_eq!(proportional(&p, &q, Tolerance::DEFAULT).unwrap(), None);
        assert!(proportional(&ComplexPoly::zero(), &q, Tolerance::DEFAULT).is_err());
    }

    #[test]
    fn div_linear_example() {
        // z^2 - 1 = (z - 1)(z + 1)
        let (q, r) = ComplexPoly::from_real(&[-1.0, 0.0, 1.0]).div_linear(c(1.0, 0.0));
        assert_eq!(q, ComplexPoly::from_real(&[1.0, 1.0]));
        assert_eq!(r, c(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn reverse_is_involutive(p in arb_poly(6), extra in 0usize..3) {
            let n = p.nominal_degree().max(0) as usize + extra;
            let back = p.reverse(n).unwrap().reverse(n).unwrap();
            prop_assert!(back.max_diff(&p) == 0.0);
        }

        #[test]
        fn reverse_is_multiplicative(p in arb_poly(4), q in arb_poly(4)) {
            let n = p.nominal_degree().max(0) as usize;
            let m = q.nominal_degree().max(0) as usize;
            let lhs = (&p * &q).reverse(n + m).unwrap();
            let rhs = &p.reverse(n).unwrap() * &q.reverse(m).unwrap();
            prop_assert!(lhs.max_diff(&rhs) <= 1e-12 * (1.0 + lhs.max_abs()));
        }

        #[test]
        fn jmatrix_det_self_reciprocal(c0 in arb_poly(3), d0 in arb_poly(2)) {
            let c1 = c0.truncated(3);
            let d1 = d0.truncated(2);
            let j = JMatrix::new(c1, d1, 2).unwrap();
            let det = j.det();
            let rev = det.reverse(4).unwrap();
            prop_assert!(det.max_diff(&rev) <= 1e-12 * (1.0 + det.max_abs()));
            let via_matrix = j.to_matrix().det();
            prop_assert!(det.max_diff(&via_matrix) <= 1e-12 * (1.0 + det.max_abs()));
        }

        #[test]
        fn decomposition_reconstructs(
            omega in arb_poly(5),
            roots in prop::collection::vec((-0.9..0.9f64, -0.9..0.9f64), 2),
        ) {
            let psi = roots.iter().fold(ComplexPoly::one(), |acc, &(a, b)| &acc * &ComplexPoly::linear(c(a, b)));
            let omega = omega.truncated(5);
            let dec = decompose_in_mop_basis(&omega, &psi, 2).unwrap();
            let back = &(&dec.c * &psi) + &(&dec.d * &psi.reverse(2).unwrap());
            prop_assert!(back.max_diff(&omega) <= 1e-9 * (1.0 + omega.max_abs()));
        }
    }
}
