//! Degree one inverse problem over the Lebesgue functional, solved in
//! closed form.
//!
//! For `u` the Lebesgue functional (all `a_n = 0`) and `L = alpha z + 2 beta + conj(alpha)/z`,
//! the inverse recurrence collapses to `s_n = 2 omega - 1/s_{n-1}` with
//! `omega = beta/|alpha|`, solved by Chebyshev polynomials of the second kind.
//! The projective sequence `sigma_n = U_{n-1}(omega) / U_n(omega)` lists the
//! initial values `s_0` that lose quasi-definiteness.
//!
//! Everything generic over [`Field`] runs both in `f64` and in exact
//! rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::ComplexPoly;
use crate::{Error, Result, Tolerance, C64};

/// Band around `|omega| = 1` treated as the parabolic case.
pub const PARABOLIC_BAND: f64 = 1e-9;

/// Scalars the closed forms can be evaluated in.
pub trait Field: Clone + Num + std::fmt::Debug {
    /// `self` counts as zero next to `scale`.
    fn negligible(&self, scale: &Self, tol: f64) -> bool;
}

impl Field for f64 {
    fn negligible(&self, scale: &Self, tol: f64) -> bool {
        self.abs() <= tol * scale.abs()
    }
}

impl Field for BigRational {
    fn negligible(&self, _scale: &Self, _tol: f64) -> bool {
        self.is_zero()
    }
}

/// Point of the projective line `num : den`; `den = 0` is infinity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projective<T> {
    pub num: T,
    pub den: T,
}

impl<T: Field> Projective<T> {
    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }
}

impl Projective<f64> {
    pub fn value(&self) -> f64 {
        self.num / self.den
    }
}

impl Projective<BigRational> {
    /// `num / den` as a reduced rational, `None` at infinity.
    pub fn value(&self) -> Option<BigRational> {
        (!self.is_infinite()).then(|| self.num.clone() / self.den.clone())
    }
}

/// `U_k(omega)` for `k = -2 ..= n`, stored at offset 2.
pub fn cheb_u_table<T: Field>(omega: &T, n: usize) -> Vec<T> {
    let two_omega = omega.clone() + omega.clone();
    let mut u = vec![T::zero() - T::one(), T::zero()];
    for k in 0..=n {
        let next = two_omega.clone() * u[k + 1].clone() - u[k].clone();
        u.push(next);
    }
    u
}

/// `U_n(omega)` for `n >= -2`.
pub fn cheb_u(n: i64, omega: f64) -> f64 {
    if n < -2 {
        return f64::NAN;
    }
    let t = cheb_u_table(&omega, n.max(0) as usize);
    t[(n + 2) as usize]
}

/// `sigma_0 ..= sigma_n` as pairs `(U_{k-1}, U_k)`.
pub fn sigma_pairs<T: Field>(omega: &T, n: usize) -> Vec<Projective<T>> {
    let u = cheb_u_table(omega, n);
    (0..=n)
        .map(|k| Projective { num: u[k + 1].clone(), den: u[k + 2].clone() })
        .collect()
}

/// Iterates `s_n = 2 omega - 1/s_{n-1}` until `s_n = 0` or `n_max`.
/// Returns the values and the index where `s` vanished, if it did.
pub fn s_iterate<T: Field>(omega: &T, s0: &T, n_max: usize, tol: f64) -> (Vec<T>, Option<usize>) {
    let two_omega = omega.clone() + omega.clone();
    let scale = T::one();
    let mut s = vec![s0.clone()];
    if s0.negligible(&scale, tol) {
        return (s, Some(0));
    }
    for n in 1..=n_max {
        let next = two_omega.clone() - T::one() / s[n - 1].clone();
        let zero = next.negligible(&scale, tol);
        s.push(next);
        if zero {
            return (s, Some(n));
        }
    }
    (s, None)
}

/// First `n <= n_max` with `s0 U_n(omega) = U_{n-1}(omega)`.
pub fn first_failure<T: Field + Signed>(omega: &T, s0: &T, n_max: usize, tol: f64) -> Option<usize> {
    let u = cheb_u_table(omega, n_max);
    (0..=n_max).find(|&n| {
        let lhs = s0.clone() * u[n + 2].clone();
        let rhs = u[n + 1].clone();
        let scale = lhs.abs() + rhs.abs();
        (lhs - rhs).negligible(&scale, tol)
    })
}

/// Shape of the solution set, by `|omega|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `|omega| > 1`: real `lambda` off the circle, `s_n` converges.
    Hyperbolic,
    /// `|omega| = 1`: double root, `s_n` converges like `1/n`.
    Parabolic,
    /// `|omega| < 1`: `lambda` on the circle, `s_n` rotates.
    Elliptic,
}

impl Regime {
    pub fn of(omega: f64) -> Self {
        let d = omega.abs() - 1.0;
        if d.abs() <= PARABOLIC_BAND {
            Regime::Parabolic
        } else if d > 0.0 {
            Regime::Hyperbolic
        } else {
            Regime::Elliptic
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::Hyperbolic => "a",
            Regime::Parabolic => "b",
            Regime::Elliptic => "c",
        }
    }
}

/// The perturbation `P = alpha z + beta` over the Lebesgue functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LebesgueProblem {
    pub alpha: C64,
    pub beta: f64,
}

impl LebesgueProblem {
    pub fn new(alpha: C64, beta: f64) -> Result<Self> {
        if alpha.norm() == 0.0 || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Invalid("alpha must be finite and nonzero".into()));
        }
        Ok(Self { alpha, beta })
    }

    pub fn omega(&self) -> f64 {
        self.beta / self.alpha.norm()
    }

    pub fn omega_tilde(&self) -> C64 {
        C64::new(self.beta, 0.0) / self.alpha
    }

    /// `conj(alpha) / |alpha|`.
    pub fn phase(&self) -> C64 {
        self.alpha.conj() / self.alpha.norm()
    }

    pub fn regime(&self) -> Regime {
        Regime::of(self.omega())
    }

    /// `omega + sqrt(omega^2 - 1)`, the root of `B` of modulus at most one.
    pub fn lambda(&self) -> C64 {
        let w = self.omega();
        let root = C64::new(w * w - 1.0, 0.0).sqrt();
        let l = C64::new(w, 0.0) + root;
        if l.norm() > 1.0 + 1e-15 {
            C64::new(w, 0.0) - root
        } else {
            l
        }
    }

    /// `B(s) = s^2 - 2 omega s + 1`.
    pub fn b_poly(&self, s: f64) -> f64 {
        s * s - 2.0 * self.omega() * s + 1.0
    }

    /// `A(z) = alpha z^2 + 2 beta z + conj(alpha)`.
    pub fn a_poly(&self, z: C64) -> C64 {
        self.alpha * z * z + 2.0 * self.beta * z + self.alpha.conj()
    }

    /// Zeros `-lambda conj(alpha)/|alpha|` and `-conj(alpha)/(lambda |alpha|)` of `A`.
    pub fn zeros(&self) -> (C64, C64) {
        let l = self.lambda();
        (-l * self.phase(), -self.phase() / l)
    }

    /// Limit of `s_n` for a quasi-definite start, when it exists.
    pub fn s_limit(&self) -> Option<f64> {
        match self.regime() {
            Regime::Hyperbolic => Some(1.0 / self.lambda().re),
            Regime::Parabolic => Some(self.omega().signum()),
            Regime::Elliptic => None,
        }
    }
}

/// `s_n` by recursion and by the Chebyshev closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SSequence {
    pub recursive: Vec<f64>,
    pub closed: Vec<f64>,
    /// Index with `s_n = 0`, after which no MOP exists.
    pub stop: Option<usize>,
    pub max_deviation: f64,
}

/// `(s_0 U_n - U_{n-1}) / (s_0 U_{n-1} - U_{n-2})`.
pub fn s_closed(omega: f64, s0: f64, n: usize) -> f64 {
    let u = cheb_u_table(&omega, n);
    (s0 * u[n + 2] - u[n + 1]) / (s0 * u[n + 1] - u[n])
}

pub fn s_sequence(omega: f64, s0: f64, n_max: usize, tol: Tolerance) -> SSequence {
    let (recursive, stop) = s_iterate(&omega, &s0, n_max, tol.value());
    let u = cheb_u_table(&omega, recursive.len());
    let closed: Vec<f64> = (0..recursive.len())
        .map(|n| (s0 * u[n + 2] - u[n + 1]) / (s0 * u[n + 1] - u[n]))
        .collect();
    let max_deviation = recursive
        .iter()
        .zip(&closed)
        .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
        .fold(0.0, f64::max);
    SSequence { recursive, closed, stop, max_deviation }
}

/// Quasi-definiteness of the solution started at `s0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub regime: Regime,
    /// First `n` with `s_0 U_n = U_{n-1}`; the solution is then
    /// quasi-definite in degree `n` but not `n + 1`.
    pub first_failure: Option<usize>,
    /// Number of MOP when finite.
    pub mop_count: Option<usize>,
    /// `B(s_0) = |b_1 - x_0|^2`.
    pub circle_radius_sq: f64,
    /// The circle of solutions is a single point (Bernstein–Szegő).
    pub degenerate_circle: bool,
}

pub fn classify(omega: f64, s0: f64, n_max: usize, tol: Tolerance) -> Result<Classification> {
    let radius_sq = s0 * s0 - 2.0 * omega * s0 + 1.0;
    if radius_sq < -tol.value() {
        return Err(Error::Invalid(format!("no solution: B(s_0) = {radius_sq} < 0")));
    }
    let first = first_failure(&omega, &s0, n_max, tol.value());
    Ok(Classification {
        regime: Regime::of(omega),
        first_failure: first,
        mop_count: first.map(|n| n + 1),
        circle_radius_sq: radius_sq,
        degenerate_circle: radius_sq.abs() <= tol.value(),
    })
}

/// Exact counterpart of [`classify`] for rational `omega` and `s0`.
pub fn classify_exact(omega: &BigRational, s0: &BigRational, n_max: usize) -> Option<usize> {
    first_failure(omega, s0, n_max, 0.0)
}

/// `(num, den)` as a rational; `den` must be nonzero.
pub fn rational(num: i64, den: i64) -> Result<BigRational> {
    if den == 0 {
        return Err(Error::Invalid("zero denominator".into()));
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Exact value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Invalid(format!("{x} is not finite")))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Normalised perturbation with `|alpha| = 1` recovered from `(b_1, x_0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveredParams {
    pub alpha: C64,
    pub beta: f64,
    pub s0: f64,
}

/// `alpha = k conj(x_0)` and `beta = (k/2)(1 - |b_1|^2 + 2 Re(conj(x_0) b_1))`
/// with `k = 1/|x_0|`.
pub fn params_from_b1_x0(b1: C64, x0: C64) -> Result<RecoveredParams> {
    let m = x0.norm();
    if m == 0.0 {
        return Err(Error::Invalid("x_0 = 0".into()));
    }
    let k = 1.0 / m;
    let alpha = x0.conj() * k;
    let beta = 0.5 * k * (1.0 - b1.norm_sqr() + 2.0 * (x0.conj() * b1).re);
    Ok(RecoveredParams { alpha, beta, s0: m })
}

/// Initial data of the inverse recurrence for given `(alpha, beta, b_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialData {
    pub s0: f64,
    pub x0: C64,
    pub y0: C64,
    pub b2: C64,
}

pub fn params_from_ab_b1(p: &LebesgueProblem, b1: C64) -> Result<InitialData> {
    let q = 1.0 - b1.norm_sqr();
    if q == 0.0 {
        return Err(Error::UnitModulus { index: 1 });
    }
    let den = p.beta - (p.alpha * b1).re;
    if den == 0.0 {
        return Err(Error::Pole("beta = Re(alpha b_1)".into()));
    }
    let am = p.a_poly(-b1);
    Ok(InitialData {
        s0: 0.5 * p.alpha.norm() * q / den,
        x0: p.alpha.conj() * (0.5 * q / den),
        y0: -0.5 * am / den,
        b2: am / (p.alpha * q),
    })
}

/// Points `b_1` compatible with `s_0`: `|b_1 - x_0|^2 = B(s_0)`.
pub fn b1_on_circle(p: &LebesgueProblem, s0: f64, angle: f64) -> Result<C64> {
    let r2 = p.b_poly(s0);
    if r2 < 0.0 {
        return Err(Error::Invalid(format!("no solution: B(s_0) = {r2} < 0")));
    }
    let x0 = p.phase() * s0;
    Ok(x0 + C64::from_polar(r2.sqrt(), angle))
}

/// Schur parameters of one solution, by recursion and in closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub x: Vec<C64>,
    /// `b_1, b_2, ...` by recursion.
    pub b: Vec<C64>,
    /// `b_1, b_2, ...` from the closed form.
    pub b_closed: Vec<C64>,
    pub stop: Option<usize>,
}

impl Trajectory {
    /// `|b_{n+1} / b_n|` for `n >= 1`.
    pub fn ratios(&self) -> Vec<f64> {
        self.b.windows(2).map(|w| w[1].norm() / w[0].norm()).collect()
    }

    /// `psi_{n+1} = (z + x_n) z^n + y_n`, with `y_n = b_{n+1}` for `n >= 1`.
    pub fn psi(&self, n: usize) -> Option<ComplexPoly> {
        let x = *self.x.get(n)?;
        let y = if n == 0 { self.b[0] - x } else { *self.b.get(n)? };
        let mut c = vec![C64::new(0.0, 0.0); n + 2];
        c[0] = y;
        c[n] += x;
        c[n + 1] = C64::new(1.0, 0.0);
        Some(ComplexPoly::new(c))
    }

    pub fn max_relative_gap(&self) -> f64 {
        self.b
            .iter()
            .zip(&self.b_closed)
            .map(|(p, q)| (p - q).norm() / (1.0 + q.norm()))
            .fold(0.0, f64::max)
    }
}

/// Runs `x_n = (|x_{n-1}|^2 - |y_{n-1}|^2)/conj(x_{n-1})`,
/// `y_n = -y_{n-1}/conj(x_{n-1})` with `b_{n+1} = y_n` for `1 <= n < n_max`.
pub fn solution_trajectory(p: &LebesgueProblem, b1: C64, n_max: usize, tol: Tolerance) -> Result<Trajectory> {
    let init = params_from_ab_b1(p, b1)?;
    let omega = p.omega();
    let phase = p.phase();
    let mut x = vec![init.x0];
    let mut y = vec![init.y0];
    let mut stop = None;
    for n in 1..n_max {
        let (xp, yp) = (x[n - 1], y[n - 1]);
        if tol.negligible(xp.norm(), 1.0 + yp.norm()) {
            stop = Some(n - 1);
            break;
        }
        x.push((xp.norm_sqr() - yp.norm_sqr()) / xp.conj());
        y.push(-yp / xp.conj());
    }
    if stop.is_none() && tol.negligible(x.last().unwrap().norm(), 1.0 + y.last().unwrap().norm()) {
        stop = Some(x.len() - 1);
    }
    let u = cheb_u_table(&omega, y.len());
    let s0 = init.s0;
    let mut b = vec![b1];
    b.extend(&y[1..]);
    let mut b_closed = vec![b1];
    let mut rot = C64::new(1.0, 0.0);
    for n in 1..y.len() {
        rot *= -phase;
        // U_{n-1} and U_{n-2} sit at offsets n + 1 and n
        b_closed.push(rot * init.y0 / (s0 * u[n + 1] - u[n]));
    }
    let s = x.iter().map(|xn| (xn / phase).re).collect();
    Ok(Trajectory { s, x, b, b_closed, stop })
}

/// Function whose Newton map is `s -> 2 omega - 1/s`.
pub fn newton_f(omega: f64, s: f64) -> Result<f64> {
    let bs = s * s - 2.0 * omega * s + 1.0;
    match Regime::of(omega) {
        Regime::Hyperbolic => {
            let r = (omega * omega - 1.0).sqrt();
            let (l1, l2) = if omega > 0.0 { (omega - r, omega + r) } else { (omega + r, omega - r) };
            if (s - l1).abs() < 1e-12 || (s - l2).abs() < 1e-12 {
                return Err(Error::Pole(format!("s = {s} is a root of B")));
            }
            let log = (l2 * (s - l2).abs().ln() - l1 * (s - l1).abs().ln()) / (l2 - l1);
            Ok(log.exp())
        }
        Regime::Parabolic => {
            let w = omega.signum();
            if (s - w).abs() < 1e-12 {
                return Err(Error::Pole(format!("s = {s} is the double root of B")));
            }
            Ok((s - w).abs() * (w / (w - s)).exp())
        }
        Regime::Elliptic => {
            let r = (1.0 - omega * omega).sqrt();
            Ok(bs.sqrt() * (omega / r * ((s - omega) / r).atan()).exp())
        }
    }
}

/// CSV tables behind the trajectory and Newton-function plots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    /// `n,s_rec,s_closed,sigma_num,sigma_den`
    pub trajectory_csv: String,
    /// `s,f`
    pub newton_csv: String,
}

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Trajectory of `s_n` next to `sigma_n`, and `f` sampled on `[lo, hi]`.
pub fn emit_figure_data(omega: f64, s0: f64, n_max: usize, samples: usize, range: (f64, f64), tol: Tolerance) -> FigureData {
    let seq = s_sequence(omega, s0, n_max, tol);
    let sig = sigma_pairs(&omega, n_max);
    let mut t = String::from("n,s_rec,s_closed,sigma_num,sigma_den\n");
    for (n, sg) in sig.iter().enumerate() {
        let rec = seq.recursive.get(n).map_or(String::new(), |v| fmt17(*v));
        let clo = seq.closed.get(n).map_or(String::new(), |v| fmt17(*v));
        t.push_str(&format!("{n},{rec},{clo},{},{}\n", fmt17(sg.num), fmt17(sg.den)));
    }
    let mut f = String::from("s,f\n");
    let (lo, hi) = range;
    for k in 0..samples {
        let s = if samples == 1 { lo } else { lo + (hi - lo) * k as f64 / (samples - 1) as f64 };
        if let Ok(v) = newton_f(omega, s) {
            f.push_str(&format!("{},{}\n", fmt17(s), fmt17(v)));
        }
    }
    FigureData { trajectory_csv: t, newton_csv: f }
}

/// Exact sigma values as reduced fractions, `None` at infinity.
pub fn sigma_exact(omega: &BigRational, n: usize) -> Vec<Option<BigRational>> {
    sigma_pairs(omega, n).iter().map(|p| p.value()).collect()
}

/// `p/q`, or `p` for integers.
pub fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use crate::inverse::{inverse_init_i2, run_inverse, InverseOptions};
    use crate::opuc::{mop, SchurSequence};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        rational(n, d).unwrap()
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(cheb_u(-2, 0.3), -1.0);
        assert_eq!(cheb_u(-1, 0.3), 0.0);
        assert_eq!(cheb_u(0, 0.3), 1.0);
        assert!((cheb_u(3, 1.0 / 2f64.sqrt())).abs() < 1e-15);
        // U_n(1) = n + 1
        assert_eq!(cheb_u(7, 1.0), 8.0);
    }

    #[test]
    fn sigma_for_five_quarters() {
        let s = sigma_exact(&q(5, 4), 4);
        assert_eq!(s[0], Some(q(0, 1)));
        assert_eq!(s[1], Some(q(2, 5)));
        assert_eq!(s[2], Some(q(10, 21)));
        // 2 (4^n - 1) / (4^(n+1) - 1)
        for (n, v) in s.iter().enumerate() {
            let p = 4i64.pow(n as u32);
            assert_eq!(v, &Some(q(2 * (p - 1), 4 * p - 1)));
        }
    }

    #[test]
    fn sigma_for_four_fifths() {
        assert_eq!(sigma_exact(&q(4, 5), 4)[4], Some(q(-560, 79)));
    }

    #[test]
    fn exact_stops() {
        assert_eq!(classify_exact(&q(5, 4), &q(10, 21), 20), Some(2));
        assert_eq!(classify_exact(&q(5, 4), &q(1, 3), 40), None);
        assert_eq!(classify_exact(&q(1, 1), &q(3, 4), 20), Some(3));
        assert_eq!(classify_exact(&q(4, 5), &q(-560, 79), 20), Some(4));
        let (s, stop) = s_iterate(&q(5, 4), &q(10, 21), 10, 0.0);
        assert_eq!(stop, Some(2));
        assert_eq!(s[1], q(2, 5));
    }

    #[test]
    fn quarter_circle_case() {
        // omega = 1/sqrt 2: sigma is 0, 1/sqrt2, sqrt2, inf, then repeats.
        let w = 1.0 / 2f64.sqrt();
        let sig = sigma_pairs(&w, 7);
        assert!(sig[3].den.abs() < 1e-15);
        assert!((sig[1].value() - w).abs() < 1e-15);
        assert!((sig[2].value() - 2f64.sqrt()).abs() < 1e-15);
        // s0 = sigma_1 stops at n = 1, s0 = sigma_2 at n = 2.
        let tol = Tolerance::DEFAULT;
        assert_eq!(classify(w, w, 20, tol).unwrap().mop_count, Some(2));
        assert_eq!(classify(w, 2f64.sqrt(), 20, tol).unwrap().mop_count, Some(3));
        assert_eq!(classify(w, 1.0, 40, tol).unwrap().first_failure, None);
        let (s, _) = s_iterate(&w, &1.0, 40, tol.value());
        for n in 0..=36 {
            assert!((s[n + 4] - s[n]).abs() < 1e-10);
        }
    }

    #[test]
    fn initial_data_examples() {
        let p = LebesgueProblem::new(c(1.0, 0.0), 1.25).unwrap();
        let d = params_from_ab_b1(&p, c(0.0, 0.0)).unwrap();
        assert!((d.s0 - 0.4).abs() < 1e-15);
        assert!((d.x0 - c(0.4, 0.0)).norm() < 1e-15);
        assert!((d.y0 - c(-0.4, 0.0)).norm() < 1e-15);
        // A(-b_1) = 0 at b_1 = 1/2: Bernstein–Szegő, y_0 = 0.
        let d = params_from_ab_b1(&p, c(0.5, 0.0)).unwrap();
        assert!(d.y0.norm() < 1e-15);
        assert!((d.x0 - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn classify_rejects_empty_circle() {
        // B(1) = 2 - 2 omega < 0 for omega > 1
        assert!(classify(1.25, 1.0, 5, Tolerance::DEFAULT).is_err());
        assert!(classify(1.25, 0.5, 5, Tolerance::DEFAULT).unwrap().degenerate_circle);
    }

    #[test]
    fn case_a_asymptotics() {
        let p = LebesgueProblem::new(c(1.0, 0.0), 1.25).unwrap();
        let b1 = b1_on_circle(&p, 1.0 / 3.0, 0.7).unwrap();
        let tr = solution_trajectory(&p, b1, 41, Tolerance::DEFAULT).unwrap();
        assert!((tr.s[30] - 2.0).abs() < 1e-8);
        assert!((tr.ratios()[39] - 0.5).abs() < 1e-6);
        // s_1 = -1/2, s_2 = 9/2 from s_0 = 1/3
        assert!((tr.s[1] + 0.5).abs() < 1e-12 && (tr.s[2] - 4.5).abs() < 1e-12);
    }

    #[test]
    fn psi_from_trajectory_matches_szego() {
        let p = LebesgueProblem::new(c(0.6, 0.8), 0.3).unwrap();
        let b1 = b1_on_circle(&p, 0.9, 2.0).unwrap();
        let tr = solution_trajectory(&p, b1, 6, Tolerance::DEFAULT).unwrap();
        for n in 0..6 {
            let psi = mop(&tr.b[..n + 1]).psi;
            assert!(psi.max_diff(&tr.psi(n).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn zeros_of_a() {
        let p = LebesgueProblem::new(c(1.0, 0.0), 1.25).unwrap();
        let (z1, z2) = p.zeros();
        assert!(p.a_poly(z1).norm() < 1e-14 && p.a_poly(z2).norm() < 1e-14);
        assert!((z1 - c(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(p.regime(), Regime::Hyperbolic);
        assert_eq!(p.s_limit(), Some(2.0));
    }

    #[test]
    fn newton_examples() {
        let f = newton_f(1.25, 0.0).unwrap();
        let expect = (4.0f64 / 0.5f64.sqrt()).powf(1.0 / 1.5);
        assert!((f - expect).abs() < 1e-12);
        assert!((newton_f(1.0, 0.0).unwrap() - 1f64.exp()).abs() < 1e-12);
        assert!(newton_f(1.25, 0.5).is_err());
    }

    #[test]
    fn figure_csv_shape() {
        let fig = emit_figure_data(1.25, 1.0 / 3.0, 5, 3, (-1.0, 0.0), Tolerance::DEFAULT);
        let lines: Vec<_> = fig.trajectory_csv.lines().collect();
        assert_eq!(lines[0], "n,s_rec,s_closed,sigma_num,sigma_den");
        assert_eq!(lines.len(), 7);
        assert!(fig.newton_csv.starts_with("s,f\n"));
        assert_eq!(fig.newton_csv.lines().count(), 4);
    }

    proptest! {
        #[test]
        fn newton_map_identity(w in -3.0..3.0f64, s in -4.0..4.0f64) {
            prop_assume!((w.abs() - 1.0).abs() > 0.05);
            let bs = s * s - 2.0 * w * s + 1.0;
            prop_assume!(bs.abs() > 0.05 && s.abs() > 0.05);
            let h = 1e-6;
            let f = newton_f(w, s).unwrap();
            let df = (newton_f(w, s + h).unwrap() - newton_f(w, s - h).unwrap()) / (2.0 * h);
            let lhs = s - f / df;
            let rhs = 2.0 * w - 1.0 / s;
            prop_assert!((lhs - rhs).abs() <= 1e-5 * (1.0 + rhs.abs()));
        }

        #[test]
        fn closed_form_matches_recursion(w in -2.0..2.0f64, s0 in -3.0..3.0f64) {
            let seq = s_sequence(w, s0, 12, Tolerance::DEFAULT);
            let ok = seq.recursive.iter().all(|v| v.abs() > 1e-3);
            prop_assume!(ok);
            prop_assert!(seq.max_deviation < 1e-6);
        }

        #[test]
        fn recovered_params_reproduce_s0(w in -2.0..2.0f64, s0 in -2.0..2.0f64, th in 0.0..std::f64::consts::TAU, ph in 0.0..std::f64::consts::TAU) {
            let p = LebesgueProblem::new(C64::from_polar(1.0, th), w).unwrap();
            prop_assume!(p.b_poly(s0) > 0.01 && s0.abs() > 0.05);
            let b1 = b1_on_circle(&p, s0, ph).unwrap();
            prop_assume!((1.0 - b1.norm_sqr()).abs() > 0.05);
            let d = params_from_ab_b1(&p, b1).unwrap();
            prop_assert!((d.s0 - s0).abs() < 1e-9 * (1.0 + s0.abs()));
            prop_assert!((d.x0 + d.y0 - b1).norm() < 1e-9);
            let r = params_from_b1_x0(b1, d.x0).unwrap();
            // same L up to a real factor
            let k = r.alpha.norm() / p.alpha.norm();
            let sign = (r.alpha / p.alpha).re.signum();
            prop_assert!((r.alpha - p.alpha * k * sign).norm() < 1e-9);
            prop_assert!((r.beta - p.beta * k * sign).abs() < 1e-9 * (1.0 + p.beta.abs()));
        }

        #[test]
        fn trajectory_matches_inverse_module(w in -2.0..2.0f64, s0 in -2.0..2.0f64, th in 0.0..std::f64::consts::TAU, ph in 0.0..std::f64::consts::TAU) {
            let p = LebesgueProblem::new(C64::from_polar(1.3, th), 1.3 * w).unwrap();
            prop_assume!(p.b_poly(s0) > 0.01 && s0.abs() > 0.05);
            let b1 = b1_on_circle(&p, s0, ph).unwrap();
            prop_assume!((1.0 - b1.norm_sqr()).abs() > 0.05);
            let tr = solution_trajectory(&p, b1, 10, Tolerance::DEFAULT).unwrap();
            prop_assume!(tr.stop.is_none() && tr.s.iter().all(|v| v.abs() > 1e-2));
            prop_assert!(tr.max_relative_gap() < 1e-8);
            let d = params_from_ab_b1(&p, b1).unwrap();
            let start = inverse_init_i2(&[b1], &ComplexPoly::new(vec![d.x0, c(1.0, 0.0)]), Tolerance::DEFAULT).unwrap();
            let rep = run_inverse(&start, &SchurSequence::new(vec![c(0.0, 0.0); 9]), 9, InverseOptions::default()).unwrap();
            for (u, v) in rep.b.params().iter().zip(&tr.b) {
                prop_assert!((u - v).norm() <= 1e-8 * (1.0 + v.norm()), "{:?} vs {:?}", rep.b.params(), tr.b);
            }
        }
    }
}
