//! MOP whose associated polynomials come from a degree one perturbation of
//! the original functional.
//!
//! The associated family of `(psi_n)`, parameters `(b_n)`, has parameters
//! `a_n = b_{n+1}`. Its functional `u` equals `vL` with `deg L = 1` exactly
//! when `(b_n) = (b_1, a_1, a_1 l, a_1 l^2, ...)` for a unimodular `l`.

use serde::Serialize;

use crate::algebra::{proportionality_residual, ComplexPoly, HermitianLaurent};
use crate::direct::run_direct;
use crate::opuc::{apply_laurent, schur_to_moments, szego_forward, SchurSequence};
use crate::{Error, Result, Tolerance, C64};

/// One solution, with `P = alpha z + beta` and `C_0 = [[alpha z + c_0, d_0], ...]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssociatedSolution {
    pub a1: C64,
    pub b1: C64,
    pub lambda: C64,
    pub c0: f64,
    pub alpha: C64,
    pub beta: f64,
    pub d0: C64,
    /// `Im(alpha b_1 + conj(b_1) d_0 + c_0) / 2`, zero up to rounding.
    pub beta_imag: f64,
}

impl AssociatedSolution {
    /// `u`: `a_1, a_1 l, ..., a_1 l^{n-1}`.
    pub fn u_sequence(&self, n: usize) -> SchurSequence {
        SchurSequence::new(rotating(self.a1, self.lambda, n))
    }

    /// `v`: `b_1, a_1, a_1 l, ...`, `n` terms.
    pub fn v_sequence(&self, n: usize) -> SchurSequence {
        let mut b = vec![self.b1];
        b.extend(rotating(self.a1, self.lambda, n.saturating_sub(1)));
        b.truncate(n);
        SchurSequence::new(b)
    }

    pub fn laurent(&self) -> Result<HermitianLaurent> {
        HermitianLaurent::from_alpha_beta(self.alpha, self.beta)
    }
}

fn rotating(a1: C64, lambda: C64, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n);
    let mut w = a1;
    for _ in 0..n {
        out.push(w);
        w *= lambda;
    }
    out
}

fn check_parameter(w: C64, name: &str, tol: Tolerance) -> Result<()> {
    if tol.negligible(w.norm() - 1.0, 1.0) {
        return Err(Error::Invalid(format!("|{name}| = 1")));
    }
    Ok(())
}

/// `alpha`, `beta`, `lambda`, `d_0` in terms of `a_1`, `b_1`, `c_0`.
pub fn associated_solution(a1: C64, b1: C64, c0: f64, tol: Tolerance) -> Result<AssociatedSolution> {
    check_parameter(a1, "a_1", tol)?;
    check_parameter(b1, "b_1", tol)?;
    if tol.negligible((a1 - b1).norm(), 1.0) {
        return Err(Error::Invalid("a_1 = b_1 gives u = v".into()));
    }
    if c0 == 0.0 || !c0.is_finite() {
        return Err(Error::Invalid("c_0 must be finite and nonzero".into()));
    }
    let one = C64::new(1.0, 0.0);
    let qa = 1.0 - a1.norm_sqr();
    let qb = 1.0 - b1.norm_sqr();
    let g = a1.conj() * (b1 - a1) + (b1.conj() - a1.conj());
    let alpha = g * (c0 / qa);
    let beta = c0 * (0.5 * qb + (g * b1).re / qa);
    let w = (b1 - one) + a1 * (b1.conj() - one);
    let lambda = w / w.conj();
    let d0 = a1 * w.conj() * (c0 / qa);
    let beta_imag = 0.5 * (alpha * b1 + b1.conj() * d0 + c0).im;
    Ok(AssociatedSolution { a1, b1, lambda, c0, alpha, beta, d0, beta_imag })
}

/// Inverse map: `(a_1, lambda)` and the solution they give, from `(alpha, beta, b_1)`.
pub fn associated_from_perturbation(alpha: C64, beta: f64, b1: C64, tol: Tolerance) -> Result<AssociatedSolution> {
    check_parameter(b1, "b_1", tol)?;
    if alpha.norm() == 0.0 {
        return Err(Error::Invalid("alpha must be nonzero".into()));
    }
    let qb = 1.0 - b1.norm_sqr();
    let gap = beta - (alpha * b1).re;
    let scale = beta.abs() + alpha.norm();
    if tol.negligible(gap, scale) {
        return Err(Error::Pole("beta = Re(alpha b_1), so c_0 = 0".into()));
    }
    let den = alpha * qb - 2.0 * gap;
    if tol.negligible(den.norm(), scale) {
        return Err(Error::Pole("c_0 = alpha".into()));
    }
    let l = HermitianLaurent::from_alpha_beta(alpha, beta)?;
    let am = l.a().eval(-b1);
    let a1 = am / den;
    check_parameter(a1, "a_1", tol)?;
    let c0 = 2.0 * gap / qb;
    let d0 = am / qb;
    let lambda = (alpha.conj() * qb - 2.0 * gap) / den;
    let beta_imag = 0.5 * (alpha * b1 + b1.conj() * d0 + c0).im;
    Ok(AssociatedSolution { a1, b1, lambda, c0, alpha, beta, d0, beta_imag })
}

/// Residuals from [`verify_associated`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociatedCheck {
    /// Real factor `t` of the fit `moments(vL) ~ t moments(u)`.
    pub moment_factor: f64,
    pub moment_residual: f64,
    /// `max |a_j - a_1 l^{j-1}|` from the direct recurrence.
    pub direct_residual: f64,
    /// `max |c_j - c_0|` over the direct run's matrices, relative to
    /// `|alpha| + |c_0| + |d_0|`.
    pub c_drift: f64,
    /// `max |d_j - l^j d_0|`, same scale.
    pub d_residual: f64,
    /// `max |phi_n(z) - l^n phi'_n(conj(l) z)|` with `phi'` of constant
    /// parameters `a_1 conj(l)`.
    pub rotation_residual: f64,
}

impl AssociatedCheck {
    pub fn max_residual(&self) -> f64 {
        [self.moment_residual, self.direct_residual, self.c_drift, self.d_residual, self.rotation_residual]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Moment-level, direct-recurrence and rotation checks through index `n`.
///
/// Rounding errors in the direct run grow roughly like
/// `((1 + |a_1|) / (1 - |a_1|))^n`; the other checks do not amplify them.
pub fn verify_associated(sol: &AssociatedSolution, n: usize, tol: Tolerance) -> Result<AssociatedCheck> {
    let l = sol.laurent()?;
    let v = sol.v_sequence(n + 1);
    let u = sol.u_sequence(n);
    let mu = apply_laurent(&schur_to_moments(&v), &l, n)?;
    let mu_u = schur_to_moments(&u);
    let (moment_factor, moment_residual) = proportionality_residual(
        &ComplexPoly::new(mu.values().to_vec()),
        &ComplexPoly::new(mu_u.values().to_vec()),
    );

    let rep = run_direct(&l, &v, n, tol)?;
    let direct_residual = u
        .params()
        .iter()
        .zip(rep.schur.params())
        .map(|(p, q)| (p - q).norm())
        .fold(if rep.schur.len() < n { f64::INFINITY } else { 0.0 }, f64::max);
    let mut c_drift: f64 = 0.0;
    let mut d_residual: f64 = 0.0;
    let mut rot = C64::new(1.0, 0.0);
    let scale = sol.alpha.norm() + sol.c0.abs() + sol.d0.norm();
    for m in &rep.matrices {
        c_drift = c_drift.max((m.c.coeff(0) - sol.c0).norm() / scale);
        d_residual = d_residual.max((m.d.coeff(0) - rot * sol.d0).norm() / scale);
        rot *= sol.lambda;
    }

    let phi = szego_forward(&u);
    let hat = szego_forward(&SchurSequence::new(vec![sol.a1 * sol.lambda.conj(); n]));
    let mut rotation_residual: f64 = 0.0;
    for k in 0..=n {
        let lk = sol.lambda.powu(k as u32);
        let rotated: Vec<C64> = hat
            .psi(k)
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &cf)| lk * cf * sol.lambda.conj().powu(i as u32))
            .collect();
        rotation_residual = rotation_residual.max(phi.psi(k).max_diff(&ComplexPoly::new(rotated)));
    }
    Ok(AssociatedCheck { moment_factor, moment_residual, direct_residual, c_drift, d_residual, rotation_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use proptest::prelude::*;

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn disk(max: f64) -> impl Strategy<Value = C64> {
        (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
    }

    #[test]
    fn real_a1_has_no_rotation() {
        let s = associated_solution(c(0.4, 0.0), c(0.0, 0.0), 1.0, TOL).unwrap();
        assert!((s.lambda - c(1.0, 0.0)).norm() < 1e-15);
        let v = s.v_sequence(4);
        assert_eq!(v.params(), &[c(0.0, 0.0), c(0.4, 0.0), c(0.4, 0.0), c(0.4, 0.0)]);
    }

    #[test]
    fn half_i_example() {
        let s = associated_solution(c(0.0, 0.5), c(0.0, 0.0), 1.0, TOL).unwrap();
        assert!((s.lambda - c(0.6, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn rejections() {
        assert!(associated_solution(c(0.3, 0.0), c(0.3, 0.0), 1.0, TOL).is_err());
        assert!(associated_solution(c(1.0, 0.0), c(0.3, 0.0), 1.0, TOL).is_err());
        // beta = Re(alpha b_1)
        assert!(matches!(
            associated_from_perturbation(c(1.0, 0.0), 0.3, c(0.3, 0.0), TOL),
            Err(Error::Pole(_))
        ));
        // c_0 = alpha: beta = alpha/2 (1 - |b_1|^2) + Re(alpha b_1)
        assert!(matches!(
            associated_from_perturbation(c(1.0, 0.0), 0.5 * 0.91 + 0.3, c(0.3, 0.0), TOL),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn unimodular_a1_rejected() {
        // pick b_1 = 0: a_1 = conj(alpha) / (alpha - 2 beta); alpha = 1, beta = 1 gives -1
        assert!(associated_from_perturbation(c(1.0, 0.0), 1.0, c(0.0, 0.0), TOL).is_err());
    }

    proptest! {
        #[test]
        fn solutions_verify(a1 in disk(0.9), b1 in disk(0.9), c0 in prop_oneof![-2.0..-0.2f64, 0.2..2.0f64]) {
            prop_assume!((a1 - b1).norm() > 0.05);
            let s = associated_solution(a1, b1, c0, TOL).unwrap();
            prop_assert!((s.lambda.norm() - 1.0).abs() < 1e-12);
            prop_assert!(s.beta_imag.abs() < 1e-12);
            let lam = (s.alpha.conj() - c0) / (s.alpha - c0);
            prop_assert!((lam - s.lambda).norm() < 1e-9);
            let back = associated_from_perturbation(s.alpha, s.beta, b1, TOL).unwrap();
            prop_assert!((back.a1 - a1).norm() < 1e-10);
            prop_assert!((back.lambda - s.lambda).norm() < 1e-10);
            prop_assert!((back.c0 - c0).abs() < 1e-9 * c0.abs().max(1.0));
            let chk = verify_associated(&s, 15, TOL).unwrap();
            prop_assert!(chk.moment_residual < 1e-9, "{:?}", chk);
            prop_assert!(chk.rotation_residual < 1e-10, "{:?}", chk);
        }

        #[test]
        fn direct_run_reproduces_u(a1 in disk(0.5), b1 in disk(0.7)) {
            prop_assume!((a1 - b1).norm() > 0.1);
            let s = associated_solution(a1, b1, 1.0, TOL).unwrap();
            let chk = verify_associated(&s, 12, TOL).unwrap();
            prop_assert!(chk.direct_residual < 1e-9, "{:?}", chk);
            prop_assert!(chk.c_drift < 1e-9 && chk.d_residual < 1e-9, "{:?}", chk);
        }
    }
}
