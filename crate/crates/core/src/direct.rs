//! Direct problem: Schur parameters of `u = vL` from those of `v`.
//!
//! The MOP of the two functionals are tied by `A phi_j = C_j psi_{j+r}` where
//! `C_j` is a J-self-reciprocal matrix of order `r`. Each step reads one new
//! parameter of `v`, produces one of `u` and updates `C_j`. The run halts when
//! `C_j(0)` vanishes, which is exactly when `u` stops being quasi-definite.

use serde::Serialize;

use crate::algebra::{decompose_in_mop_basis, ComplexPoly, HermitianLaurent, JMatrix, PolyMatrix2};
use crate::opuc::{szego_forward, MopPair, SchurSequence, TransferMatrix};
use crate::{Error, Result, Tolerance, C64};

/// Output of a direct run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    /// Schur parameters `a_1, a_2, ...` of `u`.
    pub schur: SchurSequence,
    /// Number of MOP of `u` certified by the run: the first `j` with
    /// `C_j(0) = 0` if `stopped`, else `horizon + 1`.
    pub stop_index: usize,
    pub stopped: bool,
    /// `C_0, C_1, ...` up to the last one computed.
    pub matrices: Vec<JMatrix>,
    /// Relative residual of `C_j T_{j+r} = S_j C_{j-1}` per step.
    pub step_residuals: Vec<f64>,
    /// Relative residual of `A phi_j = C_j psi_{j+r}` per index.
    pub relation_residuals: Vec<f64>,
    /// Relative residual of `det C_j = C_j(0) A` per index.
    pub det_residuals: Vec<f64>,
}

impl ConsistencyReport {
    pub fn max_residual(&self) -> f64 {
        self.step_residuals
            .iter()
            .chain(&self.relation_residuals)
            .chain(&self.det_residuals)
            .fold(0.0, |a, &b| a.max(b))
    }
}

/// One step of the direct recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectStep {
    pub a: C64,
    pub next: JMatrix,
    pub residual: f64,
}

/// `C_0` from `A = C_0 psi_r + D_0 psi_r*`.
pub fn direct_init(l: &HermitianLaurent, b: &SchurSequence) -> Result<JMatrix> {
    let r = l.degree();
    if b.len() < r {
        return Err(Error::TooShort { needed: r, have: b.len() });
    }
    let psi = crate::opuc::mop(&b.params()[..r]).psi;
    let dec = decompose_in_mop_basis(l.a(), &psi, r)?;
    JMatrix::new(dec.c.truncated(r + 1), dec.d.truncated(r), r)
}

fn jmatrix_from(m: &PolyMatrix2, r: usize) -> Result<(JMatrix, f64)> {
    let c = m.m[0][0].truncated(r + 1);
    let d = m.m[0][1].truncated(r);
    let dropped = m.m[0][0].tail_norm(r + 1).max(m.m[0][1].tail_norm(r));
    let j = JMatrix::new(c, d, r)?;
    let full = j.to_matrix();
    let resid = m.max_diff(&full).max(dropped);
    Ok((j, resid))
}

fn transfer_residual(next: &PolyMatrix2, prev: &PolyMatrix2, a: C64, b: C64) -> f64 {
    let lhs = next.mul(&TransferMatrix { b }.to_matrix());
    let rhs = TransferMatrix { b: a }.to_matrix().mul(prev);
    lhs.max_diff(&rhs) / lhs.max_abs().max(rhs.max_abs()).max(f64::MIN_POSITIVE)
}

/// Computes `a_j` from `C_{j-1}` and `b_{j+r}`, then `C_j`.
pub fn direct_step(prev: &JMatrix, b: C64, alpha: C64) -> Result<DirectStep> {
    let r = prev.r;
    let c0 = prev.c.coeff(0);
    if c0.norm() == 0.0 {
        return Err(Error::Pole("C(0) = 0".into()));
    }
    let s = 1.0 - b.norm_sqr();
    if s == 0.0 {
        return Err(Error::UnitModulus { index: 0 });
    }
    let d_top = if r == 0 { C64::new(0.0, 0.0) } else { prev.d.coeff(r - 1) };
    let a = (alpha * b - d_top) / c0;
    let m = PolyMatrix2::hermitian_unit(a)
        .mul(&prev.tilde())
        .mul(&PolyMatrix2::hermitian_unit(-b))
        .scale(C64::new(1.0 / s, 0.0));
    let (raw, shape) = jmatrix_from(&m, r)?;
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    // C_j(0) is real and the leading coefficient of C_j is alpha; pinning both
    // stops rounding errors from being amplified by later steps.
    let mut cs = raw.c.coeffs().to_vec();
    cs.resize(r + 1, C64::new(0.0, 0.0));
    let drift = cs[0].im.abs().max((cs[r] - alpha).norm());
    cs[0].im = 0.0;
    cs[r] = alpha;
    let next = JMatrix::new(ComplexPoly::new(cs), raw.d, r)?;
    let shape = shape.max(drift);
    let residual = (shape / scale).max(transfer_residual(&next.to_matrix(), &prev.to_matrix(), a, b));
    Ok(DirectStep { a, next, residual })
}

fn check_unimodular(b: &SchurSequence, upto: usize, tol: Tolerance) -> Result<()> {
    match b.prefix(upto).first_unimodular(tol) {
        Some(j) => Err(Error::UnitModulus { index: j }),
        None => Ok(()),
    }
}

fn relation_residual(l: &HermitianLaurent, phi: &MopPair, c: &JMatrix, psi: &MopPair) -> f64 {
    let lhs = [l.a() * &phi.psi, l.a() * &phi.psi_star];
    let rhs = c.to_matrix().apply(&psi.as_vector());
    let scale = lhs[0].max_abs().max(lhs[1].max_abs()).max(f64::MIN_POSITIVE);
    lhs[0].max_diff(&rhs[0]).max(lhs[1].max_diff(&rhs[1])) / scale
}

fn det_residual(l: &HermitianLaurent, c: &JMatrix) -> f64 {
    let det = c.det();
    let expect = l.a().scale(c.c.coeff(0));
    det.max_diff(&expect) / det.max_abs().max(expect.max_abs()).max(f64::MIN_POSITIVE)
}

/// Runs the direct recurrence for `j = 1 ..= horizon`; needs
/// `b_1 .. b_{horizon + r}`, none of unit modulus.
pub fn run_direct(
    l: &HermitianLaurent,
    b: &SchurSequence,
    horizon: usize,
    tol: Tolerance,
) -> Result<ConsistencyReport> {
    let r = l.degree();
    if b.len() < horizon + r {
        return Err(Error::TooShort { needed: horizon + r, have: b.len() });
    }
    check_unimodular(b, horizon + r, tol)?;
    let psis = szego_forward(&b.prefix(horizon + r));
    let alpha = l.alpha();
    let c0 = direct_init(l, b)?;
    let mut report = ConsistencyReport {
        schur: SchurSequence::with_eps0(Vec::new(), 0.0),
        stop_index: horizon + 1,
        stopped: false,
        matrices: vec![c0.clone()],
        step_residuals: Vec::new(),
        relation_residuals: vec![relation_residual(l, &MopPair::unit(), &c0, &psis.pairs[r])],
        det_residuals: vec![det_residual(l, &c0)],
    };
    let mut phi = MopPair::unit();
    let mut a_seq = Vec::with_capacity(horizon);
    let mut cur = c0;
    for j in 1..=horizon {
        if !cur.is_regular(tol) {
            report.stop_index = j - 1;
            report.stopped = true;
            break;
        }
        let step = direct_step(&cur, b.get(j + r), alpha)?;
        phi = phi.advance(step.a);
        a_seq.push(step.a);
        report.step_residuals.push(step.residual);
        report.relation_residuals.push(relation_residual(l, &phi, &step.next, &psis.pairs[j + r]));
        report.det_residuals.push(det_residual(l, &step.next));
        report.matrices.push(step.next.clone());
        cur = step.next;
    }
    if !report.stopped && !cur.is_regular(tol) {
        report.stop_index = a_seq.len();
        report.stopped = true;
    }
    // u[1] = C_0(0) eps_r
    let eps_r = psis.eps[r];
    report.schur = SchurSequence::with_eps0(a_seq, report.matrices[0].c.coeff(0).re * eps_r);
    Ok(report)
}

/// Degree one specialisation with scalar state `(c_j, d_j)`, where
/// `C_j = [[alpha z + c_j, d_j], [conj(d_j) z, conj(alpha) + c_j z]]`.
pub fn direct_r1(
    alpha: C64,
    beta: f64,
    b: &SchurSequence,
    horizon: usize,
    tol: Tolerance,
) -> Result<ConsistencyReport> {
    if alpha.norm() == 0.0 {
        return Err(Error::Invalid("alpha must be nonzero".into()));
    }
    if b.len() < horizon + 1 {
        return Err(Error::TooShort { needed: horizon + 1, have: b.len() });
    }
    check_unimodular(b, horizon + 1, tol)?;
    let l = HermitianLaurent::from_alpha_beta(alpha, beta)?;
    // [[1, conj b1], [b1, 1]] (c0, d0) = (2 beta - alpha b1, conj alpha)
    let solve = |bb: C64, r0: C64, r1: C64| -> (C64, C64) {
        let det = 1.0 - bb.norm_sqr();
        ((r0 - bb.conj() * r1) / det, (r1 - bb * r0) / det)
    };
    let b1 = b.get(1);
    let (mut cc, mut dd) = solve(b1, C64::new(2.0 * beta, 0.0) - alpha * b1, alpha.conj());
    let to_j = |cc: C64, dd: C64| {
        JMatrix::new(ComplexPoly::new(vec![cc, alpha]), ComplexPoly::constant(dd), 1).expect("degree one")
    };
    let psis = szego_forward(&b.prefix(horizon + 1));
    let c0 = to_j(cc, dd);
    let mut report = ConsistencyReport {
        schur: SchurSequence::with_eps0(Vec::new(), cc.re * psis.eps[1]),
        stop_index: horizon + 1,
        stopped: false,
        matrices: vec![c0.clone()],
        step_residuals: Vec::new(),
        relation_residuals: vec![relation_residual(&l, &MopPair::unit(), &c0, &psis.pairs[1])],
        det_residuals: vec![det_residual(&l, &c0)],
    };
    let mut phi = MopPair::unit();
    let mut a_seq = Vec::new();
    let regular = |cc: C64, dd: C64| !tol.negligible(cc.norm(), alpha.norm().max(cc.norm()).max(dd.norm()));
    for j in 1..=horizon {
        if !regular(cc, dd) {
            report.stop_index = j - 1;
            report.stopped = true;
            break;
        }
        let bj = b.get(j + 1);
        let a = (alpha * bj - dd) / cc;
        let (nc, nd) = solve(bj, cc + dd.conj() * a, alpha.conj() * a);
        let nc = C64::new(nc.re, 0.0);
        let prev = to_j(cc, dd);
        let next = to_j(nc, nd);
        let res = transfer_residual(&next.to_matrix(), &prev.to_matrix(), a, bj);
        phi = phi.advance(a);
        a_seq.push(a);
        report.step_residuals.push(res);
        report.relation_residuals.push(relation_residual(&l, &phi, &next, &psis.pairs[j + 1]));
        report.det_residuals.push(det_residual(&l, &next));
        report.matrices.push(next);
        cc = nc;
        dd = nd;
    }
    if !report.stopped && !regular(cc, dd) {
        report.stop_index = a_seq.len();
        report.stopped = true;
    }
    report.schur = SchurSequence::with_eps0(a_seq, report.schur.eps0());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use crate::opuc::{apply_laurent, moments_to_schur, schur_to_moments};
    use proptest::prelude::*;

    #[test]
    fn vanishing_mean_stops_immediately() {
        let l = HermitianLaurent::from_p(&ComplexPoly::new(vec![c(0.0, 0.0), c(0.0, 1.0)]), Tolerance::DEFAULT).unwrap();
        let b = SchurSequence::new(vec![c(0.0, 0.0); 4]);
        let rep = run_direct(&l, &b, 3, Tolerance::DEFAULT).unwrap();
        assert!(rep.stopped);
        assert_eq!(rep.stop_index, 0);
        assert!(rep.schur.is_empty());
    }

    #[test]
    fn lebesgue_init_example() {
        // A = z^2 + 2z + 1 and psi_1 = z: C_0 = z + 2, D_0 = 1.
        let l = HermitianLaurent::from_p(&ComplexPoly::from_real(&[1.0, 1.0]), Tolerance::DEFAULT).unwrap();
        let c0 = direct_init(&l, &SchurSequence::new(vec![c(0.0, 0.0)])).unwrap();
        assert!(c0.c.max_diff(&ComplexPoly::from_real(&[2.0, 1.0])) < 1e-15);
        assert!(c0.d.max_diff(&ComplexPoly::from_real(&[1.0])) < 1e-15);
    }

    #[test]
    fn lebesgue_perturbation_matches_oracle() {
        // u = |1 + z|^2 dm has a_n = (-1)^n / (n + 1); frozen from the moment oracle.
        let l = HermitianLaurent::from_p(&ComplexPoly::from_real(&[1.0, 1.0]), Tolerance::DEFAULT).unwrap();
        let b = SchurSequence::new(vec![c(0.0, 0.0); 8]);
        let rep = run_direct(&l, &b, 6, Tolerance::DEFAULT).unwrap();
        assert!(!rep.stopped);
        for (n, a) in rep.schur.params().iter().enumerate() {
            let k = n as f64 + 1.0;
            let expect = (-1.0f64).powi(k as i32) / (k + 1.0);
            assert!((a - c(expect, 0.0)).norm() < 1e-12, "a_{} = {a}", n + 1);
        }
        assert!(rep.max_residual() < 1e-12);
    }

    fn arb_instance() -> impl Strategy<Value = (Vec<C64>, C64, f64)> {
        (
            prop::collection::vec((0.0..0.9f64, 0.0..std::f64::consts::TAU), 10),
            (0.2..2.0f64, 0.0..std::f64::consts::TAU),
            1.1..3.0f64,
            any::<bool>(),
        )
            .prop_map(|(b, (ar, at), k, neg)| {
                // |beta| > |alpha| keeps L of one sign on the circle.
                let beta = if neg { -k * ar } else { k * ar };
                (b.into_iter().map(|(r, t)| C64::from_polar(r, t)).collect(), C64::from_polar(ar, at), beta)
            })
    }

    proptest! {
        #[test]
        fn degree_one_specialisation_agrees((b, alpha, beta) in arb_instance()) {
            let l = HermitianLaurent::from_alpha_beta(alpha, beta).unwrap();
            let b = SchurSequence::new(b);
            let tol = Tolerance::DEFAULT;
            let general = run_direct(&l, &b, 8, tol).unwrap();
            let scalar = direct_r1(alpha, beta, &b, 8, tol).unwrap();
            prop_assume!(!general.stopped);
            prop_assert_eq!(general.stop_index, scalar.stop_index);
            for (x, y) in general.schur.params().iter().zip(scalar.schur.params()) {
                prop_assert!((x - y).norm() <= 1e-8 * (1.0 + x.norm()));
            }
            prop_assert!(scalar.relation_residuals.iter().all(|&r| r < 1e-8));
        }

        #[test]
        fn step_invariants((b, alpha, beta) in arb_instance()) {
            let l = HermitianLaurent::from_alpha_beta(alpha, beta).unwrap();
            let rep = run_direct(&l, &SchurSequence::new(b), 8, Tolerance::DEFAULT).unwrap();
            for m in &rep.matrices {
                // C_j(0) real and C_j^*(0) = A(0).
                let c0 = m.c.coeff(0);
                prop_assert!(c0.im.abs() <= 1e-8 * (1.0 + c0.norm()));
                prop_assert!((m.c.leading() - alpha).norm() <= 1e-8 * (1.0 + alpha.norm()));
            }
            prop_assert!(rep.max_residual() < 1e-8);
        }

        #[test]
        fn agrees_with_moment_oracle((b, alpha, beta) in arb_instance()) {
            let l = HermitianLaurent::from_alpha_beta(alpha, beta).unwrap();
            let b = SchurSequence::new(b);
            let rep = run_direct(&l, &b, 8, Tolerance::DEFAULT).unwrap();
            let mu = apply_laurent(&schur_to_moments(&b.prefix(9)), &l, 8).unwrap();
            prop_assume!(mu.get(0).norm() > 0.1);
            let o = moments_to_schur(&mu, Tolerance::DEFAULT).unwrap();
            prop_assert_eq!(o.mop_count, rep.stop_index);
            for (x, y) in rep.schur.params().iter().zip(o.schur.params()) {
                prop_assert!((x - y).norm() <= 1e-7 * (1.0 + x.norm()));
            }
        }
    }
}
