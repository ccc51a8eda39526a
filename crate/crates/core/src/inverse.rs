//! Inverse problem: every `v` with `vL` proportional to a given `u`.
//!
//! The MOP are related by `Psi_{j+r} = X_j Phi_j` with `X_j = [[X, Y], [z Y*, X*]]`,
//! `X` monic of degree `r` and `Y` of degree at most `r - 1`. The recurrence
//! reads `a_j` and emits `b_{j+r}`. The free data is an initial matrix; three
//! ways of fixing it are provided as [`InitialCondition`] strategies.

use serde::Serialize;

use crate::algebra::{decompose_in_mop_basis, proportionality_residual, ComplexPoly, HermitianLaurent, JMatrix, PolyMatrix2};
use crate::direct::direct_init;
use crate::opuc::{mop, MopPair, SchurSequence, TransferMatrix};
use crate::{Error, Result, Tolerance, C64};

/// `X_j` together with its index `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseState {
    pub matrix: JMatrix,
    pub index: usize,
}

impl InverseState {
    /// Checks that `x` is monic of degree `r` and `y` has degree below `r`.
    pub fn new(x: ComplexPoly, y: ComplexPoly, index: usize) -> Result<Self> {
        let r = x.nominal_degree();
        if r < 0 {
            return Err(Error::ZeroPolynomial);
        }
        if (x.leading() - 1.0).norm() > 1e-8 {
            return Err(Error::Invalid(format!("X must be monic, leading coefficient {}", x.leading())));
        }
        let mut xc = x.into_coeffs();
        *xc.last_mut().unwrap() = C64::new(1.0, 0.0);
        Ok(Self { matrix: JMatrix::new(ComplexPoly::new(xc), y, r as usize)?, index })
    }

    pub fn x(&self) -> &ComplexPoly {
        &self.matrix.c
    }

    pub fn y(&self) -> &ComplexPoly {
        &self.matrix.d
    }

    pub fn degree(&self) -> usize {
        self.matrix.r
    }

    pub fn is_regular(&self, tol: Tolerance) -> bool {
        self.matrix.is_regular(tol)
    }

    /// `X X* - z Y Y*`, proportional to `A`.
    pub fn det(&self) -> ComplexPoly {
        self.matrix.det()
    }
}

/// Initial state plus the parameters of `v` it fixes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseStart {
    pub state: InverseState,
    /// `b_1 .. b_r`, or `b_1 .. b_{2r}` when starting from `X_r`.
    pub b_head: Vec<C64>,
}

/// A way of choosing the free initial data of the inverse recurrence.
pub trait InitialCondition: Send + Sync {
    fn name(&self) -> &'static str;
    fn start(&self, a: &SchurSequence, tol: Tolerance) -> Result<InverseStart>;
}

/// Starts from `psi_{2r} = X_r phi_r + Y_r phi_r*` given `b_1 .. b_{2r}`.
#[derive(Debug, Clone)]
pub struct FromHead {
    pub b_head: Vec<C64>,
}

/// Starts from a free monic `X_0` and `b_1 .. b_r`; `Y_0 = psi_r - X_0`.
#[derive(Debug, Clone)]
pub struct FromFreeX {
    pub b_head: Vec<C64>,
    pub x0: ComplexPoly,
}

/// Starts from `A` and `b_1 .. b_r` through `X_0 = Adj(C_0) / C_0(0)`.
#[derive(Debug, Clone)]
pub struct FromPerturbation {
    pub l: HermitianLaurent,
    pub b_head: Vec<C64>,
}

impl InitialCondition for FromHead {
    fn name(&self) -> &'static str {
        "i1"
    }
    fn start(&self, a: &SchurSequence, _tol: Tolerance) -> Result<InverseStart> {
        inverse_init_i1(&self.b_head, a)
    }
}

impl InitialCondition for FromFreeX {
    fn name(&self) -> &'static str {
        "i2"
    }
    fn start(&self, _a: &SchurSequence, tol: Tolerance) -> Result<InverseStart> {
        inverse_init_i2(&self.b_head, &self.x0, tol)
    }
}

impl InitialCondition for FromPerturbation {
    fn name(&self) -> &'static str {
        "i3"
    }
    fn start(&self, _a: &SchurSequence, tol: Tolerance) -> Result<InverseStart> {
        inverse_init_i3(&self.l, &self.b_head, tol)
    }
}

fn check_head(b_head: &[C64]) -> Result<()> {
    match b_head.iter().position(|b| b.norm_sqr() == 1.0) {
        Some(i) => Err(Error::UnitModulus { index: i + 1 }),
        None => Ok(()),
    }
}

/// `X_r` from `b_1 .. b_{2r}` and `a_1 .. a_r`.
pub fn inverse_init_i1(b_head: &[C64], a: &SchurSequence) -> Result<InverseStart> {
    if b_head.is_empty() || b_head.len() % 2 != 0 {
        return Err(Error::Invalid("I1 needs an even, nonzero number of parameters".into()));
    }
    check_head(b_head)?;
    let r = b_head.len() / 2;
    if a.len() < r {
        return Err(Error::TooShort { needed: r, have: a.len() });
    }
    let phi = mop(&a.params()[..r]).psi;
    let psi = mop(b_head).psi;
    let dec = decompose_in_mop_basis(&psi, &phi, r)?;
    Ok(InverseStart {
        state: InverseState::new(dec.c.truncated(r + 1), dec.d.truncated(r), r)?,
        b_head: b_head.to_vec(),
    })
}

/// `X_0` given freely; must be monic of degree `r` with `X_0(0) != 0`.
pub fn inverse_init_i2(b_head: &[C64], x0: &ComplexPoly, tol: Tolerance) -> Result<InverseStart> {
    let r = b_head.len();
    if r == 0 {
        return Err(Error::Invalid("need at least one parameter of v".into()));
    }
    check_head(b_head)?;
    if x0.nominal_degree() != r as isize {
        return Err(Error::Invalid(format!("X_0 must have degree {r}")));
    }
    let psi = mop(b_head).psi;
    let y0 = (&psi - x0).truncated(r);
    let state = InverseState::new(x0.clone(), y0, 0)?;
    if !state.is_regular(tol) {
        return Err(Error::Invalid("X_0(0) vanishes".into()));
    }
    Ok(InverseStart { state, b_head: b_head.to_vec() })
}

/// `X_0 = Adj(C_0) / C_0(0)` from the direct initial condition.
pub fn inverse_init_i3(l: &HermitianLaurent, b_head: &[C64], tol: Tolerance) -> Result<InverseStart> {
    let r = l.degree();
    if b_head.len() != r {
        return Err(Error::Invalid(format!("need exactly {r} parameters of v")));
    }
    check_head(b_head)?;
    let c0 = direct_init(l, &SchurSequence::new(b_head.to_vec()))?;
    if !c0.is_regular(tol) {
        return Err(Error::Invalid("v[L] vanishes".into()));
    }
    let k = C64::new(1.0 / c0.c.coeff(0).re, 0.0);
    let x = c0.c_star().scale(k);
    let y = c0.d.scale(-k);
    Ok(InverseStart { state: InverseState::new(x, y, 0)?, b_head: b_head.to_vec() })
}

/// `X_0` fixed by `det X_0 = lambda A`, with `lambda = X_0(0) / A(0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeInitial {
    pub start: InverseStart,
    pub lambda: f64,
}

/// Solves `det X_0 = lambda A` for monic `X_0` with `X_0 (1, 1)^T = Psi_r`:
/// writes `lambda A + psi_r psi_r* = C psi_r + D psi_r*` and takes
/// `X_0 = (C* + D) / 2`.
pub fn rel_ic_solve(b_head: &[C64], l: &HermitianLaurent, tol: Tolerance) -> Result<RelativeInitial> {
    let r = l.degree();
    if b_head.len() != r {
        return Err(Error::Invalid(format!("need exactly {r} parameters of v")));
    }
    check_head(b_head)?;
    let pair = mop(b_head);
    let da = decompose_in_mop_basis(l.a(), &pair.psi, r)?;
    let db = decompose_in_mop_basis(&(&pair.psi * &pair.psi_star), &pair.psi, r)?;
    let ca0 = da.c.coeff(0);
    if tol.negligible(ca0.norm(), da.c.max_abs()) {
        return Err(Error::Invalid("v[L] vanishes".into()));
    }
    // monic X_0 means conj(C(0)) = 2
    let lambda = ((C64::new(2.0, 0.0) - db.c.coeff(0)) / ca0).re;
    let lam = C64::new(lambda, 0.0);
    let c = &da.c.scale(lam) + &db.c;
    let d = &da.d.scale(lam) + &db.d;
    let cstar = c.truncated(r + 1).reverse(r)?;
    let x = (&cstar + &d).scale(C64::new(0.5, 0.0));
    let y = (&pair.psi - &x).truncated(r);
    Ok(RelativeInitial {
        start: InverseStart { state: InverseState::new(x, y, 0)?, b_head: b_head.to_vec() },
        lambda,
    })
}

/// One step of the inverse recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseStep {
    pub b: C64,
    pub next: InverseState,
    pub residual: f64,
}

/// Computes `b_{j+r}` from `X_{j-1}` and `a_j`, then `X_j`.
pub fn inverse_step(state: &InverseState, a: C64) -> Result<InverseStep> {
    let r = state.degree();
    let x0 = state.x().coeff(0);
    if x0.norm() == 0.0 {
        return Err(Error::Pole("X(0) = 0".into()));
    }
    let s = 1.0 - a.norm_sqr();
    if s == 0.0 {
        return Err(Error::UnitModulus { index: state.index + 1 });
    }
    let y_top = if r == 0 { C64::new(0.0, 0.0) } else { state.y().coeff(r - 1) };
    let b = (a - y_top) / x0.conj();
    let m = PolyMatrix2::hermitian_unit(b)
        .mul(&state.matrix.tilde())
        .mul(&PolyMatrix2::hermitian_unit(-a))
        .scale(C64::new(1.0 / s, 0.0));
    let x = m.m[0][0].truncated(r + 1);
    let y = m.m[0][1].truncated(r);
    let next = InverseState::new(x, y, state.index + 1)?;
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let shape = m.max_diff(&next.matrix.to_matrix()) / scale;
    let lhs = TransferMatrix { b }.to_matrix().mul(&state.matrix.to_matrix());
    let rhs = next.matrix.to_matrix().mul(&TransferMatrix { b: a }.to_matrix());
    let tr = lhs.max_diff(&rhs) / lhs.max_abs().max(rhs.max_abs()).max(f64::MIN_POSITIVE);
    Ok(InverseStep { b, next, residual: shape.max(tr) })
}

/// Lowers the order of a non-regular state: with `X = z X'` and `b = Y(0)`,
/// returns the order `r - 1` state relating `Psi_{j+r-1}` to `Phi_j`, and `b`.
pub fn reduce_degree(state: &InverseState) -> Result<(InverseState, C64)> {
    let r = state.degree();
    if r == 0 {
        return Err(Error::Invalid("order zero state cannot be reduced".into()));
    }
    let b = state.y().coeff(0);
    let s = 1.0 - b.norm_sqr();
    if s == 0.0 {
        return Err(Error::UnitModulus { index: state.index + r });
    }
    let xh = ComplexPoly::new(state.x().coeffs()[1..].to_vec());
    let ys = state.y().reverse(r - 1)?;
    let xhs = xh.reverse(r - 1)?;
    let k = C64::new(1.0 / s, 0.0);
    let x = (&xh - &ys.scale(b)).scale(k);
    let num = (state.y() - &xhs.scale(b)).scale(k);
    let y = ComplexPoly::new(num.coeffs().iter().skip(1).take(r - 1).copied().collect());
    Ok((InverseState::new(x, y, state.index)?, b))
}

/// Options of an inverse run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseOptions {
    pub tol: Tolerance,
    /// Continue past a non-regular `X_j` by lowering the order.
    pub reduce_degree: bool,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self { tol: Tolerance::DEFAULT, reduce_degree: false }
    }
}

/// Output of an inverse run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseReport {
    /// Schur parameters of `v`: the head followed by the generated ones.
    pub b: SchurSequence,
    pub states: Vec<InverseState>,
    /// First `j` with `X_j(0) = 0` if `stopped`, else `horizon + 1`.
    pub stop_index: usize,
    pub stopped: bool,
    /// Length of the MOP segment of `v` certified by the run.
    pub mop_count: usize,
    /// `det X` of the initial state; proportional to `A`.
    pub perturbation: ComplexPoly,
    /// `det X_j = det_factors[j] * perturbation` while the order is unchanged.
    pub det_factors: Vec<f64>,
    /// Relative residual of the proportionality `det X_j ~ perturbation`.
    pub det_residuals: Vec<f64>,
    /// Largest deviation from 1 of the factor divided by its predicted
    /// step law `prod (1 - |b_{k+r}|^2) / (1 - |a_k|^2)`.
    pub det_factor_drift: f64,
    pub step_residuals: Vec<f64>,
    /// Relative residual of `Psi_{j+r} = X_j Phi_j`.
    pub relation_residuals: Vec<f64>,
    /// Indices at which the order was lowered.
    pub reductions: Vec<usize>,
}

impl InverseReport {
    pub fn max_residual(&self) -> f64 {
        self.step_residuals
            .iter()
            .chain(&self.relation_residuals)
            .chain(&self.det_residuals)
            .fold(self.det_factor_drift, |a, &b| a.max(b))
    }
}

fn relation_residual(psi: &MopPair, state: &InverseState, phi: &MopPair) -> f64 {
    let rhs = state.matrix.to_matrix().apply(&phi.as_vector());
    let scale = psi.psi.max_abs().max(psi.psi_star.max_abs());
    psi.psi.max_diff(&rhs[0]).max(psi.psi_star.max_diff(&rhs[1])) / scale
}

/// Runs the inverse recurrence through `a_horizon`.
pub fn run_inverse(start: &InverseStart, a: &SchurSequence, horizon: usize, opts: InverseOptions) -> Result<InverseReport> {
    let tol = opts.tol;
    if a.len() < horizon {
        return Err(Error::TooShort { needed: horizon, have: a.len() });
    }
    if let Some(j) = a.prefix(horizon).first_unimodular(tol) {
        return Err(Error::UnitModulus { index: j });
    }
    let j0 = start.state.index;
    let perturbation = start.state.det();
    let mut b: Vec<C64> = start.b_head.clone();
    let mut phi = mop(&a.params()[..j0]);
    let mut psi = mop(&b);
    let mut state = start.state.clone();
    let mut report = InverseReport {
        b: SchurSequence::new(Vec::new()),
        states: vec![state.clone()],
        stop_index: horizon + 1,
        stopped: false,
        mop_count: 0,
        perturbation: perturbation.clone(),
        det_factors: vec![1.0],
        det_residuals: vec![0.0],
        det_factor_drift: 0.0,
        step_residuals: Vec::new(),
        relation_residuals: vec![relation_residual(&psi, &state, &phi)],
        reductions: Vec::new(),
    };
    let mut law = 1.0;
    for j in j0 + 1..=horizon {
        while !state.is_regular(tol) {
            if !opts.reduce_degree || state.degree() == 0 {
                report.stop_index = j - 1;
                report.stopped = true;
                break;
            }
            let (reduced, _) = reduce_degree(&state)?;
            report.reductions.push(j - 1);
            state = reduced;
        }
        if report.stopped {
            break;
        }
        let aj = a.get(j);
        let step = inverse_step(&state, aj)?;
        phi = phi.advance(aj);
        report.step_residuals.push(step.residual);
        // After a reduction the emitted index may already be known.
        let idx = j + state.degree();
        if idx <= b.len() {
            let known = b[idx - 1];
            let dev = (step.b - known).norm() / (1.0 + known.norm());
            if dev > tol.value().sqrt() {
                // the data admit no continuation of lower order
                report.stop_index = j - 1;
                report.stopped = true;
                break;
            }
            report.step_residuals.push(dev);
        } else {
            b.push(step.b);
            psi = psi.advance(step.b);
        }
        state = step.next;
        report.relation_residuals.push(relation_residual(&psi, &state, &phi));
        if report.reductions.is_empty() {
            law *= (1.0 - step.b.norm_sqr()) / (1.0 - aj.norm_sqr());
            let (t, res) = proportionality_residual(&state.det(), &perturbation);
            report.det_factors.push(t);
            report.det_residuals.push(res);
            report.det_factor_drift = report.det_factor_drift.max((t / law - 1.0).abs());
        }
        report.states.push(state.clone());
    }
    if !report.stopped && !state.is_regular(tol) && !opts.reduce_degree {
        report.stop_index = horizon;
        report.stopped = true;
    }
    report.mop_count = if report.stopped { b.len() } else { b.len() + 1 };
    report.b = SchurSequence::new(b);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use crate::direct::run_direct;
    use crate::opuc::{apply_laurent, moments_to_schur, schur_from_mop, schur_to_moments};
    use proptest::prelude::*;

    fn polar(v: Vec<(f64, f64)>) -> Vec<C64> {
        v.into_iter().map(|(r, t)| C64::from_polar(r, t)).collect()
    }

    fn arb_seq(n: usize, max: f64) -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((0.0..max, 0.0..std::f64::consts::TAU), n).prop_map(polar)
    }

    #[test]
    fn lebesgue_i1_is_not_regular() {
        let a = SchurSequence::new(vec![c(0.0, 0.0); 4]);
        let st = inverse_init_i1(&[c(0.0, 0.0); 4], &a).unwrap();
        assert_eq!(st.state.x(), &ComplexPoly::monomial(2));
        assert!(st.state.y().is_zero());
        assert!(!st.state.is_regular(Tolerance::DEFAULT));
    }

    #[test]
    fn i2_lebesgue_example() {
        // b_1 = 0, X_0 = z + 1/2: Y_0 = -1/2, b_2 = (a_1 - y_0)/conj(x_0) = 1 for a_1 = 0.
        let st = inverse_init_i2(&[c(0.0, 0.0)], &ComplexPoly::from_real(&[0.5, 1.0]), Tolerance::DEFAULT).unwrap();
        assert_eq!(st.state.y(), &ComplexPoly::from_real(&[-0.5]));
        let step = inverse_step(&st.state, c(0.0, 0.0)).unwrap();
        assert_eq!(step.b, c(1.0, 0.0));
    }

    #[test]
    fn i3_gives_monic_state() {
        // P = z + beta on Lebesgue: X_0 = z + 1/(2 beta).
        let l = HermitianLaurent::from_alpha_beta(c(1.0, 0.0), 2.0).unwrap();
        let st = inverse_init_i3(&l, &[c(0.0, 0.0)], Tolerance::DEFAULT).unwrap();
        assert!(st.state.x().max_diff(&ComplexPoly::from_real(&[0.25, 1.0])) < 1e-15);
        let rel = rel_ic_solve(&[c(0.0, 0.0)], &l, Tolerance::DEFAULT).unwrap();
        assert!(rel.start.state.x().max_diff(st.state.x()) < 1e-14);
        assert!((rel.lambda - 0.25).abs() < 1e-14);
    }

    fn direct_roundtrip(r: usize, head: Vec<C64>, x0tail: Vec<C64>, a: Vec<C64>) -> std::result::Result<(), TestCaseError> {
        let mut xc = x0tail[..r].to_vec();
        xc[0] += c(0.5, 0.0);
        xc.push(c(1.0, 0.0));
        let start = inverse_init_i2(&head[..r], &ComplexPoly::new(xc), Tolerance::DEFAULT).unwrap();
        let a = SchurSequence::new(a);
        let h = a.len();
        let rep = run_inverse(&start, &a, h, InverseOptions::default()).unwrap();
        prop_assume!(!rep.stopped);
        prop_assert!(rep.max_residual() < 1e-8, "residual {}", rep.max_residual());
        let l = HermitianLaurent::from_a(&rep.perturbation, Tolerance(1e-9)).unwrap();
        let back = run_direct(&l, &rep.b, h, Tolerance::DEFAULT).unwrap();
        for (x, y) in back.schur.params().iter().zip(a.params()) {
            prop_assert!((x - y).norm() < 1e-8);
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn inverse_then_direct(head in arb_seq(2, 0.8), x0 in arb_seq(2, 0.3), a in arb_seq(8, 0.8), r in 1usize..=2) {
            direct_roundtrip(r, head, x0, a)?;
        }

        #[test]
        fn i3_matches_relative_solve(head in arb_seq(2, 0.8), p in arb_seq(2, 1.0), beta in 2.5..4.0f64) {
            let pp = ComplexPoly::new(vec![c(beta, 0.0), p[0], p[1] + c(0.5, 0.0)]);
            let l = HermitianLaurent::from_p(&pp, Tolerance::DEFAULT).unwrap();
            let i3 = inverse_init_i3(&l, &head, Tolerance::DEFAULT).unwrap();
            let rel = rel_ic_solve(&head, &l, Tolerance::DEFAULT).unwrap();
            prop_assert!(i3.state.x().max_diff(rel.start.state.x()) < 1e-9);
            prop_assert!(i3.state.y().max_diff(rel.start.state.y()) < 1e-9);
            let (t, res) = proportionality_residual(&i3.state.det(), l.a());
            prop_assert!(res < 1e-9);
            prop_assert!((t - rel.lambda).abs() < 1e-9 * (1.0 + t.abs()));
        }

        #[test]
        fn i1_continues_an_i2_run(head in arb_seq(2, 0.8), x0 in arb_seq(2, 0.3), a in arb_seq(8, 0.8)) {
            let mut xc = x0.clone();
            xc[0] += c(0.5, 0.0);
            xc.push(c(1.0, 0.0));
            let start = inverse_init_i2(&head, &ComplexPoly::new(xc), Tolerance::DEFAULT).unwrap();
            let a = SchurSequence::new(a);
            let rep = run_inverse(&start, &a, 8, InverseOptions::default()).unwrap();
            prop_assume!(!rep.stopped);
            let s1 = inverse_init_i1(&rep.b.params()[..4], &a).unwrap();
            prop_assert!(s1.state.x().max_diff(rep.states[2].x()) < 1e-8);
            let rep1 = run_inverse(&s1, &a, 8, InverseOptions::default()).unwrap();
            for (x, y) in rep1.b.params().iter().zip(rep.b.params()) {
                prop_assert!((x - y).norm() < 1e-8 * (1.0 + y.norm()));
            }
        }

        #[test]
        fn moments_of_recovered_v(head in arb_seq(1, 0.8), x0 in arb_seq(1, 0.3), a in arb_seq(8, 0.8)) {
            let start = inverse_init_i2(&head, &ComplexPoly::new(vec![x0[0] + c(0.6, 0.0), c(1.0, 0.0)]), Tolerance::DEFAULT).unwrap();
            let a = SchurSequence::new(a);
            let rep = run_inverse(&start, &a, 8, InverseOptions::default()).unwrap();
            prop_assume!(!rep.stopped);
            let l = HermitianLaurent::from_a(&rep.perturbation, Tolerance(1e-9)).unwrap();
            let mu = apply_laurent(&schur_to_moments(&rep.b), &l, 8).unwrap();
            let o = moments_to_schur(&mu, Tolerance::DEFAULT).unwrap();
            for (x, y) in o.schur.params().iter().zip(a.params()) {
                prop_assert!((x - y).norm() < 1e-7);
            }
        }

        #[test]
        fn reduced_state_relates_lower_mop(a in arb_seq(4, 0.7), xh in arb_seq(1, 0.5), y in arb_seq(2, 0.4)) {
            // psi_{j+2} = z (z + x') phi_j + Y phi_j*, j = 4.
            let phi = mop(&a);
            let x = ComplexPoly::new(vec![c(0.0, 0.0), xh[0], c(1.0, 0.0)]);
            let yy = ComplexPoly::new(y.clone());
            let psi = &(&x * &phi.psi) + &(&yy * &phi.psi_star);
            let b = schur_from_mop(&psi).unwrap();
            prop_assume!(b.params().iter().all(|z| z.norm() < 0.98));
            let st = InverseState::new(x, yy, 4).unwrap();
            let (red, bb) = reduce_degree(&st).unwrap();
            prop_assert!((bb - b.get(6)).norm() < 1e-10);
            let lower = mop(&b.params()[..5]);
            prop_assert!(relation_residual(&lower, &red, &phi) < 1e-9);
        }

        #[test]
        fn run_continues_through_reduction(b in arb_seq(12, 0.5), alpha in (0.3..1.5f64, 0.0..6.2f64), k in 1.2..3.0f64) {
            // u = v L with L of degree 1, seen through an order 2 start.
            let alpha = C64::from_polar(alpha.0, alpha.1);
            let l = HermitianLaurent::from_alpha_beta(alpha, k * alpha.norm()).unwrap();
            let v = SchurSequence::new(b);
            let u = run_direct(&l, &v, 10, Tolerance::DEFAULT).unwrap().schur;
            let start = inverse_init_i1(&v.params()[..4], &u).unwrap();
            prop_assert!(start.state.x().coeff(0).norm() < 1e-12);
            let plain = run_inverse(&start, &u, 10, InverseOptions::default()).unwrap();
            prop_assert!(plain.stopped);
            prop_assert_eq!(plain.stop_index, 2);
            let opts = InverseOptions { reduce_degree: true, ..Default::default() };
            let rep = run_inverse(&start, &u, 10, opts).unwrap();
            prop_assert!(!rep.stopped);
            prop_assert_eq!(rep.reductions.clone(), vec![2]);
            prop_assert_eq!(rep.b.len(), 11);
            for (p, q) in rep.b.params().iter().zip(v.params()) {
                prop_assert!((p - q).norm() < 1e-8, "{:?} vs {:?}", rep.b.params(), v.params());
            }
            prop_assert!(rep.step_residuals.iter().all(|&r| r < 1e-8));
        }
    }
}
