//! The command registry.

mod verify;

use std::sync::OnceLock;

use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use hermitian_perturb::algebra::{ComplexPoly, HermitianLaurent};
use hermitian_perturb::associated::{associated_solution, verify_associated};
use hermitian_perturb::classification::{constant_solution, degree_drop_test, verify_constant_relation};
use hermitian_perturb::direct::run_direct;
use hermitian_perturb::inverse::{run_inverse, FromFreeX, FromHead, FromPerturbation, InitialCondition, InverseOptions};
use hermitian_perturb::lebesgue::{
    b1_on_circle, classify, classify_exact, emit_figure_data, fmt_rational, rational_from_f64, s_sequence, sigma_exact,
    solution_trajectory, LebesgueProblem,
};
use hermitian_perturb::opuc::{schur_to_moments, SchurSequence};
use hermitian_perturb::sweep::oracle_schur;
use hermitian_perturb::{Tolerance, C64};

use crate::job::{JobSpec, RealInput};
use crate::output::csv;
use crate::CliError;

pub use verify::Verify;

/// What a command hands back to [`crate::run_job`].
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub result: Value,
    pub stop_index: Option<usize>,
    pub stopped_early: bool,
    pub residual: f64,
    /// `(file name, contents)`, written only when an output directory is set.
    pub side_files: Vec<(String, String)>,
    /// Main table, printed under `--format csv`.
    pub table: String,
    /// Checks that ran and did not pass.
    pub failures: usize,
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn run(&self, spec: &JobSpec) -> Result<Outcome, CliError>;
}

pub fn registry() -> &'static [Box<dyn Command>] {
    static REGISTRY: OnceLock<Vec<Box<dyn Command>>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        vec![
            Box::new(Direct),
            Box::new(Inverse { name: "inverse-i1", summary: "inverse run started from b_1 .. b_2r", build: build_i1 }),
            Box::new(Inverse { name: "inverse-i2", summary: "inverse run started from a free monic X_0", build: build_i2 }),
            Box::new(Inverse { name: "inverse-i3", summary: "inverse run started from P and b_1 .. b_r", build: build_i3 }),
            Box::new(Lebesgue),
            Box::new(ClassifyConstant),
            Box::new(Associated),
            Box::new(Verify),
        ]
    })
}

pub fn find(name: &str) -> Option<&'static dyn Command> {
    registry().iter().find(|c| c.name() == name).map(|c| c.as_ref())
}

type Pair = [f64; 2];

fn complex(p: Pair) -> Result<C64, CliError> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(C64::new(p[0], p[1]))
    } else {
        Err(CliError::Input(format!("non-finite complex number {p:?}")))
    }
}

fn complexes(v: &[Pair]) -> Result<Vec<C64>, CliError> {
    v.iter().map(|&p| complex(p)).collect()
}

fn poly(v: &[Pair]) -> Result<ComplexPoly, CliError> {
    Ok(ComplexPoly::new(complexes(v)?))
}

fn params<T: DeserializeOwned>(spec: &JobSpec) -> Result<T, CliError> {
    serde_json::from_value(spec.parameters.clone())
        .map_err(|e| CliError::Input(format!("parameters of {}: {e}", spec.command)))
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Zeros {
    Zeros,
}

/// A Schur sequence given in full or as `"zeros"` (the Lebesgue functional).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SchurInput {
    Zeros(Zeros),
    List(Vec<Pair>),
}

impl Default for SchurInput {
    fn default() -> Self {
        SchurInput::Zeros(Zeros::Zeros)
    }
}

impl SchurInput {
    fn sequence(&self, needed: usize, field: &str) -> Result<SchurSequence, CliError> {
        match self {
            SchurInput::Zeros(_) => Ok(SchurSequence::new(vec![C64::new(0.0, 0.0); needed])),
            SchurInput::List(v) if v.len() < needed => {
                Err(CliError::Input(format!("{field} has {} entries, the horizon needs {needed}", v.len())))
            }
            SchurInput::List(v) => Ok(SchurSequence::new(complexes(v)?)),
        }
    }
}

fn complex_table(header: &str, columns: &[&[C64]]) -> String {
    let rows = columns.iter().map(|c| c.len()).max().unwrap_or(0);
    csv(
        header,
        (0..rows).map(|j| {
            let mut row = vec![(j + 1).to_string()];
            for col in columns {
                match col.get(j) {
                    Some(z) => row.extend([crate::output::fmt17(z.re), crate::output::fmt17(z.im)]),
                    None => row.extend([String::new(), String::new()]),
                }
            }
            row
        }),
    )
}

/// Largest `|a_j - oracle a_j|` accepted by the direct command's oracle check.
pub const ORACLE_AGREEMENT: f64 = 1e-8;

struct Direct;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectParams {
    /// Ascending coefficients of `P`, with `L = P + P_*`.
    #[serde(alias = "P")]
    p: Vec<Pair>,
    #[serde(default)]
    schur_v: SchurInput,
    #[serde(default = "yes")]
    oracle: bool,
}

fn yes() -> bool {
    true
}

impl Command for Direct {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn summary(&self) -> &'static str {
        "Schur parameters of u = vL from those of v"
    }

    fn run(&self, spec: &JobSpec) -> Result<Outcome, CliError> {
        let prm: DirectParams = params(spec)?;
        let tol = Tolerance(spec.tolerance);
        let l = HermitianLaurent::from_p(&poly(&prm.p)?, tol)?;
        let n = spec.horizon;
        let b = prm.schur_v.sequence(n + l.degree(), "schur_v")?;
        let rep = run_direct(&l, &b, n, tol)?;
        let mut failures = 0;
        let oracle = if prm.oracle {
            let (o, stop) = oracle_schur(&schur_to_moments(&b), &l, n, tol)?;
            let k = rep.schur.len().min(o.len());
            let err = max_of(rep.schur.params()[..k].iter().zip(&o.params()[..k]).map(|(p, q)| (p - q).norm()));
            let pass = err <= ORACLE_AGREEMENT && stop == rep.stop_index;
            failures += !pass as usize;
            json!({"schur_u": o.params(), "stop_index": stop, "max_error": err, "pass": pass})
        } else {
            Value::Null
        };
        let result = json!({
            "degree": l.degree(),
            "laurent": l.a(),
            "schur_u": rep.schur.params(),
            "mean_u": rep.schur.eps0(),
            "stop_index": rep.stop_index,
            "stopped": rep.stopped,
            "residuals": {
                "step": max_of(rep.step_residuals.iter().copied()),
                "relation": max_of(rep.relation_residuals.iter().copied()),
                "determinant": max_of(rep.det_residuals.iter().copied()),
            },
            "oracle": oracle,
        });
        Ok(Outcome {
            result,
            stop_index: Some(rep.stop_index),
            stopped_early: rep.stopped,
            residual: rep.max_residual(),
            table: complex_table("j,a_re,a_im", &[rep.schur.params()]),
            failures,
            ..Default::default()
        })
    }
}

struct Inverse {
    name: &'static str,
    summary: &'static str,
    build: fn(&JobSpec) -> Result<InverseJob, CliError>,
}

struct InverseJob {
    init: Box<dyn InitialCondition>,
    schur_u: SchurInput,
    reduce_degree: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct I1Params {
    #[serde(default)]
    schur_u: SchurInput,
    b_head: Vec<Pair>,
    #[serde(default)]
    reduce_degree: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct I2Params {
    #[serde(default)]
    schur_u: SchurInput,
    b_head: Vec<Pair>,
    /// Ascending coefficients of the monic `X_0`.
    x0: Vec<Pair>,
    #[serde(default)]
    reduce_degree: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct I3Params {
    #[serde(default)]
    schur_u: SchurInput,
    #[serde(alias = "P")]
    p: Vec<Pair>,
    b_head: Vec<Pair>,
    #[serde(default)]
    reduce_degree: bool,
}

fn build_i1(spec: &JobSpec) -> Result<InverseJob, CliError> {
    let prm: I1Params = params(spec)?;
    Ok(InverseJob {
        init: Box::new(FromHead { b_head: complexes(&prm.b_head)? }),
        schur_u: prm.schur_u,
        reduce_degree: prm.reduce_degree,
    })
}

fn build_i2(spec: &JobSpec) -> Result<InverseJob, CliError> {
    let prm: I2Params = params(spec)?;
    Ok(InverseJob {
        init: Box::new(FromFreeX { b_head: complexes(&prm.b_head)?, x0: poly(&prm.x0)? }),
        schur_u: prm.schur_u,
        reduce_degree: prm.reduce_degree,
    })
}

fn build_i3(spec: &JobSpec) -> Result<InverseJob, CliError> {
    let prm: I3Params = params(spec)?;
    let l = HermitianLaurent::from_p(&poly(&prm.p)?, Tolerance(spec.tolerance))?;
    Ok(InverseJob {
        init: Box::new(FromPerturbation { l, b_head: complexes(&prm.b_head)? }),
        schur_u: prm.schur_u,
        reduce_degree: prm.reduce_degree,
    })
}

impl Command for Inverse {
    fn name(&self) -> &'static str {
        self.name
    }

    fn summary(&self) -> &'static str {
        self.summary
    }

    fn run(&self, spec: &JobSpec) -> Result<Outcome, CliError> {
        let job = (self.build)(spec)?;
        let tol = Tolerance(spec.tolerance);
        let a = job.schur_u.sequence(spec.horizon, "schur_u")?;
        let start = job.init.start(&a, tol)?;
        let rep = run_inverse(&start, &a, spec.horizon, InverseOptions { tol, reduce_degree: job.reduce_degree })?;
        let result = json!({
            "initial_condition": job.init.name(),
            "initial_x": start.state.x(),
            "initial_y": start.state.y(),
            "schur_v": rep.b.params(),
            "stop_index": rep.stop_index,
            "stopped": rep.stopped,
            "mop_count": rep.mop_count,
            "perturbation": rep.perturbation,
            "det_factors": rep.det_factors,
            "det_factor_drift": rep.det_factor_drift,
            "reductions": rep.reductions,
            "residuals": {
                "step": max_of(rep.step_residuals.iter().copied()),
                "relation": max_of(rep.relation_residuals.iter().copied()),
                "determinant": max_of(rep.det_residuals.iter().copied()),
            },
        });
        Ok(Outcome {
            result,
            stop_index: Some(rep.stop_index),
            stopped_early: rep.stopped,
            residual: rep.max_residual(),
            table: complex_table("j,b_re,b_im", &[rep.b.params()]),
            ..Default::default()
        })
    }
}

struct Lebesgue;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LebesgueParams {
    omega: RealInput,
    s0: RealInput,
    /// Leading coefficient of `P = alpha z + beta`; `beta = omega |alpha|`.
    #[serde(default = "unit")]
    alpha: Pair,
    /// Angle of `b_1` on the circle of solutions; at 0 the parabolic case
    /// puts `b_1` on the unit circle.
    #[serde(default = "quarter_turn")]
    angle: f64,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_range")]
    newton_range: [f64; 2],
}

fn unit() -> Pair {
    [1.0, 0.0]
}

fn quarter_turn() -> f64 {
    std::f64::consts::FRAC_PI_2
}

fn default_samples() -> usize {
    241
}

fn default_range() -> [f64; 2] {
    [-3.0, 3.0]
}

/// Largest denominator for which a float input is treated as exact.
const EXACT_DENOMINATOR: u32 = 1 << 16;

fn exact_input(x: &RealInput) -> Result<Option<num_rational::BigRational>, CliError> {
    match x {
        RealInput::Ratio(_) => x.exact(),
        RealInput::Float(f) => {
            let q = rational_from_f64(x.value()?).map_err(|_| CliError::Input(format!("{f} is not finite")))?;
            Ok(q.denom().to_u32().filter(|&d| d <= EXACT_DENOMINATOR).map(|_| q))
        }
    }
}

impl Command for Lebesgue {
    fn name(&self) -> &'static str {
        "lebesgue"
    }

    fn summary(&self) -> &'static str {
        "solutions of u = v(alpha z + beta + conj(alpha)/z) with u Lebesgue"
    }

    fn run(&self, spec: &JobSpec) -> Result<Outcome, CliError> {
        let prm: LebesgueParams = params(spec)?;
        let tol = Tolerance(spec.tolerance);
        let n = spec.horizon;
        let (omega, s0) = (prm.omega.value()?, prm.s0.value()?);
        let alpha = complex(prm.alpha)?;
        if !prm.angle.is_finite() || prm.samples == 0 || !(prm.newton_range[0] < prm.newton_range[1]) {
            return Err(CliError::Input("angle, samples or newton_range out of range".into()));
        }
        let problem = LebesgueProblem::new(alpha, omega * alpha.norm())?;
        let cls = classify(omega, s0, n, tol)?;
        let exact = match (exact_input(&prm.omega)?, exact_input(&prm.s0)?) {
            (Some(w), Some(s)) => {
                let first = classify_exact(&w, &s, n);
                let sigma: Vec<String> =
                    sigma_exact(&w, n).iter().map(|q| q.as_ref().map_or("inf".to_string(), fmt_rational)).collect();
                Some((first, json!({
                    "omega": fmt_rational(&w),
                    "s0": fmt_rational(&s),
                    "first_failure": first,
                    "mop_count": first.map(|k| k + 1),
                    "sigma": sigma,
                })))
            }
            _ => None,
        };
        let first_failure = exact.as_ref().map_or(cls.first_failure, |(f, _)| *f);
        let seq = s_sequence(omega, s0, n, tol);
        // the trajectory is optional: b_1 may land on the unit circle
        let tr = b1_on_circle(&problem, s0, prm.angle).and_then(|b1| solution_trajectory(&problem, b1, n + 1, tol));
        let (trajectory, gap) = match &tr {
            Ok(t) => (
                json!({"schur_v": t.b, "schur_v_closed": t.b_closed, "stop": t.stop, "max_gap": t.max_relative_gap()}),
                t.max_relative_gap(),
            ),
            Err(e) => (json!({"error": e.to_string()}), 0.0),
        };
        let fig = emit_figure_data(omega, s0, n, prm.samples, (prm.newton_range[0], prm.newton_range[1]), tol);
        let result = json!({
            "omega": omega,
            "s0": s0,
            "regime": cls.regime.label(),
            "classification": cls,
            "exact": exact.map(|(_, v)| v),
            "mop_count": first_failure.map(|k| k + 1),
            "s_recursive": seq.recursive,
            "s_closed": seq.closed,
            "s_max_deviation": seq.max_deviation,
            "trajectory": trajectory,
        });
        Ok(Outcome {
            result,
            stop_index: first_failure,
            stopped_early: first_failure.is_some(),
            residual: seq.max_deviation.max(gap),
            table: fig.trajectory_csv.clone(),
            side_files: vec![
                ("lebesgue_trajectory.csv".into(), fig.trajectory_csv),
                ("lebesgue_newton.csv".into(), fig.newton_csv),
            ],
            failures: 0,
        })
    }
}

struct ClassifyConstant;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantParams {
    /// The constant parameter of `u`.
    a: Pair,
    b_head: Vec<Pair>,
}

impl Command for ClassifyConstant {
    fn name(&self) -> &'static str {
        "classify-constant"
    }

    fn summary(&self) -> &'static str {
        "constant X, Y relating (a, a, ...) to (b_1, .., b_r, b, b, ...)"
    }

    fn run(&self, spec: &JobSpec) -> Result<Outcome, CliError> {
        let prm: ConstantParams = params(spec)?;
        let tol = Tolerance(spec.tolerance);
        let head = complexes(&prm.b_head)?;
        let sol = constant_solution(complex(prm.a)?, &head, tol)?;
        let relation = verify_constant_relation(&sol, spec.horizon);
        let reciprocity = sol.reciprocity_residual()?;
        let drop = degree_drop_test(&sol, tol);
        let (u, v) = (sol.u_sequence(spec.horizon), sol.v_sequence(spec.horizon));
        let result = json!({
            "degree": sol.r,
            "a": sol.a,
            "b": sol.b,
            "zeta": sol.zeta,
            "x": sol.x,
            "y": sol.y,
            "perturbation": sol.perturbation()?,
            "schur_u": u.params(),
            "schur_v": v.params(),
            "degree_drop": drop,
            "residuals": {
                "relation": relation,
                "reciprocity": reciprocity,
                "division_remainder": sol.division_remainder,
                "reduced": sol.reduced_residual,
            },
        });
        Ok(Outcome {
            result,
            residual: max_of([relation, reciprocity, sol.division_remainder, sol.reduced_residual]),
            table: complex_table("j,a_re,a_im,b_re,b_im", &[u.params(), v.params()]),
            ..Default::default()
        })
    }
}

struct Associated;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssociatedParams {
    a1: Pair,
    b1: Pair,
    /// Real scale of `C_0`; any nonzero value gives the same sequences.
    #[serde(default = "one")]
    c0: f64,
}

fn one() -> f64 {
    1.0
}

impl Command for Associated {
    fn name(&self) -> &'static str {
        "associated"
    }

    fn summary(&self) -> &'static str {
        "degree one perturbation relating rotated constant parameters"
    }

    fn run(&self, spec: &JobSpec) -> Result<Outcome, CliError> {
        let prm: AssociatedParams = params(spec)?;
        let tol = Tolerance(spec.tolerance);
        if !prm.c0.is_finite() || prm.c0 == 0.0 {
            return Err(CliError::Input("c0 must be a nonzero real".into()));
        }
        let sol = associated_solution(complex(prm.a1)?, complex(prm.b1)?, prm.c0, tol)?;
        let check = verify_associated(&sol, spec.horizon, tol)?;
        let (u, v) = (sol.u_sequence(spec.horizon), sol.v_sequence(spec.horizon));
        let result = json!({
            "solution": sol,
            "schur_u": u.params(),
            "schur_v": v.params(),
            "check": check,
        });
        Ok(Outcome {
            result,
            residual: check.max_residual(),
            table: complex_table("j,a_re,a_im,b_re,b_im", &[u.params(), v.params()]),
            ..Default::default()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<_> = registry().iter().map(|c| c.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), registry().len());
        assert!(find("inverse-i3").is_some());
        assert!(find("inverse").is_none());
    }

    #[test]
    fn schur_input_forms() {
        let z: SchurInput = serde_json::from_str("\"zeros\"").unwrap();
        assert_eq!(z.sequence(3, "x").unwrap().len(), 3);
        let l: SchurInput = serde_json::from_str("[[0.5, 0], [0, 0.25]]").unwrap();
        assert_eq!(l.sequence(2, "x").unwrap().get(2), C64::new(0.0, 0.25));
        assert!(l.sequence(3, "x").is_err());
        assert!(serde_json::from_str::<SchurInput>("\"ones\"").is_err());
    }

    #[test]
    fn short_dyadic_floats_are_exact() {
        assert!(exact_input(&RealInput::Float(1.25)).unwrap().is_some());
        assert!(exact_input(&RealInput::Float(std::f64::consts::FRAC_1_SQRT_2)).unwrap().is_none());
    }
}
