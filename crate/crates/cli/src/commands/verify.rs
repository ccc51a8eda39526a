//! Randomized differential checks, run in parallel and reported in trial order.

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use hermitian_perturb::sweep::{
    associated_trial, constant_check, criteria_trial, direct_trial, inverse_round_trip, lebesgue_agreement,
    szego_check, DirectTrialConfig,
};

use super::{params, Command, Outcome};
use crate::job::JobSpec;
use crate::output::{csv, fmt17};
use crate::CliError;

pub struct Verify;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyParams {
    #[serde(default = "default_trials")]
    trials: u64,
}

fn default_trials() -> u64 {
    100
}

const MAX_TRIALS: u64 = 100_000;

/// A measured quantity and the bound it must stay under.
struct Metric {
    name: &'static str,
    value: f64,
    bound: f64,
}

struct TrialResult {
    metrics: Vec<Metric>,
    /// Failed discrete checks, such as disagreeing stop indices.
    mismatch: Option<String>,
}

impl TrialResult {
    fn of(metrics: Vec<Metric>) -> Self {
        Self { metrics, mismatch: None }
    }

    /// `None` when every bound holds and nothing mismatched.
    fn failure(&self) -> Option<String> {
        if let Some(m) = &self.mismatch {
            return Some(m.clone());
        }
        self.metrics
            .iter()
            .find(|m| !(m.value < m.bound))
            .map(|m| format!("{} = {} exceeds {}", m.name, fmt17(m.value), fmt17(m.bound)))
    }

    fn worst_ratio(&self) -> f64 {
        self.metrics.iter().map(|m| m.value / m.bound).fold(0.0, f64::max)
    }
}

fn metric(name: &'static str, value: f64, bound: f64) -> Metric {
    Metric { name, value, bound }
}

type Trial = fn(u64, u64) -> hermitian_perturb::Result<TrialResult>;

fn direct(seed: u64, i: u64) -> hermitian_perturb::Result<TrialResult> {
    let cfg = DirectTrialConfig { max_r: 3, horizon: 10, max_b: 0.9, min_mean: 0.1, ..Default::default() };
    let c = direct_trial(seed, i, cfg)?;
    let mut t = TrialResult::of(vec![metric("schur_error", c.schur_error, 1e-8)]);
    if c.stop_direct != c.stop_oracle {
        t.mismatch = Some(format!("stop {} against oracle {}", c.stop_direct, c.stop_oracle));
    }
    Ok(t)
}

fn criteria(seed: u64, i: u64) -> hermitian_perturb::Result<TrialResult> {
    let cfg = DirectTrialConfig { max_r: 2, horizon: 8, max_b: 0.9, min_mean: 0.1, planted_fraction: 0.5, ..Default::default() };
    let r = 1 + (i % 2) as usize;
    let c = criteria_trial(seed, i, r, &cfg)?;
    let mut t = TrialResult::of(Vec::new());
    let kernel_ok = if r == 1 { c.stop_kernel == Some(c.stop_direct) } else { true };
    if c.stop_direct != c.stop_determinant || !kernel_ok {
        t.mismatch = Some(format!(
            "stops: direct {}, determinant {}, kernel {:?}",
            c.stop_direct, c.stop_determinant, c.stop_kernel
        ));
    }
    Ok(t)
}

fn round_trip(seed: u64, i: u64) -> hermitian_perturb::Result<TrialResult> {
    let t = inverse_round_trip(seed, i, 10)?;
    let mut out = TrialResult::of(vec![
        metric("schur_error", t.schur_error, 1e-9),
        metric("det_factor_drift", t.det_factor_drift, 1e-9),
        metric("det_residual", t.det_residual, 1e-9),
    ]);
    if t.stopped {
        out.mismatch = Some("inverse run stopped".into());
    }
    Ok(out)
}

fn lebesgue(seed: u64, i: u64) -> hermitian_perturb::Result<TrialResult> {
    let t = lebesgue_agreement(seed, i, 20)?;
    Ok(TrialResult::of(vec![metric("max_gap", t.max_gap, 1e-9)]))
}

fn constant(seed: u64, i: u64) -> hermitian_perturb::Result<TrialResult> {
    let t = constant_check(seed, i)?;
    Ok(TrialResult::of(vec![
        metric("relation_residual", t.relation_residual, 1e-10),
        metric("reciprocity_residual", t.reciprocity_residual, 1e-12),
        metric("bisector_residual", t.bisector_residual, 1e-10),
    ]))
}

fn associated(seed: u64, i: u64) -> hermitian_perturb::Result<TrialResult> {
    let t = associated_trial(seed, i)?;
    Ok(TrialResult::of(vec![
        metric("lambda_modulus_error", t.lambda_modulus_error, 1e-12),
        metric("moment_residual", t.moment_residual, 1e-9),
        metric("rotation_residual", t.rotation_residual, 1e-10),
    ]))
}

fn szego(seed: u64, i: u64) -> hermitian_perturb::Result<TrialResult> {
    let t = szego_check(seed, i, 12)?;
    Ok(TrialResult::of(vec![
        metric("round_trip", t.round_trip, 1e-9),
        metric("transfer_residual", t.transfer_residual, 1e-12),
        metric("epsilon_residual", t.epsilon_residual, 1e-9),
    ]))
}

const SUITE: [(&str, Trial); 7] = [
    ("direct-oracle", direct),
    ("stop-criteria", criteria),
    ("inverse-round-trip", round_trip),
    ("lebesgue-closed-form", lebesgue),
    ("constant-coefficients", constant),
    ("associated", associated),
    ("szego", szego),
];

impl Command for Verify {
    fn name(&self) -> &'static str {
        "verify"
    }

    fn summary(&self) -> &'static str {
        "randomized differential checks of every algorithm"
    }

    fn run(&self, spec: &JobSpec) -> Result<Outcome, CliError> {
        let prm: VerifyParams = params(spec)?;
        if prm.trials == 0 || prm.trials > MAX_TRIALS {
            return Err(CliError::Input(format!("trials must lie in 1..={MAX_TRIALS}")));
        }
        let mut kinds = Vec::new();
        let mut rows = Vec::new();
        let mut failures = 0;
        let mut residual: f64 = 0.0;
        for (kind, trial) in SUITE {
            // collect keeps trial order regardless of scheduling
            let results: Vec<_> = (0..prm.trials).into_par_iter().map(|i| trial(spec.seed, i)).collect();
            let mut failed = Vec::new();
            let mut worst = std::collections::BTreeMap::new();
            for (i, res) in results.iter().enumerate() {
                let (reason, ratio) = match res {
                    Ok(t) => {
                        for m in &t.metrics {
                            let w = worst.entry(m.name).or_insert(0.0);
                            if m.value.is_nan() || m.value > *w {
                                *w = m.value;
                            }
                        }
                        residual = residual.max(t.metrics.iter().map(|m| m.value).fold(0.0, f64::max));
                        (t.failure(), t.worst_ratio())
                    }
                    Err(e) => (Some(e.to_string()), f64::NAN),
                };
                rows.push(vec![kind.to_string(), i.to_string(), reason.is_none().to_string(), fmt17(ratio)]);
                if let Some(reason) = reason {
                    failed.push(json!({"trial": i, "reason": reason}));
                }
            }
            failures += failed.len();
            kinds.push(json!({
                "kind": kind,
                "trials": prm.trials,
                "passed": prm.trials as usize - failed.len(),
                "worst": worst,
                "failed": failed,
            }));
        }
        Ok(Outcome {
            result: json!({"seed": spec.seed, "trials": prm.trials, "failures": failures, "kinds": kinds}),
            residual,
            table: csv("kind,trial,pass,worst_ratio", rows),
            failures,
            ..Default::default()
        })
    }
}
