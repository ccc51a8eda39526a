//! Job files.

use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use hermitian_perturb::lebesgue::{rational, rational_to_f64};

use crate::CliError;

/// A single run, read from a JSON job file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: String,
    /// Command-specific object. Complex numbers are `[re, im]` pairs and
    /// polynomials ascending coefficient lists.
    #[serde(default = "empty_object")]
    pub parameters: serde_json::Value,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

fn default_horizon() -> usize {
    10
}

fn default_tolerance() -> f64 {
    1e-10
}

/// Largest horizon accepted; the recurrences are quadratic in it.
pub const MAX_HORIZON: usize = 10_000;

impl JobSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| CliError::Input(format!("job file: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks everything that does not depend on the command's parameters.
    pub fn validate(&self) -> Result<(), CliError> {
        if crate::commands::find(&self.command).is_none() {
            let names: Vec<_> = crate::commands::registry().iter().map(|c| c.name()).collect();
            return Err(CliError::Input(format!("unknown command {:?}; expected one of {}", self.command, names.join(", "))));
        }
        if !self.parameters.is_object() {
            return Err(CliError::Input("parameters must be an object".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(CliError::Input(format!("tolerance must lie in (0, 1), got {}", self.tolerance)));
        }
        if self.horizon == 0 || self.horizon > MAX_HORIZON {
            return Err(CliError::Input(format!("horizon must lie in 1..={MAX_HORIZON}, got {}", self.horizon)));
        }
        Ok(())
    }
}

/// A real input given either as a float or as an exact `[num, den]` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealInput {
    Ratio([i64; 2]),
    Float(f64),
}

impl RealInput {
    pub fn exact(&self) -> Result<Option<BigRational>, CliError> {
        match self {
            RealInput::Ratio([n, d]) => Ok(Some(rational(*n, *d)?)),
            RealInput::Float(_) => Ok(None),
        }
    }

    pub fn value(&self) -> Result<f64, CliError> {
        match self {
            RealInput::Ratio(_) => Ok(rational_to_f64(&self.exact()?.expect("ratio"))),
            RealInput::Float(x) if x.is_finite() => Ok(*x),
            RealInput::Float(x) => Err(CliError::Input(format!("non-finite number {x}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let spec = JobSpec::from_json(r#"{"command": "direct", "parameters": {"p": [[1, 0], [1, 0]]}}"#).unwrap();
        assert_eq!(spec.horizon, 10);
        assert_eq!(spec.tolerance, 1e-10);
        assert_eq!(spec.seed, 0);
    }

    #[test]
    fn unknown_fields_and_commands_are_rejected() {
        assert!(JobSpec::from_json(r#"{"command": "direct", "horizn": 3}"#).is_err());
        assert!(JobSpec::from_json(r#"{"command": "bogus"}"#).is_err());
        assert!(JobSpec::from_json(r#"{"command": "direct", "tolerance": -1}"#).is_err());
        assert!(JobSpec::from_json(r#"{"command": "direct", "horizon": 0}"#).is_err());
    }

    #[test]
    fn rational_inputs() {
        let r: RealInput = serde_json::from_str("[10, 21]").unwrap();
        assert_eq!(r.exact().unwrap(), Some(rational(10, 21).unwrap()));
        let f: RealInput = serde_json::from_str("1.25").unwrap();
        assert_eq!(f.value().unwrap(), 1.25);
        let bad: RealInput = serde_json::from_str("[1, 0]").unwrap();
        assert!(bad.exact().is_err());
    }
}
