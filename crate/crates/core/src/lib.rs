//! Orthogonal polynomials on the unit circle under hermitian Laurent polynomial
//! perturbations.
//!
//! A hermitian functional `v` with Schur parameters `b` is multiplied by a
//! hermitian Laurent polynomial `L = P + P_*`, giving `u = vL`. The direct
//! problem computes the Schur parameters of `u` from those of `v`; the inverse
//! problem recovers every `v` compatible with a given `u` and `L`. Both are
//! driven by first-order recurrences on 2x2 polynomial matrices.

pub mod algebra;
pub mod associated;
pub mod classification;
pub mod direct;
mod error;
pub mod inverse;
pub mod lebesgue;
pub mod linalg;
pub mod opuc;
pub mod oracle;
pub mod sweep;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Relative tolerance shared by every consistency test in the crate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance(pub f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-10);

    pub fn value(self) -> f64 {
        self.0
    }

    /// `x` counts as zero relative to `scale`.
    pub fn negligible(self, x: f64, scale: f64) -> bool {
        x.abs() <= self.0 * scale.abs().max(f64::MIN_POSITIVE)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
