use serde::{Deserialize, Serialize};

use crate::error::{CoepError, Result};

/// Thresholds that turn exact algebraic statements ("= 0", "is invertible")
/// into floating-point decisions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Singular values below `rank * sigma_max` count as zero; a matrix whose
    /// largest singular value is below `rank` counts as the zero matrix.
    pub rank: f64,
    /// Relative residual accepted for matrix identities.
    pub residual: f64,
    /// Reciprocal condition number below which a matrix is singular.
    pub invertibility: f64,
    /// Largest principal-angle sine at which two directions are identified.
    pub angle: f64,
    /// Largest accepted `| ||exp(ita)|| - 1 |` for a hermitian element.
    pub hermitian: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { rank: 1e-10, residual: 1e-8, invertibility: 1e-9, angle: 1e-6, hermitian: 1e-8 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank", self.rank),
            ("residual", self.residual),
            ("invertibility", self.invertibility),
            ("angle", self.angle),
            ("hermitian", self.hermitian),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(CoepError::InvalidInput(format!(
                    "tolerance `{name}` must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// `value / scale`, with a zero scale treated as one.
pub(crate) fn relative(value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        value / scale
    } else {
        value
    }
}
