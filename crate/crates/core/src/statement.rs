//! Boolean verdicts with the numbers they were decided on.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{is_invertible, min_angle_sine, ComplexMatrix, Subspace, ToleranceConfig};

/// One evaluated statement. `margin` is the quantity the verdict was
/// thresholded on: a reciprocal condition number, a principal-angle sine, a
/// residual, or a dimension count, as described by the producing function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Statement {
    pub label: String,
    pub holds: bool,
    pub margin: f64,
}

impl Statement {
    pub fn new(label: impl Into<String>, holds: bool, margin: f64) -> Self {
        Self { label: label.into(), holds, margin }
    }

    /// Conjunction; the margin is the smaller one.
    pub fn and(self, other: Statement, label: impl Into<String>) -> Statement {
        Statement::new(label, self.holds && other.holds, self.margin.min(other.margin))
    }
}

/// `a` invertible, margin = reciprocal condition number.
pub(crate) fn invertible(label: &str, a: &ComplexMatrix, cfg: &ToleranceConfig) -> Statement {
    let t = is_invertible(a, cfg);
    Statement::new(label, t.invertible, t.rcond)
}

/// `u ∩ v = 0`, margin = smallest principal-angle sine.
pub(crate) fn trivial_intersection(label: &str, u: &Subspace, v: &Subspace, cfg: &ToleranceConfig) -> Statement {
    let s = min_angle_sine(u, v);
    Statement::new(label, s > cfg.angle, s)
}

/// `u = v`, margin = largest principal-angle sine between them.
pub(crate) fn equal_spaces(label: &str, u: &Subspace, v: &Subspace, cfg: &ToleranceConfig) -> Result<Statement> {
    let holds = u.equals(v, cfg)?;
    Ok(Statement::new(label, holds, u.gap_into(v).max(v.gap_into(u))))
}

/// `u ⊆ v`, margin = largest principal-angle sine from `u` into `v`.
pub(crate) fn included(label: &str, u: &Subspace, v: &Subspace, cfg: &ToleranceConfig) -> Result<Statement> {
    let holds = u.is_subspace_of(v, cfg)?;
    Ok(Statement::new(label, holds, u.gap_into(v)))
}

/// `u` is the zero space, margin = its dimension.
pub(crate) fn zero_space(label: &str, u: &Subspace) -> Statement {
    Statement::new(label, u.is_zero(), u.dim() as f64)
}

/// `u` is the whole ambient space, margin = its codimension.
pub(crate) fn full_space(label: &str, u: &Subspace) -> Statement {
    Statement::new(label, u.is_full(), (u.ambient() - u.dim()) as f64)
}

/// `x = y` as matrices, margin = relative max-entry distance.
pub(crate) fn equal_matrices(label: &str, x: &ComplexMatrix, y: &ComplexMatrix, cfg: &ToleranceConfig) -> Statement {
    let scale = x.max_abs().max(y.max_abs()).max(1.0);
    let d = x.max_abs_diff(y) / scale;
    Statement::new(label, d <= cfg.residual, d)
}
