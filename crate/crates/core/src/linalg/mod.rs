//! Dense complex linear algebra shared by every other module.

mod matrix;
mod norm;
mod subspace;
mod tolerance;

pub use matrix::ComplexMatrix;
pub use norm::{operator_norm, NormKind, NormMode, NormSpec};
pub use subspace::{min_angle_sine, null_basis, range_basis, rank, subspace_intersect, subspace_sum, Subspace};
pub use tolerance::ToleranceConfig;

pub(crate) use norm::operator_norm_unchecked;
pub(crate) use subspace::{numerical_rank, sorted_svd};
pub(crate) use tolerance::relative;

use serde::Serialize;

use crate::error::{CoepError, Result};

/// `exp(a)` by scaling and squaring with a diagonal Padé approximant.
pub fn matrix_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.require_square("matrix_exp argument")?;
    Ok(ComplexMatrix::wrap(a.as_dmatrix().exp()))
}

/// Outcome of an invertibility test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Invertibility {
    pub invertible: bool,
    /// Smallest singular value.
    pub margin: f64,
    /// Reciprocal condition number `sigma_min / sigma_max`.
    pub rcond: f64,
}

/// Invertible iff the reciprocal condition number exceeds `cfg.invertibility`.
/// A matrix with `sigma_max <= cfg.rank` counts as zero, hence singular.
pub fn is_invertible(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Invertibility {
    if !a.is_square() {
        return Invertibility { invertible: false, margin: 0.0, rcond: 0.0 };
    }
    let s = a.singular_values();
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    let rcond = if smax > cfg.rank { smin / smax } else { 0.0 };
    Invertibility { invertible: rcond > cfg.invertibility, margin: smin, rcond }
}

/// Inverse with one step of iterative refinement; fails on singular input or
/// when the refined residual `||a a^-1 - 1||_2` still exceeds `cfg.residual`.
pub fn inverse(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    let n = a.require_square("inverse argument")?;
    let test = is_invertible(a, cfg);
    if !test.invertible {
        return Err(CoepError::Singular { margin: test.margin });
    }
    let m = a.as_dmatrix();
    let x = m.clone().lu().try_inverse().ok_or(CoepError::Singular { margin: test.margin })?;
    let id = nalgebra::DMatrix::identity(n, n);
    let x = &x + &x * (&id - m * &x);
    let x = ComplexMatrix::wrap(x);
    let residual = operator_norm_unchecked(&(a * &x - ComplexMatrix::identity(n)), &NormSpec::l2());
    if !(residual <= cfg.residual) {
        return Err(CoepError::Contract { what: "inverse residual ||a a^-1 - 1||".into(), residual });
    }
    Ok(x)
}
