//! Hermitian elements of a normed matrix algebra: `a` with `||exp(ita)|| = 1`
//! for every real `t`.
//!
//! Under the Euclidean norm this is exactly self-adjointness, which is
//! decided directly. For other norms two numerical tests are run: the norm of
//! `exp(ita)` on a symmetric doubling grid of `t`, and the one-sided slopes of
//! `t -> ||1 + ita||` at the origin (both vanish iff the numerical range of
//! `a` is real). Such verdicts are flagged as numerical: a finite grid cannot
//! certify every `t`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{operator_norm_unchecked, relative, ComplexMatrix, NormSpec, ToleranceConfig};

/// Smallest grid point.
pub const GRID_T0: f64 = 1e-3;
/// Grid points are `±GRID_T0 * 2^k` for `k = 0..=GRID_DOUBLINGS`.
pub const GRID_DOUBLINGS: u32 = 20;

/// Step of the slope test, relative to `max(1, ||a||)`.
const SLOPE_STEP: f64 = 1e-6;
/// Accepted slope, relative to `max(1, ||a||)`.
const SLOPE_TOLERANCE: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HermitianMethod {
    ExactL2,
    Sampled,
    Derivative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HermitianVerdict {
    pub is_hermitian: bool,
    /// `max | ||exp(ita)|| - 1 |` over the grid (infinite on overflow).
    pub defect: f64,
    /// Largest one-sided slope of `||1 + ita||` at `t = 0`.
    pub derivative_defect: f64,
    /// `||a - a*|| / max(1, ||a||)`; only for the Euclidean norm.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adjoint_residual: Option<f64>,
    pub method: HermitianMethod,
    /// True when the verdict rests on sampling rather than an exact criterion.
    pub numerical: bool,
}

/// The `t` values of the sampling grid, in increasing `|t|`.
pub fn sample_grid() -> Vec<f64> {
    (0..=GRID_DOUBLINGS)
        .flat_map(|k| {
            let t = GRID_T0 * f64::from(2u32.pow(k));
            [t, -t]
        })
        .collect()
}

fn i_times(a: &ComplexMatrix, t: f64) -> ComplexMatrix {
    a.scale(Complex64::new(0.0, t))
}

/// `sup_t | ||exp(ita)|| - 1 |` over [`sample_grid`].
pub fn hermitian_defect(a: &ComplexMatrix, norm: &NormSpec, _cfg: &ToleranceConfig) -> Result<f64> {
    a.require_square("hermitian test argument")?;
    norm.validate()?;
    Ok(grid_defect(a, norm))
}

fn grid_defect(a: &ComplexMatrix, norm: &NormSpec) -> f64 {
    let mut worst = 0.0_f64;
    for t in sample_grid() {
        let x = ComplexMatrix::wrap(i_times(a, t).as_dmatrix().exp());
        let v = operator_norm_unchecked(&x, norm);
        if !v.is_finite() {
            return f64::INFINITY;
        }
        worst = worst.max((v - 1.0).abs());
    }
    worst
}

fn slope_defect(a: &ComplexMatrix, norm: &NormSpec) -> (f64, f64) {
    let scale = operator_norm_unchecked(a, norm).max(1.0);
    let h = SLOPE_STEP / scale;
    let id = ComplexMatrix::identity(a.rows());
    let up = operator_norm_unchecked(&(&id + i_times(a, h)), norm);
    let down = operator_norm_unchecked(&(&id + i_times(a, -h)), norm);
    let slope = ((up - 1.0) / h).abs().max(((down - 1.0) / h).abs());
    (slope, scale)
}

/// Verdict from the grid test alone.
pub fn sampled_verdict(a: &ComplexMatrix, norm: &NormSpec, cfg: &ToleranceConfig) -> Result<HermitianVerdict> {
    a.require_square("hermitian test argument")?;
    norm.validate()?;
    let defect = grid_defect(a, norm);
    let (slope, _) = slope_defect(a, norm);
    Ok(HermitianVerdict {
        is_hermitian: defect <= cfg.hermitian,
        defect,
        derivative_defect: slope,
        adjoint_residual: None,
        method: HermitianMethod::Sampled,
        numerical: true,
    })
}

/// Verdict from the slope test alone.
pub fn derivative_verdict(a: &ComplexMatrix, norm: &NormSpec, _cfg: &ToleranceConfig) -> Result<HermitianVerdict> {
    a.require_square("hermitian test argument")?;
    norm.validate()?;
    let (slope, scale) = slope_defect(a, norm);
    Ok(HermitianVerdict {
        is_hermitian: slope <= SLOPE_TOLERANCE * scale,
        defect: grid_defect(a, norm),
        derivative_defect: slope,
        adjoint_residual: None,
        method: HermitianMethod::Derivative,
        numerical: true,
    })
}

/// Decides whether `a` is hermitian with respect to `norm`.
pub fn is_hermitian(a: &ComplexMatrix, norm: &NormSpec, cfg: &ToleranceConfig) -> Result<HermitianVerdict> {
    a.require_square("hermitian test argument")?;
    norm.validate()?;
    if norm.is_euclidean() {
        let scale = operator_norm_unchecked(a, norm).max(1.0);
        let asym = relative(operator_norm_unchecked(&(a - a.adjoint()), norm), scale);
        let (slope, _) = slope_defect(a, norm);
        return Ok(HermitianVerdict {
            is_hermitian: asym <= cfg.hermitian,
            defect: grid_defect(a, norm),
            derivative_defect: slope,
            adjoint_residual: Some(asym),
            method: HermitianMethod::ExactL2,
            numerical: false,
        });
    }
    let defect = grid_defect(a, norm);
    let (slope, scale) = slope_defect(a, norm);
    Ok(HermitianVerdict {
        is_hermitian: defect <= cfg.hermitian && slope <= SLOPE_TOLERANCE * scale,
        defect,
        derivative_defect: slope,
        adjoint_residual: None,
        method: HermitianMethod::Sampled,
        numerical: true,
    })
}
