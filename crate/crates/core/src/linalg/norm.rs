//! Vector norms on complex n-space and their induced operator norms.
//!
//! The 1-, 2- and infinity-norms are evaluated exactly (maximum column sum,
//! largest singular value, maximum row sum). For other `p` the induced norm is
//! estimated by a norm-ratio ascent: alternate `y = A x` with the dual map of
//! `y`, pulled back through `A*`, until the dual certificate stops improving.
//! The result is always attained by some unit vector, so it is a lower bound.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::ComplexMatrix;
use crate::error::{CoepError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    L1,
    L2,
    LInf,
    Lp(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormMode {
    Exact,
    Estimated { iterations: usize, tolerance: f64 },
}

/// A vector norm together with how its induced operator norm is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec {
    pub kind: NormKind,
    pub mode: NormMode,
}

const DEFAULT_LP_ITERATIONS: usize = 100;
const DEFAULT_LP_TOLERANCE: f64 = 1e-13;

impl NormSpec {
    pub const fn l1() -> Self {
        Self { kind: NormKind::L1, mode: NormMode::Exact }
    }

    pub const fn l2() -> Self {
        Self { kind: NormKind::L2, mode: NormMode::Exact }
    }

    pub const fn linf() -> Self {
        Self { kind: NormKind::LInf, mode: NormMode::Exact }
    }

    pub fn lp(p: f64) -> Result<Self> {
        let spec = Self {
            kind: NormKind::Lp(p),
            mode: NormMode::Estimated { iterations: DEFAULT_LP_ITERATIONS, tolerance: DEFAULT_LP_TOLERANCE },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let NormKind::Lp(p) = self.kind {
            if !(p.is_finite() && p > 1.0) {
                return Err(CoepError::InvalidInput(format!("Lp norm needs a finite p > 1, got {p}")));
            }
            if matches!(self.mode, NormMode::Exact) {
                return Err(CoepError::Unsupported(
                    "exact Lp operator norms are only available for p in {1, 2, inf}".into(),
                ));
            }
        }
        if let NormMode::Estimated { iterations, tolerance } = self.mode {
            if iterations == 0 || !(tolerance.is_finite() && tolerance > 0.0) {
                return Err(CoepError::InvalidInput(
                    "estimated mode needs iterations > 0 and a positive tolerance".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, NormKind::L2)
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, NormKind::Lp(_))
    }

    /// Norm of a vector.
    pub fn vector_norm(&self, v: &[Complex64]) -> f64 {
        match self.kind {
            NormKind::L1 => v.iter().map(|z| z.norm()).sum(),
            NormKind::L2 => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            NormKind::LInf => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            NormKind::Lp(p) => lp_norm(v, p),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NormKind::L1 => write!(f, "l1"),
            NormKind::L2 => write!(f, "l2"),
            NormKind::LInf => write!(f, "linf"),
            NormKind::Lp(p) => write!(f, "lp:{p}"),
        }
    }
}

impl FromStr for NormSpec {
    type Err = CoepError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(Self::l1()),
            "l2" => Ok(Self::l2()),
            "linf" => Ok(Self::linf()),
            other => {
                let p = other.strip_prefix("lp:").ok_or_else(|| CoepError::Parse(format!("unknown norm `{s}`")))?;
                let p: f64 = p.parse().map_err(|_| CoepError::Parse(format!("bad exponent in `{s}`")))?;
                Self::lp(p)
            }
        }
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Induced operator norm of `a` under `norm`.
pub fn operator_norm(a: &ComplexMatrix, norm: &NormSpec) -> Result<f64> {
    norm.validate()?;
    if !a.is_finite() {
        return Err(CoepError::InvalidInput("operator norm of a non-finite matrix".into()));
    }
    Ok(operator_norm_unchecked(a, norm))
}

/// Same as [`operator_norm`] without validation; non-finite input yields a
/// non-finite result.
pub(crate) fn operator_norm_unchecked(a: &ComplexMatrix, norm: &NormSpec) -> f64 {
    let m = a.as_dmatrix();
    match norm.kind {
        NormKind::L1 => m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max),
        NormKind::LInf => m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max),
        NormKind::L2 => {
            if !a.is_finite() {
                return f64::INFINITY;
            }
            a.singular_values().first().copied().unwrap_or(0.0)
        }
        NormKind::Lp(p) => {
            let (iterations, tolerance) = match norm.mode {
                NormMode::Estimated { iterations, tolerance } => (iterations, tolerance),
                NormMode::Exact => (DEFAULT_LP_ITERATIONS, DEFAULT_LP_TOLERANCE),
            };
            estimate_lp(a, p, iterations, tolerance)
        }
    }
}

fn lp_norm(v: &[Complex64], p: f64) -> f64 {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * v.iter().map(|z| (z.norm() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Unit vector (in the `p`-norm dual to `q = p/(p-1)`) aligned with `v`:
/// returns `x` with `||x||_q = 1` and `x* v = ||v||_p`.
fn dual_vector(v: &[Complex64], p: f64) -> Vec<Complex64> {
    let nv = lp_norm(v, p);
    if nv == 0.0 {
        return vec![Complex64::new(0.0, 0.0); v.len()];
    }
    v.iter()
        .map(|z| {
            let r = z.norm();
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (z / r) * (r / nv).powf(p - 1.0)
            }
        })
        .collect()
}

fn estimate_lp(a: &ComplexMatrix, p: f64, iterations: usize, tolerance: f64) -> f64 {
    let q = p / (p - 1.0);
    let m = a.as_dmatrix();
    let adj = m.adjoint();
    let cols = a.cols();

    let mut starts: Vec<Vec<Complex64>> = Vec::with_capacity(cols + 1);
    let w = (cols as f64).powf(-1.0 / p);
    starts.push(vec![Complex64::new(w, 0.0); cols]);
    for j in 0..cols {
        let mut e = vec![Complex64::new(0.0, 0.0); cols];
        e[j] = Complex64::new(1.0, 0.0);
        starts.push(e);
    }

    let mut best = 0.0_f64;
    for start in starts {
        let mut x = DVector::from_vec(start);
        for _ in 0..iterations {
            let y = m * &x;
            let est = lp_norm(y.as_slice(), p);
            if !est.is_finite() {
                return f64::INFINITY;
            }
            best = best.max(est);
            if est == 0.0 {
                break;
            }
            let z = &adj * DVector::from_vec(dual_vector(y.as_slice(), p));
            let zq = lp_norm(z.as_slice(), q);
            let zx = z.dotc(&x).re;
            if zq <= zx * (1.0 + tolerance) {
                break;
            }
            x = DVector::from_vec(dual_vector(z.as_slice(), q));
        }
    }
    best
}
