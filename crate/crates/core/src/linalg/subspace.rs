//! Ranges, kernels and their lattice operations.
//!
//! Every subspace is stored through a Euclidean-orthonormal basis. Sums and
//! intersections are both read off one SVD of the component of `V` orthogonal
//! to `U`: its singular values are the sines of the principal angles, so the
//! identity `dim(U) + dim(V) = dim(U + V) + dim(U ∩ V)` holds exactly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::tolerance::ToleranceConfig;
use crate::error::{CoepError, Result};

/// Subspace of complex `ambient`-space with an orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: DMatrix<Complex64>,
}

pub(crate) struct SortedSvd {
    pub u: DMatrix<Complex64>,
    pub s: Vec<f64>,
    pub v: DMatrix<Complex64>,
}

/// Copy scaled by the largest entry modulus, so that the SVD runs on
/// entries of order one; returns the scale.
fn to_faer_scaled(m: &DMatrix<Complex64>) -> (faer::Mat<Complex64>, f64) {
    let scale = m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    (faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / scale), scale)
}

/// Thin SVD with singular values sorted in descending order.
pub(crate) fn sorted_svd(m: &DMatrix<Complex64>) -> SortedSvd {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return SortedSvd { u: DMatrix::zeros(m.nrows(), 0), s: Vec::new(), v: DMatrix::zeros(m.ncols(), 0) };
    }
    let (fm, scale) = to_faer_scaled(m);
    let svd = fm.thin_svd().expect("SVD of a finite matrix converges");
    let (fu, fs, fv) = (svd.U(), svd.S().column_vector(), svd.V());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| fs[j].re.total_cmp(&fs[i].re));
    let s = order.iter().map(|&i| fs[i].re * scale).collect();
    let u = DMatrix::from_fn(m.nrows(), k, |r, c| fu[(r, order[c])]);
    let v = DMatrix::from_fn(m.ncols(), k, |r, c| fv[(r, order[c])]);
    SortedSvd { u, s, v }
}

/// Singular values in descending order.
pub(crate) fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows().min(m.ncols()) == 0 {
        return Vec::new();
    }
    let (fm, scale) = to_faer_scaled(m);
    let mut s = fm.singular_values().expect("SVD of a finite matrix converges");
    for x in &mut s {
        *x *= scale;
    }
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel * s[0]`; zero when `s[0] <= rel`,
/// so that rounding residue of an exactly vanishing expression has rank 0.
pub(crate) fn numerical_rank(s: &[f64], rel: f64) -> usize {
    match s.first() {
        Some(&smax) if smax > rel => s.iter().take_while(|&&x| x > rel * smax).count(),
        _ => 0,
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: DMatrix::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Self { ambient, basis: DMatrix::identity(ambient, ambient) }
    }

    /// Span of the columns of `vectors`.
    pub fn span(vectors: &ComplexMatrix, cfg: &ToleranceConfig) -> Self {
        range_basis(vectors, cfg)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> ComplexMatrix {
        ComplexMatrix::wrap(self.basis.clone())
    }

    pub(crate) fn from_orthonormal(ambient: usize, basis: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(basis.nrows(), ambient);
        Self { ambient, basis }
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.basis * self.basis.adjoint())
    }

    /// Component of `x` orthogonal to the subspace.
    fn residual_of(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        if self.is_zero() {
            return x.clone();
        }
        x - &self.basis * (self.basis.adjoint() * x)
    }

    /// Relative distance of `x` from the subspace, `||x - P x|| / ||x||`
    /// (zero for `x = 0`).
    pub fn distance_ratio(&self, x: &DVector<Complex64>) -> f64 {
        let nx = x.norm();
        if nx == 0.0 {
            return 0.0;
        }
        let xm = DMatrix::from_column_slice(x.len(), 1, x.as_slice());
        self.residual_of(&xm).norm() / nx
    }

    pub fn contains_vector(&self, x: &DVector<Complex64>, cfg: &ToleranceConfig) -> bool {
        self.distance_ratio(x) <= cfg.angle
    }

    /// Sine of the largest principal angle from `self` into `other`; zero iff
    /// `self ⊆ other` exactly.
    pub fn gap_into(&self, other: &Subspace) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = other.residual_of(&self.basis);
        sorted_svd(&r).s.first().copied().unwrap_or(0.0)
    }

    pub fn is_subspace_of(&self, other: &Subspace, cfg: &ToleranceConfig) -> Result<bool> {
        check_ambient(self, other)?;
        Ok(self.dim() <= other.dim() && self.gap_into(other) <= cfg.angle)
    }

    /// Mutual inclusion up to the angle tolerance.
    pub fn equals(&self, other: &Subspace, cfg: &ToleranceConfig) -> Result<bool> {
        check_ambient(self, other)?;
        Ok(self.dim() == other.dim() && self.gap_into(other) <= cfg.angle)
    }
}

fn check_ambient(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient != v.ambient {
        return Err(CoepError::Shape(format!(
            "subspaces live in different ambient spaces ({} vs {})",
            u.ambient, v.ambient
        )));
    }
    Ok(())
}

/// Orthonormal basis of the column space of `a`.
pub fn range_basis(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Subspace {
    let m = a.as_dmatrix();
    if m.ncols() == 0 || m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Subspace::zero(m.nrows());
    }
    let svd = sorted_svd(m);
    let r = numerical_rank(&svd.s, cfg.rank);
    Subspace::from_orthonormal(m.nrows(), svd.u.columns(0, r).into_owned())
}

/// Orthonormal basis of the kernel of `a`.
pub fn null_basis(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Subspace {
    let m = a.as_dmatrix();
    let cols = m.ncols();
    if m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Subspace::full(cols);
    }
    // Pad to at least `cols` rows so the SVD returns a full right basis.
    let padded;
    let work = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.rows_mut(0, m.nrows()).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = sorted_svd(work);
    let r = numerical_rank(&svd.s, cfg.rank);
    Subspace::from_orthonormal(cols, svd.v.columns(r, cols - r).into_owned())
}

/// Numerical rank of `a`.
pub fn rank(a: &ComplexMatrix, cfg: &ToleranceConfig) -> usize {
    if a.as_dmatrix().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return 0;
    }
    numerical_rank(&a.singular_values(), cfg.rank)
}

struct AngleSplit {
    /// Basis of `V ∩ U` (inside `V`).
    inside: DMatrix<Complex64>,
    /// Orthonormal basis of the part of `V` that `U` misses.
    outside: DMatrix<Complex64>,
}

fn split_by_angles(u: &Subspace, v: &Subspace, cfg: &ToleranceConfig) -> AngleSplit {
    let n = u.ambient;
    if v.is_zero() {
        return AngleSplit { inside: DMatrix::zeros(n, 0), outside: DMatrix::zeros(n, 0) };
    }
    if u.is_zero() {
        return AngleSplit { inside: DMatrix::zeros(n, 0), outside: v.basis.clone() };
    }
    let p = u.residual_of(&v.basis);
    let svd = sorted_svd(&p);
    let k = svd.s.iter().take_while(|&&s| s > cfg.angle).count();
    let dv = v.dim();
    AngleSplit { inside: &v.basis * svd.v.columns(k, dv - k), outside: svd.u.columns(0, k).into_owned() }
}

/// Intersection via principal angles: directions of `v` within `cfg.angle` of `u`.
pub fn subspace_intersect(u: &Subspace, v: &Subspace, cfg: &ToleranceConfig) -> Result<Subspace> {
    check_ambient(u, v)?;
    let split = split_by_angles(u, v, cfg);
    Ok(Subspace::from_orthonormal(u.ambient, split.inside))
}

/// Sum `u + v` as the orthonormal basis `[U, (I - UU*)V restricted]`.
pub fn subspace_sum(u: &Subspace, v: &Subspace, cfg: &ToleranceConfig) -> Result<Subspace> {
    check_ambient(u, v)?;
    let split = split_by_angles(u, v, cfg);
    let n = u.ambient;
    let mut basis = DMatrix::zeros(n, u.dim() + split.outside.ncols());
    basis.columns_mut(0, u.dim()).copy_from(&u.basis);
    basis.columns_mut(u.dim(), split.outside.ncols()).copy_from(&split.outside);
    Ok(Subspace::from_orthonormal(n, basis))
}

/// Smallest principal-angle sine between `u` and `v` (1 when either is zero).
/// Positive values certify `u ∩ v = 0`.
pub fn min_angle_sine(u: &Subspace, v: &Subspace) -> f64 {
    if u.is_zero() || v.is_zero() {
        return 1.0;
    }
    if v.dim() + u.dim() > u.ambient {
        return 0.0;
    }
    let p = u.residual_of(&v.basis);
    sorted_svd(&p).s.last().copied().unwrap_or(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn line(v: &[f64]) -> Subspace {
        let m = ComplexMatrix::from_real(v.len(), 1, v);
        range_basis(&m, &cfg())
    }

    #[test]
    fn identity_and_zero() {
        let i = ComplexMatrix::identity(3);
        assert!(range_basis(&i, &cfg()).is_full());
        assert!(null_basis(&i, &cfg()).is_zero());
        let z = ComplexMatrix::zeros(3, 3);
        assert!(range_basis(&z, &cfg()).is_zero());
        assert!(null_basis(&z, &cfg()).is_full());
    }

    #[test]
    fn nilpotent_range_and_kernel() {
        // Direct computation: E e1 = 0, E e2 = e1, so R(E) = N(E) = span{e1}.
        let e = ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.]);
        let e1 = line(&[1., 0.]);
        let r = range_basis(&e, &cfg());
        let k = null_basis(&e, &cfg());
        assert!(r.equals(&e1, &cfg()).unwrap());
        assert!(k.equals(&e1, &cfg()).unwrap());
    }

    #[test]
    fn wide_matrix_kernel() {
        let a = ComplexMatrix::from_real(1, 3, &[1., 1., 0.]);
        let k = null_basis(&a, &cfg());
        assert_eq!(k.dim(), 2);
        assert!(k.contains_vector(
            &DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)]),
            &cfg()
        ));
    }

    #[test]
    fn orthogonal_lines_meet_at_zero() {
        let u = line(&[1., 0.]);
        let v = line(&[0., 1.]);
        assert!(subspace_intersect(&u, &v, &cfg()).unwrap().is_zero());
        assert_eq!(subspace_intersect(&u, &u, &cfg()).unwrap().dim(), 1);
        assert!(subspace_intersect(&u, &u, &cfg()).unwrap().equals(&u, &cfg()).unwrap());
    }

    #[test]
    fn skew_lines_span_plane() {
        // Oracle: rank of the stacked basis [[1, 1/sqrt2], [0, 1/sqrt2]] is 2.
        let stacked = ComplexMatrix::from_real(2, 2, &[1., 0.5f64.sqrt(), 0., 0.5f64.sqrt()]);
        assert_eq!(rank(&stacked, &cfg()), 2);
        let s = subspace_sum(&line(&[1., 0.]), &line(&[1., 1.]), &cfg()).unwrap();
        assert!(s.is_full());
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        assert!(subspace_intersect(&line(&[1., 0.]), &line(&[1., 0., 0.]), &cfg()).is_err());
    }

    #[test]
    fn min_angle_certifies_trivial_intersection() {
        let u = line(&[1., 0.]);
        let v = line(&[1., 1.]);
        let s = min_angle_sine(&u, &v);
        assert!((s - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(min_angle_sine(&u, &u) < 1e-12);
    }
}
