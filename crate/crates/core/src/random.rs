//! Seeded random matrices. Every generator takes an explicit seed and is
//! deterministic per seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;

pub type InstanceRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th instance of a sweep started from `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n).into_dmatrix();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::wrap(q)
}

/// Random `n x n` matrix with singular values drawn uniformly from `[lo, hi]`.
pub fn conditioned<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let u = haar_unitary(rng, n);
    let v = haar_unitary(rng, n);
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    u * ComplexMatrix::from_real_diagonal(&s) * v.adjoint()
}

/// Nonzero complex scalar with modulus in `[0.5, 2]` and uniform phase.
pub fn nonzero_scalar<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r: f64 = rng.random_range(0.5..=2.0);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

/// First `k` columns of an orthonormal basis, as a matrix.
pub(crate) fn columns(m: &ComplexMatrix, start: usize, k: usize) -> ComplexMatrix {
    ComplexMatrix::wrap(m.as_dmatrix().columns(start, k).into_owned())
}
