//! Seeded instance generators for every class. Outputs are built in a
//! Haar-random orthonormal frame, so membership (unitarily invariant under the
//! Euclidean norm) does not depend on a preferred basis.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{CoepError, Result};
use crate::linalg::ComplexMatrix;
use crate::random::{columns, conditioned, haar_unitary, rng_from_seed};

fn require_even(n: usize, what: &str) -> Result<usize> {
    if n == 0 || n % 2 != 0 {
        return Err(CoepError::InvalidInput(format!("{what} needs a positive even dimension, got {n}")));
    }
    Ok(n / 2)
}

fn require_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(CoepError::InvalidInput(format!("{what} needs a positive dimension")));
    }
    Ok(())
}

/// `[[0, b], [0, 0]]` for a square block `b`.
pub fn nilpotent_block(b: &ComplexMatrix) -> ComplexMatrix {
    let m = b.rows();
    ComplexMatrix::from_fn(
        2 * m,
        2 * m,
        |i, j| {
            if i < m && j >= m {
                b.get(i, j - m)
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
    )
}

/// `w [[0, b], [0, 0]] w^*` with `b` an invertible `n/2 x n/2` block.
/// Squares to zero and satisfies `aa† + a†a = 1`.
pub fn gen_hermitian_coep(n: usize, seed: u64) -> Result<ComplexMatrix> {
    let m = require_even(n, "gen_hermitian_coep")?;
    let mut rng = rng_from_seed(seed);
    let b = conditioned(&mut rng, m, 0.5, 2.0);
    let w = haar_unitary(&mut rng, n);
    Ok(&w * nilpotent_block(&b) * w.adjoint())
}

/// `sum_i sigma_i u_i v_i^*` where, in the unitary frame `w` with halves
/// `W1`, `W2`, the `u_i` are the columns of `W1` and the `v_i` the columns of
/// `(W1 cos(theta) + W2 sin(theta)) z`. Every angle must lie in `(0, pi/2)`,
/// so the two half-dimensional spans are complementary but not orthogonal.
pub fn coep_from_angles(w: &ComplexMatrix, thetas: &[f64], sigmas: &[f64], z: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = w.rows();
    let m = require_even(n, "coep_from_angles")?;
    if thetas.len() != m || sigmas.len() != m || z.rows() != m || z.cols() != m || w.cols() != n {
        return Err(CoepError::Shape(format!("coep_from_angles: expected {m} angles, {m} values and a {m}x{m} mixer")));
    }
    if thetas.iter().any(|t| !(*t > 0.0 && *t < std::f64::consts::FRAC_PI_2)) {
        return Err(CoepError::InvalidInput("angles must lie strictly between 0 and pi/2".into()));
    }
    let w1 = columns(w, 0, m);
    let w2 = columns(w, m, m);
    let cos: Vec<f64> = thetas.iter().map(|t| t.cos()).collect();
    let sin: Vec<f64> = thetas.iter().map(|t| t.sin()).collect();
    let v = (&w1 * ComplexMatrix::from_real_diagonal(&cos) + &w2 * ComplexMatrix::from_real_diagonal(&sin)) * z;
    Ok(w1 * ComplexMatrix::from_real_diagonal(sigmas) * v.adjoint())
}

/// Co-EP but not hermitian co-EP: `R(a)` and `R(a^*)` are complementary
/// half-dimensional subspaces at principal angles drawn from `[0.3, 1.2]`.
pub fn gen_coep_non_hermitian(n: usize, seed: u64) -> Result<ComplexMatrix> {
    let m = require_even(n, "gen_coep_non_hermitian")?;
    let mut rng = rng_from_seed(seed);
    let w = haar_unitary(&mut rng, n);
    let z = haar_unitary(&mut rng, m);
    let thetas: Vec<f64> = (0..m).map(|_| rng.random_range(0.3..=1.2)).collect();
    let sigmas: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..=2.0)).collect();
    coep_from_angles(&w, &thetas, &sigmas, &z)
}

/// Range-hermitian `w diag(b, 0) w^*` with `b` invertible of random rank
/// `1..=n`.
pub fn gen_ep(n: usize, seed: u64) -> Result<ComplexMatrix> {
    require_positive(n, "gen_ep")?;
    let mut rng = rng_from_seed(seed);
    let r = rng.random_range(1..=n);
    let b = conditioned(&mut rng, r, 0.5, 2.0);
    let w = haar_unitary(&mut rng, n);
    let mut block = ComplexMatrix::zeros(n, n).into_dmatrix();
    block.view_mut((0, 0), (r, r)).copy_from(b.as_dmatrix());
    Ok(&w * ComplexMatrix::wrap(block) * w.adjoint())
}

/// `u diag(sigma) v^*` with independent Haar frames, random rank `1..=n` and
/// singular values in `[0.3, 3]`. At `n = 2 rank` such matrices are
/// generically co-EP; otherwise never.
pub fn gen_random(n: usize, seed: u64) -> Result<ComplexMatrix> {
    require_positive(n, "gen_random")?;
    let mut rng = rng_from_seed(seed);
    let r = rng.random_range(1..=n);
    let u = haar_unitary(&mut rng, n);
    let v = haar_unitary(&mut rng, n);
    let s: Vec<f64> = (0..r).map(|_| rng.random_range(0.3..=3.0)).collect();
    Ok(columns(&u, 0, r) * ComplexMatrix::from_real_diagonal(&s) * columns(&v, 0, r).adjoint())
}
