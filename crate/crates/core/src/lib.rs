//! Moore-Penrose inverses, co-EP elements and their perturbation theory in
//! normed algebras of complex square matrices.

pub mod classification;
pub mod error;
pub mod hermitian;
pub mod io;
pub mod lifted;
pub mod linalg;
pub mod perturbation;
pub mod population;
pub mod pseudoinverse;
pub mod random;
pub mod statement;

pub use error::{CoepError, Result};
