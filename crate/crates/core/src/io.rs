//! JSON matrix files: `{"rows": n, "cols": m, "entries": [[re, im], ...]}`,
//! entries in row-major order. Finite doubles round-trip bit for bit.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoepError, Result};
use crate::linalg::ComplexMatrix;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRecord {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRecord {
            rows: self.rows(),
            cols: self.cols(),
            entries: self.entries_row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = MatrixRecord::deserialize(deserializer)?;
        let entries = rec.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::new(rec.rows, rec.cols, entries).map_err(serde::de::Error::custom)
    }
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    serde_json::from_str(s).map_err(|e| CoepError::Parse(e.to_string()))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(m).expect("matrix serialization is infallible")
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    matrix_from_json(&text).map_err(|e| match e {
        CoepError::Parse(msg) => CoepError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    fs::write(path, matrix_to_json(m) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_layout() {
        let m = matrix_from_json(r#"{"rows":2,"cols":2,"entries":[[0,0],[1,0],[0,0],[0,-2.5]]}"#).unwrap();
        assert_eq!(m.get(0, 1), Complex64::new(1.0, 0.0));
        assert_eq!(m.get(1, 1), Complex64::new(0.0, -2.5));
    }

    #[test]
    fn rejects_malformed() {
        assert!(matrix_from_json("{").is_err());
        assert!(matrix_from_json(r#"{"rows":2,"cols":2,"entries":[[0,0]]}"#).is_err());
        assert!(matrix_from_json(r#"{"rows":1,"cols":1,"entries":[[0,0]],"x":1}"#).is_err());
    }

    proptest! {
        #[test]
        fn finite_doubles_round_trip_bit_exact(
            rows in 1usize..4,
            cols in 1usize..4,
            seed in proptest::collection::vec(
                (any::<f64>().prop_filter("finite", |x| x.is_finite()),
                 any::<f64>().prop_filter("finite", |x| x.is_finite())), 16),
        ) {
            let entries: Vec<Complex64> = seed.iter().take(rows * cols)
                .map(|&(re, im)| Complex64::new(re, im)).collect();
            let m = ComplexMatrix::new(rows, cols, entries).unwrap();
            let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
            for (a, b) in m.entries_row_major().iter().zip(back.entries_row_major().iter()) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }
}
