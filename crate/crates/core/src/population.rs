//! Deterministic instance populations for sweeps.
//!
//! Instance `i` of a population started from `seed` depends only on `seed`,
//! `i` and the dimension range, so any instance can be replayed on its own.
//! Classes cycle through hermitian co-EP, non-hermitian co-EP, EP and random
//! matrices, with one zero and one identity matrix in every ten.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classification::{gen_coep_non_hermitian, gen_ep, gen_hermitian_coep, gen_random};
use crate::error::{CoepError, Result};
use crate::linalg::ComplexMatrix;
use crate::random::{derive_seed, rng_from_seed};

/// Largest supported dimension; lifted operators are `n² x n²`.
pub const MAX_DIM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceClass {
    HermitianCoep,
    CoepNonHermitian,
    Ep,
    Random,
    Zero,
    Identity,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 6] = [
        InstanceClass::HermitianCoep,
        InstanceClass::CoepNonHermitian,
        InstanceClass::Ep,
        InstanceClass::Random,
        InstanceClass::Zero,
        InstanceClass::Identity,
    ];

    const CYCLE: [InstanceClass; 10] = [
        InstanceClass::HermitianCoep,
        InstanceClass::CoepNonHermitian,
        InstanceClass::Ep,
        InstanceClass::Random,
        InstanceClass::HermitianCoep,
        InstanceClass::CoepNonHermitian,
        InstanceClass::Ep,
        InstanceClass::Random,
        InstanceClass::Zero,
        InstanceClass::Identity,
    ];

    pub fn needs_even_dimension(self) -> bool {
        matches!(self, InstanceClass::HermitianCoep | InstanceClass::CoepNonHermitian)
    }

    pub fn name(self) -> &'static str {
        match self {
            InstanceClass::HermitianCoep => "hermitian-coep",
            InstanceClass::CoepNonHermitian => "coep-non-hermitian",
            InstanceClass::Ep => "ep",
            InstanceClass::Random => "random",
            InstanceClass::Zero => "zero",
            InstanceClass::Identity => "identity",
        }
    }

    /// Builds one matrix of this class.
    pub fn generate(self, n: usize, seed: u64) -> Result<ComplexMatrix> {
        match self {
            InstanceClass::HermitianCoep => gen_hermitian_coep(n, seed),
            InstanceClass::CoepNonHermitian => gen_coep_non_hermitian(n, seed),
            InstanceClass::Ep => gen_ep(n, seed),
            InstanceClass::Random => gen_random(n, seed),
            InstanceClass::Zero => Ok(ComplexMatrix::zeros(n, n)),
            InstanceClass::Identity => Ok(ComplexMatrix::identity(n)),
        }
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceClass {
    type Err = CoepError;

    fn from_str(s: &str) -> Result<Self> {
        InstanceClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CoepError::Parse(format!("unknown instance class {s:?}")))
    }
}

/// Inclusive dimension range within `[1, MAX_DIM]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimRange {
    pub min: usize,
    pub max: usize,
}

impl DimRange {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        if min == 0 || max < min || max > MAX_DIM {
            return Err(CoepError::InvalidInput(format!(
                "dimension range {min}..{max} must satisfy 1 <= min <= max <= {MAX_DIM}"
            )));
        }
        Ok(Self { min, max })
    }

    fn choices(&self, even_only: bool) -> Vec<usize> {
        (self.min..=self.max).filter(|n| !even_only || n % 2 == 0).collect()
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

impl FromStr for DimRange {
    type Err = CoepError;

    /// `"a..b"` or a single dimension `"n"`.
    fn from_str(s: &str) -> Result<Self> {
        let parse =
            |t: &str| t.trim().parse::<usize>().map_err(|_| CoepError::Parse(format!("bad dimension {t:?} in {s:?}")));
        match s.split_once("..") {
            Some((a, b)) => DimRange::new(parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let n = parse(s)?;
                DimRange::new(n, n)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub index: usize,
    /// Seed passed to the class generator.
    pub seed: u64,
    pub class: InstanceClass,
    pub n: usize,
    pub matrix: ComplexMatrix,
}

/// Instance `index` of the population from `master`. Co-EP classes need an
/// even dimension; when the range has none they are replaced by random
/// matrices.
pub fn instance(master: u64, index: usize, dims: DimRange, class: Option<InstanceClass>) -> Result<Instance> {
    let seed = derive_seed(master, index as u64);
    let mut class = class.unwrap_or(InstanceClass::CYCLE[index % InstanceClass::CYCLE.len()]);
    let mut choices = dims.choices(class.needs_even_dimension());
    if choices.is_empty() {
        class = InstanceClass::Random;
        choices = dims.choices(false);
    }
    let n = choices[rng_from_seed(seed ^ 0xd1b5_4a32_d192_ed03).random_range(0..choices.len())];
    let matrix = class.generate(n, seed)?;
    Ok(Instance { index, seed, class, n, matrix })
}

/// The first `count` instances from `master`, optionally all of one class.
pub fn population(master: u64, count: usize, dims: DimRange, class: Option<InstanceClass>) -> Result<Vec<Instance>> {
    (0..count).map(|i| instance(master, i, dims, class)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_range_parsing() {
        assert_eq!("2..6".parse::<DimRange>().unwrap(), DimRange { min: 2, max: 6 });
        assert_eq!("4".parse::<DimRange>().unwrap(), DimRange { min: 4, max: 4 });
        assert_eq!("1..=3".parse::<DimRange>().unwrap(), DimRange { min: 1, max: 3 });
        assert!("0..3".parse::<DimRange>().is_err());
        assert!("2..17".parse::<DimRange>().is_err());
        assert!("5..2".parse::<DimRange>().is_err());
        assert!("x".parse::<DimRange>().is_err());
    }

    #[test]
    fn class_names_round_trip() {
        for c in InstanceClass::ALL {
            assert_eq!(c.name().parse::<InstanceClass>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{c}\""));
        }
    }

    #[test]
    fn replay_is_independent_of_population_size() {
        let dims = DimRange::new(2, 6).unwrap();
        let pop = population(11, 25, dims, None).unwrap();
        for i in [0, 7, 24] {
            assert_eq!(instance(11, i, dims, None).unwrap(), pop[i]);
        }
        assert!(pop.iter().all(|x| (2..=6).contains(&x.n)));
        assert!(pop.iter().filter(|x| x.class.needs_even_dimension()).all(|x| x.n % 2 == 0));
        assert_eq!(pop[8].class, InstanceClass::Zero);
        assert_eq!(pop[9].class, InstanceClass::Identity);
    }

    #[test]
    fn odd_only_range_falls_back_to_random() {
        let dims = DimRange::new(3, 3).unwrap();
        let x = instance(1, 0, dims, Some(InstanceClass::HermitianCoep)).unwrap();
        assert_eq!((x.class, x.n), (InstanceClass::Random, 3));
    }
}
