//! Flag types, standard extensions, Picard pullbacks and the brute-force classifier.

mod classify;
mod constants;
mod extension;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

pub use classify::{classify_bruteforce, Classification, ClassifyConfig, FnMap, MAX_CLASSIFY_DIM};
pub use constants::{sample_constants, support_and_constants, Constants, DEFAULT_WINDOW};
pub use extension::{se_compose, se_eval, StandardExtensionData};

use crate::error::{Error, Result};
use crate::ratlin::Flag;

/// Dimension vector `0 < p_1 < … < p_k < ambient_dim` of a partial flag variety.
/// An empty vector is allowed and describes a point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FlagType {
    ambient_dim: usize,
    dims: Vec<usize>,
}

impl FlagType {
    pub fn new(ambient_dim: usize, dims: Vec<usize>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::invalid("ambient dimension must be positive"));
        }
        let mut prev = 0;
        for &p in &dims {
            if p <= prev || p >= ambient_dim {
                return Err(Error::invalid(format!(
                    "dimensions {dims:?} are not strictly increasing inside (0, {ambient_dim})"
                )));
            }
            prev = p;
        }
        Ok(FlagType { ambient_dim, dims })
    }

    pub fn point(ambient_dim: usize) -> Self {
        FlagType { ambient_dim, dims: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of flag members `k`.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// `p_i` with `p_0 = 0` and `p_{k+1} = ambient_dim`.
    pub fn dim_ext(&self, i: usize) -> usize {
        match i {
            0 => 0,
            i if i == self.dims.len() + 1 => self.ambient_dim,
            i => self.dims[i - 1],
        }
    }

    /// Dimensions of the successive quotients `p_i - p_{i-1}` for `i = 1..=k+1`.
    pub fn quotients(&self) -> Vec<usize> {
        (1..=self.dims.len() + 1).map(|i| self.dim_ext(i) - self.dim_ext(i - 1)).collect()
    }

    /// Type of the dual flag variety: `n - p_k < … < n - p_1`.
    pub fn dual(&self) -> FlagType {
        FlagType {
            ambient_dim: self.ambient_dim,
            dims: self.dims.iter().rev().map(|p| self.ambient_dim - p).collect(),
        }
    }

    pub fn expect_eq(&self, other: &FlagType) -> Result<()> {
        if self != other {
            return Err(Error::TypeMismatch { expected: self.to_string(), actual: other.to_string() });
        }
        Ok(())
    }
}

impl fmt::Display for FlagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        write!(f, "Fl({}; {})", d.join(","), self.ambient_dim)
    }
}

impl fmt::Debug for FlagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'de> Deserialize<'de> for FlagType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            ambient_dim: usize,
            dims: Vec<usize>,
        }
        let raw = Raw::deserialize(d)?;
        FlagType::new(raw.ambient_dim, raw.dims).map_err(serde::de::Error::custom)
    }
}

/// A map between flag varieties that can be evaluated pointwise.
pub trait FlagMap {
    fn source_type(&self) -> FlagType;
    fn target_type(&self) -> FlagType;
    fn apply(&self, flag: &Flag) -> Result<Flag>;
}

/// `D ∘ φ` for the duality map `D` on the target.
pub struct Dualized<'a, M: FlagMap + ?Sized>(pub &'a M);

impl<M: FlagMap + ?Sized> FlagMap for Dualized<'_, M> {
    fn source_type(&self) -> FlagType {
        self.0.source_type()
    }

    fn target_type(&self) -> FlagType {
        self.0.target_type().dual()
    }

    fn apply(&self, flag: &Flag) -> Result<Flag> {
        Ok(self.0.apply(flag)?.dual())
    }
}

/// Matrix of `φ^*` on preferred generators: row `j` expresses `φ^*[L_j]` in
/// terms of `[M_1], …, [M_k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PicardPullback {
    pub source_rank: usize,
    pub target_rank: usize,
    pub matrix: Vec<Vec<u64>>,
}

impl PicardPullback {
    pub fn new(source_rank: usize, matrix: Vec<Vec<u64>>) -> Result<Self> {
        if let Some(row) = matrix.iter().find(|r| r.len() != source_rank) {
            return Err(Error::AmbientMismatch(source_rank, row.len()));
        }
        Ok(PicardPullback { source_rank, target_rank: matrix.len(), matrix })
    }

    pub fn identity(rank: usize) -> Self {
        let matrix = (0..rank).map(|i| (0..rank).map(|j| u64::from(i == j)).collect()).collect();
        PicardPullback { source_rank: rank, target_rank: rank, matrix }
    }
}

/// Every row of the pullback is zero or a standard basis vector.
pub fn is_linear(pullback: &PicardPullback) -> bool {
    pullback.matrix.iter().all(|row| {
        let total: u64 = row.iter().sum();
        total == 0 || (total == 1 && row.iter().all(|&x| x <= 1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_type_bounds() {
        assert!(FlagType::new(4, vec![1, 3]).is_ok());
        assert!(FlagType::new(4, vec![0, 3]).is_err());
        assert!(FlagType::new(4, vec![2, 2]).is_err());
        assert!(FlagType::new(4, vec![4]).is_err());
        assert!(FlagType::new(0, vec![]).is_err());
        assert_eq!(FlagType::new(5, vec![1, 3]).unwrap().quotients(), vec![1, 2, 2]);
        assert_eq!(FlagType::new(5, vec![1, 3]).unwrap().dual().dims(), &[2, 4]);
    }

    #[test]
    fn linearity_examples() {
        let a = PicardPullback::new(2, vec![vec![1, 0], vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!is_linear(&a));
        assert!(is_linear(&PicardPullback::identity(3)));
        let b = PicardPullback::new(2, vec![vec![0, 0], vec![0, 1]]).unwrap();
        assert!(is_linear(&b));
        let c = PicardPullback::new(1, vec![vec![2]]).unwrap();
        assert!(!is_linear(&c));
    }
}
