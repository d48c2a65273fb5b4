//! Ind-varieties of generalized flags: canonical exhaustions, s-graphs,
//! admissibility and factorization of linear s-graphs.

mod admissible;
mod canonical;
mod factor;
mod sngraph;

pub use admissible::{
    admissible, AdmissibilityCertificate, Admissibility, NonAdmissibilityProof, Pick, PickSource, DEFAULT_BOUND,
};
pub use canonical::{canonical_exhaustion, Branch, CanonicalStep};
pub use factor::{decompose_sn_graph, factor_linear_egraph, pullback_additivity, Factor};
pub use sngraph::{build_sn_graph, line_hyperplane_sn_graph, Realization, SnGraph};

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Infinitely many finite quotients, presented by a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Tail {
    /// Dimensions `base · ratio^k` for `k ≥ 0`.
    Geometric { base: u64, ratio: u64 },
    /// Infinitely many quotients of dimension `c`.
    Constant { c: u64 },
}

impl Tail {
    /// Dimension of the `k`-th tail quotient, if it fits.
    pub fn dim(&self, k: u32) -> Option<u128> {
        match *self {
            Tail::Geometric { base, ratio } => u128::from(ratio).checked_pow(k)?.checked_mul(u128::from(base)),
            Tail::Constant { c } => Some(u128::from(c)),
        }
    }
}

/// One position of an ordered presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuotientDim {
    Finite(u64),
    Infinite,
}

impl Serialize for QuotientDim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QuotientDim::Finite(k) => s.serialize_u64(*k),
            QuotientDim::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for QuotientDim {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(QuotientDim::Finite(k)),
            Raw::Str(s) if s == "inf" => Ok(QuotientDim::Infinite),
            Raw::Str(s) => Err(de::Error::custom(format!("expected a positive integer or \"inf\", got {s:?}"))),
        }
    }
}

/// Quotient dimensions of a generalized flag: the finite ones as a multiset
/// plus an optional tail rule, whether infinite-dimensional quotients occur,
/// and optionally the order of the quotients when there are finitely many.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralizedFlagType {
    finite_quotients: Vec<u64>,
    tail: Option<Tail>,
    infinite_quotients: bool,
    ordered: Option<Vec<QuotientDim>>,
}

impl GeneralizedFlagType {
    pub fn new(
        finite_quotients: Vec<u64>,
        tail: Option<Tail>,
        infinite_quotients: bool,
        ordered: Option<Vec<QuotientDim>>,
    ) -> Result<Self> {
        if finite_quotients.contains(&0) {
            return Err(Error::invalid("quotient dimensions are positive"));
        }
        match tail {
            Some(Tail::Geometric { base, ratio }) if base == 0 || ratio < 2 => {
                return Err(Error::invalid("a geometric tail needs base ≥ 1 and ratio ≥ 2"));
            }
            Some(Tail::Constant { c: 0 }) => return Err(Error::invalid("a constant tail needs c ≥ 1")),
            _ => {}
        }
        if finite_quotients.is_empty() && tail.is_none() && !infinite_quotients {
            return Err(Error::invalid("a flag type needs at least one quotient"));
        }
        if let Some(order) = &ordered {
            if tail.is_some() {
                return Err(Error::invalid("an ordered presentation lists finitely many quotients"));
            }
            let mut listed: Vec<u64> = order
                .iter()
                .filter_map(|q| match q {
                    QuotientDim::Finite(k) => Some(*k),
                    QuotientDim::Infinite => None,
                })
                .collect();
            let mut expected = finite_quotients.clone();
            listed.sort_unstable();
            expected.sort_unstable();
            if listed != expected {
                return Err(Error::invalid("ordered presentation disagrees with the finite quotients"));
            }
            if order.contains(&QuotientDim::Infinite) != infinite_quotients {
                return Err(Error::invalid("ordered presentation disagrees with infinite_quotients"));
            }
        }
        Ok(GeneralizedFlagType { finite_quotients, tail, infinite_quotients, ordered })
    }

    /// A finite chain of quotients, listed in order.
    pub fn chain(order: Vec<QuotientDim>) -> Result<Self> {
        let finite = order
            .iter()
            .filter_map(|q| match q {
                QuotientDim::Finite(k) => Some(*k),
                QuotientDim::Infinite => None,
            })
            .collect();
        let infinite = order.contains(&QuotientDim::Infinite);
        Self::new(finite, None, infinite, Some(order))
    }

    pub fn finite_quotients(&self) -> &[u64] {
        &self.finite_quotients
    }

    pub fn tail(&self) -> Option<Tail> {
        self.tail
    }

    pub fn has_infinite_quotients(&self) -> bool {
        self.infinite_quotients
    }

    pub fn ordered(&self) -> Option<&[QuotientDim]> {
        self.ordered.as_deref()
    }
}

impl fmt::Display for GeneralizedFlagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(order) = &self.ordered {
            let parts: Vec<String> = order
                .iter()
                .map(|q| match q {
                    QuotientDim::Finite(k) => k.to_string(),
                    QuotientDim::Infinite => "∞".into(),
                })
                .collect();
            return write!(f, "({})", parts.join(", "));
        }
        write!(f, "finite {:?}", self.finite_quotients)?;
        match self.tail {
            Some(Tail::Geometric { base, ratio }) => write!(f, " + {base}·{ratio}^k")?,
            Some(Tail::Constant { c }) => write!(f, " + {c} repeated")?,
            None => {}
        }
        if self.infinite_quotients {
            write!(f, " + ∞")?;
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for GeneralizedFlagType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            #[serde(default)]
            finite_quotients: Vec<u64>,
            #[serde(default)]
            tail: Option<Tail>,
            infinite_quotients: bool,
            #[serde(default)]
            ordered: Option<Vec<QuotientDim>>,
        }
        let r = Raw::deserialize(d)?;
        GeneralizedFlagType::new(r.finite_quotients, r.tail, r.infinite_quotients, r.ordered)
            .map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema() {
        let text = r#"{"finite_quotients":[1,2], "tail":{"kind":"geometric","base":1,"ratio":2}, "infinite_quotients":true, "ordered":null}"#;
        let g: GeneralizedFlagType = serde_json::from_str(text).unwrap();
        assert_eq!(g.tail(), Some(Tail::Geometric { base: 1, ratio: 2 }));
        let back: GeneralizedFlagType = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);

        let chain: GeneralizedFlagType =
            serde_json::from_str(r#"{"finite_quotients":[1],"infinite_quotients":true,"ordered":[1,"inf"]}"#).unwrap();
        assert_eq!(chain.ordered(), Some(&[QuotientDim::Finite(1), QuotientDim::Infinite][..]));
    }

    #[test]
    fn invariants() {
        assert!(GeneralizedFlagType::new(vec![], None, false, None).is_err());
        assert!(GeneralizedFlagType::new(vec![0], None, true, None).is_err());
        assert!(GeneralizedFlagType::new(vec![1], Some(Tail::Geometric { base: 1, ratio: 1 }), false, None).is_err());
        assert!(GeneralizedFlagType::new(vec![1], None, true, Some(vec![QuotientDim::Finite(2), QuotientDim::Infinite]))
            .is_err());
        assert!(GeneralizedFlagType::new(vec![1], None, false, Some(vec![QuotientDim::Finite(1), QuotientDim::Infinite]))
            .is_err());
        assert!(GeneralizedFlagType::new(vec![], Some(Tail::Constant { c: 1 }), false, None).is_ok());
        assert!(serde_json::from_str::<GeneralizedFlagType>(r#"{"infinite_quotients":true,"ordered":["x"]}"#).is_err());
    }

    #[test]
    fn tail_dims() {
        let t = Tail::Geometric { base: 3, ratio: 2 };
        assert_eq!((0..4).map(|k| t.dim(k).unwrap()).collect::<Vec<_>>(), vec![3, 6, 12, 24]);
        assert_eq!(Tail::Constant { c: 5 }.dim(100), Some(5));
        assert_eq!(t.dim(200), None);
    }
}
