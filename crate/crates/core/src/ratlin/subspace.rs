//! Subspaces of `Q^n` in canonical reduced row-echelon form, and flags of them.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{rows_from_strings, rows_to_strings, rref_rows, RatMatrix, Rational};
use crate::error::{Error, Result};
use crate::flagcore::FlagType;

/// A linear subspace of `Q^ambient_dim`.
///
/// The basis is kept in reduced row-echelon form, so two subspaces are equal
/// exactly when their representations are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatSubspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl RatSubspace {
    pub fn zero(ambient_dim: usize) -> Self {
        RatSubspace { ambient_dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::coordinate(ambient_dim, 0..ambient_dim)
    }

    /// Span of the given (0-based) standard basis vectors.
    pub fn coordinate(ambient_dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let rows = indices
            .into_iter()
            .map(|i| unit_vector(ambient_dim, i))
            .collect();
        Self::span(ambient_dim, rows).expect("unit vectors have the ambient length")
    }

    /// Span of arbitrary vectors (possibly dependent).
    pub fn span(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::AmbientMismatch(ambient_dim, v.len()));
        }
        let (basis, pivots) = rref_rows(vectors, ambient_dim);
        Ok(RatSubspace { ambient_dim, basis, pivots })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the echelon basis; the result vanishes on every
    /// pivot coordinate and is zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let f = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o -= &f * r;
                }
            }
        }
        out
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        v.len() == self.ambient_dim && self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains(&self, other: &RatSubspace) -> bool {
        other.ambient_dim == self.ambient_dim && other.basis.iter().all(|v| self.contains_vector(v))
    }

    fn check_ambient(&self, other: &RatSubspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch(self.ambient_dim, other.ambient_dim));
        }
        Ok(())
    }

    pub fn sum(&self, other: &RatSubspace) -> Result<RatSubspace> {
        self.check_ambient(other)?;
        if other.is_zero() || self.is_full() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_full() {
            return Ok(other.clone());
        }
        let rows = self.basis.iter().chain(&other.basis).cloned().collect();
        RatSubspace::span(self.ambient_dim, rows)
    }

    pub fn intersect(&self, other: &RatSubspace) -> Result<RatSubspace> {
        self.check_ambient(other)?;
        if self.contains(other) {
            return Ok(other.clone());
        }
        if other.contains(self) {
            return Ok(self.clone());
        }
        self.annihilator().sum(&other.annihilator()).map(|s| s.annihilator())
    }

    /// Orthogonal complement for the standard pairing; identifies `Q^n` with
    /// its dual, so this is also the annihilator in `(Q^n)^*`.
    pub fn annihilator(&self) -> RatSubspace {
        let n = self.ambient_dim;
        let mut is_pivot = vec![false; n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let rows = (0..n)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Rational::zero(); n];
                v[free] = Rational::one();
                for (row, &p) in self.basis.iter().zip(&self.pivots) {
                    if !row[free].is_zero() {
                        v[p] = -row[free].clone();
                    }
                }
                v
            })
            .collect();
        RatSubspace::span(n, rows).expect("annihilator rows have ambient length")
    }

    /// Image under a linear map given as a `target × ambient` matrix.
    pub fn image(&self, map: &RatMatrix) -> Result<RatSubspace> {
        if map.cols() != self.ambient_dim {
            return Err(Error::AmbientMismatch(map.cols(), self.ambient_dim));
        }
        let rows = self.basis.iter().map(|v| map.apply(v)).collect::<Result<Vec<_>>>()?;
        RatSubspace::span(map.rows(), rows)
    }

    /// Vectors completing a basis of `self` to a basis of `target`, chosen
    /// greedily from the echelon basis of `target`.
    pub fn complement_in(&self, target: &RatSubspace) -> Result<Vec<Vec<Rational>>> {
        self.check_ambient(target)?;
        let mut acc = self.clone();
        let mut extra = Vec::new();
        for v in &target.basis {
            if !acc.contains_vector(v) {
                extra.push(v.clone());
                let mut rows = acc.basis.clone();
                rows.push(v.clone());
                acc = RatSubspace::span(self.ambient_dim, rows)?;
            }
        }
        if !acc.contains(target) {
            return Err(Error::invalid("complement_in: target does not contain self"));
        }
        Ok(extra)
    }

    /// Places a subspace of `Q^m` into block `block` (1-based) of `Q^{d·m}`.
    pub fn chi_embed(&self, block: usize, blocks: usize) -> Result<RatSubspace> {
        if block == 0 || block > blocks {
            return Err(Error::IndexOutOfRange { index: block, max: blocks });
        }
        let m = self.ambient_dim;
        let n = m * blocks;
        let offset = (block - 1) * m;
        let rows = self
            .basis
            .iter()
            .map(|v| {
                let mut w = vec![Rational::zero(); n];
                w[offset..offset + m].clone_from_slice(v);
                w
            })
            .collect();
        RatSubspace::span(n, rows)
    }

    /// Direct sum `M_1^{(1)} ⊕ … ⊕ M_d^{(d)}` of subspaces of `Q^m`, one per block.
    pub fn block_sum(parts: &[RatSubspace]) -> Result<RatSubspace> {
        let Some(first) = parts.first() else {
            return Err(Error::invalid("block_sum of no parts"));
        };
        let m = first.ambient_dim;
        let d = parts.len();
        let mut rows = Vec::new();
        for (k, part) in parts.iter().enumerate() {
            if part.ambient_dim != m {
                return Err(Error::AmbientMismatch(m, part.ambient_dim));
            }
            for v in &part.basis {
                let mut w = vec![Rational::zero(); m * d];
                w[k * m..(k + 1) * m].clone_from_slice(v);
                rows.push(w);
            }
        }
        // Blocks are disjoint and each part is already in echelon form, so the
        // concatenation is in echelon form too.
        RatSubspace::span(m * d, rows)
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

impl fmt::Debug for RatSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, v) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", s.join(","))?;
        }
        write!(f, "⟩⊂Q^{}", self.ambient_dim)
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient_dim: usize,
    basis: Vec<Vec<String>>,
}

impl Serialize for RatSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr { ambient_dim: self.ambient_dim, basis: rows_to_strings(&self.basis) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatSubspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SubspaceRepr::deserialize(d)?;
        let rows = rows_from_strings(&repr.basis).map_err(serde::de::Error::custom)?;
        RatSubspace::span(repr.ambient_dim, rows).map_err(serde::de::Error::custom)
    }
}

/// A strictly increasing chain of nonzero proper subspaces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Flag {
    ambient_dim: usize,
    chain: Vec<RatSubspace>,
}

impl Flag {
    pub fn new(ambient_dim: usize, chain: Vec<RatSubspace>) -> Result<Self> {
        for (i, s) in chain.iter().enumerate() {
            if s.ambient_dim() != ambient_dim {
                return Err(Error::AmbientMismatch(ambient_dim, s.ambient_dim()));
            }
            if s.is_zero() || s.is_full() {
                return Err(Error::invalid(format!("flag member {} is zero or the whole space", i + 1)));
            }
            if i > 0 {
                let prev = &chain[i - 1];
                if prev.dim() >= s.dim() || !s.contains(prev) {
                    return Err(Error::invalid(format!(
                        "flag members {} and {} are not strictly nested",
                        i,
                        i + 1
                    )));
                }
            }
        }
        Ok(Flag { ambient_dim, chain })
    }

    /// The standard flag `⟨e_1..e_{p_1}⟩ ⊂ ⟨e_1..e_{p_2}⟩ ⊂ …` of the given type.
    pub fn coordinate(ft: &FlagType) -> Flag {
        let chain = ft
            .dims()
            .iter()
            .map(|&p| RatSubspace::coordinate(ft.ambient_dim(), 0..p))
            .collect();
        Flag { ambient_dim: ft.ambient_dim(), chain }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn members(&self) -> &[RatSubspace] {
        &self.chain
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Member `i` with the conventions `V_0 = 0` and `V_{k+1} = V`.
    pub fn member_ext(&self, i: usize) -> RatSubspace {
        match i {
            0 => RatSubspace::zero(self.ambient_dim),
            i if i == self.chain.len() + 1 => RatSubspace::full(self.ambient_dim),
            i => self.chain[i - 1].clone(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.chain.iter().map(RatSubspace::dim).collect()
    }

    pub fn flag_type(&self) -> FlagType {
        FlagType::new(self.ambient_dim, self.dims()).expect("a valid flag has a valid type")
    }

    pub fn transform(&self, g: &RatMatrix) -> Result<Flag> {
        let chain = self.chain.iter().map(|s| s.image(g)).collect::<Result<Vec<_>>>()?;
        Flag::new(g.rows(), chain)
    }

    /// The dual flag in `(Q^n)^* ≅ Q^n`: annihilators in reverse order.
    pub fn dual(&self) -> Flag {
        let chain = self.chain.iter().rev().map(RatSubspace::annihilator).collect();
        Flag { ambient_dim: self.ambient_dim, chain }
    }
}

impl fmt::Debug for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.chain).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct FlagRepr {
    ambient_dim: usize,
    chain: Vec<Vec<Vec<String>>>,
}

impl Serialize for Flag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FlagRepr {
            ambient_dim: self.ambient_dim,
            chain: self.chain.iter().map(|m| rows_to_strings(m.basis())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Flag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FlagRepr::deserialize(d)?;
        let chain = repr
            .chain
            .iter()
            .map(|rows| {
                rows_from_strings(rows).and_then(|r| RatSubspace::span(repr.ambient_dim, r))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Flag::new(repr.ambient_dim, chain).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::matrix::rat;

    fn e(n: usize, idx: &[usize]) -> RatSubspace {
        RatSubspace::coordinate(n, idx.iter().copied())
    }

    #[test]
    fn sum_and_intersect_examples() {
        assert_eq!(e(3, &[0]).sum(&e(3, &[1])).unwrap(), e(3, &[0, 1]));
        assert_eq!(e(3, &[0, 1]).intersect(&e(3, &[1, 2])).unwrap(), e(3, &[1]));
        assert!(e(3, &[0]).sum(&e(2, &[0])).is_err());
    }

    #[test]
    fn chi_embed_examples() {
        assert_eq!(e(2, &[0]).chi_embed(2, 2).unwrap(), e(4, &[2]));
        assert_eq!(RatSubspace::full(2).chi_embed(1, 3).unwrap(), e(6, &[0, 1]));
        assert!(matches!(e(2, &[0]).chi_embed(3, 2), Err(Error::IndexOutOfRange { .. })));
        assert!(e(2, &[0]).chi_embed(0, 2).is_err());
    }

    #[test]
    fn canonical_form_ignores_basis_choice() {
        let a = RatSubspace::span(3, vec![vec![rat(1), rat(1), rat(0)], vec![rat(0), rat(1), rat(1)]]).unwrap();
        let b = RatSubspace::span(3, vec![vec![rat(1), rat(2), rat(1)], vec![rat(2), rat(1), rat(-1)]]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn annihilator_is_involutive() {
        let a = RatSubspace::span(4, vec![vec![rat(1), rat(2), rat(0), rat(-1)]]).unwrap();
        assert_eq!(a.annihilator().dim(), 3);
        assert_eq!(a.annihilator().annihilator(), a);
    }

    #[test]
    fn flag_rejects_non_strict_chains() {
        assert!(Flag::new(3, vec![e(3, &[0]), e(3, &[1, 2])]).is_err());
        assert!(Flag::new(3, vec![e(3, &[0]), e(3, &[0])]).is_err());
        assert!(Flag::new(3, vec![RatSubspace::full(3)]).is_err());
        assert!(Flag::new(3, vec![e(3, &[0]), e(3, &[0, 2])]).is_ok());
    }

    #[test]
    fn flag_json_round_trip() {
        let f = Flag::new(3, vec![e(3, &[1]), e(3, &[0, 1])]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: Flag = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"ambient_dim":3,"chain":[[["1","0","0"]],[["1","0","0"]]]}"#;
        assert!(serde_json::from_str::<Flag>(bad).is_err());
    }
}
