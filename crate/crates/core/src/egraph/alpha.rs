//! Restricting the torus-fixed parabolic `Stab(F_α) ⊂ GL(n)` to `GL(m)`.

use serde::{Deserialize, Deserializer, Serialize};

use super::{EGraph, Edge};
use crate::error::{Error, Result};
use crate::flagcore::FlagType;
use crate::ratlin::{Flag, RatSubspace};

/// A surjection `α: {1..n} → {1..p}`, stored as its list of values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SurjectionAlpha {
    values: Vec<usize>,
}

impl SurjectionAlpha {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("alpha must have at least one value"));
        }
        let p = values.iter().copied().max().unwrap_or(0);
        if values.contains(&0) {
            return Err(Error::invalid("alpha values start at 1"));
        }
        if let Some(missing) = (1..=p).find(|v| !values.contains(v)) {
            return Err(Error::invalid(format!("alpha is not surjective onto 1..{p}: {missing} is missed")));
        }
        Ok(SurjectionAlpha { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn p(&self) -> usize {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `α(i)` for 1-based `i`.
    pub fn at(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    /// Flag type of `F_α`: `dim F_{α,j} = #{i : α(i) ≤ j}` for `j < p`.
    pub fn flag_type(&self) -> FlagType {
        let dims = (1..self.p()).map(|j| self.values.iter().filter(|&&v| v <= j).count()).collect();
        FlagType::new(self.n(), dims).expect("a surjection gives a valid flag type")
    }
}

impl<'de> Deserialize<'de> for SurjectionAlpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SurjectionAlpha::new(Vec::<usize>::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `F_α = {⟨e_i : α(i) ≤ j⟩}_{j=1}^{p-1}`.
pub fn flag_alpha(alpha: &SurjectionAlpha) -> Flag {
    let n = alpha.n();
    let chain = (1..alpha.p())
        .map(|j| RatSubspace::coordinate(n, (0..n).filter(|&i| alpha.values[i] <= j)))
        .collect();
    Flag::new(n, chain).expect("coordinate chain of a surjection is a flag")
}

/// `F_β = {⟨e_r : β(r) ≤ b_j⟩}_{j=1}^{q-1}` in `Q^m`.
pub fn flag_beta(r: &ParabolicRestriction) -> Flag {
    let m = r.beta.len();
    let q = r.beta_image.len();
    let chain = (1..q)
        .map(|j| RatSubspace::coordinate(m, (0..m).filter(|&x| r.beta[x] <= j)))
        .collect();
    Flag::new(m, chain).expect("coordinate chain of beta is a flag")
}

/// Data attached to a parabolic restriction `Q = P ∩ GL(m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParabolicRestriction {
    pub m: usize,
    pub d: usize,
    /// `b_1 < … < b_q`, the image of `β` in increasing order.
    pub beta_image: Vec<Vec<usize>>,
    /// For each `r` in `1..=m`, the (1-based) index `i` with `β(r) = b_i`.
    pub beta: Vec<usize>,
    pub flag_type_q: FlagType,
    pub graph: EGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Restriction {
    Parabolic(ParabolicRestriction),
    NotParabolic { witness: (Vec<usize>, Vec<usize>) },
}

impl Restriction {
    pub fn parabolic(&self) -> Option<&ParabolicRestriction> {
        match self {
            Restriction::Parabolic(r) => Some(r),
            Restriction::NotParabolic { .. } => None,
        }
    }
}

fn leq(x: &[usize], y: &[usize]) -> bool {
    x.iter().zip(y).all(|(a, b)| a <= b)
}

pub fn build_from_alpha(alpha: &SurjectionAlpha, m: usize) -> Result<Restriction> {
    let n = alpha.n();
    if m == 0 || n % m != 0 {
        return Err(Error::NotDivisible { divisor: m, value: n });
    }
    let d = n / m;
    let beta_of = |r: usize| -> Vec<usize> { (0..d).map(|k| alpha.at(k * m + r)).collect() };
    let tuples: Vec<Vec<usize>> = (1..=m).map(beta_of).collect();
    let mut image = tuples.clone();
    image.sort();
    image.dedup();

    for (x, a) in image.iter().enumerate() {
        for b in &image[x + 1..] {
            if !leq(a, b) && !leq(b, a) {
                return Ok(Restriction::NotParabolic { witness: (a.clone(), b.clone()) });
            }
        }
    }
    // Lexicographic order refines the componentwise order, so a chain is
    // already sorted increasingly.
    let q = image.len();
    let beta: Vec<usize> = tuples
        .iter()
        .map(|t| image.binary_search(t).expect("tuple is in the image") + 1)
        .collect();
    let dims = (1..q).map(|j| beta.iter().filter(|&&i| i <= j).count()).collect();
    let flag_type_q = FlagType::new(m, dims)?;

    let p = alpha.p();
    let mut edges = Vec::new();
    for k in 1..=d {
        for j in 1..=p {
            if let Some(i) = (1..=q).rev().find(|&i| image[i - 1][k - 1] == j) {
                edges.push(Edge::new(i, j, k));
            }
        }
    }
    let graph = EGraph::new(q, p, d, edges);
    Ok(Restriction::Parabolic(ParabolicRestriction { m, d, beta_image: image, beta, flag_type_q, graph }))
}

/// All surjections `{1..n} → {1..p}` for `p = 1..=n`, in lexicographic order
/// of `(p, values)`.
pub fn surjections(n: usize) -> Vec<SurjectionAlpha> {
    fn rec(pos: usize, n: usize, p: usize, cur: &mut Vec<usize>, seen: &mut [usize], missing: usize, out: &mut Vec<SurjectionAlpha>) {
        if pos == n {
            if missing == 0 {
                out.push(SurjectionAlpha { values: cur.clone() });
            }
            return;
        }
        if missing > n - pos {
            return;
        }
        for v in 1..=p {
            seen[v] += 1;
            cur.push(v);
            let now_missing = if seen[v] == 1 { missing - 1 } else { missing };
            rec(pos + 1, n, p, cur, seen, now_missing, out);
            cur.pop();
            seen[v] -= 1;
        }
    }
    let mut out = Vec::new();
    for p in 1..=n {
        let mut seen = vec![0; p + 1];
        rec(0, n, p, &mut Vec::with_capacity(n), &mut seen, p, &mut out);
    }
    out
}
