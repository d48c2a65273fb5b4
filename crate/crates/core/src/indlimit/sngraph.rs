//! Chains of E-graphs over an exhaustion, and the realization of generalized
//! flag types with finitely many finite quotients.

use num_bigint::BigUint;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use super::{GeneralizedFlagType, QuotientDim};
use crate::diagembed::DiagonalEmbedding;
use crate::egraph::{validate, EGraph, Edge};
use crate::error::{Error, Result};
use crate::flagcore::FlagType;
use crate::report::ValidationReport;
use crate::supernat::{validate_exhaustion, ExhaustionSpec, SupernaturalNumber};

/// Level graphs `g_1, g_2, …` given by a prefix and, optionally, a period:
/// past the prefix, `g_n = g_{n - period}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnGraph {
    exhaustion: ExhaustionSpec,
    prefix: Vec<EGraph>,
    period: Option<usize>,
}

impl SnGraph {
    pub fn new(exhaustion: ExhaustionSpec, prefix: Vec<EGraph>, period: Option<usize>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::invalid("an s-graph needs at least one level"));
        }
        if exhaustion.cycle.is_empty() {
            return Err(Error::invalid("exhaustion cycle is empty"));
        }
        if let Some(k) = period {
            if k == 0 || k > prefix.len() {
                return Err(Error::invalid(format!("period {k} must lie in 1..={}", prefix.len())));
            }
        }
        Ok(SnGraph { exhaustion, prefix, period })
    }

    pub fn exhaustion(&self) -> &ExhaustionSpec {
        &self.exhaustion
    }

    pub fn prefix(&self) -> &[EGraph] {
        &self.prefix
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    /// `g_n` for 1-based `n`, or `None` past a prefix without a period.
    pub fn level(&self, n: usize) -> Option<&EGraph> {
        let len = self.prefix.len();
        if n == 0 {
            return None;
        }
        if n <= len {
            return self.prefix.get(n - 1);
        }
        let k = self.period?;
        let back = ((n - len - 1) / k + 1) * k;
        self.prefix.get(n - back - 1)
    }

    /// Checks levels `1..=count`: each is an E-graph with `s_{n+1}/s_n`
    /// colours and `1 ≤ q_n ≤ s_n`, and consecutive levels chain.
    pub fn validate(&self, count: usize) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut s = BigUint::from(self.exhaustion.s1);
        for n in 1..=count {
            let Some(g) = self.level(n) else {
                report.push("levels", format!("level {n} is not defined"));
                break;
            };
            let inner = validate(g);
            if !inner.is_valid() {
                report.push("egraph", format!("level {n}: {inner}"));
            }
            let ratio = self.exhaustion.step_ratio(n);
            if g.d as u64 != ratio {
                report.push("colours", format!("level {n} has {} colours but s_{}/s_{n} = {ratio}", g.d, n + 1));
            }
            if g.q == 0 || BigUint::from(g.q) > s {
                report.push("size", format!("level {n} has {} left vertices but s_{n} = {s}", g.q));
            }
            if let Some(next) = self.level(n + 1) {
                if n < count && g.p != next.q {
                    report.push("chaining", format!("level {n} has {} right vertices, level {} has {} left", g.p, n + 1, next.q));
                }
            }
            s *= ratio;
        }
        report
    }

    /// Flag types of `X_1, …, X_count` obtained by pushing `x1` through the levels.
    pub fn level_types(&self, x1: &FlagType, count: usize) -> Result<Vec<FlagType>> {
        let mut types = vec![x1.clone()];
        for n in 1..count {
            let g = self.level(n).ok_or_else(|| Error::invalid(format!("level {n} is not defined")))?;
            let emb = DiagonalEmbedding::new(g.clone(), types[n - 1].clone())?;
            types.push(emb.target().clone());
        }
        Ok(types)
    }
}

impl<'de> Deserialize<'de> for SnGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            exhaustion: ExhaustionSpec,
            prefix: Vec<EGraph>,
            #[serde(default)]
            period: Option<usize>,
        }
        let r = Raw::deserialize(d)?;
        SnGraph::new(r.exhaustion, r.prefix, r.period).map_err(de::Error::custom)
    }
}

/// An s-graph together with the flag type of its first level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realization {
    pub sn_graph: SnGraph,
    pub x1: FlagType,
}

impl Realization {
    pub fn level_types(&self, count: usize) -> Result<Vec<FlagType>> {
        self.sn_graph.level_types(&self.x1, count)
    }
}

/// Realizes a finite chain of quotients, all but finitely many infinite, over
/// `spec`. `X_1` carries every finite quotient; each level adds a copy of
/// `Q^{s_n}` to the infinite quotients in turn, so finite quotients never grow.
pub fn build_sn_graph(gft: &GeneralizedFlagType, sn: &SupernaturalNumber, spec: &ExhaustionSpec) -> Result<Realization> {
    if gft.tail().is_some() {
        return Err(Error::Precondition("infinitely many quotients are finite".into()));
    }
    let order = gft
        .ordered()
        .ok_or_else(|| Error::Precondition("an ordered presentation is required".into()))?;
    let infinite: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|(_, q)| **q == QuotientDim::Infinite)
        .map(|(i, _)| i + 1)
        .collect();
    if infinite.is_empty() {
        return Err(Error::Precondition("a chain of finite quotients exhausts no infinite space".into()));
    }
    let report = validate_exhaustion(spec, sn);
    if !report.is_valid() {
        return Err(Error::invalid(format!("exhaustion {spec} of {sn}: {report}")));
    }
    let finite_sum: u64 = gft.finite_quotients().iter().sum();
    let needed = finite_sum + infinite.len() as u64;
    if spec.s1 < needed {
        return Err(Error::Precondition(format!("s_1 = {} but the quotients need {needed}", spec.s1)));
    }

    let spare = spec.s1 - finite_sum;
    let share = spare / infinite.len() as u64;
    let extra = (spare % infinite.len() as u64) as usize;
    let mut seen = 0;
    let quotients: Vec<u64> = order
        .iter()
        .map(|q| match q {
            QuotientDim::Finite(k) => *k,
            QuotientDim::Infinite => {
                seen += 1;
                share + u64::from(seen <= extra)
            }
        })
        .collect();
    let s1 = usize::try_from(spec.s1).map_err(|_| Error::ScaleExceeded("s_1".into()))?;
    let mut dims = Vec::with_capacity(quotients.len() - 1);
    let mut acc = 0usize;
    for &k in &quotients[..quotients.len() - 1] {
        acc += k as usize;
        dims.push(acc);
    }
    let x1 = FlagType::new(s1, dims)?;

    let q = order.len();
    let period = spec.cycle.len() * infinite.len();
    let mut turn = 0usize;
    let mut prefix = Vec::with_capacity(period);
    for n in 1..=period {
        let d = usize::try_from(spec.step_ratio(n)).map_err(|_| Error::ScaleExceeded("ratio".into()))?;
        let mut edges: Vec<Edge> = (1..=q).map(|i| Edge::new(i, i, 1)).collect();
        for colour in 2..=d {
            edges.push(Edge::new(q, infinite[turn % infinite.len()], colour));
            turn += 1;
        }
        prefix.push(EGraph::checked(q, q, d, edges)?);
    }
    let sn_graph = SnGraph::new(spec.clone(), prefix, Some(period))?;
    Ok(Realization { sn_graph, x1 })
}

/// Levels `X_n = Fl(1, s_n - 1; s_n)` with `s_n = 2^{n+1}`: each step keeps the
/// line and sends the hyperplane `H` to `Q^{s_n} ⊕ H`.
pub fn line_hyperplane_sn_graph() -> Realization {
    let g = EGraph::from_triples(3, 3, 2, &[(1, 1, 1), (3, 2, 1), (2, 2, 2), (3, 3, 2)]);
    let sn_graph = SnGraph::new(ExhaustionSpec::new(4, vec![2]), vec![g], Some(1)).expect("one level, period one");
    Realization { sn_graph, x1: FlagType::new(4, vec![1, 3]).expect("valid type") }
}
