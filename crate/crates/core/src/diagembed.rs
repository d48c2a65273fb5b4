//! Embeddings `GL(m)/Q → GL(dm)/P` of flag varieties read off an E-graph.

use rayon::prelude::*;
use serde::Serialize;

use crate::egraph::{build_from_alpha, partition_edges, validate, EGraph, ParabolicRestriction, Restriction, SurjectionAlpha};
use crate::error::{Error, Result};
use crate::flagcore::{FlagMap, FlagType, PicardPullback};
use crate::ratlin::random::{random_flag, random_invertible, rng};
use crate::ratlin::{Flag, RatMatrix, RatSubspace};

/// The embedding encoded by a valid E-graph with `q` left vertices and a flag
/// type of length `q - 1` on `W = Q^m`; the target lives in `V = W^{⊕d}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DiagonalEmbedding {
    graph: EGraph,
    source: FlagType,
    target: FlagType,
}

impl DiagonalEmbedding {
    pub fn new(graph: EGraph, source: FlagType) -> Result<Self> {
        let report = validate(&graph);
        if !report.is_valid() {
            return Err(Error::invalid(format!("not an E-graph: {report}")));
        }
        if source.len() + 1 != graph.q {
            return Err(Error::invalid(format!(
                "source type {source} has {} members but the graph has {} left vertices",
                source.len(),
                graph.q
            )));
        }
        let n = source.ambient_dim() * graph.d;
        let dims = (1..graph.p)
            .map(|j| (1..=graph.d).map(|c| source.dim_ext(graph.last_left_at_or_above(j, c))).sum())
            .collect();
        let target = FlagType::new(n, dims)?;
        Ok(DiagonalEmbedding { graph, source, target })
    }

    /// The embedding attached to a parabolic restriction of `Stab(F_α)`.
    pub fn from_alpha(alpha: &SurjectionAlpha, m: usize) -> Result<(Self, ParabolicRestriction)> {
        match build_from_alpha(alpha, m)? {
            Restriction::Parabolic(r) => {
                let emb = Self::new(r.graph.clone(), r.flag_type_q.clone())?;
                if emb.target != alpha.flag_type() {
                    return Err(Error::Consistency(format!(
                        "graph gives target {} but alpha has type {}",
                        emb.target,
                        alpha.flag_type()
                    )));
                }
                Ok((emb, r))
            }
            Restriction::NotParabolic { witness } => Err(Error::Precondition(format!(
                "restriction is not parabolic: {:?} and {:?} are incomparable",
                witness.0, witness.1
            ))),
        }
    }

    pub fn graph(&self) -> &EGraph {
        &self.graph
    }

    pub fn source(&self) -> &FlagType {
        &self.source
    }

    pub fn target(&self) -> &FlagType {
        &self.target
    }

    pub fn m(&self) -> usize {
        self.source.ambient_dim()
    }

    pub fn d(&self) -> usize {
        self.graph.d
    }

    fn blocks(&self, flag: &Flag, index: impl Fn(usize) -> usize) -> Result<RatSubspace> {
        let parts: Vec<RatSubspace> = (1..=self.graph.d).map(|c| flag.member_ext(index(c))).collect();
        RatSubspace::block_sum(&parts)
    }

    /// Image of `flag`, computed with both the step-by-step and the closed
    /// formula; a disagreement is reported as [`Error::Consistency`].
    pub fn eval(&self, flag: &Flag) -> Result<Flag> {
        self.source.expect_eq(&flag.flag_type())?;
        let g = &self.graph;
        let mut closed = Vec::with_capacity(g.p - 1);
        let mut running = RatSubspace::zero(self.target.ambient_dim());
        for j in 1..g.p {
            let step = self.blocks(flag, |c| g.edge_at_right(j, c).map_or(0, |e| e.left))?;
            running = running.sum(&step)?;
            let direct = self.blocks(flag, |c| g.last_left_at_or_above(j, c))?;
            if direct != running {
                return Err(Error::Consistency(format!("the two formulas disagree at member {j}")));
            }
            closed.push(direct);
        }
        let out = Flag::new(self.target.ambient_dim(), closed)
            .map_err(|e| Error::Consistency(format!("image is not a flag: {e}")))?;
        if out.flag_type() != self.target {
            return Err(Error::Consistency("image has the wrong type".into()));
        }
        Ok(out)
    }
}

impl FlagMap for DiagonalEmbedding {
    fn source_type(&self) -> FlagType {
        self.source.clone()
    }

    fn target_type(&self) -> FlagType {
        self.target.clone()
    }

    fn apply(&self, flag: &Flag) -> Result<Flag> {
        self.eval(flag)
    }
}

/// Row `j` is `Σ_c e_{i'_c(j)}`, dropping the indices `0` and `q`.
pub fn picard_pullback(emb: &DiagonalEmbedding) -> PicardPullback {
    PicardPullback::new(emb.graph.q - 1, pullback_rows(&emb.graph)).expect("rows have length q - 1")
}

/// The rows of the Picard pullback, read off a bare graph.
pub fn pullback_rows(g: &EGraph) -> Vec<Vec<u64>> {
    (1..g.p)
        .map(|j| {
            let mut row = vec![0u64; g.q - 1];
            for c in 1..=g.d {
                let i = g.last_left_at_or_above(j, c);
                if (1..g.q).contains(&i) {
                    row[i - 1] += 1;
                }
            }
            row
        })
        .collect()
}

/// Whenever `r_j` and `r_{j'}` (`j < j'`) both meet colour `c`, every ordinary
/// edge arriving at `r_{j''}` for `j ≤ j'' < j'` has colour `c`.
pub fn is_linear_graph(emb: &DiagonalEmbedding) -> bool {
    is_linear_egraph(&emb.graph)
}

/// All ordinary edges share one colour.
pub fn is_standard_extension_graph(emb: &DiagonalEmbedding) -> bool {
    is_standard_extension_egraph(&emb.graph)
}

/// The linearity criterion on a bare graph; it does not depend on the source type.
pub fn is_linear_egraph(g: &EGraph) -> bool {
    let Ok((_, ordinary)) = partition_edges(g) else { return false };
    (1..=g.d).all(|c| {
        let rights: Vec<usize> = g.edges_of_colour(c).map(|e| e.right).collect();
        let (Some(&lo), Some(&hi)) = (rights.iter().min(), rights.iter().max()) else {
            return true;
        };
        ordinary.iter().all(|e| !(lo..hi).contains(&e.right) || e.colour == c)
    })
}

pub fn is_standard_extension_egraph(g: &EGraph) -> bool {
    let Ok((_, ordinary)) = partition_edges(g) else { return false };
    ordinary.windows(2).all(|w| w[0].colour == w[1].colour)
}

/// `C_j = ⊕ W^{(c)}` over the colours whose bounding edge ends at or above `r_j`.
pub fn constant_spaces(emb: &DiagonalEmbedding) -> Vec<RatSubspace> {
    let g = &emb.graph;
    let m = emb.m();
    (1..g.p)
        .map(|j| {
            let parts: Vec<RatSubspace> = (1..=g.d)
                .map(|c| {
                    let bound = g.bounding_edge(c).expect("valid graphs have every bounding edge");
                    if bound.right <= j {
                        RatSubspace::full(m)
                    } else {
                        RatSubspace::zero(m)
                    }
                })
                .collect();
            RatSubspace::block_sum(&parts).expect("blocks share the dimension m")
        })
        .collect()
}

/// Colours ordered by the right end of their bounding edge.
pub fn bounding_order(emb: &DiagonalEmbedding) -> Vec<usize> {
    let g = &emb.graph;
    let mut colours: Vec<usize> = (1..=g.d).collect();
    colours.sort_by_key(|&c| g.bounding_edge(c).map(|e| e.right));
    colours
}

/// Whether `U_Q ⊂ U_P`: distinct elements of the image of `β` differ in every
/// slot. The equivalent graph condition (every left vertex has `d` edges) is
/// checked alongside.
pub fn unipotent_inclusion(alpha: &SurjectionAlpha, m: usize) -> Result<bool> {
    let r = match build_from_alpha(alpha, m)? {
        Restriction::Parabolic(r) => r,
        Restriction::NotParabolic { .. } => {
            return Err(Error::Precondition("restriction is not parabolic".into()));
        }
    };
    let by_slots = r.beta_image.iter().enumerate().all(|(x, a)| {
        r.beta_image[x + 1..].iter().all(|b| a.iter().zip(b).all(|(u, v)| u != v))
    });
    let by_graph = (1..=r.graph.q).all(|i| r.graph.left_degree(i) == r.d);
    if by_slots != by_graph {
        return Err(Error::Consistency("slot criterion and graph criterion disagree".into()));
    }
    Ok(by_slots)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivarianceReport {
    pub trials: usize,
    pub failures: usize,
    /// Indices of failing trials, in increasing order.
    pub failed_trials: Vec<usize>,
}

/// `φ(g·F) = diag(g, …, g)·φ(F)` for one pair `(g, F)`.
pub fn equivariant_at(emb: &DiagonalEmbedding, g: &RatMatrix, flag: &Flag) -> Result<bool> {
    let lhs = emb.eval(&flag.transform(g)?)?;
    let rhs = emb.eval(flag)?.transform(&g.block_diagonal(emb.d()))?;
    Ok(lhs == rhs)
}

/// Runs `trials` independent checks; trial `t` draws from the seed `seed + t`.
pub fn equivariance_check(emb: &DiagonalEmbedding, trials: usize, seed: u64) -> Result<EquivarianceReport> {
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng(seed.wrapping_add(t as u64));
            let g = random_invertible(emb.m(), &mut r);
            let f = random_flag(&emb.source, &mut r);
            equivariant_at(emb, &g, &f).map(|ok| (t, ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let failed_trials: Vec<usize> = outcomes.into_iter().filter(|&(_, ok)| !ok).map(|(t, _)| t).collect();
    Ok(EquivarianceReport { trials, failures: failed_trials.len(), failed_trials })
}
