//! Two-column coloured bipartite graphs describing one diagonal embedding step.
//!
//! Vertices are numbered from 1, top to bottom: `l_1..l_q` on the left and
//! `r_1..r_p` on the right. Edges carry a colour in `1..=d`.

mod alpha;
mod dot;

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use alpha::{build_from_alpha, flag_alpha, flag_beta, surjections, ParabolicRestriction, Restriction, SurjectionAlpha};
pub use dot::{parse_dot, to_dot, PALETTE};

use crate::error::{Error, Result};
use crate::report::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub colour: usize,
}

impl Edge {
    pub fn new(left: usize, right: usize, colour: usize) -> Self {
        Edge { left, right, colour }
    }

    fn sort_key(&self) -> (usize, usize, usize) {
        (self.colour, self.left, self.right)
    }
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.left, self.right, self.colour].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [left, right, colour] = <[usize; 3]>::deserialize(d)?;
        Ok(Edge { left, right, colour })
    }
}

/// An E-graph candidate. Construction does not enforce the defining clauses;
/// use [`validate`] for that.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EGraph {
    pub q: usize,
    pub p: usize,
    pub d: usize,
    #[serde(deserialize_with = "sorted_edges")]
    edges: Vec<Edge>,
}

fn sorted_edges<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Edge>, D::Error> {
    let mut edges = Vec::<Edge>::deserialize(d)?;
    edges.sort_by_key(Edge::sort_key);
    Ok(edges)
}

impl EGraph {
    pub fn new(q: usize, p: usize, d: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(Edge::sort_key);
        EGraph { q, p, d, edges }
    }

    pub fn from_triples(q: usize, p: usize, d: usize, triples: &[(usize, usize, usize)]) -> Self {
        Self::new(q, p, d, triples.iter().map(|&(l, r, c)| Edge::new(l, r, c)).collect())
    }

    /// The graph with `q = p` and colour-1 edges `(i, i)`.
    pub fn straight(q: usize) -> Self {
        Self::new(q, q, 1, (1..=q).map(|i| Edge::new(i, i, 1)).collect())
    }

    /// A validated graph.
    pub fn checked(q: usize, p: usize, d: usize, edges: Vec<Edge>) -> Result<Self> {
        let g = Self::new(q, p, d, edges);
        let report = validate(&g);
        if !report.is_valid() {
            return Err(Error::invalid(format!("not an E-graph: {report}")));
        }
        Ok(g)
    }

    /// Edges sorted by `(colour, left, right)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edges_of_colour(&self, c: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.colour == c)
    }

    pub fn edge_at_right(&self, j: usize, c: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.right == j && e.colour == c)
    }

    pub fn left_degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.left == i).count()
    }

    /// `i'_c(j)`: left end of the last colour-`c` edge arriving at or above `r_j`,
    /// or 0 if there is none.
    pub fn last_left_at_or_above(&self, j: usize, c: usize) -> usize {
        self.edges_of_colour(c)
            .filter(|e| e.right <= j)
            .map(|e| e.left)
            .max()
            .unwrap_or(0)
    }

    /// The bounding edge of colour `c` (the one through `l_q`).
    pub fn bounding_edge(&self, c: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.left == self.q && e.colour == c)
    }
}

pub fn validate(g: &EGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    if g.q == 0 || g.p == 0 || g.d == 0 {
        report.push("index", format!("vertex and colour counts must be positive (q={}, p={}, d={})", g.q, g.p, g.d));
        return report;
    }
    let mut in_range = Vec::new();
    for e in &g.edges {
        if !(1..=g.q).contains(&e.left) || !(1..=g.p).contains(&e.right) || !(1..=g.d).contains(&e.colour) {
            report.push("index", format!("edge ({}, {}, {}) is out of range", e.left, e.right, e.colour));
        } else {
            in_range.push(*e);
        }
    }

    for i in 1..=g.q {
        if !in_range.iter().any(|e| e.left == i) {
            report.push("coverage", format!("l{i} is isolated"));
        }
    }
    for j in 1..=g.p {
        if !in_range.iter().any(|e| e.right == j) {
            report.push("coverage", format!("r{j} is isolated"));
        }
    }

    let mut seen_left = BTreeSet::new();
    let mut seen_right = BTreeSet::new();
    for e in &in_range {
        if !seen_left.insert((e.left, e.colour)) {
            report.push("colour", format!("l{} has several edges of colour {}", e.left, e.colour));
        }
        if !seen_right.insert((e.right, e.colour)) {
            report.push("colour", format!("r{} has several edges of colour {}", e.right, e.colour));
        }
    }
    report.violations.dedup();

    let at_bottom: Vec<&Edge> = in_range.iter().filter(|e| e.left == g.q).collect();
    let colours: BTreeSet<usize> = at_bottom.iter().map(|e| e.colour).collect();
    if at_bottom.len() != g.d || colours.len() != g.d {
        report.push(
            "bounding",
            format!("l{} must carry exactly one edge of each of the {} colours", g.q, g.d),
        );
    }

    for (x, e) in in_range.iter().enumerate() {
        for f in &in_range[x + 1..] {
            if e.colour == f.colour && e.left != f.left && (e.left < f.left) != (e.right < f.right) {
                report.push(
                    "crossing",
                    format!(
                        "colour-{} edges (l{}, r{}) and (l{}, r{}) cross",
                        e.colour, e.left, e.right, f.left, f.right
                    ),
                );
            }
        }
    }
    report
}

/// Splits edges into bounding edges (through `l_q`) and ordinary edges.
pub fn partition_edges(g: &EGraph) -> Result<(Vec<Edge>, Vec<Edge>)> {
    let report = validate(g);
    if !report.is_valid() {
        return Err(Error::invalid(format!("not an E-graph: {report}")));
    }
    Ok(g.edges.iter().partition(|e| e.left == g.q))
}
