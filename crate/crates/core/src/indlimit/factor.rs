//! Splitting linear E-graphs, and linear s-graphs, into single-colour factors.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::SnGraph;
use crate::diagembed::{is_linear_egraph, is_standard_extension_egraph, pullback_rows};
use crate::egraph::{partition_edges, validate, EGraph, Edge};
use crate::error::{Error, Result};

/// One factor of a linear graph. `left_map[i - 1]` and `right_map[j - 1]` are
/// the vertices of the original graph behind the factor's `l_i` and `r_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factor {
    /// The colour of the factor's ordinary edges; `None` if it has none.
    pub colour: Option<usize>,
    pub graph: EGraph,
    pub left_map: Vec<usize>,
    pub right_map: Vec<usize>,
}

impl Factor {
    fn whole(g: &EGraph, colour: Option<usize>) -> Self {
        Factor { colour, graph: g.clone(), left_map: (1..=g.q).collect(), right_map: (1..=g.p).collect() }
    }
}

/// One factor per colour carrying ordinary edges. The factor of colour `c`
/// keeps the ordinary edges of colour `c`, the left vertices they leave, the
/// right vertices from the first of them up to the bounding edge of `c`, and
/// `l_q`, `r_p`. Every bounding edge moves to the first kept right vertex at
/// or below its end. A graph with at most one such colour is its own factor.
pub fn factor_linear_egraph(g: &EGraph) -> Result<Vec<Factor>> {
    let report = validate(g);
    if !report.is_valid() {
        return Err(Error::invalid(format!("not an E-graph: {report}")));
    }
    if !is_linear_egraph(g) {
        return Err(Error::Precondition("the graph is not linear".into()));
    }
    let (bounding, ordinary) = partition_edges(g)?;
    let colours: BTreeSet<usize> = ordinary.iter().map(|e| e.colour).collect();
    if colours.len() <= 1 {
        return Ok(vec![Factor::whole(g, colours.first().copied())]);
    }

    let mut factors = Vec::with_capacity(colours.len());
    for &c in &colours {
        let own: Vec<&Edge> = ordinary.iter().filter(|e| e.colour == c).collect();
        let bound = bounding.iter().find(|e| e.colour == c).expect("every colour has a bounding edge");
        let first = own.iter().map(|e| e.right).min().expect("colour has an ordinary edge");

        let mut left_map: Vec<usize> = own.iter().map(|e| e.left).collect::<BTreeSet<_>>().into_iter().collect();
        left_map.push(g.q);
        let mut right_map: Vec<usize> = (first..bound.right).collect();
        right_map.push(g.p);
        let left_index = |i: usize| left_map.binary_search(&i).expect("kept left vertex") + 1;

        let mut edges: Vec<Edge> = own.iter().map(|e| Edge::new(left_index(e.left), 0, c)).collect();
        for (edge, e) in edges.iter_mut().zip(&own) {
            edge.right = right_map.binary_search(&e.right).expect("ordinary edges end in range") + 1;
        }
        for b in &bounding {
            let at = right_map.partition_point(|&j| j < b.right) + 1;
            edges.push(Edge::new(left_map.len(), at, b.colour));
        }
        let graph = EGraph::checked(left_map.len(), right_map.len(), g.d, edges)
            .map_err(|e| Error::Consistency(format!("factor of colour {c} is not an E-graph: {e}")))?;
        if !is_standard_extension_egraph(&graph) {
            return Err(Error::Consistency(format!("factor of colour {c} has mixed ordinary edges")));
        }
        factors.push(Factor { colour: Some(c), graph, left_map, right_map });
    }
    Ok(factors)
}

/// Each pullback row of `g` is the sum of the matching factor rows, with
/// factor columns placed at the original left vertices.
pub fn pullback_additivity(g: &EGraph, factors: &[Factor]) -> bool {
    let rows = pullback_rows(g);
    let factor_rows: Vec<Vec<Vec<u64>>> = factors.iter().map(|f| pullback_rows(&f.graph)).collect();
    (1..g.p).all(|j| {
        let mut sum = vec![0u64; g.q - 1];
        for (f, frows) in factors.iter().zip(&factor_rows) {
            let Ok(jf) = f.right_map.binary_search(&j) else { continue };
            let Some(row) = frows.get(jf) else { continue };
            for (i, &v) in row.iter().enumerate() {
                sum[f.left_map[i] - 1] += v;
            }
        }
        sum == rows[j - 1]
    })
}

/// Factors levels `1..=prefix_len` and threads them into separate s-graph
/// prefixes. `threading[n - 1]` sends each colour class of level `n` to a
/// factor id; the factor fed at level `n + 1` must start on exactly the right
/// vertices its predecessor ended on. Factors are returned in order of id.
pub fn decompose_sn_graph(
    sg: &SnGraph,
    prefix_len: usize,
    threading: &[BTreeMap<usize, usize>],
) -> Result<Vec<SnGraph>> {
    if prefix_len == 0 {
        return Err(Error::invalid("prefix_len must be positive"));
    }
    if threading.len() < prefix_len {
        return Err(Error::invalid(format!("threading covers {} of {prefix_len} levels", threading.len())));
    }
    let mut levels: BTreeMap<usize, Vec<EGraph>> = BTreeMap::new();
    let mut previous: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for n in 1..=prefix_len {
        let g = sg.level(n).ok_or_else(|| Error::invalid(format!("level {n} is not defined")))?;
        if !is_linear_egraph(g) {
            return Err(Error::Precondition(format!("level {n} is not linear")));
        }
        let factors = factor_linear_egraph(g)?;

        let mut owner = vec![0usize; g.q];
        for f in &factors {
            for &i in &f.left_map[..f.left_map.len() - 1] {
                owner[i - 1] += 1;
            }
        }
        if let Some(i) = owner.iter().position(|&k| k > 1) {
            return Err(Error::Precondition(format!("level {n}: l_{} lies in two factors", i + 1)));
        }
        let kept: BTreeSet<usize> = factors.iter().flat_map(|f| f.right_map.iter().copied()).collect();
        if let Some(j) = (1..g.p).find(|j| !kept.contains(j)) {
            return Err(Error::Precondition(format!("level {n}: r_{j} is a constant member")));
        }

        let declared = &threading[n - 1];
        let classes: BTreeSet<usize> = factors.iter().map(|f| f.colour.unwrap_or(1)).collect();
        let keys: BTreeSet<usize> = declared.keys().copied().collect();
        let ids: BTreeSet<usize> = declared.values().copied().collect();
        if keys != classes || ids.len() != declared.len() {
            return Err(Error::invalid(format!(
                "inconsistent threading at level {n}: colour classes {classes:?}, declared {declared:?}"
            )));
        }
        if n > 1 && ids != previous.keys().copied().collect() {
            return Err(Error::invalid(format!("inconsistent threading at level {n}: factor ids change")));
        }

        let mut current = BTreeMap::new();
        for f in &factors {
            let id = declared[&f.colour.unwrap_or(1)];
            if let Some(before) = previous.get(&id) {
                if before != &f.left_map {
                    return Err(Error::invalid(format!(
                        "inconsistent threading at level {n}: factor {id} ended on {before:?} but starts on {:?}",
                        f.left_map
                    )));
                }
            }
            current.insert(id, f.right_map.clone());
            levels.entry(id).or_default().push(f.graph.clone());
        }
        previous = current;
    }
    levels
        .into_values()
        .map(|prefix| SnGraph::new(sg.exhaustion().clone(), prefix, None))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::egraph::{build_from_alpha, surjections};
    use crate::indlimit::line_hyperplane_sn_graph;
    use crate::supernat::ExhaustionSpec;

    fn thread(pairs: &[(usize, usize)], levels: usize) -> Vec<BTreeMap<usize, usize>> {
        vec![pairs.iter().copied().collect(); levels]
    }

    #[test]
    fn monochromatic_graphs_are_their_own_factor() {
        let straight = EGraph::straight(4);
        let f = factor_linear_egraph(&straight).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].graph, straight);
        // Grassmannian into a larger one, the new block entering at r_2
        let b = EGraph::from_triples(3, 4, 2, &[(1, 1, 1), (2, 3, 1), (3, 4, 1), (3, 2, 2)]);
        assert!(validate(&b).is_valid());
        assert_eq!(factor_linear_egraph(&b).unwrap()[0].graph, b);
    }

    #[test]
    fn line_hyperplane_level() {
        let g = line_hyperplane_sn_graph().sn_graph.prefix()[0].clone();
        let f = factor_linear_egraph(&g).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].graph, EGraph::from_triples(2, 2, 2, &[(1, 1, 1), (2, 2, 1), (2, 2, 2)]));
        assert_eq!(f[1].graph, EGraph::from_triples(2, 2, 2, &[(1, 1, 2), (2, 1, 1), (2, 2, 2)]));
        assert_eq!((f[0].left_map.clone(), f[0].right_map.clone()), (vec![1, 3], vec![1, 3]));
        assert_eq!((f[1].left_map.clone(), f[1].right_map.clone()), (vec![2, 3], vec![2, 3]));
        assert!(pullback_additivity(&g, &f));
    }

    #[test]
    fn shared_left_vertex_and_empty_row() {
        let g = build_from_alpha(&crate::egraph::SurjectionAlpha::new(vec![1, 2, 3, 4]).unwrap(), 2)
            .unwrap()
            .parabolic()
            .unwrap()
            .graph
            .clone();
        let f = factor_linear_egraph(&g).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].left_map, f[1].left_map);
        assert!(pullback_additivity(&g, &f));
    }

    #[test]
    fn every_linear_restriction_factors() {
        let mut seen = 0;
        for n in 2..=6 {
            for alpha in surjections(n) {
                for d in [2, 3] {
                    if n % d != 0 {
                        continue;
                    }
                    let Ok(r) = build_from_alpha(&alpha, n / d) else { continue };
                    let Some(r) = r.parabolic() else { continue };
                    if !is_linear_egraph(&r.graph) {
                        assert!(factor_linear_egraph(&r.graph).is_err());
                        continue;
                    }
                    let f = factor_linear_egraph(&r.graph).unwrap();
                    assert!(f.iter().all(|x| is_standard_extension_egraph(&x.graph)));
                    assert!(pullback_additivity(&r.graph, &f), "{alpha:?}");
                    seen += usize::from(f.len() > 1);
                }
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn decompose_line_hyperplane() {
        let r = line_hyperplane_sn_graph();
        let parts = decompose_sn_graph(&r.sn_graph, 6, &thread(&[(1, 0), (2, 1)], 6)).unwrap();
        assert_eq!(parts.len(), 2);
        for p in &parts {
            assert!(p.validate(6).is_valid());
        }
        let swapped = decompose_sn_graph(&r.sn_graph, 3, &thread(&[(1, 1), (2, 0)], 3)).unwrap();
        assert_eq!(swapped[0].prefix(), &parts[1].prefix()[..3]);
    }

    #[test]
    fn decompose_rejects_bad_threading() {
        let r = line_hyperplane_sn_graph();
        assert!(decompose_sn_graph(&r.sn_graph, 2, &thread(&[(1, 0)], 2)).is_err());
        assert!(decompose_sn_graph(&r.sn_graph, 2, &thread(&[(1, 0), (2, 0)], 2)).is_err());
        assert!(decompose_sn_graph(&r.sn_graph, 3, &thread(&[(1, 0), (2, 1)], 2)).is_err());
        let mut flipped = thread(&[(1, 0), (2, 1)], 3);
        flipped[1] = [(1, 1), (2, 0)].into_iter().collect();
        assert!(decompose_sn_graph(&r.sn_graph, 3, &flipped).is_err());
    }

    #[test]
    fn decompose_single_colour_levels() {
        let sg = SnGraph::new(ExhaustionSpec::new(3, vec![1]), vec![EGraph::straight(3)], Some(1)).unwrap();
        let parts = decompose_sn_graph(&sg, 4, &thread(&[(1, 7)], 4)).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].level(4), sg.level(4));
    }

    #[test]
    fn non_linear_level_is_rejected() {
        let a = EGraph::from_triples(3, 4, 2, &[(1, 1, 1), (2, 3, 1), (3, 4, 1), (2, 2, 2), (3, 3, 2)]);
        assert!(!is_linear_egraph(&a));
        assert!(factor_linear_egraph(&a).is_err());
        let sg = SnGraph::new(ExhaustionSpec::new(4, vec![2]), vec![a], Some(1)).unwrap();
        assert!(matches!(decompose_sn_graph(&sg, 1, &thread(&[(1, 0), (2, 1)], 1)), Err(Error::Precondition(_))));
    }
}
