//! Exhaustive checks over all surjections with n ≤ 6: combinatorial verdicts
//! against the linear-algebra oracle, and graph criteria against the
//! pullback and the brute-force classifier.

use std::collections::BTreeSet;

use diagflag::diagembed::{is_linear_graph, is_standard_extension_graph, picard_pullback, DiagonalEmbedding};
use diagflag::egraph::surjections;
use diagflag::sweep::oracle_sweep;
use diagflag::flagcore::{classify_bruteforce, is_linear, ClassifyConfig};
use rayon::prelude::*;

fn cases(d_set: &[usize]) -> Vec<(diagflag::egraph::SurjectionAlpha, usize)> {
    (1..=6)
        .flat_map(|n| {
            surjections(n)
                .into_iter()
                .flat_map(move |a| d_set.iter().filter(move |&&d| n % d == 0).map(move |&d| (a.clone(), n / d)))
        })
        .collect()
}

#[test]
fn restriction_verdicts_match_oracle() {
    let report = oracle_sweep(6, &[2, 3]).unwrap();
    assert!(report.disagreements.is_empty(), "{:#?}", report.disagreements);
    assert_eq!(report.agreements, report.cases);
    assert!(report.parabolic > 0 && report.parabolic < report.cases);
}

#[test]
fn pullback_columns_nonzero_and_linearity_agrees() {
    let all = cases(&[1, 2, 3, 4, 5, 6]);
    for (a, m) in &all {
        let Ok((emb, _)) = DiagonalEmbedding::from_alpha(a, *m) else { continue };
        let pb = picard_pullback(&emb);
        for col in 0..pb.source_rank {
            assert!(pb.matrix.iter().any(|row| row[col] > 0), "{:?} m={m}: column {col} is zero", a.values());
        }
        assert_eq!(is_linear_graph(&emb), is_linear(&pb), "{:?} m={m}", a.values());
        if is_standard_extension_graph(&emb) {
            assert!(is_linear_graph(&emb));
        }
    }
}

#[test]
fn zero_pullback_rows_occur() {
    let a = diagflag::egraph::SurjectionAlpha::new(vec![1, 2, 3, 4]).unwrap();
    let (emb, _) = DiagonalEmbedding::from_alpha(&a, 2).unwrap();
    let pb = picard_pullback(&emb);
    assert_eq!(pb.matrix, vec![vec![1], vec![0], vec![1]]);
    assert!(is_linear(&pb));
    assert!(!is_standard_extension_graph(&emb));
}

#[test]
fn se_graph_criterion_matches_classifier() {
    let mut seen = BTreeSet::new();
    let embs: Vec<DiagonalEmbedding> = cases(&[1, 2, 3, 6])
        .into_iter()
        .filter_map(|(a, m)| DiagonalEmbedding::from_alpha(&a, m).ok().map(|(e, _)| e))
        .filter(|e| seen.insert((e.graph().clone(), e.source().clone())))
        .collect();
    let bad: Vec<String> = embs
        .par_iter()
        .filter_map(|emb| {
            let c = classify_bruteforce(emb, &ClassifyConfig::default()).unwrap();
            let graph = is_standard_extension_graph(emb);
            (graph != c.is_se() || (graph && !c.is_strict()))
                .then(|| format!("{:?} {}: graph {graph}, classifier {}", emb.graph(), emb.source(), c.label()))
        })
        .collect();
    assert!(bad.is_empty(), "{bad:#?}");
}
