//! Exhaustive comparison of the combinatorial restriction verdicts with the
//! linear-algebra oracle.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagembed::{unipotent_inclusion, DiagonalEmbedding};
use crate::egraph::{build_from_alpha, flag_alpha, flag_beta, surjections, validate, Restriction, SurjectionAlpha};
use crate::error::{Error, Result};
use crate::ratlin::{nilradical_inclusion_oracle, stabilizer_oracle};

/// Largest `n` the sweep accepts.
pub const MAX_SWEEP_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub alpha: Vec<usize>,
    pub m: usize,
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub n_max: usize,
    pub d_set: Vec<usize>,
    pub cases: usize,
    pub parabolic: usize,
    pub agreements: usize,
    /// Sorted by `(alpha, m)`.
    pub disagreements: Vec<Disagreement>,
}

/// `dim q` for the parabolic of a flag of the given quotient dimensions.
fn parabolic_dim(m: usize, quotients: &[usize]) -> usize {
    m * m - (0..quotients.len()).map(|i| quotients[i] * quotients[i + 1..].iter().sum::<usize>()).sum::<usize>()
}

fn compare(alpha: &SurjectionAlpha, m: usize) -> Result<(bool, Option<(String, String)>)> {
    let fa = flag_alpha(alpha);
    let oracle = stabilizer_oracle(&fa, m)?;
    let comb = build_from_alpha(alpha, m)?;
    let fail = |check: &str, detail: String| Ok((oracle.is_parabolic, Some((check.to_string(), detail))));
    let Restriction::Parabolic(r) = &comb else {
        if oracle.is_parabolic {
            return fail("parabolic", "combinatorics says no, the oracle says yes".into());
        }
        return Ok((false, None));
    };
    if !oracle.is_parabolic {
        return fail("parabolic", "combinatorics says yes, the oracle says no".into());
    }
    let report = validate(&r.graph);
    if !report.is_valid() {
        return fail("graph", report.to_string());
    }
    let dim = parabolic_dim(m, &r.flag_type_q.quotients());
    if dim != oracle.dim {
        return fail("dimension", format!("{dim} from the flag type, {} from the oracle", oracle.dim));
    }
    let uni = unipotent_inclusion(alpha, m)?;
    let uni_oracle = nilradical_inclusion_oracle(&fa, m)?;
    if uni != uni_oracle {
        return fail("unipotent", format!("combinatorics {uni}, oracle {uni_oracle}"));
    }
    let (emb, _) = DiagonalEmbedding::from_alpha(alpha, m)?;
    if emb.eval(&flag_beta(r))? != fa {
        return fail("eval", "the image of F_beta is not F_alpha".into());
    }
    Ok((true, None))
}

/// Every surjection with `n ≤ n_max` and every `d` in `d_set` dividing `n`.
pub fn oracle_sweep(n_max: usize, d_set: &[usize]) -> Result<SweepReport> {
    if n_max > MAX_SWEEP_N {
        return Err(Error::ScaleExceeded(format!("n_max = {n_max} exceeds {MAX_SWEEP_N}")));
    }
    if d_set.contains(&0) {
        return Err(Error::invalid("d must be positive"));
    }
    let mut d_set = d_set.to_vec();
    d_set.sort_unstable();
    d_set.dedup();
    let cases: Vec<(SurjectionAlpha, usize)> = (1..=n_max)
        .flat_map(|n| {
            let ds = d_set.clone();
            surjections(n)
                .into_iter()
                .flat_map(move |a| ds.clone().into_iter().filter(move |d| n % d == 0).map(move |d| (a.clone(), n / d)))
        })
        .collect();
    let outcomes = cases
        .par_iter()
        .map(|(a, m)| compare(a, *m).map(|(p, bad)| (p, bad.map(|(check, detail)| (a.clone(), *m, check, detail)))))
        .collect::<Result<Vec<_>>>()?;
    let parabolic = outcomes.iter().filter(|(p, _)| *p).count();
    let mut disagreements: Vec<Disagreement> = outcomes
        .into_iter()
        .filter_map(|(_, bad)| bad)
        .map(|(a, m, check, detail)| Disagreement { alpha: a.values().to_vec(), m, check, detail })
        .collect();
    disagreements.sort_by(|x, y| (&x.alpha, x.m).cmp(&(&y.alpha, y.m)));
    Ok(SweepReport {
        n_max,
        d_set,
        cases: cases.len(),
        parabolic,
        agreements: cases.len() - disagreements.len(),
        disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_agree() {
        let r = oracle_sweep(2, &[2]).unwrap();
        assert_eq!((r.cases, r.agreements), (3, 3));
        let r = oracle_sweep(4, &[2]).unwrap();
        assert!(r.disagreements.is_empty());
        assert_eq!(r.cases, 3 + 75);
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(parabolic_dim(2, &[1, 1]), 3);
        assert_eq!(parabolic_dim(3, &[3]), 9);
        assert_eq!(parabolic_dim(4, &[1, 3]), 13);
    }

    #[test]
    fn scale_bound() {
        assert!(matches!(oracle_sweep(9, &[2]), Err(Error::ScaleExceeded(_))));
    }
}
