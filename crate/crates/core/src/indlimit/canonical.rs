//! The canonical exhaustion `X_1 → X_2 → …` of the ind-variety of flags
//! compatible with a basis `e_1, e_2, …`, for flags `F_j = ⟨e_i : σ(i) ≤ j⟩`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flagcore::{FlagType, StandardExtensionData};
use crate::ratlin::{rat, RatMatrix, RatSubspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `σ(n+1)` already occurs among `σ(1..n)`: `p_{n+1} = p_n`.
    SameLength,
    /// `σ(n+1)` is new: `p_{n+1} = p_n + 1`.
    NewMember,
}

/// `X_n = Fl(F ∩ V_n)` and the map `η_n: X_n → X_{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalStep {
    pub n: usize,
    pub flag_type: FlagType,
    pub branch: Branch,
    /// Least `i_0` with `e_{n+1} ∈ F^{(n+1)}_{i_0}`.
    pub i0: usize,
    pub eta: StandardExtensionData,
}

/// Distinct values of `σ` on `1..=n`, increasing.
fn values_up_to(sigma: &[usize], n: usize) -> Vec<usize> {
    let mut v = sigma[..n].to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn flag_type_at(sigma: &[usize], n: usize) -> FlagType {
    let values = values_up_to(sigma, n);
    let dims = values[..values.len() - 1]
        .iter()
        .map(|&v| sigma[..n].iter().filter(|&&s| s <= v).count())
        .collect();
    FlagType::new(n, dims).expect("distinct values give a strict chain")
}

/// `sigma` lists `σ(1), …, σ(n_max+1)` with values in a chain `1..=c`; every
/// value of the chain must occur.
pub fn canonical_exhaustion(sigma: &[usize], n_max: usize) -> Result<Vec<CanonicalStep>> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be positive"));
    }
    if sigma.len() < n_max + 1 {
        return Err(Error::invalid(format!("need sigma on 1..={}, got {} values", n_max + 1, sigma.len())));
    }
    let sigma = &sigma[..n_max + 1];
    if sigma.contains(&0) {
        return Err(Error::invalid("sigma values start at 1"));
    }
    let c = sigma.iter().copied().max().unwrap_or(0);
    if let Some(missing) = (1..=c).find(|v| !sigma.contains(v)) {
        return Err(Error::invalid(format!("sigma misses {missing} of the chain 1..={c}")));
    }

    let mut steps = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let source = flag_type_at(sigma, n);
        let next = values_up_to(sigma, n + 1);
        let i0 = next.binary_search(&sigma[n]).expect("σ(n+1) is a value") + 1;
        let p_n = source.len() + 1;
        let branch = if next.len() == p_n { Branch::SameLength } else { Branch::NewMember };

        let w = n + 1;
        let mut epsilon = RatMatrix::zeros(w, n);
        for i in 0..n {
            epsilon.set(i, i, rat(1));
        }
        let e = RatSubspace::coordinate(w, [n]);
        let zero = RatSubspace::zero(w);
        let (kappa, z_chain): (Vec<usize>, Vec<RatSubspace>) = match branch {
            Branch::SameLength => (1..p_n).map(|j| (j, if j < i0 { zero.clone() } else { e.clone() })).unzip(),
            Branch::NewMember => (1..=p_n)
                .map(|j| if j < i0 { (j, zero.clone()) } else { (j - 1, e.clone()) })
                .unzip(),
        };
        let eta = StandardExtensionData::new(source.clone(), epsilon, z_chain, kappa, false)?;
        let expected = flag_type_at(sigma, n + 1);
        if eta.target() != &expected {
            return Err(Error::Consistency(format!(
                "eta_{n} lands in {} but the next level is {expected}",
                eta.target()
            )));
        }
        steps.push(CanonicalStep { n, flag_type: source, branch, i0, eta });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flagcore::se_eval;
    use crate::ratlin::Flag;

    #[test]
    fn constant_sigma_gives_points() {
        let steps = canonical_exhaustion(&[1; 6], 5).unwrap();
        for s in &steps {
            assert!(s.flag_type.is_empty());
            assert!(s.eta.kappa().is_empty());
            assert_eq!(s.branch, Branch::SameLength);
        }
    }

    #[test]
    fn identity_sigma_inserts_every_step() {
        let sigma: Vec<usize> = (1..=6).collect();
        let steps = canonical_exhaustion(&sigma, 5).unwrap();
        for s in &steps {
            assert_eq!(s.branch, Branch::NewMember);
            assert_eq!(s.flag_type.dims(), (1..s.n).collect::<Vec<_>>());
            // the new member is V_n itself and no Z is added
            assert_eq!(s.eta.kappa(), (1..=s.n).collect::<Vec<_>>());
            assert!(s.eta.z_chain().iter().all(RatSubspace::is_zero));
        }
    }

    #[test]
    fn alternating_sigma() {
        let sigma = [1, 2, 1, 2, 1, 2, 1];
        let steps = canonical_exhaustion(&sigma, 6).unwrap();
        assert_eq!(steps[0].branch, Branch::NewMember);
        let rest: Vec<(Branch, usize)> = steps[1..].iter().map(|s| (s.branch, s.i0)).collect();
        assert_eq!(
            rest,
            vec![
                (Branch::SameLength, 1),
                (Branch::SameLength, 2),
                (Branch::SameLength, 1),
                (Branch::SameLength, 2),
                (Branch::SameLength, 1)
            ]
        );
        // i0 = 1 adds e_{n+1} to the line, i0 = 2 leaves it alone
        assert!(!steps[1].eta.z_chain()[0].is_zero());
        assert!(steps[2].eta.z_chain()[0].is_zero());
    }

    #[test]
    fn evaluation_matches_declared_types() {
        let sigma = [2, 1, 3, 2, 1, 3, 3, 2];
        for s in canonical_exhaustion(&sigma, 7).unwrap() {
            let img = se_eval(&s.eta, &Flag::coordinate(&s.flag_type)).unwrap();
            assert_eq!(&img.flag_type(), s.eta.target());
        }
    }

    #[test]
    fn errors() {
        assert!(canonical_exhaustion(&[1, 3, 1], 2).is_err());
        assert!(canonical_exhaustion(&[1, 2], 2).is_err());
        assert!(canonical_exhaustion(&[0, 1], 1).is_err());
    }
}
