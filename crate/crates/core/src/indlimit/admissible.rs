//! Admissibility of a generalized flag type for a supernatural number: a
//! numbering `k_1, k_2, …` of the finite quotients matched to an exhaustion
//! `s_1 | s_2 | …` with `dim k_n / s_n ∈ {1, …, s_{n+1}/s_n - 1}` and
//! `s_n | dim a` for every quotient `a` not yet numbered.

use std::collections::HashMap;

use serde::Serialize;

use super::{GeneralizedFlagType, Tail};
use crate::supernat::{divides_sn, is_prime, valuation, validate_exhaustion, ExhaustionSpec, SupernaturalNumber};

/// Default bound on `s_1` and on the cycle entries searched.
pub const DEFAULT_BOUND: u64 = 64;

/// Minimum number of steps every certificate is rechecked on.
const VERIFY_STEPS: usize = 12;

/// Steps simulated per candidate exhaustion before giving up on it.
const MAX_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "from", rename_all = "snake_case")]
pub enum PickSource {
    /// Position in the list of finite quotients.
    Finite { index: usize },
    /// The `k`-th quotient of the tail rule.
    Tail { k: u32 },
}

/// The quotient `k_n` numbered at step `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pick {
    pub n: usize,
    pub dim: u64,
    pub source: PickSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdmissibilityCertificate {
    /// Finitely many finite quotients: nothing to number.
    Finite { verified_prefix_length: usize },
    /// `prefix` lists the picks of steps `1..period_start + period`. Past it,
    /// step `n` takes tail quotient `k(n - period) + tail_shift`.
    Periodic {
        exhaustion: ExhaustionSpec,
        prefix: Vec<Pick>,
        period_start: usize,
        period: usize,
        tail_shift: u32,
        verified_prefix_length: usize,
    },
}

/// No exhaustion works: `witness = prime^e` divides some `s_n` by
/// cofinality, yet no tail quotient is divisible by it, while every `s_n`
/// must divide all but finitely many tail quotients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonAdmissibilityProof {
    pub tail: Tail,
    pub prime: u64,
    pub witness: u64,
    pub verified_prefix_length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Admissibility {
    Admissible { certificate: AdmissibilityCertificate },
    NotAdmissible { proof: NonAdmissibilityProof },
    Unknown { bound: u64, candidates_searched: usize },
}

fn pick_dim(gft: &GeneralizedFlagType, source: PickSource) -> Option<u64> {
    match source {
        PickSource::Finite { index } => gft.finite_quotients().get(index).copied(),
        PickSource::Tail { k } => gft.tail()?.dim(k).and_then(|d| u64::try_from(d).ok()),
    }
}

impl AdmissibilityCertificate {
    pub fn verified_prefix_length(&self) -> usize {
        match self {
            AdmissibilityCertificate::Finite { verified_prefix_length }
            | AdmissibilityCertificate::Periodic { verified_prefix_length, .. } => *verified_prefix_length,
        }
    }

    /// The pick at step `n`, following the tail rule past the prefix.
    pub fn pick_at(&self, gft: &GeneralizedFlagType, n: usize) -> Option<Pick> {
        let AdmissibilityCertificate::Periodic { prefix, period, tail_shift, .. } = self else { return None };
        if n == 0 {
            return None;
        }
        if let Some(p) = prefix.get(n - 1) {
            return Some(*p);
        }
        let PickSource::Tail { k } = self.pick_at(gft, n - period)?.source else { return None };
        let source = PickSource::Tail { k: k.checked_add(*tail_shift)? };
        Some(Pick { n, dim: pick_dim(gft, source)?, source })
    }

    /// Recomputes both clauses on steps `1..=steps` and, at the end, that every
    /// finite quotient is numbered and the tail is consumed without gaps.
    pub fn verify(&self, gft: &GeneralizedFlagType, steps: usize) -> Result<(), String> {
        let AdmissibilityCertificate::Periodic { exhaustion, .. } = self else {
            return if gft.tail().is_none() { Ok(()) } else { Err("the flag type has a tail".into()) };
        };
        let tail = gft.tail();
        let finite = gft.finite_quotients();
        let mut used_finite = vec![false; finite.len()];
        let mut used_tail: Vec<bool> = Vec::new();
        let mut s: u128 = u128::from(exhaustion.s1);
        for n in 1..=steps {
            let ratio = u128::from(exhaustion.step_ratio(n));
            let pick = self.pick_at(gft, n).ok_or_else(|| format!("no pick at step {n}"))?;
            if pick.n != n || pick_dim(gft, pick.source) != Some(pick.dim) {
                return Err(format!("step {n}: pick does not match the flag type"));
            }
            match pick.source {
                PickSource::Finite { index } => {
                    if std::mem::replace(&mut used_finite[index], true) {
                        return Err(format!("step {n}: finite quotient {index} numbered twice"));
                    }
                }
                PickSource::Tail { k } => {
                    let k = k as usize;
                    if used_tail.len() <= k {
                        used_tail.resize(k + 1, false);
                    }
                    if std::mem::replace(&mut used_tail[k], true) {
                        return Err(format!("step {n}: tail quotient {k} numbered twice"));
                    }
                }
            }
            let dim = u128::from(pick.dim);
            if dim % s != 0 || !(1..ratio).contains(&(dim / s)) {
                return Err(format!("step {n}: {dim}/{s} is not in 1..{ratio}"));
            }
            for (i, &d) in finite.iter().enumerate() {
                if !used_finite[i] && u128::from(d) % s != 0 {
                    return Err(format!("step {n}: s_n = {s} does not divide the finite quotient {d}"));
                }
            }
            if let Some(t) = tail {
                // unnumbered tail quotients below the first fresh one, then the
                // fresh one, whose multiples make up the rest of a geometric tail
                let fresh = used_tail.len();
                let pending = (0..fresh).filter(|&k| !used_tail[k]).chain([fresh]);
                for k in pending {
                    let d = t.dim(k as u32).ok_or("tail dimension overflows")?;
                    if d % s != 0 {
                        return Err(format!("step {n}: s_n = {s} does not divide tail quotient {k} of dim {d}"));
                    }
                }
            }
            s = s.checked_mul(ratio).ok_or("s_n overflows")?;
        }
        if let Some(i) = used_finite.iter().position(|u| !u) {
            return Err(format!("finite quotient {i} is never numbered"));
        }
        if used_tail.iter().any(|u| !u) {
            return Err("the tail is numbered with gaps".into());
        }
        Ok(())
    }
}

impl NonAdmissibilityProof {
    /// Rechecks the arithmetic the argument rests on: `witness = prime^e`
    /// with `prime` infinite in `sn`, and `witness` dividing no tail quotient.
    pub fn verify(&self, gft: &GeneralizedFlagType, sn: &SupernaturalNumber) -> Result<(), String> {
        if gft.tail() != Some(self.tail) {
            return Err("proof is about another tail".into());
        }
        if !is_prime(self.prime) || sn.exponent(self.prime) != Some(crate::supernat::Exponent::Inf) {
            return Err(format!("{} is not an infinite prime of {sn}", self.prime));
        }
        let e = valuation(self.witness, self.prime);
        if self.prime.checked_pow(e) != Some(self.witness) || !divides_sn(self.witness, sn) {
            return Err("witness is not a power of the prime dividing sn".into());
        }
        let (base, ratio) = match self.tail {
            Tail::Geometric { base, ratio } => (base, ratio),
            Tail::Constant { c } => (c, 1),
        };
        // the p-adic valuation of base·ratio^k is that of base for every k
        if ratio % self.prime == 0 || base % self.witness == 0 {
            return Err("the witness divides some tail quotient".into());
        }
        for k in 0..self.verified_prefix_length as u32 {
            let d = self.tail.dim(k).ok_or("tail dimension overflows")?;
            if d % u128::from(self.witness) == 0 {
                return Err(format!("witness divides tail quotient {k}"));
            }
        }
        Ok(())
    }
}

fn divisibility_proof(tail: Tail, sn: &SupernaturalNumber) -> Option<NonAdmissibilityProof> {
    let (base, ratio) = match tail {
        Tail::Geometric { base, ratio } => (base, ratio),
        Tail::Constant { c } => (c, 1),
    };
    let prime = sn.infinite_primes().find(|p| ratio % p != 0)?;
    let witness = prime.checked_pow(valuation(base, prime) + 1)?;
    Some(NonAdmissibilityProof { tail, prime, witness, verified_prefix_length: VERIFY_STEPS })
}

/// Greedy run along `spec`: at each step number the smallest quotient with
/// `dim/s_n` in range, preferring finite ones. Succeeds once the state, scaled
/// by `s_n`, repeats at the same phase of the cycle.
fn greedy_run(gft: &GeneralizedFlagType, tail: Tail, spec: &ExhaustionSpec) -> Option<(Vec<Pick>, usize, usize, u32)> {
    let finite = gft.finite_quotients();
    let mut remaining: Vec<usize> = (0..finite.len()).collect();
    let mut head: u32 = 0;
    let mut s: u64 = spec.s1;
    let mut picks = Vec::new();
    let mut seen: HashMap<(usize, Vec<u64>, u64), (usize, u32)> = HashMap::new();
    for n in 1..=MAX_STEPS {
        let head_dim = u64::try_from(tail.dim(head)?).ok()?;
        if head_dim % s != 0 || remaining.iter().any(|&i| finite[i] % s != 0) {
            return None;
        }
        let mut scaled: Vec<u64> = remaining.iter().map(|&i| finite[i] / s).collect();
        scaled.sort_unstable();
        let key = ((n - 1) % spec.cycle.len(), scaled, head_dim / s);
        if let Some(&(start, head_then)) = seen.get(&key) {
            return Some((picks, start, n - start, head - head_then));
        }
        seen.insert(key, (n, head));

        let ratio = spec.step_ratio(n);
        let fits = |d: u64| (1..ratio).contains(&(d / s));
        let finite_pick = remaining
            .iter()
            .enumerate()
            .filter(|(_, &i)| fits(finite[i]))
            .min_by_key(|(_, &i)| (finite[i], i));
        let pick = match finite_pick {
            Some((pos, &i)) if finite[i] <= head_dim || !fits(head_dim) => {
                remaining.remove(pos);
                Pick { n, dim: finite[i], source: PickSource::Finite { index: i } }
            }
            _ if fits(head_dim) => {
                head += 1;
                Pick { n, dim: head_dim, source: PickSource::Tail { k: head - 1 } }
            }
            _ => return None,
        };
        picks.push(pick);
        s = s.checked_mul(ratio)?;
    }
    None
}

/// Candidate exhaustions with `s_1 ≤ bound` and cycles of length one or two
/// with entries in `2..=bound`, by `s_1` and then lexicographically by cycle.
fn candidates(sn: &SupernaturalNumber, bound: u64) -> impl Iterator<Item = ExhaustionSpec> + '_ {
    let mut cycles: Vec<Vec<u64>> = (2..=bound).map(|a| vec![a]).collect();
    cycles.extend((2..=bound).flat_map(|a| (2..=bound).map(move |b| vec![a, b])));
    cycles.sort();
    cycles.retain(|c| validate_exhaustion(&ExhaustionSpec::new(1, c.clone()), sn).is_valid());
    (1..=bound)
        .flat_map(move |s1| cycles.clone().into_iter().map(move |c| ExhaustionSpec::new(s1, c)))
        .filter(move |spec| validate_exhaustion(spec, sn).is_valid())
}

pub fn admissible(gft: &GeneralizedFlagType, sn: &SupernaturalNumber, bound: u64) -> Admissibility {
    let Some(tail) = gft.tail() else {
        return Admissibility::Admissible {
            certificate: AdmissibilityCertificate::Finite { verified_prefix_length: 0 },
        };
    };
    if let Some(proof) = divisibility_proof(tail, sn) {
        return Admissibility::NotAdmissible { proof };
    }
    let mut searched = 0;
    for spec in candidates(sn, bound) {
        searched += 1;
        let Some((prefix_picks, start, period, shift)) = greedy_run(gft, tail, &spec) else { continue };
        let mut prefix = prefix_picks;
        prefix.truncate(start + period - 1);
        let steps = VERIFY_STEPS.max(start + 2 * period);
        let mut certificate = AdmissibilityCertificate::Periodic {
            exhaustion: spec,
            prefix,
            period_start: start,
            period,
            tail_shift: shift,
            verified_prefix_length: 0,
        };
        if certificate.verify(gft, steps).is_err() {
            continue;
        }
        if let AdmissibilityCertificate::Periodic { verified_prefix_length, .. } = &mut certificate {
            *verified_prefix_length = steps;
        }
        return Admissibility::Admissible { certificate };
    }
    Admissibility::Unknown { bound, candidates_searched: searched }
}
