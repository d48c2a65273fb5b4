//! Supernatural numbers with finite support and periodic exhaustions of them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exponent {
    Finite(u32),
    Inf,
}

impl Exponent {
    pub fn admits(self, k: u32) -> bool {
        match self {
            Exponent::Inf => true,
            Exponent::Finite(a) => k <= a,
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Prime factorization as an ordered map `p -> k`.
pub fn factorize(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// The p-adic valuation of `n` (with `v_p(0)` treated as unbounded).
/// Exponent of `p` in `n`; `n` must be positive.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// A formal product `∏ p^{α_p}` over finitely many primes, with at least one
/// infinite exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupernaturalNumber {
    factors: BTreeMap<u64, Exponent>,
}

impl SupernaturalNumber {
    pub fn new(factors: BTreeMap<u64, Exponent>) -> Result<Self> {
        for (&p, &e) in &factors {
            if !is_prime(p) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
            if e == Exponent::Finite(0) {
                return Err(Error::invalid(format!("exponent of {p} must be positive")));
            }
        }
        if !factors.values().any(|&e| e == Exponent::Inf) {
            return Err(Error::invalid("a supernatural number needs an infinite exponent"));
        }
        Ok(SupernaturalNumber { factors })
    }

    /// `∏ p^∞` over the given primes.
    pub fn infinite(primes: &[u64]) -> Result<Self> {
        Self::new(primes.iter().map(|&p| (p, Exponent::Inf)).collect())
    }

    pub fn factors(&self) -> &BTreeMap<u64, Exponent> {
        &self.factors
    }

    pub fn exponent(&self, p: u64) -> Option<Exponent> {
        self.factors.get(&p).copied()
    }

    pub fn infinite_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().filter(|(_, &e)| e == Exponent::Inf).map(|(&p, _)| p)
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| match e {
                Exponent::Inf => format!("{p}^inf"),
                Exponent::Finite(1) => p.to_string(),
                Exponent::Finite(k) => format!("{p}^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Whether the positive integer `s` is a finite divisor of `sn`.
pub fn divides_sn(s: u64, sn: &SupernaturalNumber) -> bool {
    s >= 1
        && factorize(s)
            .into_iter()
            .all(|(p, k)| sn.exponent(p).is_some_and(|e| e.admits(k)))
}

impl Serialize for SupernaturalNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Factors<'a>(&'a BTreeMap<u64, Exponent>);
        impl Serialize for Factors<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (p, e) in self.0 {
                    match e {
                        Exponent::Inf => map.serialize_entry(&p.to_string(), "inf")?,
                        Exponent::Finite(k) => map.serialize_entry(&p.to_string(), k)?,
                    }
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry("factors", &Factors(&self.factors))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for SupernaturalNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum RawExp {
            Int(u32),
            Text(String),
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            factors: BTreeMap<String, RawExp>,
        }
        let raw = Raw::deserialize(d)?;
        let mut factors = BTreeMap::new();
        for (k, v) in raw.factors {
            let p: u64 = k.parse().map_err(|_| de::Error::custom(format!("bad prime key {k:?}")))?;
            let e = match v {
                RawExp::Int(n) => Exponent::Finite(n),
                RawExp::Text(t) if t.eq_ignore_ascii_case("inf") => Exponent::Inf,
                RawExp::Text(t) => return Err(de::Error::custom(format!("bad exponent {t:?}"))),
            };
            factors.insert(p, e);
        }
        SupernaturalNumber::new(factors).map_err(de::Error::custom)
    }
}

/// The divisor chain `s_1 | s_2 | …` with `s_{n+1} = s_n · cycle[(n-1) mod len]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustionSpec {
    pub s1: u64,
    pub cycle: Vec<u64>,
}

impl ExhaustionSpec {
    pub fn new(s1: u64, cycle: Vec<u64>) -> Self {
        ExhaustionSpec { s1, cycle }
    }

    /// `s_1 = F·P^k` and cycle `[P]`, where `F` collects the finite prime powers
    /// of `sn`, `P` is the product of its infinite primes and `k` is least with
    /// `s_1 ≥ min_s1`. Fails when `sn` has no infinite prime.
    pub fn standard(sn: &SupernaturalNumber, min_s1: u64) -> Result<Self> {
        let mut finite = 1u64;
        let mut growth = 1u64;
        for (&p, &e) in sn.factors() {
            let factor = match e {
                Exponent::Finite(k) => p.checked_pow(k),
                Exponent::Inf => Some(p),
            }
            .ok_or_else(|| Error::ScaleExceeded(format!("{p}^{e:?} overflows")))?;
            let slot = if e == Exponent::Inf { &mut growth } else { &mut finite };
            *slot = slot.checked_mul(factor).ok_or_else(|| Error::ScaleExceeded("product overflows".into()))?;
        }
        if growth == 1 {
            return Err(Error::Precondition(format!("{sn} is finite and has no exhaustion")));
        }
        let mut s1 = finite;
        while s1 < min_s1 {
            s1 = s1.checked_mul(growth).ok_or_else(|| Error::ScaleExceeded("s1 overflows".into()))?;
        }
        Ok(ExhaustionSpec { s1, cycle: vec![growth] })
    }

    /// `s_{n+1} / s_n`.
    pub fn step_ratio(&self, n: usize) -> u64 {
        assert!(n >= 1, "exhaustion indices start at 1");
        self.cycle[(n - 1) % self.cycle.len()]
    }

    pub fn cycle_product(&self) -> BigUint {
        self.cycle.iter().map(|&c| BigUint::from(c)).product()
    }

    pub fn term(&self, n: usize) -> BigUint {
        assert!(n >= 1, "exhaustion indices start at 1");
        let mut s = BigUint::from(self.s1);
        for i in 1..n {
            s *= self.step_ratio(i);
        }
        s
    }

    /// `s_n` as a machine integer, failing once it no longer fits.
    pub fn term_usize(&self, n: usize) -> Result<usize> {
        assert!(n >= 1, "exhaustion indices start at 1");
        let mut s = usize::try_from(self.s1).map_err(|_| Error::ScaleExceeded("s_1".into()))?;
        for i in 1..n {
            let r = usize::try_from(self.step_ratio(i)).map_err(|_| Error::ScaleExceeded("ratio".into()))?;
            s = s
                .checked_mul(r)
                .ok_or_else(|| Error::ScaleExceeded(format!("s_{n} overflows")))?;
        }
        Ok(s)
    }

    /// Smallest `n` with `s | s_n`, if any. The search is bounded by the
    /// number of full cycles needed to reach every prime power in `s`.
    pub fn cofinality_index(&self, s: u64) -> Option<usize> {
        if self.s1 == 0 || self.cycle.is_empty() || self.cycle.contains(&0) {
            return None;
        }
        let mut cycles_needed = 0u64;
        for (p, e) in factorize(s) {
            let base = valuation(self.s1, p);
            if base >= e {
                continue;
            }
            let per_cycle: u32 = self.cycle.iter().map(|&c| valuation(c, p)).sum();
            if per_cycle == 0 {
                return None;
            }
            cycles_needed = cycles_needed.max(u64::from((e - base).div_ceil(per_cycle)));
        }
        let bound = 1 + self.cycle.len() * cycles_needed as usize;
        let target = BigUint::from(s);
        let mut term = BigUint::from(self.s1);
        for n in 1..=bound {
            if (&term % &target).is_zero() {
                return Some(n);
            }
            term *= self.step_ratio(n);
        }
        None
    }
}

/// Checks the clauses making `spec` an exhaustion of `sn`: membership of every
/// term in the divisor set, and cofinality. Divisibility `s_n | s_{n+1}` holds
/// by construction.
pub fn validate_exhaustion(spec: &ExhaustionSpec, sn: &SupernaturalNumber) -> ValidationReport {
    let mut report = ValidationReport::default();
    if spec.s1 == 0 {
        report.push("positivity", "s1 must be positive");
    }
    if spec.cycle.is_empty() {
        report.push("positivity", "cycle must be nonempty");
    }
    if spec.cycle.contains(&0) {
        report.push("positivity", "cycle entries must be positive");
    }
    if !report.is_valid() {
        return report;
    }

    let s1_factors = factorize(spec.s1);
    let mut cycle_factors: BTreeMap<u64, u32> = BTreeMap::new();
    for &c in &spec.cycle {
        for (p, k) in factorize(c) {
            *cycle_factors.entry(p).or_insert(0) += k;
        }
    }

    let used: std::collections::BTreeSet<u64> = s1_factors.keys().chain(cycle_factors.keys()).copied().collect();
    for p in used {
        if sn.exponent(p).is_none() {
            report.push("membership", format!("prime {p} does not divide the supernatural number"));
        }
    }
    for (&p, &e) in sn.factors() {
        let Exponent::Finite(alpha) = e else { continue };
        if cycle_factors.contains_key(&p) {
            report.push("membership", format!("prime {p} has exponent {alpha} but grows along the cycle"));
        } else if s1_factors.get(&p).copied().unwrap_or(0) > alpha {
            report.push("membership", format!("s1 exceeds the exponent {alpha} of prime {p}"));
        }
    }

    for (&p, &e) in sn.factors() {
        let in_cycle = cycle_factors.get(&p).copied().unwrap_or(0);
        match e {
            Exponent::Inf => {
                if in_cycle == 0 {
                    report.push("cofinality", format!("prime {p} never grows, so {p}^k is not reached"));
                }
            }
            Exponent::Finite(alpha) => {
                let reached = s1_factors.get(&p).copied().unwrap_or(0) as u64 + in_cycle as u64 * alpha as u64;
                if reached < alpha as u64 {
                    report.push("cofinality", format!("{p}^{alpha} never divides a term"));
                }
            }
        }
    }
    report
}

impl fmt::Display for ExhaustionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.cycle.iter().map(u64::to_string).collect();
        write!(f, "s1={} cycle=[{}]", self.s1, c.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_inf() -> SupernaturalNumber {
        SupernaturalNumber::infinite(&[2]).unwrap()
    }

    fn sn_with(pairs: &[(u64, Exponent)]) -> SupernaturalNumber {
        SupernaturalNumber::new(pairs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn divisibility_examples() {
        assert!(divides_sn(8, &two_inf()));
        assert!(!divides_sn(6, &two_inf()));
        let sn = sn_with(&[(2, Exponent::Inf), (3, Exponent::Finite(1))]);
        assert!(divides_sn(12, &sn));
        assert!(!divides_sn(9, &sn));
        assert!(divides_sn(1, &sn));
    }

    #[test]
    fn rejects_bad_supernaturals() {
        assert!(SupernaturalNumber::infinite(&[4]).is_err());
        assert!(SupernaturalNumber::new([(2, Exponent::Finite(3))].into()).is_err());
        assert!(SupernaturalNumber::new([(2, Exponent::Inf), (3, Exponent::Finite(0))].into()).is_err());
    }

    #[test]
    fn exhaustion_examples() {
        let both = SupernaturalNumber::infinite(&[2, 3]).unwrap();
        assert!(validate_exhaustion(&ExhaustionSpec::new(1, vec![2]), &two_inf()).is_valid());
        let r = validate_exhaustion(&ExhaustionSpec::new(1, vec![2]), &both);
        assert!(r.has_clause("cofinality") && !r.has_clause("membership"));
        assert!(validate_exhaustion(&ExhaustionSpec::new(3, vec![2, 3]), &both).is_valid());
        let r = validate_exhaustion(&ExhaustionSpec::new(1, vec![6]), &two_inf());
        assert!(r.has_clause("membership"));
        assert!(validate_exhaustion(&ExhaustionSpec::new(0, vec![2]), &two_inf()).has_clause("positivity"));
    }

    #[test]
    fn finite_exponent_clauses() {
        let sn = sn_with(&[(2, Exponent::Inf), (3, Exponent::Finite(2))]);
        assert!(validate_exhaustion(&ExhaustionSpec::new(9, vec![2]), &sn).is_valid());
        assert!(validate_exhaustion(&ExhaustionSpec::new(3, vec![2]), &sn).has_clause("cofinality"));
        assert!(validate_exhaustion(&ExhaustionSpec::new(27, vec![2]), &sn).has_clause("membership"));
        assert!(validate_exhaustion(&ExhaustionSpec::new(9, vec![6]), &sn).has_clause("membership"));
    }

    #[test]
    fn step_ratio_examples() {
        assert_eq!(ExhaustionSpec::new(1, vec![2]).step_ratio(5), 2);
        assert_eq!(ExhaustionSpec::new(1, vec![4, 2]).step_ratio(1), 4);
        assert_eq!(ExhaustionSpec::new(2, vec![6]).step_ratio(3), 6);
        assert_eq!(ExhaustionSpec::new(3, vec![2, 3]).term(4), BigUint::from(36u32));
    }

    #[test]
    fn cofinality_index_examples() {
        let spec = ExhaustionSpec::new(3, vec![2, 3]);
        assert_eq!(spec.cofinality_index(1), Some(1));
        assert_eq!(spec.cofinality_index(2), Some(2));
        assert_eq!(spec.cofinality_index(8), Some(6));
        assert_eq!(spec.cofinality_index(5), None);
    }

    #[test]
    fn json_shapes() {
        let sn = sn_with(&[(2, Exponent::Inf), (3, Exponent::Finite(4))]);
        let s = serde_json::to_string(&sn).unwrap();
        assert_eq!(s, r#"{"factors":{"2":"inf","3":4}}"#);
        assert_eq!(serde_json::from_str::<SupernaturalNumber>(&s).unwrap(), sn);
        let spec: ExhaustionSpec = serde_json::from_str(r#"{"s1":1,"cycle":[2]}"#).unwrap();
        assert_eq!(spec, ExhaustionSpec::new(1, vec![2]));
        assert!(serde_json::from_str::<SupernaturalNumber>(r#"{"factors":{"2":4}}"#).is_err());
    }

}
