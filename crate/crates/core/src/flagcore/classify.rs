//! Recognition of standard extensions at small scale.
//!
//! For a strict standard extension the data is pinned down by the map itself:
//! the constant spaces give `Z_j` and `κ` on and before the support, the images
//! of flags through a fixed vector give `ε` up to a map into `Z_a`, and the
//! members past the support are completed greedily. Each candidate is checked
//! against the map before it is returned. The strict form is tried before the
//! dual form, so the first witness in that order is reported.

use serde::Serialize;

use super::{sample_constants, se_eval, Dualized, FlagMap, FlagType, StandardExtensionData};
use crate::error::{Error, Result};
use crate::ratlin::random::{random_flag, random_flag_through, rng, TestRng};
use crate::ratlin::{rat, unit_vector, Flag, RatMatrix, RatSubspace, Rational};

/// Largest target dimension accepted by [`classify_bruteforce`].
pub const MAX_CLASSIFY_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyConfig {
    pub seed: u64,
    pub window: usize,
    /// Random flags on which a candidate witness is compared with the map.
    pub verify_samples: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { seed: 0, window: super::DEFAULT_WINDOW, verify_samples: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "data")]
pub enum Classification {
    StrictSe(StandardExtensionData),
    SeViaDual(StandardExtensionData),
    NotSe,
}

impl Classification {
    pub fn is_se(&self) -> bool {
        !matches!(self, Classification::NotSe)
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Classification::StrictSe(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::StrictSe(_) => "StrictSE",
            Classification::SeViaDual(_) => "SEViaDual",
            Classification::NotSe => "NotSE",
        }
    }
}

pub fn classify_bruteforce(map: &(impl FlagMap + ?Sized), config: &ClassifyConfig) -> Result<Classification> {
    let target = map.target_type();
    if target.ambient_dim() > MAX_CLASSIFY_DIM {
        return Err(Error::ScaleExceeded(format!(
            "target dimension {} exceeds {MAX_CLASSIFY_DIM}",
            target.ambient_dim()
        )));
    }
    if let Some(data) = strict_witness(map, config)? {
        return Ok(Classification::StrictSe(data));
    }
    if let Some(data) = strict_witness(&Dualized(map), config)? {
        return Ok(Classification::SeViaDual(data.with_dualized(true)));
    }
    Ok(Classification::NotSe)
}

fn strict_witness(map: &(impl FlagMap + ?Sized), config: &ClassifyConfig) -> Result<Option<StandardExtensionData>> {
    let source = map.source_type();
    let mut r = rng(config.seed);
    let candidates = if source.is_empty() {
        point_candidates(map)?
    } else {
        recover_candidate(map, config, &mut r)?.into_iter().collect()
    };
    for cand in candidates {
        if agrees(map, &cand, config, &mut r)? {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

fn agrees(map: &(impl FlagMap + ?Sized), cand: &StandardExtensionData, config: &ClassifyConfig, r: &mut TestRng) -> Result<bool> {
    if *cand.target() != map.target_type() {
        return Ok(false);
    }
    let source = map.source_type();
    let mut flags = vec![Flag::coordinate(&source)];
    flags.extend((0..config.verify_samples).map(|_| random_flag(&source, r)));
    for f in &flags {
        if se_eval(cand, f)? != map.apply(f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extends `start` inside `target` by a complement of `avoid + start`.
fn grow(start: &RatSubspace, avoid: &RatSubspace, target: &RatSubspace) -> Result<RatSubspace> {
    let extra = avoid.sum(start)?.complement_in(target)?;
    let mut rows = start.basis().to_vec();
    rows.extend(extra);
    RatSubspace::span(start.ambient_dim(), rows)
}

/// Candidates for a map out of a point: one per split position, last first.
fn point_candidates(map: &(impl FlagMap + ?Sized)) -> Result<Vec<StandardExtensionData>> {
    let source = map.source_type();
    let n = source.ambient_dim();
    let image = map.apply(&Flag::coordinate(&source))?;
    let w = image.ambient_dim();
    let l = image.len();
    let mut out = Vec::new();
    for t in (0..=l).rev() {
        let lower = image.member_ext(t);
        let upper = image.member_ext(t + 1);
        let room = lower.complement_in(&upper)?;
        if room.len() < n {
            continue;
        }
        let eps_cols = &room[..n];
        let mut epsilon = RatMatrix::zeros(w, n);
        for (c, v) in eps_cols.iter().enumerate() {
            for (r, x) in v.iter().enumerate() {
                epsilon.set(r, c, x.clone());
            }
        }
        let eps_image = RatSubspace::span(w, eps_cols.to_vec())?;
        let mut z_chain = Vec::with_capacity(l);
        let mut kappa = Vec::with_capacity(l);
        let mut z = RatSubspace::zero(w);
        for j in 1..=l {
            if j <= t {
                z = image.member_ext(j);
                kappa.push(0);
            } else {
                z = grow(&z, &eps_image, &image.member_ext(j))?;
                kappa.push(1);
            }
            z_chain.push(z.clone());
        }
        if let Ok(data) = StandardExtensionData::new(source.clone(), epsilon, z_chain, kappa, false) {
            out.push(data);
        }
    }
    Ok(out)
}

fn recover_candidate(
    map: &(impl FlagMap + ?Sized),
    config: &ClassifyConfig,
    r: &mut TestRng,
) -> Result<Option<StandardExtensionData>> {
    let source = map.source_type();
    let target = map.target_type();
    let k = source.len();
    let n = source.ambient_dim();
    let w = target.ambient_dim();
    let consts = sample_constants(map, config.window, r)?;
    let support = &consts.support;
    let (Some(&a), Some(&b)) = (support.first(), support.last()) else {
        return Ok(None);
    };
    if b - a + 1 != support.len() {
        return Ok(None);
    }

    let mut kappa = Vec::with_capacity(target.len());
    for j in 1..=target.len() {
        let c = &consts.constants[j - 1];
        if j < a {
            kappa.push(0);
        } else if j <= b {
            let p = target.dims()[j - 1] - c.dim();
            match (1..=k).find(|&i| source.dim_ext(i) == p) {
                Some(i) => kappa.push(i),
                None => return Ok(None),
            }
        } else {
            kappa.push(k + 1);
        }
    }
    if kappa[a - 1] != 1 {
        return Ok(None);
    }

    // ε modulo Z_a: φ(F)_a = ε(F_1) + Z_a, so flags whose first member contains
    // v cut φ(F)_a down to ε⟨v⟩ + Z_a.
    let za = consts.constants[a - 1].clone();
    let mut probes: Vec<Vec<Rational>> = (0..n).map(|i| unit_vector(n, i)).collect();
    probes.push(vec![rat(1); n]);
    let mut lines = Vec::with_capacity(probes.len());
    for v in &probes {
        let mut error = None;
        let images = std::iter::repeat_with(|| random_flag_through(&source, v, r))
            .take(2000)
            .map_while(|f| match map.apply(&f) {
                Ok(img) => Some(img),
                Err(e) => {
                    error = Some(e);
                    None
                }
            });
        let sampled = super::support_and_constants(images, config.window);
        if let Some(e) = error {
            return Err(e);
        }
        let cut = &sampled?.constants[a - 1];
        if cut.dim() != za.dim() + 1 || !cut.contains(&za) {
            return Ok(None);
        }
        let t = cut
            .basis()
            .iter()
            .map(|u| za.reduce(u))
            .find(|u| u.iter().any(|x| *x != rat(0)))
            .expect("cut is strictly larger than Z_a");
        lines.push(t);
    }
    let t0 = lines.pop().expect("probe list is nonempty");
    let basis_cols = RatMatrix::from_rows(w, lines.clone())?.transpose();
    let Some(coeffs) = solve(&basis_cols, &t0) else {
        return Ok(None);
    };
    if coeffs.iter().any(|c| *c == rat(0)) {
        return Ok(None);
    }
    let mut epsilon = RatMatrix::zeros(w, n);
    for (i, (t, c)) in lines.iter().zip(&coeffs).enumerate() {
        for (row, x) in t.iter().enumerate() {
            epsilon.set(row, i, x * c);
        }
    }
    if epsilon.rank() != n {
        return Ok(None);
    }
    let eps_image = RatSubspace::full(n).image(&epsilon)?;

    let mut z_chain = Vec::with_capacity(target.len());
    for j in 1..=target.len() {
        let c = &consts.constants[j - 1];
        if j <= b {
            z_chain.push(c.clone());
        } else {
            let prev: &RatSubspace = z_chain.last().expect("support is nonempty");
            if !c.contains(&eps_image) {
                return Ok(None);
            }
            let z = grow(prev, &eps_image, c)?;
            z_chain.push(z);
        }
    }
    Ok(StandardExtensionData::new(source, epsilon, z_chain, kappa, false).ok())
}

/// Solves `A x = y` for a full-column-rank `A`, if a solution exists.
fn solve(a: &RatMatrix, y: &[Rational]) -> Option<Vec<Rational>> {
    let cols = a.cols();
    let rows: Vec<Vec<Rational>> = (0..a.rows())
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(y[i].clone());
            row
        })
        .collect();
    let aug = RatMatrix::from_rows(cols + 1, rows).ok()?;
    let (red, pivots) = aug.rref();
    if pivots.len() != cols || pivots.contains(&cols) {
        return None;
    }
    Some((0..cols).map(|i| red.get(i, cols).clone()).collect())
}

/// Convenience for callers holding only a flag type and a closure.
pub struct FnMap<F> {
    pub source: FlagType,
    pub target: FlagType,
    pub f: F,
}

impl<F: Fn(&Flag) -> Result<Flag>> FlagMap for FnMap<F> {
    fn source_type(&self) -> FlagType {
        self.source.clone()
    }

    fn target_type(&self) -> FlagType {
        self.target.clone()
    }

    fn apply(&self, flag: &Flag) -> Result<Flag> {
        (self.f)(flag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flagcore::se_compose;

    fn ft(n: usize, dims: &[usize]) -> FlagType {
        FlagType::new(n, dims.to_vec()).unwrap()
    }

    #[test]
    fn identity_is_strict_with_empty_z() {
        let id = StandardExtensionData::identity(ft(3, &[1, 2]));
        match classify_bruteforce(&id, &ClassifyConfig::default()).unwrap() {
            Classification::StrictSe(data) => {
                assert!(data.z_chain().iter().all(RatSubspace::is_zero));
                assert_eq!(data.kappa(), &[1, 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn recovers_shift_data() {
        let phi = StandardExtensionData::shift_from(ft(2, &[1]), 1, 1).unwrap();
        match classify_bruteforce(&phi, &ClassifyConfig::default()).unwrap() {
            Classification::StrictSe(data) => {
                assert_eq!(data.kappa(), phi.kappa());
                assert_eq!(data.z_chain(), phi.z_chain());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn recognizes_dual_form() {
        let phi = StandardExtensionData::insert_at(ft(3, &[1]), 2, 2).unwrap().with_dualized(true);
        let c = classify_bruteforce(&phi, &ClassifyConfig::default()).unwrap();
        assert_eq!(c.label(), "SEViaDual");
    }

    #[test]
    fn kappa_past_support() {
        // {V_1} ↦ {V_1, V} in Q^3: the second constant space is ε(V), not Z_2 = 0
        let eps = RatMatrix::from_i64_rows(&[vec![1, 0], vec![0, 1], vec![0, 0]]);
        let z = RatSubspace::zero(3);
        let phi = StandardExtensionData::new(ft(2, &[1]), eps, vec![z.clone(), z.clone()], vec![1, 2], false).unwrap();
        match classify_bruteforce(&phi, &ClassifyConfig::default()).unwrap() {
            Classification::StrictSe(data) => assert_eq!(data.kappa(), &[1, 2]),
            other => panic!("unexpected {other:?}"),
        }
        let b = StandardExtensionData::shift_from(phi.target().clone(), 1, 2).unwrap();
        let c = se_compose(&phi, &b).unwrap();
        assert!(classify_bruteforce(&c, &ClassifyConfig::default()).unwrap().is_strict());
    }

    #[test]
    fn point_source() {
        let target = ft(3, &[1, 2]);
        let image = Flag::coordinate(&target);
        let map = FnMap { source: FlagType::point(1), target, f: move |_: &Flag| Ok(image.clone()) };
        assert!(classify_bruteforce(&map, &ClassifyConfig::default()).unwrap().is_strict());
    }

    #[test]
    fn scale_bound() {
        let id = StandardExtensionData::identity(ft(7, &[1]));
        assert!(matches!(
            classify_bruteforce(&id, &ClassifyConfig::default()),
            Err(Error::ScaleExceeded(_))
        ));
    }
}
