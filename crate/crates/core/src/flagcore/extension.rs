//! Standard extensions `{V_i} ↦ {ε(V_{κ(j)}) + Z_j}`, optionally followed by duality.

use serde::{Deserialize, Deserializer, Serialize};

use super::{FlagMap, FlagType};
use crate::error::{Error, Result};
use crate::ratlin::{Flag, RatMatrix, RatSubspace};

/// The datum `(ε, Z_1 ⊆ … ⊆ Z_ℓ, κ)` of a standard extension out of flags of
/// type `source`. `kappa` takes values in `0..=k+1`, where `0` and `k+1` stand
/// for the zero space and the whole source space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StandardExtensionData {
    source: FlagType,
    epsilon: RatMatrix,
    z_chain: Vec<RatSubspace>,
    kappa: Vec<usize>,
    dualized: bool,
    #[serde(skip)]
    target: FlagType,
}

impl StandardExtensionData {
    pub fn new(
        source: FlagType,
        epsilon: RatMatrix,
        z_chain: Vec<RatSubspace>,
        kappa: Vec<usize>,
        dualized: bool,
    ) -> Result<Self> {
        let k = source.len();
        let v = source.ambient_dim();
        let w = epsilon.rows();
        if epsilon.cols() != v {
            return Err(Error::AmbientMismatch(v, epsilon.cols()));
        }
        if epsilon.rank() != v {
            return Err(Error::invalid("epsilon is not injective"));
        }
        if z_chain.len() != kappa.len() {
            return Err(Error::invalid(format!(
                "z_chain has {} members but kappa has {} values",
                z_chain.len(),
                kappa.len()
            )));
        }
        for (j, z) in z_chain.iter().enumerate() {
            if z.ambient_dim() != w {
                return Err(Error::AmbientMismatch(w, z.ambient_dim()));
            }
            if j > 0 && !z.contains(&z_chain[j - 1]) {
                return Err(Error::invalid(format!("Z_{j} is not contained in Z_{}", j + 1)));
            }
        }
        let image = RatSubspace::full(v).image(&epsilon)?;
        if let Some(last) = z_chain.last() {
            if !image.intersect(last)?.is_zero() {
                return Err(Error::invalid("image of epsilon meets Z_l"));
            }
        }
        if kappa.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::invalid("kappa is not nondecreasing"));
        }
        if let Some(&bad) = kappa.iter().find(|&&x| x > k + 1) {
            return Err(Error::invalid(format!("kappa value {bad} exceeds k+1 = {}", k + 1)));
        }
        if let Some(missing) = (1..=k).find(|i| !kappa.contains(i)) {
            return Err(Error::invalid(format!("kappa does not attain {missing}")));
        }
        for j in 0..kappa.len() {
            if kappa[j] == 0 && z_chain[j].is_zero() {
                return Err(Error::invalid(format!("member {} is the zero space", j + 1)));
            }
            if kappa[j] == k + 1 && image.sum(&z_chain[j])?.is_full() {
                return Err(Error::invalid(format!("member {} is the whole space", j + 1)));
            }
            if j > 0 && kappa[j] == kappa[j - 1] && z_chain[j] == z_chain[j - 1] {
                return Err(Error::invalid(format!("members {j} and {} coincide", j + 1)));
            }
        }
        let dims = kappa
            .iter()
            .zip(&z_chain)
            .map(|(&kj, z)| source.dim_ext(kj) + z.dim())
            .collect();
        let strict = FlagType::new(w, dims)?;
        let target = if dualized { strict.dual() } else { strict };
        Ok(StandardExtensionData { source, epsilon, z_chain, kappa, dualized, target })
    }

    /// The identity map of `Fl(source)`.
    pub fn identity(source: FlagType) -> Self {
        let n = source.ambient_dim();
        let k = source.len();
        Self::new(
            source,
            RatMatrix::identity(n),
            vec![RatSubspace::zero(n); k],
            (1..=k).collect(),
            false,
        )
        .expect("identity data is valid")
    }

    /// `{V_1, …, V_k} ↦ {V_1, …, V_{k0-1}, V_{k0} + Z, …, V_k + Z}` into
    /// `V ⊕ Z` with `dim Z = extra_dim`, `Z` spanned by the last coordinates.
    pub fn shift_from(source: FlagType, extra_dim: usize, k0: usize) -> Result<Self> {
        let k = source.len();
        if k0 == 0 || k0 > k + 1 {
            return Err(Error::IndexOutOfRange { index: k0, max: k + 1 });
        }
        let (epsilon, z) = Self::split_target(&source, extra_dim);
        let w = z.ambient_dim();
        let z_chain = (1..=k).map(|i| if i < k0 { RatSubspace::zero(w) } else { z.clone() }).collect();
        Self::new(source, epsilon, z_chain, (1..=k).collect(), false)
    }

    /// `{V_1, …, V_k} ↦ {V_1, …, V_{k0-1}, V_{k0-1} + Z, V_{k0} + Z, …, V_k + Z}`.
    pub fn insert_at(source: FlagType, extra_dim: usize, k0: usize) -> Result<Self> {
        let k = source.len();
        if k0 == 0 || k0 > k + 1 {
            return Err(Error::IndexOutOfRange { index: k0, max: k + 1 });
        }
        let (epsilon, z) = Self::split_target(&source, extra_dim);
        let w = z.ambient_dim();
        let z_chain = (1..=k + 1).map(|i| if i < k0 { RatSubspace::zero(w) } else { z.clone() }).collect();
        let kappa = (1..=k + 1).map(|i| if i < k0 { i } else { i - 1 }).collect();
        Self::new(source, epsilon, z_chain, kappa, false)
    }

    fn split_target(source: &FlagType, extra_dim: usize) -> (RatMatrix, RatSubspace) {
        let n = source.ambient_dim();
        let w = n + extra_dim;
        let mut epsilon = RatMatrix::zeros(w, n);
        for i in 0..n {
            epsilon.set(i, i, crate::ratlin::rat(1));
        }
        (epsilon, RatSubspace::coordinate(w, n..w))
    }

    pub fn source(&self) -> &FlagType {
        &self.source
    }

    pub fn target(&self) -> &FlagType {
        &self.target
    }

    pub fn epsilon(&self) -> &RatMatrix {
        &self.epsilon
    }

    pub fn z_chain(&self) -> &[RatSubspace] {
        &self.z_chain
    }

    pub fn kappa(&self) -> &[usize] {
        &self.kappa
    }

    pub fn dualized(&self) -> bool {
        self.dualized
    }

    pub fn is_strict(&self) -> bool {
        !self.dualized
    }

    /// Same data with the duality flag set to `dualized`.
    pub fn with_dualized(&self, dualized: bool) -> Self {
        Self::new(self.source.clone(), self.epsilon.clone(), self.z_chain.clone(), self.kappa.clone(), dualized)
            .expect("toggling duality keeps the data valid")
    }

    fn image_of_source(&self) -> RatSubspace {
        RatSubspace::full(self.source.ambient_dim())
            .image(&self.epsilon)
            .expect("epsilon has the source dimension")
    }
}

pub fn se_eval(se: &StandardExtensionData, flag: &Flag) -> Result<Flag> {
    se.source.expect_eq(&flag.flag_type())?;
    let chain = se
        .kappa
        .iter()
        .zip(&se.z_chain)
        .map(|(&kj, z)| flag.member_ext(kj).image(&se.epsilon)?.sum(z))
        .collect::<Result<Vec<_>>>()?;
    let strict = Flag::new(se.epsilon.rows(), chain)?;
    Ok(if se.dualized { strict.dual() } else { strict })
}

/// Data for `b ∘ a`. The first map must be strict; the duality flag of the
/// result is that of `b`.
pub fn se_compose(a: &StandardExtensionData, b: &StandardExtensionData) -> Result<StandardExtensionData> {
    a.target.expect_eq(&b.source)?;
    if a.dualized {
        return Err(Error::Precondition("composition needs a strict first factor".into()));
    }
    let k = a.source.len();
    let la = a.kappa.len();
    let wa = a.epsilon.rows();

    // Z^a_{la+1}: a complement of ε_a(V) containing Z^a_{la}.
    let za_top = a.z_chain.last().cloned().unwrap_or_else(|| RatSubspace::zero(wa));
    let extra = a.image_of_source().sum(&za_top)?.complement_in(&RatSubspace::full(wa))?;
    let mut rows = za_top.basis().to_vec();
    rows.extend(extra);
    let za_full = RatSubspace::span(wa, rows)?;

    let mut kappa = Vec::with_capacity(b.kappa.len());
    let mut z_chain = Vec::with_capacity(b.kappa.len());
    for (&i, zb) in b.kappa.iter().zip(&b.z_chain) {
        let (kj, za) = match i {
            0 => (0, RatSubspace::zero(wa)),
            i if i == la + 1 => (k + 1, za_full.clone()),
            i => (a.kappa[i - 1], a.z_chain[i - 1].clone()),
        };
        kappa.push(kj);
        z_chain.push(za.image(&b.epsilon)?.sum(zb)?);
    }
    let epsilon = b.epsilon.mul(&a.epsilon)?;
    StandardExtensionData::new(a.source.clone(), epsilon, z_chain, kappa, b.dualized)
}

impl FlagMap for StandardExtensionData {
    fn source_type(&self) -> FlagType {
        self.source.clone()
    }

    fn target_type(&self) -> FlagType {
        self.target.clone()
    }

    fn apply(&self, flag: &Flag) -> Result<Flag> {
        se_eval(self, flag)
    }
}

impl<'de> Deserialize<'de> for StandardExtensionData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            source: FlagType,
            epsilon: RatMatrix,
            z_chain: Vec<RatSubspace>,
            kappa: Vec<usize>,
            dualized: bool,
        }
        let r = Raw::deserialize(d)?;
        StandardExtensionData::new(r.source, r.epsilon, r.z_chain, r.kappa, r.dualized)
            .map_err(serde::de::Error::custom)
    }
}
