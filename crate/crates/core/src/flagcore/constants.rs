//! Constant spaces `C_i = ⋂ φ(F)_i` and the support of an embedding, by sampling.

use serde::Serialize;

use super::{FlagMap, FlagType};
use crate::error::{Error, Result};
use crate::ratlin::random::{random_flag, TestRng};
use crate::ratlin::{Flag, RatSubspace};

pub const DEFAULT_WINDOW: usize = 25;

/// Safety cap on the number of samples drawn while waiting for stabilization.
const MAX_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constants {
    pub constants: Vec<RatSubspace>,
    /// 1-based indices `i` with `dim C_i < q_i`.
    pub support: Vec<usize>,
    pub samples_used: usize,
    /// Whether the chain stayed unchanged for a full window before the input ran out.
    pub stabilized: bool,
}

/// Intersects image flags member by member until the chain of intersections
/// is unchanged for `window` consecutive samples.
pub fn support_and_constants(images: impl IntoIterator<Item = Flag>, window: usize) -> Result<Constants> {
    let mut iter = images.into_iter();
    let first = iter.next().ok_or_else(|| Error::invalid("empty sample of image flags"))?;
    let target = first.flag_type();
    let mut constants = first.members().to_vec();
    let mut unchanged = 0;
    let mut used = 1;
    while unchanged < window {
        let Some(f) = iter.next() else { break };
        target.expect_eq(&f.flag_type())?;
        used += 1;
        let mut changed = false;
        for (c, m) in constants.iter_mut().zip(f.members()) {
            let next = c.intersect(m)?;
            if next != *c {
                *c = next;
                changed = true;
            }
        }
        unchanged = if changed { 0 } else { unchanged + 1 };
    }
    Ok(finish(constants, &target, used, unchanged >= window))
}

fn finish(constants: Vec<RatSubspace>, target: &FlagType, used: usize, stabilized: bool) -> Constants {
    let support = constants
        .iter()
        .zip(target.dims())
        .enumerate()
        .filter(|(_, (c, &q))| c.dim() < q)
        .map(|(i, _)| i + 1)
        .collect();
    Constants { constants, support, samples_used: used, stabilized }
}

/// Samples the images of the coordinate flag followed by random flags.
pub fn sample_constants(map: &(impl FlagMap + ?Sized), window: usize, rng: &mut TestRng) -> Result<Constants> {
    let source = map.source_type();
    let mut error = None;
    let coordinate = std::iter::once(Flag::coordinate(&source));
    let randoms = std::iter::repeat_with(|| random_flag(&source, rng)).take(MAX_SAMPLES);
    let images = coordinate.chain(randoms).map_while(|f| match map.apply(&f) {
        Ok(img) => Some(img),
        Err(e) => {
            error = Some(e);
            None
        }
    });
    let result = support_and_constants(images, window);
    if let Some(e) = error {
        return Err(e);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flagcore::StandardExtensionData;
    use crate::ratlin::random::rng;

    #[test]
    fn empty_sample_is_an_error() {
        assert!(support_and_constants(Vec::new(), 5).is_err());
    }

    #[test]
    fn identity_has_full_support() {
        let s = FlagType::new(4, vec![1, 2]).unwrap();
        let id = StandardExtensionData::identity(s);
        let c = sample_constants(&id, DEFAULT_WINDOW, &mut rng(0)).unwrap();
        assert!(c.stabilized);
        assert_eq!(c.support, vec![1, 2]);
        assert!(c.constants.iter().all(RatSubspace::is_zero));
    }

    #[test]
    fn strict_extension_constants_are_z_chain() {
        let s = FlagType::new(3, vec![1, 2]).unwrap();
        let phi = StandardExtensionData::insert_at(s, 2, 2).unwrap();
        let c = sample_constants(&phi, DEFAULT_WINDOW, &mut rng(1)).unwrap();
        assert_eq!(c.constants, phi.z_chain());
        assert_eq!(c.support, vec![1, 2, 3]);
    }
}
