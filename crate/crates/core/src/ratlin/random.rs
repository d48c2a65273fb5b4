//! Seeded generation of random invertible matrices and flags.
//!
//! Entries are small integers so that exact arithmetic stays cheap while the
//! resulting flags are still generic for the sizes used here.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use super::{rat, Flag, RatMatrix, Rational};
use crate::flagcore::FlagType;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const ENTRY_BOUND: i64 = 3;

fn random_matrix(n: usize, rng: &mut impl Rng) -> RatMatrix {
    let mut g = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, rat(rng.gen_range(-ENTRY_BOUND..=ENTRY_BOUND)));
        }
    }
    g
}

pub fn random_invertible(n: usize, rng: &mut impl Rng) -> RatMatrix {
    loop {
        let g = random_matrix(n, rng);
        if g.rank() == n {
            return g;
        }
    }
}

/// A random invertible matrix whose first column is `v` (which must be nonzero).
pub fn random_invertible_with_first_column(v: &[Rational], rng: &mut impl Rng) -> RatMatrix {
    let n = v.len();
    assert!(v.iter().any(|x| *x != rat(0)), "first column must be nonzero");
    loop {
        let mut g = random_matrix(n, rng);
        for (i, x) in v.iter().enumerate() {
            g.set(i, 0, x.clone());
        }
        if g.rank() == n {
            return g;
        }
    }
}

pub fn random_flag(ft: &FlagType, rng: &mut impl Rng) -> Flag {
    let g = random_invertible(ft.ambient_dim(), rng);
    Flag::coordinate(ft).transform(&g).expect("invertible image of a flag is a flag")
}

/// A random flag of type `ft` whose first member contains `v`.
pub fn random_flag_through(ft: &FlagType, v: &[Rational], rng: &mut impl Rng) -> Flag {
    let g = random_invertible_with_first_column(v, rng);
    Flag::coordinate(ft).transform(&g).expect("invertible image of a flag is a flag")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_flag() {
        let ft = FlagType::new(4, vec![1, 3]).unwrap();
        let a = random_flag(&ft, &mut rng(7));
        let b = random_flag(&ft, &mut rng(7));
        assert_eq!(a, b);
        assert_eq!(a.flag_type(), ft);
    }

    #[test]
    fn flag_through_vector_contains_it() {
        let ft = FlagType::new(3, vec![1, 2]).unwrap();
        let v = vec![rat(1), rat(1), rat(0)];
        let f = random_flag_through(&ft, &v, &mut rng(1));
        assert!(f.members()[0].contains_vector(&v));
    }
}
