//! Brute-force Lie algebra computations for `GL(m) ⊂ GL(dm)` embedded block-diagonally.
//!
//! Everything here is derived by solving linear systems directly, without any
//! of the combinatorics in `egraph` or `diagembed`, so it can serve as an
//! independent check on them.

use num_traits::Zero;
use serde::Serialize;

use super::{Flag, RatMatrix, RatSubspace, Rational};
use crate::error::{Error, Result};

/// The stabilizer `q = {x ∈ gl(m) : diag(x,…,x) preserves the flag}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub m: usize,
    pub d: usize,
    pub dim: usize,
    /// Basis of `q`, each element an `m × m` matrix.
    pub basis: Vec<RatMatrix>,
    /// Off-diagonal root spaces `g'_{ij}` (1-based) contained in `q`.
    pub root_spaces: Vec<(usize, usize)>,
    /// Whether the diagonal Cartan subalgebra `h'` lies in `q`.
    pub contains_cartan: bool,
    pub is_parabolic: bool,
}

impl OracleResult {
    pub fn contains_root(&self, i: usize, j: usize) -> bool {
        self.root_spaces.binary_search(&(i, j)).is_ok()
    }

    /// Root spaces of the nilradical: `g'_{ij} ⊆ q` but `g'_{ji} ⊄ q`.
    pub fn nilradical_roots(&self) -> Vec<(usize, usize)> {
        self.root_spaces
            .iter()
            .copied()
            .filter(|&(i, j)| !self.contains_root(j, i))
            .collect()
    }
}

fn split(flag: &Flag, m: usize) -> Result<usize> {
    let n = flag.ambient_dim();
    if m == 0 || n % m != 0 {
        return Err(Error::NotDivisible { divisor: m, value: n });
    }
    Ok(n / m)
}

/// Rows of the linear system in the `m²` unknowns `x_{ij}` (index `i·m + j`)
/// expressing that `diag(x,…,x)` maps `source` into `target`.
fn preservation_equations(source: &RatSubspace, target: &RatSubspace, m: usize, d: usize) -> Vec<Vec<Rational>> {
    let ann = target.annihilator();
    let mut rows = Vec::new();
    for u in source.basis() {
        for a in ann.basis() {
            let mut row = vec![Rational::zero(); m * m];
            for k in 0..d {
                for i in 0..m {
                    let ai = &a[k * m + i];
                    if ai.is_zero() {
                        continue;
                    }
                    for j in 0..m {
                        let uj = &u[k * m + j];
                        if !uj.is_zero() {
                            row[i * m + j] += ai * uj;
                        }
                    }
                }
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    rows
}

pub fn stabilizer_oracle(flag: &Flag, m: usize) -> Result<OracleResult> {
    let d = split(flag, m)?;
    let mut eqs = Vec::new();
    for s in flag.members() {
        eqs.extend(preservation_equations(s, s, m, d));
    }
    let system = RatMatrix::from_rows(m * m, eqs)?;
    let basis = system
        .nullspace()
        .into_iter()
        .map(|v| {
            let rows = v.chunks(m).map(<[Rational]>::to_vec).collect();
            RatMatrix::from_rows(m, rows)
        })
        .collect::<Result<Vec<_>>>()?;

    // q is the kernel of `system`, so E_ij ∈ q exactly when column ij vanishes.
    let column_zero = |idx: usize| (0..system.rows()).all(|r| system.get(r, idx).is_zero());
    let contains_cartan = (0..m).all(|i| column_zero(i * m + i));
    let mut root_spaces = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j && column_zero(i * m + j) {
                root_spaces.push((i + 1, j + 1));
            }
        }
    }
    let mut result = OracleResult {
        m,
        d,
        dim: basis.len(),
        basis,
        root_spaces,
        contains_cartan,
        is_parabolic: false,
    };
    result.is_parabolic = contains_cartan
        && (1..=m).all(|i| (1..=m).all(|j| i == j || result.contains_root(i, j) || result.contains_root(j, i)));
    Ok(result)
}

/// Whether `nil(q) ⊆ nil(p)`, where `p` is the stabilizer of `flag` in
/// `gl(dm)` and `q` its block-diagonal restriction.
///
/// `nil(p)` is taken literally as `{X : X F_j ⊆ F_{j-1}}`; each root vector of
/// `nil(q)` is tested against it after block-diagonal embedding.
pub fn nilradical_inclusion_oracle(flag: &Flag, m: usize) -> Result<bool> {
    let q = stabilizer_oracle(flag, m)?;
    if !q.is_parabolic {
        return Err(Error::Precondition("restricted stabilizer is not parabolic".into()));
    }
    let d = q.d;
    let n = flag.ambient_dim();
    let steps: Vec<(RatSubspace, RatSubspace)> = (1..=flag.len() + 1)
        .map(|j| (flag.member_ext(j), flag.member_ext(j - 1)))
        .collect();
    for (i, j) in q.nilradical_roots() {
        let mut x = RatMatrix::zeros(n, n);
        for k in 0..d {
            x.set(k * m + i - 1, k * m + j - 1, Rational::from_integer(1.into()));
        }
        for (upper, lower) in &steps {
            let image = upper.image(&x)?;
            if !lower.contains(&image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
