//! Dense matrices over the rationals with exact Gauss-Jordan elimination.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Error::invalid(format!("not a rational number: {s:?}")))
}

/// Row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::AmbientMismatch(cols, row.len()));
            }
            data.extend(row);
        }
        Ok(RatMatrix { rows: n, cols, data })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data: Vec<Rational> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged integer matrix");
                r.iter().map(|&x| rat(x))
            })
            .collect();
        RatMatrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::AmbientMismatch(self.cols, other.rows));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self · v`.
    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::AmbientMismatch(self.cols, v.len()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect())
    }

    /// Reduced row-echelon form and its pivot columns. Zero rows are dropped.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let (rows, pivots) = rref_rows(self.row_vecs(), self.cols);
        let n = rows.len();
        let data = rows.into_iter().flatten().collect();
        (RatMatrix { rows: n, cols: self.cols, data }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis (as rows) of `{x : self · x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                let coeff = r.get(row, free);
                if !coeff.is_zero() {
                    v[p] = -coeff.clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                r
            })
            .collect();
        let (red, pivots) = rref_rows(rows, 2 * n);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let data = red.into_iter().flat_map(|r| r.into_iter().skip(n)).collect();
        Some(RatMatrix { rows: n, cols: n, data })
    }

    /// Block-diagonal repetition `diag(self, …, self)` with `copies` blocks.
    pub fn block_diagonal(&self, copies: usize) -> RatMatrix {
        let mut out = Self::zeros(self.rows * copies, self.cols * copies);
        for b in 0..copies {
            for i in 0..self.rows {
                for j in 0..self.cols {
                    let v = self.get(i, j);
                    if !v.is_zero() {
                        out.set(b * self.rows + i, b * self.cols + j, v.clone());
                    }
                }
            }
        }
        out
    }
}

/// Gauss-Jordan elimination on a list of rows of width `cols`.
pub(crate) fn rref_rows(mut rows: Vec<Vec<Rational>>, cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut lead = 0;
    for col in 0..cols {
        if lead == rows.len() {
            break;
        }
        let Some(p) = (lead..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(lead, p);
        let inv = rows[lead][col].recip();
        if !inv.is_one() {
            for x in rows[lead][col..].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let (before, rest) = rows.split_at_mut(lead);
        let (pivot_row, after) = rest.split_first_mut().expect("lead row exists");
        for r in before.iter_mut().chain(after.iter_mut()) {
            if r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for c in col..cols {
                if !pivot_row[c].is_zero() {
                    let delta = &f * &pivot_row[c];
                    r[c] -= delta;
                }
            }
        }
        pivots.push(col);
        lead += 1;
    }
    rows.truncate(lead);
    (rows, pivots)
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// JSON form: `{"rows": r, "cols": c, "entries": [["1","3/2"], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: rows_to_strings(&self.row_vecs()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows {
            return Err(serde::de::Error::custom("row count does not match entries"));
        }
        let rows = rows_from_strings(&repr.entries).map_err(serde::de::Error::custom)?;
        RatMatrix::from_rows(repr.cols, rows).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn rows_to_strings(rows: &[Vec<Rational>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

pub(crate) fn rows_from_strings(rows: &[Vec<String>]) -> Result<Vec<Vec<Rational>>> {
    rows.iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_rank() {
        let m = RatMatrix::from_i64_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        let (r, piv) = m.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, RatMatrix::from_i64_rows(&[vec![1, 0, 1], vec![0, 1, 1]]));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = RatMatrix::from_i64_rows(&[vec![1, 2, 3, 4], vec![0, 1, -1, 2]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.apply(&v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = RatMatrix::from_i64_rows(&[vec![2, 1], vec![7, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), RatMatrix::identity(2));
        let singular = RatMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn block_diagonal_shape() {
        let g = RatMatrix::from_i64_rows(&[vec![1, 2], vec![3, 4]]);
        let b = g.block_diagonal(3);
        assert_eq!((b.rows(), b.cols()), (6, 6));
        assert_eq!(b.get(4, 5), &rat(2));
        assert!(b.get(0, 3).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let m = RatMatrix::from_rows(2, vec![vec![rat(1), rat(3) / rat(2)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":[["1","3/2"]]}"#);
        let back: RatMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
