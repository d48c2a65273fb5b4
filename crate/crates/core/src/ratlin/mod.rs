//! Exact linear algebra over the rationals and the brute-force stabilizer oracle.

mod matrix;
mod oracle;
pub mod random;
mod subspace;

pub use matrix::{parse_rational, rat, RatMatrix, Rational};
pub use oracle::{nilradical_inclusion_oracle, stabilizer_oracle, OracleResult};
pub use subspace::{unit_vector, Flag, RatSubspace};
