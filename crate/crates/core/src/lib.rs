//! Parabolic restrictions along strict diagonal embeddings `GL(m) ⊂ GL(dm)`,
//! the induced embeddings of flag varieties, and their ind-limits.

pub mod diagembed;
pub mod egraph;
pub mod error;
pub mod flagcore;
pub mod indlimit;
pub mod ratlin;
pub mod report;
pub mod selftest;
pub mod supernat;
pub mod sweep;

pub use error::{Error, Result};
