//! A fixed battery of small computations whose transcript identifies the
//! library build in every report.

use sha2::{Digest, Sha256};

use crate::diagembed::{equivariance_check, is_linear_graph, picard_pullback, DiagonalEmbedding};
use crate::egraph::{build_from_alpha, SurjectionAlpha, EGraph};
use crate::error::{Error, Result};
use crate::flagcore::FlagType;
use crate::indlimit::{admissible, GeneralizedFlagType, Tail};
use crate::ratlin::{stabilizer_oracle, Flag};
use crate::supernat::{validate_exhaustion, ExhaustionSpec, SupernaturalNumber};

pub const SCHEMA_VERSION: &str = "1";

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Consistency(format!("self-test failed: {what}")))
    }
}

/// Runs the battery and returns its transcript; any unexpected value is a
/// [`Error::Consistency`].
pub fn self_test() -> Result<String> {
    let mut out = Vec::new();

    let g = EGraph::from_triples(3, 4, 2, &[(1, 1, 1), (2, 3, 1), (3, 4, 1), (2, 2, 2), (3, 3, 2)]);
    let emb = DiagonalEmbedding::new(g, FlagType::new(3, vec![1, 2])?)?;
    let pb = picard_pullback(&emb);
    check(pb.matrix == [[1, 0], [1, 1], [0, 1]], "pullback of the mixed-colour graph")?;
    check(!is_linear_graph(&emb), "mixed-colour graph is not linear")?;
    out.push(serde_json::to_string(&pb).expect("serializable"));
    let eq = equivariance_check(&emb, 3, 0)?;
    check(eq.failures == 0, "equivariance")?;

    let alpha = SurjectionAlpha::new(vec![1, 2, 2, 3])?;
    let r = build_from_alpha(&alpha, 2)?;
    check(r.parabolic().is_some(), "restriction of 1223")?;
    out.push(serde_json::to_string(&r).expect("serializable"));
    let flag = Flag::coordinate(&FlagType::new(2, vec![1])?);
    let oracle = stabilizer_oracle(&flag, 2)?;
    check(oracle.dim == 3 && oracle.is_parabolic, "Borel of GL(2)")?;

    let sn = SupernaturalNumber::infinite(&[2])?;
    check(validate_exhaustion(&ExhaustionSpec::new(1, vec![2]), &sn).is_valid(), "doubling exhausts 2^inf")?;
    let gft = GeneralizedFlagType::new(vec![], Some(Tail::Geometric { base: 1, ratio: 2 }), true, None)?;
    let verdict = admissible(&gft, &sn, 8);
    out.push(serde_json::to_string(&verdict).expect("serializable"));
    check(out[2].contains("\"Admissible\""), "powers of two are admissible")?;

    Ok(out.join("\n"))
}

/// SHA-256 of the self-test transcript, in hex.
pub fn self_test_digest() -> Result<String> {
    let transcript = self_test()?;
    Ok(hex::encode(Sha256::digest(transcript.as_bytes())))
}
