//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use diagflag::diagembed::{
    constant_spaces, equivariance_check, is_linear_graph, is_standard_extension_egraph, is_standard_extension_graph,
    picard_pullback, DiagonalEmbedding,
};
use diagflag::egraph::{surjections, validate, EGraph, SurjectionAlpha};
use diagflag::flagcore::{classify_bruteforce, sample_constants, ClassifyConfig, FlagType, MAX_CLASSIFY_DIM};
use diagflag::indlimit::{
    admissible, build_sn_graph, decompose_sn_graph, factor_linear_egraph, line_hyperplane_sn_graph,
    pullback_additivity, Admissibility, AdmissibilityCertificate, GeneralizedFlagType, QuotientDim, Tail,
};
use diagflag::ratlin::random::{random_flag, rng, TestRng};
use diagflag::ratlin::RatSubspace;
use diagflag::supernat::{ExhaustionSpec, Exponent, SupernaturalNumber};
use diagflag::sweep::oracle_sweep;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// A random embedding from a surjection with `n ≤ n_max` whose restriction
/// to `GL(n/d)` is parabolic, `d ≥ 2`.
fn random_embedding(r: &mut TestRng, n_max: usize) -> DiagonalEmbedding {
    loop {
        let n = r.gen_range(2..=n_max);
        let divisors: Vec<usize> = (2..=n).filter(|d| n % d == 0).collect();
        let d = *divisors.choose(r).expect("n ≥ 2 has a divisor ≥ 2");
        let p = r.gen_range(1..=n);
        let values: Vec<usize> = (0..n).map(|_| r.gen_range(1..=p)).collect();
        let Ok(alpha) = SurjectionAlpha::new(values) else { continue };
        if let Ok((emb, _)) = DiagonalEmbedding::from_alpha(&alpha, n / d) {
            return emb;
        }
    }
}

fn mixed_colour_regression() -> Check {
    let g = EGraph::from_triples(3, 4, 2, &[(1, 1, 1), (2, 3, 1), (3, 4, 1), (2, 2, 2), (3, 3, 2)]);
    let emb = DiagonalEmbedding::new(g, FlagType::new(3, vec![1, 2]).map_err(err)?).map_err(err)?;
    ensure(emb.target().dims() == [1, 3, 5], || format!("target {}", emb.target()))?;
    let pb = picard_pullback(&emb);
    ensure(pb.matrix == [[1, 0], [1, 1], [0, 1]], || format!("pullback {:?}", pb.matrix))?;
    ensure(!is_linear_graph(&emb) && !is_standard_extension_graph(&emb), || "linear or SE".into())?;
    let f = random_flag(emb.source(), &mut rng(11));
    let out = emb.eval(&f).map_err(err)?;
    let [v1, v2] = f.members() else { return Err("source has two members".into()) };
    let first = v1.chi_embed(1, 2).map_err(err)?;
    let second = first.sum(&v2.chi_embed(2, 2).map_err(err)?).map_err(err)?;
    let third = v2.chi_embed(1, 2).map_err(err)?.sum(&RatSubspace::full(3).chi_embed(2, 2).map_err(err)?).map_err(err)?;
    ensure(out.members() == [first, second, third], || "image differs from (V1, V1+V2', V2+W')".into())?;
    Ok("rows (1,0),(1,1),(0,1); not linear; not SE".into())
}

fn oracle_equivalence() -> Check {
    let r = oracle_sweep(6, &[2, 3]).map_err(err)?;
    ensure(r.disagreements.is_empty(), || format!("{:?}", r.disagreements))?;
    Ok(format!("{} cases, {} parabolic, 0 disagreements", r.cases, r.parabolic))
}

fn two_formulas() -> Check {
    let mut r = rng(3);
    for t in 0..1000 {
        let emb = random_embedding(&mut r, 8);
        let f = random_flag(emb.source(), &mut r);
        emb.eval(&f).map_err(|e| format!("pair {t}: {e}"))?;
    }
    // eval(F_beta) = F_alpha is part of every sweep case
    let sweep = oracle_sweep(6, &[1, 2, 3, 4, 5, 6]).map_err(err)?;
    ensure(sweep.disagreements.is_empty(), || format!("{:?}", sweep.disagreements))?;
    Ok(format!("1000 random pairs; eval(F_beta) = F_alpha on {} parabolic cases", sweep.parabolic))
}

fn equivariance() -> Check {
    let mut r = rng(4);
    let mut seen = BTreeSet::new();
    let mut embs = Vec::new();
    while embs.len() < 20 {
        let emb = random_embedding(&mut r, 8);
        if emb.m() >= 2 && seen.insert((emb.graph().clone(), emb.source().clone())) {
            embs.push(emb);
        }
    }
    let mut failures = 0;
    for (i, emb) in embs.iter().enumerate() {
        failures += equivariance_check(emb, 200, 1000 * i as u64).map_err(err)?.failures;
    }
    ensure(failures == 0, || format!("{failures} failures"))?;
    Ok("20 embeddings x 200 trials, 0 failures".into())
}

fn se_criterion() -> Check {
    let mut seen = BTreeSet::new();
    let mut checked = 0;
    for n in 1..=MAX_CLASSIFY_DIM {
        for alpha in surjections(n) {
            for d in (1..=n).filter(|d| n % d == 0) {
                let Ok((emb, _)) = DiagonalEmbedding::from_alpha(&alpha, n / d) else { continue };
                if !seen.insert((emb.graph().clone(), emb.source().clone())) {
                    continue;
                }
                let c = classify_bruteforce(&emb, &ClassifyConfig::default()).map_err(err)?;
                let graph = is_standard_extension_graph(&emb);
                ensure(graph == c.is_se() && (!graph || c.is_strict()), || {
                    format!("{:?} {}: graph {graph}, search {}", emb.graph(), emb.source(), c.label())
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} distinct embeddings agree"))
}

fn sampled_constants() -> Check {
    let mut r = rng(6);
    for t in 0..50 {
        let emb = random_embedding(&mut r, 8);
        ensure(validate(emb.graph()).is_valid(), || format!("graph {t} invalid"))?;
        let sampled = sample_constants(&emb, 25, &mut rng(100 + t)).map_err(err)?;
        ensure(sampled.stabilized, || format!("graph {t} did not stabilize"))?;
        ensure(sampled.constants == constant_spaces(&emb), || format!("graph {t}: {:?}", emb.graph()))?;
    }
    Ok("50 random graphs, exact equality".into())
}

fn chain(order: &[Option<u64>]) -> GeneralizedFlagType {
    GeneralizedFlagType::chain(order.iter().map(|q| q.map_or(QuotientDim::Infinite, QuotientDim::Finite)).collect())
        .expect("fixture flag type")
}

fn realization() -> Check {
    let gfts = [
        chain(&[Some(1), None]),
        chain(&[None]),
        chain(&[Some(1), Some(2), None, None]),
        chain(&[Some(3), None, Some(1)]),
        chain(&[None, Some(2), None, Some(5)]),
    ];
    let sns = [
        SupernaturalNumber::infinite(&[2]).map_err(err)?,
        SupernaturalNumber::infinite(&[2, 3]).map_err(err)?,
        SupernaturalNumber::new(BTreeMap::from([(3, Exponent::Inf), (5, Exponent::Finite(1))])).map_err(err)?,
    ];
    const LEVELS: usize = 6;
    let mut classified = 0;
    for gft in &gfts {
        let finite: u64 = gft.finite_quotients().iter().sum();
        let infinite = gft.ordered().map_or(0, |o| o.iter().filter(|q| **q == QuotientDim::Infinite).count()) as u64;
        for sn in &sns {
            let spec = ExhaustionSpec::standard(sn, finite + infinite).map_err(err)?;
            let r = build_sn_graph(gft, sn, &spec).map_err(|e| format!("{gft} over {sn}: {e}"))?;
            let report = r.sn_graph.validate(LEVELS);
            ensure(report.is_valid(), || format!("{gft} over {sn}: {report}"))?;
            for n in 1..=LEVELS {
                let g = r.sn_graph.level(n).ok_or("missing level")?;
                ensure(is_standard_extension_egraph(g), || format!("{gft} over {sn}: level {n} not SE"))?;
            }
            let types = r.level_types(LEVELS + 1).map_err(err)?;
            let order = gft.ordered().ok_or("fixture is ordered")?;
            for t in &types {
                let q = t.quotients();
                for (dim, want) in q.iter().zip(order) {
                    if let QuotientDim::Finite(k) = want {
                        ensure(*dim as u64 == *k, || format!("{gft} over {sn}: finite quotient grew in {t}"))?;
                    }
                }
            }
            for n in 1..=2 {
                let emb = DiagonalEmbedding::new(r.sn_graph.level(n).ok_or("level")?.clone(), types[n - 1].clone())
                    .map_err(err)?;
                if emb.target().ambient_dim() <= MAX_CLASSIFY_DIM {
                    let c = classify_bruteforce(&emb, &ClassifyConfig::default()).map_err(err)?;
                    ensure(c.is_strict(), || format!("{gft} over {sn}: level {n} classified {}", c.label()))?;
                    classified += 1;
                }
            }
        }
    }
    Ok(format!("15 realizations x {LEVELS} levels valid and SE; {classified} levels confirmed by search"))
}

fn admissibility_fixtures() -> Check {
    let two = SupernaturalNumber::infinite(&[2]).map_err(err)?;
    let geometric =
        GeneralizedFlagType::new(vec![], Some(Tail::Geometric { base: 1, ratio: 2 }), true, None).map_err(err)?;
    let Admissibility::Admissible { certificate } = admissible(&geometric, &two, 64) else {
        return Err("geometric tail not admissible".into());
    };
    ensure(certificate.verified_prefix_length() >= 12, || "prefix shorter than 12".into())?;
    certificate.verify(&geometric, 12)?;
    let AdmissibilityCertificate::Periodic { exhaustion, .. } = &certificate else {
        return Err("expected a periodic certificate".into());
    };
    ensure(exhaustion == &ExhaustionSpec::new(1, vec![2]), || format!("exhaustion {exhaustion}"))?;
    for n in 1..=12 {
        let pick = certificate.pick_at(&geometric, n).ok_or("missing pick")?;
        ensure(pick.dim == 1 << (n - 1), || format!("step {n} picks {}", pick.dim))?;
    }

    let constant = GeneralizedFlagType::new(vec![], Some(Tail::Constant { c: 1 }), false, None).map_err(err)?;
    let Admissibility::NotAdmissible { proof } = admissible(&constant, &two, 64) else {
        return Err("constant tail not refuted".into());
    };
    proof.verify(&constant, &two)?;

    let finite = chain(&[Some(5), None, Some(7)]);
    for sn in [two.clone(), SupernaturalNumber::infinite(&[3, 7]).map_err(err)?] {
        ensure(matches!(admissible(&finite, &sn, 64), Admissibility::Admissible { .. }), || {
            format!("finite type over {sn}")
        })?;
    }
    Ok("powers of two certified on 12 steps; constant tail refuted; finite type admissible".into())
}

fn line_hyperplane_decomposition() -> Check {
    const LEVELS: usize = 6;
    let r = line_hyperplane_sn_graph();
    let threading = vec![BTreeMap::from([(1, 0), (2, 1)]); LEVELS];
    let parts = decompose_sn_graph(&r.sn_graph, LEVELS, &threading).map_err(err)?;
    ensure(parts.len() == 2, || format!("{} factors", parts.len()))?;
    for (i, part) in parts.iter().enumerate() {
        let report = part.validate(LEVELS);
        ensure(report.is_valid(), || format!("factor {i}: {report}"))?;
        for n in 1..=LEVELS {
            ensure(is_standard_extension_egraph(part.level(n).ok_or("level")?), || {
                format!("factor {i} level {n} has mixed ordinary edges")
            })?;
        }
    }
    for n in 1..=LEVELS {
        let g = r.sn_graph.level(n).ok_or("level")?;
        let factors = factor_linear_egraph(g).map_err(err)?;
        ensure(pullback_additivity(g, &factors), || format!("additivity fails at level {n}"))?;
    }
    Ok(format!("2 factors over {LEVELS} levels, additivity holds"))
}

fn deterministic_reports() -> Check {
    let graph = r#"{"q":3,"p":4,"d":2,"edges":[[1,1,1],[2,3,1],[3,4,1],[2,2,2],[3,3,2]]}"#;
    let embedding = format!(r#"{{"graph":{graph},"source_type":{{"ambient_dim":3,"dims":[1,2]}}}}"#);
    let linear = r#"{"q":3,"p":3,"d":2,"edges":[[1,1,1],[3,2,1],[2,2,2],[3,3,2]]}"#;
    let sn_graph = format!(r#"{{"exhaustion":{{"s1":4,"cycle":[2]}},"prefix":[{linear}],"period":1}}"#);
    let two = r#"{"factors":{"2":"inf"}}"#;
    let geometric = r#"{"finite_quotients":[],"tail":{"kind":"geometric","base":1,"ratio":2},"infinite_quotients":true,"ordered":null}"#;
    let ordered = r#"{"finite_quotients":[1],"infinite_quotients":true,"ordered":[1,"inf"]}"#;
    let commands: Vec<Vec<&str>> = vec![
        vec!["validate-egraph", "--graph", graph],
        vec!["restrict", "--alpha", "1,2,2,3", "--m", "2"],
        vec!["restrict", "--alpha", "1,2,2,1", "--m", "2"],
        vec!["embed", "--embedding", &embedding, "--seed", "7"],
        vec!["embed", "--alpha", "1,1,2,3,2,3", "--m", "3", "--seed", "9", "--trials", "5"],
        vec!["picard", "--graph", graph],
        vec!["classify", "--embedding", &embedding, "--seed", "5"],
        vec!["constants", "--alpha", "1,2,2,3", "--m", "2", "--seed", "2"],
        vec!["admissible", "--gft", geometric, "--sn", two],
        vec!["factor", "--graph", linear],
        vec!["factor", "--sn-graph", &sn_graph, "--threading", r#"[{"1":0,"2":1},{"1":0,"2":1}]"#, "--levels", "2"],
        vec!["oracle", "--n-max", "4", "--d", "2"],
        vec!["exhaust", "--sigma", "1,2,1,2,3", "--n-max", "4"],
        vec!["exhaust", "--gft", ordered, "--sn", two, "--levels", "4"],
        vec!["dot", "--graph", graph],
    ];
    let bin = env!("CARGO_BIN_EXE_diagflag");
    for args in &commands {
        let run = || Command::new(bin).args(args).output().map_err(err);
        let (a, b) = (run()?, run()?);
        ensure(a.status.success(), || format!("{} exited with {}", args[0], a.status))?;
        ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || format!("{} differs between runs", args[0]))?;
        if args[0] != "dot" {
            let v: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(err)?;
            ensure(v.get("verdict").is_some() && v.get("self_test_digest").is_some(), || {
                format!("{} report lacks verdict or digest", args[0])
            })?;
        }
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 10] = [
        ("mixed-colour graph regression", Duration::from_secs(1), mixed_colour_regression),
        ("restriction verdicts vs oracle", Duration::from_secs(300), oracle_equivalence),
        ("two evaluation formulas agree", Duration::MAX, two_formulas),
        ("equivariance", Duration::MAX, equivariance),
        ("standard-extension criterion vs search", Duration::from_secs(600), se_criterion),
        ("sampled constant spaces", Duration::MAX, sampled_constants),
        ("s-graph realization", Duration::MAX, realization),
        ("admissibility fixtures", Duration::from_secs(30), admissibility_fixtures),
        ("line and hyperplane decomposition", Duration::MAX, line_hyperplane_decomposition),
        ("deterministic reports", Duration::MAX, deterministic_reports),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *limit => Err(format!("{detail}; took {took:.2?}, limit {limit:.0?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
