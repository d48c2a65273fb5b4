//! `diagflag`: batch front end. Every subcommand prints one JSON report (DOT
//! for `dot`) and exits 0 on success, 1 on bad input, 2 on a failed self-check.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use diagflag::diagembed::{
    constant_spaces, equivariance_check, is_linear_graph, is_standard_extension_egraph, is_standard_extension_graph,
    picard_pullback, pullback_rows, unipotent_inclusion, DiagonalEmbedding,
};
use diagflag::egraph::{build_from_alpha, to_dot, validate, EGraph, Restriction, SurjectionAlpha};
use diagflag::flagcore::{classify_bruteforce, sample_constants, ClassifyConfig, FlagType, DEFAULT_WINDOW};
use diagflag::indlimit::{
    admissible, build_sn_graph, canonical_exhaustion, decompose_sn_graph, factor_linear_egraph, pullback_additivity,
    Admissibility, AdmissibilityCertificate, GeneralizedFlagType, QuotientDim, SnGraph, DEFAULT_BOUND,
};
use diagflag::ratlin::random::{random_flag, rng};
use diagflag::ratlin::Flag;
use diagflag::selftest::{self_test_digest, SCHEMA_VERSION};
use diagflag::supernat::{ExhaustionSpec, SupernaturalNumber};
use diagflag::sweep::oracle_sweep;

#[derive(Parser)]
#[command(name = "diagflag", version, about = "Parabolic restrictions, E-graphs and flag embeddings")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// An embedding, either from `--alpha/--m` or from a document
/// `{"alpha": [...], "m": k}` or `{"graph": {...}, "source_type": {...}}`.
#[derive(Args)]
struct EmbeddingArgs {
    #[arg(long, conflicts_with_all = ["alpha", "m"])]
    embedding: Option<String>,
    #[arg(long, value_delimiter = ',', requires = "m")]
    alpha: Option<Vec<usize>>,
    #[arg(long, requires = "alpha")]
    m: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the defining clauses of an E-graph.
    ValidateEgraph {
        #[arg(long)]
        graph: String,
    },
    /// Restrict Stab(F_alpha) to GL(m).
    Restrict {
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<usize>,
        #[arg(long)]
        m: usize,
    },
    /// Evaluate an embedding on a flag and check equivariance.
    Embed {
        #[command(flatten)]
        embedding: EmbeddingArgs,
        /// Flag to evaluate; a random one is drawn when absent.
        #[arg(long)]
        flag: Option<String>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Picard pullback matrix of a graph.
    Picard {
        #[arg(long)]
        graph: String,
    },
    /// Brute-force standard-extension classification.
    Classify {
        #[command(flatten)]
        embedding: EmbeddingArgs,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
    },
    /// Sampled constant spaces against the closed form.
    Constants {
        #[command(flatten)]
        embedding: EmbeddingArgs,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
    },
    /// Admissibility of a generalized flag type.
    Admissible {
        #[arg(long)]
        gft: String,
        #[arg(long)]
        sn: String,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: u64,
    },
    /// Factor a linear graph, or decompose an s-graph along a threading.
    Factor {
        #[arg(long, conflicts_with = "sn_graph")]
        graph: Option<String>,
        #[arg(long, requires = "threading")]
        sn_graph: Option<String>,
        /// JSON list, one map from colour to factor id per level.
        #[arg(long)]
        threading: Option<String>,
        #[arg(long, default_value_t = 6)]
        levels: usize,
    },
    /// Exhaustive comparison with the linear-algebra oracle.
    Oracle {
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        d: Vec<usize>,
    },
    /// Canonical exhaustion from sigma, or an s-graph realizing a flag type.
    Exhaust {
        #[arg(long, value_delimiter = ',', conflicts_with = "gft", requires = "n_max")]
        sigma: Option<Vec<usize>>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, requires = "sn")]
        gft: Option<String>,
        #[arg(long)]
        sn: Option<String>,
        /// Exhaustion to use; the standard one for `--sn` when absent.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 6)]
        levels: usize,
    },
    /// Graphviz rendering of a graph.
    Dot {
        #[arg(long)]
        graph: String,
    },
}

enum Failure {
    Input(String),
    Consistency(String),
}

impl From<diagflag::Error> for Failure {
    fn from(e: diagflag::Error) -> Self {
        if e.is_consistency() {
            Failure::Consistency(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

enum Report {
    Json(Value),
    Text(String),
}

/// Inline JSON when the argument starts like a document, a file path otherwise.
fn load_value(arg: &str) -> Outcome<Value> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{arg}: {e}")))
}

fn parse<T: DeserializeOwned>(v: Value, what: &str) -> Outcome<T> {
    serde_json::from_value(v).map_err(|e| Failure::Input(format!("{what}: {e}")))
}

fn load<T: DeserializeOwned>(arg: &str, what: &str) -> Outcome<T> {
    parse(load_value(arg)?, what)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphaDoc {
    alpha: SurjectionAlpha,
    m: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    graph: EGraph,
    source_type: FlagType,
}

fn embedding_from_alpha(alpha: &SurjectionAlpha, m: usize) -> Outcome<DiagonalEmbedding> {
    Ok(DiagonalEmbedding::from_alpha(alpha, m)?.0)
}

fn load_embedding(args: &EmbeddingArgs) -> Outcome<DiagonalEmbedding> {
    match (&args.embedding, &args.alpha, args.m) {
        (Some(doc), _, _) => {
            let v = load_value(doc)?;
            if v.get("alpha").is_some() {
                let AlphaDoc { alpha, m } = parse(v, "embedding")?;
                embedding_from_alpha(&alpha, m)
            } else {
                let GraphDoc { graph, source_type } = parse(v, "embedding")?;
                Ok(DiagonalEmbedding::new(graph, source_type)?)
            }
        }
        (None, Some(values), Some(m)) => embedding_from_alpha(&SurjectionAlpha::new(values.clone())?, m),
        _ => Err(Failure::Input("give --embedding or --alpha with --m".into())),
    }
}

/// A bare graph, or the graph of an embedding document.
fn load_graph(arg: &str) -> Outcome<EGraph> {
    let v = load_value(arg)?;
    if let Some(g) = v.get("graph") {
        return parse(g.clone(), "graph");
    }
    if v.get("alpha").is_some() {
        let AlphaDoc { alpha, m } = parse(v, "embedding")?;
        return match build_from_alpha(&alpha, m)? {
            Restriction::Parabolic(r) => Ok(r.graph),
            Restriction::NotParabolic { .. } => Err(Failure::Input("the restriction is not parabolic".into())),
        };
    }
    parse(v, "graph")
}

fn validate_egraph(graph: &str) -> Outcome<Value> {
    let g = load_graph(graph)?;
    let report = validate(&g);
    let verdict = if report.is_valid() { "Valid" } else { "Invalid" };
    Ok(json!({ "verdict": verdict, "graph": g, "violations": report.violations }))
}

fn restrict(alpha: &[usize], m: usize) -> Outcome<Value> {
    let alpha = SurjectionAlpha::new(alpha.to_vec())?;
    let r = build_from_alpha(&alpha, m)?;
    let mut out = to_value(&r);
    if let Restriction::Parabolic(p) = &r {
        let emb = DiagonalEmbedding::new(p.graph.clone(), p.flag_type_q.clone())?;
        if emb.target() != &alpha.flag_type() {
            return Err(Failure::Consistency("graph target differs from the type of alpha".into()));
        }
        out["unipotent_inclusion"] = json!(unipotent_inclusion(&alpha, m)?);
        out["flag_type_p"] = to_value(&alpha.flag_type());
    }
    Ok(out)
}

fn embed(args: &EmbeddingArgs, flag: Option<&str>, trials: usize, seed: u64) -> Outcome<Value> {
    let emb = load_embedding(args)?;
    let flag: Flag = match flag {
        Some(f) => load(f, "flag")?,
        None => random_flag(emb.source(), &mut rng(seed)),
    };
    let image = emb.eval(&flag)?;
    let eq = equivariance_check(&emb, trials, seed)?;
    if eq.failures > 0 {
        return Err(Failure::Consistency(format!("equivariance fails on trials {:?}", eq.failed_trials)));
    }
    Ok(json!({
        "verdict": "Embedded",
        "graph": emb.graph(),
        "source_type": emb.source(),
        "target_type": emb.target(),
        "flag": flag,
        "image": image,
        "pullback": picard_pullback(&emb),
        "linear": is_linear_graph(&emb),
        "standard_extension": is_standard_extension_graph(&emb),
        "constant_spaces": constant_spaces(&emb),
        "equivariance": eq,
    }))
}

fn picard(graph: &str) -> Outcome<Value> {
    let g = load_graph(graph)?;
    let report = validate(&g);
    if !report.is_valid() {
        return Err(Failure::Input(format!("not an E-graph: {report}")));
    }
    let rows = pullback_rows(&g);
    let linear = rows.iter().all(|r| r.iter().sum::<u64>() <= 1);
    let graph_linear = diagflag::diagembed::is_linear_egraph(&g);
    if linear != graph_linear {
        return Err(Failure::Consistency("pullback and graph disagree on linearity".into()));
    }
    Ok(json!({
        "verdict": if linear { "Linear" } else { "NotLinear" },
        "matrix": rows,
        "linear": linear,
        "standard_extension": is_standard_extension_egraph(&g),
    }))
}

fn classify(args: &EmbeddingArgs, window: usize, seed: u64) -> Outcome<Value> {
    let emb = load_embedding(args)?;
    let config = ClassifyConfig { seed, window, ..ClassifyConfig::default() };
    let c = classify_bruteforce(&emb, &config)?;
    let graph = is_standard_extension_graph(&emb);
    if graph != c.is_se() || (graph && !c.is_strict()) {
        return Err(Failure::Consistency(format!(
            "graph criterion says {graph} but the search found {}",
            c.label()
        )));
    }
    let mut out = to_value(&c);
    out["verdict"] = json!(c.label());
    out["graph_criterion"] = json!(graph);
    Ok(out)
}

fn constants(args: &EmbeddingArgs, window: usize, seed: u64) -> Outcome<Value> {
    let emb = load_embedding(args)?;
    let sampled = sample_constants(&emb, window, &mut rng(seed))?;
    let closed = constant_spaces(&emb);
    if !sampled.stabilized {
        return Err(Failure::Consistency("sampling did not stabilize".into()));
    }
    if sampled.constants != closed {
        return Err(Failure::Consistency("sampled constants differ from the closed form".into()));
    }
    Ok(json!({ "verdict": "Agree", "sampled": sampled, "closed_form": closed }))
}

fn admissibility(gft: &str, sn: &str, bound: u64) -> Outcome<Value> {
    let gft: GeneralizedFlagType = load(gft, "generalized flag type")?;
    let sn: SupernaturalNumber = load(sn, "supernatural number")?;
    let verdict = admissible(&gft, &sn, bound);
    match &verdict {
        Admissibility::Admissible { certificate } => {
            let steps = certificate.verified_prefix_length();
            if let AdmissibilityCertificate::Periodic { .. } = certificate {
                certificate.verify(&gft, steps).map_err(Failure::Consistency)?;
            }
        }
        Admissibility::NotAdmissible { proof } => proof.verify(&gft, &sn).map_err(Failure::Consistency)?,
        Admissibility::Unknown { .. } => {}
    }
    Ok(to_value(&verdict))
}

fn factor(graph: Option<&str>, sn_graph: Option<&str>, threading: Option<&str>, levels: usize) -> Outcome<Value> {
    if let Some(graph) = graph {
        let g = load_graph(graph)?;
        let factors = factor_linear_egraph(&g)?;
        if !pullback_additivity(&g, &factors) {
            return Err(Failure::Consistency("pullback is not the sum of the factor pullbacks".into()));
        }
        return Ok(json!({ "verdict": "Factored", "factors": factors, "pullback_additivity": true }));
    }
    let (Some(sg), Some(threading)) = (sn_graph, threading) else {
        return Err(Failure::Input("give --graph, or --sn-graph with --threading".into()));
    };
    let sg: SnGraph = load(sg, "s-graph")?;
    let threading: Vec<BTreeMap<usize, usize>> = load(threading, "threading")?;
    let parts = decompose_sn_graph(&sg, levels, &threading)?;
    for (n, g) in (1..=levels).filter_map(|n| sg.level(n).map(|g| (n, g))) {
        let factors = factor_linear_egraph(g)?;
        if !pullback_additivity(g, &factors) {
            return Err(Failure::Consistency(format!("pullback additivity fails at level {n}")));
        }
    }
    let reports: Vec<Value> = parts.iter().map(|p| to_value(&p.validate(levels))).collect();
    Ok(json!({ "verdict": "Decomposed", "factors": parts, "validation": reports }))
}

fn oracle(n_max: usize, d: &[usize]) -> Outcome<Value> {
    let report = oracle_sweep(n_max, d)?;
    if !report.disagreements.is_empty() {
        let text = serde_json::to_string(&report).expect("serializable");
        return Err(Failure::Consistency(format!("oracle disagreements: {text}")));
    }
    let mut out = to_value(&report);
    out["verdict"] = json!("Agree");
    Ok(out)
}

fn exhaust(
    sigma: Option<&[usize]>,
    n_max: Option<usize>,
    gft: Option<&str>,
    sn: Option<&str>,
    spec: Option<&str>,
    levels: usize,
) -> Outcome<Value> {
    if let (Some(sigma), Some(n_max)) = (sigma, n_max) {
        let steps = canonical_exhaustion(sigma, n_max)?;
        return Ok(json!({ "verdict": "Exhausted", "steps": steps }));
    }
    let (Some(gft), Some(sn)) = (gft, sn) else {
        return Err(Failure::Input("give --sigma with --n-max, or --gft with --sn".into()));
    };
    let gft: GeneralizedFlagType = load(gft, "generalized flag type")?;
    let sn: SupernaturalNumber = load(sn, "supernatural number")?;
    let spec = match spec {
        Some(s) => load(s, "exhaustion")?,
        None => {
            let infinite = gft.ordered().map_or(0, |o| o.iter().filter(|q| **q == QuotientDim::Infinite).count());
            ExhaustionSpec::standard(&sn, gft.finite_quotients().iter().sum::<u64>() + infinite as u64)?
        }
    };
    let r = build_sn_graph(&gft, &sn, &spec)?;
    let report = r.sn_graph.validate(levels);
    if !report.is_valid() {
        return Err(Failure::Consistency(format!("constructed s-graph is invalid: {report}")));
    }
    let types = r.level_types(levels)?;
    Ok(json!({ "verdict": "Realized", "sn_graph": r.sn_graph, "level_types": types }))
}

fn dot(graph: &str, digest: &str) -> Outcome<String> {
    let g = load_graph(graph)?;
    Ok(format!("// schema_version={SCHEMA_VERSION} self_test_digest={digest}\n{}", to_dot(&g)))
}

fn run(cli: &Cli, digest: &str) -> Outcome<Report> {
    let seed = cli.seed;
    let value = match &cli.command {
        Command::ValidateEgraph { graph } => validate_egraph(graph)?,
        Command::Restrict { alpha, m } => restrict(alpha, *m)?,
        Command::Embed { embedding, flag, trials } => embed(embedding, flag.as_deref(), *trials, seed)?,
        Command::Picard { graph } => picard(graph)?,
        Command::Classify { embedding, window } => classify(embedding, *window, seed)?,
        Command::Constants { embedding, window } => constants(embedding, *window, seed)?,
        Command::Admissible { gft, sn, bound } => admissibility(gft, sn, *bound)?,
        Command::Factor { graph, sn_graph, threading, levels } => {
            factor(graph.as_deref(), sn_graph.as_deref(), threading.as_deref(), *levels)?
        }
        Command::Oracle { n_max, d } => oracle(*n_max, d)?,
        Command::Exhaust { sigma, n_max, gft, sn, spec, levels } => {
            exhaust(sigma.as_deref(), *n_max, gft.as_deref(), sn.as_deref(), spec.as_deref(), *levels)?
        }
        Command::Dot { graph } => return Ok(Report::Text(dot(graph, digest)?)),
    };
    Ok(Report::Json(value))
}

fn finish(mut value: Value, digest: Option<&str>) -> String {
    let obj = value.as_object_mut().expect("reports are objects");
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("self_test_digest".into(), json!(digest));
    // serde_json keeps keys sorted, which makes the output canonical
    let sorted: Map<String, Value> = std::mem::take(obj);
    let mut text = serde_json::to_string_pretty(&Value::Object(sorted)).expect("serializable");
    text.push('\n');
    text
}

fn emit(cli: &Cli, text: &str) -> ExitCode {
    match &cli.output {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                ExitCode::from(1)
            }
        },
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let digest = match self_test_digest() {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            print!("{}", finish(json!({ "verdict": "Error", "kind": "consistency", "message": e.to_string() }), None));
            return ExitCode::from(2);
        }
    };
    let (text, code) = match run(&cli, &digest) {
        Ok(Report::Json(v)) => (finish(v, Some(&digest)), 0),
        Ok(Report::Text(t)) => (t, 0),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            (finish(json!({ "verdict": "Error", "kind": "input", "message": msg }), Some(&digest)), 1)
        }
        Err(Failure::Consistency(msg)) => {
            eprintln!("error: {msg}");
            (finish(json!({ "verdict": "Error", "kind": "consistency", "message": msg }), Some(&digest)), 2)
        }
    };
    let written = emit(&cli, &text);
    if code == 0 {
        written
    } else {
        ExitCode::from(code)
    }
}
