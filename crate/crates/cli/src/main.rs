use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use hypercut::cebaseline::{expand, sweep_cut, Normalization};
use hypercut::cutmatch::{CutMatch, CutMatchConfig, CutPlayer, IterationRecord};
use hypercut::embed::{build_auxiliary, flow_embed, lighter_side, verify_embedding, BipartiteCertificate};
use hypercut::hypergraph::{Hypergraph, SplittingFunction, SplittingKind};
use hypercut::instance::{ingest, Instance, SplittingSpec, WeightChoice};
use hypercut::io::{parse_hmetis, parse_node_weights, write_edge_list, RawHypergraph};
use hypercut::maxflow::max_flow;
use hypercut::oracle::brute_min_expansion;
use hypercut::reduction::{build_preserver, ReducedGraph};
use hypercut::spectral::EigenConfig;
use hypercut::Error;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::EigenNoConvergence { .. }) => 4,
            CliError::Core(
                Error::InternalBoundExceeded(_)
                | Error::NotSaturating { .. }
                | Error::ConservationViolation { .. }
                | Error::MissingDecomposition,
            )
            | CliError::Verification(_) => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "hypercut", version, about = "Hypergraph π-expansion with certified lower bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the cut-matching solver.
    Solve(SolveArgs),
    /// Exact minimum expansion by enumeration (small inputs only).
    Oracle(InputArgs),
    /// Replay the certificates recorded in a trace and check their congestion.
    Verify(VerifyArgs),
    /// Clique-expansion spectral sweep baseline.
    Ce(CeArgs),
    /// Build the cut preserver and dump it as an edge list.
    Reduce(ReduceArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Hypergraph in hMETIS format.
    #[arg(long)]
    input: PathBuf,
    /// aon | delta-linear:D | limi:A | custom:PATH
    #[arg(long, default_value = "aon")]
    splitting: String,
    /// unit | degree | file:PATH
    #[arg(long, default_value = "unit")]
    weights: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlayerArg {
    Spectral,
    Heatkernel,
    Random,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of rounds, or `auto` for ⌈5·log₂ n⌉.
    #[arg(long, default_value = "auto")]
    iters: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "spectral")]
    cut_player: PlayerArg,
    /// Heat-kernel time.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Heat-kernel Taylor truncation order.
    #[arg(long, default_value_t = 12)]
    hk_order: usize,
    /// Check every certificate's congestion against random bisections.
    #[arg(long)]
    verify_embeddings: bool,
    /// Random bisections per certificate for --verify-embeddings.
    #[arg(long, default_value_t = 20)]
    verify_samples: usize,
    /// Write per-round records as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the normalized cut preserver as an edge list.
    #[arg(long)]
    dump_reduced: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    trace: PathBuf,
    /// Random bisections per certificate.
    #[arg(long, default_value_t = 20)]
    bisections: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormalizeArg {
    Graph,
    Hypergraph,
}

#[derive(Args, Debug)]
struct CeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "graph")]
    normalize: NormalizeArg,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "aon")]
    splitting: String,
    #[arg(long)]
    dump_reduced: Option<PathBuf>,
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Lines `k w_1 … w_⌊k/2⌋`; `#` starts a comment.
fn parse_custom_splitting(text: &str) -> CliResult<SplittingSpec> {
    let mut table = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: idx + 1, message };
        let mut toks = body.split_whitespace();
        let k: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err("expected a hyperedge size".into()))?;
        let w = toks
            .map(|t| t.parse::<f64>().map_err(|_| parse_err(format!("invalid penalty `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        SplittingFunction::from_penalties(k, w.clone())?;
        if table.insert(k, w).is_some() {
            return Err(parse_err(format!("size {k} listed twice")).into());
        }
    }
    Ok(SplittingSpec::PerSize(table))
}

fn parse_splitting(arg: &str) -> CliResult<(SplittingSpec, String)> {
    let kind = match arg.split_once(':') {
        None if arg == "aon" => SplittingKind::AllOrNothing,
        Some(("delta-linear", d)) => {
            SplittingKind::DeltaLinear(d.parse().map_err(|_| CliError::Usage(format!("invalid delta `{d}`")))?)
        }
        Some(("limi", a)) => {
            SplittingKind::Limi(a.parse().map_err(|_| CliError::Usage(format!("invalid alpha `{a}`")))?)
        }
        Some(("custom", path)) => {
            let spec = parse_custom_splitting(&read_text(Path::new(path))?)?;
            return Ok((spec, arg.to_string()));
        }
        _ => return Err(CliError::Usage(format!("unknown splitting `{arg}`"))),
    };
    // reject bad parameters before reading the input
    SplittingFunction::new(&kind, 2)?;
    let label = kind.to_string();
    Ok((SplittingSpec::Family(kind), label))
}

fn parse_weights(arg: &str, n: usize) -> CliResult<WeightChoice> {
    match arg.split_once(':') {
        None if arg == "unit" => Ok(WeightChoice::Unit),
        None if arg == "degree" => Ok(WeightChoice::Degree),
        Some(("file", path)) => Ok(WeightChoice::Explicit(parse_node_weights(&read_text(Path::new(path))?, n)?)),
        _ => Err(CliError::Usage(format!("unknown weights `{arg}`"))),
    }
}

struct Loaded {
    raw: RawHypergraph,
    instance: Instance,
    splitting: String,
    weights: String,
}

fn load(args: &InputArgs) -> CliResult<Loaded> {
    let (spec, splitting) = parse_splitting(&args.splitting)?;
    let raw = parse_hmetis(&read_text(&args.input)?)?;
    let choice = parse_weights(&args.weights, raw.n)?;
    let instance = Instance::prepare(&raw, &spec, &choice)?;
    Ok(Loaded { raw, instance, splitting, weights: choice.label().to_string() })
}

fn one_based(inst: &Instance, set: &[usize]) -> Vec<usize> {
    inst.to_original(set).into_iter().map(|v| v + 1).collect()
}

fn input_stats(loaded: &Loaded) -> serde_json::Value {
    let h = &loaded.instance.hypergraph;
    let mu = h.total_size();
    json!({
        "n": h.node_count(),
        "m": h.edge_count(),
        "avg_edge_size": mu as f64 / h.edge_count() as f64,
        "mu": mu,
        "raw_n": loaded.raw.n,
        "raw_m": loaded.raw.edges.len(),
    })
}

/// Finite floats as numbers, infinities as `null`.
fn num(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

#[derive(Serialize)]
struct TraceLine {
    iteration: usize,
    /// 1-based input ids.
    bisection: Vec<usize>,
    alpha: f64,
    alpha_internal: f64,
    phi: f64,
    best_phi: f64,
    lambda2: f64,
    gamma: f64,
    lower_bound: f64,
    rho: Option<f64>,
    flow_solves: usize,
    seconds: f64,
}

fn trace_line(inst: &Instance, r: &IterationRecord) -> TraceLine {
    TraceLine {
        iteration: r.iteration,
        bisection: one_based(inst, &r.bisection),
        alpha: inst.to_input_scale(r.alpha),
        alpha_internal: r.alpha,
        phi: inst.to_input_scale(r.phi),
        best_phi: inst.to_input_scale(r.best_phi),
        lambda2: r.lambda2,
        gamma: r.gamma,
        lower_bound: inst.to_input_scale(r.lower_bound),
        rho: r.rho.is_finite().then_some(r.rho),
        flow_solves: r.flow_solves,
        seconds: r.seconds,
    }
}

fn random_proper_subset(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    loop {
        let set: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !set.is_empty() && set.len() < n {
            return set;
        }
    }
}

/// Worst `congestion·α` over `samples` random bisections.
fn check_certificate(
    g: &ReducedGraph,
    cert: &BipartiteCertificate,
    samples: usize,
    rng: &mut impl Rng,
) -> CliResult<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let set = random_proper_subset(cert.node_count(), rng);
        worst = worst.max(verify_embedding(g, cert, &set)? * cert.alpha());
    }
    Ok(worst)
}

fn solve(args: &SolveArgs) -> CliResult<serde_json::Value> {
    let started = Instant::now();
    let loaded = load(&args.input)?;
    let inst = &loaded.instance;
    let iterations = match args.iters.as_str() {
        "auto" => None,
        s => Some(s.parse::<usize>().map_err(|_| CliError::Usage(format!("invalid --iters `{s}`")))?),
    };
    let player = match args.cut_player {
        PlayerArg::Spectral => CutPlayer::Spectral,
        PlayerArg::Heatkernel => CutPlayer::HeatKernel { tau: args.tau, order: args.hk_order },
        PlayerArg::Random => CutPlayer::Random,
    };
    let config = CutMatchConfig {
        iterations,
        seed: args.seed,
        player,
        retain_paths: args.verify_embeddings,
        eigen: EigenConfig::default(),
    };
    let mut driver = CutMatch::new(&inst.hypergraph, &inst.weights, config)?;
    if let Some(path) = &args.dump_reduced {
        let mut out = create(path)?;
        write_edge_list(&mut out, driver.reduced())
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(1));
    let mut worst_ratio: f64 = 0.0;
    let rounds = driver.iterations();
    for _ in 0..rounds {
        let step = driver.step()?;
        if args.verify_embeddings {
            let ratio = check_certificate(driver.reduced(), &step.certificate, args.verify_samples, &mut rng)?;
            worst_ratio = worst_ratio.max(ratio);
        }
    }
    let state = driver.state();
    if args.verify_embeddings && worst_ratio > 1.0 + 1e-9 {
        return Err(CliError::Verification(format!("congestion exceeded 1/alpha by factor {worst_ratio}")));
    }
    if let Some(path) = &args.trace {
        let mut out = create(path)?;
        for r in state.records() {
            serde_json::to_writer(&mut out, &trace_line(inst, r))?;
            writeln!(out).map_err(|source| CliError::Io { path: path.clone(), source })?;
        }
        out.flush().map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    let phi = inst.to_input_scale(state.best_phi());
    let lower_bound = inst.to_input_scale(state.lower_bound());
    eprintln!(
        "n = {}, m = {}, {} rounds: phi(S*) = {:.6}, lower bound = {:.6}, rho = {:.3}",
        inst.hypergraph.node_count(),
        inst.hypergraph.edge_count(),
        rounds,
        phi,
        lower_bound,
        state.approx_ratio()
    );
    let mut report = json!({
        "input": input_stats(&loaded),
        "objective": loaded.weights,
        "splitting": loaded.splitting,
        "seed": args.seed,
        "iterations": rounds,
        "cut_player": format!("{:?}", args.cut_player).to_lowercase(),
        "set": one_based(inst, state.best_set()),
        "phi": phi,
        "lower_bound": lower_bound,
        "rho": num(state.approx_ratio()),
        "alphas": state.alphas().iter().map(|&a| inst.to_input_scale(a)).collect::<Vec<_>>(),
        "wall_seconds": started.elapsed().as_secs_f64(),
    });
    if args.verify_embeddings {
        report["verification"] = json!({ "samples": args.verify_samples, "max_congestion_ratio": worst_ratio });
    }
    Ok(report)
}

fn oracle(args: &InputArgs) -> CliResult<serde_json::Value> {
    let loaded = load(args)?;
    let inst = &loaded.instance;
    let (opt, set) = brute_min_expansion(&inst.hypergraph, &inst.weights)?;
    let opt = inst.to_input_scale(opt);
    eprintln!("OPT = {opt:.6}");
    Ok(json!({ "opt": opt, "set": one_based(inst, &set) }))
}

fn verify(args: &VerifyArgs) -> CliResult<serde_json::Value> {
    let loaded = load(&args.input)?;
    let inst = &loaded.instance;
    let g = build_preserver(&inst.hypergraph)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_regularity: f64 = 0.0;
    let mut count = 0;
    for (idx, line) in read_text(&args.trace)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: serde_json::Value = serde_json::from_str(line)?;
        let bad = |what: &str| Error::Parse { line: idx + 1, message: format!("trace record lacks `{what}`") };
        let alpha = record["alpha_internal"].as_f64().ok_or_else(|| bad("alpha_internal"))?;
        let raw: Vec<usize> = record["bisection"]
            .as_array()
            .ok_or_else(|| bad("bisection"))?
            .iter()
            .map(|v| v.as_u64().filter(|&v| v >= 1).map(|v| v as usize - 1).ok_or_else(|| bad("bisection")))
            .collect::<Result<_, _>>()?;
        let side = lighter_side(&inst.weights, &inst.from_original(&raw))?;
        let aux = build_auxiliary(&g, &inst.weights, &side, alpha)?;
        let flow = max_flow(aux.network());
        let cert = flow_embed(&aux, &flow, true)?;
        worst_regularity = worst_regularity.max(cert.regularity_error(&inst.weights));
        worst_ratio = worst_ratio.max(check_certificate(&g, &cert, args.bisections, &mut rng)?);
        count += 1;
    }
    let ok = worst_ratio <= 1.0 + 1e-9 && worst_regularity <= 1e-9;
    eprintln!(
        "{count} certificates, {} bisections each: max congestion x alpha = {worst_ratio:.12}, regularity error = {worst_regularity:.3e}",
        args.bisections
    );
    let report = json!({
        "certificates": count,
        "bisections": args.bisections,
        "max_congestion_ratio": worst_ratio,
        "max_regularity_error": worst_regularity,
        "ok": ok,
    });
    if !ok {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Err(CliError::Verification("a certificate exceeded its congestion bound".into()));
    }
    Ok(report)
}

fn ce(args: &CeArgs) -> CliResult<serde_json::Value> {
    let started = Instant::now();
    let loaded = load(&args.input)?;
    let inst = &loaded.instance;
    let expansion = expand(&inst.hypergraph)?;
    let normalization = match args.normalize {
        NormalizeArg::Graph => Normalization::Graph,
        NormalizeArg::Hypergraph => Normalization::Hypergraph,
    };
    let out = sweep_cut(&expansion, &inst.hypergraph, &inst.weights, normalization, &EigenConfig::default())?;
    let phi = inst.to_input_scale(out.phi);
    eprintln!("clique expansion sweep: phi = {phi:.6}, max distortion = {:.4}", expansion.max_distortion());
    Ok(json!({
        "input": input_stats(&loaded),
        "objective": loaded.weights,
        "splitting": loaded.splitting,
        "normalization": format!("{:?}", args.normalize).to_lowercase(),
        "set": one_based(inst, &out.set),
        "phi": phi,
        "max_distortion": expansion.max_distortion(),
        "wall_seconds": started.elapsed().as_secs_f64(),
    }))
}

fn reduce(args: &ReduceArgs) -> CliResult<serde_json::Value> {
    let (spec, splitting) = parse_splitting(&args.splitting)?;
    let raw = parse_hmetis(&read_text(&args.input)?)?;
    let h: Hypergraph = ingest(&raw, &spec)?.hypergraph;
    let g = build_preserver(&h)?;
    if let Some(path) = &args.dump_reduced {
        let mut out = create(path)?;
        write_edge_list(&mut out, &g)
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    eprintln!("reduced graph: {} nodes, {} arcs", g.node_count(), g.arc_count());
    Ok(json!({
        "splitting": splitting,
        "original_nodes": g.original_count(),
        "nodes": g.node_count(),
        "arcs": g.arc_count(),
        "gadgets": g.gadgets().len(),
    }))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Verify(a) => verify(a),
        Command::Ce(a) => ce(a),
        Command::Reduce(a) => reduce(a),
    };
    match result.and_then(|report| Ok(serde_json::to_string_pretty(&report)?)) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
