//! `stl` — command-line front end for the stable-tree library.
//!
//! Every subcommand writes its data to `--out FILE` (or standard output) and
//! a one-line summary to standard error. Data outputs start with provenance:
//! CSV files carry `#`-prefixed header lines, JSON documents carry
//! `tool`, `version`, `alpha`, `seed` and `rng` fields. Output bytes depend
//! only on the arguments, so identical invocations give identical files.
//!
//! Randomness: one global 64-bit seed (`--seed`, falling back to the
//! `STL_SEED` environment variable, then to 1). Replica `r` of a run uses the
//! ChaCha8 stream number `r` of the generator seeded with the global seed.
//!
//! Exit codes: 0 success, 1 runtime error, 2 usage error, 3 verification
//! failure.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stable_tree::discrete_trees::{
    grow_tree, prufer_decode, prufer_encode, relabel_uniformly, size_biased_reorder, stable_offspring,
    tree_statistics, Codeword, ConditionedDegreeSampler, RootedLabelledTree,
};
use stable_tree::levy_paths::{
    importance_estimate, quadratic_variation_bound, sigma_tilde_laplace, sigma_tilde_mean, Estimate,
};
use stable_tree::linebreak::{
    icrt_intensity, sample_line_break_tree, sample_stable_tree_ensemble, IntensityPath, LineBreakTree, WeightedTree,
};
use stable_tree::rng::replica_rng;
use stable_tree::verify::{run_suite, SuiteConfig, SuiteReport, SUITES};
use stable_tree::{Error, StableModel};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const RNG_NOTE: &str = "ChaCha8; replica r uses stream r of the generator seeded with the global seed";

#[derive(Parser, Debug)]
#[command(name = "stl", version, about = "Line-breaking constructions of the alpha-stable tree")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the stable density p on a grid (CSV: x, p, log_p).
    Density(DensityArgs),
    /// Importance-sampling estimates for the tilted subordinator (CSV).
    Subordinator(SubordinatorArgs),
    /// Weighted ensemble of alpha-stable line-breaking trees (JSON).
    TreeContinuous(TreeContinuousArgs),
    /// Line-breaking trees of the Brownian tree, intensity t (JSON).
    TreeCrt(TreeCrtArgs),
    /// Line-breaking trees of an inhomogeneous continuum random tree (JSON).
    TreeIcrt(TreeIcrtArgs),
    /// Conditioned Bienaymé tree grown from stable offspring (JSON).
    TreeDiscrete(TreeDiscreteArgs),
    /// Reverse Prüfer codec on standard input.
    Prufer(PruferArgs),
    /// Run verification suites; exit status 3 if any case fails.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Stability index, in (1, 2).
    #[arg(long, default_value_t = 1.5, value_parser = parse_alpha)]
    alpha: f64,
    /// Global seed.
    #[arg(long, env = "STL_SEED", default_value_t = 1)]
    seed: u64,
    /// Output file (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[command(flatten)]
    common: Common,
    /// First grid point.
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    from: f64,
    /// Last grid point.
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    to: f64,
    /// Grid spacing.
    #[arg(long, default_value_t = 0.1, value_parser = parse_positive)]
    step: f64,
}

#[derive(Args, Debug)]
struct SubordinatorArgs {
    #[command(flatten)]
    common: Common,
    /// Time t.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    t: f64,
    /// Small-jump cutoff.
    #[arg(long, default_value_t = 1e-4, value_parser = parse_positive)]
    eps: f64,
    /// Number of paths.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
    replicas: u64,
    /// Statistic: `mean`, `laplace:L` or `qvar`.
    #[arg(long, default_value = "mean", value_parser = parse_stat)]
    stat: Stat,
}

#[derive(Debug, Clone, Copy)]
enum Stat {
    Mean,
    Laplace(f64),
    Qvar,
}

#[derive(Args, Debug)]
struct TreeContinuousArgs {
    #[command(flatten)]
    common: Common,
    /// Number of cut points per tree.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Simulation horizon T.
    #[arg(long, default_value_t = 6.0, value_parser = parse_positive)]
    horizon: f64,
    /// Small-jump cutoff.
    #[arg(long, default_value_t = 1e-4, value_parser = parse_positive)]
    eps: f64,
    /// Number of trees.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    replicas: u64,
}

#[derive(Args, Debug)]
struct TreeCrtArgs {
    /// Global seed.
    #[arg(long, env = "STL_SEED", default_value_t = 1)]
    seed: u64,
    /// Output file (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of cut points per tree.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Simulation horizon T.
    #[arg(long, default_value_t = 40.0, value_parser = parse_positive)]
    horizon: f64,
    /// Number of trees.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    replicas: u64,
}

#[derive(Args, Debug)]
struct TreeIcrtArgs {
    #[command(flatten)]
    crt: TreeCrtArgs,
    /// Whitespace-separated reals: θ₀ followed by the atoms θ₁ ≥ θ₂ ≥ … > 0
    /// (lines starting with `#` are ignored).
    #[arg(long)]
    theta: PathBuf,
}

#[derive(Args, Debug)]
struct TreeDiscreteArgs {
    #[command(flatten)]
    common: Common,
    /// Number of vertices.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// How many branch times, attach times and top degrees to report.
    #[arg(long = "stats", default_value_t = 5)]
    k: usize,
}

#[derive(Args, Debug)]
struct PruferArgs {
    /// Direction.
    #[arg(value_enum)]
    mode: PruferMode,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PruferMode {
    /// Read a tree (parent list with 0 at the root, or the `decode` output
    /// format) and print its codeword.
    Encode,
    /// Read a codeword and print the tree as `root r; v←parent; …`.
    Decode,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite to run (see `--list`).
    #[arg(long, conflicts_with_all = ["all", "list"], required_unless_present_any = ["all", "list"])]
    suite: Option<String>,
    /// Run every registered suite.
    #[arg(long)]
    all: bool,
    /// List the registered suites and exit.
    #[arg(long)]
    list: bool,
    /// Stability index, in (1, 2).
    #[arg(long, default_value_t = 1.5, value_parser = parse_alpha)]
    alpha: f64,
    /// Global seed.
    #[arg(long, env = "STL_SEED", default_value_t = 1)]
    seed: u64,
    /// Small-jump cutoff for subordinator paths.
    #[arg(long, default_value_t = 1e-4, value_parser = parse_positive)]
    eps: f64,
    /// Multiplier on the documented replica counts (for quick smoke runs).
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    scale: f64,
    /// Also write the reports as JSON to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if a > 1.0 && a < 2.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in (1, 2), got {a}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a positive number, got {x}"))
    }
}

fn parse_stat(s: &str) -> Result<Stat, String> {
    match s {
        "mean" => Ok(Stat::Mean),
        "qvar" => Ok(Stat::Qvar),
        _ => match s.strip_prefix("laplace:") {
            Some(l) => {
                let lambda: f64 = l.parse().map_err(|e| format!("bad Laplace argument: {e}"))?;
                if lambda >= 0.0 {
                    Ok(Stat::Laplace(lambda))
                } else {
                    Err("Laplace argument must be nonnegative".into())
                }
            }
            None => Err(format!("unknown statistic {s:?}; use mean, laplace:L or qvar")),
        },
    }
}

/// Failure of a subcommand, mapped to an exit status.
enum Failure {
    Runtime(String),
    Usage(String),
    SuiteFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match cli.command {
        Command::Density(a) => density(a),
        Command::Subordinator(a) => subordinator(a),
        Command::TreeContinuous(a) => tree_continuous(a),
        Command::TreeCrt(a) => tree_crt(a),
        Command::TreeIcrt(a) => tree_icrt(a),
        Command::TreeDiscrete(a) => tree_discrete(a),
        Command::Prufer(a) => prufer(a),
        Command::Verify(a) => verify(a),
    };
    let elapsed = start.elapsed().as_secs_f64();
    match outcome {
        Ok(()) => {
            eprintln!("stl: done in {elapsed:.2}s");
            ExitCode::SUCCESS
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("stl: error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("stl: usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::SuiteFailed) => {
            eprintln!("stl: verification failed ({elapsed:.2}s)");
            ExitCode::from(3)
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_provenance(command: &str, alpha: f64, seed: u64) -> String {
    format!("# tool: stl {VERSION}\n# command: {command}\n# alpha: {alpha}\n# seed: {seed}\n# rng: {RNG_NOTE}\n")
}

fn read_stdin() -> Result<String, Failure> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s)?;
    Ok(s)
}

/// Whitespace-separated tokens, skipping `#` comment lines.
fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.trim_start().starts_with('#')).flat_map(str::split_whitespace)
}

fn density(a: DensityArgs) -> CliResult {
    if a.from.is_nan() || a.to.is_nan() || a.from > a.to {
        return Err(Failure::Usage(format!("--from {} exceeds --to {}", a.from, a.to)));
    }
    let model = StableModel::new(a.common.alpha)?;
    // Tolerate rounding in (to − from)/step.
    let count = ((a.to - a.from) / a.step + 1e-9).floor() as usize + 1;
    let mut out = csv_provenance("density", a.common.alpha, a.common.seed);
    out.push_str("x,p,log_p\n");
    for i in 0..count {
        let x = round_grid(a.from + i as f64 * a.step);
        let lp = model.log_density(x)?;
        out.push_str(&format!("{x},{:e},{lp}\n", lp.exp()));
    }
    emit(&a.common.out, &out)?;
    eprintln!("stl: density at {count} points, alpha {}", a.common.alpha);
    Ok(())
}

/// Snap a grid point to 12 decimals so that `0.1·3` prints as `0.3`.
fn round_grid(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn subordinator(a: SubordinatorArgs) -> CliResult {
    let model = StableModel::new(a.common.alpha)?;
    let t = a.t;
    let (name, est, oracle, kind): (String, Estimate, f64, &str) = match a.stat {
        Stat::Mean => (
            "mean".into(),
            importance_estimate(&model, t, a.replicas, a.eps, a.common.seed, |p| p.value(t))?,
            sigma_tilde_mean(&model, t)?,
            "exact",
        ),
        Stat::Laplace(l) => (
            format!("laplace:{l}"),
            importance_estimate(&model, t, a.replicas, a.eps, a.common.seed, |p| (-l * p.value(t)).exp())?,
            sigma_tilde_laplace(&model, l, t)?,
            "exact",
        ),
        Stat::Qvar => {
            let mut err = None;
            let est = importance_estimate(&model, t, a.replicas, a.eps, a.common.seed, |p| {
                p.quadratic_variation(t).unwrap_or_else(|e| {
                    err.get_or_insert(e);
                    f64::NAN
                })
            })?;
            if let Some(e) = err {
                return Err(e.into());
            }
            ("qvar".into(), est, quadratic_variation_bound(&model)?, "upper_bound")
        }
    };
    let mut out = csv_provenance("subordinator", a.common.alpha, a.common.seed);
    out.push_str(&format!("# t: {t}\n# eps: {}\n# replicas: {}\n", a.eps, a.replicas));
    out.push_str("stat,t,estimate,stderr,oracle,oracle_kind,mean_weight,effective_sample_size\n");
    out.push_str(&format!(
        "{name},{t},{},{},{oracle},{kind},{},{}\n",
        est.mean, est.std_err, est.mean_weight, est.effective_sample_size
    ));
    emit(&a.common.out, &out)?;
    eprintln!("stl: {name} at t = {t}: {:.6} ± {:.6} (oracle {oracle:.6})", est.mean, est.std_err);
    Ok(())
}

#[derive(Serialize)]
struct TreeRecord {
    cuts: Vec<f64>,
    attachments: Vec<f64>,
    parents: Vec<usize>,
    weight: f64,
    complete: bool,
}

impl TreeRecord {
    fn new(tree: Option<&LineBreakTree>, weight: f64) -> Self {
        match tree {
            Some(t) => Self {
                cuts: t.cuts().to_vec(),
                attachments: t.attachments().to_vec(),
                parents: t.parents().to_vec(),
                weight,
                complete: true,
            },
            None => Self { cuts: vec![], attachments: vec![], parents: vec![], weight, complete: false },
        }
    }
}

#[derive(Serialize)]
struct TreeFile<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    rng: &'static str,
    /// Stability index; 2 for the Brownian tree, absent for the ICRT.
    alpha: Option<f64>,
    seed: u64,
    k: u64,
    horizon: f64,
    trees: Vec<TreeRecord>,
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, doc: &T) -> CliResult {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    emit(out, &text)
}

fn tree_continuous(a: TreeContinuousArgs) -> CliResult {
    let model = StableModel::new(a.common.alpha)?;
    let ens = sample_stable_tree_ensemble(&model, a.k as usize, a.horizon, a.eps, a.replicas as usize, a.common.seed)?;
    let trees: Vec<TreeRecord> =
        ens.trees.iter().map(|WeightedTree { tree, weight, .. }| TreeRecord::new(tree.as_ref(), *weight)).collect();
    let doc = TreeFile {
        tool: "stl",
        version: VERSION,
        command: "tree-continuous",
        rng: RNG_NOTE,
        alpha: Some(a.common.alpha),
        seed: a.common.seed,
        k: a.k,
        horizon: a.horizon,
        trees,
    };
    write_json(&a.common.out, &doc)?;
    eprintln!(
        "stl: {} trees, mean weight {:.4}, weighted missing mass {:.3e}",
        ens.replicas(),
        ens.mean_weight(),
        ens.missing_mass()
    );
    Ok(())
}

/// Unweighted line-breaking trees; `intensity` builds the path of replica `j`.
fn unweighted_trees<F>(a: &TreeCrtArgs, mut intensity: F) -> Result<Vec<TreeRecord>, Failure>
where
    F: FnMut(&mut stable_tree::rng::SimRng) -> Result<IntensityPath, Error>,
{
    let mut trees = Vec::with_capacity(a.replicas as usize);
    for j in 0..a.replicas {
        let mut rng = replica_rng(a.seed, j);
        let path = intensity(&mut rng)?;
        let tree = sample_line_break_tree(&path, a.k as usize, &mut rng)?;
        trees.push(TreeRecord::new(tree.as_ref(), 1.0));
    }
    Ok(trees)
}

fn tree_crt(a: TreeCrtArgs) -> CliResult {
    let path = IntensityPath::crt(a.horizon)?;
    let trees = unweighted_trees(&a, |_| Ok(path.clone()))?;
    finish_unweighted("tree-crt", Some(2.0), &a, trees)
}

fn tree_icrt(a: TreeIcrtArgs) -> CliResult {
    let text = fs::read_to_string(&a.theta)
        .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", a.theta.display())))?;
    let values = tokens(&text)
        .map(|t| t.parse::<f64>().map_err(|e| Failure::Runtime(format!("bad theta entry {t:?}: {e}"))))
        .collect::<Result<Vec<f64>, Failure>>()?;
    let (theta0, atoms) = values
        .split_first()
        .ok_or_else(|| Failure::Runtime("theta file is empty; expected θ₀ then the atoms".into()))?;
    if atoms.windows(2).any(|w| w[1] > w[0]) {
        return Err(Failure::Runtime("theta atoms must be nonincreasing".into()));
    }
    let horizon = a.crt.horizon;
    let trees = unweighted_trees(&a.crt, |rng| icrt_intensity(*theta0, atoms, horizon, rng))?;
    finish_unweighted("tree-icrt", None, &a.crt, trees)
}

fn finish_unweighted(command: &str, alpha: Option<f64>, a: &TreeCrtArgs, trees: Vec<TreeRecord>) -> CliResult {
    let incomplete = trees.iter().filter(|t| !t.complete).count();
    let doc = TreeFile {
        tool: "stl",
        version: VERSION,
        command,
        rng: RNG_NOTE,
        alpha,
        seed: a.seed,
        k: a.k,
        horizon: a.horizon,
        trees,
    };
    write_json(&a.out, &doc)?;
    eprintln!("stl: {} trees, {incomplete} cut short by the horizon", a.replicas);
    Ok(())
}

#[derive(Serialize)]
struct DiscreteEvents {
    #[serde(rename = "C")]
    c: Vec<usize>,
    #[serde(rename = "J")]
    j: Vec<usize>,
    activations: usize,
}

#[derive(Serialize)]
struct DiscreteFile {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    rng: &'static str,
    alpha: f64,
    seed: u64,
    n: usize,
    /// `parent[v − 1]` is the parent of vertex `v`, 0 at the root.
    parent: Vec<usize>,
    root: usize,
    events: DiscreteEvents,
    degrees_topk: Vec<usize>,
}

fn tree_discrete(a: TreeDiscreteArgs) -> CliResult {
    let n = a.n as usize;
    let law = stable_offspring(a.common.alpha)?;
    let sampler = ConditionedDegreeSampler::new(&law, n)?;
    let mut rng = replica_rng(a.common.seed, 0);
    let d = sampler.sample(&mut rng);
    let (dhat, _) = size_biased_reorder(&d, &mut rng);
    let (grown, trace) = grow_tree(&dhat, &mut rng)?;
    let tree = relabel_uniformly(&grown, &mut rng);
    let stats = tree_statistics(&tree, &trace, a.k);
    let mut degrees_topk = stats.top_degrees.clone();
    degrees_topk.truncate(a.k);
    let doc = DiscreteFile {
        tool: "stl",
        version: VERSION,
        command: "tree-discrete",
        rng: RNG_NOTE,
        alpha: a.common.alpha,
        seed: a.common.seed,
        n,
        parent: tree.parents().to_vec(),
        root: tree.root(),
        events: DiscreteEvents { c: stats.branch_times, j: stats.attach_times, activations: stats.activations },
        degrees_topk,
    };
    write_json(&a.common.out, &doc)?;
    eprintln!("stl: tree on {n} vertices, height {}, {} activations", stats.height, stats.activations);
    Ok(())
}

fn prufer(a: PruferArgs) -> CliResult {
    let input = read_stdin()?;
    let text = match a.mode {
        PruferMode::Decode => {
            let entries = tokens(&input)
                .map(|t| t.parse::<usize>().map_err(|e| Failure::Runtime(format!("bad codeword entry {t:?}: {e}"))))
                .collect::<Result<Vec<usize>, Failure>>()?;
            let tree = prufer_decode(&Codeword::new(entries)?);
            format!("# tool: stl {VERSION}\n# command: prufer decode\n{}\n", format_tree(&tree))
        }
        PruferMode::Encode => {
            let tree = parse_tree(&input)?;
            let w = prufer_encode(&tree)?;
            let body: Vec<String> = w.entries().iter().map(usize::to_string).collect();
            format!("# tool: stl {VERSION}\n# command: prufer encode\n{}\n", body.join(" "))
        }
    };
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

/// `root r; 2←p₂; 3←p₃; …` listing every non-root vertex in label order.
fn format_tree(tree: &RootedLabelledTree) -> String {
    let mut parts = vec![format!("root {}", tree.root())];
    for v in 1..=tree.n() {
        if let Some(p) = tree.parent(v) {
            parts.push(format!("{v}←{p}"));
        }
    }
    parts.join("; ")
}

/// Accept either a parent list (`0` at the root) or the `format_tree` form.
fn parse_tree(input: &str) -> Result<RootedLabelledTree, Failure> {
    let body: String = input
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join(" ");
    let bad = |t: &str| Failure::Runtime(format!("bad tree token {t:?}"));
    if body.contains('←') || body.contains("root") {
        let mut edges = Vec::new();
        for part in body.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            if part.starts_with("root") {
                continue;
            }
            let (v, p) = part.split_once('←').ok_or_else(|| bad(part))?;
            let v: usize = v.trim().parse().map_err(|_| bad(part))?;
            let p: usize = p.trim().parse().map_err(|_| bad(part))?;
            edges.push((v, p));
        }
        let n = edges.len() + 1;
        let mut parent = vec![0usize; n];
        for (v, p) in edges {
            if v == 0 || v > n || parent[v - 1] != 0 {
                return Err(Failure::Runtime(format!("vertex {v} is out of range or listed twice")));
            }
            parent[v - 1] = p;
        }
        Ok(RootedLabelledTree::from_parents(parent)?)
    } else {
        let parent = body
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| bad(t)))
            .collect::<Result<Vec<usize>, Failure>>()?;
        Ok(RootedLabelledTree::from_parents(parent)?)
    }
}

#[derive(Serialize)]
struct VerifyFile<'a> {
    tool: &'static str,
    version: &'static str,
    rng: &'static str,
    alpha: f64,
    seed: u64,
    eps: f64,
    scale: f64,
    reports: &'a [SuiteReport],
}

fn verify(a: VerifyArgs) -> CliResult {
    if a.list {
        let mut out = String::new();
        for (name, what) in SUITES {
            out.push_str(&format!("{name:<24} {what}\n"));
        }
        io::stdout().lock().write_all(out.as_bytes())?;
        return Ok(());
    }
    let names: Vec<&str> = match &a.suite {
        Some(name) => {
            if !SUITES.iter().any(|(n, _)| n == name) {
                return Err(Failure::Usage(format!("unknown suite {name:?}; see `stl verify --list`")));
            }
            vec![name.as_str()]
        }
        None => SUITES.iter().map(|(n, _)| *n).collect(),
    };
    let cfg = SuiteConfig { alpha: a.alpha, seed: a.seed, eps: a.eps, scale: a.scale };
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "# tool: stl {VERSION}\n# alpha: {}\n# seed: {}\n# rng: {RNG_NOTE}", a.alpha, a.seed)?;
    let mut reports = Vec::with_capacity(names.len());
    for name in names {
        let report = run_suite(name, &cfg)?;
        writeln!(stdout, "{} {name}", if report.passed() { "PASS" } else { "FAIL" })?;
        for case in &report.cases {
            writeln!(stdout, "  {}", case.summary_line())?;
        }
        stdout.flush()?;
        eprintln!("stl: {name} finished in {:.2}s", report.runtime_seconds);
        reports.push(report);
    }
    if let Some(path) = &a.json {
        let doc = VerifyFile {
            tool: "stl",
            version: VERSION,
            rng: RNG_NOTE,
            alpha: a.alpha,
            seed: a.seed,
            eps: a.eps,
            scale: a.scale,
            reports: &reports,
        };
        write_json(&Some(path.clone()), &doc)?;
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    eprintln!("stl: {} suites, {failed} failed", reports.len());
    if failed > 0 {
        Err(Failure::SuiteFailed)
    } else {
        Ok(())
    }
}
