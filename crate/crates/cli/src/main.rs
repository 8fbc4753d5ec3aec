//! Command-line front end: reproducible, file-based runs of every
//! computation in the toolkit.
//!
//! Exit codes: 0 on success, 1 on domain errors (the message names the
//! violated precondition), 2 on usage errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ribbonlab_core::asymptotics::{
    flatband_weights, strongfield_top_decay, verify_db_formula, verify_edge_slope,
    verify_flatband_order, verify_strongfield_widths, AsymptoticReport, Quantity,
};
use ribbonlab_core::bands::{band_edges, detect_flat, dispersion, u_terminal_is_zero};
use ribbonlab_core::inverse::{
    antiperiodic_eigs, counterexample_pair, recover_monotone, recover_odd, Direction, NodeSet,
    OddPotential,
};
use ribbonlab_core::lattice::{build_ribbon, RibbonSpec};

#[derive(Parser)]
#[command(
    name = "ribbonlab",
    about = "Spectra of tight-binding zigzag nanoribbons in magnetic and electric fields",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble spectral bands (band summary JSON; zero-field edges follow
    /// the closed forms checked by ids T2-2a/T2-3a)
    Bands(BandsArgs),
    /// Sample dispersion curves lambda_k(t) on a uniform grid (check id
    /// T2-1 gives the zero-field closed form)
    Dispersion(DispersionArgs),
    /// Run the three flat-band detectors and the sensitivity weights
    /// (check ids T2, T4-1/T4-2)
    Flatband(FlatbandArgs),
    /// Check an asymptotic formula against exact numerics (registry:
    /// T3-2, T4-1, T5-1, T5-3, I2)
    Verify(VerifyArgs),
    /// Recover an odd potential from middle-band samples (check id T6)
    #[command(name = "inverse-odd")]
    InverseOdd(InverseOddArgs),
    /// Recover a monotone potential from antiperiodic eigenvalues
    /// (check id T7)
    #[command(name = "inverse-mono")]
    InverseMono(InverseMonoArgs),
    /// Build two distinct monotone potentials sharing antiperiodic data
    /// (check ids loc13/loc14; feasible only above the unit bound)
    Counterexample(CounterexampleArgs),
    /// Export the ribbon graph with vertex coordinates and magnetic phase
    /// coefficients (check ids maf1/maf2)
    Graph(GraphArgs),
}

/// Problem parameters shared by the spectral subcommands. A TOML config
/// may provide any of them; explicit flags win.
#[derive(Args, Clone, Default)]
struct ProblemArgs {
    /// Ribbon width: number of zigzag chains (p = 2N + 1 transverse sites)
    #[arg(long = "N")]
    n: Option<usize>,
    /// Magnetic parameter b in radians
    #[arg(long, allow_hyphen_values = true, conflicts_with = "field")]
    b: Option<f64>,
    /// Magnetic field strength B; converted via b = B sqrt(3)/2
    #[arg(long = "B", allow_hyphen_values = true)]
    field: Option<f64>,
    /// Transverse potential: comma-separated p values, a single value to
    /// broadcast, or `odd:w0,w1,..` for an odd potential (even sites zero)
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// TOML config mirroring the flags (N, b, B, v, samples, refine, out,
    /// format, seed)
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BandsArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Dispersion grid size
    #[arg(long, short = 'M')]
    samples: Option<usize>,
    /// Sharpen band edges by local quadratic fits
    #[arg(long)]
    refine: bool,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DispersionArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, short = 'M')]
    samples: Option<usize>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlatbandArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, short = 'M')]
    samples: Option<usize>,
    /// Quasimomentum at which to report the sensitivity weights
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Formula id: T3-2 (edge-slope), T4-1 (flatband-split),
    /// T5-1 (strongfield-widths), T5-3 (strongfield-decay), I2 (db-slope)
    #[arg(long)]
    formula: String,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Coupling constant for the strong-field checks
    #[arg(long)]
    tau: Option<f64>,
    /// Sample count for the randomized checks
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed for the randomized checks
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InverseOddArgs {
    /// Input JSON: {"targets": [...], "b": .., "nodes": [...]} (nodes
    /// optional; defaults to t_k = k pi / (N+1))
    #[arg(long)]
    targets: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InverseMonoArgs {
    /// Input JSON: {"psi": [...]} or a bare array of 2N+1 sorted
    /// antiperiodic eigenvalues
    #[arg(long)]
    psi: PathBuf,
    /// Monotonicity class of the reconstruction
    #[arg(long, value_enum, default_value_t = DirectionArg::Increasing)]
    direction: DirectionArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Class bound alpha (> 1 required for feasibility)
    #[arg(long, default_value_t = 1.25)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long = "N", default_value_t = 1)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long = "N")]
    n: usize,
    /// Longitudinal window of cells, inclusive (e.g. 0..6 or -2..2)
    #[arg(long, allow_hyphen_values = true, default_value = "0..4")]
    window: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Increasing,
    Decreasing,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Direction {
        match d {
            DirectionArg::Increasing => Direction::Increasing,
            DirectionArg::Decreasing => Direction::Decreasing,
        }
    }
}

/// Optional TOML config mirroring the flags.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "N")]
    n: Option<usize>,
    b: Option<f64>,
    #[serde(rename = "B")]
    field: Option<f64>,
    v: Option<String>,
    samples: Option<usize>,
    refine: Option<bool>,
    out: Option<PathBuf>,
    format: Option<String>,
    seed: Option<u64>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

/// Resolve the ribbon parameters from flags and config; flags win.
fn resolve_spec(args: &ProblemArgs, cfg: &FileConfig) -> Result<RibbonSpec> {
    let n = args
        .n
        .or(cfg.n)
        .ok_or_else(|| anyhow!("missing ribbon width --N"))?;
    if n < 1 {
        bail!("--N must be at least 1");
    }
    let b_flag = args.b.or(cfg.b);
    let field = args.field.or(cfg.field);
    let b = match (b_flag, field) {
        (Some(_), Some(_)) => bail!("give exactly one of --b and --B"),
        (Some(b), None) => b,
        (None, Some(big)) => big * 3f64.sqrt() / 2.0,
        (None, None) => 0.0,
    };
    let p = 2 * n + 1;
    let v_text = args.v.clone().or_else(|| cfg.v.clone());
    let v = match v_text {
        None => vec![0.0; p],
        Some(text) => parse_potential(&text, n)?,
    };
    Ok(RibbonSpec::new(n, b, v)?)
}

/// Potential syntax: `odd:w0,w1,..` (N+1 values, even sites zero), a full
/// comma-separated p-vector, or a single value broadcast to all sites.
fn parse_potential(text: &str, n: usize) -> Result<Vec<f64>> {
    let p = 2 * n + 1;
    if let Some(rest) = text.strip_prefix("odd:") {
        let odd = parse_list(rest)?;
        if odd.len() != n + 1 {
            bail!(
                "odd potential needs N + 1 = {} values, got {}",
                n + 1,
                odd.len()
            );
        }
        return Ok(OddPotential::new(odd).expand());
    }
    let vals = parse_list(text)?;
    if vals.len() == 1 {
        return Ok(vec![vals[0]; p]);
    }
    if vals.len() != p {
        bail!("potential needs p = 2N + 1 = {p} values, got {}", vals.len());
    }
    Ok(vals)
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {s:?}"))
        })
        .collect()
}

fn parse_window(text: &str) -> Result<std::ops::RangeInclusive<i64>> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("window must look like a..b, got {text:?}"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: i64 = lo.trim().parse().context("window start")?;
    let hi: i64 = hi.trim().parse().context("window end")?;
    Ok(lo..=hi)
}

fn write_output(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        None => {
            println!("{contents}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, contents)
                .with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
    }
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn cmd_bands(args: &BandsArgs) -> Result<()> {
    let cfg = load_config(args.problem.config.as_deref())?;
    let spec = resolve_spec(&args.problem, &cfg)?;
    let samples = args.samples.or(cfg.samples).unwrap_or(1024);
    let refine = args.refine || cfg.refine.unwrap_or(false);
    let d = dispersion(&spec, samples)?;
    let bs = band_edges(&d, refine);
    let out = args.out.clone().or(cfg.out);
    write_output(out.as_deref(), &to_pretty_json(&bs.bands)?)
}

fn cmd_dispersion(args: &DispersionArgs) -> Result<()> {
    let cfg = load_config(args.problem.config.as_deref())?;
    let spec = resolve_spec(&args.problem, &cfg)?;
    let samples = args.samples.or(cfg.samples).unwrap_or(1024);
    let format = args.format.unwrap_or(match cfg.format.as_deref() {
        Some("json") => OutputFormat::Json,
        _ => OutputFormat::Csv,
    });
    let d = dispersion(&spec, samples)?;
    let text = match format {
        OutputFormat::Csv => d.to_csv(),
        OutputFormat::Json => to_pretty_json(&json!({
            "grid": d.grid,
            "curves": d.curves,
        }))?,
    };
    let out = args.out.clone().or(cfg.out);
    write_output(out.as_deref(), &text)
}

fn cmd_flatband(args: &FlatbandArgs) -> Result<()> {
    let cfg = load_config(args.problem.config.as_deref())?;
    let spec = resolve_spec(&args.problem, &cfg)?;
    let samples = args.samples.or(cfg.samples).unwrap_or(512);
    let algebraic = detect_flat(&spec);
    let d = dispersion(&spec, samples)?;
    let mid = spec.n_chains();
    let col: Vec<f64> = d.curves.iter().map(|row| row[mid]).collect();
    let width = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - col.iter().cloned().fold(f64::INFINITY, f64::min);
    let v_inf = spec.v().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let threshold = 1e-9 * (1.0 + v_inf);
    let transfer = u_terminal_is_zero(&spec, 64);
    let numeric = width < threshold;
    let report = json!({
        "algebraic_flat": algebraic.is_some(),
        "flat_value": algebraic,
        "numeric_width": width,
        "numeric_flat": numeric,
        "transfer_flat": transfer,
        "detectors_agree": (algebraic.is_some() == numeric) && (numeric == transfer),
        "weights_t": args.t,
        "weights": flatband_weights(spec.n_chains(), args.t, spec.b()),
    });
    let out = args.out.clone().or(cfg.out);
    write_output(out.as_deref(), &to_pretty_json(&report)?)
}

fn strongfield_potential(args: &ProblemArgs, cfg: &FileConfig, n: usize) -> Result<Vec<f64>> {
    match args.v.clone().or_else(|| cfg.v.clone()) {
        Some(text) => parse_potential(&text, n),
        None => {
            // default strictly increasing reference potential
            let p = 2 * n + 1;
            Ok((1..=p).map(|k| 0.4 * k as f64 - 0.2).collect())
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let cfg = load_config(args.problem.config.as_deref())?;
    let n = args.problem.n.or(cfg.n).unwrap_or(2);
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let report: AsymptoticReport = match args.formula.as_str() {
        "T3-2" | "edge-slope" => {
            let b = args.problem.b.or(cfg.b).unwrap_or(0.01);
            verify_edge_slope(n, b)
        }
        "T4-1" | "flatband-split" => {
            let trials = args.samples.or(cfg.samples).unwrap_or(16);
            verify_flatband_order(trials, seed)
        }
        "T5-1" | "strongfield-widths" => {
            let tau = args.tau.unwrap_or(50.0);
            let v = strongfield_potential(&args.problem, &cfg, n)?;
            verify_strongfield_widths(n, &v, tau)?
        }
        "T5-3" | "strongfield-decay" => {
            let tau = args.tau.unwrap_or(50.0);
            let v = strongfield_potential(&args.problem, &cfg, n)?;
            let ratio = strongfield_top_decay(n, &v, tau)?;
            AsymptoticReport {
                formula_id: "T5-3".into(),
                params: json!({ "N": n, "tau": tau, "v": v }),
                predicted: Quantity::Scalar(0.25),
                numeric: Quantity::Scalar(ratio),
                residual: (ratio - 0.25).abs(),
                order_claim: "width(2 tau)/width(tau) <= ~1/4 (upper bound; measured decay is faster)"
                    .into(),
                passed: ratio <= 0.3,
            }
        }
        "I2" | "db-slope" => {
            let samples = args.samples.or(cfg.samples).unwrap_or(32);
            verify_db_formula(samples, seed)
        }
        other => {
            // unknown registry id is a usage error
            clap::Error::raw(
                clap::error::ErrorKind::InvalidValue,
                format!(
                    "unknown formula id {other:?}; known: T3-2, T4-1, T5-1, T5-3, I2 \
                     (aliases: edge-slope, flatband-split, strongfield-widths, \
                     strongfield-decay, db-slope)\n"
                ),
            )
            .exit();
        }
    };
    let out = args.out.clone().or(cfg.out);
    write_output(out.as_deref(), &to_pretty_json(&report)?)
}

#[derive(Deserialize)]
struct OddProblemFile {
    targets: Vec<f64>,
    #[serde(default)]
    b: f64,
    #[serde(default)]
    nodes: Option<Vec<f64>>,
    /// Ribbon width; defaults to the square problem (targets.len() - 1)
    #[serde(rename = "N", default)]
    n: Option<usize>,
}

fn cmd_inverse_odd(args: &InverseOddArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.targets)
        .with_context(|| format!("reading {}", args.targets.display()))?;
    let input: OddProblemFile = serde_json::from_str(&text).context("parsing targets JSON")?;
    if input.targets.is_empty() {
        bail!("targets array is empty");
    }
    let n = input.n.unwrap_or(input.targets.len() - 1);
    let nodes = match input.nodes {
        Some(nodes) => NodeSet::new(nodes)?,
        None => NodeSet::default_nodes(input.targets.len() - 1),
    };
    let res = recover_odd(n, &input.targets, input.b, &nodes)?;
    let full = OddPotential::new(res.recovered.clone()).expand();
    let report = json!({
        "recovered": full,
        "residual": res.residual,
        "iterations": res.iterations,
        "converged": res.converged,
    });
    write_output(args.out.as_deref(), &to_pretty_json(&report)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PsiFile {
    Wrapped { psi: Vec<f64> },
    Bare(Vec<f64>),
}

fn cmd_inverse_mono(args: &InverseMonoArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.psi)
        .with_context(|| format!("reading {}", args.psi.display()))?;
    let psi = match serde_json::from_str::<PsiFile>(&text).context("parsing psi JSON")? {
        PsiFile::Wrapped { psi } => psi,
        PsiFile::Bare(psi) => psi,
    };
    let res = recover_monotone(&psi, Direction::from(args.direction))?;
    let report = json!({
        "recovered": res.recovered,
        "residual": res.residual,
        "iterations": res.iterations,
        "converged": res.converged,
    });
    write_output(args.out.as_deref(), &to_pretty_json(&report)?)
}

fn cmd_counterexample(args: &CounterexampleArgs) -> Result<()> {
    let (v, w) = counterexample_pair(args.alpha, args.epsilon, args.n)?;
    let psi_v = antiperiodic_eigs(&v)?;
    let psi_w = antiperiodic_eigs(&w)?;
    let max_gap = psi_v
        .iter()
        .zip(&psi_w)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let report = json!({
        "alpha": args.alpha,
        "epsilon": args.epsilon,
        "N": args.n,
        "v": v,
        "w": w,
        "psi_v": psi_v,
        "psi_w": psi_w,
        "max_psi_gap": max_gap,
    });
    write_output(args.out.as_deref(), &to_pretty_json(&report)?)
}

fn cmd_graph(args: &GraphArgs) -> Result<()> {
    let window = parse_window(&args.window)?;
    let graph = build_ribbon(args.n, window)?;
    write_output(args.out.as_deref(), &to_pretty_json(&graph)?)
}

fn configure_threads() {
    if let Ok(text) = std::env::var("RIBBONLAB_THREADS") {
        if let Ok(threads) = text.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Bands(args) => cmd_bands(args),
        Command::Dispersion(args) => cmd_dispersion(args),
        Command::Flatband(args) => cmd_flatband(args),
        Command::Verify(args) => cmd_verify(args),
        Command::InverseOdd(args) => cmd_inverse_odd(args),
        Command::InverseMono(args) => cmd_inverse_mono(args),
        Command::Counterexample(args) => cmd_counterexample(args),
        Command::Graph(args) => cmd_graph(args),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
