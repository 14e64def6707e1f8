//! `hocc`: higher-order clustering coefficients from the command line.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hocc_core::analysis::{
    degree_profile, joint_distribution, parse_pgrid, sweep_rewiring, write_degree_profile, write_joint_bins,
    write_joint_points, write_sweep, DegreeBinning, SweepConfig, DEFAULT_JOINT_BINS,
};
use hocc_core::coeffs::{write_node_table, write_summary_tsv};
use hocc_core::gen::GenSpec;
use hocc_core::null::{
    ensemble_stats, write_ensemble_csv, AnnealingSchedule, EnsembleConfig, NullModel, Statistic, DEFAULT_SWAP_FACTOR,
    DEFAULT_Z_THRESHOLD,
};
use hocc_core::{load_edge_list, write_edge_list, CliqueConfig, Error, Graph, LoadOptions, Report};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNDEFINED: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "hocc", version, about = "Higher-order clustering coefficients of undirected graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local, global and average coefficients of an edge list.
    Compute(ComputeArgs),
    /// Write a generated graph as an edge list.
    Gen(GenArgs),
    /// Compare a graph with a null-model ensemble.
    Null(NullArgs),
    /// Joint (κ₂, κ_ℓ) distribution or degree profile.
    Analyze(AnalyzeArgs),
    /// Average coefficients across a grid of rewiring probabilities.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Whitespace-separated edge list; `#` and `%` start comments.
    #[arg(long)]
    input: PathBuf,
    /// Reject duplicate edges and self-loops instead of dropping them.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    orders: Vec<usize>,
    /// Per-node TSV. The summary always goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Refuse to count when the work estimate exceeds this many operations.
    #[arg(long)]
    budget: Option<u128>,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Gnp,
    Ring,
    Sw,
    Mphood,
    Cshood,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    /// Node count; for `mphood`, the size of each part.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Neighbors on each side of a ring node.
    #[arg(long)]
    k: Option<usize>,
    /// Clique size of `cshood`.
    #[arg(long)]
    c: Option<usize>,
    /// Pendant count of `cshood`.
    #[arg(long)]
    b: Option<usize>,
    /// Order of `mphood`; the hub's neighborhood has `l − 1` parts.
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NullKind {
    Cm,
    Mrcn,
}

#[derive(Args)]
struct NullArgs {
    kind: NullKind,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    orders: Vec<usize>,
    /// Also compare global coefficients.
    #[arg(long)]
    global: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Swaps per edge for CM samples and for the MRCN starting point.
    #[arg(long, default_value_t = DEFAULT_SWAP_FACTOR)]
    swap_factor: f64,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    cool: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Proposals per temperature; defaults to 10·m.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_Z_THRESHOLD)]
    z_threshold: f64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the summary as JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeKind {
    Joint,
    Degree,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinningKind {
    Log,
    Linear,
}

#[derive(Args)]
struct AnalyzeArgs {
    kind: AnalyzeKind,
    #[command(flatten)]
    input: InputArgs,
    /// Coefficient order; `degree` accepts a comma list.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    order: Vec<usize>,
    /// κ₂ bins for `joint`.
    #[arg(long, default_value_t = DEFAULT_JOINT_BINS)]
    bins: usize,
    /// Degree binning for `degree`.
    #[arg(long, value_enum, default_value_t = BinningKind::Log)]
    binning: BinningKind,
    /// Log base or linear width of the degree bins.
    #[arg(long)]
    bin_size: Option<f64>,
    /// Points for `joint`, bins for `degree`.
    #[arg(long)]
    out: PathBuf,
    /// Binned curve for `joint`; defaults to `<out>.bins.csv`.
    #[arg(long)]
    curve_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Sw,
}

#[derive(Args)]
struct SweepArgs {
    #[allow(dead_code)]
    kind: SweepKind,
    #[arg(long, default_value_t = 20000)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// `LO:HI:log:STEPS`, `LO:HI:lin:STEPS` or a comma list.
    #[arg(long, default_value = "0.0001:1:log:20")]
    pgrid: String,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    orders: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::SelfLoop { .. }
            | Error::DuplicateEdge { .. }
            | Error::EmptyGraph
            | Error::Io(_)
            | Error::Overflow { .. }
            | Error::OracleTooLarge { .. }
            | Error::BoundViolation { .. } => EXIT_INPUT,
            Error::OrderCap { .. } | Error::InvalidParameter(_) => EXIT_USAGE,
            Error::Budget { .. } => EXIT_BUDGET,
            Error::NoConvergedSamples(_) => EXIT_UNDEFINED,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn undefined(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_UNDEFINED, message: message.into() }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Gen(a) => generate(a),
        Command::Null(a) => null(a),
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => sweep(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hocc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(args: &InputArgs) -> Result<Graph, Failure> {
    let file = File::open(&args.input)
        .map_err(|e| Failure { code: EXIT_INPUT, message: format!("{}: {e}", args.input.display()) })?;
    let options = if args.strict {
        LoadOptions { dedupe: false, drop_self_loops: false }
    } else {
        LoadOptions::default()
    };
    Ok(load_edge_list(BufReader::new(file), options)?)
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn check_orders(orders: &[usize]) -> Result<usize, Failure> {
    if orders.is_empty() {
        return Err(usage("no orders given"));
    }
    if let Some(o) = orders.iter().find(|&&o| o < 2) {
        return Err(usage(format!("order {o} is below 2")));
    }
    Ok(*orders.iter().max().unwrap())
}

fn compute(a: ComputeArgs) -> Outcome {
    let max_order = check_orders(&a.orders)?;
    let g = load(&a.input)?;
    let config = CliqueConfig { threads: a.threads, budget: a.budget, ..CliqueConfig::default() };
    let report = Report::compute(&g, max_order, &config)?;
    if let Some(path) = &a.out {
        write_node_table(&report, &g, &a.orders, sink(Some(path))?)?;
    }
    let summary = report.summary(&a.orders);
    let mut out = sink(None)?;
    if a.json {
        serde_json::to_writer_pretty(&mut out, &summary).map_err(io::Error::from)?;
        writeln!(out)?;
        out.flush()?;
    } else {
        write_summary_tsv(&summary, &mut out)?;
    }
    if summary.any_undefined() {
        return Err(undefined("some coefficients are undefined (no wedges of that order)"));
    }
    Ok(())
}

fn generate(a: GenArgs) -> Outcome {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("--{flag} is required")));
    let need_p = || a.p.ok_or_else(|| usage("--p is required"));
    let spec = match a.kind {
        GenKind::Gnp => GenSpec::Gnp { n: need(a.n, "n")?, p: need_p()?, seed: a.seed },
        GenKind::Ring => GenSpec::Ring { n: need(a.n, "n")?, k: need(a.k, "k")? },
        GenKind::Sw => GenSpec::SmallWorld { n: need(a.n, "n")?, k: need(a.k, "k")?, p: need_p()?, seed: a.seed },
        GenKind::Mphood => GenSpec::MultipartiteHood { order: need(a.l, "l")?, part_size: need(a.n, "n")? },
        GenKind::Cshood => GenSpec::CliqueStarHood { c: need(a.c, "c")?, b: need(a.b, "b")? },
    };
    let g = spec.generate()?;
    write_edge_list(&g, sink(a.out.as_deref())?)?;
    Ok(())
}

fn null(a: NullArgs) -> Outcome {
    check_orders(&a.orders)?;
    let g = load(&a.input)?;
    let model = match a.kind {
        NullKind::Cm => NullModel::Cm { swap_factor: a.swap_factor },
        NullKind::Mrcn => {
            let mut s = AnnealingSchedule::for_graph(&g);
            s.randomize_swap_factor = a.swap_factor;
            if let Some(t0) = a.t0 {
                s.initial_temperature = t0;
            }
            if let Some(c) = a.cool {
                s.cooling_factor = c;
            }
            if let Some(t) = a.tol {
                s.target_tolerance = t;
            }
            if let Some(n) = a.steps {
                s.steps_per_temperature = n;
            }
            if let Some(n) = a.max_sweeps {
                s.max_sweeps = n;
            }
            NullModel::Mrcn { schedule: s }
        }
    };
    let mut statistics: Vec<Statistic> = a.orders.iter().map(|&o| Statistic::Average(o)).collect();
    if a.global {
        statistics.extend(a.orders.iter().map(|&o| Statistic::Global(o)));
    }
    let config = EnsembleConfig { n_samples: a.samples, seed: a.seed, threads: a.threads, z_threshold: a.z_threshold };
    let result = ensemble_stats(&g, &model, &statistics, &config)?;
    if a.json {
        if let Some(path) = &a.out {
            write_ensemble_csv(&result, sink(Some(path))?)?;
        }
        let stats: Vec<_> = result
            .stats
            .iter()
            .map(|s| {
                json!({
                    "statistic": s.statistic.to_string(),
                    "original": s.original,
                    "mean": finite(s.mean),
                    "std": finite(s.std),
                    "z": s.z_score.map(|z| if z.is_finite() { json!(z) } else { json!(z.to_string()) }),
                    "flag": s.flag.label(result.z_threshold),
                    "n_converged": result.n_converged,
                })
            })
            .collect();
        let doc = json!({
            "n_requested": result.n_requested,
            "n_converged": result.n_converged,
            "z_threshold": result.z_threshold,
            "stats": stats,
        });
        let mut out = sink(None)?;
        serde_json::to_writer_pretty(&mut out, &doc).map_err(io::Error::from)?;
        writeln!(out)?;
        out.flush()?;
    } else {
        write_ensemble_csv(&result, sink(a.out.as_deref())?)?;
    }
    if result.n_converged < result.n_requested {
        eprintln!(
            "hocc: {} of {} samples did not converge and were excluded",
            result.n_requested - result.n_converged,
            result.n_requested
        );
    }
    if result.stats.iter().any(|s| s.original.is_none() || s.n_samples == 0) {
        return Err(undefined("a statistic is undefined on the input or on every sample"));
    }
    Ok(())
}

fn finite(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

fn analyze(a: AnalyzeArgs) -> Outcome {
    let max_order = check_orders(&a.order)?;
    let g = load(&a.input)?;
    let config = CliqueConfig { threads: a.threads, ..CliqueConfig::default() };
    match a.kind {
        AnalyzeKind::Joint => {
            let &[order] = a.order.as_slice() else {
                return Err(usage("joint takes a single --order"));
            };
            if order < 3 {
                return Err(usage("joint needs --order >= 3"));
            }
            let report = Report::compute(&g, order, &config)?;
            let joint = joint_distribution(&report, order, a.bins)?;
            let curve = a.curve_out.clone().unwrap_or_else(|| {
                let mut s = a.out.clone().into_os_string();
                s.push(".bins.csv");
                PathBuf::from(s)
            });
            write_joint_points(&joint, sink(Some(&a.out))?)?;
            write_joint_bins(&joint, sink(Some(&curve))?)?;
            if joint.is_empty() {
                return Err(undefined("no node has both coefficients defined"));
            }
        }
        AnalyzeKind::Degree => {
            let binning = match a.binning {
                BinningKind::Log => DegreeBinning::Log { base: a.bin_size.unwrap_or(2.0) },
                BinningKind::Linear => {
                    let w = a.bin_size.unwrap_or(10.0);
                    if w < 1.0 || w.fract() != 0.0 {
                        return Err(usage("linear bins need an integer --bin-size >= 1"));
                    }
                    DegreeBinning::Linear { width: w as usize }
                }
            };
            let report = Report::compute(&g, max_order, &config)?;
            let profile = degree_profile(&report, &a.order, binning)?;
            write_degree_profile(&profile, sink(Some(&a.out))?)?;
        }
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Outcome {
    check_orders(&a.orders)?;
    let grid = parse_pgrid(&a.pgrid)?;
    let config = SweepConfig { n: a.n, k: a.k, reps: a.reps, seed: a.seed, threads: a.threads };
    let rows = sweep_rewiring(&config, &grid, &a.orders)?;
    write_sweep(&rows, sink(a.out.as_deref())?)?;
    Ok(())
}
