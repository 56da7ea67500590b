use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pdfw_core::diagnostics::{dist_to_polytope, fw_gap};
use pdfw_core::exec::Exec;
use pdfw_core::model::Schedule;
use pdfw_harness::instance_file;
use pdfw_harness::plan::Prepared;
use pdfw_harness::{
    run_plan, run_suite, Algorithm, ExperimentPlan, GenKind, Generator, InstanceSource, Suite,
    SuiteConfig,
};

#[derive(Parser, Debug)]
#[command(name = "pdfw", version, about = "Primal-dual Frank-Wolfe experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep horizons and seeds, writing summary, per-run and bound CSVs.
    Run(RunArgs),
    /// Run a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Write a generated instance file.
    Gen(GenArgs),
    /// Print the FW gap and polytope distance of one point.
    Gap(GapArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Instance file, or gen:KIND[:SEED[:DIM[:STATES]]].
    #[arg(long)]
    instance: InstanceSource,
    #[arg(long, value_enum, default_value = "pdfw")]
    algo: Algorithm,
    /// fixed, cube_root or square_root.
    #[arg(long, default_value = "cube_root", value_parser = parse_schedule)]
    schedule: Schedule,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    horizons: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 1 runs cells sequentially.
    #[arg(long)]
    workers: Option<usize>,
    /// Also write per-slot trace CSVs.
    #[arg(long)]
    trace: bool,
    /// Record wall-clock seconds in the summary.
    #[arg(long)]
    timing: bool,
    /// V for the fixed schedule.
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    /// η for the fixed schedule.
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Step for pdgrad (default 1/sqrt(T)).
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Smaller sweep (20 seeds, T up to 8000).
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    horizons: Option<Vec<usize>>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Dimension (node count for `cycle`).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    states: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[arg(long)]
    instance: InstanceSource,
    /// Comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Vec<f64>,
}

fn parse_schedule(s: &str) -> Result<Schedule, String> {
    s.parse().map_err(|e: pdfw_core::Error| e.to_string())
}

fn exec_for(workers: Option<usize>) -> Result<Exec> {
    match workers {
        Some(0) => bail!("--workers must be at least 1"),
        Some(1) => Ok(Exec::Sequential),
        _ if Exec::parallel_available() => Ok(Exec::Parallel),
        _ => Ok(Exec::Sequential),
    }
}

/// Runs `f` on a pool of `workers` threads when requested.
fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers.filter(|&n| n > 1) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building worker pool")?;
        return Ok(pool.install(f));
    }
    let _ = workers;
    Ok(f())
}

/// `Ok(true)` when every property held.
fn run(args: RunArgs) -> Result<bool> {
    let mut plan = ExperimentPlan::new(args.instance, args.algo, args.out);
    plan.schedule = args.schedule;
    plan.horizons = args.horizons;
    plan.seeds = args.seeds;
    plan.trace = args.trace;
    plan.timing = args.timing;
    plan.v = args.v;
    plan.eta = args.eta;
    plan.beta = args.beta;
    plan.exec = exec_for(args.workers)?;
    plan.validate()?;
    let report = with_workers(args.workers, || run_plan(&plan))??;
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    print!("{}", report.checks);
    Ok(report.checks.passed())
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let mut cfg = if args.quick { SuiteConfig::quick() } else { SuiteConfig::full() };
    if let Some(s) = args.seeds {
        cfg.seeds = s;
    }
    if let Some(h) = args.horizons {
        cfg.horizons = h;
    }
    if cfg.seeds == 0 || cfg.horizons.is_empty() || cfg.horizons.windows(2).any(|w| w[0] >= w[1]) {
        bail!("need seeds >= 1 and strictly increasing horizons");
    }
    cfg.exec = exec_for(args.workers)?;
    let report = with_workers(args.workers, || run_suite(args.suite, &cfg))??;
    print!("{report}");
    Ok(report.passed())
}

fn generate(args: GenArgs) -> Result<bool> {
    let mut g = Generator::new(args.kind, args.seed);
    if let Some(d) = args.dim {
        g.dim = d;
    }
    if let Some(s) = args.states {
        g.states = s;
    }
    let spec = g.spec()?;
    instance_file::write_spec(&args.out, &spec)?;
    println!("wrote {}", args.out.display());
    Ok(true)
}

fn gap(args: GapArgs) -> Result<bool> {
    let prep = Prepared::load(&args.instance)?;
    let poly = prep
        .poly
        .as_ref()
        .context("gap queries need a centralized instance")?;
    let g = fw_gap(&prep.instance, poly, &args.point)?;
    let d = dist_to_polytope(poly, &args.point)?;
    println!("fw_gap = {g}");
    println!("dist = {d}");
    println!("dist2 = {}", d * d);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => generate(a),
        Command::Gap(a) => gap(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
