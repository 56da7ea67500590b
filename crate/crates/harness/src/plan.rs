//! Experiment plans and the CSV reports written by [`run_plan`].

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::ValueEnum;
use pdfw_core::algorithms::{run_dpp, run_pd_gradient, run_pdfw, run_two_phase, RunResult};
use pdfw_core::diagnostics::{
    certify_slater, compute_bounds, dist_to_polytope, fw_gap, lagrange_certificate,
    slater_constant, solve_gamma_star, theorems, BoundConstants, GammaStar, LagrangeCertificate,
    MeanSe, MixturePolytope, SlaterCertificate,
};
use pdfw_core::distributed::{make_cycle_consensus, run_distributed, DistributedProblem};
use pdfw_core::exec::Exec;
use pdfw_core::linalg;
use pdfw_core::model::{AlgoConfig, ProblemInstance, RunTrace, Schedule};
use pdfw_core::problems::{
    make_convex_scheduling, make_random_finite, make_sigmoidal_scheduling, InstanceSpec,
    ObjectiveFamily,
};

use crate::instance_file;
use crate::report::{Check, SuiteReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Pdfw,
    Dpp,
    Pdgrad,
    #[value(name = "two_phase", alias = "two-phase")]
    TwoPhase,
    Distributed,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pdfw => "pdfw",
            Algorithm::Dpp => "dpp",
            Algorithm::Pdgrad => "pdgrad",
            Algorithm::TwoPhase => "two_phase",
            Algorithm::Distributed => "distributed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Convex,
    Sigmoidal,
    Random,
    Cycle,
}

impl GenKind {
    pub fn name(self) -> &'static str {
        match self {
            GenKind::Convex => "convex",
            GenKind::Sigmoidal => "sigmoidal",
            GenKind::Random => "random",
            GenKind::Cycle => "cycle",
        }
    }

    /// Default `(dim, states)`; for `cycle` the first entry is the node count.
    pub fn defaults(self) -> (usize, usize) {
        match self {
            GenKind::Convex | GenKind::Sigmoidal => (3, 3),
            GenKind::Random => (2, 3),
            GenKind::Cycle => (4, 2),
        }
    }
}

/// A built-in generator with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub kind: GenKind,
    pub dim: usize,
    pub states: usize,
    pub seed: u64,
}

impl Generator {
    pub fn new(kind: GenKind, seed: u64) -> Self {
        let (dim, states) = kind.defaults();
        Self {
            kind,
            dim,
            states,
            seed,
        }
    }

    pub fn build(&self) -> Result<(ProblemInstance, Option<DistributedProblem>)> {
        let (d, n, seed) = (self.dim, self.states, self.seed);
        Ok(match self.kind {
            GenKind::Convex => (make_convex_scheduling(d, n, seed)?, None),
            GenKind::Sigmoidal => (make_sigmoidal_scheduling(d, n, seed)?, None),
            GenKind::Random => (
                make_random_finite(d, n, 3, 2, ObjectiveFamily::Sigmoidal, seed)?,
                None,
            ),
            GenKind::Cycle => {
                let prob = make_cycle_consensus(d, n, seed)?;
                (prob.stacked_instance()?, Some(prob))
            }
        })
    }

    /// Serializable form, with certificates.
    pub fn spec(&self) -> Result<InstanceSpec> {
        let (inst, prob) = self.build()?;
        let name = format!("{}-{}", self.kind.name(), self.seed);
        Ok(match prob {
            Some(p) => InstanceSpec::from_distributed(&name, &p)?,
            None => InstanceSpec::from_instance(&inst)?,
        })
    }
}

/// Where a plan's instance comes from: a file, or `gen:KIND[:SEED[:DIM[:STATES]]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceSource {
    File(PathBuf),
    Generated(Generator),
}

impl FromStr for InstanceSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("gen:") else {
            return Ok(InstanceSource::File(PathBuf::from(s)));
        };
        let mut parts = rest.split(':');
        let kind = GenKind::from_str(parts.next().unwrap_or(""), true)
            .map_err(|_| anyhow!("unknown generator in `{s}` (convex, sigmoidal, random, cycle)"))?;
        let mut g = Generator::new(kind, 0);
        let mut field = |name: &str| -> Result<Option<u64>> {
            parts
                .next()
                .map(|p| p.parse::<u64>().with_context(|| format!("bad {name} in `{s}`")))
                .transpose()
        };
        if let Some(seed) = field("seed")? {
            g.seed = seed;
        }
        if let Some(dim) = field("dimension")? {
            g.dim = dim as usize;
        }
        if let Some(states) = field("state count")? {
            g.states = states as usize;
        }
        Ok(InstanceSource::Generated(g))
    }
}

/// An instance with everything the bound checks need.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub name: String,
    pub instance: ProblemInstance,
    pub distributed: Option<DistributedProblem>,
    pub bounds: BoundConstants,
    /// Absent for distributed instances.
    pub poly: Option<MixturePolytope>,
    pub gamma_star: Option<GammaStar>,
    pub slater: Option<SlaterCertificate>,
    pub lagrange: Option<LagrangeCertificate>,
}

impl Prepared {
    pub fn from_parts(
        name: String,
        instance: ProblemInstance,
        distributed: Option<DistributedProblem>,
        slater: Option<SlaterCertificate>,
        gamma_star: Option<GammaStar>,
    ) -> Result<Self> {
        let bounds = instance.bounds().cloned().unwrap_or_else(|| compute_bounds(&instance));
        let poly = distributed.is_none().then(|| instance.mixture_polytope());
        let (mut slater, mut gamma_star) = (slater, gamma_star);
        let mut lagrange = None;
        if let Some(poly) = &poly {
            if slater.is_none() && !instance.constraints().is_empty() {
                slater = certify_slater(&instance, poly)?;
            }
            if instance.objective().is_convex() {
                if gamma_star.is_none() {
                    gamma_star = Some(solve_gamma_star(&instance, poly)?);
                }
                if let Some(gs) = &gamma_star {
                    lagrange = Some(lagrange_certificate(&instance, poly, &gs.point, 1000, 0)?);
                }
            }
        }
        Ok(Self {
            name,
            instance,
            distributed,
            bounds,
            poly,
            gamma_star,
            slater,
            lagrange,
        })
    }

    pub fn load(source: &InstanceSource) -> Result<Self> {
        match source {
            InstanceSource::File(path) => {
                let loaded = instance_file::load(path)?;
                let name = loaded.instance.name().to_string();
                Self::from_parts(
                    name,
                    loaded.instance,
                    loaded.distributed,
                    loaded.slater,
                    loaded.gamma_star,
                )
            }
            InstanceSource::Generated(g) => {
                let (inst, prob) = g.build()?;
                let name = match &prob {
                    Some(_) => format!("cycle{}-s{}-{}", g.dim, g.states, g.seed),
                    None => inst.name().to_string(),
                };
                Self::from_parts(name, inst, prob, None, None)
            }
        }
    }

    pub fn is_convex(&self) -> bool {
        self.instance.objective().is_convex()
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub source: InstanceSource,
    pub algorithm: Algorithm,
    pub schedule: Schedule,
    /// `V`, `η` for the fixed schedule.
    pub v: f64,
    pub eta: f64,
    /// Step for `pdgrad`; `1/√T` when absent.
    pub beta: Option<f64>,
    pub horizons: Vec<usize>,
    pub seeds: u64,
    pub out: PathBuf,
    pub exec: Exec,
    pub trace: bool,
    /// Record wall-clock seconds. Off by default so summaries are reproducible.
    pub timing: bool,
}

impl ExperimentPlan {
    pub fn new(source: InstanceSource, algorithm: Algorithm, out: impl Into<PathBuf>) -> Self {
        Self {
            source,
            algorithm,
            schedule: Schedule::CubeRoot,
            v: 1.0,
            eta: 0.5,
            beta: None,
            horizons: vec![1000],
            seeds: 10,
            out: out.into(),
            exec: Exec::Parallel,
            trace: false,
            timing: false,
        }
    }

    fn config(&self, horizon: usize, seed: u64) -> AlgoConfig {
        match self.schedule {
            Schedule::Fixed => AlgoConfig::fixed(horizon, self.v, self.eta, seed),
            s => AlgoConfig::scheduled(horizon, s, seed),
        }
    }

    fn beta(&self, horizon: usize) -> f64 {
        self.beta.unwrap_or(1.0 / (horizon as f64).sqrt())
    }

    /// Effective `(V, η)` at horizon `T`.
    pub fn params(&self, horizon: usize) -> (f64, f64) {
        match self.algorithm {
            Algorithm::Pdgrad => {
                let b = self.beta(horizon);
                (1.0 / b, b)
            }
            _ => self.config(horizon, 0).params(),
        }
    }

    fn schedule_label(&self) -> &'static str {
        match self.algorithm {
            Algorithm::Pdgrad => "fixed",
            _ => self.schedule.name(),
        }
    }

    /// Checks that don't need the instance.
    pub fn validate(&self) -> Result<()> {
        ensure!(!self.horizons.is_empty(), "at least one horizon is required");
        ensure!(self.horizons[0] >= 1, "horizons must be at least 1");
        ensure!(
            self.horizons.windows(2).all(|w| w[0] < w[1]),
            "horizons must be strictly increasing, got {:?}",
            self.horizons
        );
        ensure!(self.seeds >= 1, "seeds must be at least 1");
        for &t in &self.horizons {
            match self.algorithm {
                Algorithm::Pdgrad => {
                    let b = self.beta(t);
                    ensure!(b > 0.0 && b < 1.0, "pdgrad needs beta in (0, 1), got {b} at T = {t}");
                }
                _ => self.config(t, 0).validate()?,
            }
        }
        Ok(())
    }

    /// Checks that need the instance.
    pub fn validate_against(&self, prep: &Prepared) -> Result<()> {
        match self.algorithm {
            Algorithm::Distributed if prep.distributed.is_none() => {
                bail!("algorithm `distributed` needs a distributed instance")
            }
            Algorithm::Dpp if !prep.instance.decision_sets().iter().all(|s| s.is_finite()) => {
                bail!("algorithm `dpp` needs finite decision sets")
            }
            _ => {}
        }
        Ok(())
    }
}

/// Per-cell measurements. Violations are `⟨a_i, x̄_T⟩ − b_i` for convex
/// objectives and `⟨a_i, E_α γ_α⟩ − b_i` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub horizon: usize,
    pub seed: u64,
    pub alpha: isize,
    pub f_xbar: f64,
    pub subopt: Option<f64>,
    pub violations: Vec<f64>,
    pub fw_gap: Option<f64>,
    pub dist2: Option<f64>,
    pub tracking_error: Option<f64>,
    pub consensus_residual: Option<f64>,
    pub wallclock: f64,
}

impl CellResult {
    pub fn max_violation(&self) -> f64 {
        self.violations.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Bounds at one horizon; `None` where no theorem applies.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundSet {
    pub subopt: Option<f64>,
    pub violations: Vec<Option<f64>>,
    pub fw_gap: Option<f64>,
    pub dist2: Option<f64>,
    pub tracking: Option<f64>,
}

impl BoundSet {
    pub fn max_violation(&self) -> Option<f64> {
        self.violations.iter().copied().collect::<Option<Vec<f64>>>()?.into_iter().reduce(f64::max)
    }
}

pub fn bound_set(plan: &ExperimentPlan, prep: &Prepared, horizon: usize) -> Result<BoundSet> {
    let bc = &prep.bounds;
    let c = prep.instance.constraints();
    let n = c.len();
    let t = horizon as f64;
    let mut out = BoundSet {
        violations: vec![None; n],
        ..BoundSet::default()
    };
    if matches!(plan.algorithm, Algorithm::Dpp | Algorithm::Distributed) {
        return Ok(out);
    }
    let (v, eta) = plan.params(horizon);
    let fixed = plan.algorithm == Algorithm::Pdgrad || plan.schedule == Schedule::Fixed;
    if prep.is_convex() {
        let (subopt, viol) = if fixed {
            let (s, q2) = theorems::convex_general(bc, v, eta, t);
            (s, q2.sqrt())
        } else if plan.schedule == Schedule::CubeRoot {
            theorems::convex_cube_root(bc, t)
        } else {
            let lambda = prep.lagrange.as_ref().map(|l| l.lambda.clone()).unwrap_or_default();
            let at_lambda = if lambda.is_empty() {
                0.0
            } else {
                linalg::norm(&c.transpose_mul(&lambda))
            };
            theorems::convex_square_root(bc, t, linalg::norm(&lambda), at_lambda)
        };
        out.subopt = Some(subopt);
        out.violations = vec![Some(viol); n];
    } else {
        out.dist2 = Some(theorems::path_average(bc, eta));
        if !fixed {
            match plan.schedule {
                Schedule::CubeRoot => {
                    out.fw_gap = Some(theorems::nonconvex_cube_root(bc, t, 0.0).0);
                    out.violations = (0..n)
                        .map(|i| Some(theorems::nonconvex_cube_root(bc, t, c.row_norm(i)).1))
                        .collect();
                }
                _ => {
                    if let Some(sl) = &prep.slater {
                        out.fw_gap = Some(theorems::slater_square_root(bc, t, 0.0).0);
                        out.violations = (0..n)
                            .map(|i| {
                                let ci = slater_constant(bc, sl.margin, c.row_norm(i))?;
                                Ok(Some(theorems::slater_square_root(bc, t, ci).1))
                            })
                            .collect::<Result<_>>()?;
                    }
                }
            }
        }
    }
    if plan.algorithm == Algorithm::TwoPhase && plan.schedule == Schedule::CubeRoot {
        out.tracking = Some(theorems::tracking(bc, t));
    }
    Ok(out)
}

/// Runs one `(T, seed)` cell, optionally returning its trace.
pub fn run_cell(
    plan: &ExperimentPlan,
    prep: &Prepared,
    horizon: usize,
    seed: u64,
) -> Result<(CellResult, RunTrace)> {
    let inst = &prep.instance;
    let cfg = plan.config(horizon, seed);
    let mut tracking_error = None;
    let mut consensus_residual = None;
    let run: RunResult = match plan.algorithm {
        Algorithm::Pdfw => run_pdfw(inst, &cfg)?,
        Algorithm::Dpp => run_dpp(inst, &cfg)?,
        Algorithm::Pdgrad => run_pd_gradient(inst, plan.beta(horizon), horizon, seed)?,
        Algorithm::TwoPhase => {
            let r = run_two_phase(inst, &cfg)?;
            tracking_error = Some(r.tracking_error);
            r.phase1
        }
        Algorithm::Distributed => {
            let prob = prep
                .distributed
                .as_ref()
                .ok_or_else(|| anyhow!("instance is not distributed"))?;
            let r = run_distributed(prob, &cfg)?;
            consensus_residual = Some(r.consensus_residual());
            let f_xbar = inst.objective().value(&r.trace.x_bar);
            let violations = inst.constraints().residuals(&r.trace.x_bar);
            RunResult {
                f_xbar,
                violations,
                gamma_alpha: r.trace.gamma_alpha.clone(),
                trace: r.trace,
                wallclock: r.wallclock,
            }
        }
    };
    let convex = prep.is_convex();
    let subopt = match (&prep.gamma_star, convex) {
        (Some(gs), true) => Some(run.f_xbar - gs.value),
        _ => None,
    };
    let violations = if convex {
        run.violations.clone()
    } else {
        inst.constraints().residuals(&run.trace.path_mean())
    };
    let (fw, dist2) = match (&prep.poly, convex) {
        (Some(poly), false) => {
            let g = fw_gap(inst, poly, &run.gamma_alpha)?;
            let d = dist_to_polytope(poly, &run.gamma_alpha)?;
            (Some(g), Some(d * d))
        }
        _ => (None, None),
    };
    let cell = CellResult {
        horizon,
        seed,
        alpha: run.trace.alpha,
        f_xbar: run.f_xbar,
        subopt,
        violations,
        fw_gap: fw,
        dist2,
        tracking_error,
        consensus_residual,
        wallclock: run.wallclock,
    };
    Ok((cell, run.trace))
}

/// Aggregates over seeds at one horizon.
#[derive(Clone, Debug)]
pub struct SummaryRow {
    pub horizon: usize,
    pub seeds: usize,
    pub f_xbar: MeanSe,
    pub subopt: Option<MeanSe>,
    pub max_violation: MeanSe,
    pub violations: Vec<MeanSe>,
    pub fw_gap: Option<MeanSe>,
    pub dist2: Option<MeanSe>,
    pub tracking_error: Option<MeanSe>,
    pub consensus_residual: Option<MeanSe>,
    pub wallclock: f64,
    pub bounds: BoundSet,
}

fn opt_stats(cells: &[&CellResult], f: impl Fn(&CellResult) -> Option<f64>) -> Option<MeanSe> {
    let xs: Option<Vec<f64>> = cells.iter().map(|c| f(c)).collect();
    xs.map(|v| MeanSe::of(&v))
}

pub fn summarize(cells: &[&CellResult], bounds: BoundSet) -> SummaryRow {
    let n = cells.first().map_or(0, |c| c.violations.len());
    SummaryRow {
        horizon: cells.first().map_or(0, |c| c.horizon),
        seeds: cells.len(),
        f_xbar: MeanSe::of(&cells.iter().map(|c| c.f_xbar).collect::<Vec<_>>()),
        subopt: opt_stats(cells, |c| c.subopt),
        max_violation: if n == 0 {
            MeanSe::of(&vec![0.0; cells.len()])
        } else {
            MeanSe::of(&cells.iter().map(|c| c.max_violation()).collect::<Vec<_>>())
        },
        violations: (0..n)
            .map(|i| MeanSe::of(&cells.iter().map(|c| c.violations[i]).collect::<Vec<_>>()))
            .collect(),
        fw_gap: opt_stats(cells, |c| c.fw_gap),
        dist2: opt_stats(cells, |c| c.dist2),
        tracking_error: opt_stats(cells, |c| c.tracking_error),
        consensus_residual: opt_stats(cells, |c| c.consensus_residual),
        wallclock: cells.iter().map(|c| c.wallclock).sum(),
        bounds,
    }
}

impl SummaryRow {
    /// Bound checks for this horizon (`mean <= bound + 3·SE`).
    pub fn checks(&self) -> Vec<Check> {
        let t = self.horizon;
        let mut out = Vec::new();
        let mut push = |metric: String, m: Option<MeanSe>, b: Option<f64>| {
            if let (Some(m), Some(b)) = (m, b) {
                out.push(Check::mean_le(format!("{metric} T={t}"), m.mean, m.se, b));
            }
        };
        push("subopt".into(), self.subopt, self.bounds.subopt);
        for (i, v) in self.violations.iter().enumerate() {
            push(format!("violation[{i}]"), Some(*v), self.bounds.violations.get(i).copied().flatten());
        }
        push("fw_gap".into(), self.fw_gap, self.bounds.fw_gap);
        push("dist2".into(), self.dist2, self.bounds.dist2);
        push("tracking_error".into(), self.tracking_error, self.bounds.tracking);
        out
    }
}

pub const SUMMARY_HEADER: [&str; 14] = [
    "instance",
    "algorithm",
    "schedule",
    "T",
    "seeds",
    "f_xbar_mean",
    "f_xbar_se",
    "subopt_mean",
    "max_violation_mean",
    "fw_gap_mean",
    "dist2_mean",
    "bound_subopt",
    "bound_violation",
    "wallclock_s",
];

const NA: &str = "NA";

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), num)
}

#[derive(Clone, Debug)]
pub struct PlanReport {
    pub instance: String,
    pub rows: Vec<SummaryRow>,
    pub cells: Vec<CellResult>,
    pub checks: SuiteReport,
    pub files: Vec<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> anyhow::Error + '_ {
    move |e| anyhow::Error::new(e).context(format!("writing {}", path.display()))
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> anyhow::Error + '_ {
    move |e| anyhow::Error::new(e).context(format!("writing {}", path.display()))
}

fn write_trace(path: &Path, trace: &RunTrace) -> Result<()> {
    let d = trace.dim();
    let n = trace.final_queue().len();
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = std::io::BufWriter::new(file);
    let mut header = String::from("t,state");
    for j in 0..d {
        write!(header, ",x{j}").unwrap();
    }
    for j in 0..d {
        write!(header, ",gamma{j}").unwrap();
    }
    for i in 0..n {
        write!(header, ",q{i}").unwrap();
    }
    writeln!(w, "{header}").map_err(io_err(path))?;
    let mut line = String::new();
    for t in 0..trace.horizon() {
        line.clear();
        write!(line, "{t},{}", trace.states[t]).unwrap();
        for v in trace.x(t) {
            write!(line, ",{v}").unwrap();
        }
        for v in trace.gamma(t as isize) {
            write!(line, ",{v}").unwrap();
        }
        for v in trace.queue(t + 1).as_slice() {
            write!(line, ",{v}").unwrap();
        }
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Runs every `(T, seed)` cell and writes `summary.csv`, `runs.csv`,
/// `bounds.csv` and, when tracing, `trace_T{T}_seed{s}.csv` into `plan.out`.
pub fn run_plan(plan: &ExperimentPlan) -> Result<PlanReport> {
    plan.validate()?;
    let prep = Prepared::load(&plan.source)?;
    plan.validate_against(&prep)?;
    let bounds: Vec<BoundSet> =
        plan.horizons.iter().map(|&t| bound_set(plan, &prep, t)).collect::<Result<_>>()?;
    fs::create_dir_all(&plan.out)
        .with_context(|| format!("creating output directory {}", plan.out.display()))?;

    let cells: Vec<(usize, u64)> = plan
        .horizons
        .iter()
        .flat_map(|&t| (0..plan.seeds).map(move |s| (t, s)))
        .collect();
    let results: Vec<CellResult> = plan.exec.try_map(&cells, |&(t, s)| -> Result<CellResult> {
        let (cell, trace) = run_cell(plan, &prep, t, s)
            .with_context(|| format!("running T = {t}, seed = {s}"))?;
        if plan.trace {
            let path = plan.out.join(format!("trace_T{t}_seed{s}.csv"));
            write_trace(&path, &trace)?;
        }
        Ok(cell)
    })?;

    let mut rows = Vec::new();
    let mut checks = SuiteReport::new(format!("{} {}", prep.name, plan.algorithm.name()));
    for (k, &t) in plan.horizons.iter().enumerate() {
        let at_t: Vec<&CellResult> = results.iter().filter(|c| c.horizon == t).collect();
        let row = summarize(&at_t, bounds[k].clone());
        for c in row.checks() {
            checks.push(c);
        }
        rows.push(row);
    }

    let mut files = Vec::new();
    let summary_path = plan.out.join("summary.csv");
    {
        let mut w = csv::Writer::from_path(&summary_path).map_err(csv_err(&summary_path))?;
        w.write_record(SUMMARY_HEADER).map_err(csv_err(&summary_path))?;
        for r in &rows {
            w.write_record([
                prep.name.clone(),
                plan.algorithm.name().to_string(),
                plan.schedule_label().to_string(),
                r.horizon.to_string(),
                r.seeds.to_string(),
                num(r.f_xbar.mean),
                num(r.f_xbar.se),
                opt(r.subopt.map(|m| m.mean)),
                num(r.max_violation.mean),
                opt(r.fw_gap.map(|m| m.mean)),
                opt(r.dist2.map(|m| m.mean)),
                opt(r.bounds.subopt),
                opt(r.bounds.max_violation()),
                if plan.timing { num(r.wallclock) } else { NA.to_string() },
            ])
            .map_err(csv_err(&summary_path))?;
        }
        w.flush().map_err(io_err(&summary_path))?;
    }
    files.push(summary_path);

    let runs_path = plan.out.join("runs.csv");
    {
        let mut w = csv::Writer::from_path(&runs_path).map_err(csv_err(&runs_path))?;
        let n = prep.instance.constraints().len();
        let mut header: Vec<String> = ["T", "seed", "alpha", "f_xbar", "subopt"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend((0..n).map(|i| format!("violation{i}")));
        header.extend(
            ["fw_gap", "dist2", "tracking_error", "consensus_residual"].iter().map(|s| s.to_string()),
        );
        w.write_record(&header).map_err(csv_err(&runs_path))?;
        for c in &results {
            let mut rec = vec![
                c.horizon.to_string(),
                c.seed.to_string(),
                c.alpha.to_string(),
                num(c.f_xbar),
                opt(c.subopt),
            ];
            rec.extend(c.violations.iter().map(|v| num(*v)));
            rec.extend([opt(c.fw_gap), opt(c.dist2), opt(c.tracking_error), opt(c.consensus_residual)]);
            w.write_record(&rec).map_err(csv_err(&runs_path))?;
        }
        w.flush().map_err(io_err(&runs_path))?;
    }
    files.push(runs_path);

    let bounds_path = plan.out.join("bounds.csv");
    {
        let mut w = csv::Writer::from_path(&bounds_path).map_err(csv_err(&bounds_path))?;
        w.write_record([
            "instance",
            "algorithm",
            "schedule",
            "T",
            "metric",
            "measured_mean",
            "measured_se",
            "bound",
            "passed",
        ])
        .map_err(csv_err(&bounds_path))?;
        for r in &rows {
            let mut metrics: Vec<(String, Option<MeanSe>, Option<f64>)> = vec![
                ("subopt".into(), r.subopt, r.bounds.subopt),
                ("fw_gap".into(), r.fw_gap, r.bounds.fw_gap),
                ("dist2".into(), r.dist2, r.bounds.dist2),
                ("tracking_error".into(), r.tracking_error, r.bounds.tracking),
                ("consensus_residual".into(), r.consensus_residual, None),
            ];
            for (i, v) in r.violations.iter().enumerate() {
                metrics.push((format!("violation{i}"), Some(*v), r.bounds.violations[i]));
            }
            for (name, m, b) in metrics {
                let Some(m) = m else { continue };
                w.write_record([
                    prep.name.clone(),
                    plan.algorithm.name().to_string(),
                    plan.schedule_label().to_string(),
                    r.horizon.to_string(),
                    name,
                    num(m.mean),
                    num(m.se),
                    opt(b),
                    b.map_or_else(|| NA.to_string(), |b| m.within(b).to_string()),
                ])
                .map_err(csv_err(&bounds_path))?;
            }
        }
        w.flush().map_err(io_err(&bounds_path))?;
    }
    files.push(bounds_path);

    Ok(PlanReport {
        instance: prep.name,
        rows,
        cells: results,
        checks,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_parsing() {
        assert_eq!(
            "gen:convex:7".parse::<InstanceSource>().unwrap(),
            InstanceSource::Generated(Generator::new(GenKind::Convex, 7))
        );
        let g = "gen:random:1:2:3".parse::<InstanceSource>().unwrap();
        assert_eq!(
            g,
            InstanceSource::Generated(Generator {
                kind: GenKind::Random,
                dim: 2,
                states: 3,
                seed: 1
            })
        );
        assert!("gen:nope".parse::<InstanceSource>().is_err());
        assert!("gen:convex:x".parse::<InstanceSource>().is_err());
        assert_eq!(
            "a/b.toml".parse::<InstanceSource>().unwrap(),
            InstanceSource::File("a/b.toml".into())
        );
    }

    #[test]
    fn plan_validation() {
        let mut p = ExperimentPlan::new(
            InstanceSource::Generated(Generator::new(GenKind::Convex, 0)),
            Algorithm::Pdfw,
            "out",
        );
        assert!(p.validate().is_ok());
        p.horizons = vec![100, 100];
        assert!(p.validate().is_err());
        p.horizons = vec![100, 10];
        assert!(p.validate().is_err());
        p.horizons = vec![];
        assert!(p.validate().is_err());
        p.horizons = vec![10];
        p.seeds = 0;
        assert!(p.validate().is_err());
        p.seeds = 1;
        p.algorithm = Algorithm::Pdgrad;
        p.horizons = vec![1];
        assert!(p.validate().is_err(), "beta = 1 at T = 1");
    }

    #[test]
    fn incompatible_algorithm() {
        let p = ExperimentPlan::new(
            InstanceSource::Generated(Generator::new(GenKind::Convex, 0)),
            Algorithm::Distributed,
            "out",
        );
        let prep = Prepared::load(&p.source).unwrap();
        assert!(p.validate_against(&prep).is_err());
    }
}
