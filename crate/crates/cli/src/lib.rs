//! Command-line driver: generate instances, run the solvers, write traces.
//!
//! Every command writes `summary.txt` and one or more trace CSV files into
//! `--out`. Exit codes: 0 when the run converged, 2 when a budget ran out
//! (results are still written), 1 on usage, input or IO errors.

// `!(v > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gcdqp::alm::{self, AlmOptions, EpsSchedule};
use gcdqp::baselines::{self, BaselineOptions};
use gcdqp::gcd::{self, GcdOptions};
use gcdqp::instances;
use gcdqp::matrix::format_f64;
use gcdqp::nmf::{self, NmfOptions};
use gcdqp::{DenseMatrix, LinNqpProblem, NmfProblem, NqpProblem, SolveReport, TraceRow};

pub const TRACE_HEADER: &str = "epoch,updates,time_sec,objective,residual";

#[derive(Parser, Debug)]
#[command(name = "gcdqp", version, about = "Greedy coordinate descent for non-negative QPs")]
pub struct Cli {
    /// File of `key=value` lines supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance and write it in the matrix file format.
    Gen(Flags),
    /// Solve an NQP with one method.
    SolveNqp(Flags),
    /// Solve an equality-constrained NQP with the augmented Lagrangian method.
    SolveLinnqp(Flags),
    /// Non-negative matrix factorization by alternating minimization.
    Nmf(Flags),
    /// Run all four NQP methods on one instance, one trace per method.
    Compare(Flags),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Greedy,
    Cyclic,
    Random,
    Fista,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Greedy, Method::Cyclic, Method::Random, Method::Fista];

    fn name(self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Cyclic => "cyclic",
            Method::Random => "random",
            Method::Fista => "fista",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Randpsd,
    Hard,
    Linnqp,
    Nmf,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Subproblem tolerance: a number, or `halve:<initial>` for a halving schedule.
    #[arg(long = "eps-k")]
    pub eps_k: Option<String>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long = "beta-growth")]
    pub beta_growth: Option<f64>,
    #[arg(long = "beta-max")]
    pub beta_max: Option<f64>,
    #[arg(long = "max-outer")]
    pub max_outer: Option<usize>,
    #[arg(long = "max-updates")]
    pub max_updates: Option<u64>,
    #[arg(long = "fit-tol")]
    pub fit_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long, value_enum)]
    pub gen: Option<Generator>,
    #[arg(long)]
    pub p: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<PathBuf>,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub mat: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Disable factor rescaling in `nmf`.
    #[arg(long = "no-rescale")]
    pub no_rescale: bool,
    /// Export each basis column of X reshaped to `HxW`.
    #[arg(long = "basis-shape")]
    pub basis_shape: Option<String>,
}

/// Fills every unset flag from the config map; flags given on the command line win.
fn merge_config(flags: &mut Flags, cfg: &BTreeMap<String, String>) -> Result<()> {
    fn set<T: std::str::FromStr>(slot: &mut Option<T>, cfg: &BTreeMap<String, String>, key: &str) -> Result<()>
    where
        T::Err: std::fmt::Display,
    {
        if slot.is_none() {
            if let Some(v) = cfg.get(key) {
                *slot = Some(v.parse().map_err(|e| anyhow!("config key {key}: {e}"))?);
            }
        }
        Ok(())
    }
    set(&mut flags.n, cfg, "n")?;
    set(&mut flags.m, cfg, "m")?;
    set(&mut flags.r, cfg, "r")?;
    set(&mut flags.seed, cfg, "seed")?;
    set(&mut flags.eps, cfg, "eps")?;
    set(&mut flags.eps_k, cfg, "eps-k")?;
    set(&mut flags.beta0, cfg, "beta0")?;
    set(&mut flags.beta_growth, cfg, "beta-growth")?;
    set(&mut flags.beta_max, cfg, "beta-max")?;
    set(&mut flags.max_outer, cfg, "max-outer")?;
    set(&mut flags.max_updates, cfg, "max-updates")?;
    set(&mut flags.fit_tol, cfg, "fit-tol")?;
    set(&mut flags.p, cfg, "p")?;
    set(&mut flags.d, cfg, "d")?;
    set(&mut flags.q, cfg, "q")?;
    set(&mut flags.c, cfg, "c")?;
    set(&mut flags.a, cfg, "a")?;
    set(&mut flags.b, cfg, "b")?;
    set(&mut flags.mat, cfg, "mat")?;
    set(&mut flags.out, cfg, "out")?;
    set(&mut flags.basis_shape, cfg, "basis-shape")?;
    if flags.method.is_none() {
        if let Some(v) = cfg.get("method") {
            flags.method = Some(Method::from_str(v, true).map_err(|e| anyhow!("config key method: {e}"))?);
        }
    }
    if flags.gen.is_none() {
        if let Some(v) = cfg.get("gen") {
            flags.gen = Some(Generator::from_str(v, true).map_err(|e| anyhow!("config key gen: {e}"))?);
        }
    }
    if !flags.no_rescale {
        if let Some(v) = cfg.get("no-rescale") {
            flags.no_rescale = v.parse().map_err(|e| anyhow!("config key no-rescale: {e}"))?;
        }
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key=value", lineno + 1))?;
        map.insert(k.trim().trim_start_matches("--").to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    BudgetExhausted,
}

/// Entry point used by the binary: returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(Status::Converged) => 0,
        Ok(Status::BudgetExhausted) => 2,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn execute(cli: Cli) -> Result<Status> {
    let cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            parse_config(&text)?
        }
        None => BTreeMap::new(),
    };
    let (name, mut flags) = match cli.command {
        Command::Gen(f) => ("gen", f),
        Command::SolveNqp(f) => ("solve-nqp", f),
        Command::SolveLinnqp(f) => ("solve-linnqp", f),
        Command::Nmf(f) => ("nmf", f),
        Command::Compare(f) => ("compare", f),
    };
    merge_config(&mut flags, &cfg)?;
    let out = flags.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    match name {
        "gen" => cmd_gen(&flags, &out),
        "solve-nqp" => cmd_solve_nqp(&flags, &out),
        "solve-linnqp" => cmd_solve_linnqp(&flags, &out),
        "nmf" => cmd_nmf(&flags, &out),
        "compare" => cmd_compare(&flags, &out),
        _ => unreachable!(),
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        bail!("--{name} must be positive, got {v}");
    }
    Ok(v)
}

fn require<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| anyhow!("missing --{name}"))
}

fn nqp_from_flags(flags: &Flags) -> Result<NqpProblem> {
    match (flags.gen, &flags.p, &flags.d) {
        (Some(Generator::Randpsd), _, _) => {
            let n = require(&flags.n, "n")?;
            if n < 2 {
                bail!("--n must be at least 2");
            }
            Ok(instances::gen_random_psd_nqp(n, flags.seed.unwrap_or(0)))
        }
        (Some(Generator::Hard), _, _) => {
            let n = require(&flags.n, "n")?;
            if n < 2 {
                bail!("--n must be at least 2");
            }
            Ok(instances::gen_hard_nqp(n))
        }
        (Some(g), _, _) => bail!("generator {g:?} does not produce an NQP"),
        (None, Some(p), Some(d)) => {
            let p = instances::load_matrix(p)?;
            let d = instances::load_vector(d)?;
            Ok(NqpProblem::new(p, d)?)
        }
        _ => bail!("give --gen randpsd|hard or both --p and --d"),
    }
}

fn lin_nqp_from_flags(flags: &Flags) -> Result<LinNqpProblem> {
    match flags.gen {
        Some(Generator::Linnqp) => {
            let (m, n) = (require(&flags.m, "m")?, require(&flags.n, "n")?);
            if m == 0 || m >= n {
                bail!("need 1 <= m < n");
            }
            Ok(instances::gen_lin_nqp(m, n, flags.seed.unwrap_or(0)).problem)
        }
        Some(g) => bail!("generator {g:?} does not produce a constrained NQP"),
        None => {
            let q = instances::load_matrix(require(&flags.q, "q")?)?;
            let c = instances::load_vector(require(&flags.c, "c")?)?;
            let a = instances::load_matrix(require(&flags.a, "a")?)?;
            let b = instances::load_vector(require(&flags.b, "b")?)?;
            Ok(LinNqpProblem::new(q, c, a, b)?)
        }
    }
}

fn nmf_from_flags(flags: &Flags) -> Result<NmfProblem> {
    match flags.gen {
        Some(Generator::Nmf) => {
            let (m, n, r) = (require(&flags.m, "m")?, require(&flags.n, "n")?, require(&flags.r, "r")?);
            if r == 0 || r > m.min(n) {
                bail!("need 1 <= r <= min(m, n)");
            }
            Ok(instances::gen_synthetic_nmf(m, n, r, flags.seed.unwrap_or(0)).problem)
        }
        Some(g) => bail!("generator {g:?} does not produce an NMF instance"),
        None => {
            let m = instances::load_matrix(require(&flags.mat, "mat")?)?;
            Ok(NmfProblem::new(m, require(&flags.r, "r")?)?)
        }
    }
}

fn cmd_gen(flags: &Flags, out: &Path) -> Result<Status> {
    let seed = flags.seed.unwrap_or(0);
    match require(&flags.gen, "gen")? {
        Generator::Randpsd | Generator::Hard => {
            let prob = nqp_from_flags(flags)?;
            prob.p().save(out.join("p.mat"))?;
            prob.d().save(out.join("d.vec"))?;
        }
        Generator::Linnqp => {
            let (m, n) = (require(&flags.m, "m")?, require(&flags.n, "n")?);
            if m == 0 || m >= n {
                bail!("need 1 <= m < n");
            }
            let inst = instances::gen_lin_nqp(m, n, seed);
            inst.problem.q().save(out.join("q.mat"))?;
            inst.problem.c().save(out.join("c.vec"))?;
            inst.problem.a().save(out.join("a.mat"))?;
            inst.problem.b().save(out.join("b.vec"))?;
            inst.feasible_point.save(out.join("x_feas.vec"))?;
        }
        Generator::Nmf => {
            let (m, n, r) = (require(&flags.m, "m")?, require(&flags.n, "n")?, require(&flags.r, "r")?);
            if r == 0 || r > m.min(n) {
                bail!("need 1 <= r <= min(m, n)");
            }
            let s = instances::gen_synthetic_nmf(m, n, r, seed);
            s.problem.data().save(out.join("m.mat"))?;
            s.left.save(out.join("l.mat"))?;
            s.right.save(out.join("r.mat"))?;
        }
    }
    Ok(Status::Converged)
}

fn run_method(method: Method, prob: &NqpProblem, flags: &Flags) -> Result<SolveReport> {
    let n = prob.dim();
    let eps = positive("eps", flags.eps.unwrap_or(1e-6))?;
    let x0 = vec![0.0; n];
    let report = match method {
        Method::Greedy => {
            let mut opts = GcdOptions::new(eps);
            opts.max_updates = flags.max_updates;
            gcd::solve(prob, &x0, &opts)?
        }
        _ => {
            let mut opts = BaselineOptions::new(eps);
            opts.max_updates = flags.max_updates;
            opts.rng_seed = flags.seed.unwrap_or(0);
            // same work budget expressed in full-gradient iterations
            let budget = flags.max_updates.unwrap_or(1000 * n as u64);
            opts.fista_max_iters = budget.div_ceil(n as u64);
            match method {
                Method::Cyclic => baselines::cyclic_solve(prob, &x0, &opts)?,
                Method::Random => baselines::randomized_solve(prob, &x0, &opts)?,
                Method::Fista => baselines::fista_solve(prob, &x0, &opts)?,
                Method::Greedy => unreachable!(),
            }
        }
    };
    Ok(report)
}

fn status(converged: bool) -> Status {
    if converged {
        Status::Converged
    } else {
        Status::BudgetExhausted
    }
}

fn cmd_solve_nqp(flags: &Flags, out: &Path) -> Result<Status> {
    let prob = nqp_from_flags(flags)?;
    let method = flags.method.unwrap_or(Method::Greedy);
    let start = Instant::now();
    let report = run_method(method, &prob, flags)?;
    let wall = start.elapsed().as_secs_f64();
    write_trace(&report.trace, out.join("trace.csv"))?;
    report.x.save(out.join("x.vec"))?;
    let mut s = Summary::new("solve-nqp");
    s.put("method", method.name());
    s.put("n", prob.dim());
    s.nqp(&report);
    s.put("time_sec", format_f64(wall));
    s.write(out)?;
    Ok(status(report.converged))
}

fn cmd_compare(flags: &Flags, out: &Path) -> Result<Status> {
    let prob = nqp_from_flags(flags)?;
    let start = Instant::now();
    let results: Vec<(Method, Result<SolveReport>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = Method::ALL
            .iter()
            .map(|&m| {
                let prob = &prob;
                (m, scope.spawn(move || run_method(m, prob, flags)))
            })
            .collect();
        handles
            .into_iter()
            .map(|(m, h)| (m, h.join().unwrap_or_else(|_| Err(anyhow!("solver thread panicked")))))
            .collect()
    });
    let wall = start.elapsed().as_secs_f64();
    let mut s = Summary::new("compare");
    s.put("n", prob.dim());
    let mut all_converged = true;
    for (method, res) in results {
        let report = res.with_context(|| format!("method {}", method.name()))?;
        write_trace(&report.trace, out.join(format!("trace_{}.csv", method.name())))?;
        let p = method.name();
        s.put(&format!("{p}.objective"), format_f64(report.objective));
        s.put(&format!("{p}.residual"), format_f64(report.delta));
        s.put(&format!("{p}.updates"), report.updates);
        s.put(&format!("{p}.epochs"), format_f64(report.epochs()));
        s.put(&format!("{p}.converged"), report.converged);
        all_converged &= report.converged;
    }
    s.put("time_sec", format_f64(wall));
    s.write(out)?;
    Ok(status(all_converged))
}

fn parse_eps_schedule(arg: &str) -> Result<EpsSchedule> {
    if let Some(init) = arg.strip_prefix("halve:") {
        let initial: f64 = init.parse().with_context(|| format!("bad --eps-k {arg:?}"))?;
        positive("eps-k", initial)?;
        return Ok(EpsSchedule::Halving { initial, floor: 1e-12 });
    }
    let v: f64 = arg.parse().with_context(|| format!("bad --eps-k {arg:?}"))?;
    Ok(EpsSchedule::Constant(positive("eps-k", v)?))
}

fn cmd_solve_linnqp(flags: &Flags, out: &Path) -> Result<Status> {
    let prob = lin_nqp_from_flags(flags)?;
    let mut opts = AlmOptions::new(positive("eps", flags.eps.unwrap_or(1e-3))?);
    if let Some(arg) = &flags.eps_k {
        opts.eps_k = parse_eps_schedule(arg)?;
    }
    if let Some(v) = flags.beta0 {
        opts.beta0 = positive("beta0", v)?;
    }
    if let Some(v) = flags.beta_growth {
        opts.growth = v;
    }
    if let Some(v) = flags.beta_max {
        opts.beta_max = v;
    }
    if let Some(v) = flags.max_outer {
        opts.max_outer = v;
    }
    opts.inner_max_updates = flags.max_updates;
    let start = Instant::now();
    let report = alm::solve(&prob, &vec![0.0; prob.dim()], &opts)?;
    let wall = start.elapsed().as_secs_f64();
    write_trace(&report.trace_rows(), out.join("trace.csv"))?;
    report.x.save(out.join("x.vec"))?;
    report.y.save(out.join("y.vec"))?;
    let mut s = Summary::new("solve-linnqp");
    s.put("n", prob.dim());
    s.put("m", prob.constraints());
    s.put("objective", format_f64(report.objective));
    s.put("residual", format_f64(report.primal_residual));
    s.put("dual_residual_bound", format_f64(report.dual_residual_bound));
    s.put("outer_iterations", report.outer_iterations);
    s.put("updates", report.updates);
    s.put("converged", report.converged);
    s.put("time_sec", format_f64(wall));
    s.write(out)?;
    Ok(status(report.converged))
}

fn parse_shape(arg: &str) -> Result<(usize, usize)> {
    let (h, w) = arg
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow!("--basis-shape must look like HxW, got {arg:?}"))?;
    Ok((h.trim().parse()?, w.trim().parse()?))
}

fn cmd_nmf(flags: &Flags, out: &Path) -> Result<Status> {
    let prob = nmf_from_flags(flags)?;
    let mut opts = NmfOptions::default();
    if let Some(arg) = &flags.eps_k {
        match parse_eps_schedule(arg)? {
            EpsSchedule::Constant(v) => opts.eps_k = v,
            EpsSchedule::Halving { initial, .. } => {
                opts.eps_k = initial;
                opts.halve_eps = true;
            }
        }
    }
    if let Some(v) = flags.fit_tol {
        opts.fit_tol = positive("fit-tol", v)?;
    }
    if let Some(v) = flags.max_outer {
        opts.max_outer = v;
    }
    opts.rescale = !flags.no_rescale;
    opts.seed = flags.seed.unwrap_or(0);
    opts.inner_max_updates = flags.max_updates;
    let shape = flags.basis_shape.as_deref().map(parse_shape).transpose()?;
    if let Some((h, w)) = shape {
        if h * w != prob.data().rows() {
            bail!("--basis-shape {h}x{w} does not match {} rows", prob.data().rows());
        }
    }

    let start = Instant::now();
    let report = nmf::altmin_solve(&prob, &opts, None)?;
    let wall = start.elapsed().as_secs_f64();
    let st = &report.state;
    write_trace(&report.trace_rows(), out.join("trace.csv"))?;
    st.x.save(out.join("x.mat"))?;
    st.y.save(out.join("y.mat"))?;
    if let Some((h, w)) = shape {
        for j in 0..st.x.cols() {
            let col = st.x.col(j);
            DenseMatrix::from_row_major(h, w, col)?.save(out.join(format!("basis_{j}.mat")))?;
        }
    }
    let mut s = Summary::new("nmf");
    s.put("m", prob.data().rows());
    s.put("n", prob.data().cols());
    s.put("r", prob.rank());
    s.put("rescale", opts.rescale);
    s.put("objective", format_f64(st.objective));
    s.put("residual", format_f64(st.fit));
    s.put("fit_is_absolute", st.fit_is_absolute);
    s.put("outer_iterations", st.outer);
    s.put("updates", report.trace.last().map_or(0, |r| r.updates));
    s.put("reseeds", report.reseeds);
    s.put("converged", st.converged);
    s.put("time_sec", format_f64(wall));
    s.write(out)?;
    Ok(status(st.converged))
}

struct Summary(String);

impl Summary {
    fn new(command: &str) -> Self {
        Summary(format!("command={command}\n"))
    }

    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key}={value}");
    }

    fn nqp(&mut self, r: &SolveReport) {
        self.put("objective", format_f64(r.objective));
        self.put("residual", format_f64(r.delta));
        self.put("updates", r.updates);
        self.put("epochs", format_f64(r.epochs()));
        self.put("converged", r.converged);
    }

    fn write(self, out: &Path) -> Result<()> {
        let path = out.join("summary.txt");
        fs::write(&path, self.0).with_context(|| format!("writing {}", path.display()))
    }
}

/// Writes `epoch,updates,time_sec,objective,residual` rows with shortest
/// round-trip decimals.
pub fn write_trace(rows: &[TraceRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            format_f64(r.epoch),
            r.updates,
            format_f64(r.time_sec),
            format_f64(r.objective),
            format_f64(r.residual)
        );
    }
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        bail!("{}: unexpected trace header", path.display());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                bail!("{}:{}: expected 5 fields", path.display(), i + 2);
            }
            let num = |s: &str| s.parse::<f64>().with_context(|| format!("{}:{}", path.display(), i + 2));
            Ok(TraceRow {
                epoch: num(f[0])?,
                updates: f[1].parse().with_context(|| format!("{}:{}", path.display(), i + 2))?,
                time_sec: num(f[2])?,
                objective: num(f[3])?,
                residual: num(f[4])?,
            })
        })
        .collect()
}

/// Trace file contents with the `time_sec` column blanked, for byte comparisons.
pub fn strip_time_column(csv: &str) -> String {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            if f.len() == 5 {
                f[2] = "";
            }
            f.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = parse_config("# comment\nn = 20\n--eps=1e-4\n\nmethod=cyclic\n").unwrap();
        assert_eq!(cfg["n"], "20");
        assert_eq!(cfg["eps"], "1e-4");
        let mut flags = Flags { eps: Some(1e-2), ..Default::default() };
        merge_config(&mut flags, &cfg).unwrap();
        assert_eq!(flags.n, Some(20));
        assert_eq!(flags.eps, Some(1e-2), "flags override config");
        assert_eq!(flags.method, Some(Method::Cyclic));
        assert!(parse_config("novalue\n").is_err());
    }

    #[test]
    fn eps_schedule_parsing() {
        assert_eq!(parse_eps_schedule("1e-3").unwrap(), EpsSchedule::Constant(1e-3));
        assert_eq!(
            parse_eps_schedule("halve:0.1").unwrap(),
            EpsSchedule::Halving { initial: 0.1, floor: 1e-12 }
        );
        assert!(parse_eps_schedule("-1").is_err());
        assert!(parse_eps_schedule("abc").is_err());
    }

    #[test]
    fn shape_parsing() {
        assert_eq!(parse_shape("19x19").unwrap(), (19, 19));
        assert!(parse_shape("19").is_err());
    }

    #[test]
    fn trace_file_shape_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows: Vec<TraceRow> = (0..3)
            .map(|k| TraceRow {
                epoch: k as f64,
                updates: 10 * k,
                time_sec: 0.001 * k as f64,
                objective: -1.0 / (k as f64 + 3.0),
                residual: 1e-7 * k as f64,
            })
            .collect();
        let path = dir.path().join("t.csv");
        write_trace(&rows, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap(), TRACE_HEADER);
        assert_eq!(read_trace(&path).unwrap(), rows);
    }

    #[test]
    fn strip_time() {
        assert_eq!(strip_time_column("a,b,c,d,e\n1,2,0.5,4,5"), "a,b,,d,e\n1,2,,4,5");
    }
}
