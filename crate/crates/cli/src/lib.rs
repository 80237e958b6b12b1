//! Command-line surface of the `hypervirial` tool.
//!
//! Exit status: 0 success, 1 failed verification or fit, 2 usage error
//! (including unreadable or unwritable paths), 3 internal consistency error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypervirial::analysis::{
    default_window, direct_eigenvalue, fit_gamma_growth_with_order, optimal_truncation,
    SolverSettings, DEFAULT_RICHARDSON_ORDER,
};
use hypervirial::bench::{run_bench, BenchOptions, BENCH_ORACLE_LIMIT};
use hypervirial::document::{CacheOutcome, Metadata, Scaling, SeriesCache, SeriesDocument};
use hypervirial::rspt::DEFAULT_ORACLE_LIMIT;
use hypervirial::{
    energy_series, rspt_series_with_limit, AnalysisError, BenchError, DocumentError, EnergySeries,
    EngineError, MomentTable, OracleError, PotentialFamily, PotentialKind, QuantumState,
};
use rug::Float;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "hypervirial", version, about = "Exact perturbation series of radial eigenvalue problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the energy coefficients eps(0..=order) of one state.
    Compute(ComputeArgs),
    /// Compare the moment recursion with the wavefunction oracle (n = 0).
    Verify(VerifyArgs),
    /// Estimate the large-order growth law eps(k) ~ (-1)^(k+1) Gamma(k+b) a^k.
    Asymptotics(AsymptoticsArgs),
    /// Time both methods on the ground state.
    Bench(BenchArgs),
    /// Solve the eigenvalue problem directly and compare with the truncated series.
    Solve(SolveArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    /// -1/x + l(l+1)/x² + g x
    Cornell,
    /// x² + l(l+1)/x² + g x⁴
    Quartic,
    /// -1/x + l(l+1)/x² + g x^p (needs --p)
    Coulomb,
    /// x² + l(l+1)/x² + g x^(2p) (needs --p)
    Oscillator,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(value_enum)]
    pub family: FamilyName,
    /// Perturbation exponent for the generic families.
    #[arg(long)]
    pub p: Option<u32>,
}

impl FamilyArgs {
    fn resolve(&self) -> Result<PotentialFamily, Failure> {
        let (kind, fixed) = match self.family {
            FamilyName::Cornell => (PotentialKind::CoulombPlusPower, Some(1)),
            FamilyName::Quartic => (PotentialKind::OscillatorPlusEvenPower, Some(2)),
            FamilyName::Coulomb => (PotentialKind::CoulombPlusPower, None),
            FamilyName::Oscillator => (PotentialKind::OscillatorPlusEvenPower, None),
        };
        let p = match (fixed, self.p) {
            (Some(f), Some(p)) if p != f => {
                return Err(Failure::usage(format!(
                    "{:?} fixes p = {f}; use the generic family for p = {p}",
                    self.family
                )))
            }
            (Some(f), _) => f,
            (None, Some(p)) => p,
            (None, None) => return Err(Failure::usage("--p is required for this family")),
        };
        PotentialFamily::new(kind, p).map_err(|e| Failure::usage(e.to_string()))
    }
}

#[derive(Args, Debug, Clone)]
pub struct CacheArgs {
    /// Reuse and extend series stored in the cache directory.
    #[arg(long)]
    pub cache: bool,
    #[arg(long, default_value = "hypervirial-cache")]
    pub cache_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = SeriesFormat::Json)]
    pub format: SeriesFormat,
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Emit 4^k eps(k) instead of eps(k).
    #[arg(long)]
    pub table2_scaling: bool,
    /// Re-verify the moment table exactly after computing it.
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    pub lmax: u32,
    #[arg(long)]
    pub order: usize,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    pub oracle_limit: usize,
    /// Print only mismatches and the summary.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Markdown,
    Json,
}

#[derive(Args, Debug)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value_t = 1000)]
    pub order: usize,
    /// `k_lo,k_hi`; defaults to the last fifth of the series.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(usize, usize)>,
    #[arg(long, default_value_t = DEFAULT_RICHARDSON_ORDER)]
    pub richardson: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
    pub format: ReportFormat,
    /// Tail rows of the diagnostics table to print.
    #[arg(long, default_value_t = 10)]
    pub tail: usize,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Comma-separated orders, e.g. `10,20,30,40`.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub orders: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = BENCH_ORACLE_LIMIT)]
    pub oracle_limit: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
    pub format: ReportFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub g: f64,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    /// Order of the series used for the truncated sum.
    #[arg(long, default_value_t = 60)]
    pub order: usize,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Relative tolerance of the direct solution; by default fine enough to
    /// resolve the truncation error bound.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Stop after the Numerov stage.
    #[arg(long)]
    pub no_refine: bool,
}

fn parse_window(text: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| "expected k_lo,k_hi".to_owned())?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

/// A failed command and the exit status it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const CHECK: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INTERNAL: u8 = 3;

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: Self::USAGE,
            message: message.into(),
        }
    }

    fn check(message: impl Into<String>) -> Self {
        Failure {
            code: Self::CHECK,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: Self::INTERNAL,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::InvalidIndex { .. } | EngineError::InvalidColumn(_) => Failure::usage(e.to_string()),
            _ => Failure::internal(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::UnsupportedState { .. } | OracleError::OrderLimit { .. } => {
                Failure::usage(e.to_string())
            }
            _ => Failure::internal(format!("oracle failure: {e}")),
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Engine(inner) => inner.into(),
            DocumentError::CachePrefixMismatch { .. } => Failure::internal(e.to_string()),
            DocumentError::Io(_) => Failure::usage(e.to_string()),
            _ => Failure::usage(format!("unusable series document: {e}")),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Parses `args` and runs the command, writing results to `out`. Usage
/// errors detected by the parser are returned with their rendered message.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Failure {
            code: 0,
            message: e.to_string(),
        },
        _ => Failure::usage(e.to_string()),
    })?;
    execute(cli.command, out)
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Compute(args) => cmd_compute(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Asymptotics(args) => cmd_asymptotics(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
        Command::Solve(args) => cmd_solve(&args, out),
    }
}

fn obtain_series(
    family: PotentialFamily,
    state: QuantumState,
    order: usize,
    cache: &CacheArgs,
    log: &mut dyn Write,
) -> Result<(EnergySeries, Option<f64>), Failure> {
    let start = Instant::now();
    if cache.cache {
        let store = SeriesCache::new(&cache.cache_dir);
        let (series, outcome) = store.get_or_compute(family, state, order)?;
        let note = match outcome {
            CacheOutcome::Computed => "computed and cached".to_owned(),
            CacheOutcome::Hit { cached_order } => format!("cache hit (cached order {cached_order})"),
            CacheOutcome::Extended { cached_order } => {
                format!("extended cached order {cached_order}; prefix verified")
            }
        };
        writeln!(log, "# {note}: {}", store.path_for(family, state).display())?;
        return Ok((series, Some(start.elapsed().as_secs_f64())));
    }
    let series = energy_series(family, state, order)?;
    Ok((series, Some(start.elapsed().as_secs_f64())))
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

pub fn cmd_compute(args: &ComputeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let family = args.family.resolve()?;
    let state = QuantumState::new(args.n, args.l);
    let mut sink = std::io::sink();
    let (series, wall) = obtain_series(family, state, args.order, &args.cache, &mut sink)?;
    if args.check {
        let table = MomentTable::build(family, state, args.order)?;
        table.verify_normalization()?;
        table.verify_hellmann_feynman()?;
        table.verify_hypervirial()?;
        if table.series() != series {
            return Err(Failure::internal("cached series differs from the checked table"));
        }
    }
    let scaling = if args.table2_scaling {
        Scaling::PowersOfFour
    } else {
        Scaling::None
    };
    let mut document = SeriesDocument::with_scaling(&series, scaling);
    let text = match args.format {
        SeriesFormat::Json => {
            document.metadata = Metadata::now(wall);
            document.to_json()?
        }
        SeriesFormat::Csv => document.to_csv(),
    };
    emit(args.output.as_deref(), &text, out)
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let family = args.family.resolve()?;
    if args.order > args.oracle_limit {
        return Err(Failure::usage(format!(
            "order {} exceeds the oracle limit {} (raise it with --oracle-limit)",
            args.order, args.oracle_limit
        )));
    }
    let mut mismatches = 0usize;
    let mut compared = 0usize;
    for l in 0..=args.lmax {
        let state = QuantumState::new(0, l);
        let engine = energy_series(family, state, args.order)?;
        let oracle = rspt_series_with_limit(family, l, args.order, args.oracle_limit)?;
        for (k, (a, b)) in engine.coefficients().iter().zip(oracle.coefficients()).enumerate() {
            compared += 1;
            let ok = a == b;
            if !ok {
                mismatches += 1;
            }
            if !ok || !args.quiet {
                writeln!(
                    out,
                    "l={l} k={k} {} hfhv={} rspt={}",
                    if ok { "match" } else { "MISMATCH" },
                    hypervirial::exact::to_fraction_string(a),
                    hypervirial::exact::to_fraction_string(b)
                )?;
            }
        }
    }
    writeln!(out, "{compared} coefficients compared, {mismatches} mismatches")?;
    if mismatches > 0 {
        return Err(Failure::check(format!("{mismatches} coefficients differ")));
    }
    Ok(())
}

pub fn cmd_asymptotics(args: &AsymptoticsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let family = args.family.resolve()?;
    let state = QuantumState::new(args.n, args.l);
    let window = args.window.unwrap_or_else(|| default_window(args.order));
    let (lo, hi) = window;
    if hi + 2 > args.order {
        return Err(Failure::usage(format!(
            "window end {hi} needs --order of at least {}",
            hi + 2
        )));
    }
    if lo == 0 || hi < lo || hi - lo + 1 < 10 {
        return Err(Failure::usage(format!(
            "window ({lo}, {hi}) must satisfy 1 <= k_lo and span at least 10 orders"
        )));
    }
    let (series, _) = obtain_series(family, state, args.order, &args.cache, out)?;
    let signs = series.check_sign_alternation();
    let fit = fit_gamma_growth_with_order(&series, window, args.richardson);
    match args.format {
        ReportFormat::Json => {
            let value = serde_json::json!({
                "family": family,
                "state": state,
                "order": args.order,
                "sign_alternation": signs.as_ref().map(|_| "ok".to_owned()).unwrap_or_else(|e| e.to_string()),
                "fit": fit.as_ref().ok(),
                "error": fit.as_ref().err().map(ToString::to_string),
                "diagnostics": match &fit {
                    Err(AnalysisError::FitUnreliable { diagnostics, .. }) => Some(diagnostics),
                    _ => None,
                },
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("serializable"))?;
        }
        ReportFormat::Markdown => {
            writeln!(out, "state {} of U = {}, order {}", state.label(), family, args.order)?;
            match &signs {
                Ok(()) => writeln!(out, "sign pattern (-1)^(k+1): holds for 1 <= k <= {}", args.order)?,
                Err(e) => writeln!(out, "sign pattern (-1)^(k+1): violated, {e}")?,
            }
            match &fit {
                Ok(fit) => {
                    writeln!(out, "window: ({lo}, {hi}), Richardson order {}", args.richardson)?;
                    writeln!(out, "a = {:.10}", fit.a)?;
                    writeln!(out, "b = {:.10}", fit.b)?;
                    write_diagnostics(out, &fit.diagnostics, args.tail)?;
                }
                Err(AnalysisError::FitUnreliable { reason, diagnostics }) => {
                    writeln!(out, "fit unreliable: {reason}")?;
                    write_diagnostics(out, diagnostics, args.tail)?;
                }
                Err(_) => {}
            }
        }
    }
    match fit {
        Ok(_) => Ok(()),
        Err(e @ AnalysisError::InvalidWindow(_)) => Err(Failure::usage(e.to_string())),
        Err(e) => Err(Failure::check(e.to_string())),
    }
}

fn write_diagnostics(
    out: &mut dyn Write,
    d: &hypervirial::analysis::FitDiagnostics,
    tail: usize,
) -> std::io::Result<()> {
    writeln!(out, "\n| k | r_k | r_(k+1) - r_k | r_k/a - k | a (extrap.) | b (extrap.) |")?;
    writeln!(out, "|---:|---:|---:|---:|---:|---:|")?;
    let start = d.ks.len().saturating_sub(tail);
    let cell = |v: &[f64], i: usize| v.get(i).map_or("-".to_owned(), |x| format!("{x:.10}"));
    for i in start..d.ks.len() {
        writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} |",
            d.ks[i],
            cell(&d.ratios, i),
            cell(&d.differences, i),
            cell(&d.shifted, i),
            cell(&d.a_estimates, i),
            cell(&d.b_estimates, i)
        )?;
    }
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let family = args.family.resolve()?;
    let options = BenchOptions {
        repeats: args.repeats,
        oracle_limit: args.oracle_limit,
    };
    let report = run_bench(family, &args.orders, &options).map_err(|e| match e {
        BenchError::Disagreement { .. } => Failure::internal(e.to_string()),
        BenchError::Engine(inner) => inner.into(),
        BenchError::Oracle(inner) => inner.into(),
        BenchError::NoOrders | BenchError::NoRepeats => Failure::usage(e.to_string()),
    })?;
    let text = match args.format {
        ReportFormat::Markdown => report.to_markdown(),
        ReportFormat::Json => report.to_json(),
    };
    emit(args.output.as_deref(), &text, out)
}

/// Enough significant digits to show `value` down to `resolution`.
fn digits_for(value: &Float, resolution: &Float) -> usize {
    let magnitude = |f: &Float| f.get_exp().map_or(0, i64::from);
    let bits = (magnitude(value) - magnitude(resolution)).max(0) as f64 + 8.0;
    ((bits * std::f64::consts::LOG10_2).ceil() as usize).clamp(17, 400)
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let family = args.family.resolve()?;
    if !(args.g.is_finite() && args.g >= 0.0) {
        return Err(Failure::usage(format!("--g must be non-negative, got {}", args.g)));
    }
    let state = QuantumState::new(args.n, args.l);
    let series = energy_series(family, state, args.order)?;
    let truncated = optimal_truncation(&series, args.g).map_err(|e| Failure::usage(e.to_string()))?;

    let mut settings = SolverSettings::for_state(family, state);
    if let Some(x) = args.x_max {
        settings.x_max = x;
    }
    if let Some(h) = args.step {
        settings.step = h;
    }
    settings.refine = !args.no_refine;
    settings.tolerance = match args.tolerance {
        Some(t) => t,
        None if settings.refine && !truncated.error_bound.is_zero() => {
            let scale = truncated.value_f64().abs().max(1e-3);
            (truncated.error_bound_f64() / 1000.0 / scale).clamp(1e-300, 1e-10)
        }
        None => 1e-10,
    };
    let direct = direct_eigenvalue(family, state, args.g, &settings).map_err(|e| match e {
        AnalysisError::InvalidArgument(_) => Failure::usage(e.to_string()),
        _ => Failure::check(e.to_string()),
    })?;

    let precision = direct.value.prec().max(truncated.value.prec());
    let difference = Float::with_val(precision, &direct.value - &truncated.value);
    let slack = Float::with_val(precision, &direct.value * settings.tolerance).abs();
    let allowed = Float::with_val(precision, &truncated.error_bound + &slack);
    let agree = Float::with_val(precision, difference.abs_ref()) <= allowed;

    let resolution = if truncated.error_bound.is_zero() {
        slack.clone()
    } else {
        truncated.error_bound.clone()
    };
    let digits = digits_for(&direct.value, &resolution);
    let show = |f: &Float| format!("{f:.digits$}");
    writeln!(out, "state {} of U = {}, g = {:e}", state.label(), family, args.g)?;
    writeln!(out, "direct eigenvalue     {}", show(&direct.value))?;
    writeln!(out, "truncated series      {}", show(&truncated.value))?;
    writeln!(out, "K*                    {}", truncated.k_star)?;
    writeln!(out, "error bound           {:.6}", truncated.error_bound)?;
    writeln!(out, "difference            {difference:.6}")?;
    writeln!(out, "solver tolerance      {:e} (relative)", settings.tolerance)?;
    writeln!(out, "interior nodes        {}", direct.nodes)?;
    writeln!(out, "agreement             {}", if agree { "yes" } else { "no" })?;
    if !agree {
        return Err(Failure::check("direct and truncated values differ by more than the bound"));
    }
    Ok(())
}
