//! Command-line front end. Flags override the run file given by `--config`,
//! which overrides built-in defaults.

pub mod config;
pub mod grid;
pub mod output;
pub mod validate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rug::Rational;
use thiserror::Error as ThisError;

use crate::coeffs::{self, exact, Precision};
use crate::error::Error;
use crate::index::StableIndex;
use crate::inversion::{self, InversionConfig, Law, Method};
use crate::simulate::{self, BridgeWindow, McConfig, PassageConfig, DEFAULT_SEED};
use crate::transforms;
use crate::wright::{self, EvalConfig, Route, WrightFn};

use config::{parse_config, ConfigFile};
use grid::Grid;
use output::{num, Table};

/// Default thread count for the Monte Carlo pool when `--threads` is absent.
pub const THREADS_ENV: &str = "STABLE_AREA_THREADS";

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("[{}] {}", .0.origin(), .0)]
    Numerical(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Output { .. } | CliError::Numerical(Error::InvalidInput(_)) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    ValidationFailed(usize),
}

#[derive(Debug, Parser)]
#[command(name = "stable-area", version, about = "Areas under spectrally positive stable excursions, meanders and conditioned paths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run file of `key = value` lines
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write CSV here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance override for evaluation or inversion
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Worker threads for Monte Carlo and inversion grids
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Omit the timestamp line
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate phi, psi, their derivatives, or F
    Eval(EvalArgs),
    /// Dump a coefficient family
    Coeffs(CoeffsArgs),
    /// Closed-form transforms, optionally against Monte Carlo
    Transform(TransformArgs),
    /// Invert the area transforms numerically
    Invert(InvertArgs),
    /// Sample paths and areas
    Simulate(SimulateArgs),
    /// Run every closed-form vs Monte Carlo comparison
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Eval,
    Coeffs,
    Transform,
    Invert,
    Simulate,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FnName {
    Phi,
    Psi,
    #[value(alias = "phi_prime", alias = "dphi")]
    PhiPrime,
    #[value(alias = "psi_prime", alias = "dpsi")]
    PsiPrime,
    /// The complex transform F
    #[value(alias = "F")]
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Series,
    Quadrature,
    Asymptotic,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    pub function: FnName,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Linear grid lo:hi:n
    #[arg(long, allow_hyphen_values = true)]
    pub x_grid: Option<Grid>,
    /// Imaginary part of the argument of F
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub im: f64,
    /// Force one route instead of the automatic choice
    #[arg(long, value_enum)]
    pub route: Option<RouteArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(name = "B", alias = "b")]
    Bell,
    C,
    D,
    Omega,
    Delta,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Highest order
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Area law; omit with --mu/--z for the first-passage transform
    #[arg(long)]
    pub law: Option<Law>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
    /// Add a Monte Carlo estimate and its z-score
    #[arg(long)]
    pub validate: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Real,
    Contour,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long)]
    pub law: Law,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Geometric grid lo:hi:n of s, or of x with --density
    #[arg(long)]
    pub s_grid: Grid,
    #[arg(long)]
    pub density: bool,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Real)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Passage,
    Excursion,
    Meander,
    Conditioned,
    A1,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub target: Target,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Print summary estimates instead of samples
    #[arg(long)]
    pub summary: bool,
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Starting point of the weighted paths for the conditioned target
    #[arg(long, default_value_t = 0.01)]
    pub x0: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    /// Small samples and coarse grids
    #[arg(long)]
    pub quick: bool,
}

/// `alpha` as typed, kept for exact rational work.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSpec {
    pub text: String,
    pub index: StableIndex,
}

impl AlphaSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let v: f64 = text
            .trim()
            .parse()
            .map_err(|_| usage(format!("--alpha {text:?} is not a number")))?;
        let index = StableIndex::new(v).map_err(|e| usage(format!("--alpha {text}: {e}")))?;
        Ok(AlphaSpec {
            text: text.trim().to_string(),
            index,
        })
    }
}

/// Everything a run needs after merging flags, the run file and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub alpha: Option<AlphaSpec>,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub output: Option<PathBuf>,
    pub timestamp: bool,
    pub threads: Option<usize>,
    pub n: Option<usize>,
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    pub nodes: Option<usize>,
}

struct Shared<'a> {
    alpha: Option<&'a str>,
    n: Option<usize>,
    steps: Option<usize>,
    dt: Option<f64>,
    nodes: Option<usize>,
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Eval(_) => CommandKind::Eval,
            Command::Coeffs(_) => CommandKind::Coeffs,
            Command::Transform(_) => CommandKind::Transform,
            Command::Invert(_) => CommandKind::Invert,
            Command::Simulate(_) => CommandKind::Simulate,
            Command::Validate(_) => CommandKind::Validate,
        }
    }

    fn shared(&self) -> Shared<'_> {
        let none = Shared {
            alpha: None,
            n: None,
            steps: None,
            dt: None,
            nodes: None,
        };
        match self {
            Command::Eval(a) => Shared { alpha: a.alpha.as_deref(), ..none },
            Command::Coeffs(a) => Shared {
                alpha: a.alpha.as_deref(),
                n: a.n,
                ..none
            },
            Command::Transform(a) => Shared {
                alpha: a.alpha.as_deref(),
                n: a.n,
                steps: a.steps,
                dt: a.dt,
                ..none
            },
            Command::Invert(a) => Shared {
                alpha: a.alpha.as_deref(),
                nodes: a.nodes,
                ..none
            },
            Command::Simulate(a) => Shared {
                alpha: a.alpha.as_deref(),
                n: a.n,
                steps: a.steps,
                dt: a.dt,
                ..none
            },
            Command::Validate(a) => Shared { alpha: a.alpha.as_deref(), ..none },
        }
    }
}

fn positive<T: PartialOrd + Default + Copy + std::fmt::Display>(key: &str, v: Option<T>) -> Result<Option<T>, CliError> {
    match v {
        Some(x) if x <= T::default() => Err(usage(format!("{key} must be positive, got {x}"))),
        _ => Ok(v),
    }
}

impl RunConfig {
    pub fn resolve(cli: &Cli, file: &ConfigFile) -> Result<Self, CliError> {
        let bad = |e: config::ConfigError| usage(format!("config file: {e}"));
        let shared = cli.command.shared();
        let alpha_text = shared.alpha.map(str::to_string).or_else(|| file.raw("alpha").map(str::to_string));
        let alpha = alpha_text.as_deref().map(AlphaSpec::parse).transpose()?;
        let env_threads = match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| usage(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
            ),
            Err(_) => None,
        };
        let timestamp = !cli.no_timestamp && file.get::<bool>("timestamp").map_err(bad)?.unwrap_or(true);
        let tolerance = cli.tolerance.or(file.get("tolerance").map_err(bad)?);
        if let Some(t) = tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(usage(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(RunConfig {
            command: cli.command.kind(),
            alpha,
            seed: cli.seed.or(file.get("seed").map_err(bad)?).unwrap_or(DEFAULT_SEED),
            tolerance,
            output: cli.output.clone().or_else(|| file.raw("output").map(PathBuf::from)),
            timestamp,
            threads: positive(
                "threads",
                cli.threads.or(file.get("threads").map_err(bad)?).or(env_threads),
            )?,
            n: positive("n", shared.n.or(file.get("n").map_err(bad)?))?,
            steps: positive("steps", shared.steps.or(file.get("steps").map_err(bad)?))?,
            dt: positive("dt", shared.dt.or(file.get("dt").map_err(bad)?))?,
            nodes: positive("nodes", shared.nodes.or(file.get("nodes").map_err(bad)?))?,
        })
    }

    pub fn alpha(&self) -> Result<&AlphaSpec, CliError> {
        self.alpha
            .as_ref()
            .ok_or_else(|| usage("missing --alpha (or `alpha = ...` in the config file)"))
    }

    fn mc(&self) -> McConfig {
        McConfig::with_seed(self.seed)
    }

    fn emit(&self, table: &Table) -> Result<(), CliError> {
        table
            .emit(self.output.as_deref(), self.timestamp)
            .map_err(|source| CliError::Output {
                path: self.output.as_deref().map_or("stdout".into(), |p: &Path| p.display().to_string()),
                source,
            })
    }
}

fn read_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read config file {}: {e}", p.display())))?;
            parse_config(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let file = read_config(cli.config.as_deref())?;
    let rc = RunConfig::resolve(cli, &file)?;
    if let Some(t) = rc.threads {
        // Fails only if the pool already exists, as it does when run is called twice in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match &cli.command {
        Command::Eval(a) => eval(a, &rc),
        Command::Coeffs(a) => coeffs_cmd(a, &rc),
        Command::Transform(a) => transform(a, &rc),
        Command::Invert(a) => invert(a, &rc),
        Command::Simulate(a) => simulate_cmd(a, &rc),
        Command::Validate(a) => validate_cmd(a, &rc),
    }
}

/// Parses the process arguments, runs, and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed(k)) => {
            eprintln!("{k} check(s) failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn eval(a: &EvalArgs, rc: &RunConfig) -> Result<Outcome, CliError> {
    let alpha = rc.alpha()?.index;
    let xs = match (a.x, a.x_grid) {
        (Some(x), None) => vec![x],
        (None, Some(g)) => g.linear(),
        _ => return Err(usage("give exactly one of --x and --x-grid")),
    };
    let mut cfg = EvalConfig::default();
    if let Some(t) = rc.tolerance {
        cfg = cfg.with_tol(t);
    }
    let route = a.route.map(|r| match r {
        RouteArg::Series => Route::Series,
        RouteArg::Quadrature => Route::Quadrature,
        RouteArg::Asymptotic => Route::Asymptotic,
    });
    let table = if a.function == FnName::F {
        let mut t = Table::new(&["lambda_re", "lambda_im", "value_re", "value_im", "abs_error", "route"]);
        for x in xs {
            let lambda = Complex64::new(x, a.im);
            let r = match route {
                None => wright::f_alpha(alpha, lambda, &cfg)?,
                Some(Route::Quadrature) => wright::f_alpha_by_quadrature(alpha, lambda, &cfg)?,
                Some(other) => return Err(usage(format!("F has no {other} route; use series-or-quadrature (default) or quadrature"))),
            };
            t.push(vec![num(x), num(a.im), num(r.value.re), num(r.value.im), num(r.abs_error_estimate), r.route.to_string()]);
        }
        t
    } else {
        if a.im != 0.0 {
            return Err(usage("--im applies to --fn f only"));
        }
        let f = match a.function {
            FnName::Phi => WrightFn::Phi,
            FnName::Psi => WrightFn::Psi,
            FnName::PhiPrime => WrightFn::PhiPrime,
            FnName::PsiPrime => WrightFn::PsiPrime,
            FnName::F => unreachable!("handled above"),
        };
        let mut t = Table::new(&["x", "value", "abs_error", "route"]);
        for x in xs {
            let r = match route {
                None => wright::evaluate(f, alpha, x, &cfg)?,
                Some(route) => wright::evaluate_route(f, alpha, x, route, &cfg)?,
            };
            t.push(vec![num(x), num(r.value), num(r.abs_error_estimate), r.route.to_string()]);
        }
        t
    };
    rc.emit(&table)?;
    Ok(Outcome::Pass)
}

fn coeffs_cmd(a: &CoeffsArgs, rc: &RunConfig) -> Result<Outcome, CliError> {
    let spec = rc.alpha()?;
    let alpha = spec.index;
    let n = rc.n.ok_or_else(|| usage("missing --n (highest order)"))?;
    let rational = || -> Result<Rational, CliError> { Ok(exact::parse_rational(&spec.text)?) };
    let table = match a.family {
        Family::Bell => {
            let exact_b = exact::bell_triangle(&rational()?, n)?;
            let mut t = Table::new(&["n", "k", "value", "exact"]);
            for (i, row) in exact_b.iter().enumerate().skip(1) {
                for (k, e) in row.iter().enumerate().skip(1) {
                    t.push(vec![i.to_string(), k.to_string(), num(coeffs::bell_b(alpha, i, k)?), e.to_string()]);
                }
            }
            t
        }
        Family::C | Family::D => {
            let r = rational()?;
            let ex = if a.family == Family::C {
                exact::c_coefficients(&r, n)?
            } else {
                exact::d_coefficients(&r, n)?
            };
            let tab = coeffs::table(alpha, n)?;
            let values = if a.family == Family::C { tab.c() } else { tab.d() };
            let mut t = Table::new(&["p", "value", "exact"]);
            for (p, e) in ex.iter().enumerate() {
                t.push(vec![p.to_string(), num(values[p]), e.to_string()]);
            }
            t
        }
        Family::Omega => {
            let mut t = Table::new(&["n", "omega", "moment"]);
            for k in 1..=n {
                t.push(vec![
                    k.to_string(),
                    num(coeffs::omega_n(alpha, k, Precision::Auto)?),
                    num(coeffs::moment_ex(alpha, k, Precision::Auto)?),
                ]);
            }
            t
        }
        Family::Delta => {
            let mut t = Table::new(&["n", "delta", "exponent", "moment"]);
            for k in 1..=n {
                t.push(vec![
                    k.to_string(),
                    num(coeffs::delta_n(alpha, k, Precision::Auto)?),
                    num(coeffs::neg_moment_exponent(alpha, k)),
                    num(coeffs::neg_moment_ex(alpha, k, Precision::Auto)?),
                ]);
            }
            t
        }
    };
    rc.emit(&table)?;
    Ok(Outcome::Pass)
}

const DEFAULT_MC_SAMPLES: usize = 20_000;
const DEFAULT_CONDITIONED_STEPS: usize = 1000;
const DEFAULT_FREE_STEPS: usize = 400;

fn area_steps(rc: &RunConfig, alpha: StableIndex) -> Result<usize, CliError> {
    match rc.steps {
        Some(s) => Ok(s),
        None => Ok(simulate::steps_for_gap(alpha, validate::AREA_GAP)?),
    }
}

fn transform(a: &TransformArgs, rc: &RunConfig) -> Result<Outcome, CliError> {
    let alpha = rc.alpha()?.index;
    let n = rc.n.unwrap_or(DEFAULT_MC_SAMPLES);
    let mc = rc.mc();
    let joint = a.mu.is_some() || a.z.is_some();
    let (mut table, row, value, mc_est) = if joint {
        if a.law.is_some() {
            return Err(usage("--law and --mu/--z are exclusive: the first-passage transform has no law"));
        }
        let (z, mu) = (a.z.unwrap_or(1.0), a.mu.unwrap_or(1.0));
        let value = transforms::joint_laplace_t0_area(alpha, z, a.lambda, mu)?;
        let est = if a.validate {
            let cfg = PassageConfig {
                dt: rc.dt.unwrap_or(PassageConfig::default().dt),
                ..Default::default()
            };
            Some(simulate::first_passage_functional(alpha, z, a.lambda, mu, n, &cfg, &mc)?.estimate)
        } else {
            None
        };
        let header: &[&str] = &["z", "lambda", "mu", "value"];
        (Table::new(header), vec![num(z), num(a.lambda), num(mu)], value, est)
    } else {
        let law = a.law.ok_or_else(|| usage("give --law ex|me|up, or --mu/--z for the first-passage transform"))?;
        let value = match law {
            Law::Excursion => transforms::theorem1_alt_rhs(alpha, a.lambda)?,
            Law::Meander => transforms::theorem2_rhs(alpha, a.lambda)?,
            Law::Conditioned => transforms::theorem3_rhs(alpha, a.lambda)?,
        };
        let est = if a.validate {
            Some(match law {
                Law::Excursion | Law::Meander => {
                    let steps = area_steps(rc, alpha)?;
                    let areas = if law == Law::Excursion {
                        simulate::excursion_areas(alpha, n, steps, BridgeWindow::default(), &mc)?
                    } else {
                        simulate::meander_areas(alpha, n, steps, &mc)?
                    };
                    simulate::estimate(&simulate::image_samples(law, alpha, a.lambda, &areas)?, mc.seed)
                }
                Law::Conditioned => {
                    let steps = rc.steps.unwrap_or(DEFAULT_CONDITIONED_STEPS);
                    let w = simulate::conditioned_areas(alpha, 0.01, n, steps, &mc)?;
                    let images = simulate::image_samples(law, alpha, a.lambda, &w.areas)?;
                    simulate::weighted_estimate(&images, &w.weights, mc.seed).0
                }
            })
        } else {
            None
        };
        (Table::new(&["law", "lambda", "value"]), vec![law.tag().to_string(), num(a.lambda)], value, est)
    };
    let mut row = row;
    row.push(num(value));
    let mut outcome = Outcome::Pass;
    if let Some(e) = mc_est {
        let mut header: Vec<String> = table_header(&table);
        header.extend(["mc_mean", "mc_stderr", "z_score"].map(String::from));
        table = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
        let z = e.z_score(value);
        row.extend([num(e.mean), num(e.stderr), num(z)]);
        if !(z.abs() < 3.0) {
            outcome = Outcome::ValidationFailed(1);
        }
    }
    table.push(row);
    rc.emit(&table)?;
    Ok(outcome)
}

fn table_header(t: &Table) -> Vec<String> {
    t.header().to_vec()
}

fn invert(a: &InvertArgs, rc: &RunConfig) -> Result<Outcome, CliError> {
    let alpha = rc.alpha()?.index;
    let defaults = InversionConfig::default();
    let cfg = InversionConfig {
        method: match a.method {
            MethodArg::Real => Method::RealNode,
            MethodArg::Contour => Method::DeformedContour,
        },
        node_count: rc.nodes.unwrap_or(defaults.node_count),
        tolerance: rc.tolerance.unwrap_or(defaults.tolerance),
        ..defaults
    };
    let points = a
        .s_grid
        .geometric()
        .ok_or_else(|| usage("--s-grid needs lo > 0"))?;
    let table = if a.density {
        let mut t = Table::new(&["x", "density"]);
        for x in points {
            t.push(vec![num(x), num(inversion::density_estimate(a.law, alpha, x, &cfg)?)]);
        }
        t
    } else {
        let curve = inversion::laplace_curve(a.law, alpha, &points, &cfg)?;
        let mut t = Table::new(&["s", "value", "err_est"]);
        for i in 0..curve.s_grid.len() {
            t.push(vec![num(curve.s_grid[i]), num(curve.values[i]), num(curve.errors[i])]);
        }
        t
    };
    rc.emit(&table)?;
    Ok(Outcome::Pass)
}

fn estimate_row(t: &mut Table, quantity: &str, e: &simulate::McEstimate) {
    t.push(vec![quantity.to_string(), num(e.mean), num(e.stderr), e.n.to_string(), e.seed.to_string()]);
}

const SUMMARY_HEADER: [&str; 5] = ["quantity", "mean", "stderr", "n", "seed"];

fn simulate_cmd(a: &SimulateArgs, rc: &RunConfig) -> Result<Outcome, CliError> {
    let alpha = rc.alpha()?.index;
    let n = rc.n.unwrap_or(10_000);
    let mc = rc.mc();
    let table = match a.target {
        Target::Passage => {
            let cfg = PassageConfig {
                dt: rc.dt.unwrap_or(PassageConfig::default().dt),
                ..Default::default()
            };
            let r = simulate::first_passage_functional(alpha, a.z, a.lambda, a.mu, n, &cfg, &mc)?;
            let mut t = Table::new(&SUMMARY_HEADER);
            estimate_row(&mut t, "passage_functional", &r.estimate);
            t
        }
        Target::A1 => {
            let steps = rc.steps.unwrap_or(DEFAULT_FREE_STEPS);
            let rows = simulate::area_identity_check(alpha, n, steps, &[0.5, 1.0], &mc)?;
            let mut t = Table::new(&SUMMARY_HEADER);
            for p in rows {
                estimate_row(&mut t, &format!("path_laplace_q{}", p.q), &p.path_side);
                estimate_row(&mut t, &format!("scaled_laplace_q{}", p.q), &p.scaled_side);
            }
            t
        }
        Target::Excursion | Target::Meander => {
            let steps = area_steps(rc, alpha)?;
            let areas = if a.target == Target::Excursion {
                simulate::excursion_areas(alpha, n, steps, BridgeWindow::default(), &mc)?
            } else {
                simulate::meander_areas(alpha, n, steps, &mc)?
            };
            if a.summary {
                let mut t = Table::new(&SUMMARY_HEADER);
                estimate_row(&mut t, "area_mean", &simulate::estimate(&areas, mc.seed));
                estimate_row(&mut t, "laplace_s1", &simulate::laplace_estimate(&areas, 1.0, mc.seed));
                t
            } else {
                let mut t = Table::new(&["sample", "area"]);
                for (i, x) in areas.iter().enumerate() {
                    t.push(vec![i.to_string(), num(*x)]);
                }
                t
            }
        }
        Target::Conditioned => {
            let steps = rc.steps.unwrap_or(DEFAULT_CONDITIONED_STEPS);
            let w = simulate::conditioned_areas(alpha, a.x0, n, steps, &mc)?;
            if a.summary {
                let mut t = Table::new(&SUMMARY_HEADER);
                estimate_row(&mut t, "laplace_s1", &w.laplace(1.0, mc.seed));
                t.push(vec!["ess".into(), num(w.ess()), String::new(), w.areas.len().to_string(), mc.seed.to_string()]);
                t
            } else {
                let mut t = Table::new(&["sample", "area", "weight"]);
                for (i, (x, wt)) in w.areas.iter().zip(&w.weights).enumerate() {
                    t.push(vec![i.to_string(), num(*x), num(*wt)]);
                }
                t
            }
        }
    };
    rc.emit(&table)?;
    Ok(Outcome::Pass)
}

fn validate_cmd(a: &ValidateArgs, rc: &RunConfig) -> Result<Outcome, CliError> {
    let alpha = rc.alpha()?.index;
    let size = if a.quick {
        validate::SuiteSize::quick()
    } else {
        validate::SuiteSize::full()
    };
    let checks = validate::run_suite(alpha, size, rc.seed)?;
    rc.emit(&validate::report(&checks))?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    Ok(if failed == 0 {
        Outcome::Pass
    } else {
        Outcome::ValidationFailed(failed)
    })
}
