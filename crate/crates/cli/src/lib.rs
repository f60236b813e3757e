//! Command-line front end: `roots`, `kernel`, `solve`, `limits` and
//! `oracle`. Data go to standard output or `--out`; diagnostics go to
//! standard error.
//!
//! Exit codes: 0 on success, 2 for invalid input (flags, configuration,
//! files, parameters), 3 when a numerical method fails to converge.

pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fzwave::charfun::{theta_of_rho, CharParams};
use fzwave::kernel::{
    delta_eps, kernel_eps, kernel_eps_spectral, kernel_time_fractional, spectral_kernel, Field,
};
use fzwave::laplace_oracle::{bromwich_invert, BromwichConfig};
use fzwave::rootfinder::find_zero_pair;
use fzwave::solver::solve_field;
use serde_json::json;
use thiserror::Error;

use config::{Format, RunConfig};
use output::Table;

/// Environment variable capping the worker threads (0 or unset: automatic).
pub const THREADS_ENV: &str = "FZWAVE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerics(#[from] fzwave::Error),
}

impl From<fzwave::ValidationError> for CliError {
    fn from(e: fzwave::ValidationError) -> Self {
        CliError::Numerics(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Numerics(e) if e.is_input_error() => 2,
            CliError::Numerics(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fzwave", version, about = "Kernels and solutions of the space-time fractional Zener wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Locate and certify the zero of the characteristic function.
    Roots(RootsArgs),
    /// Regularized solution kernel on a grid.
    Kernel(FieldArgs),
    /// Displacement field for the configured initial data.
    Solve(FieldArgs),
    /// General assembly side by side with a limiting kernel.
    Limits(LimitsArgs),
    /// Spectral kernel against numerical Laplace inversion.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct ModelFlags {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Debug, Args)]
struct GridFlags {
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    /// Single output time.
    #[arg(long, conflicts_with = "t_list")]
    t: Option<f64>,
    /// Comma-separated, strictly increasing output times.
    #[arg(long, value_delimiter = ',')]
    t_list: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct OutFlags {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct RootsArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// `theta` directly; otherwise derived from `--rho` and `--beta`.
    #[arg(long, conflicts_with = "rho")]
    theta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[command(flatten)]
    out: OutFlags,
}

#[derive(Debug, Args)]
struct FieldArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[command(flatten)]
    grid: GridFlags,
    #[command(flatten)]
    out: OutFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LimitCase {
    Beta0,
    Beta1,
    Alpha0,
    Classical,
}

#[derive(Debug, Args)]
struct LimitsArgs {
    #[arg(long, value_enum)]
    case: LimitCase,
    #[command(flatten)]
    field: FieldArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[command(flatten)]
    grid: GridFlags,
    #[command(flatten)]
    out: OutFlags,
}

/// Runs one command line (without the program name) and returns the exit
/// code. Errors are reported on standard error.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> i32 {
    let args = std::iter::once("fzwave").chain(argv.iter().map(|s| s.as_ref()));
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match with_thread_pool(|| dispatch(cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn with_thread_pool(run: impl FnOnce() -> Result<(), CliError> + Send) -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
        _ => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    pool.install(run)
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Roots(a) => roots(a),
        Command::Kernel(a) => {
            let cfg = merged(&a.model, Some(&a.grid), &a.out)?;
            let p = cfg.model.resolve()?;
            let field = kernel_eps(&cfg.grid.x_grid()?, &cfg.grid.t_list, &p, &cfg.quadrature)?;
            field_table(&field, &cfg).emit(&cfg.output)
        }
        Command::Solve(a) => {
            let cfg = merged(&a.model, Some(&a.grid), &a.out)?;
            let p = cfg.model.resolve()?;
            let field = solve_field(
                &cfg.initial.u0,
                &cfg.initial.v0,
                &cfg.grid.x_grid()?,
                &cfg.grid.t_list,
                &p,
                &cfg.quadrature,
            )?;
            field_table(&field, &cfg).emit(&cfg.output)
        }
        Command::Limits(a) => limits(a),
        Command::Oracle(a) => oracle(a),
    }
}

/// Configuration file (if any), then flags, then defaults.
fn merged(model: &ModelFlags, grid: Option<&GridFlags>, out: &OutFlags) -> Result<RunConfig, CliError> {
    let mut cfg = match &model.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let m = &mut cfg.model;
    m.alpha = model.alpha.or(m.alpha);
    m.beta = model.beta.or(m.beta);
    m.tau = model.tau.or(m.tau);
    m.epsilon = model.eps.or(m.epsilon);
    if let Some(g) = grid {
        let c = &mut cfg.grid;
        c.x_min = g.x_min.unwrap_or(c.x_min);
        c.x_max = g.x_max.unwrap_or(c.x_max);
        c.nx = g.nx.unwrap_or(c.nx);
        if let Some(t) = g.t {
            c.t_list = vec![t];
        }
        if let Some(ts) = &g.t_list {
            c.t_list = ts.clone();
        }
        c.validate()?;
    }
    if let Some(path) = &out.out {
        cfg.output.path = Some(path.clone());
    }
    if let Some(format) = out.format {
        cfg.output.format = format;
    }
    Ok(cfg)
}

fn field_table(field: &Field, cfg: &RunConfig) -> Table {
    let mut table = Table::new(json!({ "field": field.meta, "grid": cfg.grid, "initial": cfg.initial }), &["x", "t", "u"]);
    for (i, &t) in field.t_list.iter().enumerate() {
        for (&x, &u) in field.x_grid.iter().zip(field.row(i)) {
            table.rows.push(vec![x, t, u]);
        }
    }
    table
}

fn roots(a: RootsArgs) -> Result<(), CliError> {
    let cfg = merged(&a.model, None, &a.out)?;
    let alpha = cfg.model.alpha.ok_or_else(|| CliError::Usage("missing --alpha".into()))?;
    let tau = cfg.model.tau.ok_or_else(|| CliError::Usage("missing --tau".into()))?;
    let theta = match (a.theta, a.rho) {
        (Some(theta), _) => theta,
        (None, Some(rho)) => {
            let beta = cfg.model.beta.ok_or_else(|| CliError::Usage("--rho needs --beta".into()))?;
            if !(rho >= 0.0 && rho.is_finite()) {
                return Err(CliError::Usage(format!("rho must be finite and >= 0, got {rho}")));
            }
            theta_of_rho(rho, beta)
        }
        (None, None) => return Err(CliError::Usage("give --theta or --rho".into())),
    };
    let z = find_zero_pair(&CharParams::new(alpha, tau, theta)?)?;
    let text = match cfg.output.format {
        Format::Csv => {
            let re = if z.s_z.re == 0.0 {
                "0".to_string()
            } else {
                format!("{:.6}", z.s_z.re)
            };
            format!(
                "s_z = {re} + {:.6}i\nresidual = {:.3e}\nwinding_checked = {}\n",
                z.s_z.im, z.residual, z.winding_checked
            )
        }
        Format::Json => {
            let value = json!({ "alpha": alpha, "tau": tau, "theta": theta, "zero": z });
            format!("{}\n", serde_json::to_string_pretty(&value).expect("plain data serializes"))
        }
    };
    match &cfg.output.path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn limits(a: LimitsArgs) -> Result<(), CliError> {
    let mut cfg = merged(&a.field.model, Some(&a.field.grid), &a.field.out)?;
    // the limiting parameter defaults to a value close to the limit;
    // the others default to the reference set alpha = 0.25, tau = 0.1
    let m = &mut cfg.model;
    match a.case {
        LimitCase::Beta0 => m.beta = m.beta.or(Some(1e-3)),
        LimitCase::Beta1 => m.beta = m.beta.or(Some(0.99)),
        LimitCase::Alpha0 => m.alpha = m.alpha.or(Some(1e-3)),
        LimitCase::Classical => {
            m.alpha = m.alpha.or(Some(0.0));
            m.beta = m.beta.or(Some(1.0));
        }
    }
    m.alpha = m.alpha.or(Some(0.25));
    m.beta = m.beta.or(Some(0.45));
    m.tau = m.tau.or(Some(0.1));
    let p = cfg.model.resolve()?;
    let x = cfg.grid.x_grid()?;
    let ts = &cfg.grid.t_list;
    let general = kernel_eps_spectral(&x, ts, &p, &cfg.quadrature)?;
    let limit: Vec<Vec<f64>> = match a.case {
        LimitCase::Beta0 => ts.iter().map(|_| x.iter().map(|&xi| delta_eps(xi, p.epsilon)).collect()).collect(),
        LimitCase::Beta1 => kernel_time_fractional(&x, ts, p.alpha, p.tau, p.epsilon, &cfg.quadrature)?.values,
        LimitCase::Alpha0 => {
            let q = fzwave::ModelParams { alpha: 0.0, ..p };
            kernel_eps(&x, ts, &q, &cfg.quadrature)?.values
        }
        LimitCase::Classical => fzwave::kernel::kernel_classical(&x, ts, p.tau, p.epsilon).values,
    };
    let case = a.case.to_possible_value().map(|v| v.get_name().to_string());
    let mut table = Table::new(
        json!({ "case": case, "general": general.meta, "grid": cfg.grid }),
        &["x", "t", "u_general", "u_limit", "abs_diff"],
    );
    for (i, &t) in ts.iter().enumerate() {
        for (j, &xi) in x.iter().enumerate() {
            let (g, l) = (general.values[i][j], limit[i][j]);
            table.rows.push(vec![xi, t, g, l, (g - l).abs()]);
        }
    }
    table.emit(&cfg.output)
}

fn oracle(a: OracleArgs) -> Result<(), CliError> {
    let cfg = merged(&a.model, Some(&a.grid), &a.out)?;
    let p = cfg.model.resolve()?;
    let q = cfg.quadrature;
    let c = BromwichConfig {
        s0: q.bromwich_s0,
        p_max: q.bromwich_p_max,
        ..BromwichConfig::default()
    };
    let mut table = Table::new(
        json!({ "model": p, "quadrature": q, "bromwich": c }),
        &["rho", "t", "s_spectral", "s_bromwich", "abs_diff"],
    );
    for &t in &cfg.grid.t_list {
        let s = spectral_kernel(a.rho, t, &p, &q)?.total;
        let b = bromwich_invert(a.rho, t, &p, &c)?;
        table.rows.push(vec![a.rho, t, s, b, (s - b).abs()]);
    }
    table.emit(&cfg.output)
}
