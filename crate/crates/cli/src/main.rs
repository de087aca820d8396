//! `radthrust`: propagation, classification and period analysis of orbits
//! under a constant radial acceleration.

mod commands;
mod output;
mod units;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use output::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] radthrust::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{what} disagree: {a} vs {b}")]
    CrossCheck { what: &'static str, a: f64, b: f64 },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_internal() => 3,
            CliError::CrossCheck { .. } => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        use radthrust::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::InvalidInput(_) => "invalid_input",
                E::DegenerateLattice { .. } => "degenerate_lattice",
                E::ZeroAcceleration => "zero_acceleration",
                E::Infeasible { .. } => "infeasible",
                E::PoleProximity { .. } => "pole_proximity",
                E::ParameterDomain(_) => "parameter_domain",
                E::NoSolution { .. } => "no_solution",
                E::NoPericenter => "no_pericenter",
                E::OutOfInterval { .. } => "out_of_interval",
                E::PseudoTimeDomain { .. } => "pseudo_time_domain",
                E::Unbounded => "unbounded",
                E::NonMonotoneArc { .. } => "non_monotone_arc",
                E::NoConvergence { .. } => "no_convergence",
                E::InvalidBracket { .. } => "invalid_bracket",
            },
            CliError::Input(_) => "invalid_input",
            CliError::Io { .. } => "io",
            CliError::CrossCheck { .. } => "cross_check",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "radthrust", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; reports default to json, sample tables to csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Gravitational parameter in user units.
    #[arg(long, global = true, default_value_t = 1.0)]
    mu: f64,
    /// Length unit; together with `mu` it fixes the time unit `sqrt(L^3/mu)`.
    #[arg(long, global = true, default_value_t = 1.0)]
    length_unit: f64,
}

/// Initial state in user units.
#[derive(Debug, Clone, Args)]
pub struct Scenario {
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    /// Flight-path angle above the local horizontal, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub gamma0_deg: f64,
    /// Radial acceleration, positive outward.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the trajectory at uniform physical or pseudo-time spacing.
    #[command(allow_negative_numbers = true)]
    Propagate {
        #[command(flatten)]
        scenario: Scenario,
        /// Physical-time span.
        #[arg(long, conflicts_with_all = ["tau_span", "periods"])]
        t_span: Option<f64>,
        /// Pseudo-time span.
        #[arg(long, conflicts_with = "periods")]
        tau_span: Option<f64>,
        /// Physical-time span in radial periods (bounded motion only).
        #[arg(long)]
        periods: Option<f64>,
        /// Number of rows; a single row is taken at the end of the span.
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Epoch added to the `t` column.
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
    },
    /// Bounded, unbounded or marginal, with the roots behind the verdict.
    #[command(allow_negative_numbers = true)]
    Classify {
        #[command(flatten)]
        scenario: Scenario,
    },
    /// Radial periods in pseudo-time and physical time.
    #[command(allow_negative_numbers = true)]
    Period {
        #[command(flatten)]
        scenario: Scenario,
        /// Emit `N` samples of the radial Kepler curve t(tau) over one period.
        #[arg(long, value_name = "N", conflicts_with = "sweep")]
        kepler_curve: Option<usize>,
        /// Emit the pseudo-period against alpha for a family of apsis speeds at `--r0`.
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = -0.1)]
        sweep_alpha_lo: f64,
        #[arg(long, default_value_t = 0.1)]
        sweep_alpha_hi: f64,
        #[arg(long, default_value_t = 41)]
        sweep_points: usize,
        #[arg(long, default_value_t = 0.5)]
        sweep_v_lo: f64,
        #[arg(long, default_value_t = 1.5)]
        sweep_v_hi: f64,
        #[arg(long, default_value_t = 11)]
        sweep_curves: usize,
    },
    /// Apsis speed whose orbit closes after `n` radial periods and `m` extra turns (mod 1).
    #[command(allow_negative_numbers = true)]
    FindPeriodic {
        #[arg(long)]
        rm: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        v_lo: f64,
        #[arg(long)]
        v_hi: f64,
    },
    /// Bisection for the acceleration at which a fixed start stops being bounded.
    #[command(allow_negative_numbers = true)]
    EscapeAlpha {
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        v0: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma0_deg: f64,
        #[arg(long)]
        alpha_lo: f64,
        #[arg(long)]
        alpha_hi: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let units = units::Units::new(cli.mu, cli.length_unit)?;
    let text = match cli.command {
        Command::Propagate {
            scenario,
            t_span,
            tau_span,
            periods,
            samples,
            t0,
        } => {
            let span = match (t_span, tau_span, periods) {
                (Some(t), None, None) => commands::Span::Time(t),
                (None, Some(tau), None) => commands::Span::PseudoTime(tau),
                (None, None, Some(k)) => commands::Span::Periods(k),
                _ => {
                    return Err(CliError::Input(
                        "exactly one of --t-span, --tau-span, --periods is required".into(),
                    ))
                }
            };
            let format = cli.format.unwrap_or(Format::Csv);
            let table = commands::propagate(&scenario, &units, span, samples, t0)?;
            table.render(format)
        }
        Command::Classify { scenario } => {
            let format = cli.format.unwrap_or(Format::Json);
            let report = commands::classify(&scenario, &units)?;
            output::render_report(&report, format)
        }
        Command::Period {
            scenario,
            kepler_curve,
            sweep,
            sweep_alpha_lo,
            sweep_alpha_hi,
            sweep_points,
            sweep_v_lo,
            sweep_v_hi,
            sweep_curves,
        } => {
            if sweep {
                let format = cli.format.unwrap_or(Format::Csv);
                let grid = commands::SweepGrid {
                    alpha: (sweep_alpha_lo, sweep_alpha_hi, sweep_points),
                    speed: (sweep_v_lo, sweep_v_hi, sweep_curves),
                };
                let table = commands::period_sweep(&scenario, &units, grid)?;
                table.render(format)
            } else if let Some(n) = kepler_curve {
                let format = cli.format.unwrap_or(Format::Csv);
                let table = commands::kepler_curve(&scenario, &units, n)?;
                table.render(format)
            } else {
                let format = cli.format.unwrap_or(Format::Json);
                let report = commands::period(&scenario, &units)?;
                output::render_report(&report, format)
            }
        }
        Command::FindPeriodic {
            rm,
            alpha,
            m,
            n,
            v_lo,
            v_hi,
        } => {
            let format = cli.format.unwrap_or(Format::Json);
            let report = commands::find_periodic(&units, rm, alpha, (m, n), (v_lo, v_hi))?;
            output::render_report(&report, format)
        }
        Command::EscapeAlpha {
            r0,
            v0,
            gamma0_deg,
            alpha_lo,
            alpha_hi,
            tol,
        } => {
            let format = cli.format.unwrap_or(Format::Json);
            let report = commands::escape_alpha(&units, (r0, v0, gamma0_deg), (alpha_lo, alpha_hi), tol)?;
            output::render_report(&report, format)
        }
    };
    match cli.out {
        Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io { path, source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            let record = json!({
                "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": code }
            });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}
