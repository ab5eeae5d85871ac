//! `efimov`: spectra, rotation trajectories, wavefunctions and the
//! verification suite as CSV or JSON tables.

mod commands;
mod table;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use efimov_core::efimov::{critical_eta, solve_channel_exponent};
use efimov_core::{ChannelExponent, Error as CoreError};
use thiserror::Error;

use table::{write_csv, write_json, Format, Manifest};

#[derive(Parser, Debug)]
#[command(
    name = "efimov",
    version,
    about = "Efimov trimers with three-body losses"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Significant digits of every printed number.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u8).range(6..=17), global = true)]
    precision: u8,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Three-body parameter in natural length units.
    #[arg(long, default_value_t = 1.0, global = true)]
    rt: f64,
    /// Inelasticity parameter eta*.
    #[arg(
        long,
        default_value_t = 0.0,
        global = true,
        allow_negative_numbers = true
    )]
    eta: f64,
    #[arg(long, value_enum, default_value_t = Units::Natural, global = true)]
    units: Units,
    /// Three-body parameter in nm for physical units (default 30).
    #[arg(long, global = true)]
    rt_nm: Option<f64>,
    /// Atomic mass in amu for physical units (default 133).
    #[arg(long, global = true)]
    mass_amu: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Units {
    Natural,
    Physical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Complex energies, decay rates and sizes of states n_min..=n_max.
    Spectrum {
        #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
        n_min: i64,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        n_max: i64,
    },
    /// Trajectory of one state as eta* runs over [0, eta*c).
    Rotate {
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, default_value_t = 64)]
        eta_steps: usize,
    },
    /// Hyperradial wavefunction K_s(kappa R) on a log-spaced grid from 1e-3 to r_max.
    Wavefunction {
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, default_value_t = 20.0)]
        r_max: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Run the cross-check suite.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Full)]
        level: LevelArg,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("{0}")]
    Domain(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parameter(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Solver(_) | CliError::Io(_) => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::AboveCritical { .. } => CliError::Domain(e.to_string()),
            CoreError::Domain(_) | CoreError::Precondition(_) => CliError::Parameter(e.to_string()),
            CoreError::State { ref source, .. }
                if matches!(**source, CoreError::AboveCritical { .. }) =>
            {
                CliError::Domain(e.to_string())
            }
            other => CliError::Solver(other.to_string()),
        }
    }
}

fn parameter(msg: impl Into<String>) -> CliError {
    CliError::Parameter(msg.into())
}

/// Checked common settings shared by the commands.
pub struct Context {
    pub s: ChannelExponent,
    pub rt: f64,
    pub eta: f64,
    pub units: Option<efimov_core::UnitSystem>,
    pub parameters: BTreeMap<String, String>,
}

impl Context {
    fn new(common: &Common) -> Result<Self, CliError> {
        if !(common.rt > 0.0 && common.rt.is_finite()) {
            return Err(parameter(format!(
                "--rt must be positive, got {}",
                common.rt
            )));
        }
        if !(common.eta >= 0.0 && common.eta.is_finite()) {
            return Err(parameter(format!(
                "--eta must be non-negative, got {}",
                common.eta
            )));
        }
        let s = solve_channel_exponent(1e-13)?;
        let mut parameters = BTreeMap::new();
        parameters.insert("eta".to_string(), common.eta.to_string());
        parameters.insert("rt".to_string(), common.rt.to_string());
        parameters.insert("precision".to_string(), common.precision.to_string());
        let units = match common.units {
            Units::Natural => {
                if common.rt_nm.is_some() || common.mass_amu.is_some() {
                    return Err(parameter("--rt-nm and --mass-amu require --units physical"));
                }
                parameters.insert("units".to_string(), "natural".to_string());
                None
            }
            Units::Physical => {
                let rt_nm = common.rt_nm.unwrap_or(30.0);
                let mass_amu = common.mass_amu.unwrap_or(133.0);
                if !(rt_nm > 0.0 && rt_nm.is_finite() && mass_amu > 0.0 && mass_amu.is_finite()) {
                    return Err(parameter("--rt-nm and --mass-amu must be positive"));
                }
                parameters.insert("units".to_string(), "physical".to_string());
                parameters.insert("rt_nm".to_string(), rt_nm.to_string());
                parameters.insert("mass_amu".to_string(), mass_amu.to_string());
                // one natural length unit is R_t / rt
                Some(efimov_core::UnitSystem::new(
                    rt_nm * 1e-9 / common.rt,
                    mass_amu * efimov_core::efimov::ATOMIC_MASS_UNIT,
                )?)
            }
        };
        Ok(Self {
            s,
            rt: common.rt,
            eta: common.eta,
            units,
            parameters,
        })
    }

    /// Rejects `eta* >= eta*c` with the domain exit status.
    fn require_subcritical(&self) -> Result<(), CliError> {
        let critical = critical_eta(&self.s);
        if self.eta >= critical {
            return Err(CoreError::AboveCritical {
                eta: self.eta,
                critical,
            }
            .into());
        }
        Ok(())
    }
}

fn timestamp() -> Result<String, CliError> {
    use chrono::{DateTime, SecondsFormat, Utc};
    let moment = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(raw) => {
            let secs: i64 = raw
                .trim()
                .parse()
                .map_err(|_| parameter(format!("SOURCE_DATE_EPOCH is not an integer: {raw:?}")))?;
            DateTime::<Utc>::from_timestamp(secs, 0)
                .ok_or_else(|| parameter(format!("SOURCE_DATE_EPOCH out of range: {secs}")))?
        }
        Err(_) => Utc::now(),
    };
    Ok(moment.to_rfc3339_opts(SecondsFormat::Secs, true))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut ctx = Context::new(&cli.common)?;
    let (name, table, verdict) = match cli.command {
        Command::Spectrum { n_min, n_max } => {
            ctx.require_subcritical()?;
            ctx.parameters.insert("n_min".into(), n_min.to_string());
            ctx.parameters.insert("n_max".into(), n_max.to_string());
            ("spectrum", commands::spectrum(&ctx, n_min, n_max)?, None)
        }
        Command::Rotate { n, eta_steps } => {
            ctx.parameters.remove("eta");
            ctx.parameters.insert("n".into(), n.to_string());
            ctx.parameters
                .insert("eta_steps".into(), eta_steps.to_string());
            ("rotate", commands::rotate(&ctx, n, eta_steps)?, None)
        }
        Command::Wavefunction { n, r_max, points } => {
            ctx.require_subcritical()?;
            ctx.parameters.insert("n".into(), n.to_string());
            ctx.parameters.insert("r_max".into(), r_max.to_string());
            ctx.parameters.insert("points".into(), points.to_string());
            (
                "wavefunction",
                commands::wavefunction(&ctx, n, r_max, points)?,
                None,
            )
        }
        Command::Verify { level } => {
            let level = match level {
                LevelArg::Fast => efimov_core::verify::Level::Fast,
                LevelArg::Full => efimov_core::verify::Level::Full,
            };
            ctx.parameters.insert(
                "level".into(),
                if level == efimov_core::verify::Level::Fast {
                    "fast"
                } else {
                    "full"
                }
                .into(),
            );
            let (table, failure) = commands::verify(level)?;
            ("verify", table, failure)
        }
    };

    let manifest = Manifest {
        command: name.to_string(),
        parameters: ctx.parameters,
        channel_exponent: ctx.s.magnitude(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: timestamp()?,
    };

    let mut sink: Box<dyn Write> = match &cli.common.out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).map_err(|e| {
                parameter(format!("cannot create {}: {e}", path.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let digits = usize::from(cli.common.precision);
    match cli.common.format {
        Format::Csv => write_csv(&mut sink, &manifest, &table, digits)?,
        Format::Json => write_json(&mut sink, &manifest, &table, digits)?,
    }
    sink.flush()?;

    match verdict {
        Some(failure) => Err(CliError::Verification(failure)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("efimov: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
