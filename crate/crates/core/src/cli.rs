//! The `snb` command line.
//!
//! Exit statuses: 0 success, 2 usage error, 3 domain error, 4 accuracy or
//! oracle failure, 1 I/O failure.

use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use crate::bayes::BetaPrior;
use crate::commands;
use crate::dist::SnbParams;
use crate::error::SnbError;
use crate::sampler::Endpoint;
use crate::service::{self, TrialStore};
use crate::table::{Format, OutputTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_ACCURACY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "snb", version, about = "Stopped negative binomial toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct OutputArgs {
    /// Output encoding.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    pub format: String,
    /// Write to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, clap::Args)]
pub struct DesignArgs {
    /// Success endpoint (responders).
    #[arg(long)]
    pub s: u64,
    /// Futility endpoint (non-responders).
    #[arg(long)]
    pub t: u64,
}

/// A parsed `start:end:step` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_grid_arg(spec: &str) -> Result<Grid, String> {
    commands::parse_grid(spec).map(Grid).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distribution table: k, pmf, success/failure mass, cdf.
    Pmf {
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mean and variance over a grid of p.
    Moments {
        #[command(flatten)]
        design: DesignArgs,
        /// Grid as start:end:step.
        #[arg(long = "p-grid", default_value = "0:1:0.01", value_parser = parse_grid_arg)]
        p_grid: Grid,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search (s, t) designs with type-I mass at most --alpha-level under p0.
    Design {
        #[arg(long)]
        p0: f64,
        #[arg(long = "alpha-level")]
        alpha_level: f64,
        #[arg(long = "max-n")]
        max_n: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Posterior of p after a trial stopped at enrollment k.
    Posterior {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        k: u64,
        /// Boundary reached, if known: success or failure.
        #[arg(long)]
        endpoint: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Predictive law of the enrollment under a beta prior.
    Predictive {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate trial trajectories.
    Simulate {
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the closed-form pmf with exhaustive path enumeration.
    OracleCheck {
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the trial-monitoring HTTP service.
    Serve {
        #[arg(long, env = "SNB_PORT", default_value_t = service::DEFAULT_PORT)]
        port: u16,
        /// Directory holding the per-trial event logs.
        #[arg(long = "data-dir", default_value = "snb-data")]
        data_dir: PathBuf,
    },
}

fn exit_code(e: &SnbError) -> i32 {
    match e {
        SnbError::Accuracy { .. } => EXIT_ACCURACY,
        _ => EXIT_DOMAIN,
    }
}

fn emit(table: &OutputTable, output: &OutputArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let format: Format = output.format.parse().unwrap_or_default();
    let text = table.encode(format);
    let result = match &output.out {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "snb: cannot write output: {e}");
            EXIT_IO
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "snb: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, SnbError> {
    let code = match command {
        Command::Pmf { p, design, output } => {
            let params = SnbParams::new(p, design.s, design.t)?;
            emit(&commands::pmf_table(&params), &output, stdout, stderr)
        }
        Command::Moments { design, p_grid, output } => {
            emit(&commands::moments_table(design.s, design.t, &p_grid.0)?, &output, stdout, stderr)
        }
        Command::Design { p0, alpha_level, max_n, output } => {
            emit(&commands::design_table(p0, alpha_level, max_n)?, &output, stdout, stderr)
        }
        Command::Posterior { alpha, beta, design, k, endpoint, output } => {
            let prior = BetaPrior::new(alpha, beta)?;
            let endpoint = endpoint.as_deref().map(str::parse::<Endpoint>).transpose()?;
            let table = commands::posterior_table(&prior, design.s, design.t, k, endpoint)?;
            emit(&table, &output, stdout, stderr)
        }
        Command::Predictive { alpha, beta, design, output } => {
            let prior = BetaPrior::new(alpha, beta)?;
            emit(&commands::predictive_table(&prior, design.s, design.t)?, &output, stdout, stderr)
        }
        Command::Simulate { p, design, n, seed, output } => {
            let params = SnbParams::new(p, design.s, design.t)?;
            emit(&commands::simulate_table(&params, n, seed)?, &output, stdout, stderr)
        }
        Command::OracleCheck { p, design, output } => {
            let params = SnbParams::new(p, design.s, design.t)?;
            let (table, worst) = commands::oracle_check_table(&params)?;
            let code = emit(&table, &output, stdout, stderr);
            if code != EXIT_OK {
                code
            } else if worst > commands::ORACLE_TOLERANCE {
                let _ = writeln!(
                    stderr,
                    "snb: oracle check failed: max deviation {worst:e} exceeds {:e}",
                    commands::ORACLE_TOLERANCE
                );
                EXIT_ACCURACY
            } else {
                EXIT_OK
            }
        }
        Command::Serve { port, data_dir } => {
            let store = match TrialStore::open(&data_dir) {
                Ok(store) => Arc::new(store),
                Err(e) => {
                    let _ = writeln!(stderr, "snb: {e}");
                    return Ok(EXIT_IO);
                }
            };
            let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
            let runtime = tokio::runtime::Runtime::new().map_err(|e| SnbError::domain(e.to_string()))?;
            match runtime.block_on(service::serve(addr, store)) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(stderr, "snb: server error: {e}");
                    EXIT_IO
                }
            }
        }
    };
    Ok(code)
}
