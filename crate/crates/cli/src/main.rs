//! `climvar`: batch front end for climvar-core.
//!
//! Exit status is 0 on success, 1 when inputs or configuration are invalid
//! and 2 when a computation fails.

mod commands;
mod config;
mod output;
mod sources;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use climvar_core::grid::PayloadFormat;

use crate::commands::{By, SccOptions};
use crate::config::{parse_years, Invalid, Overrides, RunConfig};
use crate::sources::MomentArgs;

#[derive(Parser)]
#[command(name = "climvar", version, about = "Climate damages with spatial and temporal warming variability")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a monthly scaling pattern of a gridded field on the global annual mean
    Pattern {
        /// Subtract the calendar-month mean of this base period first, e.g. 1850-1880
        #[arg(long, value_parser = parse_years)]
        base: Option<(i32, i32)>,
        /// Payload encoding of the pattern: csv or f32le
        #[arg(long, default_value = "csv", value_parser = commands::payload_format)]
        format: PayloadFormat,
    },
    /// Centered rolling-mean climatology of a field or series
    Climatology {
        #[arg(long, default_value_t = commands::DEFAULT_CLIMATOLOGY_WINDOW)]
        window: usize,
    },
    /// Warming moments per year and variant
    Moments {
        #[command(flatten)]
        args: MomentArgs,
    },
    /// Annual damages (fraction of GDP) from moments
    Damages {
        #[command(flatten)]
        args: MomentArgs,
    },
    /// Seasonal and monthly sector coefficients, and monthly sector losses when inputs are given
    Sectors {
        #[command(flatten)]
        args: MomentArgs,
    },
    /// Refit regional damage parameters, and regional losses when moments are given
    Regions {
        #[command(flatten)]
        args: MomentArgs,
    },
    /// Present value of damages at each discount rate
    Pv {
        #[command(flatten)]
        args: MomentArgs,
        /// Accumulation window
        #[arg(long, default_value = "2020-2100", value_parser = parse_years)]
        horizon: (i32, i32),
        /// Moments of a policy scenario; adds avoided losses to the summary
        #[arg(long)]
        policy_moments: Option<PathBuf>,
    },
    /// Social cost of carbon (US$ per tonne of CO2)
    Scc {
        /// Accounting horizon
        #[arg(long, default_value = "2020-2100", value_parser = parse_years)]
        horizon: (i32, i32),
        /// Split the SCC by sector or region
        #[arg(long, value_enum)]
        by: Option<By>,
        /// US$ per unit of GDP input
        #[arg(long, default_value_t = climvar_core::scc::GDP_UNIT_BILLION)]
        gdp_unit: f64,
    },
    /// Split the S&Tvar minus None gap into spatial, temporal and interaction shares
    Decompose {
        /// CSV with columns label,none,tvar,svar,stvar
        #[arg(long)]
        input: Option<PathBuf>,
        /// none,tvar,svar,stvar values
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<f64>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::build(&cli.overrides)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let has_sources = cfg.inputs.grid.is_some() || cfg.inputs.global.is_some();
    let w = match &cli.command {
        Command::Pattern { base, format } => commands::pattern(&cfg, *base, *format)?,
        Command::Climatology { window } => commands::climatology(&cfg, *window)?,
        Command::Moments { args } => commands::moments(&cfg, args)?,
        Command::Damages { args } => commands::damages(&cfg, args)?,
        Command::Sectors { args } => commands::sectors(&cfg, args, has_sources)?,
        Command::Regions { args } => commands::regions(&cfg, args, has_sources || cfg.inputs.moments.is_some())?,
        Command::Pv { args, horizon, policy_moments } => commands::pv(&cfg, args, *horizon, policy_moments.as_ref())?,
        Command::Scc { horizon, by, gdp_unit } => {
            commands::scc_cmd(&cfg, &SccOptions { horizon: *horizon, by: *by, gdp_unit: *gdp_unit })?
        }
        Command::Decompose { input, values } => commands::decompose_cmd(&cfg, input.as_ref(), values)?,
    };
    for path in w.written() {
        println!("{}", path.display());
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<Invalid>().is_some() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<climvar_core::Error>() {
            return if e.is_validation() { 1 } else { 2 };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
