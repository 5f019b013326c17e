//! `qmemcell` command-line front end.

mod commands;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qmemcell::scenario::ScenarioDocument;
use qmemcell::ConfigError;

use commands::PumpArgs;
use report::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "qmemcell", version, about = "Single-cell atomic quantum memory simulator")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Scenario JSON file; missing keys take the cesium defaults
    #[arg(long, global = true, env = "QMEMCELL_CONFIG")]
    config: Option<PathBuf>,
    /// Seed for sampled measurement records
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format (defaults to csv for grids, table otherwise)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

/// Scenario fields that may be overridden on the command line.
#[derive(Debug, Args, Default)]
struct Overrides {
    #[arg(long)]
    omega_b_hz: Option<f64>,
    #[arg(long)]
    stark_detuning_hz: Option<f64>,
    #[arg(long)]
    microwave_detuning_hz: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Level-shift ladders: quadratic Zeeman, compensating Stark and ac Zeeman
    Shifts(Overrides),
    /// Compensation intensities and residual ladder spreads
    Compensate(Overrides),
    /// π-pulse designs for the quadrature rotation
    PulseDesign {
        #[command(flatten)]
        overrides: Overrides,
        /// Pulse duration in seconds; defaults to the scenario's rotation_tau_s
        #[arg(long)]
        tau_s: Option<f64>,
    },
    /// Per-pulse decoherence budget
    Decoherence,
    /// Optical-pumping populations over time
    Pump {
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
        #[arg(long, default_value_t = 20_000)]
        steps: usize,
        #[arg(long, default_value_t = 1_000)]
        record_every: usize,
        #[arg(long, default_value_t = 1.0)]
        pump_rate: f64,
        #[arg(long, default_value_t = 1.0)]
        repump_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        leak_rate: f64,
    },
    /// Write then read a vacuum memory with the scenario's couplings and noise
    MemorySim,
    /// Recompute the published numbers and compare; exits 1 on any failure
    PaperCheck,
    /// Evaluate a grid of scenarios, varying one document key
    Sweep {
        /// Scenario document key, e.g. omega_b_hz
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
    },
}

fn base_document(path: Option<&PathBuf>) -> Result<ScenarioDocument> {
    let Some(path) = path else {
        return Ok(ScenarioDocument::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text).map_err(ConfigError::Parse)?)
}

impl Overrides {
    fn apply(&self, mut doc: ScenarioDocument) -> ScenarioDocument {
        doc.omega_b_hz = self.omega_b_hz.or(doc.omega_b_hz);
        doc.stark_detuning_hz = self.stark_detuning_hz.or(doc.stark_detuning_hz);
        doc.microwave_detuning_hz = self.microwave_detuning_hz.or(doc.microwave_detuning_hz);
        doc
    }
}

fn run(cli: &Cli) -> Result<(Report, Format)> {
    let doc = base_document(cli.global.config.as_ref())?;
    let scenario = |o: &Overrides| o.apply(doc.clone()).validate();
    let none = Overrides::default();
    let (report, default_format) = match &cli.command {
        Command::Shifts(o) => (commands::shifts(&scenario(o)?)?, Format::Csv),
        Command::Compensate(o) => (commands::compensate(&scenario(o)?)?, Format::Table),
        Command::PulseDesign { overrides, tau_s } => {
            let cfg = scenario(overrides)?;
            let tau = tau_s.unwrap_or(cfg.rotation_pulse_duration);
            (commands::pulse_design(&cfg, tau)?, Format::Table)
        }
        Command::Decoherence => (commands::decoherence(&scenario(&none)?)?, Format::Table),
        Command::Pump {
            dt,
            steps,
            record_every,
            pump_rate,
            repump_rate,
            leak_rate,
        } => {
            let args = PumpArgs {
                dt: *dt,
                steps: *steps,
                record_every: *record_every,
                pump_rate: *pump_rate,
                repump_rate: *repump_rate,
                leak_rate: *leak_rate,
            };
            (commands::pump(&scenario(&none)?, &args)?, Format::Csv)
        }
        Command::MemorySim => (commands::memory_sim(&scenario(&none)?, cli.global.seed)?, Format::Table),
        Command::PaperCheck => (commands::paper_check(&scenario(&none)?)?, Format::Table),
        Command::Sweep { param, values } => (commands::sweep(&doc, param, values)?, Format::Csv),
    };
    Ok((report, cli.global.format.unwrap_or(default_format)))
}

fn emit(cli: &Cli, report: &Report, format: Format) -> Result<()> {
    match &cli.global.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            report.render(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            report.render(format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|(report, format)| {
        emit(&cli, &report, format)?;
        Ok(report.all_pass())
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
