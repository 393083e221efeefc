//! `yb-lab`: verification suites and trajectory simulations for the
//! Yang-Baxter maps in `yb_core`.
//!
//! Exit codes: 0 pass, 1 mathematical failure, 2 configuration error.

pub mod config;
pub mod output;
pub mod simulate;
pub mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{ConfigArgs, ConfigError, Mode, RunConfig};
use output::{suite_report, to_canonical_json, write_report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "yb-lab",
    version,
    about = "Verify and simulate Yang-Baxter maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one verification suite and print its JSON report
    Verify(CommandArgs),
    /// Iterate a transfer map and record states and invariants
    SimulateTransfer(CommandArgs),
    /// Integrate the periodic dressing chain and record conserved quantities
    SimulateChain(CommandArgs),
}

#[derive(clap::Args, Debug)]
pub struct CommandArgs {
    /// JSON file with any of the flag settings; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub args: ConfigArgs,
}

impl CommandArgs {
    fn merged(self) -> Result<ConfigArgs, ConfigError> {
        match &self.config {
            Some(p) => Ok(self.args.over(ConfigArgs::from_json_file(p)?)),
            None => Ok(self.args),
        }
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Runs a parsed command, writing the report to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            EXIT_CONFIG
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, ConfigError> {
    let start = Instant::now();
    let io = |e: std::io::Error| ConfigError(format!("cannot write output: {e}"));
    match cli.command {
        Command::Verify(a) => {
            let args = a.merged()?;
            let suite = args
                .suite
                .ok_or_else(|| ConfigError("verify needs --suite".into()))?;
            let cfg = RunConfig::resolve(args, suites::default_mode(suite))?;
            let report = suites::run_suite(&cfg, suite)?;
            for note in &report.notes {
                let _ = writeln!(err, "note: {note}");
            }
            let _ = writeln!(err, "{}", report.summary());
            let json = suite_report(suite.name(), &cfg, &report, elapsed_ms(start));
            if let Some(p) = &cfg.output {
                write_report(&json, p).map_err(io)?;
            }
            out.write_all(to_canonical_json(&json).as_bytes())
                .map_err(io)?;
            Ok(if output::is_pass(&json) {
                EXIT_PASS
            } else {
                EXIT_FAIL
            })
        }
        Command::SimulateTransfer(a) => {
            let cfg = RunConfig::resolve(a.merged()?, Mode::Exact)?;
            finish_sim(simulate::simulate_transfer(&cfg)?, &cfg, start, out)
        }
        Command::SimulateChain(a) => {
            let cfg = RunConfig::resolve(a.merged()?, Mode::Float)?;
            finish_sim(simulate::simulate_chain(&cfg)?, &cfg, start, out)
        }
    }
}

fn finish_sim(
    mut sim: simulate::SimOutput,
    cfg: &RunConfig,
    start: Instant,
    out: &mut dyn Write,
) -> Result<i32, ConfigError> {
    let io = |e: std::io::Error| ConfigError(format!("cannot write output: {e}"));
    if let Some(p) = &cfg.output {
        sim.table.write_csv(p).map_err(io)?;
    }
    sim.report["wall_ms"] = serde_json::json!(elapsed_ms(start));
    out.write_all(to_canonical_json(&sim.report).as_bytes())
        .map_err(io)?;
    Ok(if sim.pass { EXIT_PASS } else { EXIT_FAIL })
}
