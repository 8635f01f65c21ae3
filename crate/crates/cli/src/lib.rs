//! Command-line front end: argument parsing, config loading and output
//! files for every analysis in `buyback-core`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;

use crate::args::{Cli, Command, ExperimentCmd, Format};
use crate::error::{CliError, CliResult};
use crate::output::{OutDir, RunManifest};

pub use crate::error::exit;

/// Strips `--out DIR` / `--out=DIR` so the manifest replays anywhere.
fn replay_args(raw: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in raw {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a.clone());
        }
    }
    out
}

/// Runs a parsed command. Returns the manifest and the stdout summary.
pub fn execute(cli: &Cli, raw_args: &[String]) -> CliResult<(RunManifest, String)> {
    let g = &cli.global;
    let mut out = OutDir::create(&g.out)?;
    let (name, outcome) = match &cli.command {
        Command::Simulate(a) => ("simulate", commands::simulate(g, a, &mut out)?),
        Command::Risk(a) => ("risk", commands::risk(g, a, &mut out)?),
        Command::Audit(a) => ("audit", commands::audit(g, a, &mut out)?),
        Command::Experiment(ExperimentCmd::Coin(a)) => ("experiment", commands::coin(g, a, &mut out)?),
        Command::Experiment(ExperimentCmd::Study(a)) => ("experiment", commands::study(g, a, &mut out)?),
        Command::Nav(a) => ("nav", commands::nav(g, a, &mut out)?),
        Command::Report => ("report", report::report(g, &mut out)?),
    };
    let manifest = out.finish(name, g.config.as_deref(), outcome.seed, replay_args(raw_args))?;
    let stdout = match g.format {
        Format::Text => outcome.text,
        Format::Json => serde_json::to_string_pretty(&outcome.json).unwrap_or_default() + "\n",
    };
    Ok((manifest, stdout))
}

/// Parses `args` (program name excluded) and runs them.
pub fn run_args<I, T>(args: I) -> CliResult<(RunManifest, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let raw: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let argv = std::iter::once("buyback-lab".to_string()).chain(raw.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(&cli, &raw)
}

/// Re-runs a manifest's invocation into `out`.
pub fn replay(manifest: &RunManifest, out: &Path) -> CliResult<(RunManifest, String)> {
    let mut args = manifest.args.clone();
    args.push("--out".into());
    args.push(out.display().to_string());
    run_args(args)
}
