//! Config files. A simulation file holds `[scenario]`, `[strategy]` and
//! `[limits]` tables; a bare scenario file is also accepted. An audit file
//! names the tape (relative to the file) plus the analyst inputs.

use std::path::{Path, PathBuf};

use buyback_core::audit::AuditInputs;
use buyback_core::strategies::{RegulatoryLimits, StrategyKind, StrategyParams};
use buyback_core::{LabError, ScenarioConfig};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    scenario: ScenarioConfig,
    #[serde(default)]
    strategy: Option<StrategyParams>,
    #[serde(default)]
    limits: Option<RegulatoryLimits>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub strategy: StrategyParams,
    pub limits: RegulatoryLimits,
}

impl RunConfig {
    /// Used when no config file is given.
    pub fn baseline() -> Self {
        let scenario = ScenarioConfig::default();
        RunConfig {
            strategy: StrategyParams::new(StrategyKind::AdaptiveBroker, 5e8),
            limits: default_limits(&scenario),
            scenario,
        }
    }

    pub fn from_toml_str(text: &str) -> buyback_core::Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| LabError::config("<file>", e.message().to_string()))?;
        let cfg = if table.contains_key("scenario") {
            let run: RunFile = toml::from_str(text)
                .map_err(|e| LabError::config("<file>", e.message().to_string()))?;
            let limits = run.limits.unwrap_or_else(|| default_limits(&run.scenario));
            RunConfig {
                strategy: run
                    .strategy
                    .unwrap_or_else(|| RunConfig::baseline().strategy),
                limits,
                scenario: run.scenario,
            }
        } else {
            let scenario = ScenarioConfig::from_toml_str(text)?;
            RunConfig {
                limits: default_limits(&scenario),
                scenario,
                ..RunConfig::baseline()
            }
        };
        cfg.scenario.validate()?;
        cfg.limits.validate()?;
        cfg.strategy.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Self::baseline()),
            Some(p) => Ok(Self::from_toml_str(&read(p)?)?),
        }
    }
}

fn default_limits(s: &ScenarioConfig) -> RegulatoryLimits {
    RegulatoryLimits {
        max_participation: 0.25,
        min_days: 1,
        max_days: s.horizon_days,
    }
}

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, Deserialize)]
struct AuditFile {
    tape: PathBuf,
    #[serde(flatten)]
    inputs: AuditInputs,
}

#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub tape: Option<PathBuf>,
    pub inputs: Option<AuditInputs>,
}

impl AuditConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(p) = path else {
            return Ok(AuditConfig {
                tape: None,
                inputs: None,
            });
        };
        let file: AuditFile = toml::from_str(&read(p)?)
            .map_err(|e| LabError::config("<file>", e.message().to_string()))?;
        let base = p.parent().unwrap_or(Path::new(""));
        Ok(AuditConfig {
            tape: Some(base.join(file.tape)),
            inputs: Some(file.inputs),
        })
    }
}
