//! Value-at-Risk for buy-back programs: the normal closed form, a
//! GBM Monte Carlo estimate, the residual profile of a uniform unwind, and
//! market-wide aggregation.
//!
//! Horizons are in trading days and converted to years with the
//! scenario's day count, so `V * z * sigma * sqrt(days / days_per_year)`.
//!
//! The Monte Carlo loss is the absolute price move applied to the program
//! value, `V * |1 - S_T / S_0|`: a buyer is exposed to the share count it
//! ends up with moving either way, and a `percentile` of `p` is the
//! probability of a move at least that large.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::market::{csv_err, generate_path, terminal_ratio, ScenarioConfig};
use crate::par::{map_indices, ExecMode};

pub const MIN_MC_PATHS: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarQuery {
    pub value: f64,
    pub z: f64,
    pub sigma_annual: f64,
    pub horizon_days: f64,
    pub days_per_year: f64,
}

impl VarQuery {
    pub fn years(&self) -> f64 {
        self.horizon_days / self.days_per_year
    }
}

pub fn closed_form_var(q: &VarQuery) -> f64 {
    q.value * q.z * q.sigma_annual * q.years().sqrt()
}

/// Closed-form VaR of the share of total buy-backs run against an
/// unsuitable benchmark.
pub fn market_aggregate_var(
    total_buybacks: f64,
    affected_share: f64,
    z: f64,
    sigma_annual: f64,
    horizon_days: f64,
    days_per_year: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&affected_share) {
        return Err(LabError::Parameter(format!(
            "affected_share {affected_share} outside [0, 1]"
        )));
    }
    Ok(closed_form_var(&VarQuery {
        value: total_buybacks * affected_share,
        z,
        sigma_annual,
        horizon_days,
        days_per_year,
    }))
}

fn check_mc(percentile: f64, n_paths: u64) -> Result<()> {
    if n_paths < MIN_MC_PATHS {
        return Err(LabError::Parameter(format!(
            "need at least {MIN_MC_PATHS} paths, got {n_paths}"
        )));
    }
    if !(percentile > 0.0 && percentile <= 0.5) {
        return Err(LabError::Parameter(format!(
            "percentile {percentile} outside (0, 0.5]"
        )));
    }
    Ok(())
}

/// Value exceeded by a fraction `tail` of `sorted` (ascending) losses.
fn upper_quantile(sorted: &[f64], tail: f64) -> f64 {
    let n = sorted.len();
    let rank = ((1.0 - tail) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

fn driftless(config: &ScenarioConfig) -> ScenarioConfig {
    ScenarioConfig {
        drift_annual: 0.0,
        ..config.clone()
    }
}

/// Monte Carlo VaR over `config.horizon_days` with zero drift.
pub fn mc_var(config: &ScenarioConfig, value: f64, percentile: f64, n_paths: u64, mode: ExecMode) -> Result<f64> {
    check_mc(percentile, n_paths)?;
    let cfg = driftless(config);
    cfg.validate()?;
    let mut losses = map_indices(n_paths, mode, |i| value * (1.0 - terminal_ratio(&cfg, i)).abs());
    losses.sort_by(f64::total_cmp);
    Ok(upper_quantile(&losses, percentile))
}

/// Residual VaR of a uniform unwind of `value` over `unwind_days`.
///
/// Entry `d` is the risk left after `d` days: the remaining tranches at
/// days `k = d+1..=N` each carry a fraction `(N - k + 1) / N` of the value
/// through one day of daily volatility.
pub fn residual_var_profile(config: &ScenarioConfig, value: f64, unwind_days: usize, z: f64) -> Result<Vec<(usize, f64)>> {
    if unwind_days == 0 {
        return Err(LabError::Parameter("unwind_days must be >= 1".into()));
    }
    let n = unwind_days as f64;
    let sigma_daily = config.sigma_annual * config.dt().sqrt();
    // Suffix sums of squared remaining fractions, built from day N down.
    let mut tail = vec![0.0; unwind_days + 1];
    for k in (1..=unwind_days).rev() {
        let frac = (n - k as f64 + 1.0) / n;
        tail[k - 1] = tail[k] + frac * frac;
    }
    Ok(tail
        .iter()
        .enumerate()
        .map(|(d, s)| (d, z * sigma_daily * value * s.sqrt()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarReport {
    pub closed_form: f64,
    pub mc_estimate: f64,
    pub mc_paths: u64,
    pub percentile: f64,
    pub residual_profile: Vec<(usize, f64)>,
}

/// Closed form at `z`, Monte Carlo at `percentile`, and the residual
/// profile of a uniform unwind over the scenario horizon.
pub fn var_report(
    config: &ScenarioConfig,
    value: f64,
    z: f64,
    percentile: f64,
    n_paths: u64,
    mode: ExecMode,
) -> Result<VarReport> {
    config.validate()?;
    let q = VarQuery {
        value,
        z,
        sigma_annual: config.sigma_annual,
        horizon_days: config.horizon_days as f64,
        days_per_year: f64::from(config.trading_days_per_year),
    };
    Ok(VarReport {
        closed_form: closed_form_var(&q),
        mc_estimate: mc_var(config, value, percentile, n_paths, mode)?,
        mc_paths: n_paths,
        percentile,
        residual_profile: residual_var_profile(config, value, config.horizon_days, z)?,
    })
}

impl VarReport {
    pub fn write_profile_csv<W: Write>(&self, w: W) -> Result<usize> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["day_index", "residual_var"]).map_err(csv_err)?;
        for (d, v) in &self.residual_profile {
            out.write_record([d.to_string(), v.to_string()]).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(self.residual_profile.len())
    }
}

/// Data behind a Monte Carlo fan chart of program value over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanChart {
    /// `(day_index, var_1pct, var_5pct)` per day.
    pub var_curves: Vec<(usize, f64, f64)>,
    /// Program value marked to each sampled path's price, per day.
    pub sample_paths: Vec<Vec<f64>>,
}

pub fn fan_chart(config: &ScenarioConfig, value: f64, n_paths: u64, n_samples: usize, mode: ExecMode) -> Result<FanChart> {
    check_mc(0.01, n_paths)?;
    let cfg = driftless(config);
    cfg.validate()?;
    let s0 = cfg.initial_price;
    let ratios: Vec<Vec<f64>> = map_indices(n_paths, mode, |i| {
        generate_path(&cfg, i)
            .map(|p| p.days.iter().map(|d| d.close / s0).collect())
            .unwrap_or_default()
    });
    let mut var_curves = Vec::with_capacity(cfg.horizon_days);
    let mut losses = vec![0.0; ratios.len()];
    for t in 0..cfg.horizon_days {
        for (l, r) in losses.iter_mut().zip(&ratios) {
            *l = value * (1.0 - r[t]).abs();
        }
        losses.sort_by(f64::total_cmp);
        var_curves.push((t, upper_quantile(&losses, 0.01), upper_quantile(&losses, 0.05)));
    }
    let sample_paths = ratios
        .iter()
        .take(n_samples)
        .map(|r| r.iter().map(|x| value * x).collect())
        .collect();
    Ok(FanChart {
        var_curves,
        sample_paths,
    })
}

impl FanChart {
    /// Long format: `day_index, series, value` with series `var_1pct`,
    /// `var_5pct` and `path_<k>`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<usize> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["day_index", "series", "value"]).map_err(csv_err)?;
        let mut rows = 0;
        for (t, v1, v5) in &self.var_curves {
            out.write_record([t.to_string(), "var_1pct".into(), v1.to_string()])
                .map_err(csv_err)?;
            out.write_record([t.to_string(), "var_5pct".into(), v5.to_string()])
                .map_err(csv_err)?;
            rows += 2;
        }
        for (k, path) in self.sample_paths.iter().enumerate() {
            for (t, v) in path.iter().enumerate() {
                out.write_record([t.to_string(), format!("path_{k}"), v.to_string()])
                    .map_err(csv_err)?;
                rows += 1;
            }
        }
        out.flush()?;
        Ok(rows)
    }
}
