//! Buy-back execution strategies run day by day against a [`PricePath`].
//!
//! Day `t` decides its size from information through day `t - 1` (the
//! previous close and the rolling mean of daily VWAPs) and fills at day
//! `t`'s VWAP, optionally marked up by a linear impact term.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::market::{csv_err, PricePath};

/// Fraction of the target treated as "done" to absorb rounding.
const COMPLETION_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegulatoryLimits {
    pub max_participation: f64,
    pub min_days: usize,
    pub max_days: usize,
}

impl RegulatoryLimits {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_participation > 0.0 && self.max_participation <= 1.0) {
            return Err(LabError::config(
                "max_participation",
                format!("must be in (0, 1], got {}", self.max_participation),
            ));
        }
        if self.min_days < 1 || self.min_days > self.max_days {
            return Err(LabError::config(
                "min_days",
                format!("need 1 <= min_days <= max_days, got {}..{}", self.min_days, self.max_days),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Twap,
    Pov,
    AdaptiveBroker,
    ValuationGated,
}

fn default_fast() -> f64 {
    4.0
}
fn default_trickle() -> f64 {
    0.15
}
fn default_gate_base() -> StrategyKind {
    StrategyKind::Twap
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    pub kind: StrategyKind,
    pub target_value: f64,
    #[serde(default)]
    pub pov_rate: f64,
    /// Multiples of the baseline daily value `target_value / max_days`.
    #[serde(default = "default_fast")]
    pub fast_mult: f64,
    #[serde(default = "default_trickle")]
    pub trickle_mult: f64,
    #[serde(default)]
    pub impact_kappa: f64,
    #[serde(default)]
    pub valuation_ceiling: Option<f64>,
    /// Strategy wrapped by `ValuationGated`.
    #[serde(default = "default_gate_base")]
    pub gate_base: StrategyKind,
}

impl StrategyParams {
    pub fn new(kind: StrategyKind, target_value: f64) -> Self {
        StrategyParams {
            kind,
            target_value,
            pov_rate: 0.0,
            fast_mult: default_fast(),
            trickle_mult: default_trickle(),
            impact_kappa: 0.0,
            valuation_ceiling: None,
            gate_base: default_gate_base(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_value.is_finite() && self.target_value > 0.0) {
            return Err(LabError::config("target_value", "must be > 0"));
        }
        if !(self.trickle_mult >= 0.0 && self.trickle_mult < self.fast_mult) {
            return Err(LabError::config(
                "trickle_mult",
                format!(
                    "need 0 <= trickle_mult < fast_mult, got {} / {}",
                    self.trickle_mult, self.fast_mult
                ),
            ));
        }
        if !(self.impact_kappa >= 0.0 && self.impact_kappa.is_finite()) {
            return Err(LabError::config("impact_kappa", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlotterRow {
    pub day_index: usize,
    pub shares: f64,
    pub value: f64,
    pub fill_price: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeBlotter {
    /// One row per day from day 0 through the last day run, including
    /// days with no purchase.
    pub rows: Vec<BlotterRow>,
    pub target_value: f64,
    pub max_days: usize,
    pub completed: bool,
    /// Number of days used (last active day index + 1).
    pub completion_day: usize,
    pub diagnostic: Option<String>,
}

impl TradeBlotter {
    pub fn total_value(&self) -> f64 {
        self.rows.iter().map(|r| r.value).sum()
    }

    pub fn total_shares(&self) -> f64 {
        self.rows.iter().map(|r| r.shares).sum()
    }

    /// Daily VWAPs over the blotter's realized window.
    pub fn window_vwaps(&self, path: &PricePath) -> Vec<f64> {
        path.days[..self.completion_day].iter().map(|d| d.vwap).collect()
    }

    /// `(pct_time_elapsed, cumulative_pct_value)` per row.
    pub fn completion_series(&self) -> Vec<(f64, f64)> {
        let mut cum = 0.0;
        self.rows
            .iter()
            .map(|r| {
                cum += r.value;
                (
                    (r.day_index + 1) as f64 / self.max_days as f64,
                    cum / self.target_value,
                )
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<usize> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "day_index",
            "shares",
            "value",
            "fill_price",
            "cumulative_pct_value",
            "pct_time_elapsed",
        ])
        .map_err(csv_err)?;
        for (r, (time, cum)) in self.rows.iter().zip(self.completion_series()) {
            out.write_record([
                r.day_index.to_string(),
                r.shares.to_string(),
                r.value.to_string(),
                r.fill_price.to_string(),
                (100.0 * cum).to_string(),
                (100.0 * time).to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(self.rows.len())
    }
}

fn fill_price(vwap: f64, volume: f64, shares: f64, kappa: f64) -> f64 {
    vwap * (1.0 + kappa * shares / volume)
}

/// Shares whose impact-adjusted cost equals `value`.
fn shares_for_value(value: f64, vwap: f64, volume: f64, kappa: f64) -> f64 {
    if value <= 0.0 {
        return 0.0;
    }
    if kappa == 0.0 {
        return value / vwap;
    }
    // kappa*vwap/volume * s^2 + vwap * s - value = 0
    let a = kappa * vwap / volume;
    let b = vwap;
    2.0 * value / (b + (b * b + 4.0 * a * value).sqrt())
}

/// Per-day sizing request handed to the common execution loop.
enum Request {
    Value(f64),
    Shares(f64),
}

struct DayView<'a> {
    t: usize,
    remaining: f64,
    /// Days left including today.
    days_left: usize,
    prev_close: f64,
    /// Mean of daily VWAPs over days `0..t`, `None` on day 0.
    rolling_bogus: Option<f64>,
    path: &'a PricePath,
}

fn check_path(path: &PricePath, limits: &RegulatoryLimits) -> Result<()> {
    limits.validate()?;
    if path.len() < limits.max_days {
        return Err(LabError::config(
            "max_days",
            format!("path has {} days, limits need {}", path.len(), limits.max_days),
        ));
    }
    Ok(())
}

fn execute<F>(
    path: &PricePath,
    params: &StrategyParams,
    limits: &RegulatoryLimits,
    ceiling: Option<f64>,
    mut decide: F,
) -> TradeBlotter
where
    F: FnMut(&DayView) -> Request,
{
    let target = params.target_value;
    let kappa = params.impact_kappa;
    let mut rows = Vec::with_capacity(limits.max_days);
    let mut remaining = target;
    let mut vwap_sum = 0.0;
    let mut completed = false;

    for t in 0..limits.max_days {
        let day = &path.days[t];
        let prev_close = path.prev_close(t);
        let gated = ceiling.is_some_and(|c| prev_close > c);
        let view = DayView {
            t,
            remaining,
            days_left: limits.max_days - t,
            prev_close,
            rolling_bogus: (t > 0).then(|| vwap_sum / t as f64),
            path,
        };
        let cap_shares = limits.max_participation * day.volume;
        let mut shares = if gated {
            0.0
        } else {
            match decide(&view) {
                Request::Value(v) => shares_for_value(v.min(remaining), day.vwap, day.volume, kappa),
                Request::Shares(s) => {
                    let full = shares_for_value(remaining, day.vwap, day.volume, kappa);
                    s.min(full)
                }
            }
        };
        shares = shares.clamp(0.0, cap_shares);
        let price = fill_price(day.vwap, day.volume, shares, kappa);
        let value = shares * price;
        rows.push(BlotterRow {
            day_index: day.day_index,
            shares,
            value,
            fill_price: price,
        });
        remaining -= value;
        vwap_sum += day.vwap;
        if remaining <= COMPLETION_EPS * target {
            completed = true;
            break;
        }
    }

    let completion_day = rows.len();
    let diagnostic = (!completed).then(|| {
        format!(
            "{:.4}% of target value unexecuted after {} days",
            100.0 * remaining / target,
            completion_day
        )
    });
    TradeBlotter {
        rows,
        target_value: target,
        max_days: limits.max_days,
        completed,
        completion_day,
        diagnostic,
    }
}

/// Largest program value the participation cap admits over the window.
pub fn max_feasible_value(path: &PricePath, limits: &RegulatoryLimits) -> f64 {
    path.days[..limits.max_days.min(path.len())]
        .iter()
        .map(|d| limits.max_participation * d.volume * d.vwap)
        .sum()
}

/// Equal value per day over `max_days`. A day clipped by the cap spreads
/// its shortfall over the days that remain.
pub fn run_twap(path: &PricePath, params: &StrategyParams, limits: &RegulatoryLimits) -> Result<TradeBlotter> {
    run_twap_gated(path, params, limits, None)
}

fn run_twap_gated(
    path: &PricePath,
    params: &StrategyParams,
    limits: &RegulatoryLimits,
    ceiling: Option<f64>,
) -> Result<TradeBlotter> {
    params.validate()?;
    check_path(path, limits)?;
    let max_feasible = max_feasible_value(path, limits);
    if params.target_value > max_feasible {
        return Err(LabError::Infeasible {
            target: params.target_value,
            max_feasible,
        });
    }
    Ok(execute(path, params, limits, ceiling, |v| {
        Request::Value(v.remaining / v.days_left as f64)
    }))
}

/// Buys `pov_rate` of each day's volume until the target value is filled.
pub fn run_pov(path: &PricePath, params: &StrategyParams, limits: &RegulatoryLimits) -> Result<TradeBlotter> {
    run_pov_gated(path, params, limits, None)
}

fn run_pov_gated(
    path: &PricePath,
    params: &StrategyParams,
    limits: &RegulatoryLimits,
    ceiling: Option<f64>,
) -> Result<TradeBlotter> {
    params.validate()?;
    check_path(path, limits)?;
    if !(params.pov_rate > 0.0 && params.pov_rate <= limits.max_participation) {
        return Err(LabError::Parameter(format!(
            "pov_rate {} must be in (0, max_participation = {}]",
            params.pov_rate, limits.max_participation
        )));
    }
    let rate = params.pov_rate;
    Ok(execute(path, params, limits, ceiling, |v| {
        Request::Shares(rate * v.path.days[v.t].volume)
    }))
}

/// Broker-style strategy: buys `fast_mult` baseline days of value when the
/// previous close sits below the rolling benchmark mean, `trickle_mult`
/// otherwise, and never falls behind the pace needed to finish by
/// `max_days`. It cannot finish before `min_days`.
pub fn run_adaptive_broker(
    path: &PricePath,
    params: &StrategyParams,
    limits: &RegulatoryLimits,
) -> Result<TradeBlotter> {
    run_adaptive_gated(path, params, limits, None)
}

fn run_adaptive_gated(
    path: &PricePath,
    params: &StrategyParams,
    limits: &RegulatoryLimits,
    ceiling: Option<f64>,
) -> Result<TradeBlotter> {
    params.validate()?;
    check_path(path, limits)?;
    let baseline = params.target_value / limits.max_days as f64;
    let fast = params.fast_mult * baseline;
    let trickle = params.trickle_mult * baseline;
    let min_days = limits.min_days;
    Ok(execute(path, params, limits, ceiling, |v| {
        let cheap = v.rolling_bogus.is_some_and(|b| v.prev_close < b);
        let wanted = if cheap { fast } else { trickle };
        let required = v.remaining / v.days_left as f64;
        let mut pace = wanted.max(required);
        if v.t + 1 < min_days {
            pace = pace.min(v.remaining / (min_days - v.t) as f64);
        }
        Request::Value(pace)
    }))
}

/// Runs the base strategy with no purchases on days whose previous close
/// is above `ceiling`. The program may end incomplete.
pub fn run_valuation_gated(
    path: &PricePath,
    params: &StrategyParams,
    limits: &RegulatoryLimits,
    ceiling: f64,
) -> Result<TradeBlotter> {
    if !(ceiling > 0.0) {
        return Err(LabError::config("valuation_ceiling", "must be > 0"));
    }
    let base = match params.kind {
        StrategyKind::ValuationGated => params.gate_base,
        k => k,
    };
    let gate = Some(ceiling);
    match base {
        StrategyKind::Twap => {
            // The feasibility pre-check is about the cap, not the gate.
            run_twap_gated(path, params, limits, gate)
        }
        StrategyKind::Pov => run_pov_gated(path, params, limits, gate),
        StrategyKind::AdaptiveBroker => run_adaptive_gated(path, params, limits, gate),
        StrategyKind::ValuationGated => Err(LabError::config(
            "gate_base",
            "a gated strategy cannot wrap another gated strategy",
        )),
    }
}

/// Dispatches on `params.kind`.
pub fn run_strategy(path: &PricePath, params: &StrategyParams, limits: &RegulatoryLimits) -> Result<TradeBlotter> {
    match params.kind {
        StrategyKind::Twap => run_twap(path, params, limits),
        StrategyKind::Pov => run_pov(path, params, limits),
        StrategyKind::AdaptiveBroker => run_adaptive_broker(path, params, limits),
        StrategyKind::ValuationGated => {
            let ceiling = params
                .valuation_ceiling
                .ok_or_else(|| LabError::config("valuation_ceiling", "required for valuation_gated"))?;
            run_valuation_gated(path, params, limits, ceiling)
        }
    }
}
