//! Probability experiments: the fair-coin game with a discretionary
//! stopping window, and benchmark-beating studies over simulated paths.

use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{bogus_benchmark, purchase_stats};
use crate::error::{LabError, Result};
use crate::market::{csv_err, generate_path, ScenarioConfig};
use crate::par::{map_indices, ExecMode};
use crate::strategies::{run_strategy, RegulatoryLimits, StrategyParams};

pub const MAX_FLIPS: usize = 10_000;
const MC_BATCH: u64 = 10_000;

/// Outperformance within this band of zero counts as neither a win nor an
/// underperformance (float noise on flat paths).
pub const OUTPERFORMANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinPolicy {
    /// Bet settles after exactly `n_min` flips.
    FixedHorizon,
    /// Stop at the first flip in `[n_min, n_max]` with heads ahead.
    StopWhenAhead,
    /// Value-maximizing stopping rule found by backward induction.
    StopOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinGameSpec {
    pub n_min: usize,
    pub n_max: usize,
    pub policy: CoinPolicy,
    #[serde(default)]
    pub trials: u64,
}

impl CoinGameSpec {
    pub fn new(n_min: usize, n_max: usize, policy: CoinPolicy) -> Self {
        CoinGameSpec {
            n_min,
            n_max,
            policy,
            trials: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_min > self.n_max {
            return Err(LabError::Parameter(format!(
                "n_min {} > n_max {}",
                self.n_min, self.n_max
            )));
        }
        if self.n_max > MAX_FLIPS {
            return Err(LabError::Parameter(format!(
                "n_max {} exceeds DP limit {MAX_FLIPS}",
                self.n_max
            )));
        }
        Ok(())
    }
}

/// Exact outcome probabilities. A win is heads strictly ahead; a tie is
/// heads level when the bet settles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinGameExact {
    pub win_probability: f64,
    pub tie_probability: f64,
    pub loss_probability: f64,
    /// Largest deviation of total probability mass from 1 over all layers.
    pub max_mass_error: f64,
}

/// Lead `l` lives at index `l + n`.
struct LeadDist {
    n: usize,
    mass: Vec<f64>,
}

impl LeadDist {
    fn start(n: usize) -> Self {
        let mut mass = vec![0.0; 2 * n + 1];
        mass[n] = 1.0;
        LeadDist { n, mass }
    }

    fn step(&mut self) {
        let mut next = vec![0.0; self.mass.len()];
        for (i, &m) in self.mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            next[i + 1] += 0.5 * m;
            next[i - 1] += 0.5 * m;
        }
        self.mass = next;
    }

    fn ahead(&self) -> f64 {
        self.mass[self.n + 1..].iter().sum()
    }

    fn level(&self) -> f64 {
        self.mass[self.n]
    }

    fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    fn absorb_ahead(&mut self) -> f64 {
        let taken = self.ahead();
        for m in &mut self.mass[self.n + 1..] {
            *m = 0.0;
        }
        taken
    }
}

pub fn coin_game_exact(spec: &CoinGameSpec) -> Result<CoinGameExact> {
    spec.validate()?;
    match spec.policy {
        CoinPolicy::FixedHorizon => Ok(fixed_horizon(spec.n_min)),
        CoinPolicy::StopWhenAhead => Ok(stop_when_ahead(spec.n_min, spec.n_max)),
        CoinPolicy::StopOptimal => Ok(stop_optimal(spec.n_min, spec.n_max).0),
    }
}

fn fixed_horizon(n: usize) -> CoinGameExact {
    // Padded by one so the walk never touches the array edge.
    let mut d = LeadDist::start(n + 1);
    let mut err: f64 = 0.0;
    for _ in 0..n {
        d.step();
        err = err.max((d.total() - 1.0).abs());
    }
    let win = d.ahead();
    let tie = d.level();
    CoinGameExact {
        win_probability: win,
        tie_probability: tie,
        loss_probability: 1.0 - win - tie,
        max_mass_error: err,
    }
}

fn stop_when_ahead(n_min: usize, n_max: usize) -> CoinGameExact {
    let mut d = LeadDist::start(n_max + 1);
    let mut won = 0.0;
    let mut err: f64 = 0.0;
    for t in 1..=n_max {
        d.step();
        if t >= n_min {
            won += d.absorb_ahead();
        }
        err = err.max((d.total() + won - 1.0).abs());
    }
    let tie = d.level();
    CoinGameExact {
        win_probability: won,
        tie_probability: tie,
        loss_probability: 1.0 - won - tie,
        max_mass_error: err,
    }
}

/// Backward induction. Returns the exact outcome and the stop table for
/// flips `n_min..=n_max` (`stop[t - n_min][lead + n_max]`).
fn stop_optimal(n_min: usize, n_max: usize) -> (CoinGameExact, Vec<Vec<bool>>) {
    let n = n_max;
    let width = 2 * n + 1;
    let payoff = |i: usize| if i > n { 1.0 } else { 0.0 };
    let mut value: Vec<f64> = (0..width).map(payoff).collect();
    let mut stop_rows = vec![vec![true; width]];
    for t in (0..n_max).rev() {
        let mut next = vec![0.0; width];
        let mut stop = vec![false; width];
        // Reachable leads at flip t have the parity of t and |lead| <= t.
        for (i, slot) in next.iter_mut().enumerate() {
            let lead = i as i64 - n as i64;
            if lead.unsigned_abs() as usize > t || (lead + t as i64) % 2 != 0 {
                continue;
            }
            let cont = 0.5 * value[i + 1] + 0.5 * value[i - 1];
            if t >= n_min && payoff(i) >= cont {
                *slot = payoff(i);
                stop[i] = true;
            } else {
                *slot = cont;
            }
        }
        value = next;
        if t >= n_min {
            stop_rows.push(stop);
        }
    }
    stop_rows.reverse();
    let win = value[n];

    // Forward pass under the computed rule for the tie/loss split.
    let mut d = LeadDist::start(n + 1);
    let mut err: f64 = 0.0;
    let mut settled = [0.0; 3];
    if n_min == 0 {
        settle(&mut d, &stop_rows[0], n, &mut settled);
    }
    for t in 1..=n_max {
        d.step();
        if t >= n_min {
            settle(&mut d, &stop_rows[t - n_min], n, &mut settled);
        }
        err = err.max((d.total() + settled.iter().sum::<f64>() - 1.0).abs());
    }
    let [won, level, lost] = settled;
    let exact = CoinGameExact {
        win_probability: won,
        tie_probability: level,
        loss_probability: lost,
        max_mass_error: err.max((won - win).abs()),
    };
    (exact, stop_rows)
}

/// Moves mass on stopping states into `[won, level, lost]`. Each layer is
/// summed in index order before it is added, matching `absorb_ahead`.
fn settle(d: &mut LeadDist, row: &[bool], n: usize, settled: &mut [f64; 3]) {
    let mut layer = [0.0; 3];
    for (i, _) in row.iter().enumerate().filter(|(_, s)| **s) {
        let m = std::mem::take(&mut d.mass[i + 1]);
        let slot = match i.cmp(&n) {
            std::cmp::Ordering::Greater => 0,
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Less => 2,
        };
        layer[slot] += m;
    }
    for (s, l) in settled.iter_mut().zip(layer) {
        *s += l;
    }
}

/// Monte Carlo estimate of the win probability, `spec.trials` games.
pub fn coin_game_mc(spec: &CoinGameSpec, master_seed: u64, mode: ExecMode) -> Result<f64> {
    spec.validate()?;
    if spec.trials == 0 {
        return Err(LabError::Parameter("trials must be >= 1".into()));
    }
    let stop_table = match spec.policy {
        CoinPolicy::StopOptimal => Some(stop_optimal(spec.n_min, spec.n_max).1),
        _ => None,
    };
    let (n_min, n_max) = (spec.n_min, spec.n_max);
    let policy = spec.policy;
    let batches = spec.trials.div_ceil(MC_BATCH);
    let wins: u64 = map_indices(batches, mode, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(b);
        let count = MC_BATCH.min(spec.trials - b * MC_BATCH);
        (0..count)
            .filter(|_| play_once(&mut rng, n_min, n_max, policy, stop_table.as_deref()))
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(wins as f64 / spec.trials as f64)
}

fn play_once(
    rng: &mut ChaCha8Rng,
    n_min: usize,
    n_max: usize,
    policy: CoinPolicy,
    stop_table: Option<&[Vec<bool>]>,
) -> bool {
    let horizon = match policy {
        CoinPolicy::FixedHorizon => n_min,
        _ => n_max,
    };
    let mut lead: i64 = 0;
    let mut bits = 0u64;
    let mut left = 0u32;
    for t in 1..=horizon {
        if left == 0 {
            bits = rng.next_u64();
            left = 64;
        }
        lead += if bits & 1 == 1 { 1 } else { -1 };
        bits >>= 1;
        left -= 1;
        if t < n_min {
            continue;
        }
        match policy {
            CoinPolicy::FixedHorizon => {}
            CoinPolicy::StopWhenAhead => {
                if lead > 0 {
                    return true;
                }
            }
            CoinPolicy::StopOptimal => {
                let row = &stop_table.expect("stop table")[t - n_min];
                if row[(lead + n_max as i64) as usize] {
                    return lead > 0;
                }
            }
        }
    }
    lead > 0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub mean: f64,
    pub std: f64,
    pub p05: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
}

impl DistributionSummary {
    fn from_sorted(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let pct = |p: f64| {
            let pos = p * (n - 1.0);
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            xs[lo] + (xs[hi] - xs[lo]) * (pos - lo as f64)
        };
        DistributionSummary {
            mean,
            std: var.sqrt(),
            p05: pct(0.05),
            p25: pct(0.25),
            p50: pct(0.50),
            p75: pct(0.75),
            p95: pct(0.95),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub n_paths: u64,
    /// Share of paths with outperformance above zero.
    pub win_probability: f64,
    pub underperformance_rate: f64,
    pub incomplete_rate: f64,
    pub mean_completion_day: f64,
    pub outperformance_distribution: DistributionSummary,
    /// Per-path outperformance, index order.
    #[serde(skip)]
    pub outperformance: Vec<f64>,
}

impl StudyResult {
    /// Histogram of outperformance with `bins` equal-width bins.
    pub fn write_histogram_csv<W: Write>(&self, w: W, bins: usize) -> Result<usize> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["bin_lo", "bin_hi", "count"]).map_err(csv_err)?;
        let lo = self.outperformance.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.outperformance.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bins = bins.max(1);
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let mut counts = vec![0u64; bins];
        for &o in &self.outperformance {
            let k = (((o - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        for (k, c) in counts.iter().enumerate() {
            let a = lo + k as f64 * width;
            out.write_record([a.to_string(), (a + width).to_string(), c.to_string()])
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(bins)
    }
}

struct PathOutcome {
    outperformance: f64,
    completed: bool,
    completion_day: usize,
}

/// Runs the strategy on `n_paths` paths and measures outperformance of the
/// mean-of-daily-VWAPs benchmark over each blotter's realized window.
pub fn benchmark_beat_study(
    params: &StrategyParams,
    limits: &RegulatoryLimits,
    config: &ScenarioConfig,
    n_paths: u64,
    mode: ExecMode,
) -> Result<StudyResult> {
    if n_paths < 1_000 {
        return Err(LabError::Parameter(format!(
            "need at least 1000 paths, got {n_paths}"
        )));
    }
    config.validate()?;
    let outcomes: Vec<Result<Option<PathOutcome>>> = map_indices(n_paths, mode, |i| {
        let path = generate_path(config, i)?;
        let blotter = run_strategy(&path, params, limits)?;
        if blotter.total_shares() <= 0.0 {
            return Ok(None);
        }
        let bench = bogus_benchmark(&blotter.window_vwaps(&path))?;
        let stats = purchase_stats(&blotter, bench)?;
        Ok(Some(PathOutcome {
            outperformance: stats.outperformance,
            completed: blotter.completed,
            completion_day: blotter.completion_day,
        }))
    });
    let mut outs = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        if let Some(p) = o? {
            outs.push(p);
        }
    }
    if outs.is_empty() {
        return Err(LabError::Domain("no path executed any shares".into()));
    }
    let n = outs.len() as f64;
    let wins = outs.iter().filter(|o| o.outperformance > OUTPERFORMANCE_TOL).count();
    let under = outs.iter().filter(|o| o.outperformance < -OUTPERFORMANCE_TOL).count();
    let incomplete = outs.iter().filter(|o| !o.completed).count();
    let mean_completion_day = outs.iter().map(|o| o.completion_day as f64).sum::<f64>() / n;
    let outperformance: Vec<f64> = outs.iter().map(|o| o.outperformance).collect();
    let mut sorted = outperformance.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(StudyResult {
        n_paths,
        win_probability: wins as f64 / n,
        underperformance_rate: under as f64 / n,
        incomplete_rate: incomplete as f64 / n,
        mean_completion_day,
        outperformance_distribution: DistributionSummary::from_sorted(&sorted),
        outperformance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierPoint {
    pub fast_mult: f64,
    pub trickle_mult: f64,
    pub win_probability: f64,
    pub underperformance_rate: f64,
    pub mean_outperformance: f64,
    pub mean_completion_day: f64,
}

/// Repeats the study over a grid of `(fast_mult, trickle_mult)` pairs.
pub fn multiplier_sensitivity(
    params: &StrategyParams,
    limits: &RegulatoryLimits,
    config: &ScenarioConfig,
    n_paths: u64,
    grid: &[(f64, f64)],
    mode: ExecMode,
) -> Result<Vec<MultiplierPoint>> {
    grid.iter()
        .map(|&(fast_mult, trickle_mult)| {
            let p = StrategyParams {
                fast_mult,
                trickle_mult,
                ..*params
            };
            let r = benchmark_beat_study(&p, limits, config, n_paths, mode)?;
            Ok(MultiplierPoint {
                fast_mult,
                trickle_mult,
                win_probability: r.win_probability,
                underperformance_rate: r.underperformance_rate,
                mean_outperformance: r.outperformance_distribution.mean,
                mean_completion_day: r.mean_completion_day,
            })
        })
        .collect()
}
