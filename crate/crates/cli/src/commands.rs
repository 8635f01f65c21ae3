use std::fmt::Write as _;
use std::io::Write as _;

use buyback_core::audit::{audit_tape, completion_profile, parse_tape, AuditInputs};
use buyback_core::benchmarks::{bogus_benchmark, purchase_stats, BenchmarkSeries, PurchaseStats};
use buyback_core::experiments::{
    benchmark_beat_study, coin_game_exact, coin_game_mc, multiplier_sensitivity, CoinGameExact, CoinGameSpec,
    CoinPolicy, MultiplierPoint, StudyResult,
};
use buyback_core::risk::{fan_chart, var_report, VarReport};
use buyback_core::strategies::{run_strategy, StrategyKind, TradeBlotter};
use buyback_core::valuation::{buyback_outcome, discount, nav_per_share, TrustState};
use buyback_core::{generate_path, ExecMode, LabError, PricePath};
use serde::Serialize;

use crate::args::{AuditArgs, CoinArgs, GlobalArgs, NavArgs, RiskArgs, SimulateArgs, StrategyArg, StudyArgs};
use crate::config::{read, AuditConfig, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::OutDir;

/// What a subcommand hands back for stdout.
pub struct Outcome {
    pub seed: u64,
    pub text: String,
    pub json: serde_json::Value,
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

pub fn mode(g: &GlobalArgs) -> ExecMode {
    if g.sequential {
        ExecMode::Sequential
    } else {
        ExecMode::Parallel
    }
}

/// `215.33M`, `160.84bn`.
pub fn money(x: f64) -> String {
    let a = x.abs();
    if a >= 1e12 {
        format!("{:.3}tn", x / 1e12)
    } else if a >= 1e9 {
        format!("{:.2}bn", x / 1e9)
    } else if a >= 1e6 {
        format!("{:.2}M", x / 1e6)
    } else {
        format!("{x:.2}")
    }
}

pub fn csv_table(w: &mut impl std::io::Write, header: &[&str], rows: &[Vec<String>]) -> CliResult<usize> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(lab_csv)?;
    for r in rows {
        out.write_record(r).map_err(lab_csv)?;
    }
    out.flush().map_err(|e| CliError::Lab(e.into()))?;
    Ok(rows.len())
}

fn lab_csv(e: csv::Error) -> CliError {
    CliError::Lab(LabError::Io(e.to_string()))
}

#[derive(Debug, Serialize)]
struct SimulationSummary {
    strategy: StrategyKind,
    config_digest: String,
    path_index: u64,
    target_value: f64,
    completed: bool,
    completion_day: usize,
    max_days: usize,
    diagnostic: Option<String>,
    benchmark: f64,
    stats: PurchaseStats,
}

/// Price, running benchmark and daily traded value per day.
pub fn write_series(w: &mut impl std::io::Write, path: &PricePath, blotter: &TradeBlotter) -> CliResult<usize> {
    let bench = BenchmarkSeries::from_path(path);
    let series = blotter.completion_series();
    let mut rows = Vec::with_capacity(path.days.len());
    let mut cum = 0.0;
    for (t, day) in path.days.iter().enumerate() {
        let value = blotter.rows.get(t).map_or(0.0, |r| r.value);
        if let Some(&(_, pv)) = series.get(t) {
            cum = pv;
        }
        let pct_time = (t + 1) as f64 / blotter.max_days as f64;
        rows.push(vec![
            t.to_string(),
            day.close.to_string(),
            day.vwap.to_string(),
            bench.points[t].bogus.to_string(),
            value.to_string(),
            (100.0 * cum).to_string(),
            (100.0 * pct_time).to_string(),
        ]);
    }
    csv_table(
        w,
        &["day_index", "close", "vwap", "benchmark", "value", "cumulative_pct_value", "pct_time_elapsed"],
        &rows,
    )
}

pub fn simulate(g: &GlobalArgs, a: &SimulateArgs, out: &mut OutDir) -> CliResult<Outcome> {
    let mut cfg = RunConfig::load(g.config.as_deref())?;
    if let Some(seed) = g.seed {
        cfg.scenario.master_seed = seed;
    }
    if let Some(kind) = a.strategy {
        cfg.strategy.kind = match kind {
            StrategyArg::Twap => StrategyKind::Twap,
            StrategyArg::Pov => StrategyKind::Pov,
            StrategyArg::Adaptive => StrategyKind::AdaptiveBroker,
            StrategyArg::Gated => StrategyKind::ValuationGated,
        };
    }
    if let Some(t) = a.target {
        cfg.strategy.target_value = t;
    }
    if let Some(r) = a.pov_rate {
        cfg.strategy.pov_rate = r;
    }
    if let Some(c) = a.ceiling {
        cfg.strategy.valuation_ceiling = Some(c);
    }
    cfg.strategy.validate()?;

    let path = generate_path(&cfg.scenario, a.path_index)?;
    let blotter = run_strategy(&path, &cfg.strategy, &cfg.limits)?;
    let benchmark = bogus_benchmark(&blotter.window_vwaps(&path))?;
    let stats = purchase_stats(&blotter, benchmark)?;

    out.write("path.csv", |w| Ok(path.write_csv(w)?))?;
    out.write("benchmark.csv", |w| Ok(BenchmarkSeries::from_path(&path).write_csv(w)?))?;
    out.write("blotter.csv", |w| Ok(blotter.write_csv(w)?))?;
    out.write("series.csv", |w| write_series(w, &path, &blotter))?;
    let summary = SimulationSummary {
        strategy: cfg.strategy.kind,
        config_digest: cfg.scenario.digest(),
        path_index: a.path_index,
        target_value: cfg.strategy.target_value,
        completed: blotter.completed,
        completion_day: blotter.completion_day,
        max_days: blotter.max_days,
        diagnostic: blotter.diagnostic.clone(),
        benchmark,
        stats,
    };
    out.json("summary.json", &summary)?;

    let mut text = String::new();
    let _ = writeln!(text, "strategy         {:?}", summary.strategy);
    let _ = writeln!(text, "target           {}", money(summary.target_value));
    let _ = writeln!(text, "executed         {}", money(stats.gross_value));
    let _ = writeln!(
        text,
        "completion       day {} of {}{}",
        blotter.completion_day,
        blotter.max_days,
        if blotter.completed { "" } else { " (incomplete)" }
    );
    let _ = writeln!(text, "average price    {:.6}", stats.avg_price);
    let _ = writeln!(text, "benchmark        {benchmark:.6}");
    let _ = writeln!(text, "outperformance   {:.4}%", 100.0 * stats.outperformance);
    if let Some(d) = &blotter.diagnostic {
        let _ = writeln!(text, "note             {d}");
    }
    Ok(Outcome {
        seed: cfg.scenario.master_seed,
        text,
        json: to_json(&summary),
    })
}

pub const DEFAULT_RISK_PATHS: u64 = 100_000;
const MAX_FAN_PATHS: u64 = 5_000;

pub fn risk(g: &GlobalArgs, a: &RiskArgs, out: &mut OutDir) -> CliResult<Outcome> {
    let mut scn = RunConfig::load(g.config.as_deref())?.scenario;
    if let Some(seed) = g.seed {
        scn.master_seed = seed;
    }
    let n = g.paths.unwrap_or(DEFAULT_RISK_PATHS);
    let report: VarReport = var_report(&scn, a.value, a.z, a.percentile, n, mode(g))?;
    let fan = fan_chart(&scn, a.value, n.min(MAX_FAN_PATHS), a.fan_samples, mode(g))?;

    out.json("var_report.json", &report)?;
    out.write("residual_profile.csv", |w| Ok(report.write_profile_csv(w)?))?;
    out.write("fan_chart.csv", |w| Ok(fan.write_csv(w)?))?;

    let mut text = String::new();
    let _ = writeln!(text, "value                {}", money(a.value));
    let _ = writeln!(
        text,
        "horizon              {} days / {} per year, sigma {}",
        scn.horizon_days, scn.trading_days_per_year, scn.sigma_annual
    );
    let _ = writeln!(text, "closed-form VaR z={}  {} ({:.0})", a.z, money(report.closed_form), report.closed_form);
    let _ = writeln!(
        text,
        "MC VaR p={}        {} ({} paths)",
        a.percentile,
        money(report.mc_estimate),
        report.mc_paths
    );
    let _ = writeln!(
        text,
        "residual at day 0    {}",
        money(report.residual_profile.first().map_or(0.0, |r| r.1))
    );
    out.text("var_summary.txt", &text)?;
    Ok(Outcome {
        seed: scn.master_seed,
        text,
        json: to_json(&report),
    })
}

pub fn audit(g: &GlobalArgs, a: &AuditArgs, out: &mut OutDir) -> CliResult<Outcome> {
    let cfg = AuditConfig::load(g.config.as_deref())?;
    let tape_path = a
        .tape
        .clone()
        .or(cfg.tape)
        .ok_or_else(|| CliError::Usage("audit needs --tape or a --config naming one".into()))?;
    let mut inputs = match (cfg.inputs, a.allowed_days) {
        (Some(mut i), days) => {
            if let Some(d) = days {
                i.total_allowed_days = d;
            }
            i
        }
        (None, Some(d)) => AuditInputs::new(d),
        (None, None) => return Err(CliError::Usage("audit needs --allowed-days or a --config".into())),
    };
    if a.total_returned.is_some() {
        inputs.total_returned = a.total_returned;
    }
    if let Some(s) = a.stamp_bps {
        inputs.stamp_bps = s;
    }
    let tape = parse_tape(&read(&tape_path)?)?;
    let report = audit_tape(&tape, &inputs)?;
    let profile = completion_profile(&tape, inputs.total_allowed_days, inputs.target_value)?;

    out.json("audit_report.json", &report)?;
    let text = report.to_text();
    out.text("audit_report.txt", &text)?;
    out.write("completion.csv", |w| Ok(profile.write_csv(w)?))?;
    Ok(Outcome {
        seed: 0,
        text,
        json: to_json(&report),
    })
}

pub const DEFAULT_COIN_TRIALS: u64 = 200_000;

#[derive(Debug, Serialize)]
pub struct CoinRow {
    pub policy: CoinPolicy,
    pub n_min: usize,
    pub n_max: usize,
    pub exact: CoinGameExact,
    pub mc_win_probability: f64,
    pub trials: u64,
}

pub fn coin_table(n_min: usize, n_max: usize, trials: u64, seed: u64, mode: ExecMode) -> CliResult<Vec<CoinRow>> {
    let policies = [CoinPolicy::FixedHorizon, CoinPolicy::StopWhenAhead, CoinPolicy::StopOptimal];
    policies
        .into_iter()
        .map(|policy| {
            let mut spec = CoinGameSpec::new(n_min, n_max, policy);
            spec.trials = trials;
            Ok(CoinRow {
                policy,
                n_min,
                n_max,
                exact: coin_game_exact(&spec)?,
                mc_win_probability: coin_game_mc(&spec, seed, mode)?,
                trials,
            })
        })
        .collect()
}

pub fn coin_text(rows: &[CoinRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<16} {:>10} {:>10} {:>10} {:>10}", "policy", "P(win)", "P(tie)", "P(loss)", "MC win");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<16} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            format!("{:?}", r.policy),
            r.exact.win_probability,
            r.exact.tie_probability,
            r.exact.loss_probability,
            r.mc_win_probability
        );
    }
    s
}

pub fn write_coin_csv(w: &mut impl std::io::Write, rows: &[CoinRow]) -> CliResult<usize> {
    let data: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                format!("{:?}", r.policy),
                r.n_min.to_string(),
                r.n_max.to_string(),
                r.exact.win_probability.to_string(),
                r.exact.tie_probability.to_string(),
                r.exact.loss_probability.to_string(),
                r.mc_win_probability.to_string(),
                r.trials.to_string(),
            ]
        })
        .collect();
    csv_table(
        w,
        &["policy", "n_min", "n_max", "win", "tie", "loss", "mc_win", "trials"],
        &data,
    )
}

pub fn coin(g: &GlobalArgs, a: &CoinArgs, out: &mut OutDir) -> CliResult<Outcome> {
    let seed = g.seed.unwrap_or(0);
    let rows = coin_table(a.n_min, a.n_max, g.paths.unwrap_or(DEFAULT_COIN_TRIALS), seed, mode(g))?;
    out.write("coin_game.csv", |w| write_coin_csv(w, &rows))?;
    out.json("coin_game.json", &rows)?;
    let text = coin_text(&rows);
    Ok(Outcome {
        seed,
        text,
        json: to_json(&rows),
    })
}

pub const DEFAULT_STUDY_PATHS: u64 = 10_000;

fn parse_grid(items: &[String]) -> CliResult<Vec<(f64, f64)>> {
    items
        .iter()
        .map(|s| {
            let (f, t) = s
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("grid item `{s}` is not fast:trickle")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("grid item `{s}` is not numeric")))
            };
            Ok((num(f)?, num(t)?))
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct StudyOutput<'a> {
    strategy: StrategyKind,
    config_digest: String,
    result: &'a StudyResult,
    multipliers: &'a [MultiplierPoint],
}

pub fn study(g: &GlobalArgs, a: &StudyArgs, out: &mut OutDir) -> CliResult<Outcome> {
    let mut cfg = RunConfig::load(g.config.as_deref())?;
    if let Some(seed) = g.seed {
        cfg.scenario.master_seed = seed;
    }
    let grid = parse_grid(&a.grid)?;
    let n = g.paths.unwrap_or(DEFAULT_STUDY_PATHS);
    let result = benchmark_beat_study(&cfg.strategy, &cfg.limits, &cfg.scenario, n, mode(g))?;
    let multipliers = if grid.is_empty() {
        Vec::new()
    } else {
        multiplier_sensitivity(&cfg.strategy, &cfg.limits, &cfg.scenario, n, &grid, mode(g))?
    };

    out.write("outperformance_histogram.csv", |w| Ok(result.write_histogram_csv(w, a.bins)?))?;
    if !multipliers.is_empty() {
        let rows: Vec<Vec<String>> = multipliers
            .iter()
            .map(|m| {
                vec![
                    m.fast_mult.to_string(),
                    m.trickle_mult.to_string(),
                    m.win_probability.to_string(),
                    m.underperformance_rate.to_string(),
                    m.mean_outperformance.to_string(),
                    m.mean_completion_day.to_string(),
                ]
            })
            .collect();
        out.write("multipliers.csv", |w| {
            csv_table(
                w,
                &[
                    "fast_mult",
                    "trickle_mult",
                    "win_probability",
                    "underperformance_rate",
                    "mean_outperformance",
                    "mean_completion_day",
                ],
                &rows,
            )
        })?;
    }
    let output = StudyOutput {
        strategy: cfg.strategy.kind,
        config_digest: cfg.scenario.digest(),
        result: &result,
        multipliers: &multipliers,
    };
    out.json("study.json", &output)?;

    let d = result.outperformance_distribution;
    let mut text = String::new();
    let _ = writeln!(text, "strategy             {:?}", cfg.strategy.kind);
    let _ = writeln!(text, "paths                {}", result.n_paths);
    let _ = writeln!(text, "P(beat benchmark)    {:.4}", result.win_probability);
    let _ = writeln!(text, "underperformance     {:.4}", result.underperformance_rate);
    let _ = writeln!(text, "incomplete           {:.4}", result.incomplete_rate);
    let _ = writeln!(text, "mean completion day  {:.1}", result.mean_completion_day);
    let _ = writeln!(
        text,
        "outperformance       mean {:.4}%  p05 {:.4}%  p50 {:.4}%  p95 {:.4}%",
        100.0 * d.mean,
        100.0 * d.p05,
        100.0 * d.p50,
        100.0 * d.p95
    );
    for m in &multipliers {
        let _ = writeln!(
            text,
            "fast {:>5} trickle {:>5}: win {:.4} under {:.4} mean {:.4}% day {:.1}",
            m.fast_mult,
            m.trickle_mult,
            m.win_probability,
            m.underperformance_rate,
            100.0 * m.mean_outperformance,
            m.mean_completion_day
        );
    }
    Ok(Outcome {
        seed: cfg.scenario.master_seed,
        text,
        json: to_json(&output),
    })
}

#[derive(Debug, Serialize)]
pub struct NavRow {
    pub price: f64,
    pub nav_per_share: f64,
    pub discount: f64,
    pub shares_bought: f64,
    pub pct_of_outstanding: f64,
    pub new_nav_per_share: f64,
}

pub fn nav_rows(a: &NavArgs) -> CliResult<Vec<NavRow>> {
    a.prices
        .iter()
        .map(|&price| {
            let state = TrustState {
                asset_value: a.assets,
                shares_out: a.shares,
                price,
            };
            let o = buyback_outcome(&state, a.spend, price)?;
            Ok(NavRow {
                price,
                nav_per_share: nav_per_share(&state),
                discount: discount(&state),
                shares_bought: o.shares_bought,
                pct_of_outstanding: o.pct_of_outstanding,
                new_nav_per_share: o.new_nav_per_share,
            })
        })
        .collect()
}

pub fn nav_text(rows: &[NavRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>8} {:>8} {:>9} {:>14} {:>10} {:>9}",
        "price", "nav", "discount", "shares bought", "% out", "new nav"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>8.2} {:>8.4} {:>8.1}% {:>14.0} {:>9.2}% {:>9.4}",
            r.price,
            r.nav_per_share,
            100.0 * r.discount,
            r.shares_bought,
            100.0 * r.pct_of_outstanding,
            r.new_nav_per_share
        );
    }
    s
}

pub fn write_nav_csv(w: &mut impl std::io::Write, rows: &[NavRow]) -> CliResult<usize> {
    let data: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.price.to_string(),
                r.nav_per_share.to_string(),
                r.discount.to_string(),
                r.shares_bought.to_string(),
                r.pct_of_outstanding.to_string(),
                r.new_nav_per_share.to_string(),
            ]
        })
        .collect();
    csv_table(
        w,
        &["price", "nav_per_share", "discount", "shares_bought", "pct_of_outstanding", "new_nav_per_share"],
        &data,
    )
}

pub fn nav(_g: &GlobalArgs, a: &NavArgs, out: &mut OutDir) -> CliResult<Outcome> {
    let rows = nav_rows(a)?;
    out.write("nav_table.csv", |w| write_nav_csv(w, &rows))?;
    out.json("nav.json", &rows)?;
    let text = nav_text(&rows);
    Ok(Outcome {
        seed: 0,
        text,
        json: to_json(&rows),
    })
}

/// Writes `text` to stdout, ignoring a closed pipe.
pub fn print(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}
