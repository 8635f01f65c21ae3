//! Forensics on daily buy-back disclosure tapes.
//!
//! A tape lists what the issuer bought each day. From it, plus a few
//! analyst inputs (allowed window length, amount reported as returned to
//! shareholders), this module rebuilds the average price, the
//! mean-of-daily-VWAPs benchmark, outperformance, the fee implied by the
//! reported total, and the marginal effects that drive a benchmark-paid
//! broker's next decision.
//!
//! # Tape format (version 1)
//!
//! ```text
//! # buyback-tape v1
//! # any other comment lines
//! date,shares,value,market_vwap,market_volume
//! 2023-01-03,120000,2400000.00,19.95,6000000
//! ```
//!
//! `date` (YYYY-MM-DD, strictly increasing) and `shares` are required, as
//! is one of `avg_price` or `value`. `market_vwap` and `market_volume` are
//! optional and needed only for benchmark metrics. Leading `#` lines are
//! comments; a `# buyback-tape vN` line declares the format version.
//!
//! # Marginal effects at a snapshot
//!
//! With `f` the executed fraction of the target, `A` the average price,
//! `B` the benchmark over `d` elapsed days and `p` the latest price:
//!
//! * one more day at `p` lowers the benchmark by `(B - p) / ((d + 1) B)`;
//! * buying a further `delta` of the target at `p` moves the average to
//!   `A' = (f + delta) / (f / A + delta / p)`;
//! * outperformance then moves from `1 - A/B` to `1 - A'/B`.

use std::fmt::Write as _;
use std::io::Write;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::benchmarks::{bogus_benchmark, institutional_vwap, stats_from_totals};
use crate::error::{LabError, Result};
use crate::fees::{cost_breakdown, CostBreakdown, FeeTerms, TaxTerms};
use crate::market::csv_err;
use crate::strategies::TradeBlotter;

pub const TAPE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisclosureRecord {
    pub trade_date: NaiveDate,
    pub shares: f64,
    pub avg_price: f64,
    pub value: f64,
    pub daily_market_vwap: Option<f64>,
    pub daily_market_volume: Option<f64>,
}

fn tape_err(line: u64, reason: impl Into<String>) -> LabError {
    LabError::Tape {
        line,
        reason: reason.into(),
    }
}

fn parse_num(field: &str, raw: &str, line: u64) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| tape_err(line, format!("{field}: cannot parse `{raw}` as a number")))?;
    if !v.is_finite() {
        return Err(tape_err(line, format!("{field}: not finite")));
    }
    Ok(v)
}

fn parse_positive(field: &str, raw: &str, line: u64) -> Result<f64> {
    let v = parse_num(field, raw, line)?;
    if v <= 0.0 {
        return Err(tape_err(line, format!("{field} must be > 0, got {v}")));
    }
    Ok(v)
}

/// Parses and validates a tape.
pub fn parse_tape(text: &str) -> Result<Vec<DisclosureRecord>> {
    let mut skipped = 0u64;
    for line in text.lines() {
        let t = line.trim();
        if let Some(comment) = t.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("buyback-tape v") {
                let version: u32 = v
                    .trim()
                    .parse()
                    .map_err(|_| tape_err(skipped + 1, format!("bad version tag `{t}`")))?;
                if version != TAPE_VERSION {
                    return Err(tape_err(
                        skipped + 1,
                        format!("unsupported tape version {version} (expected {TAPE_VERSION})"),
                    ));
                }
            }
            skipped += 1;
        } else if t.is_empty() {
            skipped += 1;
        } else {
            break;
        }
    }
    let body: String = text
        .lines()
        .skip(skipped as usize)
        .map(|l| format!("{l}\n"))
        .collect();
    if body.trim().is_empty() {
        return Err(LabError::EmptyTape);
    }

    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let header_line = skipped + 1;
    let headers = rdr
        .headers()
        .map_err(|e| tape_err(header_line, e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let date_i = col("date").ok_or_else(|| tape_err(header_line, "missing required column `date`"))?;
    let shares_i =
        col("shares").ok_or_else(|| tape_err(header_line, "missing required column `shares`"))?;
    let price_i = col("avg_price");
    let value_i = col("value");
    if price_i.is_none() && value_i.is_none() {
        return Err(tape_err(header_line, "need one of `avg_price` or `value` columns"));
    }
    let vwap_i = col("market_vwap");
    let vol_i = col("market_volume");

    let mut out: Vec<DisclosureRecord> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line()) + skipped;
            tape_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line()) + skipped;
        let get = |i: usize| rec.get(i).unwrap_or("");
        let trade_date = NaiveDate::parse_from_str(get(date_i), "%Y-%m-%d")
            .map_err(|_| tape_err(line, format!("date: cannot parse `{}`", get(date_i))))?;
        let shares = parse_positive("shares", get(shares_i), line)?;
        let opt = |i: Option<usize>| i.map(get).filter(|s| !s.is_empty());
        let (avg_price, value) = match (opt(price_i), opt(value_i)) {
            (Some(p), _) => {
                let p = parse_positive("avg_price", p, line)?;
                (p, p * shares)
            }
            (None, Some(v)) => {
                let v = parse_positive("value", v, line)?;
                (v / shares, v)
            }
            (None, None) => return Err(tape_err(line, "row has neither avg_price nor value")),
        };
        let daily_market_vwap = opt(vwap_i)
            .map(|s| parse_positive("market_vwap", s, line))
            .transpose()?;
        let daily_market_volume = opt(vol_i)
            .map(|s| parse_positive("market_volume", s, line))
            .transpose()?;
        if let Some(prev) = out.last() {
            if trade_date <= prev.trade_date {
                return Err(tape_err(
                    line,
                    format!("date {trade_date} not after previous {}", prev.trade_date),
                ));
            }
        }
        out.push(DisclosureRecord {
            trade_date,
            shares,
            avg_price,
            value,
            daily_market_vwap,
            daily_market_volume,
        });
    }
    if out.is_empty() {
        return Err(LabError::EmptyTape);
    }
    Ok(out)
}

/// Builds the tape a strategy run would have disclosed, one row per day
/// with a purchase, dated on consecutive weekdays from `start`.
pub fn tape_from_blotter(
    blotter: &TradeBlotter,
    path: &crate::market::PricePath,
    start: NaiveDate,
) -> Vec<DisclosureRecord> {
    let dates = weekdays_from(start, blotter.rows.len());
    blotter
        .rows
        .iter()
        .zip(dates)
        .filter(|(r, _)| r.shares > 0.0)
        .map(|(r, date)| {
            let day = &path.days[r.day_index];
            DisclosureRecord {
                trade_date: date,
                shares: r.shares,
                avg_price: r.fill_price,
                value: r.value,
                daily_market_vwap: Some(day.vwap),
                daily_market_volume: Some(day.volume),
            }
        })
        .collect()
}

pub fn write_tape_csv<W: Write>(tape: &[DisclosureRecord], w: W) -> Result<usize> {
    let mut w = w;
    writeln!(w, "# buyback-tape v{TAPE_VERSION}")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["date", "shares", "value", "market_vwap", "market_volume"])
        .map_err(csv_err)?;
    for r in tape {
        out.write_record([
            r.trade_date.to_string(),
            r.shares.to_string(),
            r.value.to_string(),
            r.daily_market_vwap.map(|v| v.to_string()).unwrap_or_default(),
            r.daily_market_volume.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(tape.len())
}

fn is_weekday(d: NaiveDate) -> bool {
    !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

fn weekdays_from(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    start
        .iter_days()
        .filter(|d| is_weekday(*d))
        .take(n)
        .collect()
}

/// Weekday ordinal of `date` counted from `start` (start is day 1).
fn trading_day_number(start: NaiveDate, date: NaiveDate) -> usize {
    start
        .iter_days()
        .take_while(|d| *d <= date)
        .filter(|d| is_weekday(*d))
        .count()
        .max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpliedFee {
    pub fee: f64,
    pub fee_pct: f64,
    /// Total friction `total_returned - gross`, before removing stamp duty.
    pub total_friction: f64,
    pub stamp: f64,
    pub negative: bool,
}

/// Fee implied by the amount reported as returned, after stamp duty on
/// gross purchases.
pub fn implied_fee(total_returned: f64, gross_value: f64, stamp_bps: f64) -> Result<ImpliedFee> {
    if !(gross_value > 0.0) {
        return Err(LabError::Domain("gross value must be > 0".into()));
    }
    if total_returned < gross_value {
        return Err(LabError::Domain(format!(
            "reported total {total_returned} below gross purchases {gross_value}"
        )));
    }
    let stamp = gross_value * stamp_bps / 1e4;
    let fee = total_returned - gross_value - stamp;
    Ok(ImpliedFee {
        fee,
        fee_pct: fee / gross_value,
        total_friction: total_returned - gross_value,
        stamp,
        negative: fee < 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditSnapshot {
    pub pct_value_executed: f64,
    pub pct_time_expired: f64,
    pub elapsed_days: usize,
    pub total_allowed_days: usize,
    pub avg_price: f64,
    pub benchmark: f64,
    pub outperformance: f64,
    pub last_price: f64,
}

impl AuditSnapshot {
    /// Snapshot from reported ratios, normalized to a benchmark of 1.
    /// Elapsed days are `round(pct_time * N)`.
    pub fn from_reported(
        pct_value_executed: f64,
        pct_time_expired: f64,
        total_allowed_days: usize,
        outperformance: f64,
        price_to_benchmark: f64,
    ) -> Self {
        AuditSnapshot {
            pct_value_executed,
            pct_time_expired,
            elapsed_days: (pct_time_expired * total_allowed_days as f64).round() as usize,
            total_allowed_days,
            avg_price: 1.0 - outperformance,
            benchmark: 1.0,
            outperformance,
            last_price: price_to_benchmark,
        }
    }
}

/// A marginal effect plus whether it helps a broker paid on
/// outperformance of the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub value: f64,
    pub broker_favorable: bool,
}

/// Benchmark decline from one more day at the latest price, as a fraction
/// of the benchmark: positive when the benchmark falls. A falling
/// benchmark erodes outperformance, so it is broker-favorable only when
/// negative.
pub fn benchmark_day_sensitivity(s: &AuditSnapshot) -> Result<Effect> {
    if s.elapsed_days < 1 {
        return Err(LabError::Domain("need at least one elapsed day".into()));
    }
    let d = s.elapsed_days as f64;
    let decline = (s.benchmark - s.last_price) / ((d + 1.0) * s.benchmark);
    Ok(Effect {
        value: decline,
        broker_favorable: decline < 0.0,
    })
}

fn avg_after(s: &AuditSnapshot, delta: f64) -> f64 {
    let f = s.pct_value_executed;
    (f + delta) / (f / s.avg_price + delta / s.last_price)
}

/// Relative fall in the average price from buying `delta` more of the
/// target at the latest price. Positive means a cheaper average.
pub fn avg_price_sensitivity(s: &AuditSnapshot, delta: f64) -> Result<Effect> {
    if !(s.pct_value_executed > 0.0) {
        return Err(LabError::Domain("nothing executed yet".into()));
    }
    let improvement = (s.avg_price - avg_after(s, delta)) / s.avg_price;
    Ok(Effect {
        value: improvement,
        broker_favorable: improvement > 0.0,
    })
}

/// Relative change in outperformance from buying `delta` more of the
/// target at the latest price, benchmark held fixed.
pub fn performance_sensitivity(s: &AuditSnapshot, delta: f64) -> Result<Effect> {
    if !(s.pct_value_executed > 0.0) {
        return Err(LabError::Domain("nothing executed yet".into()));
    }
    let o = 1.0 - s.avg_price / s.benchmark;
    if o == 0.0 {
        return Err(LabError::Domain(
            "sensitivity undefined at zero outperformance".into(),
        ));
    }
    let o_new = 1.0 - avg_after(s, delta) / s.benchmark;
    let rel = (o_new - o) / o;
    Ok(Effect {
        value: rel,
        broker_favorable: o_new > o,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivities {
    pub benchmark_one_day: Effect,
    pub avg_price_one_pct: Effect,
    pub performance_one_pct: Effect,
}

pub fn sensitivities(s: &AuditSnapshot) -> Result<Sensitivities> {
    Ok(Sensitivities {
        benchmark_one_day: benchmark_day_sensitivity(s)?,
        avg_price_one_pct: avg_price_sensitivity(s, 0.01)?,
        performance_one_pct: performance_sensitivity(s, 0.01)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionProfile {
    /// `(pct_time, pct_value)`, starting at `(0, 0)`.
    pub points: Vec<(f64, f64)>,
    /// Time fraction at which the target was reached, if it was.
    pub completion_pct_time: Option<f64>,
}

/// Cumulative value fraction against fraction of the allowed window.
/// `target_value` defaults to the tape's gross value.
pub fn completion_profile(
    tape: &[DisclosureRecord],
    total_allowed_days: usize,
    target_value: Option<f64>,
) -> Result<CompletionProfile> {
    if tape.is_empty() {
        return Err(LabError::EmptyTape);
    }
    if total_allowed_days == 0 {
        return Err(LabError::Parameter("total_allowed_days must be >= 1".into()));
    }
    let gross: f64 = tape.iter().map(|r| r.value).sum();
    let target = target_value.unwrap_or(gross);
    let start = tape[0].trade_date;
    let n = total_allowed_days as f64;
    let mut points = vec![(0.0, 0.0)];
    let mut cum = 0.0;
    let mut completion = None;
    for r in tape {
        cum += r.value;
        let day = trading_day_number(start, r.trade_date) as f64;
        let pv = cum / target;
        points.push((day / n, pv));
        if completion.is_none() && pv >= 1.0 - 1e-9 {
            completion = Some(day / n);
        }
    }
    Ok(CompletionProfile {
        points,
        completion_pct_time: completion,
    })
}

impl CompletionProfile {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<usize> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["pct_time", "pct_value"]).map_err(csv_err)?;
        for (t, v) in &self.points {
            out.write_record([(100.0 * t).to_string(), (100.0 * v).to_string()])
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(self.points.len())
    }
}

/// Snapshot on the first tape day where the executed fraction reaches
/// `fraction` of the target. Needs market VWAPs on every row up to then.
pub fn snapshot_at_fraction(
    tape: &[DisclosureRecord],
    total_allowed_days: usize,
    target_value: f64,
    fraction: f64,
) -> Result<AuditSnapshot> {
    let start = tape.first().ok_or(LabError::EmptyTape)?.trade_date;
    let (mut value, mut shares) = (0.0, 0.0);
    let mut vwaps = Vec::new();
    for r in tape {
        value += r.value;
        shares += r.shares;
        vwaps.push(r.daily_market_vwap.ok_or_else(|| {
            LabError::Domain(format!("{}: market_vwap needed for benchmark", r.trade_date))
        })?);
        let f = value / target_value;
        if f >= fraction - 1e-12 {
            let benchmark = bogus_benchmark(&vwaps)?;
            let stats = stats_from_totals(value, shares, benchmark)?;
            let elapsed = trading_day_number(start, r.trade_date);
            return Ok(AuditSnapshot {
                pct_value_executed: f,
                pct_time_expired: elapsed as f64 / total_allowed_days as f64,
                elapsed_days: elapsed,
                total_allowed_days,
                avg_price: stats.avg_price,
                benchmark,
                outperformance: stats.outperformance,
                last_price: *vwaps.last().expect("non-empty"),
            });
        }
    }
    Err(LabError::Domain(format!(
        "tape never reaches {:.1}% of target",
        100.0 * fraction
    )))
}

/// Analyst inputs that do not appear on the tape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditInputs {
    pub total_allowed_days: usize,
    /// Amount reported as returned to shareholders including costs.
    #[serde(default)]
    pub total_returned: Option<f64>,
    #[serde(default)]
    pub stamp_bps: f64,
    /// Program size; defaults to the tape's gross value.
    #[serde(default)]
    pub target_value: Option<f64>,
    /// Executed fraction at which to take the snapshot.
    #[serde(default = "default_snapshot_fraction")]
    pub snapshot_fraction: f64,
    /// Contract terms to price against the measured outperformance.
    #[serde(default)]
    pub fee_terms: Option<FeeTerms>,
    /// Fees paid outside the allocated capital (reporting flag only).
    #[serde(default)]
    pub fee_paid_separately: bool,
}

fn default_snapshot_fraction() -> f64 {
    0.9
}

impl AuditInputs {
    pub fn new(total_allowed_days: usize) -> Self {
        AuditInputs {
            total_allowed_days,
            total_returned: None,
            stamp_bps: 0.0,
            target_value: None,
            snapshot_fraction: default_snapshot_fraction(),
            fee_terms: None,
            fee_paid_separately: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub rows: usize,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    pub gross_value: f64,
    pub shares: f64,
    pub avg_price: f64,
    pub bogus_benchmark: Option<f64>,
    pub institutional_vwap: Option<f64>,
    pub outperformance: Option<f64>,
    pub implied_fee: Option<ImpliedFee>,
    pub fee_paid_separately: bool,
    pub contract_costs: Option<CostBreakdown>,
    pub completion_pct_time: Option<f64>,
    pub snapshot: Option<AuditSnapshot>,
    pub sensitivities: Option<Sensitivities>,
    pub notes: Vec<String>,
}

pub fn audit_tape(tape: &[DisclosureRecord], inputs: &AuditInputs) -> Result<AuditReport> {
    let first = tape.first().ok_or(LabError::EmptyTape)?;
    let last = tape.last().expect("non-empty");
    let gross_value: f64 = tape.iter().map(|r| r.value).sum();
    let shares: f64 = tape.iter().map(|r| r.shares).sum();
    let target = inputs.target_value.unwrap_or(gross_value);
    let mut notes = Vec::new();

    let vwaps: Option<Vec<f64>> = tape.iter().map(|r| r.daily_market_vwap).collect();
    let bogus = vwaps.as_deref().map(bogus_benchmark).transpose()?;
    let inst = tape
        .iter()
        .map(|r| Some((r.daily_market_vwap?, r.daily_market_volume?)))
        .collect::<Option<Vec<_>>>()
        .map(|d| institutional_vwap(&d))
        .transpose()?;
    if bogus.is_none() {
        notes.push("market_vwap missing on some rows: benchmark metrics skipped".into());
    }
    let outperformance = bogus
        .map(|b| stats_from_totals(gross_value, shares, b).map(|s| s.outperformance))
        .transpose()?;

    let fee = inputs
        .total_returned
        .map(|t| implied_fee(t, gross_value, inputs.stamp_bps))
        .transpose()?;
    if let Some(f) = &fee {
        if f.negative {
            notes.push(format!(
                "implied fee is negative ({:.2}): reported total is below gross plus stamp duty",
                f.fee
            ));
        }
    }
    let contract_costs = match (inputs.fee_terms, outperformance) {
        (Some(terms), Some(o)) => Some(cost_breakdown(
            gross_value,
            o * 1e4,
            &terms,
            &TaxTerms {
                stamp_bps: inputs.stamp_bps,
                excise_bps: 0.0,
            },
        )),
        _ => None,
    };

    let profile = completion_profile(tape, inputs.total_allowed_days, Some(target))?;
    let snapshot = if bogus.is_some() {
        match snapshot_at_fraction(tape, inputs.total_allowed_days, target, inputs.snapshot_fraction) {
            Ok(s) => Some(s),
            Err(e) => {
                notes.push(format!("no snapshot: {e}"));
                None
            }
        }
    } else {
        None
    };
    let sens = match snapshot.as_ref().map(sensitivities) {
        Some(Ok(s)) => Some(s),
        Some(Err(e)) => {
            notes.push(format!("no sensitivities: {e}"));
            None
        }
        None => None,
    };

    Ok(AuditReport {
        rows: tape.len(),
        first_date: first.trade_date,
        last_date: last.trade_date,
        gross_value,
        shares,
        avg_price: gross_value / shares,
        bogus_benchmark: bogus,
        institutional_vwap: inst,
        outperformance,
        implied_fee: fee,
        fee_paid_separately: inputs.fee_paid_separately,
        contract_costs,
        completion_pct_time: profile.completion_pct_time,
        snapshot,
        sensitivities: sens,
        notes,
    })
}

impl AuditReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let pct = |x: f64| format!("{:.2}%", 100.0 * x);
        let _ = writeln!(s, "tape rows            {}", self.rows);
        let _ = writeln!(s, "window               {} .. {}", self.first_date, self.last_date);
        let _ = writeln!(s, "gross value          {:.2}", self.gross_value);
        let _ = writeln!(s, "shares               {:.0}", self.shares);
        let _ = writeln!(s, "average price        {:.6}", self.avg_price);
        if let Some(b) = self.bogus_benchmark {
            let _ = writeln!(s, "mean daily vwap      {b:.6}");
        }
        if let Some(b) = self.institutional_vwap {
            let _ = writeln!(s, "volume-weighted vwap {b:.6}");
        }
        if let Some(o) = self.outperformance {
            let _ = writeln!(s, "outperformance       {}", pct(o));
        }
        if let Some(f) = &self.implied_fee {
            let _ = writeln!(s, "total friction       {:.2}", f.total_friction);
            let _ = writeln!(s, "stamp duty           {:.2}", f.stamp);
            let _ = writeln!(s, "implied fee          {:.2} ({})", f.fee, pct(f.fee_pct));
            if self.fee_paid_separately {
                let _ = writeln!(s, "                     (paid outside the allocated capital)");
            }
        }
        if let Some(c) = &self.contract_costs {
            let _ = writeln!(s, "contract fee         {:.2} ({:.1} bps)", c.fee, c.fee_bps_of_gross);
        }
        if let Some(t) = self.completion_pct_time {
            let _ = writeln!(s, "completed at         {} of allowed time", pct(t));
        }
        if let Some(sn) = &self.snapshot {
            let _ = writeln!(s, "snapshot             {} value, {} time (day {} of {})",
                pct(sn.pct_value_executed), pct(sn.pct_time_expired), sn.elapsed_days, sn.total_allowed_days);
            let _ = writeln!(s, "  outperformance     {}", pct(sn.outperformance));
            let _ = writeln!(s, "  price / benchmark  {}", pct(sn.last_price / sn.benchmark - 1.0));
        }
        if let Some(se) = &self.sensitivities {
            let fav = |e: &Effect| if e.broker_favorable { "broker-favorable" } else { "broker-unfavorable" };
            let _ = writeln!(s, "  +1 day on benchmark    {} ({})", pct(se.benchmark_one_day.value), fav(&se.benchmark_one_day));
            let _ = writeln!(s, "  +1% value on avg price {} ({})", pct(se.avg_price_one_pct.value), fav(&se.avg_price_one_pct));
            let _ = writeln!(s, "  +1% value on perf.     {} ({})", pct(se.performance_one_pct.value), fav(&se.performance_one_pct));
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}
