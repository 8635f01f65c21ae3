//! Execution benchmarks: the arithmetic mean of daily VWAPs used by
//! broker contracts, the volume-weighted institutional VWAP, and TWAP.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::market::{csv_err, PricePath};
use crate::strategies::TradeBlotter;

/// Unweighted mean of daily VWAPs.
pub fn bogus_benchmark(daily_vwaps: &[f64]) -> Result<f64> {
    if daily_vwaps.is_empty() {
        return Err(LabError::Domain("benchmark over an empty window".into()));
    }
    if let Some(bad) = daily_vwaps.iter().find(|p| !(**p > 0.0)) {
        return Err(LabError::Domain(format!("non-positive daily vwap {bad}")));
    }
    Ok(daily_vwaps.iter().sum::<f64>() / daily_vwaps.len() as f64)
}

/// Volume-weighted mean of daily VWAPs over `(vwap, volume)` pairs.
pub fn institutional_vwap(days: &[(f64, f64)]) -> Result<f64> {
    if days.is_empty() {
        return Err(LabError::Domain("benchmark over an empty window".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(p, v) in days {
        if !(v > 0.0) {
            return Err(LabError::Domain(format!("non-positive volume {v}")));
        }
        num += p * v;
        den += v;
    }
    if !(den > 0.0) {
        return Err(LabError::Domain("zero total volume".into()));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPoint {
    pub day_index: usize,
    pub bogus: f64,
    pub institutional: f64,
    pub twap: f64,
}

/// Prefix benchmarks over days `0..=t` for every `t` of the path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSeries {
    pub points: Vec<BenchmarkPoint>,
}

impl BenchmarkSeries {
    pub fn from_path(path: &PricePath) -> Self {
        let mut sum_vwap = 0.0;
        let mut sum_pv = 0.0;
        let mut sum_v = 0.0;
        let mut sum_close = 0.0;
        let points = path
            .days
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let n = (i + 1) as f64;
                sum_vwap += d.vwap;
                sum_pv += d.vwap * d.volume;
                sum_v += d.volume;
                sum_close += d.close;
                BenchmarkPoint {
                    day_index: d.day_index,
                    bogus: sum_vwap / n,
                    institutional: sum_pv / sum_v,
                    twap: sum_close / n,
                }
            })
            .collect();
        BenchmarkSeries { points }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<usize> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["day_index", "bogus", "institutional", "twap"])
            .map_err(csv_err)?;
        for p in &self.points {
            out.write_record([
                p.day_index.to_string(),
                p.bogus.to_string(),
                p.institutional.to_string(),
                p.twap.to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(self.points.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurchaseStats {
    pub gross_value: f64,
    pub shares: f64,
    pub avg_price: f64,
    /// `(benchmark - avg_price) / benchmark`; positive means bought below.
    pub outperformance: f64,
}

/// Average purchase price is value over shares, so value-sized tranches
/// average harmonically in price.
pub fn purchase_stats(blotter: &TradeBlotter, benchmark: f64) -> Result<PurchaseStats> {
    if blotter.rows.is_empty() {
        return Err(LabError::Domain("empty blotter".into()));
    }
    let gross_value: f64 = blotter.rows.iter().map(|r| r.value).sum();
    let shares: f64 = blotter.rows.iter().map(|r| r.shares).sum();
    stats_from_totals(gross_value, shares, benchmark)
}

pub(crate) fn stats_from_totals(gross_value: f64, shares: f64, benchmark: f64) -> Result<PurchaseStats> {
    if !(shares > 0.0) {
        return Err(LabError::Domain("no shares executed".into()));
    }
    if !(benchmark > 0.0) {
        return Err(LabError::Domain(format!("non-positive benchmark {benchmark}")));
    }
    let avg_price = gross_value / shares;
    Ok(PurchaseStats {
        gross_value,
        shares,
        avg_price,
        outperformance: (benchmark - avg_price) / benchmark,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::BlotterRow;
    use proptest::prelude::*;

    #[test]
    fn bogus_examples() {
        assert_eq!(bogus_benchmark(&[100.0]).unwrap(), 100.0);
        assert_eq!(bogus_benchmark(&[100.0, 110.0, 120.0]).unwrap(), 110.0);
        assert!(bogus_benchmark(&[]).is_err());
    }

    #[test]
    fn institutional_examples() {
        assert_eq!(institutional_vwap(&[(100.0, 5e6)]).unwrap(), 100.0);
        // (100*1 + 110*1 + 120*8) / 10 = 117
        let inst =
            institutional_vwap(&[(100.0, 1e6), (110.0, 1e6), (120.0, 8e6)]).unwrap();
        assert!((inst - 117.0).abs() < 1e-12);
        assert!(institutional_vwap(&[]).is_err());
        assert!(institutional_vwap(&[(100.0, 0.0)]).is_err());
    }

    fn single_fill(shares: f64, price: f64) -> TradeBlotter {
        TradeBlotter {
            rows: vec![BlotterRow {
                day_index: 0,
                shares,
                value: shares * price,
                fill_price: price,
            }],
            target_value: shares * price,
            max_days: 1,
            completed: true,
            completion_day: 1,
            diagnostic: None,
        }
    }

    #[test]
    fn purchase_stats_examples() {
        let s = purchase_stats(&single_fill(1000.0, 50.0), 50.0).unwrap();
        assert_eq!(s.outperformance, 0.0);
        let s = purchase_stats(&single_fill(1000.0, 91.8), 100.0).unwrap();
        assert!((s.outperformance - 0.082).abs() < 1e-12);
        let s = purchase_stats(&single_fill(1000.0, 99.0), 100.0).unwrap();
        assert!((s.outperformance - 0.01).abs() < 1e-12);
        assert!(purchase_stats(&single_fill(0.0, 99.0), 100.0).is_err());
    }

    proptest! {
        #[test]
        fn equal_volume_identity(vwaps in prop::collection::vec(1.0f64..500.0, 1..60), vol in 1.0f64..1e7) {
            let days: Vec<_> = vwaps.iter().map(|&p| (p, vol)).collect();
            let a = bogus_benchmark(&vwaps).unwrap();
            let b = institutional_vwap(&days).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }

        #[test]
        fn benchmarks_bounded(rows in prop::collection::vec((1.0f64..500.0, 1.0f64..1e7), 1..60)) {
            let vwaps: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let lo = vwaps.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vwaps.iter().cloned().fold(0.0, f64::max);
            let tol = 1e-12 * hi;
            let b = bogus_benchmark(&vwaps).unwrap();
            let i = institutional_vwap(&rows).unwrap();
            prop_assert!(b >= lo - tol && b <= hi + tol);
            prop_assert!(i >= lo - tol && i <= hi + tol);
        }

        #[test]
        fn appending_above_mean_raises_it(vwaps in prop::collection::vec(1.0f64..500.0, 1..60), bump in 0.01f64..100.0) {
            let m = bogus_benchmark(&vwaps).unwrap();
            let mut up = vwaps.clone();
            up.push(m + bump);
            prop_assert!(bogus_benchmark(&up).unwrap() > m);
            let mut down = vwaps.clone();
            down.push((m - bump).max(m * 0.5));
            prop_assert!(bogus_benchmark(&down).unwrap() < m);
        }

        #[test]
        fn outperformance_scale_free(price in 1.0f64..500.0, bench in 1.0f64..500.0, k in 0.01f64..100.0) {
            let a = purchase_stats(&single_fill(10.0, price), bench).unwrap();
            let b = purchase_stats(&single_fill(10.0, price * k), bench * k).unwrap();
            prop_assert!((a.outperformance - b.outperformance).abs() < 1e-12);
        }
    }
}
