//! Seedable daily market paths under geometric Brownian motion.
//!
//! Each path carries a daily close, a daily VWAP and a daily volume. Draws
//! for day `t` of path `k` come from ChaCha8 stream `k` positioned at a
//! fixed offset derived from `t`, so a day's shocks depend only on
//! `(master_seed, path_index, day_index)` and never on evaluation order.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// 32-bit words reserved per simulated day inside a path stream. Three
/// ziggurat normals need a handful of words; the budget is far larger.
const WORDS_PER_DAY: u128 = 1 << 12;

fn default_days_per_year() -> u32 {
    250
}

/// Parameter switch applied from `from_day` onward, for stress paths such
/// as a volatility collapse or a sell-off followed by a rally. Unset
/// fields keep the base value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeShift {
    pub from_day: usize,
    #[serde(default)]
    pub sigma_annual: Option<f64>,
    #[serde(default)]
    pub drift_annual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub initial_price: f64,
    pub sigma_annual: f64,
    #[serde(default)]
    pub drift_annual: f64,
    #[serde(default = "default_days_per_year")]
    pub trading_days_per_year: u32,
    pub horizon_days: usize,
    pub adv_shares: f64,
    #[serde(default)]
    pub volume_sigma: f64,
    #[serde(default)]
    pub intraday_noise_sigma: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub regime_shift: Option<RegimeShift>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            initial_price: 100.0,
            sigma_annual: 0.35,
            drift_annual: 0.0,
            trading_days_per_year: 250,
            horizon_days: 125,
            adv_shares: 1_000_000.0,
            volume_sigma: 0.25,
            intraday_noise_sigma: 0.0,
            master_seed: 0,
            regime_shift: None,
        }
    }
}

fn finite_nonneg(field: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(LabError::config(field, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_price.is_finite() && self.initial_price > 0.0) {
            return Err(LabError::config(
                "initial_price",
                format!("must be > 0, got {}", self.initial_price),
            ));
        }
        finite_nonneg("sigma_annual", self.sigma_annual)?;
        if !self.drift_annual.is_finite() {
            return Err(LabError::config("drift_annual", "must be finite"));
        }
        if self.trading_days_per_year == 0 {
            return Err(LabError::config("trading_days_per_year", "must be positive"));
        }
        if self.horizon_days == 0 {
            return Err(LabError::config("horizon_days", "must be >= 1"));
        }
        if !(self.adv_shares.is_finite() && self.adv_shares > 0.0) {
            return Err(LabError::config(
                "adv_shares",
                format!("must be > 0, got {}", self.adv_shares),
            ));
        }
        finite_nonneg("volume_sigma", self.volume_sigma)?;
        finite_nonneg("intraday_noise_sigma", self.intraday_noise_sigma)?;
        if let Some(shift) = self.regime_shift {
            if let Some(sigma) = shift.sigma_annual {
                finite_nonneg("regime_shift.sigma_annual", sigma)?;
            }
            if shift.drift_annual.is_some_and(|d| !d.is_finite()) {
                return Err(LabError::config("regime_shift.drift_annual", "must be finite"));
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        1.0 / f64::from(self.trading_days_per_year)
    }

    /// `(drift, sigma)` in force on `day`.
    fn params_on(&self, day: usize) -> (f64, f64) {
        match self.regime_shift {
            Some(s) if day >= s.from_day => (
                s.drift_annual.unwrap_or(self.drift_annual),
                s.sigma_annual.unwrap_or(self.sigma_annual),
            ),
            _ => (self.drift_annual, self.sigma_annual),
        }
    }

    /// Parses a scenario from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| LabError::config("<file>", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Stable 64-bit FNV-1a digest of the scenario's canonical TOML form.
    pub fn digest(&self) -> String {
        let canonical = toml::to_string(self).unwrap_or_default();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canonical.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketDay {
    pub day_index: usize,
    pub close: f64,
    pub vwap: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricePath {
    pub config_digest: String,
    /// Close before day 0; the "previous close" seen by day-0 decisions.
    pub open: f64,
    pub days: Vec<MarketDay>,
}

impl PricePath {
    /// Builds a path from explicit `(close, vwap, volume)` rows.
    pub fn from_rows(open: f64, rows: &[(f64, f64, f64)]) -> Result<Self> {
        if !(open > 0.0) {
            return Err(LabError::config("open", "must be > 0"));
        }
        if rows.is_empty() {
            return Err(LabError::config("days", "path needs at least one day"));
        }
        let mut days = Vec::with_capacity(rows.len());
        for (i, &(close, vwap, volume)) in rows.iter().enumerate() {
            if !(close > 0.0 && vwap > 0.0 && volume > 0.0) {
                return Err(LabError::config(
                    "days",
                    format!("day {i}: close, vwap and volume must be > 0"),
                ));
            }
            days.push(MarketDay {
                day_index: i,
                close,
                vwap,
                volume,
            });
        }
        Ok(PricePath {
            config_digest: "manual".to_string(),
            open,
            days,
        })
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// Close observed before day `t` trades.
    pub fn prev_close(&self, t: usize) -> f64 {
        if t == 0 {
            self.open
        } else {
            self.days[t - 1].close
        }
    }

    pub fn vwaps(&self) -> Vec<f64> {
        self.days.iter().map(|d| d.vwap).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<usize> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["day_index", "close", "vwap", "volume"])
            .map_err(csv_err)?;
        for d in &self.days {
            out.write_record([
                d.day_index.to_string(),
                d.close.to_string(),
                d.vwap.to_string(),
                d.volume.to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(self.days.len())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> LabError {
    LabError::Io(e.to_string())
}

/// Generates path `path_index` of the scenario.
pub fn generate_path(config: &ScenarioConfig, path_index: u64) -> Result<PricePath> {
    config.validate()?;
    let dt = config.dt();
    let sqrt_dt = dt.sqrt();
    let mut days = Vec::with_capacity(config.horizon_days);
    let mut prev = config.initial_price;
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(path_index);
    for t in 0..config.horizon_days {
        rng.set_word_pos(t as u128 * WORDS_PER_DAY);
        let eps: f64 = rng.sample(StandardNormal);
        let eta: f64 = rng.sample(StandardNormal);
        let nu: f64 = rng.sample(StandardNormal);
        let (mu, sigma) = config.params_on(t);
        let close = prev * ((mu - 0.5 * sigma * sigma) * dt + sigma * sqrt_dt * eps).exp();
        let vwap = (prev * close).sqrt() * (config.intraday_noise_sigma * eta).exp();
        let volume = config.adv_shares * (config.volume_sigma * nu).exp();
        days.push(MarketDay {
            day_index: t,
            close,
            vwap,
            volume,
        });
        prev = close;
    }
    Ok(PricePath {
        config_digest: config.digest(),
        open: config.initial_price,
        days,
    })
}

/// Terminal price ratio `S_T / S_0` of path `path_index`, without storing
/// the path. Uses the same draws as [`generate_path`].
pub fn terminal_ratio(config: &ScenarioConfig, path_index: u64) -> f64 {
    let dt = config.dt();
    let sqrt_dt = dt.sqrt();
    let mut log_ret = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(path_index);
    for t in 0..config.horizon_days {
        rng.set_word_pos(t as u128 * WORDS_PER_DAY);
        let eps: f64 = rng.sample(StandardNormal);
        let (mu, sigma) = config.params_on(t);
        log_ret += (mu - 0.5 * sigma * sigma) * dt + sigma * sqrt_dt * eps;
    }
    log_ret.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig {
            horizon_days: 50,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn zero_vol_is_flat() {
        let c = ScenarioConfig {
            sigma_annual: 0.0,
            horizon_days: 40,
            ..cfg()
        };
        let p = generate_path(&c, 3).unwrap();
        assert_eq!(p.len(), 40);
        for d in &p.days {
            assert_eq!(d.close, 100.0);
            assert_eq!(d.vwap, 100.0);
        }
    }

    #[test]
    fn rejects_bad_fields_by_name() {
        let c = ScenarioConfig {
            initial_price: -1.0,
            ..cfg()
        };
        match generate_path(&c, 0) {
            Err(LabError::Config { field, .. }) => assert_eq!(field, "initial_price"),
            other => panic!("unexpected {other:?}"),
        }
        let c = ScenarioConfig {
            horizon_days: 0,
            ..cfg()
        };
        assert!(matches!(
            c.validate(),
            Err(LabError::Config { field: "horizon_days", .. })
        ));
        let c = ScenarioConfig {
            adv_shares: 0.0,
            ..cfg()
        };
        assert!(matches!(
            c.validate(),
            Err(LabError::Config { field: "adv_shares", .. })
        ));
    }

    #[test]
    fn deterministic_csv_bytes() {
        let a = generate_path(&cfg(), 7).unwrap();
        let b = generate_path(&cfg(), 7).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        a.write_csv(&mut x).unwrap();
        b.write_csv(&mut y).unwrap();
        assert_eq!(x, y);
        assert_ne!(a, generate_path(&cfg(), 8).unwrap());
    }

    #[test]
    fn terminal_ratio_matches_path() {
        let c = cfg();
        let p = generate_path(&c, 11).unwrap();
        let r = terminal_ratio(&c, 11);
        let expect = p.days.last().unwrap().close / c.initial_price;
        assert!((r - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn vwap_between_adjacent_closes_without_noise() {
        let p = generate_path(&cfg(), 1).unwrap();
        for t in 0..p.len() {
            let (a, b) = (p.prev_close(t), p.days[t].close);
            let v = p.days[t].vwap;
            assert!(v >= a.min(b) * (1.0 - 1e-12) && v <= a.max(b) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn toml_roundtrip_and_unknown_field() {
        let text = r#"
            initial_price = 50.0
            sigma_annual = 0.2
            horizon_days = 10
            adv_shares = 1e6
            trading_days_per_year = 252
            master_seed = 42
        "#;
        let c = ScenarioConfig::from_toml_str(text).unwrap();
        assert_eq!(c.trading_days_per_year, 252);
        assert_eq!(c.master_seed, 42);
        assert!(ScenarioConfig::from_toml_str("bogus = 1\n").is_err());
        let bad = text.replace("adv_shares = 1e6", "adv_shares = -5.0");
        assert!(matches!(
            ScenarioConfig::from_toml_str(&bad),
            Err(LabError::Config { field: "adv_shares", .. })
        ));
    }

    #[test]
    fn regime_shift_collapses_moves() {
        let c = ScenarioConfig {
            regime_shift: Some(RegimeShift {
                from_day: 10,
                sigma_annual: Some(0.0),
                drift_annual: None,
            }),
            ..cfg()
        };
        let p = generate_path(&c, 2).unwrap();
        for t in 11..p.len() {
            assert_eq!(p.days[t].close, p.days[10].close);
        }
    }
}
