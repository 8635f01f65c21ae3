//! Investment-trust NAV arithmetic for buy-backs executed at a discount or
//! premium to net asset value.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustState {
    /// Holdings plus cash.
    pub asset_value: f64,
    pub shares_out: f64,
    pub price: f64,
}

impl TrustState {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("asset_value", self.asset_value),
            ("shares_out", self.shares_out),
            ("price", self.price),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(LabError::config(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn nav_per_share(state: &TrustState) -> f64 {
    state.asset_value / state.shares_out
}

/// `1 - price / nav`; negative values are a premium.
pub fn discount(state: &TrustState) -> f64 {
    1.0 - state.price / nav_per_share(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuybackOutcome {
    pub shares_bought: f64,
    pub pct_of_outstanding: f64,
    pub new_nav_per_share: f64,
    /// Set when `spend` exceeds the trust's assets.
    pub overspend: bool,
}

pub fn buyback_outcome(state: &TrustState, spend: f64, exec_price: f64) -> Result<BuybackOutcome> {
    state.validate()?;
    if !(exec_price > 0.0) {
        return Err(LabError::config("exec_price", "must be > 0"));
    }
    if !(spend >= 0.0) {
        return Err(LabError::config("spend", "must be >= 0"));
    }
    let shares_bought = spend / exec_price;
    if shares_bought >= state.shares_out {
        return Err(LabError::Domain(format!(
            "buy-back of {shares_bought} shares retires the whole {} outstanding",
            state.shares_out
        )));
    }
    Ok(BuybackOutcome {
        shares_bought,
        pct_of_outstanding: shares_bought / state.shares_out,
        new_nav_per_share: (state.asset_value - spend) / (state.shares_out - shares_bought),
        overspend: spend > state.asset_value,
    })
}

/// Price ceiling for a valuation-gated strategy: stop buying above
/// `max_premium` over NAV per share (negative values demand a discount).
pub fn gate_ceiling(state: &TrustState, max_premium: f64) -> f64 {
    nav_per_share(state) * (1.0 + max_premium)
}

/// One row of the trust worked example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkedRow {
    pub scenario: String,
    pub price: f64,
    pub nav_per_share: f64,
    pub discount: f64,
    pub shares_bought: f64,
    pub pct_of_outstanding: f64,
    pub new_nav_per_share: f64,
}

/// Trust with £100m of assets and 10m shares spending £10m at £7, at NAV,
/// and at £11.
pub fn trust_worked_example() -> Vec<WorkedRow> {
    let assets = 100e6;
    let shares = 10e6;
    let spend = 10e6;
    [("discount", 7.0), ("at_nav", 10.0), ("premium", 11.0)]
        .into_iter()
        .map(|(name, price)| {
            let state = TrustState {
                asset_value: assets,
                shares_out: shares,
                price,
            };
            let out = buyback_outcome(&state, spend, price).expect("valid worked example");
            WorkedRow {
                scenario: name.to_string(),
                price,
                nav_per_share: nav_per_share(&state),
                discount: discount(&state),
                shares_bought: out.shares_bought,
                pct_of_outstanding: out.pct_of_outstanding,
                new_nav_per_share: out.new_nav_per_share,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trust(price: f64) -> TrustState {
        TrustState {
            asset_value: 100e6,
            shares_out: 10e6,
            price,
        }
    }

    #[test]
    fn discount_and_premium() {
        assert!((nav_per_share(&trust(7.0)) - 10.0).abs() < 1e-12);
        assert!((discount(&trust(7.0)) - 0.30).abs() < 1e-12);
        assert_eq!(discount(&trust(10.0)), 0.0);
        assert!((discount(&trust(11.0)) + 0.10).abs() < 1e-12);
    }

    #[test]
    fn share_counts() {
        let a = buyback_outcome(&trust(7.0), 10e6, 7.0).unwrap();
        assert!((a.shares_bought - 1.428_571_4e6).abs() < 1.0);
        assert!((a.pct_of_outstanding - 0.142_857).abs() < 1e-6);
        let b = buyback_outcome(&trust(11.0), 10e6, 11.0).unwrap();
        assert!((b.shares_bought - 0.909_090_9e6).abs() < 1.0);
        assert!((b.pct_of_outstanding - 0.090_909).abs() < 1e-6);
    }

    #[test]
    fn at_nav_neutral() {
        let out = buyback_outcome(&trust(10.0), 10e6, 10.0).unwrap();
        assert_eq!(out.new_nav_per_share, 10.0);
    }

    #[test]
    fn degenerate_and_overspend() {
        assert!(matches!(buyback_outcome(&trust(1.0), 10e6, 1.0), Err(LabError::Domain(_))));
        let s = TrustState { asset_value: 5e6, ..trust(7.0) };
        assert!(buyback_outcome(&s, 10e6, 7.0).unwrap().overspend);
        assert!(buyback_outcome(&trust(7.0), 1e6, 0.0).is_err());
    }

    #[test]
    fn ceiling_from_premium() {
        assert!((gate_ceiling(&trust(7.0), 0.0) - 10.0).abs() < 1e-12);
        assert!((gate_ceiling(&trust(7.0), -0.1) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn worked_example_rows() {
        let rows = trust_worked_example();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].new_nav_per_share > 10.0);
        assert_eq!(rows[1].new_nav_per_share, 10.0);
        assert!(rows[2].new_nav_per_share < 10.0);
    }

    proptest! {
        #[test]
        fn accretion_law(assets in 1e6f64..1e9, shares in 1e5f64..1e8, frac in 0.001f64..0.5, rel in 0.2f64..3.0) {
            let state = TrustState { asset_value: assets, shares_out: shares, price: 1.0 };
            let nav = nav_per_share(&state);
            let price = nav * rel;
            let spend = frac * assets;
            prop_assume!(spend / price < shares * 0.999);
            let out = buyback_outcome(&state, spend, price).unwrap();
            if rel < 0.999 { prop_assert!(out.new_nav_per_share > nav); }
            if rel > 1.001 { prop_assert!(out.new_nav_per_share < nav); }
            let lhs = assets - spend;
            let rhs = out.new_nav_per_share * (shares - out.shares_bought);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs);
        }

        #[test]
        fn pct_decreasing_in_price(p in 1.0f64..50.0, dp in 0.01f64..10.0) {
            let s = trust(p);
            let a = buyback_outcome(&s, 1e6, p).unwrap();
            let b = buyback_outcome(&s, 1e6, p + dp).unwrap();
            prop_assert!(b.pct_of_outstanding < a.pct_of_outstanding);
        }
    }
}
