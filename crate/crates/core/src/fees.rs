//! Broker fee contracts and friction accounting (fees plus purchase taxes).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeeKind {
    /// Broker keeps everything above the guaranteed outperformance.
    VwapGuarantee,
    /// Broker keeps `share_pct` of everything above the guarantee.
    VwapMinus,
    FlatAgency,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeeTerms {
    pub kind: FeeKind,
    #[serde(default)]
    pub guarantee_bps: f64,
    #[serde(default)]
    pub share_pct: f64,
    #[serde(default)]
    pub agency_bps: f64,
    /// When false, a shortfall against the guarantee yields a zero fee
    /// instead of a payment from the broker.
    #[serde(default = "yes")]
    pub allow_negative_fee: bool,
}

impl FeeTerms {
    pub fn guarantee(guarantee_bps: f64) -> Self {
        FeeTerms {
            kind: FeeKind::VwapGuarantee,
            guarantee_bps,
            share_pct: 1.0,
            agency_bps: 0.0,
            allow_negative_fee: true,
        }
    }

    pub fn vwap_minus(guarantee_bps: f64, share_pct: f64) -> Self {
        FeeTerms {
            kind: FeeKind::VwapMinus,
            guarantee_bps,
            share_pct,
            agency_bps: 0.0,
            allow_negative_fee: true,
        }
    }

    pub fn flat(agency_bps: f64) -> Self {
        FeeTerms {
            kind: FeeKind::FlatAgency,
            guarantee_bps: 0.0,
            share_pct: 0.0,
            agency_bps,
            allow_negative_fee: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TaxTerms {
    pub stamp_bps: f64,
    pub excise_bps: f64,
}

impl TaxTerms {
    pub const UK_STAMP: TaxTerms = TaxTerms {
        stamp_bps: 50.0,
        excise_bps: 0.0,
    };
    pub const US_EXCISE: TaxTerms = TaxTerms {
        stamp_bps: 0.0,
        excise_bps: 100.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub gross_value: f64,
    pub stamp: f64,
    pub excise: f64,
    pub fee: f64,
    pub total_cost: f64,
    pub fee_bps_of_gross: f64,
}

pub fn compute_fee_bps(outperformance_bps: f64, terms: &FeeTerms) -> f64 {
    let raw = match terms.kind {
        FeeKind::VwapGuarantee => outperformance_bps - terms.guarantee_bps,
        FeeKind::VwapMinus => (outperformance_bps - terms.guarantee_bps) * terms.share_pct,
        FeeKind::FlatAgency => terms.agency_bps,
    };
    if terms.allow_negative_fee {
        raw
    } else {
        raw.max(0.0)
    }
}

/// Outperformance that stays with the issuer after the broker's cut.
pub fn retained_outperformance_bps(outperformance_bps: f64, terms: &FeeTerms) -> f64 {
    outperformance_bps - compute_fee_bps(outperformance_bps, terms)
}

/// Broker share of outperformance above `guarantee_bps` implied by an
/// observed fee. `None` when there is nothing above the guarantee.
pub fn implied_share_pct(outperformance_bps: f64, guarantee_bps: f64, fee_bps: f64) -> Option<f64> {
    let excess = outperformance_bps - guarantee_bps;
    (excess > 0.0).then(|| fee_bps / excess)
}

pub fn cost_breakdown(gross_value: f64, out_bps: f64, terms: &FeeTerms, taxes: &TaxTerms) -> CostBreakdown {
    let fee_bps = compute_fee_bps(out_bps, terms);
    let fee = gross_value * fee_bps / 1e4;
    let stamp = gross_value * taxes.stamp_bps / 1e4;
    let excise = gross_value * taxes.excise_bps / 1e4;
    CostBreakdown {
        gross_value,
        stamp,
        excise,
        fee,
        total_cost: gross_value + stamp + excise + fee,
        fee_bps_of_gross: 1e4 * fee / gross_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn contract_examples() {
        assert_eq!(compute_fee_bps(100.0, &FeeTerms::guarantee(40.0)), 60.0);
        assert!((compute_fee_bps(100.0, &FeeTerms::vwap_minus(30.0, 0.7)) - 49.0).abs() < 1e-12);
        assert_eq!(compute_fee_bps(40.0, &FeeTerms::guarantee(40.0)), 0.0);
        assert_eq!(compute_fee_bps(-300.0, &FeeTerms::flat(6.0)), 6.0);
    }

    #[test]
    fn negative_fee_policy() {
        let mut t = FeeTerms::guarantee(40.0);
        assert_eq!(compute_fee_bps(10.0, &t), -30.0);
        t.allow_negative_fee = false;
        assert_eq!(compute_fee_bps(10.0, &t), 0.0);
    }

    #[test]
    fn flat_agency_total() {
        let c = cost_breakdown(100.0, 0.0, &FeeTerms::flat(6.0), &TaxTerms::default());
        assert!((c.total_cost - 100.06).abs() < 1e-12);
    }

    #[test]
    fn example_one_costs() {
        // A fee that brings the total to 200.8m on 184m gross with stamp duty.
        let gross = 184e6;
        let fee = 200.8e6 - gross * 1.005;
        let out_bps = 1e4 * fee / gross;
        let c = cost_breakdown(gross, out_bps, &FeeTerms::guarantee(0.0), &TaxTerms::UK_STAMP);
        assert!((c.total_cost - 200.8e6).abs() < 1.0);
        assert!((c.fee - 15.68e6).abs() <= 0.2e6 + 1.0);
        assert!((c.fee_bps_of_gross / 100.0 - 8.5).abs() < 0.15);
    }

    #[test]
    fn example_two_fee_bps() {
        let bps: f64 = 1e4 * 10e6 / 435e6;
        assert!((bps - 230.0).abs() <= 10.0);
    }

    #[test]
    fn fitted_share_from_disclosed_fee() {
        let gross: f64 = 435e6;
        let pool = gross * 0.035;
        assert!((pool - 15.1e6).abs() < 0.15e6);
        let share = implied_share_pct(350.0, 0.0, 1e4 * 10e6 / gross).unwrap();
        assert!((share - 10e6 / pool).abs() < 1e-12);
        let back = compute_fee_bps(350.0, &FeeTerms::vwap_minus(0.0, share));
        assert!((back * gross / 1e4 - 10e6).abs() < 1e-3);
        assert_eq!(implied_share_pct(20.0, 40.0, 5.0), None);
    }

    proptest! {
        #[test]
        fn fee_monotone(a in -500.0f64..500.0, b in -500.0f64..500.0, g in 0.0f64..100.0, s in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for t in [FeeTerms::guarantee(g), FeeTerms::vwap_minus(g, s)] {
                prop_assert!(compute_fee_bps(lo, &t) <= compute_fee_bps(hi, &t) + 1e-12);
            }
        }

        #[test]
        fn minus_below_guarantee_when_ahead(out in 0.0f64..1000.0, g in 0.0f64..100.0, s in 0.0f64..0.999) {
            prop_assume!(out >= g);
            prop_assert!(compute_fee_bps(out, &FeeTerms::vwap_minus(g, s)) <= compute_fee_bps(out, &FeeTerms::guarantee(g)) + 1e-12);
        }

        #[test]
        fn retention_identity(out in -500.0f64..1000.0, g in 0.0f64..100.0, s in 0.0f64..=1.0) {
            let t = FeeTerms::vwap_minus(g, s);
            let lhs = retained_outperformance_bps(out, &t);
            let rhs = (out - g) * (1.0 - s) + g;
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        #[test]
        fn breakdown_reconciles(gross in 1.0f64..1e10, out in -500.0f64..1000.0, stamp in 0.0f64..100.0, ex in 0.0f64..200.0) {
            let c = cost_breakdown(gross, out, &FeeTerms::guarantee(25.0), &TaxTerms { stamp_bps: stamp, excise_bps: ex });
            let sum = c.gross_value + c.stamp + c.excise + c.fee;
            prop_assert!((c.total_cost - sum).abs() <= 1e-9 * c.total_cost.abs().max(gross));
            prop_assert!((c.fee_bps_of_gross - 1e4 * c.fee / gross).abs() < 1e-9);
        }
    }
}
