//! Simulation and forensic analytics for corporate share buy-back
//! execution.
//!
//! * [`market`]: seedable GBM paths of daily close, VWAP and volume.
//! * [`benchmarks`]: mean-of-daily-VWAP and volume-weighted benchmarks.
//! * [`strategies`]: TWAP, POV, an adaptive benchmark-chasing broker, and
//!   a valuation gate, all under a participation cap.
//! * [`fees`]: guarantee and VWAP-minus fee contracts, taxes.
//! * [`risk`]: closed-form and Monte Carlo VaR, residual unwind profiles.
//! * [`audit`]: disclosure-tape ingestion and broker-incentive metrics.
//! * [`experiments`]: optional-stopping coin game, benchmark-beat studies.
//! * [`valuation`]: investment-trust NAV accretion and dilution.
//!
//! Monte Carlo fan-outs run on rayon when the `parallel` feature is on
//! (the default) and give identical results in either mode.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod benchmarks;
pub mod error;
pub mod experiments;
pub mod fees;
pub mod fixtures;
pub mod market;
pub mod par;
pub mod risk;
pub mod strategies;
pub mod valuation;

pub use error::{LabError, Result};
pub use market::{generate_path, MarketDay, PricePath, ScenarioConfig};
pub use par::ExecMode;
