//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail.

use std::path::Path;

use buyback_cli::report::{example_audit_inputs, snapshot_examples, SNAPSHOT_REFERENCE, VAR_FIGURES};
use buyback_core::audit::{audit_tape, parse_tape, sensitivities, tape_from_blotter, AuditInputs};
use buyback_core::benchmarks::{bogus_benchmark, institutional_vwap, purchase_stats};
use buyback_core::experiments::{benchmark_beat_study, coin_game_exact, coin_game_mc, CoinGameSpec, CoinPolicy};
use buyback_core::fees::{compute_fee_bps, FeeTerms};
use buyback_core::fixtures::{EXAMPLE1_TAPE, EXAMPLE2_TAPE};
use buyback_core::risk::{closed_form_var, market_aggregate_var, mc_var, residual_var_profile, VarQuery};
use buyback_core::strategies::{run_strategy, RegulatoryLimits, StrategyKind, StrategyParams};
use buyback_core::valuation::{buyback_outcome, discount, TrustState};
use buyback_core::{generate_path, ExecMode, ScenarioConfig};
use chrono::NaiveDate;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use statrs::distribution::{ContinuousCDF, Normal};

/// Collects sub-check results for one criterion.
struct Check {
    ok: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn that(&mut self, cond: bool, what: impl Into<String>) {
        let what = what.into();
        if !cond {
            self.ok = false;
            self.notes.push(format!("FAILED {what}"));
        } else {
            self.notes.push(what);
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1(c: &mut Check) {
    for f in &VAR_FIGURES {
        let v = closed_form_var(&f.query);
        c.that(
            rel(v, f.reference) <= 0.01,
            format!("{}: {:.4e} vs {:.4e} ({:.3}%)", f.label, v, f.reference, 100.0 * rel(v, f.reference)),
        );
    }
    for (z, want) in [(1.0, 70e9), (2.0, 140e9)] {
        let v = market_aggregate_var(1.4e12, 0.2, z, 0.35, 125.0, 250.0).unwrap();
        c.that(rel(v, want) <= 0.01, format!("aggregate z={z}: {v:.4e} vs {want:.4e}"));
    }
}

/// Exact tail loss quantile of `|1 - S_T/S_0|` for driftless GBM, by bisection.
fn exact_loss_quantile(sigma: f64, years: f64, p: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    let s = sigma * years.sqrt();
    let m = -0.5 * s * s;
    let tail = |x: f64| {
        let up = 1.0 - n.cdf(((1.0 + x).ln() - m) / s);
        let down = if x < 1.0 { n.cdf(((1.0 - x).ln() - m) / s) } else { 0.0 };
        up + down
    };
    let (mut lo, mut hi) = (0.0, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_2(c: &mut Check) {
    let cfg = ScenarioConfig {
        trading_days_per_year: 252,
        ..ScenarioConfig::default()
    };
    let years = 125.0 / 252.0;
    for (p, z) in [(0.05, 1.96), (0.32, 1.0)] {
        let mc = mc_var(&cfg, 1.0, p, 100_000, ExecMode::Parallel).unwrap();
        let exact = exact_loss_quantile(0.35, years, p);
        let closed = closed_form_var(&VarQuery {
            value: 1.0,
            z,
            sigma_annual: 0.35,
            horizon_days: 125.0,
            days_per_year: 252.0,
        });
        c.that(rel(mc, exact) < 0.02, format!("p={p}: mc {mc:.5} vs exact {exact:.5}"));
        c.that(rel(mc, closed) < 0.10, format!("p={p}: mc {mc:.5} vs closed form {closed:.5}"));
        if p == 0.05 {
            let doubled = mc_var(&cfg, 1.0, p, 200_000, ExecMode::Parallel).unwrap();
            c.that(rel(doubled, mc) < 0.02, format!("2e5 paths {doubled:.5} vs 1e5 {mc:.5}"));
            let seq = mc_var(&cfg, 1.0, p, 100_000, ExecMode::Sequential).unwrap();
            let mut same = seq.to_bits() == mc.to_bits();
            for threads in [1, 4, 8] {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                let v = pool.install(|| mc_var(&cfg, 1.0, p, 100_000, ExecMode::Parallel).unwrap());
                same &= v.to_bits() == mc.to_bits();
            }
            c.that(same, "identical at 1, 4, 8 threads and sequential");
        }
    }
}

fn criterion_3(c: &mut Check) {
    let a = compute_fee_bps(100.0, &FeeTerms::guarantee(40.0));
    let b = compute_fee_bps(100.0, &FeeTerms::vwap_minus(30.0, 0.7));
    let z = compute_fee_bps(40.0, &FeeTerms::guarantee(40.0));
    c.that(a == 60.0, format!("guarantee 40 at 100: {a}"));
    c.that((b - 49.0).abs() < 1e-12, format!("vwap-minus 30/70% at 100: {b}"));
    c.that(z == 0.0, format!("met guarantee: {z}"));
}

fn criterion_4(c: &mut Check) {
    let [in1, in2] = example_audit_inputs();
    let r1 = audit_tape(&parse_tape(EXAMPLE1_TAPE).unwrap(), &in1).unwrap();
    let f1 = r1.implied_fee.unwrap();
    c.that(
        (15.5e6..=16.0e6).contains(&f1.fee),
        format!("example 1 fee {:.3}m", f1.fee / 1e6),
    );
    c.that(
        (0.084..=0.087).contains(&f1.fee_pct),
        format!("example 1 fee {:.3}%", 100.0 * f1.fee_pct),
    );
    let r2 = audit_tape(&parse_tape(EXAMPLE2_TAPE).unwrap(), &in2).unwrap();
    let f2 = r2.implied_fee.unwrap();
    c.that(
        (0.022..=0.024).contains(&f2.fee_pct),
        format!("example 2 fee {:.3}%", 100.0 * f2.fee_pct),
    );
}

fn criterion_5(c: &mut Check) {
    let tol = [[0.03, 0.03, 0.15], [0.01, 0.01, 0.1]];
    for (((name, snap), reference), tol) in snapshot_examples().into_iter().zip(SNAPSHOT_REFERENCE).zip(tol) {
        let s = sensitivities(&snap).unwrap();
        // Independent restatement of the three formulas.
        let (f, a, p, d) = (snap.pct_value_executed, snap.avg_price, snap.last_price, snap.elapsed_days as f64);
        let a2 = (f + 0.01) / (f / a + 0.01 / p);
        let oracle = [(1.0 - p) / (d + 1.0), (a - a2) / a, ((1.0 - a2) - (1.0 - a)) / (1.0 - a)];
        let got = [s.benchmark_one_day.value, s.avg_price_one_pct.value, s.performance_one_pct.value];
        for k in 0..3 {
            let pct = 100.0 * got[k];
            c.that(
                (pct - reference[k]).abs() <= tol[k] + 1e-9 && (got[k] - oracle[k]).abs() < 1e-12,
                format!("{name} row {k}: {pct:+.4} vs {:+.2} (±{})", reference[k], tol[k]),
            );
        }
    }
}

fn criterion_6(c: &mut Check) {
    let cfg = ScenarioConfig::default();
    let long = residual_var_profile(&cfg, 1.0, 120, 1.0).unwrap();
    let short = residual_var_profile(&cfg, 1.0, 30, 1.0).unwrap();
    let ratio = long[0].1 / short[0].1;
    c.that((1.9..=2.2).contains(&ratio), format!("120/30 day-0 ratio {ratio:.4}"));
    let monotone = [&long, &short]
        .iter()
        .all(|p| p.windows(2).all(|w| w[1].1 <= w[0].1));
    c.that(monotone, "profiles non-increasing");
}

fn criterion_7(c: &mut Check) {
    let cfg = ScenarioConfig::default();
    let limits = RegulatoryLimits {
        max_participation: 0.25,
        min_days: 1,
        max_days: 125,
    };
    let params = StrategyParams::new(StrategyKind::AdaptiveBroker, 5e8);
    let r = benchmark_beat_study(&params, &limits, &cfg, 10_000, ExecMode::Parallel).unwrap();
    c.that(
        r.underperformance_rate < 0.01,
        format!(
            "adaptive underperformance {:.4} (mean O {:.3}%)",
            r.underperformance_rate,
            100.0 * r.outperformance_distribution.mean
        ),
    );
    let flat = ScenarioConfig {
        sigma_annual: 0.0,
        ..cfg
    };
    let twap = StrategyParams::new(StrategyKind::Twap, 5e8);
    let worst = (0..100)
        .map(|i| {
            let path = generate_path(&flat, i).unwrap();
            let b = run_strategy(&path, &twap, &limits).unwrap();
            purchase_stats(&b, bogus_benchmark(&b.window_vwaps(&path)).unwrap())
                .unwrap()
                .outperformance
                .abs()
        })
        .fold(0.0, f64::max);
    c.that(worst < 1e-12, format!("twap at zero vol: max |O| {worst:e}"));
}

fn fixed_oracle() -> f64 {
    let mut c = BigUint::from(1u32);
    for i in 0..50u32 {
        c = c * (100 - i) / (i + 1);
    }
    let total: BigUint = BigUint::from(1u32) << 100;
    let half = BigRational::new(1.into(), 2.into());
    let tie = BigRational::new(c.into(), total.into());
    ((BigRational::from_integer(1.into()) - tie) * half).to_f64().unwrap()
}

fn criterion_8(c: &mut Check) {
    let exact = |p| coin_game_exact(&CoinGameSpec::new(100, 150, p)).unwrap().win_probability;
    let fixed = coin_game_exact(&CoinGameSpec::new(100, 100, CoinPolicy::FixedHorizon))
        .unwrap()
        .win_probability;
    let oracle = fixed_oracle();
    c.that((fixed - oracle).abs() < 1e-15, format!("fixed(100) {fixed:.12} vs binomial {oracle:.12}"));
    let ahead = exact(CoinPolicy::StopWhenAhead);
    let optimal = exact(CoinPolicy::StopOptimal);
    c.that(ahead > fixed, format!("stop when ahead {ahead:.6} > fixed {fixed:.6}"));
    c.that(
        optimal >= ahead && ahead >= exact(CoinPolicy::FixedHorizon),
        format!("optimal {optimal:.6} >= ahead >= fixed"),
    );
    for (policy, want) in [(CoinPolicy::FixedHorizon, fixed), (CoinPolicy::StopWhenAhead, ahead)] {
        let mut spec = CoinGameSpec::new(100, 150, policy);
        spec.trials = 1_000_000;
        let mc = coin_game_mc(&spec, 2024, ExecMode::Parallel).unwrap();
        let se = (want * (1.0 - want) / 1e6).sqrt();
        c.that(
            (mc - want).abs() < 0.005 && (mc - want).abs() < 3.0 * se,
            format!("{policy:?} mc {mc:.5} vs {want:.5}"),
        );
    }
}

fn criterion_9(c: &mut Check) {
    let state = |price| TrustState {
        asset_value: 100e6,
        shares_out: 10e6,
        price,
    };
    c.that((discount(&state(7.0)) - 0.30).abs() < 1e-12, "discount 30%");
    let low = buyback_outcome(&state(7.0), 10e6, 7.0).unwrap();
    let high = buyback_outcome(&state(11.0), 10e6, 11.0).unwrap();
    c.that(
        (low.shares_bought / 1e6 - 1.4286).abs() < 5e-5 && (100.0 * low.pct_of_outstanding - 14.3).abs() < 0.05,
        format!("at 7: {:.4}m, {:.2}%", low.shares_bought / 1e6, 100.0 * low.pct_of_outstanding),
    );
    c.that(
        (high.shares_bought / 1e6 - 0.909).abs() < 5e-4 && (100.0 * high.pct_of_outstanding - 9.1).abs() < 0.05,
        format!("at 11: {:.4}m, {:.2}%", high.shares_bought / 1e6, 100.0 * high.pct_of_outstanding),
    );
    let at_nav = buyback_outcome(&state(10.0), 10e6, 10.0).unwrap();
    c.that(at_nav.new_nav_per_share == 10.0, "at-NAV buy-back leaves NAV unchanged");
}

fn criterion_10(c: &mut Check) {
    let prices = [100.0, 110.0, 120.0, 95.5];
    let days: Vec<(f64, f64)> = prices.iter().map(|&p| (p, 3e6)).collect();
    c.that(
        (bogus_benchmark(&prices).unwrap() - institutional_vwap(&days).unwrap()).abs() < 1e-12,
        "equal-volume benchmarks coincide",
    );

    let cfg = ScenarioConfig::default();
    let limits = RegulatoryLimits {
        max_participation: 0.25,
        min_days: 1,
        max_days: 125,
    };
    let start = NaiveDate::from_ymd_opt(2024, 1, 2).unwrap();
    let (mut capped, mut complete, mut round_trip) = (true, true, true);
    for i in 0..1000 {
        let path = generate_path(&cfg, i).unwrap();
        for kind in [StrategyKind::Twap, StrategyKind::AdaptiveBroker] {
            let b = run_strategy(&path, &StrategyParams::new(kind, 5e8), &limits).unwrap();
            capped &= b
                .rows
                .iter()
                .all(|r| r.shares <= 0.25 * path.days[r.day_index].volume * (1.0 + 1e-12));
            complete &= b.completed;
            if i < 100 {
                let s = purchase_stats(&b, bogus_benchmark(&b.window_vwaps(&path)).unwrap()).unwrap();
                let rep = audit_tape(&tape_from_blotter(&b, &path, start), &AuditInputs::new(125)).unwrap();
                round_trip &= rel(rep.avg_price, s.avg_price) < 1e-12
                    && (rep.outperformance.unwrap() - s.outperformance).abs() < 1e-12;
            }
        }
    }
    c.that(capped, "participation cap on every day of 1000 paths");
    c.that(complete, "feasible programmes complete");
    c.that(round_trip, "blotter -> tape -> audit reproduces purchase stats");

    let dir = tempfile::tempdir().unwrap();
    let scn = Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/scenarios/baseline.toml");
    let mut identical = true;
    for args in [
        vec!["simulate", "--config", scn.to_str().unwrap(), "--seed", "5"],
        vec!["risk", "--paths", "5000"],
        vec!["report", "--paths", "2000"],
    ] {
        let a = dir.path().join(format!("{}-a", args[0]));
        let mut first = args.clone();
        first.extend(["--out", a.to_str().unwrap()]);
        let (m, _) = buyback_cli::run_args(first).unwrap();
        let b = dir.path().join(format!("{}-b", args[0]));
        buyback_cli::replay(&m, &b).unwrap();
        for f in m.emitted_files.iter().filter(|f| f.format == "csv") {
            identical &= std::fs::read(a.join(&f.name)).unwrap() == std::fs::read(b.join(&f.name)).unwrap();
        }
    }
    c.that(identical, "manifest replays give byte-identical CSV");
}

type Criterion = (&'static str, fn(&mut Check));

fn main() {
    let criteria: [Criterion; 10] = [
        ("closed-form VaR figures", criterion_1),
        ("Monte Carlo VaR", criterion_2),
        ("fee contracts", criterion_3),
        ("implied fees from bundled tapes", criterion_4),
        ("snapshot sensitivities", criterion_5),
        ("residual VaR profile", criterion_6),
        ("benchmark-beat study", criterion_7),
        ("coin game", criterion_8),
        ("trust NAV", criterion_9),
        ("property suite", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut c = Check::new();
        run(&mut c);
        println!("criterion {:>2} {} {name}", i + 1, if c.ok { "PASS" } else { "FAIL" });
        for n in &c.notes {
            println!("      {n}");
        }
        if !c.ok {
            failed += 1;
        }
    }
    println!("\n{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
