//! `report`: regenerates the plot series and reference tables.

use std::fmt::Write as _;

use buyback_core::audit::{audit_tape, completion_profile, parse_tape, sensitivities, AuditInputs, AuditSnapshot};
use buyback_core::fixtures::{EXAMPLE1_ALLOWED_DAYS, EXAMPLE1_TAPE, EXAMPLE2_ALLOWED_DAYS, EXAMPLE2_TAPE};
use buyback_core::risk::{closed_form_var, fan_chart, residual_var_profile, VarQuery};
use buyback_core::strategies::run_strategy;
use buyback_core::{generate_path, ScenarioConfig};

use crate::args::{GlobalArgs, NavArgs};
use crate::commands::{
    coin_table, coin_text, mode, money, nav_rows, nav_text, write_coin_csv, write_nav_csv, write_series, Outcome,
};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::OutDir;

pub const SELLOFF_RALLY: &str = include_str!("../scenarios/selloff_rally.toml");

/// A closed-form VaR figure and the value it is compared against.
#[derive(Debug, Clone, Copy)]
pub struct VarFigure {
    pub label: &'static str,
    pub query: VarQuery,
    pub reference: f64,
}

const fn q(value: f64, z: f64, days_per_year: f64) -> VarQuery {
    VarQuery {
        value,
        z,
        sigma_annual: 0.35,
        horizon_days: 125.0,
        days_per_year,
    }
}

pub const VAR_FIGURES: [VarFigure; 7] = [
    VarFigure { label: "typical programme, 1 sd", query: q(870e6, 1.0, 250.0), reference: 215e6 },
    VarFigure { label: "market aggregate, 1 sd", query: q(1.4e12 * 0.2, 1.0, 250.0), reference: 70e9 },
    VarFigure { label: "market aggregate, 2 sd", query: q(1.4e12 * 0.2, 2.0, 250.0), reference: 140e9 },
    VarFigure { label: "affected buy-backs, 99%", query: q(280e9, 2.33, 252.0), reference: 161e9 },
    VarFigure { label: "affected buy-backs, 95%", query: q(280e9, 1.96, 252.0), reference: 135e9 },
    VarFigure { label: "all buy-backs, 99%", query: q(1.12e12, 2.33, 252.0), reference: 643e9 },
    VarFigure { label: "all buy-backs, 95%", query: q(1.12e12, 1.96, 252.0), reference: 541e9 },
];

/// Reported state at about 90% completion: value executed, time expired,
/// outperformance, price over benchmark, allowed days.
pub const SNAPSHOT_INPUTS: [(&str, f64, f64, f64, f64, usize); 2] = [
    ("example1", 0.893, 0.375, 0.082, 0.78, EXAMPLE1_ALLOWED_DAYS),
    ("example2", 0.897, 0.530, 0.010, 1.02, EXAMPLE2_ALLOWED_DAYS),
];

/// Reference sensitivities in percent, in `SNAPSHOT_INPUTS` order.
pub const SNAPSHOT_REFERENCE: [[f64; 3]; 2] = [[0.31, 0.19, 2.13], [-0.03, -0.03, -3.19]];

pub fn snapshot_examples() -> Vec<(&'static str, AuditSnapshot)> {
    SNAPSHOT_INPUTS
        .iter()
        .map(|&(name, f, t, o, p, n)| (name, AuditSnapshot::from_reported(f, t, n, o, p)))
        .collect()
}

pub fn example_audit_inputs() -> [AuditInputs; 2] {
    let mut one = AuditInputs::new(EXAMPLE1_ALLOWED_DAYS);
    one.total_returned = Some(200.8e6);
    one.stamp_bps = 50.0;
    let mut two = AuditInputs::new(EXAMPLE2_ALLOWED_DAYS);
    two.total_returned = Some(445e6);
    two.fee_paid_separately = true;
    [one, two]
}

const RESIDUAL_UNWINDS: [usize; 4] = [30, 60, 90, 120];
const FAN_PATHS: u64 = 2_000;
const COIN_TRIALS: u64 = 200_000;

pub fn report(g: &GlobalArgs, out: &mut OutDir) -> CliResult<Outcome> {
    let seed = g.seed.unwrap_or(0);
    let mut text = String::new();

    let _ = writeln!(text, "Closed-form VaR");
    let mut rows = Vec::new();
    for f in &VAR_FIGURES {
        let v = closed_form_var(&f.query);
        let err = (v - f.reference) / f.reference;
        let _ = writeln!(
            text,
            "  {:<26} {:>10}  reference {:>8}  ({:+.2}%)",
            f.label,
            money(v),
            money(f.reference),
            100.0 * err
        );
        rows.push(vec![
            f.label.to_string(),
            f.query.value.to_string(),
            f.query.z.to_string(),
            f.query.days_per_year.to_string(),
            v.to_string(),
            f.reference.to_string(),
            err.to_string(),
        ]);
    }
    out.write("var_figures.csv", |w| {
        crate::commands::csv_table(
            w,
            &["label", "value", "z", "days_per_year", "computed", "reference", "rel_error"],
            &rows,
        )
    })?;

    let _ = writeln!(text, "\nSensitivities near 90% executed (%)");
    let mut rows = Vec::new();
    for ((name, snap), reference) in snapshot_examples().into_iter().zip(SNAPSHOT_REFERENCE) {
        let s = sensitivities(&snap)?;
        let got = [
            s.benchmark_one_day.value,
            s.avg_price_one_pct.value,
            s.performance_one_pct.value,
        ];
        let _ = writeln!(
            text,
            "  {name}: d={} benchmark {:+.4} ({:+.2})  avg price {:+.4} ({:+.2})  performance {:+.3} ({:+.2})",
            snap.elapsed_days,
            100.0 * got[0],
            reference[0],
            100.0 * got[1],
            reference[1],
            100.0 * got[2],
            reference[2]
        );
        for (k, metric) in ["benchmark_one_day", "avg_price_one_pct", "performance_one_pct"].iter().enumerate() {
            rows.push(vec![
                name.to_string(),
                metric.to_string(),
                (100.0 * got[k]).to_string(),
                reference[k].to_string(),
            ]);
        }
    }
    out.write("sensitivities.csv", |w| {
        crate::commands::csv_table(w, &["example", "metric", "computed_pct", "reference_pct"], &rows)
    })?;

    let _ = writeln!(text, "\nAudits of the bundled synthetic tapes");
    let [in1, in2] = example_audit_inputs();
    for (name, tape_text, inputs) in [("example1", EXAMPLE1_TAPE, in1), ("example2", EXAMPLE2_TAPE, in2)] {
        let tape = parse_tape(tape_text)?;
        let rep = audit_tape(&tape, &inputs)?;
        if let Some(f) = rep.implied_fee {
            let _ = writeln!(
                text,
                "  {name}: gross {} implied fee {} ({:.2}%), done at {:.1}% of allowed time",
                money(rep.gross_value),
                money(f.fee),
                100.0 * f.fee_pct,
                100.0 * rep.completion_pct_time.unwrap_or(f64::NAN)
            );
        }
        out.json(&format!("audit_{name}.json"), &rep)?;
        let profile = completion_profile(&tape, inputs.total_allowed_days, None)?;
        out.write(&format!("completion_{name}.csv"), |w| Ok(profile.write_csv(w)?))?;
    }

    let cfg = RunConfig::from_toml_str(SELLOFF_RALLY)?;
    let path = generate_path(&cfg.scenario, 0)?;
    let blotter = run_strategy(&path, &cfg.strategy, &cfg.limits)?;
    out.write("selloff_rally_series.csv", |w| write_series(w, &path, &blotter))?;
    let half = blotter
        .completion_series()
        .into_iter()
        .find(|&(_, v)| v >= 0.9)
        .map_or(f64::NAN, |(t, _)| t);
    let _ = writeln!(
        text,
        "\nSell-off then rally, adaptive broker: 90% of value by {:.1}% of the window",
        100.0 * half
    );

    let scn = ScenarioConfig {
        master_seed: seed,
        ..ScenarioConfig::default()
    };
    let fan = fan_chart(&scn, 870e6, g.paths.unwrap_or(FAN_PATHS), 20, mode(g))?;
    out.write("fan_chart.csv", |w| Ok(fan.write_csv(w)?))?;

    let mut rows = Vec::new();
    let mut day0 = Vec::new();
    for n in RESIDUAL_UNWINDS {
        let profile = residual_var_profile(&scn, 870e6, n, 1.0)?;
        day0.push(profile[0].1);
        for (d, v) in profile {
            rows.push(vec![n.to_string(), d.to_string(), v.to_string()]);
        }
    }
    out.write("residual_var.csv", |w| {
        crate::commands::csv_table(w, &["unwind_days", "day_index", "residual_var"], &rows)
    })?;
    let _ = writeln!(
        text,
        "Residual VaR at start, 120-day vs 30-day unwind: {:.3}x",
        day0[3] / day0[0]
    );

    let coin = coin_table(100, 150, g.paths.unwrap_or(COIN_TRIALS), seed, mode(g))?;
    out.write("coin_game.csv", |w| write_coin_csv(w, &coin))?;
    let _ = writeln!(text, "\nCoin game, 100 flips or stop on 100..150");
    text.push_str(&coin_text(&coin));

    let nav = nav_rows(&NavArgs {
        assets: 100e6,
        shares: 10e6,
        spend: 10e6,
        prices: vec![7.0, 10.0, 11.0],
    })?;
    out.write("nav_table.csv", |w| write_nav_csv(w, &nav))?;
    let _ = writeln!(text, "\nTrust buy-back of 10M with 100M assets, 10M shares");
    text.push_str(&nav_text(&nav));

    out.text("report.txt", &text)?;
    Ok(Outcome {
        seed,
        json: serde_json::json!({ "report": text }),
        text,
    })
}
