use anyhow::Result;
use serde::Serialize;

use crate::args::{Format, GlobalArgs, VerifyArgs};
use crate::config::FileConfig;
use crate::output::{csv_document, emit, fmt_e, render_json};
use hamvol_core::validate::{run_all, CheckOutcome, ValidatorConfig};

#[derive(Serialize)]
struct Config {
    master_seed: u64,
    trials: u64,
    significance: f64,
    quick: bool,
}

#[derive(Serialize)]
struct Payload {
    all_passed: bool,
    checks: Vec<CheckOutcome>,
}

/// Runs the validator suite; returns whether every check passed.
pub fn run(args: VerifyArgs, global: &GlobalArgs, file: &FileConfig) -> Result<bool> {
    let defaults = ValidatorConfig::default();
    let mut cfg = ValidatorConfig {
        master_seed: file.resolve(args.seed, "seed", defaults.master_seed)?,
        trials: file.resolve(args.trials, "trials", defaults.trials)?,
        significance: file.resolve(args.significance, "significance", defaults.significance)?,
    };
    let quick = args.quick || file.raw("quick").is_some_and(|v| v == "true" || v == "1");
    if quick {
        cfg = cfg.quick();
    }

    let checks = run_all(&cfg)?;
    let all_passed = checks.iter().all(|c| c.passed);

    // Human-readable status lines go to stderr so the report stays clean.
    for c in &checks {
        eprintln!(
            "{} {:<26} statistic {:>12.5e}{}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.statistic,
            c.p_value.map(|p| format!("  p {p:.4}")).unwrap_or_default(),
            c.detail,
        );
    }

    let config = Config {
        master_seed: cfg.master_seed,
        trials: cfg.trials,
        significance: cfg.significance,
        quick,
    };
    let payload = Payload { all_passed, checks };

    let content = match global.format {
        Format::Json => render_json("verify", &config, &payload)?,
        Format::Csv => to_csv(&payload.checks),
    };
    emit(global.out.as_deref(), &content)?;
    Ok(all_passed)
}

fn to_csv(checks: &[CheckOutcome]) -> String {
    let header = [
        "check",
        "passed",
        "statistic",
        "p_value",
        "threshold",
        "detail",
    ];
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                c.passed.to_string(),
                fmt_e(c.statistic),
                c.p_value.map_or_else(String::new, fmt_e),
                fmt_e(c.threshold),
                format!("\"{}\"", c.detail.replace('"', "\"\"")),
            ]
        })
        .collect();
    csv_document(&header, &rows)
}
