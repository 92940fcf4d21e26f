use anyhow::{Context, Result};
use serde::Serialize;

use crate::args::{FitArgs, Format, GlobalArgs};
use crate::config::FileConfig;
use crate::error::usage;
use crate::output::{csv_document, emit, fmt_e, render_json};
use hamvol_core::betafit::{fit_beta_cdf, fit_beta_cdf_with_starts, BetaFitResult};
use hamvol_core::montecarlo::EmpiricalCurve;

#[derive(Serialize)]
struct Config {
    input: String,
    run: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    starts: Option<Vec<(f64, f64)>>,
    curve_trials: u64,
    curve_points: usize,
}

pub fn run(args: FitArgs, global: &GlobalArgs, file: &FileConfig) -> Result<()> {
    let run_index = file.resolve(args.run, "run", 0)?;
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let curve = extract_curve(&text, run_index)?;

    let starts = match file.resolve_opt(args.starts, "starts")? {
        Some(text) => Some(parse_starts(&text)?),
        None => None,
    };

    let fit = match &starts {
        Some(points) => fit_beta_cdf_with_starts(&curve, points)?,
        None => fit_beta_cdf(&curve)?,
    };

    let config = Config {
        input: args.input.display().to_string(),
        run: run_index,
        starts,
        curve_trials: curve.trials,
        curve_points: curve.epsilons.len(),
    };

    let content = match global.format {
        Format::Json => render_json("fit", &config, &fit)?,
        Format::Csv => to_csv(&fit),
    };
    emit(global.out.as_deref(), &content)
}

/// Accepts a bare curve, an `mc` report (`results.curve`), or an `ising`
/// report (`results.runs[run].curve`).
fn extract_curve(text: &str, run_index: usize) -> Result<EmpiricalCurve> {
    if let Ok(curve) = serde_json::from_str::<EmpiricalCurve>(text) {
        return Ok(curve);
    }
    let value: serde_json::Value = serde_json::from_str(text).context("input is not valid JSON")?;
    let candidate = value
        .pointer("/results/curve")
        .or_else(|| value.pointer(&format!("/results/runs/{run_index}/curve")))
        .or_else(|| value.pointer("/curve"))
        .ok_or_else(|| {
            usage("input JSON contains no curve (expected a bare curve, an mc report, or an ising report)")
        })?;
    serde_json::from_value(candidate.clone()).context("malformed curve object")
}

fn parse_starts(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|pair| {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| usage(format!("bad start `{pair}`, expected alpha:beta")))?;
            let alpha: f64 = a
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad alpha `{a}`")))?;
            let beta: f64 = b
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad beta `{b}`")))?;
            Ok((alpha, beta))
        })
        .collect()
}

fn to_csv(fit: &BetaFitResult) -> String {
    csv_document(
        &["alpha", "beta", "rmse", "small_eps_coeff"],
        &[vec![
            fmt_e(fit.alpha),
            fmt_e(fit.beta),
            fmt_e(fit.rmse),
            fmt_e(fit.small_eps_coeff),
        ]],
    )
}
