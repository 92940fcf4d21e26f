use anyhow::{Context, Result};
use serde::Serialize;

use crate::args::{CiArg, CriterionArg, FieldArg, Format, GlobalArgs, McArgs, ModeArg};
use crate::config::FileConfig;
use crate::error::usage;
use crate::grid::parse_grid;
use crate::output::{csv_document, emit, fmt_e, render_json};
use hamvol_core::ensembles::{audit, sample_eigenvalues, EnsembleSpec, PureState};
use hamvol_core::montecarlo::{
    comparison_from_curve, estimate_unrestricted, CiMethod, ComparisonReport, EmpiricalCurve,
    EstimateOptions, SamplingMode,
};
use hamvol_core::spectra::CriterionKind;
use hamvol_core::{ScalarField, StreamFactory};

#[derive(Serialize)]
struct Config {
    dim: usize,
    trace_bound: f64,
    field: ScalarField,
    master_seed: u64,
    trials: u64,
    epsilons: Vec<f64>,
    criterion: CriterionKind,
    mode: SamplingMode,
    ci_method: CiMethod,
    confidence: f64,
    compare: bool,
}

#[derive(Serialize)]
struct Payload {
    curve: EmpiricalCurve,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<ComparisonReport>,
}

pub fn run(args: McArgs, global: &GlobalArgs, file: &FileConfig) -> Result<()> {
    let dim = file
        .resolve_opt(args.dim, "N")?
        .ok_or_else(|| usage("mc needs --N <dim>"))?;
    let trials = file.resolve(args.trials, "trials", 10_000)?;
    let grid_points = file.resolve_opt(args.grid_points, "grid-points")?;
    let eps_text = file
        .resolve_opt(args.eps, "eps")?
        .ok_or_else(|| usage("mc needs --eps <grid>"))?;
    let epsilons = parse_grid(&eps_text, grid_points)?;
    let criterion: CriterionKind = file
        .resolve_opt(args.criterion, "criterion")
        .map(|o: Option<CriterionArg>| o.map(Into::into))?
        .unwrap_or(CriterionKind::Overlap);
    let seed = file.resolve(args.seed, "seed", 0)?;
    let k = file.resolve(args.k, "k", 1.0)?;
    let field: ScalarField = file
        .resolve_opt(args.field, "field")
        .map(|o: Option<FieldArg>| o.map(Into::into))?
        .unwrap_or(ScalarField::Complex);
    let mode: SamplingMode = file
        .resolve_opt(args.mode, "mode")
        .map(|o: Option<ModeArg>| o.map(Into::into))?
        .unwrap_or(SamplingMode::EigvecOnly);
    let ci_method: CiMethod = file
        .resolve_opt(args.ci, "ci")
        .map(|o: Option<CiArg>| o.map(Into::into))?
        .unwrap_or(CiMethod::Wilson);
    let confidence = file.resolve(args.confidence, "confidence", 0.99)?;

    let spec = EnsembleSpec::new(dim, k, field, seed)?;
    let options = EstimateOptions {
        mode,
        ci_method,
        confidence,
        ..EstimateOptions::default()
    };

    let config = Config {
        dim,
        trace_bound: k,
        field,
        master_seed: seed,
        trials,
        epsilons: epsilons.clone(),
        criterion,
        mode,
        ci_method,
        confidence,
        compare: args.compare,
    };

    let target = PureState::basis_state(dim, 0);
    let curve = estimate_unrestricted(&spec, &target, &epsilons, trials, criterion, &options)?;
    let comparison = args
        .compare
        .then(|| comparison_from_curve(&curve, dim, field))
        .transpose()?;
    let payload = Payload { curve, comparison };

    if let Some(dump_path) = &args.dump {
        if field != ScalarField::Complex {
            return Err(usage("--dump requires the complex ensemble"));
        }
        let count = file
            .resolve_opt(args.dump_count, "dump-count")?
            .unwrap_or_else(|| trials.min(1000));
        let factory = StreamFactory::new(seed);
        let mut records = Vec::with_capacity(count as usize);
        for index in 0..count {
            let mut rng = factory.substream(index);
            records.push(audit::EigenvalueRecord {
                spec_hash: spec.spec_hash(),
                stream_index: index,
                eigenvalues: sample_eigenvalues(&spec, &mut rng)?,
            });
        }
        let file = std::fs::File::create(dump_path)
            .with_context(|| format!("creating dump file {}", dump_path.display()))?;
        audit::write_records(std::io::BufWriter::new(file), dim as u32, &records)?;
    }

    let content = match global.format {
        Format::Json => render_json("mc", &config, &payload)?,
        Format::Csv => to_csv(&payload),
    };
    emit(global.out.as_deref(), &content)
}

fn to_csv(payload: &Payload) -> String {
    match &payload.comparison {
        Some(report) => {
            let header = [
                "epsilon",
                "mc_estimate",
                "ci_low",
                "ci_high",
                "closed_form",
                "haar_tail",
            ];
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_e(r.epsilon),
                        fmt_e(r.mc_estimate),
                        fmt_e(r.ci_low),
                        fmt_e(r.ci_high),
                        fmt_e(r.closed_form),
                        fmt_e(r.haar_tail),
                    ]
                })
                .collect();
            csv_document(&header, &rows)
        }
        None => curve_csv(&payload.curve),
    }
}

pub(crate) fn curve_csv(curve: &EmpiricalCurve) -> String {
    let header = ["epsilon", "hits", "trials", "estimate", "ci_low", "ci_high"];
    let estimates = curve.estimates();
    let rows: Vec<Vec<String>> = curve
        .epsilons
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            vec![
                fmt_e(eps),
                curve.hits[i].to_string(),
                curve.trials.to_string(),
                fmt_e(estimates[i]),
                fmt_e(curve.ci_low[i]),
                fmt_e(curve.ci_high[i]),
            ]
        })
        .collect();
    csv_document(&header, &rows)
}
