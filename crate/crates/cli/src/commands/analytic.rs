use anyhow::Result;
use serde::Serialize;

use crate::args::{AnalyticArgs, FieldArg, Format, GlobalArgs};
use crate::commands::LogValueOut;
use crate::config::FileConfig;
use crate::error::usage;
use crate::grid::{parse_grid, parse_uint_list};
use crate::output::{csv_document, emit, fmt_e, render_json};
use hamvol_core::analytic::{self, ManifoldSpec, TiBoundSpec};
use hamvol_core::ScalarField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    TotalVol,
    Hypersurface,
    EpsVol,
    RelVol,
    Stirling,
    TiBound,
    DeltaTiBound,
    Fig1,
}

#[derive(Serialize)]
struct Config {
    mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    dims: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_states: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilons: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<ScalarField>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ti: Option<TiBoundSpec>,
}

#[derive(Serialize)]
struct Row {
    quantity: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    dim: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_states: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<ScalarField>,
    #[serde(flatten)]
    value: LogValueOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    approximation_strained: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_max: Option<LogValueOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_within_bound: Option<bool>,
}

impl Row {
    fn bare(quantity: &'static str, value: LogValueOut) -> Self {
        Row {
            quantity,
            dim: None,
            trace_bound: None,
            fixed_states: None,
            epsilon: None,
            field: None,
            value,
            approximation_strained: None,
            epsilon_max: None,
            epsilon_within_bound: None,
        }
    }
}

#[derive(Serialize)]
struct Fig1Series {
    dim: u32,
    log10_rel_vol: Vec<f64>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Payload {
    Rows(Vec<Row>),
    Fig1 {
        epsilons: Vec<f64>,
        series: Vec<Fig1Series>,
    },
}

pub fn run(args: AnalyticArgs, global: &GlobalArgs, file: &FileConfig) -> Result<()> {
    let mode = pick_mode(&args, file)?;

    let dims: Option<Vec<u32>> = match file.resolve_opt(args.dims, "N")? {
        Some(text) => Some(
            parse_uint_list(&text, "dimension")?
                .into_iter()
                .map(|v| u32::try_from(v).map_err(|_| usage(format!("dimension {v} too large"))))
                .collect::<Result<_>>()?,
        ),
        None => None,
    };
    let k = file.resolve(args.k, "k", 1.0)?;
    let grid_points = file.resolve_opt(args.grid_points, "grid-points")?;
    let epsilons: Option<Vec<f64>> = match file.resolve_opt(args.eps, "eps")? {
        Some(text) => Some(parse_grid(&text, grid_points)?),
        None => None,
    };
    let field: ScalarField = file
        .resolve_opt(args.field, "field")
        .map(|o: Option<FieldArg>| o.map(Into::into))?
        .unwrap_or(ScalarField::Complex);

    let need_dims = || {
        dims.clone()
            .ok_or_else(|| usage("this mode needs --N <dims>"))
    };
    let need_eps = || {
        epsilons
            .clone()
            .ok_or_else(|| usage("this mode needs --eps <grid>"))
    };

    let mut config = Config {
        mode,
        dims: dims.clone(),
        trace_bound: None,
        fixed_states: None,
        epsilons: epsilons.clone(),
        field: None,
        ti: None,
    };

    let payload = match mode {
        Mode::TotalVol => {
            config.trace_bound = Some(k);
            let mut rows = Vec::new();
            for dim in need_dims()? {
                let spec = ManifoldSpec::complex(dim, k)?;
                let mut row = Row::bare("total_volume", analytic::total_volume(&spec)?.into());
                row.dim = Some(dim);
                row.trace_bound = Some(k);
                rows.push(row);
            }
            Payload::Rows(rows)
        }
        Mode::Hypersurface => {
            let fixed = file
                .resolve_opt(args.fixed_states, "L")?
                .ok_or_else(|| usage("--hypersurface needs --L <count>"))?;
            config.trace_bound = Some(k);
            config.fixed_states = Some(fixed);
            let mut rows = Vec::new();
            for dim in need_dims()? {
                let spec = ManifoldSpec::complex(dim, k)?;
                let mut row =
                    Row::bare("hypersurface", analytic::hypersurface(&spec, fixed)?.into());
                row.dim = Some(dim);
                row.trace_bound = Some(k);
                row.fixed_states = Some(fixed);
                rows.push(row);
            }
            Payload::Rows(rows)
        }
        Mode::EpsVol => {
            config.trace_bound = Some(k);
            let mut rows = Vec::new();
            for dim in need_dims()? {
                let spec = ManifoldSpec::complex(dim, k)?;
                for &eps in &need_eps()? {
                    let v = analytic::epsilon_volume(&spec, eps)?;
                    let mut row = Row::bare("epsilon_volume", v.value.into());
                    row.dim = Some(dim);
                    row.trace_bound = Some(k);
                    row.epsilon = Some(eps);
                    row.approximation_strained = Some(v.approximation_strained);
                    rows.push(row);
                }
            }
            Payload::Rows(rows)
        }
        Mode::RelVol => {
            config.field = Some(field);
            let mut rows = Vec::new();
            for dim in need_dims()? {
                for &eps in &need_eps()? {
                    let v = analytic::relative_volume(dim, eps, field)?;
                    let mut row = Row::bare("relative_volume", v.into());
                    row.dim = Some(dim);
                    row.epsilon = Some(eps);
                    row.field = Some(field);
                    rows.push(row);
                }
            }
            Payload::Rows(rows)
        }
        Mode::Stirling => {
            let mut rows = Vec::new();
            for dim in need_dims()? {
                for &eps in &need_eps()? {
                    let v = analytic::relative_volume_stirling(dim, eps)?;
                    let mut row = Row::bare("relative_volume_stirling", v.value.into());
                    row.dim = Some(dim);
                    row.epsilon = Some(eps);
                    row.epsilon_max = Some(v.epsilon_max.into());
                    row.epsilon_within_bound = Some(v.epsilon_within_bound);
                    rows.push(row);
                }
            }
            Payload::Rows(rows)
        }
        Mode::TiBound => {
            let spec = ti_spec(args.d, args.t, args.n, args.num_terms, file, k, false)?;
            config.ti = Some(spec);
            let mut row = Row::bare("ti_bound", analytic::ti_bound(&spec)?.into());
            row.trace_bound = Some(k);
            Payload::Rows(vec![row])
        }
        Mode::DeltaTiBound => {
            let eps = need_eps()?
                .first()
                .copied()
                .ok_or_else(|| usage("--delta-ti-bound needs --eps"))?;
            let spec = ti_spec(args.d, args.t, args.n, args.num_terms, file, k, true)?
                .with_perturbation(
                    file.resolve_opt(args.delta, "delta")?
                        .ok_or_else(|| usage("--delta-ti-bound needs --delta"))?,
                    file.resolve(args.k_prime, "k-prime", k)?,
                    eps,
                )?;
            config.ti = Some(spec);
            let mut row = Row::bare(
                "delta_ti_relative_bound",
                analytic::delta_ti_relative_bound(&spec)?.into(),
            );
            row.trace_bound = Some(k);
            row.epsilon = Some(eps);
            Payload::Rows(vec![row])
        }
        Mode::Fig1 => {
            config.field = Some(field);
            let epsilons = need_eps()?;
            let mut series = Vec::new();
            for dim in need_dims()? {
                let log10_rel_vol = epsilons
                    .iter()
                    .map(|&eps| Ok(analytic::relative_volume(dim, eps, field)?.log10_abs()))
                    .collect::<Result<Vec<f64>>>()?;
                series.push(Fig1Series { dim, log10_rel_vol });
            }
            Payload::Fig1 { epsilons, series }
        }
    };

    let content = match global.format {
        Format::Json => render_json("analytic", &config, &payload)?,
        Format::Csv => to_csv(&payload),
    };
    emit(global.out.as_deref(), &content)
}

fn pick_mode(args: &AnalyticArgs, file: &FileConfig) -> Result<Mode> {
    let file_mode = |name: &str| file.raw(name).is_some_and(|v| v == "true" || v == "1");
    let chosen: Vec<Mode> = [
        (args.total_vol || file_mode("total-vol"), Mode::TotalVol),
        (
            args.hypersurface || file_mode("hypersurface"),
            Mode::Hypersurface,
        ),
        (args.eps_vol || file_mode("eps-vol"), Mode::EpsVol),
        (args.rel_vol || file_mode("rel-vol"), Mode::RelVol),
        (args.stirling || file_mode("stirling"), Mode::Stirling),
        (args.ti_bound || file_mode("ti-bound"), Mode::TiBound),
        (
            args.delta_ti_bound || file_mode("delta-ti-bound"),
            Mode::DeltaTiBound,
        ),
        (args.fig1 || file_mode("fig1"), Mode::Fig1),
    ]
    .into_iter()
    .filter_map(|(on, mode)| on.then_some(mode))
    .collect();
    match chosen.as_slice() {
        [one] => Ok(*one),
        [] => Err(usage(
            "pick one of --total-vol, --hypersurface, --eps-vol, --rel-vol, --stirling, \
             --ti-bound, --delta-ti-bound, --fig1",
        )),
        _ => Err(usage("pick exactly one analytic mode flag")),
    }
}

fn ti_spec(
    d: Option<u32>,
    t: Option<u32>,
    n: Option<u32>,
    m: Option<u32>,
    file: &FileConfig,
    k: f64,
    for_delta: bool,
) -> Result<TiBoundSpec> {
    let what = if for_delta {
        "--delta-ti-bound"
    } else {
        "--ti-bound"
    };
    let d = file
        .resolve_opt(d, "d")?
        .ok_or_else(|| usage(format!("{what} needs --d")))?;
    let t = file
        .resolve_opt(t, "t")?
        .ok_or_else(|| usage(format!("{what} needs --t")))?;
    let n = file
        .resolve_opt(n, "n")?
        .ok_or_else(|| usage(format!("{what} needs --n")))?;
    let m = file
        .resolve_opt(m, "M")?
        .ok_or_else(|| usage(format!("{what} needs --M")))?;
    Ok(TiBoundSpec::new(d, t, n, m, k)?)
}

fn to_csv(payload: &Payload) -> String {
    match payload {
        Payload::Rows(rows) => {
            let header = [
                "quantity",
                "dim",
                "trace_bound",
                "fixed_states",
                "epsilon",
                "field",
                "sign",
                "ln_abs",
                "log10_abs",
                "value",
                "approximation_strained",
                "epsilon_max_ln_abs",
                "epsilon_within_bound",
            ];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut cells = vec![
                        r.quantity.to_string(),
                        r.dim.map_or_else(String::new, |v| v.to_string()),
                        r.trace_bound.map_or_else(String::new, fmt_e),
                        r.fixed_states.map_or_else(String::new, |v| v.to_string()),
                        r.epsilon.map_or_else(String::new, fmt_e),
                        r.field.map_or_else(String::new, |f| f.to_string()),
                    ];
                    cells.extend(r.value.csv_cells());
                    cells.push(
                        r.approximation_strained
                            .map_or_else(String::new, |v| v.to_string()),
                    );
                    cells.push(
                        r.epsilon_max
                            .and_then(|v| v.ln_abs)
                            .map_or_else(String::new, fmt_e),
                    );
                    cells.push(
                        r.epsilon_within_bound
                            .map_or_else(String::new, |v| v.to_string()),
                    );
                    cells
                })
                .collect();
            csv_document(&header, &body)
        }
        Payload::Fig1 { epsilons, series } => {
            let mut header: Vec<String> = vec!["epsilon".to_string()];
            header.extend(series.iter().map(|s| format!("log10_rel_vol_N{}", s.dim)));
            let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let rows: Vec<Vec<String>> = epsilons
                .iter()
                .enumerate()
                .map(|(i, &eps)| {
                    let mut row = vec![fmt_e(eps)];
                    row.extend(series.iter().map(|s| fmt_e(s.log10_rel_vol[i])));
                    row
                })
                .collect();
            csv_document(&header_refs, &rows)
        }
    }
}
