pub mod analytic;
pub mod fit;
pub mod ising;
pub mod mc;
pub mod verify;

use crate::args::{CiArg, CriterionArg, FieldArg, ModeArg};
use hamvol_core::montecarlo::{CiMethod, SamplingMode};
use hamvol_core::spectra::CriterionKind;
use hamvol_core::{LogValue, ScalarField};
use serde::Serialize;

impl From<FieldArg> for ScalarField {
    fn from(value: FieldArg) -> Self {
        match value {
            FieldArg::Complex => ScalarField::Complex,
            FieldArg::Real => ScalarField::Real,
        }
    }
}

impl From<CriterionArg> for CriterionKind {
    fn from(value: CriterionArg) -> Self {
        match value {
            CriterionArg::Overlap => CriterionKind::Overlap,
            CriterionArg::Fidelity => CriterionKind::Fidelity,
        }
    }
}

impl From<ModeArg> for SamplingMode {
    fn from(value: ModeArg) -> Self {
        match value {
            ModeArg::Eigvec => SamplingMode::EigvecOnly,
            ModeArg::FullH => SamplingMode::FullH,
        }
    }
}

impl From<CiArg> for CiMethod {
    fn from(value: CiArg) -> Self {
        match value {
            CiArg::Wilson => CiMethod::Wilson,
            CiArg::ClopperPearson => CiMethod::ClopperPearson,
        }
    }
}

/// Log-space value as it appears in reports: the sign, both logs, and the
/// `f64` rendering when it is finite and nonzero (absent when the magnitude
/// falls outside native range).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogValueOut {
    pub sign: i8,
    pub ln_abs: Option<f64>,
    pub log10_abs: Option<f64>,
    pub value: Option<f64>,
}

impl From<LogValue> for LogValueOut {
    fn from(v: LogValue) -> Self {
        let nonzero = v.sign() != 0;
        let real = v.to_real();
        LogValueOut {
            sign: v.sign(),
            ln_abs: nonzero.then(|| v.log_abs()),
            log10_abs: nonzero.then(|| v.log10_abs()),
            value: (real.is_finite()).then_some(real),
        }
    }
}

impl LogValueOut {
    /// CSV cells: sign, ln_abs, log10_abs, value.
    pub fn csv_cells(&self) -> Vec<String> {
        vec![
            self.sign.to_string(),
            self.ln_abs
                .map_or_else(|| "-inf".into(), crate::output::fmt_e),
            self.log10_abs
                .map_or_else(|| "-inf".into(), crate::output::fmt_e),
            self.value.map_or_else(|| "".into(), crate::output::fmt_e),
        ]
    }
}
