//! Volume calculus for parent Hamiltonians.
//!
//! The crate computes, in exact log-space arithmetic, the closed-form volumes
//! of bounded-trace positive Hamiltonian manifolds and their restrictions
//! (fixed eigenstates, tolerance neighborhoods of a target ground state,
//! locality bounds), samples Hamiltonians from the unitarily-invariant
//! Hilbert-Schmidt ensemble, and estimates relative volumes by Monte Carlo
//! with confidence intervals. A transverse-field Ising benchmark and a
//! Beta-CDF fitter round out the toolkit; everything is driven by the
//! `hamvol` CLI in the companion crate.

pub mod analytic;
pub mod betafit;
pub mod ensembles;
mod error;
pub mod hash;
pub mod ising;
pub mod logspace;
pub mod montecarlo;
pub mod special;
pub mod spectra;
pub mod streams;
pub mod validate;

pub use analytic::{ManifoldSpec, TiBoundSpec};
pub use ensembles::{EnsembleSpec, HermitianOperator, PureState};
pub use error::Error;
pub use logspace::LogValue;
pub use montecarlo::{EmpiricalCurve, SamplingMode};
pub use spectra::{CriterionKind, HitCriterion, SpectralDecomposition};
pub use streams::StreamFactory;

use serde::{Deserialize, Serialize};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Scalar field of the Hamiltonian entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Complex,
    Real,
}

impl std::fmt::Display for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarField::Complex => write!(f, "complex"),
            ScalarField::Real => write!(f, "real"),
        }
    }
}
