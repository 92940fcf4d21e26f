//! Ordered eigensolutions, ground-state extraction, and hit criteria.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{HermitianOperator, PureState, Storage};
use crate::{Error, Result};

/// Default relative spectral-gap threshold below which a ground state is
/// flagged degenerate.
pub const DEFAULT_REL_GAP_TOL: f64 = 1e-10;

/// Real-symmetric matrices at or above this dimension go through the faer
/// eigensolver, which is substantially faster there; smaller problems stay
/// on nalgebra.
const FAER_DIM_THRESHOLD: usize = 128;

/// Full eigensystem of a Hermitian operator, eigenvalues ascending,
/// eigenvector columns aligned with them.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: EigenBasis,
}

#[derive(Clone, Debug)]
enum EigenBasis {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Spectral gap `lambda_2 - lambda_1`; infinite for one-dimensional
    /// operators, whose ground state is unique by construction.
    pub fn gap(&self) -> f64 {
        if self.eigenvalues.len() < 2 {
            f64::INFINITY
        } else {
            self.eigenvalues[1] - self.eigenvalues[0]
        }
    }

    /// Eigenvector paired with the i-th eigenvalue, as a normalized state.
    pub fn eigenvector(&self, index: usize) -> PureState {
        let v: DVector<Complex64> = match &self.eigenvectors {
            EigenBasis::Real(m) => {
                DVector::from_fn(m.nrows(), |r, _| Complex64::new(m[(r, index)], 0.0))
            }
            EigenBasis::Complex(m) => DVector::from_fn(m.nrows(), |r, _| m[(r, index)]),
        };
        PureState::normalized(v).expect("eigenvector columns are unit norm")
    }

    /// `max |H - V diag(lambda) V†|` over entries, for validation.
    pub fn reconstruction_defect(&self, h: &HermitianOperator) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        match &self.eigenvectors {
            EigenBasis::Real(v) => {
                let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
                let rebuilt = v * lambda * v.transpose();
                for i in 0..n {
                    for j in 0..n {
                        worst = worst.max((rebuilt[(i, j)] - h.entry(i, j).re).abs());
                    }
                }
            }
            EigenBasis::Complex(v) => {
                let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
                    n,
                    self.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)),
                ));
                let rebuilt = v * lambda * v.adjoint();
                for i in 0..n {
                    for j in 0..n {
                        worst = worst.max((rebuilt[(i, j)] - h.entry(i, j)).norm());
                    }
                }
            }
        }
        worst
    }

    /// `max |V†V - 1|` over entries.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        match &self.eigenvectors {
            EigenBasis::Real(v) => {
                let g = v.transpose() * v;
                for i in 0..n {
                    for j in 0..n {
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((g[(i, j)] - target).abs());
                    }
                }
            }
            EigenBasis::Complex(v) => {
                let g = v.adjoint() * v;
                for i in 0..n {
                    for j in 0..n {
                        let target = if i == j {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        worst = worst.max((g[(i, j)] - target).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Ground eigenpair with a degeneracy flag; degeneracy is diagnostic, never
/// fatal.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: PureState,
    pub degenerate: bool,
    /// Relative gap `(lambda_2 - lambda_1) / max(|lambda_N|, 1)` that the
    /// flag was judged on.
    pub relative_gap: f64,
}

/// Full eigendecomposition with ascending eigenvalue order.
pub fn decompose(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    // Constructors already enforce Hermiticity; re-check cheaply in case the
    // operator was built from raw parts in a test.
    let scale = h.max_abs_entry().max(f64::MIN_POSITIVE);
    let defect = h.hermiticity_defect();
    if defect > 1e-10 * scale {
        return Err(Error::NotHermitian {
            defect,
            tolerance: 1e-10 * scale,
        });
    }

    match h.storage() {
        Storage::Real(m) if m.nrows() >= FAER_DIM_THRESHOLD => decompose_real_faer(m),
        Storage::Real(m) => {
            let se = m.clone().symmetric_eigen();
            let (eigenvalues, order) = ascending_order(se.eigenvalues.as_slice());
            let vectors = permute_columns_real(&se.eigenvectors, &order);
            Ok(SpectralDecomposition {
                eigenvalues,
                eigenvectors: EigenBasis::Real(vectors),
            })
        }
        Storage::Complex(m) => {
            let se = m.clone().symmetric_eigen();
            let (eigenvalues, order) = ascending_order(se.eigenvalues.as_slice());
            let n = m.nrows();
            let mut vectors = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            for (dst, &src) in order.iter().enumerate() {
                vectors.set_column(dst, &se.eigenvectors.column(src));
            }
            Ok(SpectralDecomposition {
                eigenvalues,
                eigenvectors: EigenBasis::Complex(vectors),
            })
        }
    }
}

fn decompose_real_faer(m: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let n = m.nrows();
    let fm = faer::Mat::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::invalid("matrix", format!("eigendecomposition failed: {e:?}")))?;
    // faer returns eigenvalues in nondecreasing order already.
    let eigenvalues: Vec<f64> = (0..n).map(|i| evd.S()[i]).collect();
    let u = evd.U();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: EigenBasis::Real(vectors),
    })
}

fn ascending_order(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("finite eigenvalues")
    });
    (order.iter().map(|&i| values[i]).collect(), order)
}

fn permute_columns_real(m: &DMatrix<f64>, order: &[usize]) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        out.set_column(dst, &m.column(src));
    }
    out
}

/// Lowest eigenpair with a degeneracy flag based on the relative gap
/// `(lambda_2 - lambda_1) / max(|lambda_N|, 1) < rel_gap_tol`.
pub fn ground_state(h: &HermitianOperator, rel_gap_tol: f64) -> Result<GroundState> {
    let decomp = decompose(h)?;
    Ok(ground_state_of(&decomp, rel_gap_tol))
}

/// Ground-state view of an existing decomposition.
pub fn ground_state_of(decomp: &SpectralDecomposition, rel_gap_tol: f64) -> GroundState {
    let eigs = decomp.eigenvalues();
    let relative_gap = if eigs.len() < 2 {
        f64::INFINITY
    } else {
        let scale = eigs[eigs.len() - 1].abs().max(1.0);
        (eigs[1] - eigs[0]) / scale
    };
    GroundState {
        energy: eigs[0],
        state: decomp.eigenvector(0),
        degenerate: relative_gap < rel_gap_tol,
        relative_gap,
    }
}

/// Which closeness notion a hit test uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionKind {
    /// `|<target|candidate>| >= 1 - epsilon`
    Overlap,
    /// `|<target|candidate>|^2 >= 1 - epsilon`
    Fidelity,
}

impl std::fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CriterionKind::Overlap => write!(f, "overlap"),
            CriterionKind::Fidelity => write!(f, "fidelity"),
        }
    }
}

/// A hit criterion: kind plus tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitCriterion {
    pub kind: CriterionKind,
    pub epsilon: f64,
}

impl HitCriterion {
    pub fn new(kind: CriterionKind, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::invalid("epsilon", "tolerance must lie in [0, 1]"));
        }
        Ok(HitCriterion { kind, epsilon })
    }
}

/// Whether `candidate` is within tolerance of `target`; invariant under a
/// global phase on either state.
pub fn hit(candidate: &PureState, target: &PureState, criterion: &HitCriterion) -> Result<bool> {
    let magnitude = target.overlap_magnitude(candidate)?;
    Ok(hit_from_magnitude(magnitude, criterion))
}

/// Hit test given a precomputed overlap magnitude `|<target|candidate>|`;
/// the sweep engines evaluate one magnitude per trial and reuse it across
/// the whole epsilon grid.
pub fn hit_from_magnitude(magnitude: f64, criterion: &HitCriterion) -> bool {
    match criterion.kind {
        CriterionKind::Overlap => magnitude >= 1.0 - criterion.epsilon,
        CriterionKind::Fidelity => magnitude * magnitude >= 1.0 - criterion.epsilon,
    }
}
