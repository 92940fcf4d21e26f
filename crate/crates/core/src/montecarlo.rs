//! Monte Carlo estimation of relative volumes with confidence intervals.
//!
//! Trials share their samples across the whole epsilon grid: each trial
//! produces one overlap magnitude, which is tested against every grid point,
//! so the empirical curve is exactly (not statistically) monotone and one
//! eigensolve serves all tolerances. Trials are partitioned into
//! counter-indexed substreams and integer hit counts merge associatively, so
//! results are identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::ensembles::{sample_haar_state, sample_hamiltonian, EnsembleSpec, PureState};
use crate::special::{inverse_normal_cdf, reg_inc_beta};
use crate::spectra::{ground_state, hit_from_magnitude, CriterionKind, HitCriterion};
use crate::streams::StreamFactory;
use crate::{Error, Result, ScalarField};

/// How a relative-volume estimate draws its ground-state directions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Draw a Haar state standing in for the ground direction. Exact for the
    /// unrestricted ensemble because the factorized measure makes the ground
    /// direction independent of the spectrum; the default and the fast path.
    #[default]
    EigvecOnly,
    /// Draw the full Hamiltonian and extract its ground state; the
    /// validation path.
    FullH,
}

/// Confidence-interval method.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    /// Score interval; the default.
    #[default]
    Wilson,
    /// Exact binomial (Clopper-Pearson), for small counts.
    ClopperPearson,
}

/// Options shared by the estimate entry points.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub mode: SamplingMode,
    pub ci_method: CiMethod,
    pub confidence: f64,
    pub rel_gap_tol: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            mode: SamplingMode::EigvecOnly,
            ci_method: CiMethod::Wilson,
            confidence: 0.99,
            rel_gap_tol: crate::spectra::DEFAULT_REL_GAP_TOL,
        }
    }
}

/// Empirical relative-volume curve over an epsilon grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCurve {
    pub epsilons: Vec<f64>,
    pub hits: Vec<u64>,
    pub trials: u64,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub confidence: f64,
    pub criterion: CriterionKind,
    /// Draws whose ground state was flagged degenerate; counted as misses.
    pub degenerate_count: u64,
}

impl EmpiricalCurve {
    /// Assemble a curve from raw hit counts, attaching two-sided interval
    /// bounds. Counts must be nondecreasing across the (ascending) grid:
    /// curves built from shared samples are monotone by construction, and
    /// synthetic curves must honor the same invariant.
    pub fn new(
        epsilons: Vec<f64>,
        hits: Vec<u64>,
        trials: u64,
        criterion: CriterionKind,
        degenerate_count: u64,
        ci_method: CiMethod,
        confidence: f64,
    ) -> Result<Self> {
        validate_grid(&epsilons)?;
        if hits.len() != epsilons.len() {
            return Err(Error::DimensionMismatch {
                left: hits.len(),
                right: epsilons.len(),
            });
        }
        if hits.iter().any(|&h| h > trials) {
            return Err(Error::invalid("hits", "hit counts cannot exceed trials"));
        }
        if hits.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid(
                "hits",
                "hit counts must be nondecreasing across the epsilon grid",
            ));
        }
        let mut ci_low = Vec::with_capacity(hits.len());
        let mut ci_high = Vec::with_capacity(hits.len());
        for &h in &hits {
            let (lo, hi) = match ci_method {
                CiMethod::Wilson => wilson_interval(h, trials, confidence)?,
                CiMethod::ClopperPearson => clopper_pearson_interval(h, trials, confidence)?,
            };
            ci_low.push(lo);
            ci_high.push(hi);
        }
        Ok(EmpiricalCurve {
            epsilons,
            hits,
            trials,
            ci_low,
            ci_high,
            confidence,
            criterion,
            degenerate_count,
        })
    }

    /// Point estimates `hits / trials`.
    pub fn estimates(&self) -> Vec<f64> {
        self.hits
            .iter()
            .map(|&h| h as f64 / self.trials as f64)
            .collect()
    }
}

/// Validate an epsilon grid: nonempty, strictly ascending, within [0, 1].
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "epsilon grid must be nonempty"));
    }
    if grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::invalid("grid", "epsilon values must lie in [0, 1]"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "grid",
            "epsilon grid must be strictly ascending",
        ));
    }
    Ok(())
}

pub(crate) enum TrialOutcome {
    Magnitude(f64),
    Degenerate,
}

/// Run `trials` independent trials, testing each resulting overlap magnitude
/// against the full grid. Counts merge associatively, so the tally is
/// schedule-independent.
pub(crate) fn tally<F>(
    trials: u64,
    grid: &[f64],
    kind: CriterionKind,
    trial_fn: F,
) -> (Vec<u64>, u64)
where
    F: Fn(u64) -> TrialOutcome + Sync,
{
    let zero = || (vec![0u64; grid.len()], 0u64);
    (0..trials)
        .into_par_iter()
        .fold(zero, |(mut counts, mut degenerate), index| {
            match trial_fn(index) {
                TrialOutcome::Magnitude(m) => {
                    for (count, &epsilon) in counts.iter_mut().zip(grid) {
                        if hit_from_magnitude(m, &HitCriterion { kind, epsilon }) {
                            *count += 1;
                        }
                    }
                }
                TrialOutcome::Degenerate => degenerate += 1,
            }
            (counts, degenerate)
        })
        .reduce(zero, |(mut a, da), (b, db)| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            (a, da + db)
        })
}

/// Wilson score interval for a binomial proportion, clamped to [0, 1].
pub fn wilson_interval(hits: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials < 1 || hits > trials {
        return Err(Error::invalid(
            "hits",
            format!("need 0 <= hits <= trials with trials >= 1, got {hits}/{trials}"),
        ));
    }
    if confidence.is_nan() || confidence <= 0.0 || confidence >= 1.0 {
        return Err(Error::invalid(
            "confidence",
            "confidence must lie in (0, 1)",
        ));
    }
    let z = inverse_normal_cdf(0.5 * (1.0 + confidence))?;
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let margin = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Ok((
        (center - margin).clamp(0.0, 1.0),
        (center + margin).clamp(0.0, 1.0),
    ))
}

/// Exact (Clopper-Pearson) binomial interval via beta-quantile bisection.
pub fn clopper_pearson_interval(hits: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials < 1 || hits > trials {
        return Err(Error::invalid(
            "hits",
            format!("need 0 <= hits <= trials with trials >= 1, got {hits}/{trials}"),
        ));
    }
    if confidence.is_nan() || confidence <= 0.0 || confidence >= 1.0 {
        return Err(Error::invalid(
            "confidence",
            "confidence must lie in (0, 1)",
        ));
    }
    let alpha = 1.0 - confidence;
    let n = trials as f64;
    let h = hits as f64;
    let low = if hits == 0 {
        0.0
    } else {
        beta_quantile(alpha / 2.0, h, n - h + 1.0)?
    };
    let high = if hits == trials {
        1.0
    } else {
        beta_quantile(1.0 - alpha / 2.0, h + 1.0, n - h)?
    };
    Ok((low, high))
}

/// Quantile of Beta(a, b) by bisection on the regularized incomplete beta.
fn beta_quantile(p: f64, a: f64, b: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if reg_inc_beta(mid, a, b)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact probability that a Haar-random state lands within tolerance of a
/// fixed target: the squared overlap follows Beta(1, N-1) in the complex
/// case and Beta(1/2, (N-1)/2) in the real case, so the tail is available in
/// closed form.
pub fn exact_haar_tail(
    dim: usize,
    epsilon: f64,
    field: ScalarField,
    kind: CriterionKind,
) -> Result<f64> {
    if dim < 2 {
        return Err(Error::invalid("dim", "the overlap law requires N >= 2"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::invalid("epsilon", "tolerance must lie in [0, 1]"));
    }
    let m = dim as f64;
    Ok(match (field, kind) {
        // P(p >= 1 - eps) with p ~ Beta(1, N-1): (eps)^(N-1).
        (ScalarField::Complex, CriterionKind::Fidelity) => epsilon.powi(dim as i32 - 1),
        // P(sqrt(p) >= 1 - eps) = (2 eps - eps^2)^(N-1).
        (ScalarField::Complex, CriterionKind::Overlap) => {
            (epsilon * (2.0 - epsilon)).powi(dim as i32 - 1)
        }
        (ScalarField::Real, k) => {
            let threshold = match k {
                CriterionKind::Fidelity => 1.0 - epsilon,
                CriterionKind::Overlap => (1.0 - epsilon) * (1.0 - epsilon),
            };
            1.0 - reg_inc_beta(threshold, 0.5, 0.5 * (m - 1.0))?
        }
    })
}

/// Estimate the relative volume of parent Hamiltonians of `target` over the
/// epsilon grid. All grid points share the same trials.
pub fn estimate_unrestricted(
    spec: &EnsembleSpec,
    target: &PureState,
    grid: &[f64],
    trials: u64,
    kind: CriterionKind,
    options: &EstimateOptions,
) -> Result<EmpiricalCurve> {
    validate_grid(grid)?;
    if trials < 1 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    if target.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            left: target.dim(),
            right: spec.dim,
        });
    }
    if options.mode == SamplingMode::FullH && spec.field != ScalarField::Complex {
        return Err(Error::invalid(
            "mode",
            "full-Hamiltonian sampling is only available for the complex ensemble",
        ));
    }

    let factory = StreamFactory::new(spec.master_seed);
    let (hits, degenerate_count) = match options.mode {
        SamplingMode::EigvecOnly => tally(trials, grid, kind, |index| {
            let mut rng = factory.substream(index);
            let state = sample_haar_state(spec.dim, spec.field, &mut rng);
            TrialOutcome::Magnitude(
                target
                    .overlap_magnitude(&state)
                    .expect("dimensions checked above"),
            )
        }),
        SamplingMode::FullH => tally(trials, grid, kind, |index| {
            let mut rng = factory.substream(index);
            let h = sample_hamiltonian(spec, &mut rng).expect("spec validated above");
            let ground = ground_state(&h, options.rel_gap_tol).expect("sampled H is Hermitian");
            if ground.degenerate {
                TrialOutcome::Degenerate
            } else {
                TrialOutcome::Magnitude(
                    target
                        .overlap_magnitude(&ground.state)
                        .expect("dimensions checked above"),
                )
            }
        }),
    };

    EmpiricalCurve::new(
        grid.to_vec(),
        hits,
        trials,
        kind,
        degenerate_count,
        options.ci_method,
        options.confidence,
    )
}

/// One grid point of a comparison report.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub epsilon: f64,
    pub mc_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Linear-in-epsilon closed form of the relative volume.
    pub closed_form: f64,
    /// Exact Haar overlap-law tail for the same event.
    pub haar_tail: f64,
}

/// Side-by-side comparison of the Monte Carlo estimate, the closed-form
/// relative volume, and the exact Haar tail. The report is the deliverable;
/// no reconciliation between the two predictions is asserted, and their
/// scalings genuinely differ for N > 2 (linear versus power N-1).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub dim: usize,
    pub field: ScalarField,
    pub criterion: CriterionKind,
    pub trials: u64,
    pub confidence: f64,
    pub degenerate_count: u64,
    pub rows: Vec<ComparisonRow>,
}

/// Attach the closed-form and exact-tail columns to an existing curve.
pub fn comparison_from_curve(
    curve: &EmpiricalCurve,
    dim: usize,
    field: ScalarField,
) -> Result<ComparisonReport> {
    if dim < 2 {
        return Err(Error::invalid("dim", "comparison requires N >= 2"));
    }
    let estimates = curve.estimates();
    let mut rows = Vec::with_capacity(curve.epsilons.len());
    for (i, &epsilon) in curve.epsilons.iter().enumerate() {
        let closed_form = analytic::relative_volume(dim as u32, epsilon, field)?.to_real();
        let haar_tail = exact_haar_tail(dim, epsilon, field, curve.criterion)?;
        rows.push(ComparisonRow {
            epsilon,
            mc_estimate: estimates[i],
            ci_low: curve.ci_low[i],
            ci_high: curve.ci_high[i],
            closed_form,
            haar_tail,
        });
    }
    Ok(ComparisonReport {
        dim,
        field,
        criterion: curve.criterion,
        trials: curve.trials,
        confidence: curve.confidence,
        degenerate_count: curve.degenerate_count,
        rows,
    })
}

/// Build a [`ComparisonReport`] over the grid. The target is a fixed basis
/// state; by unitary invariance of the ensemble the choice is immaterial.
pub fn compare_with_closed_forms(
    spec: &EnsembleSpec,
    grid: &[f64],
    trials: u64,
    kind: CriterionKind,
    options: &EstimateOptions,
) -> Result<ComparisonReport> {
    if spec.dim < 2 {
        return Err(Error::invalid("dim", "comparison requires N >= 2"));
    }
    let target = PureState::basis_state(spec.dim, 0);
    let curve = estimate_unrestricted(spec, &target, grid, trials, kind, options)?;
    comparison_from_curve(&curve, spec.dim, spec.field)
}
