//! Statistical validators for the samplers and the Monte Carlo engine.
//!
//! Each check is split into a pure scoring function over precomputed data
//! (so tests can feed deliberately corrupted samples as a negative control)
//! and an orchestrator in [`run_all`] that generates the data from fixed
//! seeds. Checks report a named outcome with the test statistic and, where
//! applicable, a p-value judged against the configured significance.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{
    sample_haar_state, sample_haar_unitary, sample_hamiltonian, EnsembleSpec, PureState,
};
use crate::montecarlo::{estimate_unrestricted, exact_haar_tail, EstimateOptions, SamplingMode};
use crate::special::reg_inc_gamma_upper;
use crate::spectra::{ground_state, CriterionKind, DEFAULT_REL_GAP_TOL};
use crate::streams::StreamFactory;
use crate::{Result, ScalarField};

/// Outcome of a named validation check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub threshold: f64,
    pub detail: String,
}

/// Configuration of the validator suite.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ValidatorConfig {
    pub master_seed: u64,
    pub trials: u64,
    pub significance: f64,
}

impl Default for ValidatorConfig {
    fn default() -> Self {
        ValidatorConfig {
            master_seed: 7,
            trials: 100_000,
            significance: 0.01,
        }
    }
}

impl ValidatorConfig {
    /// Reduced trial counts for fast smoke runs; same checks.
    pub fn quick(self) -> Self {
        ValidatorConfig {
            trials: (self.trials / 10).max(1_000),
            ..self
        }
    }
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Asymptotic Kolmogorov p-value with Stephens' finite-n correction.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut p = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64 * lambda).powi(2)).exp();
        p += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov statistic and p-value.
pub fn two_sample_ks(a: &mut [f64], b: &mut [f64]) -> (f64, f64) {
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    let (n, m) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let n_eff = (n * m) as f64 / (n + m) as f64;
    (d, ks_p_value(d, n_eff))
}

/// Chi-square goodness of fit with equal-probability bins through the model
/// CDF; returns the statistic and its upper-tail p-value at `bins - 1`
/// degrees of freedom.
pub fn chi_square_gof(samples: &[f64], cdf: impl Fn(f64) -> f64, bins: usize) -> (f64, f64) {
    let mut counts = vec![0u64; bins];
    for &x in samples {
        let u = cdf(x).clamp(0.0, 1.0 - 1e-15);
        counts[(u * bins as f64) as usize] += 1;
    }
    let expected = samples.len() as f64 / bins as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let diff = c as f64 - expected;
            diff * diff / expected
        })
        .sum();
    let dof = (bins - 1) as f64;
    let p = reg_inc_gamma_upper(0.5 * dof, 0.5 * stat).unwrap_or(0.0);
    (stat, p)
}

fn ks_check(
    name: &str,
    mut samples: Vec<f64>,
    cdf: impl Fn(f64) -> f64,
    significance: f64,
    detail: String,
) -> CheckOutcome {
    let n = samples.len() as f64;
    let d = ks_statistic(&mut samples, cdf);
    let p = ks_p_value(d, n);
    CheckOutcome {
        name: name.to_string(),
        passed: p >= significance,
        statistic: d,
        p_value: Some(p),
        threshold: significance,
        detail,
    }
}

/// KS test of sampled Hamiltonian traces against the law `(t/k)^(N^2)`.
pub fn trace_law_check(
    name: &str,
    traces: Vec<f64>,
    dim: usize,
    trace_bound: f64,
    significance: f64,
) -> CheckOutcome {
    let exponent = (dim * dim) as f64;
    let detail = format!(
        "KS of {} traces against (t/{trace_bound})^{exponent}",
        traces.len()
    );
    ks_check(
        name,
        traces,
        move |t| (t / trace_bound).clamp(0.0, 1.0).powf(exponent),
        significance,
        detail,
    )
}

/// Chi-square test of squared ground-direction overlaps against the
/// Haar marginal `Beta(1, N-1)` with density `(N-1)(1-p)^(N-2)`.
pub fn ground_overlap_law_check(
    name: &str,
    overlaps_sq: &[f64],
    dim: usize,
    significance: f64,
) -> CheckOutcome {
    let n_minus_one = (dim - 1) as f64;
    let cdf = move |p: f64| 1.0 - (1.0 - p.clamp(0.0, 1.0)).powf(n_minus_one);
    let (stat, p) = chi_square_gof(overlaps_sq, cdf, 20);
    CheckOutcome {
        name: name.to_string(),
        passed: p >= significance,
        statistic: stat,
        p_value: Some(p),
        threshold: significance,
        detail: format!(
            "chi-square of {} overlaps against Beta(1, {}) in 20 equal-probability bins",
            overlaps_sq.len(),
            dim - 1
        ),
    }
}

/// Hard cap on the worst unitarity defect across draws.
pub fn unitarity_check(name: &str, max_defects: &[f64], cap: f64) -> CheckOutcome {
    let worst = max_defects.iter().copied().fold(0.0f64, f64::max);
    CheckOutcome {
        name: name.to_string(),
        passed: worst <= cap,
        statistic: worst,
        p_value: None,
        threshold: cap,
        detail: format!("worst |U†U - 1| entry over {} draws", max_defects.len()),
    }
}

/// Two-sample KS between matrix elements with and without a fixed
/// conjugation, probing unitary invariance of the ensemble.
pub fn haar_invariance_check(
    name: &str,
    plain: &mut [f64],
    conjugated: &mut [f64],
    significance: f64,
) -> CheckOutcome {
    let (d, p) = two_sample_ks(plain, conjugated);
    CheckOutcome {
        name: name.to_string(),
        passed: p >= significance,
        statistic: d,
        p_value: Some(p),
        threshold: significance,
        detail: format!(
            "two-sample KS over {} + {} draws of <0|H|0> vs <0|VHV†|0>",
            plain.len(),
            conjugated.len()
        ),
    }
}

/// Fraction of (N, epsilon) cells whose 99% interval contains the exact Haar
/// tail; passes at 95% containment.
pub fn oracle_agreement_check(cfg: &ValidatorConfig) -> Result<CheckOutcome> {
    let grid = [0.05, 0.1, 0.2, 0.3];
    let opts = EstimateOptions::default();
    let mut contained = 0usize;
    let mut total = 0usize;
    let mut misses = Vec::new();
    for dim in 2..=6usize {
        let spec = EnsembleSpec::new(
            dim,
            1.0,
            ScalarField::Complex,
            cfg.master_seed.wrapping_add(1000 + dim as u64),
        )?;
        let target = PureState::basis_state(dim, 0);
        let curve = estimate_unrestricted(
            &spec,
            &target,
            &grid,
            cfg.trials,
            CriterionKind::Overlap,
            &opts,
        )?;
        for (i, &eps) in grid.iter().enumerate() {
            let oracle = exact_haar_tail(dim, eps, ScalarField::Complex, CriterionKind::Overlap)?;
            total += 1;
            if curve.ci_low[i] <= oracle && oracle <= curve.ci_high[i] {
                contained += 1;
            } else {
                misses.push(format!("(N={dim}, eps={eps})"));
            }
        }
    }
    let fraction = contained as f64 / total as f64;
    Ok(CheckOutcome {
        name: "oracle_agreement".to_string(),
        passed: fraction >= 0.95,
        statistic: fraction,
        p_value: None,
        threshold: 0.95,
        detail: if misses.is_empty() {
            format!("oracle inside the 99% CI in {contained}/{total} cells")
        } else {
            format!(
                "oracle inside the 99% CI in {contained}/{total} cells; missed {}",
                misses.join(", ")
            )
        },
    })
}

/// Full-Hamiltonian and eigenvector-only estimates must agree within their
/// combined intervals (the factorized measure makes the ground direction
/// independent of the spectrum).
pub fn mode_consistency_check(cfg: &ValidatorConfig) -> Result<CheckOutcome> {
    let dim = 3;
    let grid = [0.2];
    let spec = EnsembleSpec::new(
        dim,
        1.0,
        ScalarField::Complex,
        cfg.master_seed.wrapping_add(2000),
    )?;
    let target = PureState::basis_state(dim, 0);
    let eigvec = estimate_unrestricted(
        &spec,
        &target,
        &grid,
        cfg.trials,
        CriterionKind::Overlap,
        &EstimateOptions::default(),
    )?;
    let spec_full = EnsembleSpec::new(
        dim,
        1.0,
        ScalarField::Complex,
        cfg.master_seed.wrapping_add(3000),
    )?;
    let full = estimate_unrestricted(
        &spec_full,
        &target,
        &grid,
        cfg.trials,
        CriterionKind::Overlap,
        &EstimateOptions {
            mode: SamplingMode::FullH,
            ..EstimateOptions::default()
        },
    )?;
    let overlap_intervals =
        eigvec.ci_low[0] <= full.ci_high[0] && full.ci_low[0] <= eigvec.ci_high[0];
    let diff = (eigvec.estimates()[0] - full.estimates()[0]).abs();
    Ok(CheckOutcome {
        name: "mode_consistency".to_string(),
        passed: overlap_intervals,
        statistic: diff,
        p_value: None,
        threshold: (eigvec.ci_high[0] - eigvec.ci_low[0]) + (full.ci_high[0] - full.ci_low[0]),
        detail: format!(
            "eigvec {:.5} in [{:.5}, {:.5}] vs full-H {:.5} in [{:.5}, {:.5}]",
            eigvec.estimates()[0],
            eigvec.ci_low[0],
            eigvec.ci_high[0],
            full.estimates()[0],
            full.ci_low[0],
            full.ci_high[0]
        ),
    })
}

/// Run the whole validator suite with seeds derived from the config.
pub fn run_all(cfg: &ValidatorConfig) -> Result<Vec<CheckOutcome>> {
    let mut outcomes = Vec::new();
    let sig = cfg.significance;

    // Trace law of sampled Hamiltonians at (N, k) = (2, 1).
    {
        let spec = EnsembleSpec::new(2, 1.0, ScalarField::Complex, cfg.master_seed)?;
        let factory = StreamFactory::new(spec.master_seed);
        let traces: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = factory.substream(i);
                sample_hamiltonian(&spec, &mut rng)
                    .expect("valid spec")
                    .trace()
            })
            .collect();
        outcomes.push(trace_law_check(
            "hamiltonian_trace_law",
            traces,
            2,
            1.0,
            sig,
        ));
    }

    // Trace law of the eigenvalue sampler at the same point.
    {
        let spec = EnsembleSpec::new(
            2,
            1.0,
            ScalarField::Complex,
            cfg.master_seed.wrapping_add(100),
        )?;
        let factory = StreamFactory::new(spec.master_seed);
        let sums: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = factory.substream(i);
                crate::ensembles::sample_eigenvalues(&spec, &mut rng)
                    .expect("valid spec")
                    .iter()
                    .sum()
            })
            .collect();
        outcomes.push(trace_law_check("eigenvalue_trace_law", sums, 2, 1.0, sig));
    }

    // Ground-direction overlap law at N = 3.
    {
        let spec = EnsembleSpec::new(
            3,
            1.0,
            ScalarField::Complex,
            cfg.master_seed.wrapping_add(200),
        )?;
        let factory = StreamFactory::new(spec.master_seed);
        let target = PureState::basis_state(3, 0);
        let overlaps: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = factory.substream(i);
                let h = sample_hamiltonian(&spec, &mut rng).expect("valid spec");
                let g = ground_state(&h, DEFAULT_REL_GAP_TOL).expect("Hermitian");
                target.fidelity(&g.state).expect("same dimension")
            })
            .collect();
        outcomes.push(ground_overlap_law_check(
            "ground_overlap_law",
            &overlaps,
            3,
            sig,
        ));
    }

    // Haar unitarity defect at N = 4.
    {
        let factory = StreamFactory::new(cfg.master_seed.wrapping_add(300));
        let defects: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = factory.substream(i);
                let u = sample_haar_unitary(4, &mut rng);
                unitarity_defect(&u)
            })
            .collect();
        outcomes.push(unitarity_check("haar_unitarity", &defects, 1e-12));
    }

    // Unitary invariance of <0|H|0> under a fixed conjugation at N = 3.
    {
        let spec = EnsembleSpec::new(
            3,
            1.0,
            ScalarField::Complex,
            cfg.master_seed.wrapping_add(400),
        )?;
        let factory = StreamFactory::new(spec.master_seed);
        let fixed_v = sample_haar_unitary(3, &mut StreamFactory::new(0xF1DE).substream(0));
        let mut plain: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = factory.substream(i);
                sample_hamiltonian(&spec, &mut rng)
                    .expect("valid spec")
                    .entry(0, 0)
                    .re
            })
            .collect();
        let factory2 = StreamFactory::new(spec.master_seed.wrapping_add(1));
        let mut conjugated: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = factory2.substream(i);
                let h = sample_hamiltonian(&spec, &mut rng).expect("valid spec");
                let m = DMatrix::from_fn(3, 3, |r, c| h.entry(r, c));
                (&fixed_v * m * fixed_v.adjoint())[(0, 0)].re
            })
            .collect();
        outcomes.push(haar_invariance_check(
            "haar_invariance",
            &mut plain,
            &mut conjugated,
            sig,
        ));
    }

    // Squared overlap of Haar states with a fixed state is uniform at N = 2.
    {
        let factory = StreamFactory::new(cfg.master_seed.wrapping_add(500));
        let target = PureState::basis_state(2, 0);
        let ps: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = factory.substream(i);
                let s = sample_haar_state(2, ScalarField::Complex, &mut rng);
                target.fidelity(&s).expect("same dimension")
            })
            .collect();
        outcomes.push(ks_check(
            "state_overlap_uniformity",
            ps,
            |p| p.clamp(0.0, 1.0),
            sig,
            format!("KS of {} squared overlaps against U[0,1]", cfg.trials),
        ));
    }

    outcomes.push(oracle_agreement_check(cfg)?);
    outcomes.push(mode_consistency_check(cfg)?);

    Ok(outcomes)
}

/// `max |U†U - 1|` entrywise.
pub fn unitarity_defect(u: &DMatrix<num_complex::Complex64>) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - num_complex::Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_p_value_sanity() {
        // Tiny statistic -> p near 1; huge -> p near 0.
        assert!(ks_p_value(0.001, 1000.0) > 0.99);
        assert!(ks_p_value(0.5, 1000.0) < 1e-6);
    }

    #[test]
    fn ks_detects_uniformity() {
        // Low-discrepancy uniform points pass easily.
        let samples: Vec<f64> = (0..5000).map(|i| (i as f64 + 0.5) / 5000.0).collect();
        let out = ks_check("u", samples, |x| x, 0.01, String::new());
        assert!(out.passed);

        // Squared uniforms are not uniform.
        let biased: Vec<f64> = (0..5000)
            .map(|i| ((i as f64 + 0.5) / 5000.0).powi(2))
            .collect();
        let out = ks_check("b", biased, |x| x, 0.01, String::new());
        assert!(!out.passed);
    }

    #[test]
    fn chi_square_detects_shape() {
        let uniform: Vec<f64> = (0..4000).map(|i| (i as f64 + 0.5) / 4000.0).collect();
        let (_, p) = chi_square_gof(&uniform, |x| x, 20);
        assert!(p > 0.01);
        let (_, p) = chi_square_gof(&uniform, |x| x * x, 20);
        assert!(p < 1e-6);
    }

    #[test]
    fn two_sample_ks_on_shifted_data() {
        let mut a: Vec<f64> = (0..3000).map(|i| (i as f64 + 0.5) / 3000.0).collect();
        let mut b = a.clone();
        let (_, p) = two_sample_ks(&mut a, &mut b);
        assert!(p > 0.99);
        let mut shifted: Vec<f64> = a.iter().map(|x| (x + 0.2).min(1.0)).collect();
        let (_, p) = two_sample_ks(&mut a, &mut shifted);
        assert!(p < 1e-6);
    }

    #[test]
    fn quick_config_reduces_trials() {
        let cfg = ValidatorConfig::default().quick();
        assert_eq!(cfg.trials, 10_000);
        assert_eq!(cfg.significance, 0.01);
    }
}
