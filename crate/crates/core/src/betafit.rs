//! Beta-CDF fitting of empirical relative-volume curves.
//!
//! The empirical curve is fit by the regularized incomplete beta function
//! `I_eps(alpha, beta)` in weighted least squares over `(ln alpha, ln beta)`,
//! with a multistart Nelder-Mead search; the small-epsilon power law
//! `c * eps^alpha` with `c = Gamma(alpha+beta) / (alpha Gamma(alpha)
//! Gamma(beta))` is extracted from the fitted parameters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::montecarlo::EmpiricalCurve;
use crate::special::ln_gamma;
use crate::{Error, Result};

pub use crate::special::reg_inc_beta as regularized_incomplete_beta;

/// Multistart grid in each of alpha and beta; the objective can be
/// multimodal for noisy flat curves.
pub const MULTISTART_GRID: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];

/// Parameter bounds for the search, in natural units.
const PARAM_MIN: f64 = 1e-3;
const PARAM_MAX: f64 = 1e3;

/// Result of a Beta-CDF fit.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BetaFitResult {
    pub alpha: f64,
    pub beta: f64,
    /// Unweighted root-mean-square residual over the fitted grid.
    pub rmse: f64,
    /// Small-epsilon power-law coefficient
    /// `Gamma(alpha+beta) / (alpha Gamma(alpha) Gamma(beta))`.
    pub small_eps_coeff: f64,
}

/// `Gamma(alpha+beta) / (alpha Gamma(alpha) Gamma(beta))`.
pub fn small_eps_coefficient(alpha: f64, beta: f64) -> f64 {
    (ln_gamma(alpha + beta) - ln_gamma(alpha) - ln_gamma(beta) - alpha.ln()).exp()
}

/// The full small-epsilon approximant `c * eps^alpha`.
pub fn small_eps_approximant(alpha: f64, beta: f64, epsilon: f64) -> f64 {
    small_eps_coefficient(alpha, beta) * epsilon.powf(alpha)
}

/// Fit `I_eps(alpha, beta)` to the curve with the default multistart grid.
pub fn fit_beta_cdf(curve: &EmpiricalCurve) -> Result<BetaFitResult> {
    let starts: Vec<(f64, f64)> = MULTISTART_GRID
        .iter()
        .flat_map(|&a| MULTISTART_GRID.iter().map(move |&b| (a, b)))
        .collect();
    fit_beta_cdf_with_starts(curve, &starts)
}

/// Fit from explicit starting points; used for refits from a converged
/// optimum and by the multistart driver.
pub fn fit_beta_cdf_with_starts(
    curve: &EmpiricalCurve,
    starts: &[(f64, f64)],
) -> Result<BetaFitResult> {
    if starts.is_empty() {
        return Err(Error::invalid("starts", "need at least one starting point"));
    }
    let points = fit_points(curve)?;

    let objective = |ln_params: [f64; 2]| -> f64 {
        let alpha = ln_params[0].exp();
        let beta = ln_params[1].exp();
        if !(PARAM_MIN..=PARAM_MAX).contains(&alpha) || !(PARAM_MIN..=PARAM_MAX).contains(&beta) {
            return f64::INFINITY;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for p in &points {
            let model = crate::special::reg_inc_beta(p.epsilon, alpha, beta)
                .expect("grid and parameters are in-domain");
            let r = model - p.estimate;
            num += p.weight * r * r;
            den += p.weight;
        }
        num / den
    };

    // Branches are independent; selection is a deterministic minimum with
    // lexicographic tie-breaking on (rmse, alpha, beta).
    let candidates: Vec<BetaFitResult> = starts
        .par_iter()
        .map(|&(a, b)| {
            let start = [
                a.clamp(PARAM_MIN, PARAM_MAX).ln(),
                b.clamp(PARAM_MIN, PARAM_MAX).ln(),
            ];
            let (coarse, _) = nelder_mead(&objective, start, 0.4, 2000);
            // Re-polish with a tight simplex around the coarse optimum.
            let (best, _) = nelder_mead(&objective, coarse, 1e-5, 2000);
            let alpha = best[0].exp();
            let beta = best[1].exp();
            BetaFitResult {
                alpha,
                beta,
                rmse: rmse_on(&points, alpha, beta),
                small_eps_coeff: small_eps_coefficient(alpha, beta),
            }
        })
        .collect();

    Ok(candidates
        .into_iter()
        .min_by(|x, y| {
            (x.rmse, x.alpha, x.beta)
                .partial_cmp(&(y.rmse, y.alpha, y.beta))
                .expect("fit results are finite")
        })
        .expect("at least one start"))
}

struct FitPoint {
    epsilon: f64,
    estimate: f64,
    weight: f64,
}

fn fit_points(curve: &EmpiricalCurve) -> Result<Vec<FitPoint>> {
    if curve.trials == 0 {
        return Err(Error::FitUnderdetermined("curve has no trials".into()));
    }
    // Interior grid points only: eps = 0 and eps = 1 carry no information
    // about the shape (the CDF is pinned there).
    let usable: Vec<usize> = (0..curve.epsilons.len())
        .filter(|&i| curve.epsilons[i] > 0.0 && curve.epsilons[i] < 1.0)
        .collect();
    if usable.len() < 5 {
        return Err(Error::FitUnderdetermined(format!(
            "need at least 5 interior epsilon points, have {}",
            usable.len()
        )));
    }
    if usable.iter().all(|&i| curve.hits[i] == 0) {
        return Err(Error::FitUnderdetermined(
            "all-zero curve: no hits at any interior tolerance".into(),
        ));
    }
    if usable.iter().all(|&i| curve.hits[i] == curve.trials) {
        return Err(Error::FitUnderdetermined(
            "all-one curve: saturated at every interior tolerance".into(),
        ));
    }
    let trials = curve.trials as f64;
    Ok(usable
        .into_iter()
        .map(|i| {
            // Inverse CI width; zero-hit cells keep their one-sided width
            // rather than being dropped, which would bias alpha downward.
            let width = (curve.ci_high[i] - curve.ci_low[i]).max(1e-12);
            FitPoint {
                epsilon: curve.epsilons[i],
                estimate: curve.hits[i] as f64 / trials,
                weight: 1.0 / width,
            }
        })
        .collect())
}

fn rmse_on(points: &[FitPoint], alpha: f64, beta: f64) -> f64 {
    let mut sum = 0.0;
    for p in points {
        let model = crate::special::reg_inc_beta(p.epsilon, alpha, beta)
            .expect("grid and parameters are in-domain");
        let r = model - p.estimate;
        sum += r * r;
    }
    (sum / points.len() as f64).sqrt()
}

/// Two-dimensional Nelder-Mead with standard coefficients. Deterministic:
/// no randomized restarts, fixed iteration budget, tolerance on the simplex
/// function spread.
fn nelder_mead<F>(f: &F, start: [f64; 2], scale: f64, max_iter: usize) -> ([f64; 2], f64)
where
    F: Fn([f64; 2]) -> f64,
{
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut simplex = [
        start,
        [start[0] + scale, start[1]],
        [start[0], start[1] + scale],
    ];
    let mut values = simplex.map(f);

    for _ in 0..max_iter {
        // Order best -> worst.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN objective"));
        simplex = [simplex[order[0]], simplex[order[1]], simplex[order[2]]];
        values = [values[order[0]], values[order[1]], values[order[2]]];

        // Converge on the simplex geometry, not just the function spread:
        // refits from an already-converged point must land on the same
        // optimum to well under 1e-6.
        let diameter = simplex
            .iter()
            .skip(1)
            .map(|x| ((x[0] - simplex[0][0]).powi(2) + (x[1] - simplex[0][1]).powi(2)).sqrt())
            .fold(0.0f64, f64::max);
        if diameter <= 1e-10 && (values[2] - values[0]).abs() <= 1e-13 * (1.0 + values[0].abs()) {
            break;
        }

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let reflect = |c: f64, w: f64| c + ALPHA * (c - w);
        let xr = [
            reflect(centroid[0], simplex[2][0]),
            reflect(centroid[1], simplex[2][1]),
        ];
        let fr = f(xr);

        if fr < values[0] {
            let xe = [
                centroid[0] + GAMMA * (xr[0] - centroid[0]),
                centroid[1] + GAMMA * (xr[1] - centroid[1]),
            ];
            let fe = f(xe);
            if fe < fr {
                simplex[2] = xe;
                values[2] = fe;
            } else {
                simplex[2] = xr;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = xr;
            values[2] = fr;
        } else {
            let xc = [
                centroid[0] + RHO * (simplex[2][0] - centroid[0]),
                centroid[1] + RHO * (simplex[2][1] - centroid[1]),
            ];
            let fc = f(xc);
            if fc < values[2] {
                simplex[2] = xc;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + SIGMA * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + SIGMA * (simplex[i][1] - simplex[0][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best], values[best])
}
