//! Closed-form volumes of bounded-trace positive Hamiltonian manifolds.
//!
//! The manifold `H_{N,k}` of positive-definite N-dimensional Hamiltonians
//! with trace at most k factorizes under any unitarily invariant measure into
//! an eigenvalue-simplex factor `I1(N, k)` and a flag-manifold factor
//! `I2(N)`. Everything here is assembled from those two factors in log-space:
//! total volumes, hypersurfaces with fixed eigenstates, tolerance
//! neighborhoods of a target ground state, relative volumes (complex and
//! real), and the translation-invariant locality bounds.

use crate::logspace::LogValue;
use crate::special::{ln_factorial, ln_gamma, LN_TWO_PI};
use crate::{Error, Result, ScalarField};
use serde::{Deserialize, Serialize};

/// Tolerance above which the linear-in-epsilon neighborhood volume is
/// flagged as strained; the approximation is only controlled for small
/// epsilon and this threshold is advisory metadata, never an error.
pub const EPSILON_STRAIN_THRESHOLD: f64 = 0.1;

/// Dimension guard for the locality bounds: the eigen-dimension `d^t` (and
/// `d^n` for the relative bound) must stay within desk scale.
pub const MAX_LOCAL_EIGEN_DIM: u64 = 64;

/// An N-dimensional manifold of positive Hamiltonians with bounded trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub dim: u32,
    pub trace_bound: f64,
    pub field: ScalarField,
}

impl ManifoldSpec {
    pub fn new(dim: u32, trace_bound: f64, field: ScalarField) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("dim", "dimension must be at least 1"));
        }
        if !trace_bound.is_finite() || trace_bound <= 0.0 {
            return Err(Error::invalid(
                "trace_bound",
                format!("trace bound must be positive and finite, got {trace_bound}"),
            ));
        }
        Ok(ManifoldSpec {
            dim,
            trace_bound,
            field,
        })
    }

    pub fn complex(dim: u32, trace_bound: f64) -> Result<Self> {
        Self::new(dim, trace_bound, ScalarField::Complex)
    }
}

/// Parameters of the translationally-invariant locality bounds: `M` local
/// terms of locality `t` on `n` parties of local dimension `d`, with trace
/// bound `k`; the relative bound additionally uses the locality-breaking
/// weight `delta`, the nonlocal trace bound `k'`, and the tolerance
/// `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiBoundSpec {
    pub local_dim: u32,
    pub locality: u32,
    pub parties: u32,
    pub num_terms: u32,
    pub trace_bound: f64,
    pub locality_breaking: f64,
    pub nonlocal_trace_bound: f64,
    pub tolerance: f64,
}

impl TiBoundSpec {
    /// Build a spec for the absolute bound; the relative-bound fields default
    /// to `delta = 0`, `k' = k`, `epsilon = 0`.
    pub fn new(
        local_dim: u32,
        locality: u32,
        parties: u32,
        num_terms: u32,
        trace_bound: f64,
    ) -> Result<Self> {
        let spec = TiBoundSpec {
            local_dim,
            locality,
            parties,
            num_terms,
            trace_bound,
            locality_breaking: 0.0,
            nonlocal_trace_bound: trace_bound,
            tolerance: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_perturbation(
        mut self,
        locality_breaking: f64,
        nonlocal_trace_bound: f64,
        tolerance: f64,
    ) -> Result<Self> {
        self.locality_breaking = locality_breaking;
        self.nonlocal_trace_bound = nonlocal_trace_bound;
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.local_dim < 2 {
            return Err(Error::invalid("d", "local dimension must be at least 2"));
        }
        if self.locality < 1 {
            return Err(Error::invalid("t", "locality must be at least 1"));
        }
        if self.parties < self.locality {
            return Err(Error::invalid("n", "number of parties must be >= locality"));
        }
        if self.num_terms < 1 {
            return Err(Error::invalid("M", "number of local terms must be >= 1"));
        }
        if self.trace_bound.is_nan() || self.trace_bound <= 0.0 {
            return Err(Error::invalid("k", "trace bound must be positive"));
        }
        if self.locality_breaking < 0.0 {
            return Err(Error::invalid(
                "delta",
                "locality-breaking weight must be >= 0",
            ));
        }
        if self.nonlocal_trace_bound.is_nan()
            || self.nonlocal_trace_bound <= 0.0
            || self.nonlocal_trace_bound > self.trace_bound
        {
            return Err(Error::invalid(
                "k_prime",
                "nonlocal trace bound must satisfy 0 < k' <= k",
            ));
        }
        if !(0.0..=1.0).contains(&self.tolerance) {
            return Err(Error::invalid("epsilon", "tolerance must lie in [0, 1]"));
        }
        Ok(())
    }

    fn checked_pow(&self, exponent: u32, field: &'static str) -> Result<u64> {
        let base = self.local_dim as u64;
        base.checked_pow(exponent)
            .filter(|&v| v <= MAX_LOCAL_EIGEN_DIM)
            .ok_or_else(|| {
                Error::invalid(
                    field,
                    format!(
                        "d^{exponent} exceeds the supported eigen-dimension {}",
                        MAX_LOCAL_EIGEN_DIM
                    ),
                )
            })
    }

    /// `d^t`, guarded at [`MAX_LOCAL_EIGEN_DIM`].
    pub fn local_eigen_dim(&self) -> Result<u64> {
        self.checked_pow(self.locality, "t")
    }

    /// `d^n`, guarded at [`MAX_LOCAL_EIGEN_DIM`].
    pub fn global_eigen_dim(&self) -> Result<u64> {
        self.checked_pow(self.parties, "n")
    }

    /// `nu = M d^(n-t)`.
    pub fn nu(&self) -> f64 {
        self.num_terms as f64 * (self.local_dim as f64).powi((self.parties - self.locality) as i32)
    }

    /// `kappa = d^(2t) - 1`.
    pub fn kappa(&self) -> Result<f64> {
        let dt = self.local_eigen_dim()? as f64;
        Ok(dt * dt - 1.0)
    }

    /// `kappa' = d^n - 1`.
    pub fn kappa_prime(&self) -> Result<f64> {
        Ok(self.global_eigen_dim()? as f64 - 1.0)
    }
}

/// Tolerance-neighborhood volume together with its validity flag.
#[derive(Clone, Copy, Debug)]
pub struct EpsilonVolume {
    pub value: LogValue,
    /// Set when epsilon exceeds [`EPSILON_STRAIN_THRESHOLD`], where the
    /// linear approximation is no longer controlled. Advisory only.
    pub approximation_strained: bool,
}

/// Large-N asymptotic form of the relative volume with its admissible-error
/// ceiling.
#[derive(Clone, Copy, Debug)]
pub struct StirlingRelativeVolume {
    pub value: LogValue,
    pub epsilon_max: LogValue,
    /// Whether the requested epsilon satisfies `epsilon <= epsilon_max`.
    pub epsilon_within_bound: bool,
}

/// `log xi_n` where `xi_n = prod_{j=1}^{n} j!`; the empty product is 1.
pub fn log_xi(n: u32) -> LogValue {
    let mut sum = 0.0;
    for j in 1..=n as u64 {
        sum += ln_factorial(j);
    }
    LogValue::from_ln(sum)
}

/// Eigenvalue-simplex factor
/// `I1(N, k) = sqrt(N) / (N^2! N!) * xi_N * xi_{N-1} * k^(N^2)`.
///
/// Only defined for the complex field: the real eigenvalue-simplex integral
/// carries a |Vandermonde|^1 weight whose closed form is not provided here
/// (the real relative volume does not need it).
pub fn i1(spec: &ManifoldSpec) -> Result<LogValue> {
    if spec.field != ScalarField::Complex {
        return Err(Error::invalid(
            "field",
            "the eigenvalue-simplex factor is only available for the complex field",
        ));
    }
    let n = spec.dim as u64;
    let n_sq = n * n;
    let ln = 0.5 * (n as f64).ln() - ln_factorial(n_sq) - ln_factorial(n)
        + log_xi(spec.dim).log_abs()
        + log_xi(spec.dim - 1).log_abs()
        + n_sq as f64 * spec.trace_bound.ln();
    Ok(LogValue::from_ln(ln))
}

/// Haar volume of the complex flag manifold,
/// `I2(N) = (2 pi)^(N(N-1)/2) / xi_{N-1}`.
///
/// `I2(0)` is defined as 1 so that hypersurfaces with every eigenstate fixed
/// degenerate gracefully to the eigenvalue-simplex factor.
pub fn i2_complex(n: u32) -> LogValue {
    if n == 0 {
        return LogValue::ONE;
    }
    let pairs = (n as u64 * (n as u64 - 1) / 2) as f64;
    LogValue::from_ln(pairs * LN_TWO_PI - log_xi(n - 1).log_abs())
}

/// Haar volume of the real flag manifold,
/// `I2_R(N) = (2 pi)^(N(N-1)/4) * pi^(N/2) / prod_{j=1}^{N} Gamma(j/2)`.
pub fn i2_real(n: u32) -> Result<LogValue> {
    if n < 1 {
        return Err(Error::invalid("dim", "real flag volume requires N >= 1"));
    }
    let mut ln_gamma_prod = 0.0;
    for j in 1..=n {
        ln_gamma_prod += ln_gamma(j as f64 / 2.0);
    }
    let quarter_pairs = n as f64 * (n as f64 - 1.0) / 4.0;
    let ln = quarter_pairs * LN_TWO_PI + 0.5 * n as f64 * std::f64::consts::PI.ln() - ln_gamma_prod;
    Ok(LogValue::from_ln(ln))
}

/// Total volume `vol_N(H_{N,k}) = I1(N, k) * I2(N)`.
pub fn total_volume(spec: &ManifoldSpec) -> Result<LogValue> {
    Ok(i1(spec)? * i2_complex(spec.dim))
}

/// Hypersurface of Hamiltonians with `fixed_states` prescribed eigenstates:
/// `S^(L)_N = I1(N, k) * I2(N - L)`. `L = 1` is the parent-Hamiltonian
/// hypersurface of a single target ground state.
pub fn hypersurface(spec: &ManifoldSpec, fixed_states: u32) -> Result<LogValue> {
    if fixed_states < 1 || fixed_states > spec.dim {
        return Err(Error::invalid(
            "L",
            format!(
                "number of fixed eigenstates must lie in [1, {}], got {fixed_states}",
                spec.dim
            ),
        ));
    }
    Ok(i1(spec)? * i2_complex(spec.dim - fixed_states))
}

/// Volume of the epsilon-neighborhood of a target ground state,
/// `vol_N(H^{psi_0^eps}_{N,k}) ~= eps * I1(N, k) * I2(N - 1)`, linear in
/// epsilon by construction.
pub fn epsilon_volume(spec: &ManifoldSpec, epsilon: f64) -> Result<EpsilonVolume> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::invalid("epsilon", "tolerance must lie in [0, 1]"));
    }
    let value = LogValue::from_real(epsilon) * i1(spec)? * i2_complex(spec.dim - 1);
    Ok(EpsilonVolume {
        value,
        approximation_strained: epsilon > EPSILON_STRAIN_THRESHOLD,
    })
}

/// Relative volume of parent Hamiltonians within tolerance epsilon of a
/// target ground state. The eigenvalue factor cancels in the ratio, so the
/// result depends on the dimension and the field only:
///
/// - complex: `eps * (2 pi)^(1-N) * (N-1)!`
/// - real:    `eps * 2^((1-N)/2) * pi^(-N/2) * Gamma(N/2)`
pub fn relative_volume(dim: u32, epsilon: f64, field: ScalarField) -> Result<LogValue> {
    if dim < 2 {
        return Err(Error::invalid("dim", "relative volume requires N >= 2"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::invalid("epsilon", "tolerance must lie in [0, 1]"));
    }
    let n = dim as f64;
    let ln = match field {
        ScalarField::Complex => (1.0 - n) * LN_TWO_PI + ln_factorial(dim as u64 - 1),
        ScalarField::Real => {
            0.5 * (1.0 - n) * std::f64::consts::LN_2 - 0.5 * n * std::f64::consts::PI.ln()
                + ln_gamma(0.5 * n)
        }
    };
    Ok(LogValue::from_real(epsilon) * LogValue::from_ln(ln))
}

/// Large-N form of the relative volume, `eps * (2 pi / e)^(-N) * N^N`, with
/// the induced ceiling `eps_max = (2 pi / e)^N * N^(-N)` on the admissible
/// error.
pub fn relative_volume_stirling(dim: u32, epsilon: f64) -> Result<StirlingRelativeVolume> {
    if dim < 2 {
        return Err(Error::invalid("dim", "relative volume requires N >= 2"));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::invalid("epsilon", "tolerance must be nonnegative"));
    }
    let n = dim as f64;
    let ln_two_pi_over_e = LN_TWO_PI - 1.0;
    let ln_eps_max = n * ln_two_pi_over_e - n * n.ln();
    let value = LogValue::from_real(epsilon) * LogValue::from_ln(-ln_eps_max);
    let epsilon_max = LogValue::from_ln(ln_eps_max);
    Ok(StirlingRelativeVolume {
        value,
        epsilon_max,
        epsilon_within_bound: epsilon <= ln_eps_max.exp(),
    })
}

/// Upper bound on the volume of t-local translationally invariant
/// Hamiltonians: `nu^(kappa/2) * I1(d^t, k/nu) * I2(d^t)`.
pub fn ti_bound(spec: &TiBoundSpec) -> Result<LogValue> {
    spec.validate()?;
    let local_dim = spec.local_eigen_dim()? as u32;
    let nu = spec.nu();
    let kappa = spec.kappa()?;
    let prefactor = LogValue::from_real(nu).powf(kappa / 2.0);
    let simplex = i1(&ManifoldSpec::complex(local_dim, spec.trace_bound / nu)?)?;
    Ok(prefactor * simplex * i2_complex(local_dim))
}

/// Upper bound on the relative volume of delta-TI Hamiltonians
/// `H = h_TI + delta * h_NL`:
///
/// `delta^kappa' * nu^(kappa/2) * I1(d^t, k) * I2(d^t) * I1(d^n, eps k')
///  / I1(d^n, k + delta k')`.
///
/// `eps * k' = 0` collapses the bound to an exact zero (sign 0), which is a
/// legitimate result rather than an error.
pub fn delta_ti_relative_bound(spec: &TiBoundSpec) -> Result<LogValue> {
    spec.validate()?;
    let local_dim = spec.local_eigen_dim()? as u32;
    let global_dim = spec.global_eigen_dim()? as u32;
    let nu = spec.nu();
    let kappa = spec.kappa()?;
    let kappa_prime = spec.kappa_prime()?;

    let delta = spec.locality_breaking;
    let eps_k_prime = spec.tolerance * spec.nonlocal_trace_bound;
    if delta == 0.0 || eps_k_prime == 0.0 {
        return Ok(LogValue::ZERO);
    }

    let delta_factor = LogValue::from_real(delta).powf(kappa_prime);
    let prefactor = LogValue::from_real(nu).powf(kappa / 2.0);
    let local_simplex = i1(&ManifoldSpec::complex(local_dim, spec.trace_bound)?)?;
    let tolerance_simplex = i1(&ManifoldSpec::complex(global_dim, eps_k_prime)?)?;
    let denominator = i1(&ManifoldSpec::complex(
        global_dim,
        spec.trace_bound + delta * spec.nonlocal_trace_bound,
    )?)?;

    Ok(
        delta_factor * prefactor * local_simplex * i2_complex(local_dim) * tolerance_simplex
            / denominator,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_log_close(value: LogValue, expected_ln: f64, tol: f64) {
        assert_eq!(value.sign(), 1, "expected a positive value");
        let got = value.log_abs();
        assert!(
            (got - expected_ln).abs() <= tol * expected_ln.abs().max(1.0),
            "log mismatch: got {got}, expected {expected_ln}"
        );
    }

    #[test]
    fn log_xi_small_cases() {
        assert_eq!(log_xi(0).log_abs(), 0.0);
        assert!((log_xi(2).log_abs() - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn log_xi_matches_exact_factorial_sum() {
        // Independent oracle: sum of logs of exactly computed integer
        // factorials (u64 holds up to 20!).
        let mut exact = 0.0;
        let mut fact: u64 = 1;
        for j in 1..=20u64 {
            fact *= j;
            exact += (fact as f64).ln();
        }
        assert!((log_xi(20).log_abs() - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn i1_unit_interval() {
        let spec = ManifoldSpec::complex(1, 1.0).unwrap();
        assert_log_close(i1(&spec).unwrap(), 0.0, 1e-14);
    }

    #[test]
    fn i1_two_dimensional() {
        // sqrt(2)/(4! 2!) * xi_2 * xi_1 = sqrt(2)/24
        let spec = ManifoldSpec::complex(2, 1.0).unwrap();
        let expected = (2.0f64.sqrt() / 24.0).ln();
        assert_log_close(i1(&spec).unwrap(), expected, 1e-13);

        // k^(N^2) scaling: k = 3 multiplies by 3^4.
        let scaled = ManifoldSpec::complex(2, 3.0).unwrap();
        assert_log_close(i1(&scaled).unwrap(), expected + 4.0 * 3.0f64.ln(), 1e-13);
    }

    #[test]
    fn i1_rejects_real_field() {
        let spec = ManifoldSpec::new(2, 1.0, ScalarField::Real).unwrap();
        assert!(i1(&spec).is_err());
    }

    #[test]
    fn i2_complex_values() {
        assert_eq!(i2_complex(0), LogValue::ONE);
        assert_log_close(i2_complex(1), 0.0, 1e-14);
        assert_log_close(i2_complex(2), (2.0 * PI).ln(), 1e-14);
        // (2 pi)^3 / 2
        assert_log_close(i2_complex(3), 3.0 * (2.0 * PI).ln() - 2.0f64.ln(), 1e-14);
    }

    #[test]
    fn i2_real_values() {
        // N = 1: pi^(1/2) / Gamma(1/2) = 1.
        assert_log_close(i2_real(1).unwrap(), 0.0, 1e-13);
        // N = 2: sqrt(2 pi) * pi / (Gamma(1/2) Gamma(1)) = pi sqrt(2).
        assert_log_close(i2_real(2).unwrap(), (PI * 2.0f64.sqrt()).ln(), 1e-13);
        // N = 4: exact half-integer gammas collapse the product to (2 pi)^4.
        assert_log_close(i2_real(4).unwrap(), 4.0 * (2.0 * PI).ln(), 1e-13);
    }

    #[test]
    fn total_volume_values() {
        let unit = ManifoldSpec::complex(1, 1.0).unwrap();
        assert_log_close(total_volume(&unit).unwrap(), 0.0, 1e-14);

        // sqrt(2)/24 * 2 pi ~= 0.37024
        let two = ManifoldSpec::complex(2, 1.0).unwrap();
        let expected = (2.0f64.sqrt() / 24.0 * 2.0 * PI).ln();
        assert_log_close(total_volume(&two).unwrap(), expected, 1e-13);
        assert!((total_volume(&two).unwrap().to_real() - 0.37024).abs() < 1e-5);
    }

    #[test]
    fn total_volume_trace_scaling_is_exact() {
        // log vol(N, k) - log vol(N, 1) = N^2 log k
        let a = total_volume(&ManifoldSpec::complex(3, 2.0).unwrap()).unwrap();
        let b = total_volume(&ManifoldSpec::complex(3, 1.0).unwrap()).unwrap();
        let diff = a.log_abs() - b.log_abs();
        assert!((diff - 9.0 * 2.0f64.ln()).abs() < 1e-12);
        assert!(((diff / 2.0f64.ln()).exp2() - 512.0).abs() < 1e-9);
    }

    #[test]
    fn hypersurface_cases() {
        let two = ManifoldSpec::complex(2, 1.0).unwrap();
        assert_log_close(
            hypersurface(&two, 1).unwrap(),
            (2.0f64.sqrt() / 24.0).ln(),
            1e-13,
        );

        // All eigenstates fixed leaves only the eigenvalue simplex.
        let three = ManifoldSpec::complex(3, 1.0).unwrap();
        assert_eq!(
            hypersurface(&three, 3).unwrap(),
            i1(&three).unwrap() * LogValue::ONE
        );

        let four = ManifoldSpec::complex(4, 1.0).unwrap();
        let expected = i1(&four).unwrap() * i2_complex(2);
        assert_log_close(hypersurface(&four, 2).unwrap(), expected.log_abs(), 1e-14);

        assert!(hypersurface(&four, 0).is_err());
        assert!(hypersurface(&four, 5).is_err());
    }

    #[test]
    fn hypersurface_decreases_with_fixed_state_count() {
        // Strictly decreasing through L = N-1; the final step to L = N is an
        // exact tie because I2(1) = I2(0) = 1.
        for n in 3..=12u32 {
            let spec = ManifoldSpec::complex(n, 1.0).unwrap();
            let mut prev = hypersurface(&spec, 1).unwrap().log_abs();
            for l in 2..n {
                let next = hypersurface(&spec, l).unwrap().log_abs();
                assert!(next < prev, "N={n}, L={l}: {next} !< {prev}");
                prev = next;
            }
            let last = hypersurface(&spec, n).unwrap().log_abs();
            assert!((last - prev).abs() < 1e-12, "N={n}: L=N should tie L=N-1");
        }
    }

    #[test]
    fn epsilon_volume_cases() {
        let two = ManifoldSpec::complex(2, 1.0).unwrap();
        assert!(epsilon_volume(&two, 0.0).unwrap().value.is_zero());

        let v = epsilon_volume(&two, 0.01).unwrap();
        assert!(!v.approximation_strained);
        assert_log_close(v.value, (0.01 * 2.0f64.sqrt() / 24.0).ln(), 1e-13);

        let three = ManifoldSpec::complex(3, 2.0).unwrap();
        let v = epsilon_volume(&three, 0.05).unwrap();
        let expected = LogValue::from_real(0.05) * i1(&three).unwrap() * i2_complex(2);
        assert_log_close(v.value, expected.log_abs(), 1e-14);

        assert!(epsilon_volume(&two, 0.2).unwrap().approximation_strained);
        assert!(epsilon_volume(&two, 1.5).is_err());
    }

    #[test]
    fn relative_volume_complex_values() {
        // N=2: eps / (2 pi)
        let v = relative_volume(2, 0.01, ScalarField::Complex).unwrap();
        assert!((v.to_real() - 0.01 / (2.0 * PI)).abs() < 1e-16);
        assert!((v.to_real() - 1.591_55e-3).abs() < 1e-7);

        // N=3: eps * 2 / (2 pi)^2
        let v = relative_volume(3, 0.01, ScalarField::Complex).unwrap();
        assert!((v.to_real() - 0.01 * 2.0 / (2.0 * PI).powi(2)).abs() < 1e-17);
        assert!((v.to_real() - 5.0661e-4).abs() < 1e-7);

        assert!(relative_volume(3, 0.0, ScalarField::Complex)
            .unwrap()
            .is_zero());
        assert!(relative_volume(1, 0.1, ScalarField::Complex).is_err());
    }

    #[test]
    fn relative_volume_real_matches_closed_form_at_two() {
        // N=2: eps * 2^(-1/2) * pi^(-1) * Gamma(1) = eps / (pi sqrt(2))
        let v = relative_volume(2, 1.0, ScalarField::Real).unwrap();
        let expected = 1.0 / (PI * 2.0f64.sqrt());
        assert!((v.to_real() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn ratio_law_connects_epsilon_volume_and_relative_volume() {
        for n in 2..=10u32 {
            for &k in &[0.5, 1.0, 10.0] {
                let spec = ManifoldSpec::complex(n, k).unwrap();
                let eps = 0.03;
                let ratio = epsilon_volume(&spec, eps).unwrap().value.log_abs()
                    - total_volume(&spec).unwrap().log_abs();
                let direct = relative_volume(n, eps, ScalarField::Complex)
                    .unwrap()
                    .log_abs();
                assert!(
                    (ratio - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                    "N={n}, k={k}: {ratio} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn stirling_epsilon_max_at_three() {
        let s = relative_volume_stirling(3, 0.1).unwrap();
        let expected = (2.0 * PI / std::f64::consts::E).powi(3) / 27.0;
        assert!((s.epsilon_max.to_real() - expected).abs() < 1e-12 * expected);
        assert!(s.epsilon_within_bound);
    }

    #[test]
    fn stirling_value_at_two() {
        let s = relative_volume_stirling(2, 0.1).unwrap();
        let expected = 0.1 * (2.0 * PI / std::f64::consts::E).powi(-2) * 4.0;
        assert!((s.value.to_real() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn stirling_log_gap_against_gamma_form() {
        // The printed asymptotic form differs from the exact
        // (2 pi)^(1-N) (N-1)! by exactly
        //   2N + ln(N)/2 - 3 ln(2 pi)/2 - 1/(12 N) + O(N^-3)
        // in log-space; pin that gap at N = 50 instead of pretending the two
        // agree.
        let n = 50u32;
        let eps = 0.37;
        let stirling = relative_volume_stirling(n, eps).unwrap().value.log_abs();
        let exact = relative_volume(n, eps, ScalarField::Complex)
            .unwrap()
            .log_abs();
        let nf = n as f64;
        let predicted_gap = 2.0 * nf + 0.5 * nf.ln() - 1.5 * LN_TWO_PI - 1.0 / (12.0 * nf);
        assert!(
            ((stirling - exact) - predicted_gap).abs() < 1e-6,
            "gap {} vs predicted {predicted_gap}",
            stirling - exact
        );
    }

    #[test]
    fn ti_bound_example() {
        // d=2, t=2, n=3, M=2, k=1: nu = 4, kappa = 15.
        let spec = TiBoundSpec::new(2, 2, 3, 2, 1.0).unwrap();
        let expected = LogValue::from_real(4.0).powf(7.5)
            * i1(&ManifoldSpec::complex(4, 0.25).unwrap()).unwrap()
            * i2_complex(4);
        assert_log_close(ti_bound(&spec).unwrap(), expected.log_abs(), 1e-13);
    }

    #[test]
    fn ti_bound_single_site_is_unrestricted_volume() {
        // A single 1-local term on one party is no restriction at all.
        let spec = TiBoundSpec::new(2, 1, 1, 1, 1.0).unwrap();
        let unrestricted = total_volume(&ManifoldSpec::complex(2, 1.0).unwrap()).unwrap();
        assert_log_close(ti_bound(&spec).unwrap(), unrestricted.log_abs(), 1e-13);
    }

    #[test]
    fn ti_bound_decreases_with_parties() {
        let base = TiBoundSpec::new(2, 2, 3, 2, 1.0).unwrap();
        let more_parties = TiBoundSpec::new(2, 2, 4, 2, 1.0).unwrap();
        assert!(
            ti_bound(&more_parties).unwrap().log_abs() < ti_bound(&base).unwrap().log_abs(),
            "bound must strictly decrease with the number of parties"
        );
        // The same holds across a grid with M = n - 1; only d^t enters the
        // eigen-dimension guard, so every cell below is admissible.
        for d in [2u32, 3] {
            for t in [1u32, 2] {
                let mut prev = f64::INFINITY;
                for n in t.max(2)..=6 {
                    let spec = TiBoundSpec::new(d, t, n, n - 1, 1.0).unwrap();
                    let v = ti_bound(&spec).unwrap().log_abs();
                    if prev.is_finite() {
                        assert!(v < prev, "d={d}, t={t}, n={n}: {v} !< {prev}");
                    }
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn ti_bound_prefactor_grows_with_dimension_and_locality() {
        // nu^(kappa/2) is the factor the text singles out; it is monotone in
        // d and t even where the full bound (factorially suppressed through
        // I1 at k = 1) is not.
        let pref = |d: u32, t: u32, n: u32, m: u32| -> f64 {
            let spec = TiBoundSpec::new(d, t, n, m, 1.0).unwrap();
            0.5 * spec.kappa().unwrap() * spec.nu().ln()
        };
        assert!(pref(3, 1, 3, 2) > pref(2, 1, 3, 2));
        assert!(pref(2, 2, 4, 3) > pref(2, 1, 4, 3));
    }

    #[test]
    fn ti_bound_rejects_oversized_eigen_dimension() {
        let spec = TiBoundSpec::new(2, 7, 7, 1, 1.0).unwrap();
        assert!(ti_bound(&spec).is_err());
    }

    #[test]
    fn delta_ti_bound_example() {
        let spec = TiBoundSpec::new(2, 2, 3, 2, 1.0)
            .unwrap()
            .with_perturbation(0.1, 1.0, 0.1)
            .unwrap();
        let v = delta_ti_relative_bound(&spec).unwrap();
        assert_eq!(v.sign(), 1);
        // Recompute the product directly from the published factors.
        let expected = LogValue::from_real(0.1).powf(7.0)
            * LogValue::from_real(4.0).powf(7.5)
            * i1(&ManifoldSpec::complex(4, 1.0).unwrap()).unwrap()
            * i2_complex(4)
            * i1(&ManifoldSpec::complex(8, 0.1).unwrap()).unwrap()
            / i1(&ManifoldSpec::complex(8, 1.1).unwrap()).unwrap();
        assert_log_close(v, expected.log_abs(), 1e-13);
    }

    #[test]
    fn delta_ti_bound_vanishes_without_perturbation() {
        let spec = TiBoundSpec::new(2, 2, 3, 2, 1.0)
            .unwrap()
            .with_perturbation(0.0, 1.0, 0.1)
            .unwrap();
        assert!(delta_ti_relative_bound(&spec).unwrap().is_zero());

        // eps * k' = 0 degenerates to an exact zero result, not an error.
        let spec = TiBoundSpec::new(2, 2, 3, 2, 1.0)
            .unwrap()
            .with_perturbation(0.1, 1.0, 0.0)
            .unwrap();
        let v = delta_ti_relative_bound(&spec).unwrap();
        assert_eq!(v.sign(), 0);
    }

    #[test]
    fn delta_ti_bound_delta_dependence() {
        // d ln(bound)/d delta = kappa'/delta - d^(2n) k'/(k + delta k')
        // changes sign at delta* = kappa' k / (d^(2n) k' - kappa' k'): the
        // bound rises on (0, delta*) and falls beyond. For d=2, n=3,
        // k=k'=1, delta* = 7/57 ~= 0.1228.
        let at = |delta: f64| {
            let spec = TiBoundSpec::new(2, 2, 3, 2, 1.0)
                .unwrap()
                .with_perturbation(delta, 1.0, 0.1)
                .unwrap();
            delta_ti_relative_bound(&spec).unwrap().log_abs()
        };
        assert!(at(0.05) < at(0.1), "rising branch below delta*");
        assert!(at(0.2) < at(0.1), "falling branch above delta*");
        // The exact log-ratio between delta = 0.2 and delta = 0.1 is
        // 7 ln 2 - 64 ln(1.2/1.1).
        let expected = 7.0 * 2.0f64.ln() - 64.0 * (1.2f64 / 1.1).ln();
        assert!(((at(0.2) - at(0.1)) - expected).abs() < 1e-10);
    }
}
