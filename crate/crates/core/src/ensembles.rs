//! Samplers for the unitarily-invariant Hilbert-Schmidt ensemble.
//!
//! The measure on bounded-trace positive Hamiltonians factorizes into an
//! eigenvalue law on the bounded simplex (squared-Vandermonde weight, total
//! trace with density `t^(N^2-1)` on `[0, k]`) times the Haar measure on the
//! eigenbasis. The samplers realize that factorization with the standard
//! Gaussian constructions:
//!
//! - Haar unitaries: complex Ginibre + QR with the R-diagonal phase fix.
//! - Hamiltonians: `W = G G†` with `G` square complex Ginibre, normalized to
//!   unit trace and rescaled by `t = k u^(1/N^2)`. The eigenvector matrix of
//!   `W` is Haar and independent of the spectrum, so the induced law is
//!   exactly the factorized measure.
//! - Haar states: normalized Gaussian vectors (complex or real).
//!
//! All samplers are pure functions of `(spec, stream)`; see [`crate::streams`]
//! for the counter-based stream contract.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::hash::fnv1a_64;
use crate::streams::Stream;
use crate::{Error, Result, ScalarField};

/// Relative tolerance on the conjugate-symmetry defect of stored operators.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Parameters of the sampled ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub trace_bound: f64,
    pub field: ScalarField,
    pub master_seed: u64,
}

impl EnsembleSpec {
    pub fn new(dim: usize, trace_bound: f64, field: ScalarField, master_seed: u64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("dim", "dimension must be at least 1"));
        }
        if !trace_bound.is_finite() || trace_bound <= 0.0 {
            return Err(Error::invalid(
                "trace_bound",
                format!("trace bound must be positive and finite, got {trace_bound}"),
            ));
        }
        Ok(EnsembleSpec {
            dim,
            trace_bound,
            field,
            master_seed,
        })
    }

    /// Stable fingerprint of the ensemble parameters, used in audit records.
    pub fn spec_hash(&self) -> u64 {
        let mut bytes = Vec::with_capacity(25);
        bytes.extend_from_slice(&(self.dim as u64).to_le_bytes());
        bytes.extend_from_slice(&self.trace_bound.to_bits().to_le_bytes());
        bytes.push(match self.field {
            ScalarField::Complex => 0,
            ScalarField::Real => 1,
        });
        bytes.extend_from_slice(&self.master_seed.to_le_bytes());
        fnv1a_64(&bytes)
    }
}

/// Dense Hermitian operator; real-symmetric matrices keep a real
/// representation so the spin-chain path can stay in `f64`.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    storage: Storage,
}

#[derive(Clone, Debug)]
pub(crate) enum Storage {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl HermitianOperator {
    /// Wrap a complex matrix, enforcing conjugate symmetry within
    /// [`HERMITICITY_TOLERANCE`] relative to the largest entry.
    pub fn from_complex(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let op = HermitianOperator {
            storage: Storage::Complex(matrix),
        };
        op.check_hermitian()?;
        Ok(op)
    }

    /// Wrap a real symmetric matrix.
    pub fn from_real_symmetric(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let op = HermitianOperator {
            storage: Storage::Real(matrix),
        };
        op.check_hermitian()?;
        Ok(op)
    }

    fn check_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        let scale = self.max_abs_entry().max(f64::MIN_POSITIVE);
        if defect > HERMITICITY_TOLERANCE * scale {
            return Err(Error::NotHermitian {
                defect,
                tolerance: HERMITICITY_TOLERANCE * scale,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Real(m) => m.nrows(),
            Storage::Complex(m) => m.nrows(),
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match &self.storage {
            Storage::Real(m) => Complex64::new(m[(row, col)], 0.0),
            Storage::Complex(m) => m[(row, col)],
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.storage {
            Storage::Real(m) => m.trace(),
            Storage::Complex(m) => m.trace().re,
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        match &self.storage {
            Storage::Real(m) => m.iter().fold(0.0f64, |acc, x| acc.max(x.abs())),
            Storage::Complex(m) => m.iter().fold(0.0f64, |acc, x| acc.max(x.norm())),
        }
    }

    /// Largest deviation from conjugate symmetry, `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.entry(i, j) - self.entry(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub(crate) fn storage(&self) -> &Storage {
        &self.storage
    }
}

/// Normalized pure state with complex amplitudes; real states embed with
/// zero imaginary parts.
#[derive(Clone, Debug)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Wrap an already-normalized amplitude vector (norm within 1e-12 of 1).
    pub fn from_amplitudes(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "amplitudes",
                format!("state norm {norm} deviates from 1 by more than 1e-12"),
            ));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(mut amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid(
                "amplitudes",
                "cannot normalize a zero or non-finite vector",
            ));
        }
        amplitudes /= Complex64::new(norm, 0.0);
        Ok(PureState { amplitudes })
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        v[index] = Complex64::new(1.0, 0.0);
        PureState { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|`, the phase-invariant overlap magnitude.
    pub fn overlap_magnitude(&self, other: &PureState) -> Result<f64> {
        Ok(self.overlap(other)?.norm())
    }

    /// State fidelity `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }
}

fn standard_normal(rng: &mut Stream) -> f64 {
    StandardNormal.sample(rng)
}

fn ginibre(dim: usize, rng: &mut Stream) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    })
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// phases of the R diagonal absorbed into Q.
pub fn sample_haar_unitary(dim: usize, rng: &mut Stream) -> DMatrix<Complex64> {
    let g = ginibre(dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Total trace with density `t^(N^2-1)` on `(0, k]`, via inverse CDF.
fn sample_trace(dim: usize, trace_bound: f64, rng: &mut Stream) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    trace_bound * u.powf(1.0 / (dim * dim) as f64)
}

/// Ordered eigenvalues of an ensemble draw: strictly positive, strictly
/// increasing, with total trace distributed as `t^(N^2-1)` on `(0, k]` and
/// the normalized spectrum following the squared-Vandermonde simplex law.
pub fn sample_eigenvalues(spec: &EnsembleSpec, rng: &mut Stream) -> Result<Vec<f64>> {
    if spec.field != ScalarField::Complex {
        return Err(Error::invalid(
            "field",
            "eigenvalue sampling is only defined for the complex ensemble",
        ));
    }
    loop {
        let g = ginibre(spec.dim, rng);
        let w = &g * g.adjoint();
        let mut eigs: Vec<f64> = w.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        // The spectrum of G G† is positive almost surely; a nonpositive or
        // tied value is a measure-zero numerical event, so redraw.
        if eigs[0] <= 0.0 || eigs.windows(2).any(|w| w[0] >= w[1]) {
            continue;
        }
        let sum: f64 = eigs.iter().sum();
        let t = sample_trace(spec.dim, spec.trace_bound, rng);
        return Ok(eigs.into_iter().map(|l| l * t / sum).collect());
    }
}

/// Hamiltonian draw `H = t * W / tr(W)` with `W = G G†`: positive definite,
/// trace at most the bound, unitarily invariant.
pub fn sample_hamiltonian(spec: &EnsembleSpec, rng: &mut Stream) -> Result<HermitianOperator> {
    if spec.field != ScalarField::Complex {
        return Err(Error::invalid(
            "field",
            "Hamiltonian sampling is only defined for the complex ensemble",
        ));
    }
    let g = ginibre(spec.dim, rng);
    let mut w = &g * g.adjoint();
    let tr = w.trace().re;
    let t = sample_trace(spec.dim, spec.trace_bound, rng);
    w *= Complex64::new(t / tr, 0.0);
    HermitianOperator::from_complex(w)
}

/// Uniform state on the unit sphere of the given field.
pub fn sample_haar_state(dim: usize, field: ScalarField, rng: &mut Stream) -> PureState {
    let v = match field {
        ScalarField::Complex => DVector::from_fn(dim, |_, _| {
            Complex64::new(standard_normal(rng), standard_normal(rng))
        }),
        ScalarField::Real => {
            DVector::from_fn(dim, |_, _| Complex64::new(standard_normal(rng), 0.0))
        }
    };
    PureState::normalized(v).expect("Gaussian vector is nonzero almost surely")
}

pub mod audit {
    //! Binary dump of sampled spectra for offline auditing.
    //!
    //! File layout, all little-endian:
    //!
    //! ```text
    //! magic   4 bytes  = b"HVEG"
    //! version u32      = 1
    //! dim     u32
    //! count   u64
    //! count records of:
    //!     spec_hash    u64
    //!     stream_index u64
    //!     eigenvalues  dim x f64 (ascending)
    //! ```

    use std::io::{Read, Write};

    pub const MAGIC: &[u8; 4] = b"HVEG";
    pub const VERSION: u32 = 1;

    #[derive(Clone, Debug, PartialEq)]
    pub struct EigenvalueRecord {
        pub spec_hash: u64,
        pub stream_index: u64,
        pub eigenvalues: Vec<f64>,
    }

    pub fn write_records(
        mut w: impl Write,
        dim: u32,
        records: &[EigenvalueRecord],
    ) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&dim.to_le_bytes())?;
        w.write_all(&(records.len() as u64).to_le_bytes())?;
        for rec in records {
            debug_assert_eq!(rec.eigenvalues.len(), dim as usize);
            w.write_all(&rec.spec_hash.to_le_bytes())?;
            w.write_all(&rec.stream_index.to_le_bytes())?;
            for &e in &rec.eigenvalues {
                w.write_all(&e.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_records(mut r: impl Read) -> std::io::Result<(u32, Vec<EigenvalueRecord>)> {
        fn bad(msg: &str) -> std::io::Error {
            std::io::Error::new(std::io::ErrorKind::InvalidData, msg)
        }
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not an eigenvalue audit file"));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        if u32::from_le_bytes(u32buf) != VERSION {
            return Err(bad("unsupported audit file version"));
        }
        r.read_exact(&mut u32buf)?;
        let dim = u32::from_le_bytes(u32buf);
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let count = u64::from_le_bytes(u64buf);
        let mut records = Vec::with_capacity(count.min(1 << 20) as usize);
        for _ in 0..count {
            r.read_exact(&mut u64buf)?;
            let spec_hash = u64::from_le_bytes(u64buf);
            r.read_exact(&mut u64buf)?;
            let stream_index = u64::from_le_bytes(u64buf);
            let mut eigenvalues = Vec::with_capacity(dim as usize);
            for _ in 0..dim {
                r.read_exact(&mut u64buf)?;
                eigenvalues.push(f64::from_le_bytes(u64buf));
            }
            records.push(EigenvalueRecord {
                spec_hash,
                stream_index,
                eigenvalues,
            });
        }
        Ok((dim, records))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::StreamFactory;

    fn spec(dim: usize, k: f64, seed: u64) -> EnsembleSpec {
        EnsembleSpec::new(dim, k, ScalarField::Complex, seed).unwrap()
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let f = StreamFactory::new(11);
        for (i, &dim) in [1usize, 2, 4, 8].iter().enumerate() {
            let u = sample_haar_unitary(dim, &mut f.substream(i as u64));
            let defect = (u.adjoint() * &u - DMatrix::identity(dim, dim))
                .iter()
                .fold(0.0f64, |acc, x| acc.max(x.norm()));
            assert!(defect <= 1e-12, "dim={dim}: defect {defect}");
        }
    }

    #[test]
    fn haar_unitary_dim_one_is_a_phase() {
        let f = StreamFactory::new(3);
        let u = sample_haar_unitary(1, &mut f.substream(0));
        assert!((u[(0, 0)].norm() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn eigenvalues_are_ordered_positive_and_bounded() {
        let s = spec(5, 2.0, 17);
        let f = StreamFactory::new(s.master_seed);
        for i in 0..200 {
            let eigs = sample_eigenvalues(&s, &mut f.substream(i)).unwrap();
            assert_eq!(eigs.len(), 5);
            assert!(eigs[0] > 0.0);
            assert!(eigs.windows(2).all(|w| w[0] < w[1]));
            let total: f64 = eigs.iter().sum();
            assert!(total <= s.trace_bound + 1e-9);
        }
    }

    #[test]
    fn dim_one_eigenvalue_is_uniform_trace_draw() {
        // N = 1 collapses to a single draw with density t^0, i.e. uniform.
        let s = spec(1, 3.0, 5);
        let f = StreamFactory::new(s.master_seed);
        let n = 20_000;
        let mean: f64 = (0..n)
            .map(|i| sample_eigenvalues(&s, &mut f.substream(i)).unwrap()[0])
            .sum::<f64>()
            / n as f64;
        // Uniform(0, 3] has mean 1.5, sd 3/sqrt(12).
        let se = 3.0 / 12f64.sqrt() / (n as f64).sqrt();
        assert!((mean - 1.5).abs() < 4.0 * se, "mean={mean}");
    }

    #[test]
    fn hamiltonian_respects_trace_bound_and_hermiticity() {
        let s = spec(4, 1.5, 23);
        let f = StreamFactory::new(s.master_seed);
        for i in 0..200 {
            let h = sample_hamiltonian(&s, &mut f.substream(i)).unwrap();
            assert_eq!(h.dim(), 4);
            assert!(h.trace() <= s.trace_bound + 1e-9);
            assert!(h.hermiticity_defect() <= 1e-12 * h.max_abs_entry());
        }
    }

    #[test]
    fn samples_are_stream_deterministic() {
        let s = spec(3, 1.0, 99);
        let f = StreamFactory::new(s.master_seed);
        let a = sample_hamiltonian(&s, &mut f.substream(7)).unwrap();
        let b = sample_hamiltonian(&s, &mut f.substream(7)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.entry(i, j), b.entry(i, j));
            }
        }
    }

    #[test]
    fn haar_state_is_normalized() {
        let f = StreamFactory::new(31);
        for i in 0..500 {
            let s = sample_haar_state(6, ScalarField::Complex, &mut f.substream(i));
            assert!((s.amplitudes().norm() - 1.0).abs() <= 1e-12);
            let r = sample_haar_state(6, ScalarField::Real, &mut f.substream(i + 1000));
            assert!((r.amplitudes().norm() - 1.0).abs() <= 1e-12);
            assert!(r.amplitudes().iter().all(|a| a.im == 0.0));
        }
    }

    #[test]
    fn pure_state_overlaps() {
        let e0 = PureState::basis_state(3, 0);
        let e1 = PureState::basis_state(3, 1);
        assert_eq!(e0.overlap_magnitude(&e0).unwrap(), 1.0);
        assert_eq!(e0.overlap_magnitude(&e1).unwrap(), 0.0);
        let other = PureState::basis_state(2, 0);
        assert!(e0.overlap(&other).is_err());
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        m[(0, 1)] = Complex64::new(1.0, 0.5);
        m[(1, 0)] = Complex64::new(1.0, 0.5); // should be the conjugate
        assert!(matches!(
            HermitianOperator::from_complex(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn audit_roundtrip() {
        let records = vec![
            audit::EigenvalueRecord {
                spec_hash: 0xdead_beef,
                stream_index: 0,
                eigenvalues: vec![0.1, 0.2, 0.7],
            },
            audit::EigenvalueRecord {
                spec_hash: 0xdead_beef,
                stream_index: 1,
                eigenvalues: vec![0.05, 0.3, 0.6],
            },
        ];
        let mut buf = Vec::new();
        audit::write_records(&mut buf, 3, &records).unwrap();
        // 4 + 4 + 4 + 8 header bytes, then 2 records of (8 + 8 + 24).
        assert_eq!(buf.len(), 20 + 2 * 40);
        let (dim, back) = audit::read_records(buf.as_slice()).unwrap();
        assert_eq!(dim, 3);
        assert_eq!(back, records);
    }
}
