use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Batch front-end for parent-Hamiltonian volume calculations: closed-form
/// volumes and bounds, Monte Carlo relative-volume estimates, the
/// random-coupling Ising benchmark, Beta-CDF fitting, and the statistical
/// validator suite. Every run embeds its resolved configuration and seed, so
/// reports are reproducible byte for byte.
#[derive(Debug, Parser)]
#[command(name = "hamvol", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format. JSON is the canonical report; CSV is a plotting
    /// projection.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for trial parallelism. Defaults to the HAMVOL_WORKERS
    /// environment variable, then to the number of CPUs. Results are
    /// identical for any worker count.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Key=value config file merged underneath explicit flags (flags win).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Complex,
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Overlap,
    Fidelity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Haar state stands in for the ground direction (fast, exact for the
    /// unrestricted ensemble).
    Eigvec,
    /// Sample the full Hamiltonian and diagonalize.
    FullH,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CiArg {
    Wilson,
    ClopperPearson,
}

// FromStr mirrors the clap value names so config files use the same
// spellings as flags.
macro_rules! from_str_via_value_enum {
    ($ty:ty) => {
        impl std::str::FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                <$ty as ValueEnum>::from_str(s, true)
            }
        }
    };
}

from_str_via_value_enum!(Format);
from_str_via_value_enum!(FieldArg);
from_str_via_value_enum!(CriterionArg);
from_str_via_value_enum!(ModeArg);
from_str_via_value_enum!(CiArg);

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate closed-form volumes, relative volumes, and locality bounds.
    Analytic(AnalyticArgs),
    /// Monte Carlo relative-volume estimation for the unrestricted ensemble.
    Mc(McArgs),
    /// Random-coupling transverse-field Ising benchmark with Beta-CDF fits.
    Ising(IsingArgs),
    /// Fit a Beta CDF to a previously saved curve report.
    Fit(FitArgs),
    /// Run the statistical validator suite; nonzero exit on failure.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    /// Total volume of the bounded-trace manifold per dimension in --N.
    #[arg(long = "total-vol")]
    pub total_vol: bool,

    /// Hypersurface with --L fixed eigenstates.
    #[arg(long)]
    pub hypersurface: bool,

    /// Volume of the epsilon-neighborhood of a target ground state.
    #[arg(long = "eps-vol")]
    pub eps_vol: bool,

    /// Relative volume (complex or real field).
    #[arg(long = "rel-vol")]
    pub rel_vol: bool,

    /// Large-N asymptotic relative volume and the admissible-error ceiling.
    #[arg(long)]
    pub stirling: bool,

    /// Upper bound for t-local translationally invariant Hamiltonians.
    #[arg(long = "ti-bound")]
    pub ti_bound: bool,

    /// Relative-volume bound for delta-perturbed TI Hamiltonians.
    #[arg(long = "delta-ti-bound")]
    pub delta_ti_bound: bool,

    /// Emit the log10 relative-volume curve over the epsilon grid, one
    /// column per dimension in --N.
    #[arg(long)]
    pub fig1: bool,

    /// Hilbert-space dimension(s), comma-separated.
    #[arg(long = "N", value_name = "DIMS")]
    pub dims: Option<String>,

    /// Trace bound k.
    #[arg(long)]
    pub k: Option<f64>,

    /// Number of fixed eigenstates for --hypersurface.
    #[arg(long = "L")]
    pub fixed_states: Option<u32>,

    /// Epsilon grid: comma list or log-spaced `a..b`.
    #[arg(long)]
    pub eps: Option<String>,

    /// Points for `a..b` epsilon ranges.
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,

    /// Scalar field for --rel-vol.
    #[arg(long, value_enum)]
    pub field: Option<FieldArg>,

    /// Local dimension d (locality bounds).
    #[arg(long)]
    pub d: Option<u32>,

    /// Locality t (locality bounds).
    #[arg(long)]
    pub t: Option<u32>,

    /// Number of parties n (locality bounds).
    #[arg(long)]
    pub n: Option<u32>,

    /// Number of local terms M (locality bounds).
    #[arg(long = "M")]
    pub num_terms: Option<u32>,

    /// Locality-breaking weight delta (delta-TI bound).
    #[arg(long)]
    pub delta: Option<f64>,

    /// Nonlocal trace bound k' (delta-TI bound).
    #[arg(long = "k-prime")]
    pub k_prime: Option<f64>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Hilbert-space dimension.
    #[arg(long = "N")]
    pub dim: Option<usize>,

    /// Number of Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,

    /// Epsilon grid: comma list or log-spaced `a..b`.
    #[arg(long)]
    pub eps: Option<String>,

    /// Points for `a..b` epsilon ranges.
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,

    /// Hit criterion.
    #[arg(long, value_enum)]
    pub criterion: Option<CriterionArg>,

    /// Master seed for the counter-based streams.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Trace bound k of the sampled ensemble.
    #[arg(long)]
    pub k: Option<f64>,

    /// Scalar field of the ensemble.
    #[arg(long, value_enum)]
    pub field: Option<FieldArg>,

    /// Ground-direction sampling mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,

    /// Also emit the closed-form / exact-tail comparison columns.
    #[arg(long)]
    pub compare: bool,

    /// Confidence-interval method.
    #[arg(long, value_enum)]
    pub ci: Option<CiArg>,

    /// Two-sided confidence level.
    #[arg(long)]
    pub confidence: Option<f64>,

    /// Write a binary audit dump of sampled eigenvalue spectra here.
    #[arg(long)]
    pub dump: Option<PathBuf>,

    /// Number of spectra in the audit dump.
    #[arg(long = "dump-count")]
    pub dump_count: Option<u64>,
}

#[derive(Debug, Args)]
pub struct IsingArgs {
    /// Chain length(s), comma-separated.
    #[arg(long = "n", value_name = "SITES")]
    pub sites: Option<String>,

    /// Transverse field strength g.
    #[arg(long)]
    pub g: Option<f64>,

    /// Lower end of the coupling range.
    #[arg(long)]
    pub jmin: Option<f64>,

    /// Upper end of the coupling range.
    #[arg(long)]
    pub jmax: Option<f64>,

    /// Uniform coupling of the reference chain whose ground state is the
    /// target.
    #[arg(long = "target-j")]
    pub target_j: Option<f64>,

    /// Number of sampled coupling vectors per chain length.
    #[arg(long)]
    pub trials: Option<u64>,

    /// Epsilon grid: comma list or log-spaced `a..b`.
    #[arg(long)]
    pub eps: Option<String>,

    /// Points for `a..b` epsilon ranges.
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,

    /// Hit criterion.
    #[arg(long, value_enum)]
    pub criterion: Option<CriterionArg>,

    /// Master seed for the counter-based streams.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Confidence-interval method.
    #[arg(long, value_enum)]
    pub ci: Option<CiArg>,

    /// Two-sided confidence level.
    #[arg(long)]
    pub confidence: Option<f64>,

    /// Skip the Beta-CDF fit.
    #[arg(long = "no-fit")]
    pub no_fit: bool,

    /// Write a per-trial audit CSV (trial, couplings, fidelity) here; one
    /// file per chain length with `.n<sites>` inserted before the extension.
    #[arg(long = "log-couplings")]
    pub log_couplings: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// JSON report (or bare curve) to fit.
    #[arg(long)]
    pub input: PathBuf,

    /// Which run to fit when the report contains several (e.g. one per
    /// chain length).
    #[arg(long)]
    pub run: Option<usize>,

    /// Optional multistart override, `alpha:beta` pairs comma-separated.
    #[arg(long)]
    pub starts: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced trial counts, same checks.
    #[arg(long)]
    pub quick: bool,

    /// Master seed for the validator streams.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Trials per statistical check.
    #[arg(long)]
    pub trials: Option<u64>,

    /// Significance level for the distributional tests.
    #[arg(long)]
    pub significance: Option<f64>,
}
