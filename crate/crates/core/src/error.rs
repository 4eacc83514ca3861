use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma({0}) overflows f64")]
    GammaOverflow(f64),

    #[error("log-gamma requires a positive argument, got {0}")]
    NonPositiveArgument(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("symbol is singular at theta = 0 for alpha = {alpha}")]
    SingularEvaluation { alpha: f64 },

    #[error("z = {0} lies on the branch cut [0, inf)")]
    OnBranchCut(Complex64),

    #[error("winding number: phase step too large even with {m} samples")]
    InsufficientSamples { m: usize },

    #[error("winding number ill-conditioned: eps is {distance:e} from the symbol curve")]
    IllConditionedWinding { distance: f64 },

    #[error("Newton iteration for a(z) = eps stalled after {iterations} steps (residual {residual:e})")]
    NewtonFailure { iterations: usize, residual: f64 },

    #[error("root z = {0} is inside the unit circle (wrong root or branch)")]
    WrongRoot(Complex64),

    #[error("matrix order {n} exceeds the solver cap {cap}")]
    OrderTooLarge { n: usize, cap: usize },

    #[error("eigensolver failed on matrix {fingerprint}: {reason}")]
    EigenFailure { fingerprint: String, reason: String },

    #[error("spectrum labeling: {0}")]
    Labeling(String),

    #[error("eigenvalues {l} and {m} are degenerate (gap {gap:e})")]
    Degenerate { l: usize, m: usize, gap: f64 },

    #[error("eigenvector {l} is defective: self-pairing {pairing:e}")]
    Defective { l: usize, pairing: f64 },

    #[error("momentum window [{j}, {big_j}] unusable: {reason}")]
    BadWindow { j: usize, big_j: usize, reason: String },

    #[error("winding number is {nu}; the Wiener-Hopf eigenvector exists only for nu = -1 (only trivial eigenvector solutions)")]
    WindingMismatch { nu: i32 },

    #[error("coefficient extraction aliasing {estimate:e} exceeds {threshold:e} at M = {m}")]
    Aliasing { estimate: f64, threshold: f64, m: usize },

    #[error("log branch ambiguous: eps lies on the image of the branch cut")]
    BranchAmbiguity,

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("kernel 1 - z_c e^(-mu) nearly vanishes (min modulus {min_modulus:e}); endpoint regime")]
    NearSingularKernel { min_modulus: f64 },

    #[error("p = {p} is within 1e-3 of 0 or 2pi where the shift formula breaks down")]
    EndpointRegime { p: Complex64 },

    #[error("operator truncation needs M >= 4 j_max (M = {m}, j_max = {j_max})")]
    Truncation { m: usize, j_max: usize },

    #[error("|eps| = {0} must be < 1 for the shift-matrix factorization")]
    EigenvalueOutsideDisk(f64),

    #[error("length mismatch: {0}")]
    Length(String),

    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}
