use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid modulus: Im(tau) = {0} must be positive")]
    InvalidModulus(f64),

    #[error("unsupported degree b = {0}: a rational elliptic surface only carries I_b fibres with 1 <= b <= 9")]
    UnsupportedDegree(i64),

    #[error("point lies on the zero section (w = 0)")]
    ZeroSection,

    #[error("point outside the potential domain: |xi|^2_h = {0} must lie in (0, 1)")]
    PotentialDomain(f64),

    #[error("point outside the end region: |xi|^2_h = {norm} is not below the base level {base}")]
    OutsideEndRegion { norm: f64, base: f64 },

    #[error("base coordinate u = {0} outside the punctured unit disc")]
    OutsideDisc(f64),

    #[error("level {0} outside (0, 1)")]
    InvalidLevel(f64),

    #[error("semi-flat parameters are not calibrated (kappa unset)")]
    Uncalibrated,

    #[error("degenerate quadrature: {0}")]
    DegenerateQuadrature(String),

    #[error("non-periodic grid passed to periodic quadrature")]
    NonPeriodicGrid,

    #[error("fit needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("log-log fit needs strictly positive data, got ({0}, {1})")]
    NonPositiveSample(f64, f64),

    #[error("insufficient radial coverage: {0}")]
    InsufficientCoverage(String),

    #[error("metric is singular at the sample point")]
    SingularMetric,

    #[error("top form vanishes at the sample point (Omega ^ conj(Omega) = 0)")]
    DegenerateTopForm,

    #[error("triple residual {deviation:e} exceeds {tolerance:e}; rotation needs a hyperKähler triple")]
    NotATriple { deviation: f64, tolerance: f64 },

    #[error("triple constant {ratio} is not 1; normalise Omega before rotating")]
    NotNormalized { ratio: f64 },

    #[error("degenerate parameterisation: tangent vectors are dependent")]
    DegenerateParameterization,

    #[error("Omega vanishes on the surface")]
    DegeneratePhase,

    #[error("class ({0}, {1}) is not primitive")]
    NotPrimitive(i64, i64),

    #[error("vector has square {0}, a root must have square -2")]
    NotARoot(String),

    #[error("point lies on the wall of root #{0}")]
    OnWall(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid marked lattice: {0}")]
    InvalidMarking(String),

    #[error("map does not preserve the pairing: <e{i}, e{j}> = {before} but <mu e{i}, mu e{j}> = {after}")]
    PairingNotPreserved { i: usize, j: usize, before: String, after: String },

    #[error("matrix is not invertible over the integers")]
    NotUnimodular,

    #[error("fixture: {0}")]
    Fixture(String),
}
