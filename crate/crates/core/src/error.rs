use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial of degree {degree} cannot be reflected at order {order}")]
    InvalidOrder { degree: usize, order: usize },

    #[error("Verblunsky coefficient {index} has modulus {modulus} (must be < 1)")]
    InvalidVerblunsky { index: usize, modulus: f64 },

    #[error("moment sequence is not positive definite at step {index}")]
    NotPositiveDefinite { index: usize },

    #[error("moment extraction limited to n <= {cap}, requested {requested}")]
    MomentOrderTooLarge { requested: usize, cap: usize },

    #[error("index {index} out of range for system of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("polynomial has a zero in the closed unit disk ({detail})")]
    ZeroInDisk { detail: String },

    #[error("mixing weight t = {0} outside [0, 1)")]
    InvalidMixingWeight(f64),

    #[error("insertion points are not kernel-orthogonal: |K(xi_{i}, xi_{j})| = {residual:e}")]
    InadmissibleInsertion { i: usize, j: usize, residual: f64 },

    #[error("parameter {name} = {value} outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("trigonometric polynomial is not strictly positive (min {min:e})")]
    NotPositive { min: f64 },

    #[error("input has Fourier content beyond degree {degree} (relative {relative:e})")]
    DegreeExceeded { degree: usize, relative: f64 },

    #[error("factorization residual {residual:e} above tolerance at grid size {grid}")]
    InsufficientResolution { residual: f64, grid: usize },

    #[error("polynomial vanishes on the unit circle near theta = {theta}")]
    ZeroOnCircle { theta: f64 },

    #[error("polynomial is not orthonormal: norm^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("Steklov condition violated at theta = {theta}: 2*pi*density = {value:e} < {delta:e}")]
    SteklovViolation { theta: f64, value: f64, delta: f64 },

    #[error("extraction failed at index {index}: {source}")]
    Extraction {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("finite difference step left the admissible moment region at coordinate {coordinate}")]
    FiniteDifference { coordinate: usize },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
