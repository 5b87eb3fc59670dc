use core::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument that must lie in the open upper half plane does not.
    NotInUpperHalfPlane,
    /// Logarithm requested at zero.
    LogOfZero,
    /// A value that must be finite is NaN or infinite.
    NonFinite,
    /// A matrix with (numerically) vanishing determinant cannot be normalized.
    DegenerateMatrix,
    /// Denominator of a reflection coefficient or update factor is too small.
    DegenerateDenominator,
    /// Evaluation hit a pole of the function.
    Pole,
    /// Hilbert-transform evaluation point coincides with a sample node.
    QuadratureNode,
    /// Too many quadrature cells had to be excluded for non-convergence.
    ExcludedCells { excluded: usize, total: usize },
    /// The ray misses the circle: `|sin phi| > c`.
    RayMissesCircle,
    /// Invalid parameter; the message names the constraint that failed.
    InvalidParameter(&'static str),
    /// Two-route transfer-matrix check disagreed beyond tolerance.
    ConventionMismatch { deviation: f64 },
    /// A Jacobi coefficient `a_n` became non-positive during integration.
    CoefficientPositivity { site: i64 },
    /// A matrix expected to be real has a non-negligible imaginary part.
    NotReal,
    /// The three probe points of a Möbius image are numerically coincident.
    CoincidentPoints,
    /// The image of the upper half plane is not a disk or half plane
    /// (the input matrix was not a upper-half-plane self-map).
    NotADisk,
    /// An intermediate matrix product lost unimodularity.
    UnimodularityLost { det_error: f64 },
    /// Too many grid points failed ladder convergence.
    LadderFailure { failed: usize, total: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotInUpperHalfPlane => write!(f, "argument must have positive imaginary part"),
            Error::LogOfZero => write!(f, "logarithm undefined at zero"),
            Error::NonFinite => write!(f, "non-finite value"),
            Error::DegenerateMatrix => write!(f, "matrix determinant is numerically zero"),
            Error::DegenerateDenominator => write!(f, "denominator is numerically zero"),
            Error::Pole => write!(f, "evaluation hit a pole"),
            Error::QuadratureNode => {
                write!(
                    f,
                    "evaluation point coincides with a quadrature sample node"
                )
            }
            Error::ExcludedCells { excluded, total } => {
                write!(
                    f,
                    "{excluded} of {total} quadrature cells excluded (limit 5%)"
                )
            }
            Error::RayMissesCircle => write!(f, "ray does not intersect the circle"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::ConventionMismatch { deviation } => {
                write!(
                    f,
                    "transfer-matrix convention check failed (deviation {deviation:e})"
                )
            }
            Error::CoefficientPositivity { site } => {
                write!(
                    f,
                    "coefficient a_{site} became non-positive during integration"
                )
            }
            Error::NotReal => write!(f, "matrix is not real within tolerance"),
            Error::CoincidentPoints => write!(f, "image points are numerically coincident"),
            Error::NotADisk => write!(f, "image of the upper half plane is not a disk"),
            Error::UnimodularityLost { det_error } => {
                write!(
                    f,
                    "matrix product lost unimodularity (|det - 1| = {det_error:e})"
                )
            }
            Error::LadderFailure { failed, total } => {
                write!(
                    f,
                    "{failed} of {total} grid points failed ladder convergence"
                )
            }
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
