use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpucError {
    #[error("coefficient {value} has modulus {modulus}, outside the admissible disk |a| < 1 - {margin:e}")]
    OutsideDisk {
        value: String,
        modulus: f64,
        margin: f64,
    },

    #[error("index {index} out of range for a sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point-mass weight {0} is not in the open interval (0, 1)")]
    InvalidWeight(f64),

    #[error("total point-mass weight {0} is not below 1")]
    TotalWeightTooLarge(f64),

    #[error("two point masses share the location {angle} rad")]
    CoincidentMasses { angle: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("{points} quadrature points is below the required {required}")]
    TooFewQuadraturePoints { points: usize, required: usize },

    #[error("quadrature defect |c_0 - 1| = {defect:e} exceeds {limit:e}; increase quad_points")]
    QuadratureDefect { defect: f64, limit: f64 },

    #[error("Toeplitz moment matrix is not positive definite at order {order}")]
    NotPositiveDefinite { order: usize },

    #[error("moment vector has {available} entries beyond c_0, {required} required")]
    NotEnoughMoments { available: usize, required: usize },

    #[error("evaluation point has modulus {0} > 1")]
    PointOutsideDisk(f64),

    #[error("weight vanishes or is not finite at boundary angle {angle}")]
    WeightVanishes { angle: f64 },

    #[error("no convergence within {n_max} steps (last block oscillation {oscillation:e})")]
    NonConvergence { n_max: usize, oscillation: f64 },

    #[error("point at angle {angle} lies within {distance:e} rad of an excluded point (radius {radius})")]
    TooCloseToExclusion {
        angle: f64,
        distance: f64,
        radius: f64,
    },

    #[error(
        "decomposition does not reproduce the sequence at n = {index} (residual {residual:e})"
    )]
    DecompositionMismatch { index: usize, residual: f64 },

    #[error("least-squares design is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("|Phi_n| underflowed at n = {n} on the unit circle")]
    RadiusUnderflow { n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = OpucError> = std::result::Result<T, E>;
