use thiserror::Error;

use crate::maps::PlanarPoint;

/// Errors raised by the map, analysis and squares routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point} coincides with the rotation center {center}")]
    DegenerateCenter { point: PlanarPoint, center: PlanarPoint },

    #[error("factor {factor} of the product hit its center at {point}")]
    DegenerateFactor { factor: usize, point: PlanarPoint },

    #[error("orbit hit a rotation center at step {step} (factor {factor})")]
    DegenerateAtStep { step: usize, factor: usize },

    #[error("inverse radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("a map product needs at least one factor")]
    EmptyProduct,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("polygon refinement exceeded {limit} vertices")]
    RefinementLimit { limit: usize },

    #[error("the orbit never crossed the separatrix")]
    NoCrossings,

    #[error("orbit radius varies by a factor {ratio:.3} > 10; rotation number undefined")]
    UnboundedOrbit { ratio: f64 },

    #[error("series is constant; no growth exponent")]
    DegenerateSeries,

    #[error("strip recurrence not valid for h = {h}, a_n = {a_n}, alpha = {alpha}")]
    OutOfRegime { h: String, a_n: String, alpha: u8 },

    #[error("rational parse error: {0}")]
    RationalParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
