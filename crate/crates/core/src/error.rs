use thiserror::Error;

use crate::geometry::RegionId;

/// Errors raised by the map, geometry, and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coupling a = {0} is outside the diffeomorphism range 0 < a < 1/6")]
    InvalidCoupling(f64),

    #[error("non-finite coordinate ({x}, {y})")]
    NonFinite { x: f64, y: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("root of xi4(., {y}) not bracketed")]
    BracketFailure { y: f64 },

    #[error("point ({x}, {y}) is not in A1")]
    OutOfRegion { x: f64, y: f64 },

    #[error("operation not supported for region {0:?}")]
    UnsupportedRegion(RegionId),

    #[error("orbit from ({x}, {y}) does not converge to the sink")]
    NotConverging { x: f64, y: f64 },

    #[error("orbit starts at the sink; contraction rate is undefined")]
    DegenerateOrbit,
}

pub type Result<T> = std::result::Result<T, Error>;
