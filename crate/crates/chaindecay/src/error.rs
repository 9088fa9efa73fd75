//! Error type shared by all modules.

use crate::spectral::ResonanceClass;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("energy {eps} lies outside the band [{lower}, {upper}]")]
    OutsideBand { eps: f64, lower: f64, upper: f64 },

    /// The closed forms of the well-defined-resonance branch were requested
    /// for a model whose pole is not a well-defined in-band resonance.
    #[error("no well-defined resonance: model classifies as {0:?}")]
    NotWellDefined(ResonanceClass),

    #[error("quadrature reached {achieved:.3e}, short of the {target:.3e} target")]
    QuadratureAccuracy { achieved: f64, target: f64 },

    #[error("eigensolver failed on eigenvalue {index} after {sweeps} implicit QL sweeps")]
    EigenNonConvergence { index: usize, sweeps: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
