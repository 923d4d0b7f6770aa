use thiserror::Error;

/// Failure modes of the geometric model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("sight lines are parallel")]
    ParallelLines,

    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),

    #[error("no sign change of the miss distance for E in [{lo:.4}, {hi:.4}] cm")]
    NoBracket { lo: f64, hi: f64 },

    #[error("the pillar blocks the {0}")]
    Obstructed(&'static str),

    #[error("deflection of {mu_deg:.4} deg leaves no outward sight line through the crossing")]
    BseOvershoot { mu_deg: f64 },
}

pub type Result<T> = std::result::Result<T, GeometryError>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> GeometryError {
    GeometryError::InvalidParameter {
        name,
        value,
        reason,
    }
}
