use thiserror::Error;

/// Errors raised by geometry, flow, and derivative operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShapeError {
    #[error("degenerate Frenet frame at t = {t}: |T'| = {norm:e}")]
    DegenerateFrame { t: f64, norm: f64 },

    #[error("degenerate immersion at (u, v) = ({u}, {v}): |phi_u x phi_v| = {norm:e}")]
    DegenerateImmersion { u: f64, v: f64, norm: f64 },

    #[error("ill-conditioned first fundamental form (condition number {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("manifold has no boundary on the requested side")]
    NoBoundary,

    #[error("support ball (center {center:?}, radius {radius}) leaves the hold-all domain")]
    SupportViolation { center: [f64; 3], radius: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("finite-difference extrapolation failed to converge: {0}")]
    NoConvergence(String),

    #[error("curve is not arc-length parametrized (max ||gamma'| - 1| = {deviation:e})")]
    NotArcLength { deviation: f64 },

    #[error("crack is not interior: clearance {clearance} <= required {required}")]
    CrackNotInterior { clearance: f64, required: f64 },

    #[error("probe supports overlap: {0}")]
    ProbeOverlap(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = ShapeError> = std::result::Result<T, E>;
