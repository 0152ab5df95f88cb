use thiserror::Error;

/// Errors raised by the coordinate, series and harmonic-function routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SosError {
    #[error("series did not converge within {terms} terms (W = {w})")]
    NonConvergent { w: f64, terms: usize },

    #[error("W = {w} lies outside the convergence region of the requested series (W_border = {w_border})")]
    RegionViolation { w: f64, w_border: f64 },

    #[error("W = {w} lies in the guard band around W_border = {w_border}")]
    NearBorder { w: f64, w_border: f64 },

    #[error("quantity is singular on the rotation axis (|nu| = pi/2)")]
    PoleLimit,

    #[error("second-kind function diverges at s = {s} (|s| >= sqrt(1 + mu))")]
    PoleDivergence { s: f64 },

    #[error("the origin has no similar-oblate-spheroidal coordinates")]
    DegenerateOrigin,

    #[error("finite-difference stencil leaves the valid domain: {0}")]
    StencilOutOfDomain(String),

    #[error("least-squares system is rank deficient (numerical rank {rank} < {unknowns} unknowns)")]
    RankDeficient { rank: usize, unknowns: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, SosError>;
