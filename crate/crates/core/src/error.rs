//! Error type shared by the numerical modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("negative substrate concentration {0}")]
    NegativeConcentration(f64),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("attachment rate a = 0: aggregate biomass profiles are undefined")]
    FlocculationDegenerate,

    #[error("evaluation too close to a pole of the biomass profiles at S = {s}")]
    NearPole { s: f64 },

    #[error("operation requires a {expected} steady state, got {got}")]
    WrongKind {
        expected: &'static str,
        got: &'static str,
    },

    #[error("steady state residual {residual:e} exceeds tolerance {tol:e}")]
    StaleSteadyState { residual: f64, tol: f64 },

    #[error("step size underflow at t = {t} (h = {h:e}); the problem looks stiff")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("trajectory left the admissible box at t = {t}")]
    Divergence { t: f64 },

    #[error("limit cycle period unresolved: {returns} section returns within budget")]
    PeriodUnresolved { returns: usize },

    #[error("eigenvalue pair not identifiable: three near-real eigenvalues")]
    DegenerateEigenpair,

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("operating point within {dist:e} of the {curve} curve")]
    Boundary { curve: &'static str, dist: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}
