use std::path::PathBuf;

/// Errors raised by the solver pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("gamma = {gamma} lies outside [1, {gamma_end}]")]
    Domain { gamma: f64, gamma_end: f64 },

    #[error("adaptive step collapsed at gamma = {gamma} (v = {v}) away from a breakdown event")]
    StepCollapse { gamma: f64, v: f64 },

    #[error("no bracket: objective still above target at C = {c}")]
    NoBracket { c: f64 },

    #[error("bisection did not converge after {iterations} iterations (residual {residual})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("negative discriminant 2v = {value} at gamma = {gamma}")]
    NegativeDiscriminant { gamma: f64, value: f64 },

    #[error("guard band leaves only {remaining} interior samples (need at least 8)")]
    GuardBandTooWide { remaining: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed document: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerical solvers, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::StepCollapse { .. } | Error::NoBracket { .. } | Error::NonConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
