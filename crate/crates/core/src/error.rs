use thiserror::Error;

use crate::model::DualPair;

/// Errors raised by the numerical engine and the model instances.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("function is not finite at {point:?}")]
    EvaluationDomain { point: Vec<f64> },

    #[error("point {point:?} lies outside the energy domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("no grid point satisfies domain membership")]
    EmptyDomain,

    #[error(
        "optimizer did not converge after {iterations} iterations \
         (gradient norm {gradient_norm:e}, best value {best_value})"
    )]
    NonConvergence {
        iterations: usize,
        gradient_norm: f64,
        best_value: f64,
        best_point: Vec<f64>,
    },

    #[error("Massieu function is unbounded at theta = {theta:?}")]
    UnboundedMassieu { theta: Vec<f64> },

    #[error("metric tensor is degenerate (minimum eigenvalue {min_eigenvalue:e})")]
    DegenerateMetric { min_eigenvalue: f64 },

    #[error("canonical identity violated: residual {:e}", .0.residual)]
    CanonicalityViolation(Box<DualPair>),

    #[error("operation not supported by this model: {0}")]
    Unsupported(&'static str),

    #[error("shape mismatch: expected {expected}, got {found}")]
    Shape { expected: usize, found: usize },

    #[error("support violation: q[{index}] = 0 while p[{index}] = {p}")]
    Support { index: usize, p: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("target moments {target:?} are not in the interior of the moment polytope")]
    Infeasible { target: Vec<f64> },

    #[error("constraint violated: data set answers {answers:?} differ from model point {expected:?}")]
    Constraint {
        answers: Vec<f64>,
        expected: Vec<f64>,
    },

    #[error("Hamiltonians together with the constant vector are linearly dependent")]
    DegenerateFamily,

    #[error("non-physical state: |U| = {norm} > 1")]
    NonPhysical { norm: f64 },

    #[error("Bloch vector on the boundary of the chart: |U| = {norm}")]
    ChartBoundary { norm: f64 },

    #[error("spectral function undefined at eigenvalue {eigenvalue}")]
    SpectralDomain { eigenvalue: f64 },

    #[error("truncation inadequate: |z|^2 = {norm_sqr} exceeds nmax/4 = {limit}")]
    Truncation { norm_sqr: f64, limit: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate data: {0}")]
    DegenerateData(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Short machine-readable category used in result envelopes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::EvaluationDomain { .. } | Error::OutsideDomain { .. } | Error::EmptyDomain => {
                "domain"
            }
            Error::NonConvergence { .. } => "non-convergence",
            Error::UnboundedMassieu { .. } => "unbounded",
            Error::DegenerateMetric { .. } | Error::DegenerateFamily => "degenerate",
            Error::CanonicalityViolation(_) => "canonicality",
            Error::Unsupported(_) => "unsupported",
            Error::Shape { .. } => "shape",
            Error::Support { .. } => "support",
            Error::InvalidDistribution(_) | Error::InvalidState(_) => "invalid-input",
            Error::Infeasible { .. } => "infeasible",
            Error::Constraint { .. } => "constraint",
            Error::NonPhysical { .. } | Error::ChartBoundary { .. } => "domain",
            Error::SpectralDomain { .. } => "spectral-domain",
            Error::Truncation { .. } => "truncation",
            Error::DegenerateData(_) => "degenerate-data",
            Error::InvalidParameter(_) => "invalid-parameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Shape { expected, found })
    }
}
