//! Runtime dispatch over the models that carry the full canonical
//! structure. Used by the command-line tool and the C interface.

use crate::coherent::{CoherentModel, FockVector};
use crate::discrete::{maxent_fit, DiscreteModel, ProbabilityVector};
use crate::error::{Error, Result};
use crate::model::{self, DivergenceReport, DualPair, EnergyPoint, LegendreOnly, MetricTensor, ParamPoint};
use crate::model::{Answers, ModelDescriptor, PythagorasReport};
use crate::qubit::{DensityMatrix2, QubitModel};

#[derive(Debug, Clone)]
pub enum CanonicalModel {
    Discrete(DiscreteModel),
    Qubit(QubitModel),
    Coherent(CoherentModel),
}

/// A data set of whichever kind the model expects.
#[derive(Debug, Clone)]
pub enum DataSet {
    Distribution(ProbabilityVector),
    Density(DensityMatrix2),
    Wave(FockVector),
}

macro_rules! each {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            CanonicalModel::Discrete($m) => $body,
            CanonicalModel::Qubit($m) => $body,
            CanonicalModel::Coherent($m) => $body,
        }
    };
}

macro_rules! with_data {
    ($self:expr, $x:expr, $m:ident, $d:ident => $body:expr) => {
        match ($self, $x) {
            (CanonicalModel::Discrete($m), DataSet::Distribution($d)) => $body,
            (CanonicalModel::Qubit($m), DataSet::Density($d)) => $body,
            (CanonicalModel::Coherent($m), DataSet::Wave($d)) => $body,
            _ => Err(Error::InvalidParameter("data set kind does not match the model".into())),
        }
    };
}

/// Outcome of fitting θ to target energies.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub theta: ParamPoint,
    pub moments: EnergyPoint,
    pub iterations: usize,
}

impl CanonicalModel {
    pub fn name(&self) -> &'static str {
        match self {
            CanonicalModel::Discrete(_) => "discrete",
            CanonicalModel::Qubit(_) => "qubit",
            CanonicalModel::Coherent(_) => "coherent",
        }
    }

    pub fn dim(&self) -> usize {
        each!(self, m => m.dim())
    }

    pub fn massieu(&self, theta: &[f64]) -> Result<f64> {
        each!(self, m => model::massieu(m, theta))
    }

    /// Φ through the numerical Legendre transform only.
    pub fn massieu_numeric(&self, theta: &[f64]) -> Result<f64> {
        each!(self, m => model::massieu(&LegendreOnly(m), theta))
    }

    pub fn theta_to_u(&self, theta: &[f64]) -> Result<EnergyPoint> {
        each!(self, m => model::theta_to_u(m, theta))
    }

    pub fn u_to_theta(&self, u: &[f64]) -> Result<ParamPoint> {
        each!(self, m => model::u_to_theta(m, u))
    }

    /// `S(U)` for a domain member.
    pub fn entropy_u(&self, u: &[f64]) -> Result<f64> {
        each!(self, m => {
            crate::error::check_len(m.dim(), u.len())?;
            if !m.energy_domain().contains(u) {
                return Err(Error::OutsideDomain { point: u.to_vec() });
            }
            Ok(m.entropy_u(u))
        })
    }

    pub fn in_domain(&self, u: &[f64]) -> bool {
        each!(self, m => m.energy_domain().contains(u))
    }

    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        each!(self, m => m.energy_domain().bounding_box().to_vec())
    }

    pub fn metric(&self, theta: &[f64]) -> Result<MetricTensor> {
        each!(self, m => model::metric_tensor(m, theta))
    }

    pub fn canonical_tolerance(&self) -> f64 {
        each!(self, m => model::canonical_tolerance(m))
    }

    pub fn canonical_check(&self, theta: &[f64], tol: Option<f64>) -> Result<DualPair> {
        each!(self, m => model::canonical_check(m, theta, tol.unwrap_or_else(|| model::canonical_tolerance(m))))
    }

    pub fn bregman(&self, theta: &[f64], zeta: &[f64]) -> Result<f64> {
        each!(self, m => model::bregman_divergence(m, theta, zeta))
    }

    pub fn pythagoras_models(&self, theta: &[f64], zeta: &[f64], xi: &[f64]) -> Result<PythagorasReport> {
        each!(self, m => model::pythagoras_models(m, theta, zeta, xi))
    }

    pub fn orthogonal_partner(&self, theta: &[f64], zeta: &[f64], direction: &[f64], step: f64) -> Result<ParamPoint> {
        each!(self, m => model::orthogonal_partner(m, theta, zeta, direction, step))
    }

    pub fn convexity_probe(&self, theta1: &[f64], theta2: &[f64], lambdas: &[f64]) -> Result<f64> {
        each!(self, m => model::convexity_probe(m, theta1, theta2, lambdas))
    }

    /// θ with `U(θ) = u`; the discrete model reports its Newton iterations.
    pub fn fit(&self, u: &[f64]) -> Result<Fit> {
        match self {
            CanonicalModel::Discrete(m) => {
                crate::error::check_len(m.dim(), u.len())?;
                let fit = maxent_fit(m.family(), u, 1e-12)?;
                Ok(Fit {
                    theta: fit.theta,
                    moments: EnergyPoint(fit.moments),
                    iterations: fit.iterations,
                })
            }
            _ => {
                let theta = self.u_to_theta(u)?;
                let moments = self.theta_to_u(&theta)?;
                Ok(Fit {
                    theta,
                    moments,
                    iterations: 0,
                })
            }
        }
    }

    pub fn answers(&self, x: &DataSet) -> Result<Answers> {
        with_data!(self, x, m, d => m.answers(d).expect("canonical models answer questions"))
    }

    pub fn divergence_from_data(&self, x: &DataSet, theta: &[f64]) -> Result<DivergenceReport> {
        with_data!(self, x, m, d => model::divergence_from_data(m, d, theta))
    }

    pub fn divergence_def5(&self, x: &DataSet, u: &[f64], samples: usize, seed: u64) -> Result<f64> {
        with_data!(self, x, m, d => model::divergence_def5(m, d, u, samples, seed))
    }

    pub fn pythagoras_data(&self, x: &DataSet, theta: &[f64], zeta: &[f64]) -> Result<f64> {
        with_data!(self, x, m, d => model::pythagoras_data(m, d, theta, zeta))
    }

    /// Fiber members of `m_U` with their answers.
    pub fn fiber_answers(&self, u: &[f64], count: usize, seed: u64) -> Result<Vec<Answers>> {
        each!(self, m => {
            let fiber = m.fiber(u, count, seed).ok_or(Error::Unsupported("model has no fiber sampler"))??;
            fiber
                .iter()
                .map(|y| m.answers(y).ok_or(Error::Unsupported("model has no data set layer"))?)
                .collect()
        })
    }
}
