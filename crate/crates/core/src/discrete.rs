//! Finite-alphabet exponential family
//! `p_θ(a) = c(a)·exp(−Σθ_j H_j(a)) / Z(θ)`.
//!
//! The divergence here is `Σ p ln(p/p_θ) ≥ 0`, the value the exponential-family
//! form `Φ(θ) − S(p) + Σθ_j E_p H_j` produces. The ratio is sometimes written
//! the other way round (`Σ p ln(p_θ/p)`), which only flips the sign.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::model::{Answers, ModelDescriptor, ParamPoint};
use crate::numerics::Domain;

/// |θ| beyond which the moment target is declared infeasible.
pub const THETA_DIVERGENCE: f64 = 1e3;
const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidDistribution(format!("negative or non-finite entry in {p:?}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self(p))
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(w: Vec<f64>) -> Result<Self> {
        let total: f64 = w.iter().sum();
        if !(total > 0.0) || w.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("bad weights {w:?}")));
        }
        Ok(Self(w.into_iter().map(|v| v / total).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Alphabet with prior weights `c(a)` and Hamiltonians `H_j(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFamily {
    prior: Vec<f64>,
    /// Row `j` holds `H_j(a)` for every letter.
    hamiltonians: Vec<Vec<f64>>,
}

impl DiscreteFamily {
    pub fn new(prior: Vec<f64>, hamiltonians: Vec<Vec<f64>>) -> Result<Self> {
        if prior.len() < 2 {
            return Err(Error::InvalidParameter("alphabet needs at least two letters".into()));
        }
        if prior.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidParameter(format!("prior weights must be positive: {prior:?}")));
        }
        for h in &hamiltonians {
            check_len(prior.len(), h.len())?;
            if h.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("Hamiltonian entries must be finite".into()));
            }
        }
        Ok(Self { prior, hamiltonians })
    }

    /// Uniform prior.
    pub fn with_unit_prior(hamiltonians: Vec<Vec<f64>>) -> Result<Self> {
        let size = hamiltonians.first().map_or(0, Vec::len);
        Self::new(vec![1.0; size], hamiltonians)
    }

    pub fn alphabet_size(&self) -> usize {
        self.prior.len()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonians.len()
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn hamiltonians(&self) -> &[Vec<f64>] {
        &self.hamiltonians
    }

    /// Rows `[1; H_1; …; H_n]`.
    fn constraint_matrix(&self) -> DMatrix<f64> {
        let k = self.alphabet_size();
        DMatrix::from_fn(self.dim() + 1, k, |r, c| {
            if r == 0 {
                1.0
            } else {
                self.hamiltonians[r - 1][c]
            }
        })
    }

    /// No combination of the Hamiltonians and the constant vanishes.
    pub fn check_rank(&self) -> Result<()> {
        let c = self.constraint_matrix();
        if c.nrows() > c.ncols() {
            return Err(Error::DegenerateFamily);
        }
        let scale = c.amax().max(1.0);
        if c.rank(1e-10 * scale) == c.nrows() {
            Ok(())
        } else {
            Err(Error::DegenerateFamily)
        }
    }

    fn exponents(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), theta.len())?;
        Ok((0..self.alphabet_size())
            .map(|a| {
                self.prior[a].ln()
                    - theta
                        .iter()
                        .zip(&self.hamiltonians)
                        .map(|(t, h)| t * h[a])
                        .sum::<f64>()
            })
            .collect())
    }

    fn moments(&self, p: &[f64]) -> Vec<f64> {
        self.hamiltonians
            .iter()
            .map(|h| h.iter().zip(p).map(|(x, w)| x * w).sum())
            .collect()
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn boltzmann_gibbs(family: &DiscreteFamily, theta: &[f64]) -> Result<ProbabilityVector> {
    let e = family.exponents(theta)?;
    let shift = max_of(&e);
    let w: Vec<f64> = e.iter().map(|x| (x - shift).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(ProbabilityVector(w.into_iter().map(|v| v / z).collect()))
}

/// `ln Σ_a c(a)·exp(−Σθ_j H_j(a))`.
pub fn log_partition(family: &DiscreteFamily, theta: &[f64]) -> Result<f64> {
    let e = family.exponents(theta)?;
    let shift = max_of(&e);
    Ok(shift + e.iter().map(|x| (x - shift).exp()).sum::<f64>().ln())
}

/// `−Σ p(a) ln(p(a)/c(a))` with `0·ln 0 = 0`.
pub fn bgs_entropy(family: &DiscreteFamily, p: &ProbabilityVector) -> Result<f64> {
    check_len(family.alphabet_size(), p.len())?;
    Ok(-p
        .as_slice()
        .iter()
        .zip(family.prior())
        .filter(|(&pa, _)| pa > 0.0)
        .map(|(&pa, &c)| pa * (pa / c).ln())
        .sum::<f64>())
}

pub fn expectation(p: &ProbabilityVector, f: &[f64]) -> Result<f64> {
    check_len(p.len(), f.len())?;
    Ok(p.as_slice().iter().zip(f).map(|(a, b)| a * b).sum())
}

/// Covariance matrix of the Hamiltonians under `p`.
pub fn fisher_covariance(family: &DiscreteFamily, p: &ProbabilityVector) -> Result<DMatrix<f64>> {
    check_len(family.alphabet_size(), p.len())?;
    let p = p.as_slice();
    let hs = family.hamiltonians();
    let means = family.moments(p);
    let n = family.dim();
    Ok(DMatrix::from_fn(n, n, |j, k| {
        p.iter()
            .enumerate()
            .map(|(a, w)| w * (hs[j][a] - means[j]) * (hs[k][a] - means[k]))
            .sum()
    }))
}

/// `Σ p ln(p/q)` over the support of `p`.
pub fn kl_divergence(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    check_len(p.len(), q.len())?;
    let mut total = 0.0;
    for (index, (&pa, &qa)) in p.as_slice().iter().zip(q.as_slice()).enumerate() {
        if pa > 0.0 {
            if qa <= 0.0 {
                return Err(Error::Support { index, p: pa });
            }
            total += pa * (pa / qa).ln();
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxentFit {
    pub theta: ParamPoint,
    pub moments: Vec<f64>,
    pub iterations: usize,
}

/// Solves `E_θ H = U` by Newton's method on the convex dual
/// `θ ↦ ln Z(θ) + θ·U`, whose Hessian is the Fisher covariance.
pub fn maxent_fit(family: &DiscreteFamily, u_target: &[f64], tol: f64) -> Result<MaxentFit> {
    check_len(family.dim(), u_target.len())?;
    let infeasible = || Error::Infeasible {
        target: u_target.to_vec(),
    };
    let inside_box = family.hamiltonians().iter().zip(u_target).all(|(h, &u)| {
        let lo = h.iter().copied().fold(f64::INFINITY, f64::min);
        u > lo && u < max_of(h)
    });
    if !inside_box {
        return Err(infeasible());
    }
    let dual = |theta: &[f64]| -> Result<f64> {
        Ok(log_partition(family, theta)? + theta.iter().zip(u_target).map(|(a, b)| a * b).sum::<f64>())
    };
    let n = family.dim();
    let mut theta = vec![0.0; n];
    let mut value = dual(&theta)?;
    for iteration in 0..crate::numerics::MAX_ITERATIONS {
        let p = boltzmann_gibbs(family, &theta)?;
        let moments = family.moments(p.as_slice());
        let residual: Vec<f64> = moments.iter().zip(u_target).map(|(m, u)| m - u).collect();
        let err = residual.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if err <= tol {
            return Ok(MaxentFit {
                theta: ParamPoint(theta),
                moments,
                iterations: iteration,
            });
        }
        let cov = fisher_covariance(family, &p)?;
        let step = cov
            .cholesky()
            .map(|c| c.solve(&DVector::from_column_slice(&residual)))
            .ok_or_else(infeasible)?;
        // Directional derivative of the dual along the step is −residual·step.
        let slope = -step.dot(&DVector::from_column_slice(&residual));
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=crate::numerics::MAX_HALVINGS {
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
            let v = dual(&trial)?;
            let noise = 64.0 * f64::EPSILON * value.abs().max(1.0);
            if v <= value + crate::numerics::ARMIJO * t * slope || (t == 1.0 && (v - value).abs() <= noise) {
                theta = trial;
                value = v;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if theta.iter().any(|v| v.abs() > THETA_DIVERGENCE) {
            return Err(infeasible());
        }
        if !accepted {
            if err <= tol.max(1e-9) {
                return Ok(MaxentFit {
                    theta: ParamPoint(theta),
                    moments,
                    iterations: iteration,
                });
            }
            return Err(infeasible());
        }
    }
    Err(Error::NonConvergence {
        iterations: crate::numerics::MAX_ITERATIONS,
        gradient_norm: f64::NAN,
        best_value: value,
        best_point: theta,
    })
}

/// The family as a data set model: data sets are probability vectors,
/// questions are the Hamiltonian expectations.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    family: DiscreteFamily,
    domain: Domain,
}

impl DiscreteModel {
    pub fn new(family: DiscreteFamily) -> Result<Self> {
        if family.dim() == 0 {
            return Err(Error::InvalidParameter("model needs at least one Hamiltonian".into()));
        }
        family.check_rank()?;
        let bounds: Vec<(f64, f64)> = family
            .hamiltonians()
            .iter()
            .map(|h| {
                let lo = h.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = max_of(h);
                (lo, hi)
            })
            .collect();
        let interior = family.moments(boltzmann_gibbs(&family, &vec![0.0; family.dim()])?.as_slice());
        let member_family = family.clone();
        let member_bounds = bounds.clone();
        let domain = Domain::new(
            bounds,
            move |u: &[f64]| {
                let in_box = u
                    .iter()
                    .zip(&member_bounds)
                    .all(|(&v, &(lo, hi))| v > lo && v < hi);
                if !in_box {
                    return false;
                }
                // A one-dimensional polytope is the open interval itself.
                member_bounds.len() == 1 || maxent_fit(&member_family, u, fit_tol(&member_family)).is_ok()
            },
            interior,
        )?;
        Ok(Self { family, domain })
    }

    pub fn family(&self) -> &DiscreteFamily {
        &self.family
    }

    /// Fiber `{p : E_p H = U}`: a point when `|A| = n + 1`, a segment when
    /// `|A| = n + 2`.
    pub fn fiber_points(&self, u: &[f64], count: usize, seed: u64) -> Result<Vec<ProbabilityVector>> {
        check_len(self.family.dim(), u.len())?;
        let k = self.family.alphabet_size();
        let n = self.family.dim();
        let c = self.family.constraint_matrix();
        let mut rhs = vec![1.0];
        rhs.extend_from_slice(u);
        match k - n - 1 {
            0 => {
                let p = c
                    .lu()
                    .solve(&DVector::from_vec(rhs))
                    .ok_or(Error::DegenerateFamily)?;
                if p.iter().any(|&v| v < -1e-12) {
                    return Err(Error::OutsideDomain { point: u.to_vec() });
                }
                Ok(vec![ProbabilityVector::from_weights(
                    p.iter().map(|v| v.max(0.0)).collect(),
                )?])
            }
            1 => {
                let center = boltzmann_gibbs(&self.family, &maxent_fit(&self.family, u, fit_tol(&self.family))?.theta)?;
                let direction = null_vector(&c);
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for (p, d) in center.as_slice().iter().zip(&direction) {
                    if *d > 0.0 {
                        lo = lo.max(-p / d);
                    } else if *d < 0.0 {
                        hi = hi.min(-p / d);
                    }
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let count = count.max(1);
                (0..count)
                    .map(|i| {
                        let t = lo + (hi - lo) * (i as f64 + rng.gen::<f64>()) / count as f64;
                        let p: Vec<f64> = center
                            .as_slice()
                            .iter()
                            .zip(&direction)
                            .map(|(p, d)| (p + t * d).max(0.0))
                            .collect();
                        ProbabilityVector::from_weights(p)
                    })
                    .collect()
            }
            _ => Err(Error::Unsupported("fiber sampling beyond one dimension")),
        }
    }
}

fn fit_tol(family: &DiscreteFamily) -> f64 {
    let scale = family
        .hamiltonians()
        .iter()
        .flatten()
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    1e-13 * scale
}

/// Unit vector spanning the kernel of a `(k−1)×k` full-rank matrix, by
/// signed cofactors.
fn null_vector(c: &DMatrix<f64>) -> Vec<f64> {
    let k = c.ncols();
    let mut v: Vec<f64> = (0..k)
        .map(|col| {
            let minor = c.clone().remove_column(col);
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            sign * minor.determinant()
        })
        .collect();
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= len);
    v
}

impl ModelDescriptor for DiscreteModel {
    type DataSet = ProbabilityVector;

    fn energy_domain(&self) -> &Domain {
        &self.domain
    }

    /// `ln Z(θ̂) + θ̂·U` at `θ̂ = maxent_fit(U)`, the BGS entropy of the
    /// maximum-entropy distribution.
    fn entropy_u(&self, u: &[f64]) -> f64 {
        match maxent_fit(&self.family, u, fit_tol(&self.family)) {
            Ok(fit) => {
                log_partition(&self.family, &fit.theta).unwrap_or(f64::NAN)
                    + fit.theta.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()
            }
            Err(_) => f64::NAN,
        }
    }

    fn closed_massieu(&self, theta: &[f64]) -> Option<f64> {
        log_partition(&self.family, theta).ok()
    }

    fn closed_theta_to_u(&self, theta: &[f64]) -> Option<Vec<f64>> {
        boltzmann_gibbs(&self.family, theta)
            .ok()
            .map(|p| self.family.moments(p.as_slice()))
    }

    fn closed_u_to_theta(&self, u: &[f64]) -> Option<Vec<f64>> {
        maxent_fit(&self.family, u, fit_tol(&self.family))
            .ok()
            .map(|fit| fit.theta.0)
    }

    fn answers(&self, x: &ProbabilityVector) -> Option<Result<Answers>> {
        Some(
            check_len(self.family.alphabet_size(), x.len()).and_then(|_| {
                Ok(Answers {
                    questions: self.family.moments(x.as_slice()),
                    entropy: bgs_entropy(&self.family, x)?,
                })
            }),
        )
    }

    fn fiber(&self, u: &[f64], count: usize, seed: u64) -> Option<Result<Vec<ProbabilityVector>>> {
        Some(self.fiber_points(u, count, seed))
    }
}
