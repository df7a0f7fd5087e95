//! Two-level quantum system in Bloch coordinates, `ρ = ½(I + U·σ)`.

use crate::error::{Error, Result};
use crate::model::{Answers, ModelDescriptor};
use crate::numerics::{eig_h2, func_h2, Domain, Matrix2H};

/// Canonical-chart operations need `|U| ≤ 1 − CHART_MARGIN`.
pub const CHART_MARGIN: f64 = 1e-9;
const STATE_TOL: f64 = 1e-12;

/// Density matrix: unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(Matrix2H);

impl DensityMatrix2 {
    pub fn new(m: Matrix2H) -> Result<Self> {
        if (m.trace() - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {} differs from 1", m.trace())));
        }
        let lowest = eig_h2(&m).values[0];
        if lowest < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lowest}")));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix2H {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        eig_h2(&self.0).values
    }
}

pub type BlochVector = [f64; 3];

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn bloch_to_rho(u: &BlochVector) -> Result<DensityMatrix2> {
    let norm = norm3(u);
    if !(norm <= 1.0 + STATE_TOL) {
        return Err(Error::NonPhysical { norm });
    }
    Ok(DensityMatrix2(Matrix2H::from_pauli(0.5, [0.5 * u[0], 0.5 * u[1], 0.5 * u[2]])))
}

/// `U_j = Tr ρσ_j`.
pub fn rho_to_bloch(rho: &DensityMatrix2) -> BlochVector {
    let (_, v) = rho.0.to_pauli();
    [2.0 * v[0], 2.0 * v[1], 2.0 * v[2]]
}

fn eta(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// `−Tr ρ ln ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix2) -> f64 {
    rho.eigenvalues().into_iter().map(eta).sum()
}

/// Entropy as a function of `|U|`.
pub fn bloch_entropy(norm: f64) -> f64 {
    let r = norm.min(1.0);
    let tail = if r < 1.0 { 0.5 * (1.0 - r) * (-r).ln_1p() } else { 0.0 };
    std::f64::consts::LN_2 - 0.5 * (1.0 + r) * r.ln_1p() - tail
}

/// `ln(2 cosh|θ|)`, overflow-free.
pub fn qubit_massieu(theta: &[f64; 3]) -> f64 {
    let t = norm3(theta);
    t + (-2.0 * t).exp().ln_1p()
}

/// `U = −θ/|θ| · tanh|θ|`, zero at the origin.
pub fn theta_to_bloch(theta: &[f64; 3]) -> BlochVector {
    let t = norm3(theta);
    if t == 0.0 {
        return [0.0; 3];
    }
    let s = -t.tanh() / t;
    [s * theta[0], s * theta[1], s * theta[2]]
}

/// `θ = ½ U/|U| · ln((1−|U|)/(1+|U|))`, zero at the origin.
pub fn bloch_to_theta(u: &BlochVector) -> Result<[f64; 3]> {
    let r = norm3(u);
    if !(r <= 1.0 - CHART_MARGIN) {
        return Err(Error::ChartBoundary { norm: r });
    }
    if r == 0.0 {
        return Ok([0.0; 3]);
    }
    let s = -r.atanh() / r;
    Ok([s * u[0], s * u[1], s * u[2]])
}

/// `exp(−θ·σ) / (2 cosh|θ|)` by spectral calculus.
pub fn gibbs_state(theta: &[f64; 3]) -> DensityMatrix2 {
    let t = norm3(theta);
    let h = Matrix2H::from_pauli(0.0, [-theta[0], -theta[1], -theta[2]]);
    // Eigenvalues of −θ·σ are ±|θ|; shifting by |θ| keeps exp bounded.
    let scale = 1.0 / (1.0 + (-2.0 * t).exp());
    let m = func_h2(&h, |lambda| (lambda - t).exp() * scale).expect("exp is finite on a bounded spectrum");
    DensityMatrix2(m)
}

/// `Tr ρ(ln ρ − ln σ)`; `σ` must be positive definite.
pub fn quantum_relative_entropy(rho: &DensityMatrix2, sigma: &DensityMatrix2) -> Result<f64> {
    let log_sigma = func_h2(&sigma.0, f64::ln)?;
    Ok(-von_neumann_entropy(rho) - rho.0.trace_product(&log_sigma))
}

/// The qubit as a data set model whose data sets are density matrices.
#[derive(Debug, Clone)]
pub struct QubitModel {
    margin: f64,
    domain: Domain,
}

impl QubitModel {
    pub const DEFAULT_MARGIN: f64 = 1e-12;

    /// Energy domain `|U| < 1 − margin`. A negative margin admits
    /// non-physical points and exists only to exercise the checks.
    pub fn new(margin: f64) -> Result<Self> {
        if !margin.is_finite() || margin >= 1.0 {
            return Err(Error::InvalidParameter(format!("domain margin {margin} out of range")));
        }
        let bound = (1.0 - margin).max(1.0);
        let domain = Domain::new(
            vec![(-bound, bound); 3],
            move |u: &[f64]| u.len() == 3 && (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt() < 1.0 - margin,
            vec![0.0; 3],
        )?;
        Ok(Self { margin, domain })
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }
}

impl Default for QubitModel {
    fn default() -> Self {
        Self::new(Self::DEFAULT_MARGIN).expect("default margin is valid")
    }
}

fn triple(v: &[f64]) -> Option<[f64; 3]> {
    v.try_into().ok()
}

impl ModelDescriptor for QubitModel {
    type DataSet = DensityMatrix2;

    fn energy_domain(&self) -> &Domain {
        &self.domain
    }

    fn entropy_u(&self, u: &[f64]) -> f64 {
        let r = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1.0 {
            return f64::NAN;
        }
        bloch_entropy(r)
    }

    fn closed_massieu(&self, theta: &[f64]) -> Option<f64> {
        triple(theta).map(|t| qubit_massieu(&t))
    }

    fn closed_theta_to_u(&self, theta: &[f64]) -> Option<Vec<f64>> {
        triple(theta).map(|t| theta_to_bloch(&t).to_vec())
    }

    fn closed_u_to_theta(&self, u: &[f64]) -> Option<Vec<f64>> {
        triple(u).and_then(|u| bloch_to_theta(&u).ok()).map(|t| t.to_vec())
    }

    fn answers(&self, x: &DensityMatrix2) -> Option<Result<Answers>> {
        Some(Ok(Answers {
            questions: rho_to_bloch(x).to_vec(),
            entropy: von_neumann_entropy(x),
        }))
    }

    fn fiber(&self, u: &[f64], _count: usize, _seed: u64) -> Option<Result<Vec<DensityMatrix2>>> {
        Some(match triple(u) {
            Some(u) => bloch_to_rho(&u).map(|rho| vec![rho]),
            None => Err(Error::Shape { expected: 3, found: u.len() }),
        })
    }
}
