//! Harmonic-oscillator wave functions in a truncated number basis, with the
//! phase-space model `U = (⟨Q⟩, ⟨P⟩)` and the entropy
//! `S(ψ) = ½|⟨ψ|a⟩|² − ⟨ψ|a†a⟩`.
//!
//! Writing `z = U₁/(r√2) + i·rU₂/(ħ√2)`, the model entropy is the value the
//! entropy takes on the coherent state `ψ_z`, i.e. `S(U) = −½|z|²`, so
//! `Φ(θ) = r²θ₁² + ħ²θ₂²/r²` and the metric is `diag(2r², 2ħ²/r²)`.

use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Answers, ModelDescriptor};
use crate::numerics::Domain;

pub const DEFAULT_NMAX: usize = 64;
pub const MIN_NMAX: usize = 16;
pub const DEFAULT_BOUND: f64 = 10.0;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseConstants {
    pub r: f64,
    pub hbar: f64,
}

impl PhaseConstants {
    pub fn new(r: f64, hbar: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite() && hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("r = {r}, hbar = {hbar} must be positive")));
        }
        Ok(Self { r, hbar })
    }

    /// Phase-space point of the complex amplitude `z`.
    pub fn u_of_z(&self, z: Complex64) -> PhasePoint {
        let s = std::f64::consts::SQRT_2;
        [self.r * s * z.re, self.hbar / self.r * s * z.im]
    }

    pub fn z_of_u(&self, u: &PhasePoint) -> Complex64 {
        let s = std::f64::consts::SQRT_2;
        Complex64::new(u[0] / (self.r * s), self.r * u[1] / (self.hbar * s))
    }
}

impl Default for PhaseConstants {
    fn default() -> Self {
        Self { r: 1.0, hbar: 1.0 }
    }
}

/// `(⟨Q⟩, ⟨P⟩)`.
pub type PhasePoint = [f64; 2];

/// Normalized amplitudes on `|0⟩ … |nmax⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidState("need at least two basis states".into()));
        }
        let norm: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Self::new(amplitudes)
    }

    /// Number state `|n⟩`.
    pub fn number_state(n: usize, nmax: usize) -> Result<Self> {
        if n > nmax {
            return Err(Error::InvalidParameter(format!("level {n} above nmax {nmax}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); nmax + 1];
        amps[n] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn nmax(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn with_phase(&self, alpha: f64) -> Self {
        let f = Complex64::from_polar(1.0, alpha);
        Self {
            amplitudes: self.amplitudes.iter().map(|c| c * f).collect(),
        }
    }

    /// `⟨ψ|a⟩ = Σ √n · conj(c_{n−1}) c_n`.
    pub fn mean_annihilation(&self) -> Complex64 {
        mean_a(&self.amplitudes)
    }

    /// `⟨ψ|a†a⟩`.
    pub fn mean_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    fn column(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amplitudes)
    }
}

fn mean_a(c: &[Complex64]) -> Complex64 {
    (1..c.len())
        .map(|n| c[n - 1].conj() * c[n] * (n as f64).sqrt())
        .sum()
}

#[derive(Serialize, Deserialize)]
struct FockWire {
    nmax: usize,
    amplitudes: Vec<f64>,
}

impl Serialize for FockVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FockWire {
            nmax: self.nmax(),
            amplitudes: self.amplitudes.iter().flat_map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = FockWire::deserialize(d)?;
        if wire.amplitudes.len() != 2 * (wire.nmax + 1) {
            return Err(D::Error::custom(format!(
                "expected {} interleaved values for nmax {}, got {}",
                2 * (wire.nmax + 1),
                wire.nmax,
                wire.amplitudes.len()
            )));
        }
        let amps = wire
            .amplitudes
            .chunks(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        FockVector::new(amps).map_err(D::Error::custom)
    }
}

/// `a` with `a|n⟩ = √n |n−1⟩`.
pub fn annihilation_matrix(nmax: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(nmax + 1, nmax + 1);
    for n in 1..=nmax {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `Q = r(a + a†)/√2`.
pub fn position_matrix(nmax: usize, k: &PhaseConstants) -> DMatrix<Complex64> {
    let a = annihilation_matrix(nmax);
    (&a + a.adjoint()) * Complex64::new(k.r / std::f64::consts::SQRT_2, 0.0)
}

/// `P = iħ(a† − a)/(r√2)`.
pub fn momentum_matrix(nmax: usize, k: &PhaseConstants) -> DMatrix<Complex64> {
    let a = annihilation_matrix(nmax);
    (a.adjoint() - &a) * Complex64::new(0.0, k.hbar / (k.r * std::f64::consts::SQRT_2))
}

/// `ψ_z ∝ Σ zⁿ/√n! |n⟩`, renormalized after truncation.
pub fn coherent_state(z: Complex64, nmax: usize) -> Result<FockVector> {
    let limit = nmax as f64 / 4.0;
    if !(z.norm_sqr() <= limit) {
        return Err(Error::Truncation {
            norm_sqr: z.norm_sqr(),
            limit,
        });
    }
    let mut amps = Vec::with_capacity(nmax + 1);
    let mut c = Complex64::new(1.0, 0.0);
    amps.push(c);
    for n in 1..=nmax {
        c = c * z / (n as f64).sqrt();
        amps.push(c);
    }
    FockVector::normalized(amps)
}

/// `(ψ, Mψ)`.
pub fn expectation_quadratic(psi: &FockVector, m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = psi.amplitudes.len();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Shape {
            expected: n,
            found: m.nrows().max(m.ncols()),
        });
    }
    let v = psi.column();
    Ok(v.dotc(&(m * &v)))
}

pub fn mu_map(psi: &FockVector, k: &PhaseConstants) -> PhasePoint {
    k.u_of_z(psi.mean_annihilation())
}

/// `½|⟨ψ|a⟩|² − ⟨ψ|a†a⟩`.
pub fn entropy_coherent(psi: &FockVector) -> f64 {
    0.5 * psi.mean_annihilation().norm_sqr() - psi.mean_number()
}

/// `S(U) = −U₁²/(4r²) − r²U₂²/(4ħ²)`.
pub fn model_entropy_u(u: &PhasePoint, k: &PhaseConstants) -> f64 {
    -0.5 * k.z_of_u(u).norm_sqr()
}

/// `Φ(θ) = r²θ₁² + ħ²θ₂²/r²`.
pub fn massieu_coherent(theta: &[f64; 2], k: &PhaseConstants) -> f64 {
    k.r * k.r * theta[0] * theta[0] + k.hbar * k.hbar * theta[1] * theta[1] / (k.r * k.r)
}

pub fn theta_to_phase(theta: &[f64; 2], k: &PhaseConstants) -> PhasePoint {
    [-2.0 * k.r * k.r * theta[0], -2.0 * k.hbar * k.hbar * theta[1] / (k.r * k.r)]
}

pub fn phase_to_theta(u: &PhasePoint, k: &PhaseConstants) -> [f64; 2] {
    [-u[0] / (2.0 * k.r * k.r), -k.r * k.r * u[1] / (2.0 * k.hbar * k.hbar)]
}

/// `½|⟨φ|a⟩ − z|² + ⟨φ|a†a⟩ − |⟨φ|a⟩|²`.
pub fn divergence_coherent(phi: &FockVector, u: &PhasePoint, k: &PhaseConstants) -> f64 {
    let z = k.z_of_u(u);
    let w = phi.mean_annihilation();
    0.5 * (w - z).norm_sqr() + phi.mean_number() - w.norm_sqr()
}

/// `L(m_U) = −½|z|² + ½z a† + ½z̄ a`.
pub fn log_map_coherent(u: &PhasePoint, k: &PhaseConstants, nmax: usize) -> DMatrix<Complex64> {
    let z = k.z_of_u(u);
    let a = annihilation_matrix(nmax);
    let mut l = a.adjoint() * (0.5 * z) + &a * (0.5 * z.conj());
    for i in 0..=nmax {
        l[(i, i)] -= Complex64::new(0.5 * z.norm_sqr(), 0.0);
    }
    l
}

/// Equality of states modulo a global phase, aligned on the largest
/// amplitude of `a`.
pub fn equal_up_to_phase(a: &FockVector, b: &FockVector, tol: f64) -> bool {
    if a.amplitudes.len() != b.amplitudes.len() {
        return false;
    }
    let (idx, _) = a
        .amplitudes
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, c)| if c.norm() > best.1 { (i, c.norm()) } else { best });
    let (pa, pb) = (a.amplitudes[idx], b.amplitudes[idx]);
    if pb.norm() == 0.0 {
        return false;
    }
    let rot = (pa / pb) / (pa / pb).norm();
    a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .all(|(x, y)| (x - y * rot).norm() <= tol)
}

#[derive(Debug, Clone)]
pub struct CoherentModel {
    constants: PhaseConstants,
    nmax: usize,
    domain: Domain,
}

impl CoherentModel {
    pub fn new(constants: PhaseConstants, nmax: usize, bound: f64) -> Result<Self> {
        PhaseConstants::new(constants.r, constants.hbar)?;
        if nmax < MIN_NMAX {
            return Err(Error::InvalidParameter(format!("nmax {nmax} below {MIN_NMAX}")));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidParameter(format!("bound {bound} must be positive")));
        }
        let domain = Domain::open_box(vec![(-bound, bound); 2])?.with_unbounded(true);
        Ok(Self {
            constants,
            nmax,
            domain,
        })
    }

    pub fn constants(&self) -> &PhaseConstants {
        &self.constants
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    /// `ψ_z` followed by non-coherent states sharing `⟨a⟩ = z`.
    pub fn fiber_states(&self, u: &PhasePoint, count: usize, seed: u64) -> Result<Vec<FockVector>> {
        let z = self.constants.z_of_u(u);
        let center = coherent_state(z, self.nmax)?;
        let mut out = vec![center.clone()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Perturb a window around the peak of the Poisson weights, then
        // restore the mean through the same window.
        let k = (z.norm_sqr().floor() as usize).min(self.nmax.saturating_sub(2));
        let lo = k.saturating_sub(6);
        let hi = (k + 8).min(self.nmax);
        let peak = center.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > 20 * count + 20 {
                return Err(Error::NonConvergence {
                    iterations: attempts,
                    gradient_norm: f64::NAN,
                    best_value: f64::NAN,
                    best_point: u.to_vec(),
                });
            }
            let scale = rng.gen_range(0.0..0.6) * peak;
            let mut c = center.amplitudes.clone();
            for amp in c.iter_mut().take(hi + 1).skip(lo) {
                *amp += Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
            }
            if let Some(c) = restore_mean(c, z, lo..=hi) {
                if let Ok(state) = FockVector::normalized(c) {
                    if (state.mean_annihilation() - z).norm() <= 1e-10 {
                        out.push(state);
                    }
                }
            }
        }
        out.truncate(count.max(1));
        Ok(out)
    }
}

/// Gauss–Newton on the amplitudes of `levels` for `Σ√n c̄_{n−1}c_n = z‖c‖²`,
/// taking minimum-norm steps.
fn restore_mean(mut c: Vec<Complex64>, z: Complex64, levels: RangeInclusive<usize>) -> Option<Vec<Complex64>> {
    let i = Complex64::i();
    let zero = Complex64::default();
    let width = levels.clone().count();
    for _ in 0..60 {
        let norm: f64 = c.iter().map(Complex64::norm_sqr).sum();
        let f = mean_a(&c) - z * norm;
        if f.norm() <= 1e-14 * (1.0 + z.norm()) * norm.max(1.0) {
            return Some(c);
        }
        let mut j = DMatrix::<f64>::zeros(2, 2 * width);
        for (slot, n) in levels.clone().enumerate() {
            let below = if n == 0 { zero } else { c[n - 1].conj() * (n as f64).sqrt() };
            let above = c.get(n + 1).copied().unwrap_or(zero) * ((n + 1) as f64).sqrt();
            let d_re = below + above - 2.0 * z * c[n].re;
            let d_im = i * below - i * above - 2.0 * z * c[n].im;
            j[(0, 2 * slot)] = d_re.re;
            j[(1, 2 * slot)] = d_re.im;
            j[(0, 2 * slot + 1)] = d_im.re;
            j[(1, 2 * slot + 1)] = d_im.im;
        }
        let jjt = Matrix2::new(
            j.row(0).dot(&j.row(0)),
            j.row(0).dot(&j.row(1)),
            j.row(1).dot(&j.row(0)),
            j.row(1).dot(&j.row(1)),
        );
        let y = jjt.try_inverse()? * Vector2::new(f.re, f.im);
        for (slot, n) in levels.clone().enumerate() {
            let step_re = -(j[(0, 2 * slot)] * y[0] + j[(1, 2 * slot)] * y[1]);
            let step_im = -(j[(0, 2 * slot + 1)] * y[0] + j[(1, 2 * slot + 1)] * y[1]);
            c[n] += Complex64::new(step_re, step_im);
        }
    }
    None
}

fn pair(v: &[f64]) -> Option<[f64; 2]> {
    v.try_into().ok()
}

impl ModelDescriptor for CoherentModel {
    type DataSet = FockVector;

    fn energy_domain(&self) -> &Domain {
        &self.domain
    }

    fn entropy_u(&self, u: &[f64]) -> f64 {
        pair(u).map_or(f64::NAN, |u| model_entropy_u(&u, &self.constants))
    }

    fn closed_massieu(&self, theta: &[f64]) -> Option<f64> {
        pair(theta).map(|t| massieu_coherent(&t, &self.constants))
    }

    fn closed_theta_to_u(&self, theta: &[f64]) -> Option<Vec<f64>> {
        pair(theta).map(|t| theta_to_phase(&t, &self.constants).to_vec())
    }

    fn closed_u_to_theta(&self, u: &[f64]) -> Option<Vec<f64>> {
        pair(u).map(|u| phase_to_theta(&u, &self.constants).to_vec())
    }

    fn answers(&self, x: &FockVector) -> Option<Result<Answers>> {
        Some(Ok(Answers {
            questions: mu_map(x, &self.constants).to_vec(),
            entropy: entropy_coherent(x),
        }))
    }

    fn fiber(&self, u: &[f64], count: usize, seed: u64) -> Option<Result<Vec<FockVector>>> {
        Some(match pair(u) {
            Some(u) => self.fiber_states(&u, count, seed),
            None => Err(Error::Shape { expected: 2, found: u.len() }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model;
    use approx::assert_abs_diff_eq;

    fn unit() -> PhaseConstants {
        PhaseConstants::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn annihilation_examples() {
        let a = annihilation_matrix(1);
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert_eq!(a.iter().filter(|v| v.norm() > 0.0).count(), 1);
        let a = annihilation_matrix(6);
        let number = a.adjoint() * &a;
        for n in 0..=6 {
            assert_abs_diff_eq!(number[(n, n)].re, n as f64, epsilon = 1e-14);
        }
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        for i in 0..=6 {
            for j in 0..=6 {
                let expected = match (i, j) {
                    (6, 6) => -6.0,
                    _ if i == j => 1.0,
                    _ => 0.0,
                };
                assert_abs_diff_eq!(comm[(i, j)].re, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(comm[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn coherent_state_examples() {
        let vac = coherent_state(c(0.0, 0.0), 64).unwrap();
        assert_eq!(vac, FockVector::number_state(0, 64).unwrap());
        let psi = coherent_state(c(1.0, 0.0), 64).unwrap();
        assert!((psi.mean_annihilation() - c(1.0, 0.0)).norm() < 1e-12);
        let psi = coherent_state(c(1.0, 1.0), 64).unwrap();
        assert_abs_diff_eq!(psi.mean_number(), 2.0, epsilon = 1e-10);
        assert!(matches!(coherent_state(c(5.0, 0.0), 64), Err(Error::Truncation { .. })));
    }

    #[test]
    fn expectation_examples() {
        let psi = coherent_state(c(0.3, -0.8), 32).unwrap();
        let one = expectation_quadratic(&psi, &DMatrix::identity(33, 33)).unwrap();
        assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-14);
        let w = expectation_quadratic(&psi, &annihilation_matrix(32)).unwrap();
        assert!((w - c(0.3, -0.8)).norm() < 1e-12);
        assert!((w - psi.mean_annihilation()).norm() < 1e-14);
        let three = FockVector::number_state(3, 32).unwrap();
        let a = annihilation_matrix(32);
        let n = expectation_quadratic(&three, &(a.adjoint() * &a)).unwrap();
        assert_abs_diff_eq!(n.re, 3.0, epsilon = 1e-14);
        assert!(matches!(
            expectation_quadratic(&three, &DMatrix::identity(4, 4)),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn mu_map_examples() {
        let k = unit();
        assert_eq!(mu_map(&FockVector::number_state(0, 16).unwrap(), &k), [0.0, 0.0]);
        let u = mu_map(&coherent_state(c(1.0, 0.0), 64).unwrap(), &k);
        assert_abs_diff_eq!(u[0], std::f64::consts::SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(u[1], 0.0, epsilon = 1e-12);
        let u = mu_map(&coherent_state(c(0.0, 1.0), 64).unwrap(), &k);
        assert_abs_diff_eq!(u[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u[1], std::f64::consts::SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn mu_map_matches_position_and_momentum() {
        let k = PhaseConstants::new(1.7, 0.4).unwrap();
        let psi = FockVector::normalized((0..20).map(|n| c(1.0 / (n as f64 + 1.0), 0.3 * n as f64 - 1.0)).collect())
            .unwrap();
        let u = mu_map(&psi, &k);
        let q = expectation_quadratic(&psi, &position_matrix(19, &k)).unwrap();
        let p = expectation_quadratic(&psi, &momentum_matrix(19, &k)).unwrap();
        assert_abs_diff_eq!(u[0], q.re, epsilon = 1e-12);
        assert_abs_diff_eq!(u[1], p.re, epsilon = 1e-12);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_coherent(&FockVector::number_state(0, 16).unwrap()), 0.0);
        assert_abs_diff_eq!(entropy_coherent(&coherent_state(c(1.0, 0.0), 64).unwrap()), -0.5, epsilon = 1e-12);
        assert_eq!(entropy_coherent(&FockVector::number_state(1, 16).unwrap()), -1.0);
    }

    #[test]
    fn model_entropy_examples() {
        let k = unit();
        assert_eq!(model_entropy_u(&[0.0, 0.0], &k), 0.0);
        // Oracle: S(ψ_z) with z = 1, the coherent state answering U = (√2, 0).
        let u = [std::f64::consts::SQRT_2, 0.0];
        assert_abs_diff_eq!(model_entropy_u(&u, &k), -0.5, epsilon = 1e-15);
        for z in [c(0.4, -1.1), c(-1.3, 0.2)] {
            let psi = coherent_state(z, 64).unwrap();
            assert_abs_diff_eq!(model_entropy_u(&mu_map(&psi, &k), &k), entropy_coherent(&psi), epsilon = 1e-10);
        }
    }

    #[test]
    fn massieu_examples() {
        let k = unit();
        assert_eq!(massieu_coherent(&[0.0, 0.0], &k), 0.0);
        assert_abs_diff_eq!(massieu_coherent(&[1.0, 1.0], &k), 2.0);
        let k2 = PhaseConstants::new(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(massieu_coherent(&[1.0, 0.0], &k2), 4.0);
        let m = CoherentModel::new(k, 64, DEFAULT_BOUND).unwrap();
        let numeric = model::massieu(&model::LegendreOnly(&m), &[1.0, 1.0]).unwrap();
        assert!((numeric - 2.0).abs() < 1e-6);
    }

    #[test]
    fn dual_map_examples() {
        let k = unit();
        assert_eq!(theta_to_phase(&[1.0, 1.0], &k), [-2.0, -2.0]);
        assert_eq!(phase_to_theta(&[2.0, 0.0], &k), [-1.0, -0.0]);
        let m = CoherentModel::new(k, 64, DEFAULT_BOUND).unwrap();
        assert_abs_diff_eq!(model::bregman_divergence(&m, &[0.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn divergence_examples() {
        let k = unit();
        let psi = coherent_state(c(0.6, -0.9), 64).unwrap();
        let u = mu_map(&psi, &k);
        assert!(divergence_coherent(&psi, &u, &k).abs() < 1e-10);
        assert!(divergence_coherent(&psi.with_phase(1.3), &u, &k).abs() < 1e-10);
        let one = FockVector::number_state(1, 16).unwrap();
        assert_abs_diff_eq!(divergence_coherent(&one, &[0.0, 0.0], &k), 1.0);
    }

    #[test]
    fn divergence_agrees_with_exponential_family_form() {
        let k = PhaseConstants::new(1.3, 0.7).unwrap();
        let m = CoherentModel::new(k, 32, DEFAULT_BOUND).unwrap();
        let phi = FockVector::normalized((0..33).map(|n| c((-0.5 * n as f64).exp(), 0.1 * n as f64)).collect())
            .unwrap();
        let u = [0.4, -0.9];
        let theta = phase_to_theta(&u, &k);
        let form = model::divergence_from_data(&m, &phi, &theta).unwrap().value;
        assert_abs_diff_eq!(form, divergence_coherent(&phi, &u, &k), epsilon = 1e-12);
    }

    #[test]
    fn log_map_examples() {
        let k = unit();
        let l = log_map_coherent(&[0.0, 0.0], &k, 16);
        assert!(l.iter().all(|v| v.norm() == 0.0));
        let psi = coherent_state(c(1.0, 0.0), 64).unwrap();
        let l = log_map_coherent(&mu_map(&psi, &k), &k, 64);
        assert_abs_diff_eq!(expectation_quadratic(&psi, &l).unwrap().re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn log_map_is_affine_in_position_and_momentum() {
        let k = unit();
        let theta = [1.0, 1.0];
        let u = theta_to_phase(&theta, &k);
        let nmax = 24;
        let l = log_map_coherent(&u, &k, nmax);
        let (q, p) = (position_matrix(nmax, &k), momentum_matrix(nmax, &k));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let phi = FockVector::normalized(
                (0..=nmax).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            )
            .unwrap();
            let lhs = expectation_quadratic(&phi, &l).unwrap().re;
            let rhs = -massieu_coherent(&theta, &k)
                - theta[0] * expectation_quadratic(&phi, &q).unwrap().re
                - theta[1] * expectation_quadratic(&phi, &p).unwrap().re;
            assert!((lhs - rhs).abs() <= 1e-9);
        }
    }

    #[test]
    fn descriptor_examples() {
        let k = unit();
        let m = CoherentModel::new(k, 64, DEFAULT_BOUND).unwrap();
        assert!(model::canonical_check(&m, &[0.7, -0.3], 1e-9).unwrap().residual <= 1e-9);
        let g = model::metric_tensor(&m, &[0.2, 0.5]).unwrap();
        assert_abs_diff_eq!(g.matrix[(0, 0)], 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(g.matrix[(1, 1)], 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(g.matrix[(0, 1)], 0.0, epsilon = 1e-5);
        let theta = [0.3, -0.2];
        let zeta = [0.5, 0.4];
        let xi = model::orthogonal_partner(&m, &theta, &zeta, &[1.0, 0.0], 0.7).unwrap();
        assert!(model::pythagoras_models(&m, &theta, &zeta, &xi).unwrap().residual <= 1e-10);
        assert!(CoherentModel::new(k, 8, DEFAULT_BOUND).is_err());
    }

    #[test]
    fn fiber_members_share_the_mean_and_respect_the_bound() {
        let k = PhaseConstants::new(1.5, 0.8).unwrap();
        let m = CoherentModel::new(k, 64, DEFAULT_BOUND).unwrap();
        let u = [0.9, -0.6];
        let z = k.z_of_u(&u);
        let fiber = m.fiber_states(&u, 200, 5).unwrap();
        assert_eq!(fiber.len(), 200);
        let bound = model_entropy_u(&u, &k);
        assert!(equal_up_to_phase(&fiber[0], &coherent_state(z, 64).unwrap(), 1e-14));
        for phi in &fiber {
            assert!((phi.mean_annihilation() - z).norm() <= 1e-10);
            assert!(entropy_coherent(phi) <= bound + 1e-9);
        }
        assert!(fiber[1..].iter().all(|phi| entropy_coherent(phi) < bound - 1e-6));
    }

    #[test]
    fn phase_comparison() {
        let psi = coherent_state(c(0.5, 0.5), 32).unwrap();
        assert!(equal_up_to_phase(&psi, &psi.with_phase(2.1), 1e-14));
        assert!(!equal_up_to_phase(&psi, &coherent_state(c(0.5, 0.4), 32).unwrap(), 1e-6));
    }

    #[test]
    fn serialization_roundtrip() {
        let psi = coherent_state(c(0.5, -0.25), 16).unwrap();
        let text = serde_json::to_string(&psi).unwrap();
        assert!(text.starts_with("{\"nmax\":16,\"amplitudes\":["));
        let back: FockVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, psi);
        assert!(serde_json::from_str::<FockVector>("{\"nmax\":1,\"amplitudes\":[1,0]}").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn eigenvalue_equation(re in -1.4..1.4f64, im in -1.4..1.4f64) {
                let z = c(re, im);
                prop_assume!(z.norm() <= 2.0);
                let psi = coherent_state(z, 64).unwrap();
                let v = psi.column();
                let residual = (annihilation_matrix(64) * &v - &v * z).norm();
                prop_assert!(residual <= 1e-8);
            }

            #[test]
            fn phase_invariance(re in -1.0..1.0f64, im in -1.0..1.0f64, alpha in 0.0..6.3f64, u0 in -2.0..2.0f64, u1 in -2.0..2.0f64) {
                let k = PhaseConstants::new(1.2, 0.9).unwrap();
                let psi = coherent_state(c(re, im), 32).unwrap();
                let rot = psi.with_phase(alpha);
                prop_assert!((entropy_coherent(&psi) - entropy_coherent(&rot)).abs() <= 1e-12);
                let (a, b) = (mu_map(&psi, &k), mu_map(&rot, &k));
                prop_assert!((a[0] - b[0]).abs() <= 1e-12 && (a[1] - b[1]).abs() <= 1e-12);
                let d = divergence_coherent(&psi, &[u0, u1], &k);
                prop_assert!((d - divergence_coherent(&rot, &[u0, u1], &k)).abs() <= 1e-12);
            }

            #[test]
            fn divergence_is_nonnegative(
                amps in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 17),
                u0 in -3.0..3.0f64,
                u1 in -3.0..3.0f64,
            ) {
                let phi = FockVector::normalized(amps.into_iter().map(|(a, b)| c(a, b)).collect());
                prop_assume!(phi.is_ok());
                prop_assert!(divergence_coherent(&phi.unwrap(), &[u0, u1], &unit()) >= -1e-10);
            }

            #[test]
            fn closed_massieu_matches_legendre(t0 in -3.0..3.0f64, t1 in -3.0..3.0f64) {
                prop_assume!((t0 * t0 + t1 * t1).sqrt() <= 3.0);
                let k = unit();
                let m = CoherentModel::new(k, 16, DEFAULT_BOUND).unwrap();
                let numeric = model::massieu(&model::LegendreOnly(&m), &[t0, t1]).unwrap();
                prop_assert!((numeric - massieu_coherent(&[t0, t1], &k)).abs() <= 1e-6);
            }
        }
    }
}
