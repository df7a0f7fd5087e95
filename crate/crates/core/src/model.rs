//! Model-agnostic engine: Massieu function, canonical dual coordinates,
//! metric tensor, divergences and the Pythagorean relations.
//!
//! A model is anything implementing [`ModelDescriptor`]. The only required
//! pieces are the energy domain `D` and the model entropy `S(U)`; the
//! Massieu function `Φ(θ) = sup_{U∈D} { S(U) − θ·U }` is then obtained by
//! numerical Legendre–Fenchel transform. Closed forms, when a model has
//! them, take precedence.
//!
//! Two sign conventions exist for the exponential-family normalizer. The
//! logarithmic map is `L m_θ = α(θ) − Σ θ_j q_j` with `α(θ) = −Φ(θ)`
//! ([`log_map_offset`]), while the classical density
//! `p_θ = c·exp(−α − θ·H)` uses `α(θ) = +Φ(θ)` ([`normalizer`]).

use std::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};
use crate::numerics::{self, Domain, OptimizationResult};

/// Gradient-norm tolerance of the numerical Legendre transform.
pub const LEGENDRE_TOL: f64 = 1e-9;
/// Canonical-identity tolerance when closed forms are available.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Canonical-identity tolerance on the numerical Legendre path.
pub const NUMERIC_TOL: f64 = 1e-6;
/// Precondition tolerance relating data-set answers to a model point.
pub const ANSWER_TOL: f64 = 1e-9;
/// Metric eigenvalues at or below this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

macro_rules! coordinate_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(pub Vec<f64>);

        impl Deref for $name {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }

        impl From<&[f64]> for $name {
            fn from(v: &[f64]) -> Self {
                Self(v.to_vec())
            }
        }
    };
}

coordinate_newtype!(
    /// Canonical (natural) parameters θ.
    ParamPoint
);
coordinate_newtype!(
    /// Energy coordinates U, dual to θ.
    EnergyPoint
);

/// Answers of a data set to the model questions, with its entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct Answers {
    pub questions: Vec<f64>,
    pub entropy: f64,
}

/// Capability record of a data set model.
pub trait ModelDescriptor {
    type DataSet;

    /// The energy domain `D`.
    fn energy_domain(&self) -> &Domain;

    /// Model entropy `S(U)`; callers only evaluate it on domain members.
    fn entropy_u(&self, u: &[f64]) -> f64;

    fn dim(&self) -> usize {
        self.energy_domain().dimension()
    }

    fn closed_massieu(&self, _theta: &[f64]) -> Option<f64> {
        None
    }

    fn closed_theta_to_u(&self, _theta: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn closed_u_to_theta(&self, _u: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Answers `⟨x|q_j⟩` and entropy `S(x)` of a data set.
    fn answers(&self, _x: &Self::DataSet) -> Option<Result<Answers>> {
        None
    }

    /// Data sets `y` with `μ(y) = m_U`.
    fn fiber(&self, _u: &[f64], _count: usize, _seed: u64) -> Option<Result<Vec<Self::DataSet>>> {
        None
    }
}

/// Hides the closed forms of a model so that every quantity goes through
/// the numerical Legendre transform.
#[derive(Debug, Clone, Copy)]
pub struct LegendreOnly<'a, M>(pub &'a M);

impl<M: ModelDescriptor> ModelDescriptor for LegendreOnly<'_, M> {
    type DataSet = M::DataSet;

    fn energy_domain(&self) -> &Domain {
        self.0.energy_domain()
    }

    fn entropy_u(&self, u: &[f64]) -> f64 {
        self.0.entropy_u(u)
    }

    fn answers(&self, x: &Self::DataSet) -> Option<Result<Answers>> {
        self.0.answers(x)
    }

    fn fiber(&self, u: &[f64], count: usize, seed: u64) -> Option<Result<Vec<Self::DataSet>>> {
        self.0.fiber(u, count, seed)
    }
}

/// Φ(θ), U(θ) and S(U) together with the residual of
/// `Φ(θ) − S(U) + Σθ_jU_j = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    pub theta: ParamPoint,
    pub u: EnergyPoint,
    pub massieu: f64,
    pub entropy: f64,
    pub residual: f64,
    /// max-abs error of `u_to_theta(theta_to_u(θ))` against θ.
    pub roundtrip_error: f64,
}

/// `D(x‖m_θ) = Φ(θ) − S(x) + Σθ_j⟨x|q_j⟩`, with its three terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceReport {
    pub value: f64,
    pub massieu_at: f64,
    pub entropy_of_x: f64,
    pub linear_term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    pub matrix: DMatrix<f64>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PythagorasReport {
    /// `Σ(ζ_j − ξ_j)(U_j − V_j)`.
    pub orthogonality: f64,
    pub residual: f64,
    pub d_theta_zeta: f64,
    pub d_zeta_xi: f64,
    pub d_theta_xi: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check_theta<M: ModelDescriptor + ?Sized>(model: &M, theta: &[f64]) -> Result<()> {
    check_len(model.dim(), theta.len())?;
    if theta.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("theta must be finite: {theta:?}")))
    }
}

/// Numerical Legendre transform `sup_{U∈D} { S(U) − θ·U }`.
pub fn legendre<M: ModelDescriptor + ?Sized>(model: &M, theta: &[f64]) -> Result<OptimizationResult> {
    check_theta(model, theta)?;
    let domain = model.energy_domain();
    let objective = |u: &[f64]| model.entropy_u(u) - dot(theta, u);
    let result = numerics::maximize_concave(&objective, domain, None, LEGENDRE_TOL)?;
    if result.converged {
        return Ok(result);
    }
    let width = domain
        .bounding_box()
        .iter()
        .map(|(lo, hi)| hi - lo)
        .fold(f64::INFINITY, f64::min);
    if domain.is_unbounded() && domain.box_distance(&result.argmax) <= 1e-6 * width {
        return Err(Error::UnboundedMassieu {
            theta: theta.to_vec(),
        });
    }
    Err(Error::NonConvergence {
        iterations: result.iterations,
        gradient_norm: result.gradient_norm,
        best_value: result.value,
        best_point: result.argmax,
    })
}

/// Massieu function `Φ(θ)`; `+∞` when the supremum is unbounded.
pub fn massieu<M: ModelDescriptor + ?Sized>(model: &M, theta: &[f64]) -> Result<f64> {
    check_theta(model, theta)?;
    if let Some(v) = model.closed_massieu(theta) {
        return Ok(v);
    }
    match legendre(model, theta) {
        Ok(res) => Ok(res.value),
        Err(Error::UnboundedMassieu { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// `α(θ)` in `L m_θ = α(θ) − Σθ_j q_j`, i.e. `−Φ(θ)`.
pub fn log_map_offset<M: ModelDescriptor + ?Sized>(model: &M, theta: &[f64]) -> Result<f64> {
    massieu(model, theta).map(|v| -v)
}

/// `α(θ)` in `p_θ = c·exp(−α(θ) − θ·H)`, i.e. `+Φ(θ)`.
pub fn normalizer<M: ModelDescriptor + ?Sized>(model: &M, theta: &[f64]) -> Result<f64> {
    massieu(model, theta)
}

/// Energy coordinates `U = −∇Φ(θ)`.
pub fn theta_to_u<M: ModelDescriptor + ?Sized>(model: &M, theta: &[f64]) -> Result<EnergyPoint> {
    check_theta(model, theta)?;
    if let Some(u) = model.closed_theta_to_u(theta) {
        return Ok(EnergyPoint(u));
    }
    legendre(model, theta).map(|res| EnergyPoint(res.argmax))
}

/// Canonical parameters `θ = ∇S(U)`.
pub fn u_to_theta<M: ModelDescriptor + ?Sized>(model: &M, u: &[f64]) -> Result<ParamPoint> {
    check_len(model.dim(), u.len())?;
    let domain = model.energy_domain();
    if !domain.contains(u) {
        return Err(Error::OutsideDomain { point: u.to_vec() });
    }
    if let Some(theta) = model.closed_u_to_theta(u) {
        return Ok(ParamPoint(theta));
    }
    let entropy = |p: &[f64]| {
        if domain.contains(p) {
            model.entropy_u(p)
        } else {
            f64::NAN
        }
    };
    let mut step = None;
    loop {
        match numerics::grad_fd(&entropy, u, step) {
            Ok(g) => return Ok(ParamPoint(g)),
            Err(e @ Error::EvaluationDomain { .. }) => {
                let next = step.unwrap_or(f64::EPSILON.cbrt()) * 0.1;
                if next < 1e-12 {
                    return Err(e);
                }
                step = Some(next);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Hessian of Φ at θ.
pub fn metric_tensor<M: ModelDescriptor + ?Sized>(model: &M, theta: &[f64]) -> Result<MetricTensor> {
    check_theta(model, theta)?;
    let phi = |t: &[f64]| massieu(model, t).unwrap_or(f64::NAN);
    let matrix = numerics::hess_fd(&phi, theta, None)?;
    let min_eigenvalue = numerics::min_eigenvalue(&matrix);
    if min_eigenvalue <= DEGENERACY_TOL {
        return Err(Error::DegenerateMetric { min_eigenvalue });
    }
    Ok(MetricTensor {
        matrix,
        min_eigenvalue,
    })
}

/// Tolerance appropriate for the canonical identity of this model.
pub fn canonical_tolerance<M: ModelDescriptor + ?Sized>(model: &M) -> f64 {
    let probe = model.energy_domain().interior_point().to_vec();
    if model.closed_massieu(&probe).is_some() {
        CLOSED_FORM_TOL
    } else {
        NUMERIC_TOL
    }
}

/// Evaluates the canonical identity and the θ ↔ U round trip at θ.
pub fn canonical_check<M: ModelDescriptor + ?Sized>(model: &M, theta: &[f64], tol: f64) -> Result<DualPair> {
    let massieu = massieu(model, theta)?;
    let u = theta_to_u(model, theta)?;
    let entropy = model.entropy_u(&u);
    let residual = (massieu - entropy + dot(theta, &u)).abs();
    let back = u_to_theta(model, &u)?;
    let pair = DualPair {
        theta: ParamPoint(theta.to_vec()),
        roundtrip_error: max_abs_diff(&back, theta),
        u,
        massieu,
        entropy,
        residual,
    };
    if residual.is_nan() || residual > tol {
        return Err(Error::CanonicalityViolation(Box::new(pair)));
    }
    Ok(pair)
}

/// `D(m_θ‖m_ζ) = Φ(ζ) − Φ(θ) + Σ(ζ_j − θ_j)U_j(θ)`.
pub fn bregman_divergence<M: ModelDescriptor + ?Sized>(model: &M, theta: &[f64], zeta: &[f64]) -> Result<f64> {
    check_theta(model, zeta)?;
    let u = theta_to_u(model, theta)?;
    let shift: Vec<f64> = zeta.iter().zip(theta).map(|(z, t)| z - t).collect();
    Ok(massieu(model, zeta)? - massieu(model, theta)? + dot(&shift, &u))
}

fn answers_of<M: ModelDescriptor + ?Sized>(model: &M, x: &M::DataSet) -> Result<Answers> {
    let answers = model
        .answers(x)
        .ok_or(Error::Unsupported("model has no data set layer"))??;
    check_len(model.dim(), answers.questions.len())?;
    Ok(answers)
}

/// Divergence of a data set from `m_θ` in exponential-family form.
pub fn divergence_from_data<M: ModelDescriptor + ?Sized>(
    model: &M,
    x: &M::DataSet,
    theta: &[f64],
) -> Result<DivergenceReport> {
    let answers = answers_of(model, x)?;
    let massieu_at = massieu(model, theta)?;
    let linear_term = dot(theta, &answers.questions);
    Ok(DivergenceReport {
        value: massieu_at - answers.entropy + linear_term,
        massieu_at,
        entropy_of_x: answers.entropy,
        linear_term,
    })
}

/// Divergence by its defining supremum over the fiber of `m_U`, with the
/// logarithmic map in exponential-family form.
pub fn divergence_def5<M: ModelDescriptor + ?Sized>(
    model: &M,
    x: &M::DataSet,
    u_of_m: &[f64],
    fiber_samples: usize,
    seed: u64,
) -> Result<f64> {
    let theta = u_to_theta(model, u_of_m)?;
    let alpha = log_map_offset(model, &theta)?;
    let fiber = model
        .fiber(u_of_m, fiber_samples, seed)
        .ok_or(Error::Unsupported("model has no fiber sampler"))??;
    // S(y) + ⟨y|L m⟩ with ⟨y|L m⟩ = α(θ) − Σθ_j⟨y|q_j⟩.
    let score = |y: &M::DataSet| -> Result<f64> {
        let a = answers_of(model, y)?;
        Ok(a.entropy + alpha - dot(&theta, &a.questions))
    };
    let mut sup = f64::NEG_INFINITY;
    for y in &fiber {
        sup = sup.max(score(y)?);
    }
    if sup == f64::NEG_INFINITY {
        return Err(Error::EmptyDomain);
    }
    Ok(sup - score(x)?)
}

/// `|D(x‖m_θ) + D(m_θ‖m_ζ) − D(x‖m_ζ)|`, requiring `μ(x) = m_θ`.
pub fn pythagoras_data<M: ModelDescriptor + ?Sized>(
    model: &M,
    x: &M::DataSet,
    theta: &[f64],
    zeta: &[f64],
) -> Result<f64> {
    let answers = answers_of(model, x)?;
    let u = theta_to_u(model, theta)?;
    if max_abs_diff(&answers.questions, &u) > ANSWER_TOL {
        return Err(Error::Constraint {
            answers: answers.questions,
            expected: u.0,
        });
    }
    let d_x_theta = divergence_from_data(model, x, theta)?.value;
    let d_theta_zeta = bregman_divergence(model, theta, zeta)?;
    let d_x_zeta = divergence_from_data(model, x, zeta)?.value;
    Ok((d_x_theta + d_theta_zeta - d_x_zeta).abs())
}

/// Pythagorean relation between three model points.
pub fn pythagoras_models<M: ModelDescriptor + ?Sized>(
    model: &M,
    theta: &[f64],
    zeta: &[f64],
    xi: &[f64],
) -> Result<PythagorasReport> {
    check_theta(model, xi)?;
    let u = theta_to_u(model, theta)?;
    let v = theta_to_u(model, zeta)?;
    let orthogonality = zeta
        .iter()
        .zip(xi)
        .zip(u.iter().zip(v.iter()))
        .map(|((z, x), (a, b))| (z - x) * (a - b))
        .sum();
    let d_theta_zeta = bregman_divergence(model, theta, zeta)?;
    let d_zeta_xi = bregman_divergence(model, zeta, xi)?;
    let d_theta_xi = bregman_divergence(model, theta, xi)?;
    Ok(PythagorasReport {
        orthogonality,
        residual: (d_theta_zeta + d_zeta_xi - d_theta_xi).abs(),
        d_theta_zeta,
        d_zeta_xi,
        d_theta_xi,
    })
}

/// `ξ = ζ + step·w` where `w` is `direction` with its component along
/// `U(θ) − U(ζ)` removed, so the triple (θ, ζ, ξ) is orthogonal.
pub fn orthogonal_partner<M: ModelDescriptor + ?Sized>(
    model: &M,
    theta: &[f64],
    zeta: &[f64],
    direction: &[f64],
    step: f64,
) -> Result<ParamPoint> {
    check_len(model.dim(), direction.len())?;
    let u = theta_to_u(model, theta)?;
    let v = theta_to_u(model, zeta)?;
    let diff: Vec<f64> = u.iter().zip(v.iter()).map(|(a, b)| a - b).collect();
    let dd = dot(&diff, &diff);
    let coeff = if dd > 0.0 { dot(direction, &diff) / dd } else { 0.0 };
    Ok(ParamPoint(
        zeta.iter()
            .zip(direction)
            .zip(&diff)
            .map(|((z, w), d)| z + step * (w - coeff * d))
            .collect(),
    ))
}

/// Largest `Φ(λθ₁+(1−λ)θ₂) − λΦ(θ₁) − (1−λ)Φ(θ₂)` over `lambdas`.
pub fn convexity_probe<M: ModelDescriptor + ?Sized>(
    model: &M,
    theta1: &[f64],
    theta2: &[f64],
    lambdas: &[f64],
) -> Result<f64> {
    check_theta(model, theta2)?;
    let p1 = massieu(model, theta1)?;
    let p2 = massieu(model, theta2)?;
    let mut worst = f64::NEG_INFINITY;
    for &lambda in lambdas {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("lambda {lambda} outside [0, 1]")));
        }
        let mid: Vec<f64> = theta1
            .iter()
            .zip(theta2)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        let gap = massieu(model, &mid)? - lambda * p1 - (1.0 - lambda) * p2;
        worst = worst.max(gap);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Isotropic Gaussian-like toy model: S(U) = −|U|²/2 on a large box.
    struct Quadratic {
        domain: Domain,
        closed: bool,
    }

    impl Quadratic {
        fn new(closed: bool) -> Self {
            let domain = Domain::open_box(vec![(-20.0, 20.0); 2]).unwrap().with_unbounded(true);
            Self { domain, closed }
        }
    }

    impl ModelDescriptor for Quadratic {
        type DataSet = (Vec<f64>, f64);

        fn energy_domain(&self) -> &Domain {
            &self.domain
        }

        fn entropy_u(&self, u: &[f64]) -> f64 {
            -0.5 * dot(u, u)
        }

        fn closed_massieu(&self, theta: &[f64]) -> Option<f64> {
            self.closed.then(|| 0.5 * dot(theta, theta))
        }

        fn answers(&self, x: &Self::DataSet) -> Option<Result<Answers>> {
            Some(Ok(Answers {
                questions: x.0.clone(),
                entropy: x.1,
            }))
        }
    }

    #[test]
    fn numeric_and_closed_paths_agree() {
        let closed = Quadratic::new(true);
        let numeric = Quadratic::new(false);
        let theta = [0.7, -1.1];
        let a = massieu(&closed, &theta).unwrap();
        let b = massieu(&numeric, &theta).unwrap();
        assert!((a - b).abs() < 1e-9);
        let u = theta_to_u(&numeric, &theta).unwrap();
        assert!(max_abs_diff(&u, &[-0.7, 1.1]) < 1e-8);
        let back = u_to_theta(&numeric, &u).unwrap();
        assert!(max_abs_diff(&back, &theta) < 1e-6);
    }

    #[test]
    fn unbounded_massieu_is_signalled() {
        // The true maximizer U = −θ lies outside the ±20 box.
        let numeric = Quadratic::new(false);
        assert_eq!(massieu(&numeric, &[30.0, 0.0]).unwrap(), f64::INFINITY);
        assert!(matches!(
            theta_to_u(&numeric, &[30.0, 0.0]),
            Err(Error::UnboundedMassieu { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_is_a_shape_error() {
        let m = Quadratic::new(true);
        assert!(matches!(massieu(&m, &[1.0]), Err(Error::Shape { .. })));
        assert!(matches!(u_to_theta(&m, &[1.0, 2.0, 3.0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn u_outside_domain_is_rejected() {
        let m = Quadratic::new(true);
        assert!(matches!(u_to_theta(&m, &[25.0, 0.0]), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn bregman_of_quadratic_is_half_square_distance() {
        let m = Quadratic::new(true);
        let d = bregman_divergence(&m, &[0.3, 0.1], &[1.3, -0.9]).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        assert!(bregman_divergence(&m, &[0.3, 0.1], &[0.3, 0.1]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn canonical_violation_carries_the_pair() {
        // Claims Φ twice too large: the identity must fail.
        struct Broken(Quadratic);
        impl ModelDescriptor for Broken {
            type DataSet = ();
            fn energy_domain(&self) -> &Domain {
                self.0.energy_domain()
            }
            fn entropy_u(&self, u: &[f64]) -> f64 {
                self.0.entropy_u(u)
            }
            fn closed_massieu(&self, theta: &[f64]) -> Option<f64> {
                Some(dot(theta, theta))
            }
        }
        let m = Broken(Quadratic::new(true));
        match canonical_check(&m, &[1.0, 0.0], 1e-9) {
            Err(Error::CanonicalityViolation(pair)) => assert!((pair.residual - 0.5).abs() < 1e-6),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn data_layer_is_optional() {
        struct Bare(Quadratic);
        impl ModelDescriptor for Bare {
            type DataSet = ();
            fn energy_domain(&self) -> &Domain {
                self.0.energy_domain()
            }
            fn entropy_u(&self, u: &[f64]) -> f64 {
                self.0.entropy_u(u)
            }
        }
        let m = Bare(Quadratic::new(true));
        assert!(matches!(
            divergence_from_data(&m, &(), &[0.0, 0.0]),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            divergence_def5(&m, &(), &[0.0, 0.0], 10, 0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn pythagoras_checks_precondition() {
        let m = Quadratic::new(true);
        let x = (vec![0.5, 0.5], -1.0);
        let err = pythagoras_data(&m, &x, &[0.0, 0.0], &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Constraint { .. }));
        // μ(x) = m_θ with θ = −U.
        let r = pythagoras_data(&m, &x, &[-0.5, -0.5], &[1.0, 2.0]).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn orthogonal_partner_zeroes_orthogonality() {
        let m = Quadratic::new(true);
        let (t, z) = ([0.2, -0.4], [1.0, 0.3]);
        let xi = orthogonal_partner(&m, &t, &z, &[0.3, 0.8], 0.5).unwrap();
        let rep = pythagoras_models(&m, &t, &z, &xi).unwrap();
        assert!(rep.orthogonality.abs() < 1e-12);
        assert!(rep.residual < 1e-12);
    }

    #[test]
    fn convexity_probe_rejects_bad_lambda() {
        let m = Quadratic::new(true);
        assert!(convexity_probe(&m, &[0.0, 0.0], &[1.0, 1.0], &[1.5]).is_err());
        let v = convexity_probe(&m, &[0.0, 0.0], &[1.0, 1.0], &[0.5]).unwrap();
        assert!((v + 0.25).abs() < 1e-12);
        let v = convexity_probe(&m, &[0.0, 0.0], &[1.0, 1.0], &[0.0, 0.5, 1.0]).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn alpha_accessors_have_opposite_signs() {
        let m = Quadratic::new(true);
        let theta = [1.0, 2.0];
        assert_eq!(log_map_offset(&m, &theta).unwrap(), -normalizer(&m, &theta).unwrap());
    }
}
