//! Numerical kernels shared by every model.
//!
//! Finite differences, a damped Newton maximizer for concave functions on
//! open domains, a brute-force grid oracle, and closed-form spectral
//! calculus for 2×2 Hermitian matrices.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Armijo sufficient-increase constant.
pub const ARMIJO: f64 = 1e-4;
/// Maximum number of step halvings in one line search.
pub const MAX_HALVINGS: usize = 60;
/// Newton iteration cap.
pub const MAX_ITERATIONS: usize = 200;

type Membership = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// An open subset of ℝⁿ described by a membership predicate, a finite
/// bounding box and one point known to be inside.
#[derive(Clone)]
pub struct Domain {
    bounding_box: Vec<(f64, f64)>,
    membership: Membership,
    interior_point: Vec<f64>,
    unbounded: bool,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain")
            .field("bounding_box", &self.bounding_box)
            .field("interior_point", &self.interior_point)
            .field("unbounded", &self.unbounded)
            .finish()
    }
}

impl Domain {
    pub fn new<F>(bounding_box: Vec<(f64, f64)>, membership: F, interior_point: Vec<f64>) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        if bounding_box.is_empty() {
            return Err(Error::InvalidParameter("domain dimension must be positive".into()));
        }
        if bounding_box
            .iter()
            .any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(Error::InvalidParameter(format!(
                "bounding box must be finite and non-empty: {bounding_box:?}"
            )));
        }
        if interior_point.len() != bounding_box.len() || !membership(&interior_point) {
            return Err(Error::OutsideDomain {
                point: interior_point,
            });
        }
        Ok(Self {
            bounding_box,
            membership: Arc::new(membership),
            interior_point,
            unbounded: false,
        })
    }

    /// The open box itself, with its center as interior point.
    pub fn open_box(bounding_box: Vec<(f64, f64)>) -> Result<Self> {
        let center = bounding_box.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        let bounds = bounding_box.clone();
        Self::new(
            bounding_box,
            move |x: &[f64]| {
                x.len() == bounds.len()
                    && x.iter().zip(&bounds).all(|(&v, &(lo, hi))| v > lo && v < hi)
            },
            center,
        )
    }

    /// Marks the domain as a finite stand-in for an unbounded energy space.
    pub fn with_unbounded(mut self, unbounded: bool) -> Self {
        self.unbounded = unbounded;
        self
    }

    pub fn dimension(&self) -> usize {
        self.bounding_box.len()
    }

    pub fn bounding_box(&self) -> &[(f64, f64)] {
        &self.bounding_box
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior_point
    }

    pub fn is_unbounded(&self) -> bool {
        self.unbounded
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension() && x.iter().all(|v| v.is_finite()) && (self.membership)(x)
    }

    /// Smallest distance from `x` to a face of the bounding box.
    pub fn box_distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.bounding_box)
            .map(|(&v, &(lo, hi))| (v - lo).min(hi - v))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Outcome of [`maximize_concave`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

fn default_step(x: f64, scale: f64) -> f64 {
    scale * x.abs().max(1.0)
}

fn eval_finite(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::EvaluationDomain { point: x.to_vec() })
    }
}

/// Central-difference gradient. `h = None` uses `cbrt(eps)·max(1,|x_j|)`.
pub fn grad_fd(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: Option<f64>) -> Result<Vec<f64>> {
    let scale = f64::EPSILON.cbrt();
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let step = h.unwrap_or_else(|| default_step(x[j], scale));
        probe[j] = x[j] + step;
        let plus = eval_finite(f, &probe)?;
        probe[j] = x[j] - step;
        let minus = eval_finite(f, &probe)?;
        probe[j] = x[j];
        grad.push((plus - minus) / (2.0 * step));
    }
    Ok(grad)
}

/// Central second differences, symmetrized. `h = None` uses
/// `eps^(1/4)·max(1,|x_j|)`.
pub fn hess_fd(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: Option<f64>) -> Result<DMatrix<f64>> {
    let n = x.len();
    let scale = f64::EPSILON.powf(0.25);
    let steps: Vec<f64> = x
        .iter()
        .map(|&v| h.unwrap_or_else(|| default_step(v, scale)))
        .collect();
    let f0 = eval_finite(f, x)?;
    let mut probe = x.to_vec();
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        probe[i] = x[i] + steps[i];
        let plus = eval_finite(f, &probe)?;
        probe[i] = x[i] - steps[i];
        let minus = eval_finite(f, &probe)?;
        probe[i] = x[i];
        hess[(i, i)] = (plus - 2.0 * f0 + minus) / (steps[i] * steps[i]);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| -> Result<f64> {
                probe[i] = x[i] + si * steps[i];
                probe[j] = x[j] + sj * steps[j];
                let v = eval_finite(f, &probe);
                probe[i] = x[i];
                probe[j] = x[j];
                v
            };
            let pp = corner(1.0, 1.0)?;
            let pm = corner(1.0, -1.0)?;
            let mp = corner(-1.0, 1.0)?;
            let mm = corner(-1.0, -1.0)?;
            let v = (pp - pm - mp + mm) / (4.0 * steps[i] * steps[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok((&hess + hess.transpose()) * 0.5)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Retries a finite-difference evaluation with smaller steps when the
/// default stencil leaves the domain.
fn with_shrinking_step<T>(
    x: &[f64],
    scale: f64,
    mut eval: impl FnMut(Option<f64>) -> Result<T>,
) -> Result<T> {
    match eval(None) {
        Ok(v) => Ok(v),
        Err(Error::EvaluationDomain { .. }) => {
            let base = scale * x.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            let mut h = base;
            for _ in 0..6 {
                h *= 0.1;
                if let Ok(v) = eval(Some(h)) {
                    return Ok(v);
                }
            }
            Err(Error::EvaluationDomain { point: x.to_vec() })
        }
        Err(e) => Err(e),
    }
}

/// Damped Newton maximization of a concave function over an open domain.
///
/// Every iterate satisfies domain membership. When the Hessian is not
/// negative definite the iterate takes a gradient-ascent step instead.
/// Hitting the iteration cap or a stalled line search is reported through
/// `converged = false` with the best iterate.
pub fn maximize_concave(
    f: &dyn Fn(&[f64]) -> f64,
    domain: &Domain,
    x0: Option<&[f64]>,
    tol: f64,
) -> Result<OptimizationResult> {
    let mut x = x0.unwrap_or(domain.interior_point()).to_vec();
    if !domain.contains(&x) {
        return Err(Error::OutsideDomain { point: x });
    }
    let objective = |p: &[f64]| if domain.contains(p) { f(p) } else { f64::NAN };
    let mut fx = eval_finite(&objective, &x)?;
    let n = x.len();
    let mut gradient_norm = f64::INFINITY;

    for iteration in 0..MAX_ITERATIONS {
        let stalled = |x: Vec<f64>, fx: f64, gradient_norm: f64| OptimizationResult {
            argmax: x,
            value: fx,
            iterations: iteration,
            gradient_norm,
            converged: false,
        };
        // A stencil that no longer fits means the iterate is pinned to the boundary.
        let grad = match with_shrinking_step(&x, f64::EPSILON.cbrt(), |h| grad_fd(&objective, &x, h)) {
            Ok(g) => g,
            Err(Error::EvaluationDomain { .. }) => return Ok(stalled(x, fx, gradient_norm)),
            Err(e) => return Err(e),
        };
        gradient_norm = norm(&grad);
        if gradient_norm <= tol {
            return Ok(OptimizationResult {
                argmax: x,
                value: fx,
                iterations: iteration,
                gradient_norm,
                converged: true,
            });
        }
        let hess = match with_shrinking_step(&x, f64::EPSILON.powf(0.25), |h| hess_fd(&objective, &x, h)) {
            Ok(h) => h,
            Err(Error::EvaluationDomain { .. }) => return Ok(stalled(x, fx, gradient_norm)),
            Err(e) => return Err(e),
        };
        let g = DVector::from_column_slice(&grad);
        let (direction, newton) = match (-hess).cholesky() {
            Some(chol) => (chol.solve(&g), true),
            None => (g.clone(), false),
        };
        let slope = g.dot(&direction);

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(direction.iter()).map(|(a, d)| a + t * d).collect();
            if domain.contains(&trial) {
                let ft = f(&trial);
                if ft.is_finite() {
                    let sufficient = ft >= fx + ARMIJO * t * slope;
                    // Near the optimum the gain drops below rounding noise.
                    let noise = 64.0 * f64::EPSILON * fx.abs().max(1.0);
                    if sufficient || (newton && t == 1.0 && (ft - fx).abs() <= noise) {
                        accepted = Some((trial, ft));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, ft)) => {
                x = trial;
                fx = ft;
            }
            None => return Ok(stalled(x, fx, gradient_norm)),
        }
        debug_assert_eq!(x.len(), n);
    }
    Ok(OptimizationResult {
        argmax: x,
        value: fx,
        iterations: MAX_ITERATIONS,
        gradient_norm,
        converged: false,
    })
}

/// Brute-force maximum over a regular grid on the bounding box, restricted
/// to domain members. Ties go to the lowest linear grid index.
pub fn grid_sup(
    f: &dyn Fn(&[f64]) -> f64,
    domain: &Domain,
    points_per_axis: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = domain.dimension();
    if points_per_axis < 2 {
        return Err(Error::InvalidParameter("points_per_axis must be at least 2".into()));
    }
    if n > 3 {
        return Err(Error::InvalidParameter(format!(
            "grid oracle limited to 3 dimensions, got {n}"
        )));
    }
    let axes: Vec<Vec<f64>> = domain
        .bounding_box()
        .iter()
        .map(|&(lo, hi)| {
            (0..points_per_axis)
                .map(|k| lo + (hi - lo) * k as f64 / (points_per_axis - 1) as f64)
                .collect()
        })
        .collect();
    let total = points_per_axis.pow(n as u32);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut point = vec![0.0; n];
    for linear in 0..total {
        let mut rem = linear;
        for axis in (0..n).rev() {
            point[axis] = axes[axis][rem % points_per_axis];
            rem /= points_per_axis;
        }
        if !domain.contains(&point) {
            continue;
        }
        let v = f(&point);
        if !v.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((point.clone(), v));
        }
    }
    best.ok_or(Error::EmptyDomain)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// A 2×2 complex Hermitian matrix `[[a, re + i·im], [re − i·im, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2H {
    pub a: f64,
    pub d: f64,
    pub re: f64,
    pub im: f64,
}

impl Matrix2H {
    pub const ZERO: Self = Self { a: 0.0, d: 0.0, re: 0.0, im: 0.0 };
    pub const IDENTITY: Self = Self { a: 1.0, d: 1.0, re: 0.0, im: 0.0 };

    /// `c0·I + v₁σ₁ + v₂σ₂ + v₃σ₃`.
    pub fn from_pauli(c0: f64, v: [f64; 3]) -> Self {
        Self {
            a: c0 + v[2],
            d: c0 - v[2],
            re: v[0],
            im: -v[1],
        }
    }

    /// Inverse of [`Matrix2H::from_pauli`].
    pub fn to_pauli(&self) -> (f64, [f64; 3]) {
        (
            0.5 * (self.a + self.d),
            [self.re, -self.im, 0.5 * (self.a - self.d)],
        )
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match (row, col) {
            (0, 0) => Complex64::new(self.a, 0.0),
            (1, 1) => Complex64::new(self.d, 0.0),
            (0, 1) => Complex64::new(self.re, self.im),
            (1, 0) => Complex64::new(self.re, -self.im),
            _ => panic!("index ({row}, {col}) out of range for a 2x2 matrix"),
        }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            a: s * self.a,
            d: s * self.d,
            re: s * self.re,
            im: s * self.im,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            a: self.a + other.a,
            d: self.d + other.d,
            re: self.re + other.re,
            im: self.im + other.im,
        }
    }

    /// `Tr(self · other)`, real for Hermitian factors.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let (p0, p) = self.to_pauli();
        let (q0, q) = other.to_pauli();
        2.0 * (p0 * q0 + p[0] * q[0] + p[1] * q[1] + p[2] * q[2])
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.a - other.a).abs(),
            (self.d - other.d).abs(),
            (self.re - other.re).abs(),
            (self.im - other.im).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition of a [`Matrix2H`], eigenvalues ascending.
#[derive(Debug, Clone, Copy)]
pub struct EigenH2 {
    pub values: [f64; 2],
    /// `vectors[k]` is the unit eigenvector of `values[k]`.
    pub vectors: [[Complex64; 2]; 2],
}

impl EigenH2 {
    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> Matrix2H {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            for r in 0..2 {
                for c in 0..2 {
                    m[r][c] += *lambda * v[r] * v[c].conj();
                }
            }
        }
        Matrix2H {
            a: m[0][0].re,
            d: m[1][1].re,
            re: m[0][1].re,
            im: m[0][1].im,
        }
    }
}

pub fn eig_h2(m: &Matrix2H) -> EigenH2 {
    let (mean, v) = m.to_pauli();
    let radius = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if radius == 0.0 {
        return EigenH2 {
            values: [mean, mean],
            vectors: [[one, zero], [zero, one]],
        };
    }
    let n = [v[0] / radius, v[1] / radius, v[2] / radius];
    // Eigenvector of n·σ for +1, picking the better-conditioned branch.
    let (p, q) = if n[2] >= 0.0 {
        (Complex64::new(1.0 + n[2], 0.0), Complex64::new(n[0], n[1]))
    } else {
        (Complex64::new(n[0], -n[1]), Complex64::new(1.0 - n[2], 0.0))
    };
    let len = (p.norm_sqr() + q.norm_sqr()).sqrt();
    let (p, q) = (p / len, q / len);
    EigenH2 {
        values: [mean - radius, mean + radius],
        vectors: [[-q.conj(), p.conj()], [p, q]],
    }
}

/// Spectral calculus: applies `g` to the eigenvalues of `m`.
pub fn func_h2(m: &Matrix2H, g: impl Fn(f64) -> f64) -> Result<Matrix2H> {
    let (mean, v) = m.to_pauli();
    let radius = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let apply = |lambda: f64| {
        let value = g(lambda);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::SpectralDomain { eigenvalue: lambda })
        }
    };
    if radius == 0.0 {
        return Ok(Matrix2H::from_pauli(apply(mean)?, [0.0; 3]));
    }
    let lo = apply(mean - radius)?;
    let hi = apply(mean + radius)?;
    let k = 0.5 * (hi - lo) / radius;
    Ok(Matrix2H::from_pauli(
        0.5 * (hi + lo),
        [k * v[0], k * v[1], k * v[2]],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn qubit_massieu(theta: &[f64]) -> f64 {
        let r = norm(theta);
        (2.0 * r.cosh()).ln()
    }

    fn qubit_entropy(u: &[f64]) -> f64 {
        let r = norm(u);
        let term = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
        std::f64::consts::LN_2 - 0.5 * term(1.0 + r) - 0.5 * term(1.0 - r)
    }

    fn unit_ball() -> Domain {
        Domain::new(
            vec![(-1.0, 1.0); 3],
            |u: &[f64]| norm(u) < 1.0 - 1e-12,
            vec![0.0; 3],
        )
        .unwrap()
    }

    #[test]
    fn gradient_examples() {
        let g = grad_fd(&|x: &[f64]| x[0] * x[0], &[3.0], Some(1e-4)).unwrap();
        assert_abs_diff_eq!(g[0], 6.0, epsilon = 1e-7);
        let g = grad_fd(&|x: &[f64]| x[0] * x[1], &[2.0, 5.0], Some(1e-5)).unwrap();
        assert_abs_diff_eq!(g[0], 5.0, epsilon = 1e-8);
        assert_abs_diff_eq!(g[1], 2.0, epsilon = 1e-8);
        // d/dθ ln(2cosh|θ|) = tanh|θ|·θ/|θ|
        let g = grad_fd(&qubit_massieu, &[1.0, 0.0, 0.0], Some(1e-5)).unwrap();
        assert_abs_diff_eq!(g[0], 1.0_f64.tanh(), epsilon = 1e-9);
        assert_abs_diff_eq!(g[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gradient_rejects_non_finite_stencil() {
        let f = |x: &[f64]| x[0].ln();
        assert!(matches!(
            grad_fd(&f, &[0.0], Some(1e-3)),
            Err(Error::EvaluationDomain { .. })
        ));
    }

    #[test]
    fn hessian_examples() {
        let h = hess_fd(&|x: &[f64]| x[0] * x[0] + x[1] * x[1], &[1.0, 1.0], Some(1e-4)).unwrap();
        assert!((h - DMatrix::identity(2, 2) * 2.0).amax() < 1e-5);
        let h = hess_fd(&qubit_massieu, &[0.0; 3], None).unwrap();
        assert!((h - DMatrix::<f64>::identity(3, 3)).amax() < 1e-5);
        let h = hess_fd(&|x: &[f64]| x[0] * x[1], &[0.0, 0.0], Some(1e-4)).unwrap();
        assert_abs_diff_eq!(h[(0, 1)], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(h[(1, 0)], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(h[(0, 0)], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(h[(1, 1)], 0.0, epsilon = 1e-6);
    }

    #[test]
    fn maximize_simple_quadratic() {
        let domain = Domain::open_box(vec![(-2.0, 2.0)]).unwrap();
        let res = maximize_concave(&|u: &[f64]| -u[0] * u[0], &domain, Some(&[1.3]), 1e-12).unwrap();
        assert!(res.converged);
        assert_abs_diff_eq!(res.argmax[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(res.value, 0.0, epsilon = 1e-20);
    }

    #[test]
    fn maximize_qubit_legendre_integrand() {
        let theta = [1.0, 0.0, 0.0];
        let f = |u: &[f64]| qubit_entropy(u) - theta[0] * u[0];
        let res = maximize_concave(&f, &unit_ball(), None, 1e-10).unwrap();
        assert!(res.converged);
        assert_abs_diff_eq!(res.argmax[0], -1.0_f64.tanh(), epsilon = 1e-8);
        assert_abs_diff_eq!(res.value, (2.0 * 1.0_f64.cosh()).ln(), epsilon = 1e-12);
    }

    #[test]
    fn maximize_starting_near_boundary_stays_inside() {
        // Steep integrand: the optimum sits at |U| = tanh 4 ≈ 0.9993.
        let theta = [0.0, -4.0, 0.0];
        let f = |u: &[f64]| qubit_entropy(u) - theta[1] * u[1];
        let domain = unit_ball();
        let res = maximize_concave(&f, &domain, Some(&[0.0, -0.99, 0.0]), 1e-9).unwrap();
        assert!(res.converged);
        assert!(domain.contains(&res.argmax));
        assert_abs_diff_eq!(res.argmax[1], 4.0_f64.tanh(), epsilon = 1e-8);
    }

    #[test]
    fn maximize_falls_back_on_indefinite_hessian() {
        // Convex near the start, concave further out: Newton is invalid at x0.
        let f = |u: &[f64]| -(u[0] * u[0] - 1.0).powi(2) - u[0];
        let domain = Domain::open_box(vec![(-3.0, 3.0)]).unwrap();
        let res = maximize_concave(&f, &domain, Some(&[0.0]), 1e-9).unwrap();
        assert!(res.converged);
        let g = grad_fd(&f, &res.argmax, None).unwrap();
        assert!(g[0].abs() < 1e-8);
    }

    #[test]
    fn maximize_reports_non_convergence_at_the_boundary() {
        let domain = Domain::open_box(vec![(-1.0, 1.0)]).unwrap();
        let res = maximize_concave(&|u: &[f64]| u[0], &domain, None, 1e-10).unwrap();
        assert!(!res.converged);
        assert!(domain.contains(&res.argmax));
        assert!(res.argmax[0] > 0.99);
    }

    #[test]
    fn maximize_rejects_start_outside() {
        let domain = Domain::open_box(vec![(-1.0, 1.0)]).unwrap();
        assert!(maximize_concave(&|u: &[f64]| -u[0] * u[0], &domain, Some(&[2.0]), 1e-9).is_err());
    }

    #[test]
    fn grid_examples() {
        let domain = Domain::open_box(vec![(0.0, 1.0)]).unwrap();
        // The open box excludes the endpoints but 0.5 is interior.
        let (x, v) = grid_sup(&|u: &[f64]| -(u[0] - 0.5).powi(2), &domain, 101).unwrap();
        assert_eq!(x, vec![0.5]);
        assert_eq!(v, 0.0);

        let theta = [1.0, 0.0, 0.0];
        let f = |u: &[f64]| qubit_entropy(u) - theta[0] * u[0];
        let (_, v) = grid_sup(&f, &unit_ball(), 61).unwrap();
        assert!((v - 1.1269280110429725).abs() < 2e-3);
        assert!(v <= 1.1269280110429725);

        let closed = Domain::new(vec![(0.0, 1.0)], |_: &[f64]| true, vec![0.5]).unwrap();
        let (x, v) = grid_sup(&|_: &[f64]| 0.0, &closed, 11).unwrap();
        assert_eq!(x, vec![0.0]);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn grid_guards() {
        let domain = Domain::open_box(vec![(0.0, 1.0); 4]).unwrap();
        assert!(grid_sup(&|_: &[f64]| 0.0, &domain, 3).is_err());
        let domain = Domain::new(vec![(0.0, 1.0)], |u: &[f64]| u[0] > 0.3 && u[0] < 0.31, vec![0.305])
            .unwrap();
        assert!(matches!(
            grid_sup(&|_: &[f64]| 0.0, &domain, 3),
            Err(Error::EmptyDomain)
        ));
    }

    #[test]
    fn eig_examples() {
        let e = eig_h2(&Matrix2H::IDENTITY.scale(0.5));
        assert_eq!(e.values, [0.5, 0.5]);
        let e = eig_h2(&Matrix2H::from_pauli(0.5, [0.25, 0.0, 0.0]));
        assert_abs_diff_eq!(e.values[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 0.75, epsilon = 1e-15);
        let e = eig_h2(&Matrix2H::from_pauli(0.0, [0.0, 0.0, 1.0]));
        assert_eq!(e.values, [-1.0, 1.0]);
    }

    #[test]
    fn func_examples() {
        let e = func_h2(&Matrix2H::ZERO, f64::exp).unwrap();
        assert_eq!(e, Matrix2H::IDENTITY);
        let m = func_h2(&Matrix2H::from_pauli(0.0, [-1.0, 0.0, 0.0]), f64::exp)
            .unwrap()
            .scale(1.0 / (2.0 * 1.0_f64.cosh()));
        let (c0, v) = m.to_pauli();
        assert_abs_diff_eq!(c0, 0.5, epsilon = 1e-15);
        // Bloch vector is 2·(Pauli coefficients).
        assert_abs_diff_eq!(2.0 * v[0], -0.7615941559557649, epsilon = 1e-12);
        let l = func_h2(&Matrix2H::IDENTITY.scale(0.5), f64::ln).unwrap();
        assert!(l.max_abs_diff(&Matrix2H::IDENTITY.scale(-std::f64::consts::LN_2)) < 1e-15);
        assert!(matches!(
            func_h2(&Matrix2H::from_pauli(0.5, [0.0, 0.0, 0.5]), f64::ln),
            Err(Error::SpectralDomain { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn hermitian() -> impl Strategy<Value = Matrix2H> {
            (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)
                .prop_map(|(a, d, re, im)| Matrix2H { a, d, re, im })
        }

        proptest! {
            #[test]
            fn eig_reconstructs(m in hermitian()) {
                let e = eig_h2(&m);
                prop_assert!(e.values[0] <= e.values[1]);
                prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-13);
                let [v0, v1] = e.vectors;
                let inner = v0[0].conj() * v1[0] + v0[1].conj() * v1[1];
                prop_assert!(inner.norm() < 1e-13);
                for v in [v0, v1] {
                    prop_assert!(((v[0].norm_sqr() + v[1].norm_sqr()) - 1.0).abs() < 1e-13);
                }
            }

            #[test]
            fn func_identity_is_identity(m in hermitian()) {
                prop_assert!(func_h2(&m, |x| x).unwrap().max_abs_diff(&m) < 1e-13);
            }

            #[test]
            fn fd_exact_on_quadratics(
                a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64,
                x in -2.0..2.0f64, y in -2.0..2.0f64,
            ) {
                let f = |p: &[f64]| a * p[0] * p[0] + b * p[0] * p[1] + c * p[1] * p[1];
                let g = grad_fd(&f, &[x, y], None).unwrap();
                prop_assert!((g[0] - (2.0 * a * x + b * y)).abs() < 1e-9);
                prop_assert!((g[1] - (b * x + 2.0 * c * y)).abs() < 1e-9);
                let h = hess_fd(&f, &[x, y], None).unwrap();
                prop_assert!((h[(0, 0)] - 2.0 * a).abs() < 1e-6);
                prop_assert!((h[(0, 1)] - b).abs() < 1e-6);
                prop_assert!((h[(1, 1)] - 2.0 * c).abs() < 1e-6);
            }

            #[test]
            fn newton_solves_concave_quadratics_fast(
                c0 in -1.5..1.5f64, c1 in -1.5..1.5f64,
                p in 0.2..3.0f64, q in 0.2..3.0f64, r in -0.9..0.9f64,
            ) {
                // -(x-c)ᵀA(x-c) with A = [[p, r·√(pq)], [r·√(pq), q]] positive definite.
                let off = r * (p * q).sqrt();
                let f = |x: &[f64]| {
                    let (d0, d1) = (x[0] - c0, x[1] - c1);
                    -(p * d0 * d0 + 2.0 * off * d0 * d1 + q * d1 * d1)
                };
                let domain = Domain::open_box(vec![(-2.0, 2.0); 2]).unwrap();
                let res = maximize_concave(&f, &domain, None, 1e-12).unwrap();
                prop_assert!(res.converged);
                prop_assert!(res.iterations <= 3);
                prop_assert!(res.gradient_norm <= 1e-12);
                let (grid_x, grid_v) = grid_sup(&f, &domain, 41).unwrap();
                prop_assert!(grid_v <= res.value + 1e-12, "{grid_x:?}");
            }
        }
    }
}
