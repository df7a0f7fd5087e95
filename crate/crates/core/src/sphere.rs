//! Unit-sphere model in ℝ³: `μ(x) = x/|x|`, questions `x₁/x₃`, `x₂/x₃`.

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];

fn norm(x: &Point3) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn nonzero(x: &Point3) -> Result<f64> {
    let n = norm(x);
    if n > 0.0 && n.is_finite() {
        Ok(n)
    } else {
        Err(Error::OutsideDomain { point: x.to_vec() })
    }
}

pub fn sphere_mu(x: &Point3) -> Result<Point3> {
    let n = nonzero(x)?;
    Ok([x[0] / n, x[1] / n, x[2] / n])
}

/// `(x₁/x₃, x₂/x₃)` on the upper half-space.
pub fn sphere_questions(x: &Point3) -> Result<[f64; 2]> {
    if !(x[2] > 0.0) || !x.iter().all(|v| v.is_finite()) {
        return Err(Error::OutsideDomain { point: x.to_vec() });
    }
    Ok([x[0] / x[2], x[1] / x[2]])
}

/// Point of the upper hemisphere with questions `u`.
pub fn sphere_reconstruct(u: &[f64; 2]) -> Point3 {
    let x3 = 1.0 / (1.0 + u[0] * u[0] + u[1] * u[1]).sqrt();
    [u[0] * x3, u[1] * x3, x3]
}

/// `S(x) = −1 − |x|(ln|x| − 1)`, zero exactly on the sphere.
pub fn sphere_entropy(x: &Point3) -> Result<f64> {
    let n = nonzero(x)?;
    Ok(-1.0 - n * (n.ln() - 1.0))
}
