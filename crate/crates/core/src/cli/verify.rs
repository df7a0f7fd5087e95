//! Property suites behind `dsm verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::Config;
use super::envelope::{Envelope, Failure};
use super::{Format, Report};
use crate::canonical::CanonicalModel;
use crate::discrete::{DiscreteFamily, DiscreteModel};
use crate::error::Error;
use crate::numerics::grad_fd;
use crate::regression::{regression_embed, regression_entropy, regression_questions, LineModel, RegressionData};
use crate::sphere::{sphere_entropy, sphere_mu, sphere_questions, sphere_reconstruct};

pub const TARGETS: [&str; 6] = ["discrete", "discrete3", "qubit", "coherent", "regression", "sphere"];

#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub suite: String,
    pub property: &'static str,
    pub passed: bool,
    /// Worst observed residual; `None` when an evaluation failed.
    pub worst: Option<f64>,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Accumulates the worst residual of one property.
struct Tracker {
    property: &'static str,
    tolerance: f64,
    worst: f64,
    samples: usize,
    error: Option<String>,
}

impl Tracker {
    fn new(property: &'static str, tolerance: f64) -> Self {
        Self {
            property,
            tolerance,
            worst: 0.0,
            samples: 0,
            error: None,
        }
    }

    fn record(&mut self, r: crate::Result<f64>) {
        self.samples += 1;
        match r {
            Ok(v) if v.is_nan() => {
                self.error.get_or_insert_with(|| "NaN residual".into());
            }
            Ok(v) => self.worst = self.worst.max(v),
            Err(e) => {
                self.error.get_or_insert_with(|| e.to_string());
            }
        }
    }

    fn finish(self, suite: &str) -> PropertyResult {
        let ok = self.error.is_none() && self.worst <= self.tolerance;
        PropertyResult {
            suite: suite.to_string(),
            property: self.property,
            passed: ok,
            worst: self.error.is_none().then_some(self.worst),
            tolerance: self.tolerance,
            samples: self.samples,
            error: self.error,
        }
    }
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Half-widths of the θ box sampled for each model.
fn theta_box(m: &CanonicalModel) -> Vec<f64> {
    match m {
        CanonicalModel::Qubit(_) => vec![1.5; 3],
        CanonicalModel::Discrete(d) => vec![2.0; d.family().dim()],
        CanonicalModel::Coherent(c) => {
            let k = c.constants();
            let bound = m.bounding_box()[0].1;
            // Keep U = (−2r²θ₁, −2ħ²θ₂/r²) well inside the energy box.
            vec![
                (bound / (4.0 * k.r * k.r)).min(1.0),
                (bound * k.r * k.r / (4.0 * k.hbar * k.hbar)).min(1.0),
            ]
        }
    }
}

fn sample(rng: &mut ChaCha8Rng, half: &[f64]) -> Vec<f64> {
    half.iter().map(|&h| rng.gen_range(-h..h)).collect()
}

pub fn canonical_suite(name: &str, m: &CanonicalModel, seed: u64) -> Vec<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = theta_box(m);
    let n = m.dim();
    let mut out = Vec::new();

    let mut t = Tracker::new("oracle-agreement", 1e-6);
    for _ in 0..5 {
        let theta = sample(&mut rng, &half);
        t.record((|| Ok((m.massieu(&theta)? - m.massieu_numeric(&theta)?).abs()))());
    }
    out.push(t.finish(name));

    let tol = m.canonical_tolerance();
    let mut t = Tracker::new("canonical-identity", tol);
    for _ in 0..20 {
        let theta = sample(&mut rng, &half);
        t.record(m.canonical_check(&theta, Some(f64::INFINITY)).map(|p| p.residual));
    }
    out.push(t.finish(name));

    let mut t = Tracker::new("dual-relations", 1e-5);
    for _ in 0..10 {
        let theta = sample(&mut rng, &half);
        t.record((|| {
            let u = m.theta_to_u(&theta)?;
            let phi = |p: &[f64]| m.massieu(p).unwrap_or(f64::NAN);
            let g = grad_fd(&phi, &theta, None)?;
            let s = |p: &[f64]| m.entropy_u(p).unwrap_or(f64::NAN);
            let gs = grad_fd(&s, &u, None)?;
            let neg_u: Vec<f64> = u.iter().map(|v| -v).collect();
            Ok(max_abs(&g, &neg_u).max(max_abs(&gs, &theta)))
        })());
    }
    out.push(t.finish(name));

    let mut t = Tracker::new("metric-positive", 0.0);
    for _ in 0..10 {
        let theta = sample(&mut rng, &half);
        t.record(m.metric(&theta).map(|g| if g.min_eigenvalue > 0.0 { 0.0 } else { 1.0 }));
    }
    out.push(t.finish(name));

    let lambdas: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    let mut t = Tracker::new("convexity", 1e-9);
    for _ in 0..50 {
        let (a, b) = (sample(&mut rng, &half), sample(&mut rng, &half));
        t.record(m.convexity_probe(&a, &b, &lambdas).map(|v| v.max(0.0)));
    }
    out.push(t.finish(name));

    let mut t = Tracker::new("bregman-nonnegative", 1e-12);
    for _ in 0..50 {
        let (a, b) = (sample(&mut rng, &half), sample(&mut rng, &half));
        t.record(m.bregman(&a, &b).map(|d| (-d).max(0.0)));
    }
    out.push(t.finish(name));

    let mut t = Tracker::new("pythagoras", 1e-9);
    for _ in 0..10 {
        let theta = sample(&mut rng, &half);
        let zeta = sample(&mut rng, &half);
        let w = sample(&mut rng, &vec![1.0; n]);
        t.record((|| {
            let xi = m.orthogonal_partner(&theta, &zeta, &w, 0.5)?;
            Ok(m.pythagoras_models(&theta, &zeta, &xi)?.residual)
        })());
    }
    out.push(t.finish(name));

    // Fiber members answer U, never beat S(U), and have non-negative divergence.
    let mut fiber = Tracker::new("fiber-consistency", 1e-9);
    let mut nonneg = Tracker::new("divergence-nonnegative", 1e-10);
    let bounds = m.bounding_box();
    let mut members = 0;
    for _ in 0..2000 {
        if members == 20 {
            break;
        }
        let u: Vec<f64> = bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
        if !m.in_domain(&u) {
            continue;
        }
        members += 1;
        let answers = match m.fiber_answers(&u, 5, rng.gen()) {
            Err(Error::Truncation { .. } | Error::Unsupported(_)) => continue,
            other => other,
        };
        let theta = sample(&mut rng, &half);
        fiber.record((|| {
            let s_u = m.entropy_u(&u)?;
            let mut worst: f64 = 0.0;
            for a in answers.as_ref().map_err(Clone::clone)? {
                worst = worst.max(max_abs(&a.questions, &u)).max(a.entropy - s_u);
            }
            Ok(worst)
        })());
        if let Ok(list) = &answers {
            for a in list {
                nonneg.record(m.massieu(&theta).map(|phi| (-(phi - a.entropy + dot(&theta, &a.questions))).max(0.0)));
            }
        }
    }
    out.push(fiber.finish(name));
    out.push(nonneg.finish(name));
    out
}

/// The defining double sums of the regression questions and entropy.
fn regression_literal(d: &RegressionData) -> (f64, f64, f64) {
    let p = d.pairs();
    let (mut z, mut qa, mut qb, mut s) = (0.0, 0.0, 0.0, 0.0);
    for &(xi, yi) in p {
        for &(xj, yj) in p {
            z += (xi - xj) * (xi - xj);
            qa += (yi - yj) * (xi - xj);
            qb += (xi * yj - xj * yi) * (xi - xj);
            s += (xi * yj - xj * yi).powi(2) + (yi - yj).powi(2);
        }
    }
    (qa / z, qb / z, -s / z)
}

fn random_data(rng: &mut ChaCha8Rng) -> RegressionData {
    loop {
        let n = rng.gen_range(2..=100);
        let pairs = (0..n).map(|_| (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))).collect();
        if let Ok(d) = RegressionData::new(pairs) {
            return d;
        }
    }
}

pub fn regression_suite(seed: u64) -> Vec<PropertyResult> {
    let name = "regression";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ols = Tracker::new("ols-agreement", 1e-10);
    let mut literal = Tracker::new("literal-double-sum", 1e-9);
    let mut shift = Tracker::new("translation", 1e-10);
    for _ in 0..50 {
        let d = random_data(&mut rng);
        let p = d.pairs();
        let n = p.len() as f64;
        let sx: f64 = p.iter().map(|v| v.0).sum();
        let sy: f64 = p.iter().map(|v| v.1).sum();
        let sxx: f64 = p.iter().map(|v| v.0 * v.0).sum();
        let sxy: f64 = p.iter().map(|v| v.0 * v.1).sum();
        let den = n * sxx - sx * sx;
        ols.record(regression_questions(&d).map(|l| {
            (l.a - (n * sxy - sx * sy) / den)
                .abs()
                .max((l.b - (sxx * sy - sx * sxy) / den).abs())
        }));
        let (qa, qb, s) = regression_literal(&d);
        literal.record((|| {
            let l = regression_questions(&d)?;
            let e = regression_entropy(&d)?;
            Ok((l.a - qa).abs().max((l.b - qb).abs()).max((e - s).abs() / s.abs().max(1.0)))
        })());
        let delta = rng.gen_range(-5.0..5.0);
        shift.record((|| {
            let moved = RegressionData::new(p.iter().map(|&(x, y)| (x, y + delta)).collect())?;
            let (l0, l1) = (regression_questions(&d)?, regression_questions(&moved)?);
            Ok((l1.a - l0.a).abs().max((l1.b - l0.b - delta).abs()))
        })());
    }
    let mut perfect = Tracker::new("perfect-entropy", 1e-10);
    for _ in 0..50 {
        let line = LineModel {
            a: rng.gen_range(-5.0..5.0),
            b: rng.gen_range(-5.0..5.0),
        };
        let xs: Vec<f64> = (0..rng.gen_range(2..50)).map(|_| rng.gen_range(-10.0..10.0)).collect();
        perfect.record((|| {
            let d = regression_embed(&line, &xs)?;
            let scale = 1.0 + line.a * line.a + line.b * line.b;
            Ok((regression_entropy(&d)? + line.a * line.a + line.b * line.b).abs() / scale)
        })());
    }
    [ols, literal, perfect, shift].into_iter().map(|t| t.finish(name)).collect()
}

pub fn sphere_suite(seed: u64) -> Vec<PropertyResult> {
    let name = "sphere";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chart = Tracker::new("chart-roundtrip", 1e-12);
    for _ in 0..100 {
        let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.01..5.0)];
        chart.record((|| Ok(max_abs(&sphere_reconstruct(&sphere_questions(&x)?), &sphere_mu(&x)?)))());
    }
    let step = 1e-3;
    let mut peak = Tracker::new("entropy-peak", step);
    for _ in 0..50 {
        let dir = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        peak.record((|| {
            let dir = sphere_mu(&dir)?;
            let mut best = (0.0, f64::NEG_INFINITY);
            for k in 1..=3000 {
                let r = k as f64 * step;
                let s = sphere_entropy(&[r * dir[0], r * dir[1], r * dir[2]])?;
                if s > best.1 {
                    best = (r, s);
                }
            }
            Ok((best.0 - 1.0_f64).abs())
        })());
    }
    vec![chart.finish(name), peak.finish(name)]
}

fn suite(target: &str, cfg: &Config, nmax: Option<usize>, seed: u64) -> Result<Vec<PropertyResult>, Failure> {
    let canonical = |m: crate::Result<CanonicalModel>| -> Result<Vec<PropertyResult>, Failure> {
        Ok(canonical_suite(target, &m.map_err(|e| Failure::Usage(e.to_string()))?, seed))
    };
    match target {
        "discrete" | "qubit" | "coherent" => canonical(cfg.canonical(target, nmax)),
        "discrete3" => canonical(
            DiscreteFamily::with_unit_prior(vec![vec![0.0, 1.0, 2.0]])
                .and_then(DiscreteModel::new)
                .map(CanonicalModel::Discrete),
        ),
        "regression" => Ok(regression_suite(seed)),
        "sphere" => Ok(sphere_suite(seed)),
        other => Err(Failure::Usage(format!(
            "unknown verify target '{other}'; expected all or one of {}",
            TARGETS.join(", ")
        ))),
    }
}

pub(super) fn command(target: &str, cfg: &Config, nmax: Option<usize>, seed: u64) -> Result<Report, Failure> {
    let targets: Vec<&str> = if target == "all" { TARGETS.to_vec() } else { vec![target] };
    let mut results = Vec::new();
    for t in &targets {
        results.extend(suite(t, cfg, nmax, seed)?);
    }
    let failing: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{}.{}", r.suite, r.property))
        .collect();
    let mut env = Envelope::new("verify");
    env.input("target", target).input("seed", seed);
    env.output("passed", results.len() - failing.len()).output("failed", failing.len());
    env.diagnostic("properties", &results).diagnostic("failing", &failing);
    if !failing.is_empty() {
        env.status = "error:verification".into();
    }
    Ok(Report::Document(env, Format::Object))
}
