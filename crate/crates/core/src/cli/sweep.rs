use std::fmt::Write as _;

use super::commands::canonical_model;
use super::envelope::{Envelope, Failure};
use super::{Format, ModelArgs, Report};
use crate::canonical::CanonicalModel;

pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    Massieu,
    U,
    UNorm,
    Entropy,
    Residual,
    Metric,
    MinEig,
}

impl Quantity {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "massieu" | "phi" => Quantity::Massieu,
            "u" => Quantity::U,
            "unorm" => Quantity::UNorm,
            "entropy" => Quantity::Entropy,
            "residual" => Quantity::Residual,
            "metric" => Quantity::Metric,
            "mineig" => Quantity::MinEig,
            _ => return None,
        })
    }

    fn columns(&self, n: usize) -> Vec<String> {
        match self {
            Quantity::Massieu => vec!["massieu".into()],
            Quantity::U => (1..=n).map(|i| format!("u{i}")).collect(),
            Quantity::UNorm => vec!["unorm".into()],
            Quantity::Entropy => vec!["entropy".into()],
            Quantity::Residual => vec!["residual".into()],
            Quantity::Metric => (1..=n)
                .flat_map(|i| (1..=n).map(move |j| format!("g{i}{j}")))
                .collect(),
            Quantity::MinEig => vec!["mineig".into()],
        }
    }
}

/// Values of one grid axis.
fn axis_values(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("'{s}': {e}"));
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                return Err(format!("axis '{spec}' needs start <= stop and step > 0"));
            }
            let count = ((stop - start) / step + 1e-9).floor() + 1.0;
            if count > MAX_POINTS as f64 {
                return Err(format!("axis '{spec}' has more than {MAX_POINTS} points"));
            }
            Ok((0..count as usize).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(format!("axis '{spec}' is neither a value nor start:stop:step")),
    }
}

/// Parses "theta1=a:b:h;theta3=v" into one value list per component.
fn parse_grid(spec: &str, base: &[f64]) -> Result<Vec<Vec<f64>>, String> {
    let mut axes: Vec<Vec<f64>> = base.iter().map(|&v| vec![v]).collect();
    let mut seen = vec![false; base.len()];
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, values) = part
            .split_once('=')
            .ok_or_else(|| format!("grid axis '{part}' lacks '='"))?;
        let name = name.trim();
        let index: usize = name
            .strip_prefix("theta")
            .unwrap_or(name)
            .parse()
            .map_err(|_| format!("unknown grid axis '{name}'"))?;
        if index == 0 || index > base.len() {
            return Err(format!("grid axis '{name}' out of range 1..={}", base.len()));
        }
        if seen[index - 1] {
            return Err(format!("grid axis '{name}' given twice"));
        }
        seen[index - 1] = true;
        axes[index - 1] = axis_values(values)?;
    }
    let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len()));
    match total {
        Some(t) if t <= MAX_POINTS => Ok(axes),
        _ => Err(format!("grid exceeds {MAX_POINTS} points")),
    }
}

fn evaluate(m: &CanonicalModel, theta: &[f64], qs: &[Quantity]) -> crate::Result<Vec<f64>> {
    let mut row = Vec::new();
    let needs_u = qs.iter().any(|q| matches!(q, Quantity::U | Quantity::UNorm | Quantity::Entropy | Quantity::Residual));
    let phi = m.massieu(theta)?;
    let u = if needs_u { Some(m.theta_to_u(theta)?) } else { None };
    let entropy = match &u {
        Some(u) => Some(m.entropy_u(u)?),
        None => None,
    };
    let metric = if qs.iter().any(|q| matches!(q, Quantity::Metric | Quantity::MinEig)) {
        Some(m.metric(theta)?)
    } else {
        None
    };
    for q in qs {
        match q {
            Quantity::Massieu => row.push(phi),
            Quantity::U => row.extend(u.as_ref().unwrap().iter()),
            Quantity::UNorm => row.push(u.as_ref().unwrap().iter().map(|v| v * v).sum::<f64>().sqrt()),
            Quantity::Entropy => row.push(entropy.unwrap()),
            Quantity::Residual => {
                let u = u.as_ref().unwrap();
                let dot: f64 = theta.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
                row.push((phi - entropy.unwrap() + dot).abs());
            }
            Quantity::Metric => row.extend(metric.as_ref().unwrap().matrix.iter()),
            Quantity::MinEig => row.push(metric.as_ref().unwrap().min_eigenvalue),
        }
    }
    Ok(row)
}

pub(super) fn command(
    args: &ModelArgs,
    grid: &str,
    quantities: &str,
    base: Option<&[f64]>,
) -> Result<Report, Failure> {
    let (_, m) = canonical_model(args)?;
    let n = m.dim();
    let qs: Vec<Quantity> = quantities
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Quantity::parse(s).ok_or_else(|| Failure::Usage(format!("unknown quantity '{s}'"))))
        .collect::<Result<_, _>>()?;
    if qs.is_empty() {
        return Err(Failure::Usage("sweep needs at least one quantity".into()));
    }
    let base = match base {
        Some(b) => {
            crate::error::check_len(n, b.len())?;
            b.to_vec()
        }
        None => vec![0.0; n],
    };
    let axes = parse_grid(grid, &base).map_err(Failure::Usage)?;

    let mut header: Vec<String> = (1..=n).map(|i| format!("theta{i}")).collect();
    header.extend(qs.iter().flat_map(|q| q.columns(n)));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    // Odometer over the axes, last axis fastest.
    let mut idx = vec![0usize; n];
    loop {
        let theta: Vec<f64> = idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
        let mut row = theta.clone();
        row.extend(evaluate(&m, &theta, &qs).map_err(|e| {
            Failure::Numeric(match e {
                crate::Error::EvaluationDomain { .. } => crate::Error::EvaluationDomain { point: theta.clone() },
                other => other,
            })
        })?);
        rows.push(row);
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(finish(args.format, &m, grid, header, rows));
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn finish(format: Format, m: &CanonicalModel, grid: &str, header: Vec<String>, rows: Vec<Vec<f64>>) -> Report {
    match format {
        Format::Csv => {
            let mut text = header.join(",");
            text.push('\n');
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
                let _ = writeln!(text, "{}", cells.join(","));
            }
            Report::Csv(text)
        }
        Format::Object => {
            let mut env = Envelope::new("sweep");
            env.input("model", m.name()).input("grid", grid);
            env.output("columns", &header).output("rows", &rows);
            env.diagnostic("points", rows.len());
            Report::Document(env, Format::Object)
        }
    }
}
