//! Straight-line regression as a data set model. Questions are the
//! least-squares slope and intercept, evaluated through centered moments.

use std::io::Read;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pairs: Vec<(f64, f64)>,
}

impl RegressionData {
    /// Needs two pairs with distinct `x`.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidParameter("data must be finite".into()));
        }
        match pairs.first() {
            Some(&(x0, _)) if pairs.iter().any(|&(x, _)| x != x0) => Ok(Self { pairs }),
            _ => Err(Error::DegenerateData("need at least two distinct x values")),
        }
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Two-column CSV; a non-numeric first row is taken as a header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut pairs = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
            if record.len() != 2 {
                return Err(Error::InvalidParameter(format!(
                    "csv row {} has {} columns, expected 2",
                    row + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(y)) => pairs.push((x, y)),
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "csv row {} is not numeric",
                        row + 1
                    )))
                }
            }
        }
        Self::new(pairs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineModel {
    pub a: f64,
    pub b: f64,
}

struct Moments {
    n: f64,
    mean_x: f64,
    mean_y: f64,
    suu: f64,
    svv: f64,
    suv: f64,
}

fn moments(data: &RegressionData) -> Moments {
    let p = &data.pairs;
    let n = p.len() as f64;
    let mean_x = p.iter().map(|v| v.0).sum::<f64>() / n;
    let mean_y = p.iter().map(|v| v.1).sum::<f64>() / n;
    let (mut suu, mut svv, mut suv) = (0.0, 0.0, 0.0);
    for &(x, y) in p {
        let (u, v) = (x - mean_x, y - mean_y);
        suu += u * u;
        svv += v * v;
        suv += u * v;
    }
    Moments {
        n,
        mean_x,
        mean_y,
        suu,
        svv,
        suv,
    }
}

/// `Z = Σ_{i,j}(x_i − x_j)² = 2n·Σ(x_i − x̄)²`.
pub fn regression_z(data: &RegressionData) -> f64 {
    let m = moments(data);
    2.0 * m.n * m.suu
}

/// `(q_a, q_b)`.
pub fn regression_questions(data: &RegressionData) -> Result<LineModel> {
    let m = moments(data);
    if !(m.suu > 0.0) {
        return Err(Error::DegenerateData("Z vanishes"));
    }
    let a = m.suv / m.suu;
    Ok(LineModel {
        a,
        b: m.mean_y - a * m.mean_x,
    })
}

/// `−(1/Z)Σ(x_iy_j − x_jy_i)² − (1/Z)Σ(y_i − y_j)²`.
pub fn regression_entropy(data: &RegressionData) -> Result<f64> {
    let m = moments(data);
    if !(m.suu > 0.0) {
        return Err(Error::DegenerateData("Z vanishes"));
    }
    // Σ_{i,j}(x_iy_j − x_jy_i)² / 2 = n·Σ(x̄v_i − ȳu_i)² + (SuuSvv − Suv²).
    let cross: f64 = data
        .pairs
        .iter()
        .map(|&(x, y)| {
            let (u, v) = (x - m.mean_x, y - m.mean_y);
            let t = m.mean_x * v - m.mean_y * u;
            t * t
        })
        .sum();
    let gram = (m.suu * m.svv - m.suv * m.suv).max(0.0);
    Ok(-(m.n * cross + gram + m.n * m.svv) / (m.n * m.suu))
}

pub fn regression_is_perfect(data: &RegressionData, tol: f64) -> Result<bool> {
    let line = regression_questions(data)?;
    Ok(data
        .pairs
        .iter()
        .all(|&(x, y)| (y - (line.a * x + line.b)).abs() <= tol))
}

/// Perfect data set `(x_i, a·x_i + b)`.
pub fn regression_embed(line: &LineModel, xs: &[f64]) -> Result<RegressionData> {
    RegressionData::new(xs.iter().map(|&x| (x, line.a * x + line.b)).collect())
}
