use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fitted line.
    pub rms_residual: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`. `None` with fewer than two
/// points or no spread in `x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let (xs, ys) = (&xs[..n], &ys[..n]);
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * n as f64 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Some(LinearFit {
        slope,
        intercept,
        rms_residual: (sse / n as f64).sqrt(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// `t ≈ C·n^e`; regress `ln t` on `ln n`.
    PolyInN,
    /// `t ≈ C·(log₂ n)^e`; regress `ln t` on `ln log₂ n`.
    PolyInLogN,
}

impl Model {
    fn x(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Model::PolyInN => n.ln(),
            Model::PolyInLogN => n.log2().ln(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub model: Model,
    pub exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    pub cap: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Fits `(size, time)` pairs in log-log space; passes iff the exponent is at
/// most `cap + slack`.
pub fn fit_runtime(measurements: &[(usize, f64)], model: Model, cap: f64, slack: f64) -> Result<FitResult> {
    if measurements.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "runtime fit needs at least 4 measurements, got {}",
            measurements.len()
        )));
    }
    if measurements.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InsufficientData("measurement sizes must be strictly increasing".into()));
    }
    if measurements[0].0 < 2 || measurements.iter().any(|&(_, t)| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InsufficientData("sizes must be at least 2 and times positive".into()));
    }
    let xs: Vec<f64> = measurements.iter().map(|&(n, _)| model.x(n)).collect();
    let ys: Vec<f64> = measurements.iter().map(|&(_, t)| t.ln()).collect();
    let fit = least_squares(&xs, &ys).ok_or_else(|| Error::InsufficientData("degenerate sizes".into()))?;
    Ok(FitResult {
        model,
        exponent: fit.slope,
        intercept: fit.intercept,
        residual: fit.rms_residual,
        cap,
        slack,
        pass: fit.slope <= cap + slack,
    })
}
