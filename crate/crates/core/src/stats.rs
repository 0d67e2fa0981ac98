//! Sample statistics shared by the Monte Carlo drivers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Seed;

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub stderr: f64,
    pub n: usize,
    pub seed: Seed,
}

impl Estimate {
    /// Summarizes samples in the given order. Needs at least two samples.
    pub fn from_samples(samples: &[f64], seed: Seed) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::Parameter(format!(
                "a standard error needs at least 2 samples, got {n}"
            )));
        }
        let (mean, var) = mean_var(samples);
        Ok(Estimate {
            mean,
            stderr: (var / n as f64).sqrt(),
            n,
            seed,
        })
    }

    /// `(value - mean) / stderr`, with a zero standard error treated as exact.
    pub fn zscore(&self, value: f64) -> f64 {
        z(value - self.mean, self.stderr)
    }

    /// Two estimates agree within `k` combined standard errors.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        let se = (self.stderr.powi(2) + other.stderr.powi(2)).sqrt();
        (self.mean - other.mean).abs() <= k * se
    }
}

/// Runs `trial` on the children `seed.derive(0..n)` in parallel and returns
/// the results in trial-index order.
pub fn run_trials<T, F>(n: usize, seed: Seed, trial: F) -> Vec<T>
where
    T: Send,
    F: Fn(Seed) -> T + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| trial(seed.derive(i)))
        .collect()
}

fn z(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff.abs() < 1e-12 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Mean and unbiased variance, accumulated in slice order.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Welch t statistic of two samples.
pub fn welch_t(a: &[f64], b: &[f64]) -> f64 {
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    z(ma - mb, (va / a.len() as f64 + vb / b.len() as f64).sqrt())
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Two-sample KS critical value at significance `level` (asymptotic form).
pub fn ks_critical(n: usize, m: usize, level: f64) -> f64 {
    let c = (-0.5 * (level / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n * m) as f64).sqrt()
}

/// Ordinary least squares fit `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("{} x values and {} y values", x.len(), y.len())));
    }
    let (mx, vx) = mean_var(x);
    let (my, vy) = mean_var(y);
    if x.len() < 2 || !(vx > 0.0) {
        return Err(Error::Fit("fewer than two distinct abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx = vx * (x.len() as f64 - 1.0);
    let syy = vy * (y.len() as f64 - 1.0);
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(FitResult {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Least-squares slope of a line through the origin.
pub fn slope_through_origin(x: &[f64], y: &[f64]) -> Result<f64> {
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    if x.len() != y.len() || !(sxx > 0.0) {
        return Err(Error::Fit("degenerate data for a fit through the origin".into()));
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx)
}
