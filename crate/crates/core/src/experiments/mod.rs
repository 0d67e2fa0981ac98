//! Monte Carlo drivers: estimators, parameter sweeps against the closed
//! forms, and the heavy-output versus fidelity experiment.

mod table;

use serde::{Deserialize, Serialize};

use crate::analytics::{
    brickwall_fidelity_perturbative, delta_for_arch, fidelity_from_heavy_output, solvable_fidelity,
};
use crate::circuit::{fidelity_trajectory, heavy_at_depths, run_trial, CircuitConfig, Model};
use crate::error::{Error, Result};
use crate::rng::Seed;
use crate::routing::RoutingStats;
use crate::stats::{self, linear_fit, mean_var, FitResult};

pub use crate::stats::Estimate;
pub use table::{format_float, read_results, write_results, Format, Record, Table, Value};

/// Runs `trial` on `n` seeds derived from `seed` by trial index.
pub fn estimate<F>(trial: F, n: usize, seed: Seed) -> Result<Estimate>
where
    F: Fn(Seed) -> Result<f64> + Sync,
{
    if n < 2 {
        return Err(Error::Parameter(format!("an estimate needs n >= 2 trials, got {n}")));
    }
    let samples: Result<Vec<f64>> = stats::run_trials(n, seed, trial).into_iter().collect();
    Estimate::from_samples(&samples?, seed)
}

/// Closed-form counterpart of a circuit configuration: the solvable-model
/// formula with the architecture's error factor, or the perturbative sum
/// for brick-wall circuits.
pub fn analytic_prediction(config: &CircuitConfig) -> Result<f64> {
    let (l, t, alpha, p) = (config.l, config.t, config.noise.alpha, config.noise.p);
    match config.model {
        Model::BrickWall => Ok(brickwall_fidelity_perturbative(l, t, alpha)),
        Model::Original | Model::Solvable => {
            let delta = if p == 0.0 {
                4f64.powi(l as i32)
            } else {
                delta_for_arch(&config.arch, l, p)?
            };
            solvable_fidelity(l, t, alpha, delta)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    T,
    Alpha,
    P,
    L,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub template: CircuitConfig,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub trials: usize,
    pub seed: Seed,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(Error::Parameter("a sweep needs >= 2 trials per point".into()));
        }
        if self.values.is_empty() {
            return Err(Error::Parameter("empty sweep axis".into()));
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter("sweep values must be strictly increasing".into()));
        }
        if matches!(self.axis, Axis::T | Axis::L)
            && self.values.iter().any(|v| v.fract() != 0.0 || *v < 1.0)
        {
            return Err(Error::Parameter("L and T values must be positive integers".into()));
        }
        for i in 0..self.values.len() {
            self.point(i)?.validate()?;
        }
        Ok(())
    }

    /// Configuration of the `i`-th axis point.
    pub fn point(&self, i: usize) -> Result<CircuitConfig> {
        let v = self.values[i];
        let mut c = self.template.clone();
        match self.axis {
            Axis::T => c.t = v as usize,
            Axis::L => c.l = v as usize,
            Axis::Alpha => c.noise.alpha = v,
            Axis::P => {
                c.noise.p = v;
                c.noise.sigma = None;
            }
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: String,
    pub arch: String,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub alpha: f64,
    pub p: f64,
    pub trials: usize,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub analytic: f64,
    /// `(analytic - mc_mean) / mc_stderr`.
    pub zscore: f64,
}

impl Record for SweepRow {
    fn header() -> Vec<&'static str> {
        vec!["model", "arch", "L", "T", "alpha", "p", "trials", "mc_mean", "mc_stderr", "analytic", "zscore"]
    }

    fn values(&self) -> Vec<Value> {
        vec![
            self.model.clone().into(),
            self.arch.clone().into(),
            self.l.into(),
            self.t.into(),
            self.alpha.into(),
            self.p.into(),
            self.trials.into(),
            self.mc_mean.into(),
            self.mc_stderr.into(),
            self.analytic.into(),
            self.zscore.into(),
        ]
    }
}

fn sweep_row(config: &CircuitConfig, est: &Estimate) -> Result<SweepRow> {
    let analytic = analytic_prediction(config)?;
    Ok(SweepRow {
        model: config.model.label().into(),
        arch: config.arch.to_string(),
        l: config.l,
        t: config.t,
        alpha: config.noise.alpha,
        p: config.noise.p,
        trials: est.n,
        mc_mean: est.mean,
        mc_stderr: est.stderr,
        analytic,
        zscore: est.zscore(analytic),
    })
}

/// Mean circuit fidelity after each layer `1..=T`, from `trials` full-depth
/// trajectories.
pub fn depth_profile(config: &CircuitConfig, trials: usize, seed: Seed) -> Result<Vec<Estimate>> {
    if trials < 2 {
        return Err(Error::Parameter("need >= 2 trials".into()));
    }
    let runs: Result<Vec<Vec<f64>>> = stats::run_trials(trials, seed, |s| fidelity_trajectory(config, s))
        .into_iter()
        .collect();
    let runs = runs?;
    (0..config.t)
        .map(|tau| {
            let col: Vec<f64> = runs.iter().map(|r| r[tau]).collect();
            Estimate::from_samples(&col, seed)
        })
        .collect()
}

/// One row per axis point. Every point reuses the trial seeds
/// `seed.derive(i)`; a `T` axis is measured on shared full-depth
/// trajectories, which yields the same numbers as separate runs.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if spec.axis == Axis::T {
        let max_t = *spec.values.last().unwrap() as usize;
        let deep = CircuitConfig {
            t: max_t,
            ..spec.template.clone()
        };
        let profile = depth_profile(&deep, spec.trials, spec.seed)?;
        return (0..spec.values.len())
            .map(|i| {
                let c = spec.point(i)?;
                sweep_row(&c, &profile[c.t - 1])
            })
            .collect();
    }
    (0..spec.values.len())
        .map(|i| {
            let c = spec.point(i)?;
            let est = estimate(|s| Ok(run_trial(&c, s)?.fidelity), spec.trials, spec.seed)?;
            sweep_row(&c, &est)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub arch: String,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub alpha: f64,
    pub p: f64,
    pub f_mean: f64,
    pub f_stderr: f64,
    /// Mean faulty heavy-output frequency.
    pub h_mean: f64,
    pub h_stderr: f64,
    /// Mean ideal heavy-output frequency.
    pub h_ideal: f64,
}

impl Record for ScatterPoint {
    fn header() -> Vec<&'static str> {
        vec!["arch", "L", "T", "alpha", "p", "f_mean", "f_stderr", "h_mean", "h_stderr"]
    }

    fn values(&self) -> Vec<Value> {
        vec![
            self.arch.clone().into(),
            self.l.into(),
            self.t.into(),
            self.alpha.into(),
            self.p.into(),
            self.f_mean.into(),
            self.f_stderr.into(),
            self.h_mean.into(),
            self.h_stderr.into(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterResult {
    pub points: Vec<ScatterPoint>,
    /// Least squares of `h_mean` on `f_mean`.
    pub fit: FitResult,
    /// RMS of `F(h_mean) - f_mean`, `F` the linear heavy-output map
    /// evaluated with each point's measured `h_ideal`.
    pub map_rms: f64,
}

fn point_from_samples(config: &CircuitConfig, f: &[f64], h: &[f64], hi: &[f64]) -> Result<ScatterPoint> {
    let fe = Estimate::from_samples(f, Seed::new(0))?;
    let he = Estimate::from_samples(h, Seed::new(0))?;
    Ok(ScatterPoint {
        arch: config.arch.to_string(),
        l: config.l,
        t: config.t,
        alpha: config.noise.alpha,
        p: config.noise.p,
        f_mean: fe.mean,
        f_stderr: fe.stderr,
        h_mean: he.mean,
        h_stderr: he.stderr,
        h_ideal: mean_var(hi).0,
    })
}

/// Mean fidelity and heavy-output points for each configuration at each of
/// the `depths`, measured on shared trajectories to the largest depth.
pub fn heavy_output_points(
    configs: &[CircuitConfig],
    depths: &[usize],
    trials: usize,
    seed: Seed,
) -> Result<Vec<ScatterPoint>> {
    let mut depths = depths.to_vec();
    depths.sort_unstable();
    depths.dedup();
    let max_t = *depths.last().ok_or_else(|| Error::Parameter("no depths given".into()))?;
    let mut out = Vec::new();
    for (ci, base) in configs.iter().enumerate() {
        let deep = CircuitConfig {
            t: max_t,
            ..base.clone()
        };
        let cseed = seed.derive(ci as u64);
        let runs: Result<Vec<_>> = stats::run_trials(trials, cseed, |s| heavy_at_depths(&deep, s, &depths))
            .into_iter()
            .collect();
        let runs = runs?;
        for (k, &t) in depths.iter().enumerate() {
            let f: Vec<f64> = runs.iter().map(|r| r[k].fidelity).collect();
            let h: Vec<f64> = runs.iter().map(|r| r[k].h_faulty).collect();
            let hi: Vec<f64> = runs.iter().map(|r| r[k].h_ideal).collect();
            out.push(point_from_samples(&CircuitConfig { t, ..base.clone() }, &f, &h, &hi)?);
        }
    }
    Ok(out)
}

/// Fits `h = slope F + intercept` through the points and evaluates the
/// residuals of the linear heavy-output map.
pub fn fit_scatter(points: Vec<ScatterPoint>) -> Result<ScatterResult> {
    let f: Vec<f64> = points.iter().map(|p| p.f_mean).collect();
    let h: Vec<f64> = points.iter().map(|p| p.h_mean).collect();
    let fit = linear_fit(&f, &h)?;
    let mut sq = 0.0;
    for p in &points {
        let mapped = fidelity_from_heavy_output(p.h_mean, p.h_ideal, p.l)?;
        sq += (mapped - p.f_mean).powi(2);
    }
    let map_rms = (sq / points.len() as f64).sqrt();
    Ok(ScatterResult { points, fit, map_rms })
}

/// One point per configuration, then the fit.
pub fn hu_vs_f_scatter(configs: &[CircuitConfig], trials: usize, seed: Seed) -> Result<ScatterResult> {
    let mut points = Vec::with_capacity(configs.len());
    for (ci, c) in configs.iter().enumerate() {
        points.extend(heavy_output_points(std::slice::from_ref(c), &[c.t], trials, seed.derive(ci as u64))?);
    }
    fit_scatter(points)
}

impl Record for RoutingStats {
    fn header() -> Vec<&'static str> {
        RoutingStats::HEADER.to_vec()
    }

    fn values(&self) -> Vec<Value> {
        vec![
            self.arch.clone().into(),
            self.len.into(),
            self.samples.into(),
            self.mean_swaps.into(),
            self.var_swaps.into(),
            self.mean_layers.into(),
            self.max_layers.into(),
        ]
    }
}

impl Record for crate::analytics::FidelityPrediction {
    fn header() -> Vec<&'static str> {
        Self::HEADER.to_vec()
    }

    fn values(&self) -> Vec<Value> {
        vec![
            self.l.into(),
            self.t.into(),
            self.alpha.into(),
            self.p.into(),
            self.arch.to_string().into(),
            self.provenance.label().into(),
            self.value.into(),
        ]
    }
}

impl Record for crate::analytics::ContourPoint {
    fn header() -> Vec<&'static str> {
        vec!["p", "alpha", "boundary"]
    }

    fn values(&self) -> Vec<Value> {
        vec![self.p.into(), self.alpha.into(), (self.boundary as usize).into()]
    }
}
