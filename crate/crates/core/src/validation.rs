//! The acceptance suite: each criterion runs its experiment at the stated
//! trial count and tolerance and reports a verdict with the measured numbers.

use std::fmt;
use std::time::Instant;

use crate::analytics::{
    brickwall_fidelity_perturbative, error_factor_exact_fc, f4_polynomial, f_approx, f_exact, harmonic,
    qv_contour, qv_threshold, solvable_fidelity, threshold_omission, NU,
};
use crate::circuit::{run_brickwall_trial, run_heavy_output_trial, run_trial, CircuitConfig, Model};
use crate::error::{Error, Result};
use crate::experiments::{analytic_prediction, estimate, heavy_output_points, fit_scatter, run_sweep, Axis, SweepSpec};
use crate::linalg::{gue, hermitian_eigenvalues};
use crate::permutation::Permutation;
use crate::rng::Seed;
use crate::routing::{
    error_factor_mc, sigma_from_omission, Architecture, NoiseParams, SwapChannel,
};
use crate::stats::{self, slope_through_origin, Estimate};

pub const CRITERIA: [&str; 12] = [
    "fidelity vs depth, faulty gates",
    "gate-noise decay exponent",
    "solvable vs original model",
    "full connectivity, omitted swaps",
    "line, omitted swaps",
    "GUE(4) form factor",
    "routing statistics",
    "error factor at L=2",
    "brick-wall perturbative sum",
    "pulse vs omission channel",
    "heavy output vs fidelity",
    "quantum volume contour",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2}. {}: {}", self.id, self.title, self.detail)
    }
}

/// Trial counts relative to the stated ones. `1.0` is the acceptance run;
/// smaller values give quick smoke runs whose verdicts carry less weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub scale: f64,
    pub seed: Seed,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            scale: 1.0,
            seed: Seed::new(20_240_601),
        }
    }
}

impl Budget {
    fn trials(&self, n: usize) -> usize {
        ((n as f64 * self.scale).ceil() as usize).max(10)
    }

    fn seed(&self, id: usize) -> Seed {
        self.seed.derive(id as u64)
    }
}

pub fn run_criterion(id: usize, budget: &Budget) -> Result<Outcome> {
    let (passed, detail) = match id {
        1 => depth_sweep(budget)?,
        2 => gate_exponent(budget)?,
        3 => solvable_vs_original(budget)?,
        4 => fc_omission(budget)?,
        5 => line_omission(budget)?,
        6 => form_factor(budget)?,
        7 => routing(budget)?,
        8 => small_error_factor(budget)?,
        9 => brickwall(budget)?,
        10 => pulse_channel(budget)?,
        11 => heavy_output(budget)?,
        12 => contour(budget)?,
        _ => return Err(Error::Parameter(format!("no criterion {id}"))),
    };
    Ok(Outcome {
        id,
        title: CRITERIA[id - 1],
        passed,
        detail,
    })
}

/// Every criterion in order; an experiment that errors counts as failed.
pub fn run_all(budget: &Budget) -> Vec<Outcome> {
    (1..=CRITERIA.len())
        .map(|id| {
            run_criterion(id, budget).unwrap_or_else(|e| Outcome {
                id,
                title: CRITERIA[id - 1],
                passed: false,
                detail: format!("error: {e}"),
            })
        })
        .collect()
}

fn fc(l: usize, t: usize, alpha: f64, p: f64) -> Result<CircuitConfig> {
    CircuitConfig::new(l, t, Architecture::FullyConnected, alpha, p)
}

fn normalized_exponent(f: f64, l: usize) -> f64 {
    let floor = 0.5f64.powi(l as i32);
    -((f - floor) / (1.0 - floor)).ln()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Largest allowed number of `|z| > 3` points among `n`.
fn outlier_allowance(n: usize) -> usize {
    n / 100
}

fn depth_sweep(b: &Budget) -> Result<(bool, String)> {
    let start = Instant::now();
    let mut n = 0;
    let mut outliers = 0;
    let mut worst: f64 = 0.0;
    for (i, &(l, alpha)) in [(4, 0.07), (4, 0.1), (8, 0.07), (8, 0.1)].iter().enumerate() {
        let spec = SweepSpec {
            template: fc(l, 12, alpha, 0.0)?,
            axis: Axis::T,
            values: (1..=12).map(f64::from).collect(),
            trials: b.trials(2000),
            seed: b.seed(1).derive(i as u64),
        };
        for row in run_sweep(&spec)? {
            n += 1;
            worst = worst.max(row.zscore.abs());
            if row.zscore.abs() > 3.0 {
                outliers += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = outliers <= outlier_allowance(n) && secs < 300.0;
    Ok((passed, format!("{outliers}/{n} points beyond 3 se, max |z| {worst:.1}, {secs:.1} s")))
}

fn gate_exponent(b: &Budget) -> Result<(bool, String)> {
    let (l, t) = (8, 8);
    let alphas = [0.02, 0.04, 0.06, 0.08, 0.1];
    let spec = SweepSpec {
        template: fc(l, t, alphas[0], 0.0)?,
        axis: Axis::Alpha,
        values: alphas.to_vec(),
        trials: b.trials(2000),
        seed: b.seed(2),
    };
    let rows = run_sweep(&spec)?;
    let x: Vec<f64> = alphas.iter().map(|a| a * a * (l * t) as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| normalized_exponent(r.mc_mean, l)).collect();
    let slope = slope_through_origin(&x, &y)?;
    let err = rel(slope, NU);
    Ok((err <= 0.1, format!("fitted rate {slope:.4} vs {NU}, off by {:.1}%", 100.0 * err)))
}

fn solvable_vs_original(b: &Budget) -> Result<(bool, String)> {
    let base = fc(8, 8, 0.07, 0.005)?;
    let n = b.trials(2000);
    let orig = estimate(|s| Ok(run_trial(&base, s)?.fidelity), n, b.seed(3).derive(0))?;
    let solv_cfg = base.with_model(Model::Solvable);
    let solv = estimate(|s| Ok(run_trial(&solv_cfg, s)?.fidelity), n, b.seed(3).derive(1))?;
    let z = (orig.mean - solv.mean) / orig.stderr.hypot(solv.stderr);
    Ok((
        z.abs() <= 3.0,
        format!(
            "original {:.5} +- {:.5}, solvable {:.5} +- {:.5}, z {z:.2}",
            orig.mean, orig.stderr, solv.mean, solv.stderr
        ),
    ))
}

fn fc_omission(b: &Budget) -> Result<(bool, String)> {
    let ps = [0.01, 0.02, 0.03, 0.04, 0.05];
    let mut worst: f64 = 0.0;
    let mut n = 0;
    let mut bad = 0;
    for (i, &l) in [4usize, 6, 8].iter().enumerate() {
        let spec = SweepSpec {
            template: fc(l, l, 0.0, ps[0])?,
            axis: Axis::P,
            values: ps.to_vec(),
            trials: b.trials(5000),
            seed: b.seed(4).derive(i as u64),
        };
        for row in run_sweep(&spec)? {
            n += 1;
            worst = worst.max(row.zscore.abs());
            if row.zscore.abs() > 3.0 {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("{bad}/{n} points beyond 3 se, max |z| {worst:.2}")))
}

fn line_omission(b: &Budget) -> Result<(bool, String)> {
    let (l, t) = (6, 6);
    let template = CircuitConfig::new(l, t, Architecture::Line, 0.0, 0.002)?;
    let small = [0.002, 0.004, 0.006, 0.008, 0.01];
    let rows = run_sweep(&SweepSpec {
        template: template.clone(),
        axis: Axis::P,
        values: small.to_vec(),
        trials: b.trials(20_000),
        seed: b.seed(5).derive(0),
    })?;
    let y: Vec<f64> = rows.iter().map(|r| normalized_exponent(r.mc_mean, l)).collect();
    let slope = slope_through_origin(&small, &y)?;
    let lf = l as f64;
    let expected = 3.0 / 16.0 * t as f64 * lf * lf * (1.0 - 1.0 / lf);
    let err = rel(slope, expected);
    let wide = [0.01, 0.02, 0.03, 0.04, 0.05];
    let rows = run_sweep(&SweepSpec {
        template,
        axis: Axis::P,
        values: wide.to_vec(),
        trials: b.trials(5000),
        seed: b.seed(5).derive(1),
    })?;
    let violations = rows
        .iter()
        .filter(|r| r.analytic - 3.0 * r.mc_stderr > r.mc_mean)
        .count();
    Ok((
        err <= 0.1 && violations == 0,
        format!(
            "rate per p {slope:.3} vs {expected:.3} ({:.1}% off); bound violated at {violations}/{} points",
            100.0 * err,
            rows.len()
        ),
    ))
}

fn form_factor(b: &Budget) -> Result<(bool, String)> {
    let alphas: Vec<f64> = (0..20).map(|k| 2.0 * k as f64 / 19.0).collect();
    let n = b.trials(100_000);
    let spectra: Vec<Vec<f64>> = stats::run_trials(n, b.seed(6), |s| {
        let h = gue(4, &mut s.rng())?;
        Ok::<_, Error>(hermitian_eigenvalues(&h))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut worst_z: f64 = 0.0;
    let mut worst_poly: f64 = 0.0;
    for &a in &alphas {
        let samples: Vec<f64> = spectra
            .iter()
            .map(|ev| {
                let (mut re, mut im) = (0.0, 0.0);
                for &x in ev {
                    re += (a * x).cos();
                    im += (a * x).sin();
                }
                (re * re + im * im - 4.0) / 12.0
            })
            .collect();
        let est = Estimate::from_samples(&samples, b.seed(6))?;
        let exact = f_exact(4, a)?;
        worst_z = worst_z.max(est.zscore(exact).abs());
        worst_poly = worst_poly.max((exact - f4_polynomial(a)).abs());
    }
    let worst_approx = (0..=30)
        .map(|k| {
            let a = 0.01 * k as f64;
            Ok((f_exact(4, a)? - f_approx(4, a)).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((
        worst_z <= 5.0 && worst_poly <= 1e-10 && worst_approx < 0.01,
        format!(
            "max |z| {worst_z:.2} over 20 points, polynomial gap {worst_poly:.1e}, max |f - exp(-5 a^2)| on [0, 0.3] {worst_approx:.4}"
        ),
    ))
}

struct Sorted {
    ok: usize,
    max_layers: usize,
    max_swaps: usize,
}

fn sort_samples(arch: &Architecture, n: usize, samples: usize, seed: Seed) -> Result<Sorted> {
    let runs: Vec<(bool, usize, usize)> = stats::run_trials(samples, seed, |s| {
        let p = Permutation::random(n, &mut s.rng())?;
        let sched = arch.decompose(&p)?;
        let ok = sched.is_legal(arch) && sched.compose() == p;
        Ok::<_, Error>((ok, sched.depth(), sched.num_swaps()))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(Sorted {
        ok: runs.iter().filter(|r| r.0).count(),
        max_layers: runs.iter().map(|r| r.1).max().unwrap_or(0),
        max_swaps: runs.iter().map(|r| r.2).max().unwrap_or(0),
    })
}

fn swap_counts(arch: &Architecture, n: usize, samples: usize, seed: Seed) -> Result<(f64, f64)> {
    let counts: Vec<f64> = stats::run_trials(samples, seed, |s| {
        Ok::<_, Error>(arch.decompose(&Permutation::random(n, &mut s.rng())?)?.num_swaps() as f64)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(stats::mean_var(&counts))
}

fn routing(b: &Budget) -> Result<(bool, String)> {
    let n = 8;
    let lf = n as f64;
    let samples = b.trials(100_000);
    let (line_mean, line_var) = swap_counts(&Architecture::Line, n, samples, b.seed(7).derive(0))?;
    let line_mean_ref = lf * (lf - 1.0) / 4.0;
    let line_var_ref = (2.0 * lf.powi(3) + 3.0 * lf * lf - 5.0 * lf) / 72.0;
    let (fc_mean, _) = swap_counts(&Architecture::FullyConnected, n, samples, b.seed(7).derive(1))?;
    let fc_ref = lf - harmonic(n);
    let mut passed =
        rel(line_mean, line_mean_ref) <= 0.01 && rel(line_var, line_var_ref) <= 0.05 && rel(fc_mean, fc_ref) <= 0.01;
    let mut detail = format!(
        "line mean {line_mean:.3} (ref {line_mean_ref:.3}), var {line_var:.3} (ref {line_var_ref:.3}); fc mean {fc_mean:.4} (ref {fc_ref:.4})"
    );
    for (i, &(d, side)) in [(2usize, 4usize), (2, 8), (3, 3)].iter().enumerate() {
        let arch = Architecture::grid(d, side)?;
        let size = side.pow(d as u32);
        let grid_samples = b.trials(1000);
        let r = sort_samples(&arch, size, grid_samples, b.seed(7).derive(2 + i as u64))?;
        let layer_bound = (2 * d - 1) * side;
        let swap_bound = (d as f64 - 0.5) * (size as f64).powf(1.0 + 1.0 / d as f64);
        passed &= r.ok == grid_samples && r.max_layers <= layer_bound && (r.max_swaps as f64) < swap_bound;
        detail.push_str(&format!(
            "; {arch}: {}/{grid_samples} sorted, layers <= {} (bound {layer_bound}), swaps <= {} (bound {swap_bound:.1})",
            r.ok, r.max_layers, r.max_swaps
        ));
    }
    Ok((passed, detail))
}

/// `delta(p)` by summing over every permutation of `n` points and every
/// omission pattern of its schedule.
fn enumerate_error_factor(n: usize, p: f64) -> Result<f64> {
    let mut perms = vec![Vec::new()];
    for k in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                (0..=k).map(move |pos| {
                    let mut w = v.clone();
                    w.insert(pos, k);
                    w
                })
            })
            .collect();
    }
    let arch = Architecture::FullyConnected;
    let mut total = 0.0;
    for image in &perms {
        let perm = Permutation::new(image.clone())?;
        let sched = arch.decompose(&perm)?;
        let m = sched.num_swaps();
        for mask in 0..(1u64 << m) {
            let keep: Vec<bool> = (0..m).map(|j| mask >> j & 1 == 1).collect();
            let omitted = keep.iter().filter(|k| !**k).count() as i32;
            let weight = p.powi(omitted) * (1.0 - p).powi(m as i32 - omitted);
            let faulty = sched.compose_masked(&keep)?;
            let cycles = faulty.then(&perm.inverse())?.cycle_count();
            total += weight * 4f64.powi(cycles as i32);
        }
    }
    Ok(total / perms.len() as f64)
}

fn small_error_factor(b: &Budget) -> Result<(bool, String)> {
    let mut passed = true;
    let mut parts = Vec::new();
    for (i, &p) in [0.0, 0.1, 0.3].iter().enumerate() {
        let enumerated = enumerate_error_factor(2, p)?;
        let closed = 16.0 - 6.0 * p;
        let exact = error_factor_exact_fc(2, p)?;
        let mc = error_factor_mc(2, &Architecture::FullyConnected, p, b.trials(100_000), b.seed(8).derive(i as u64))?;
        let z = mc.zscore(exact);
        passed &= (enumerated - closed).abs() <= 1e-12 && (exact - enumerated).abs() <= 1e-12 && z.abs() <= 3.0;
        parts.push(format!(
            "p={p}: enum {enumerated:.12}, exact {exact:.12}, mc {:.4} (z {z:.2})",
            mc.mean
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn brickwall(b: &Budget) -> Result<(bool, String)> {
    let (l, alpha) = (8, 0.05);
    let mut passed = true;
    let mut parts = Vec::new();
    for (i, &t) in [8usize, 16].iter().enumerate() {
        let est = estimate(|s| Ok(run_brickwall_trial(l, t, alpha, s)?.fidelity), b.trials(10_000), b.seed(9).derive(i as u64))?;
        let pert = brickwall_fidelity_perturbative(l, t, alpha);
        let gap = (est.mean - pert).abs();
        let tol = (3.0 * est.stderr).max(5.0 * alpha.powi(4) * (l * t) as f64);
        passed &= gap <= tol;
        parts.push(format!(
            "T={t}: 1-F mc {:.5} +- {:.5} vs sum {:.5} (gap {gap:.5}, tol {tol:.5})",
            1.0 - est.mean,
            est.stderr,
            1.0 - pert
        ));
    }
    let t = 16;
    let per_a2 = (1.0 - brickwall_fidelity_perturbative(l, t, alpha)) / (alpha * alpha);
    let asymptote = NU * (l * t) as f64;
    let err = rel(per_a2, asymptote);
    passed &= err <= 0.05;
    parts.push(format!("sum deficit per a^2 at T=16 {per_a2:.2} vs {asymptote:.1} ({:.1}% off)", 100.0 * err));
    Ok((passed, parts.join("; ")))
}

fn pulse_channel(b: &Budget) -> Result<(bool, String)> {
    let p = 0.02;
    let sigma = sigma_from_omission(p)?;
    let n = b.trials(5000);
    let omission = CircuitConfig::new(4, 4, Architecture::Line, 0.0, p)?;
    let pulse = omission
        .clone()
        .with_noise(NoiseParams::from_sigma(0.0, sigma, SwapChannel::Pulse)?);
    let a = estimate(|s| Ok(run_trial(&omission, s)?.fidelity), n, b.seed(10).derive(0))?;
    let c = estimate(|s| Ok(run_trial(&pulse, s)?.fidelity), n, b.seed(10).derive(1))?;
    let z = (a.mean - c.mean) / a.stderr.hypot(c.stderr);
    Ok((
        z.abs() <= 3.0,
        format!(
            "sigma {sigma:.5}: omission {:.5} +- {:.5}, pulse {:.5} +- {:.5}, z {z:.2}",
            a.mean, a.stderr, c.mean, c.stderr
        ),
    ))
}

/// (alpha, p) pairs of the heavy-output experiment.
pub fn heavy_output_grid(arch: &Architecture) -> Vec<(f64, f64)> {
    let mut pairs = vec![(0.008, 0.0048), (0.04, 0.008), (0.08, 0.008)];
    if matches!(arch, Architecture::FullyConnected) {
        for a in [0.001, 0.002, 0.003, 0.0045] {
            for c in [2.0, 5.0, 7.0, 10.0, 20.0, 30.0] {
                pairs.push((a, c * a));
            }
        }
    } else {
        pairs.extend([(0.001, 0.002), (0.002, 0.0012), (0.003, 0.0006), (0.003, 0.006), (0.0045, 0.00045)]);
    }
    pairs
}

/// Omission probabilities `n 10^-j`, `p <= 0.2`, used at `alpha = 0`.
pub fn heavy_output_p_grid() -> Vec<f64> {
    let mut ps: Vec<f64> = (1..=3)
        .flat_map(|j| (1..=9).map(move |n| n as f64 * 10f64.powi(-j)))
        .filter(|p| *p <= 0.2 + 1e-12)
        .collect();
    ps.sort_by(f64::total_cmp);
    ps
}

fn heavy_output(b: &Budget) -> Result<(bool, String)> {
    let l = 10;
    let target = (1.0 + std::f64::consts::LN_2) / 2.0;
    let noiseless = fc(l, l, 0.0, 0.0)?;
    let h = estimate(
        |s| Ok(run_heavy_output_trial(&noiseless, s)?.heavy.expect("heavy output").0),
        b.trials(2000),
        b.seed(11).derive(0),
    )?;
    let mut passed = (h.mean - target).abs() <= 0.02;
    let mut parts = vec![format!("h_ideal {:.4} +- {:.4} vs {target:.4}", h.mean, h.stderr)];
    for (i, arch) in [Architecture::FullyConnected, Architecture::Line].into_iter().enumerate() {
        let mut pairs = heavy_output_grid(&arch);
        pairs.extend(heavy_output_p_grid().into_iter().map(|p| (0.0, p)));
        let configs = pairs
            .iter()
            .map(|&(a, p)| CircuitConfig::new(l, 20, arch.clone(), a, p))
            .collect::<Result<Vec<_>>>()?;
        let points = heavy_output_points(&configs, &[12, 16, 20], b.trials(2000), b.seed(11).derive(1 + i as u64))?;
        let n = points.len();
        let res = fit_scatter(points)?;
        passed &= res.fit.r_squared >= 0.98 && res.map_rms <= 0.02;
        parts.push(format!(
            "{arch}: {n} points, r^2 {:.4}, map rms {:.4}",
            res.fit.r_squared, res.map_rms
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn contour(_b: &Budget) -> Result<(bool, String)> {
    let (l, t) = (4, 4);
    let h = (1.0 + std::f64::consts::LN_2) / 2.0;
    let threshold = qv_threshold(l, Some(h))?;
    let mut passed = (threshold - 0.479).abs() <= 0.005;
    let grid: Vec<f64> = (0..=100).map(|k| 0.002 * k as f64).collect();
    let fc_contour = qv_contour(l, t, &Architecture::FullyConnected, &grid, Some(h))?;
    let line_contour = qv_contour(l, t, &Architecture::Line, &grid, Some(h))?;
    let alpha_end = fc_contour[0].alpha;
    let end_gap_alpha = (solvable_fidelity(l, t, alpha_end, 4f64.powi(l as i32))? - threshold).abs();
    let p_fc = threshold_omission(l, t, &Architecture::FullyConnected, Some(h))?;
    let p_line = threshold_omission(l, t, &Architecture::Line, Some(h))?;
    let end_cfg = fc(l, t, 0.0, p_fc)?;
    let end_gap_p = (analytic_prediction(&end_cfg)? - threshold).abs();
    passed &= end_gap_alpha <= 1e-5 && end_gap_p <= 1e-5;
    let mut inside = p_line <= p_fc;
    for (a, c) in fc_contour.iter().zip(&line_contour) {
        if !a.boundary && !c.boundary {
            inside &= c.alpha <= a.alpha + 1e-9;
        }
    }
    let mono = fc_contour.windows(2).all(|w| w[1].alpha <= w[0].alpha + 1e-9);
    passed &= inside && mono;
    Ok((
        passed,
        format!(
            "threshold {threshold:.4} vs 0.479; alpha* {alpha_end:.5}, p* fc {p_fc:.5}, p* line {p_line:.5}; line inside fc: {inside}"
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_gives_closed_form() {
        for p in [0.0, 0.1, 0.3] {
            assert!((enumerate_error_factor(2, p).unwrap() - (16.0 - 6.0 * p)).abs() < 1e-12);
        }
        for p in [0.0, 0.05, 0.2] {
            let e = enumerate_error_factor(4, p).unwrap();
            assert!((e - error_factor_exact_fc(4, p).unwrap()).abs() < 1e-9 * e);
        }
    }

    #[test]
    fn p_grid_has_twenty_values() {
        let g = heavy_output_p_grid();
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.001);
        assert!((g[19] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(heavy_output_grid(&Architecture::FullyConnected).len(), 27);
        assert_eq!(heavy_output_grid(&Architecture::Line).len(), 8);
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(13, &Budget::default()).is_err());
    }
}
