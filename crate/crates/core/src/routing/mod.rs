//! Architectures, swap schedules and faulty routing.
//!
//! A schedule is a list of layers of disjoint transpositions. A swap `(i, j)`
//! exchanges the contents of positions `i` and `j`; executing the layers in
//! order moves the content of position `k` to `P(k)`.

mod grid;
mod sort;

use std::fmt;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::permutation::Permutation;
use crate::rng::{Rng, Seed};
use crate::state::Statevector;
use crate::stats::{self, mean_var, Estimate};

pub use grid::{build_marking, check_marking, decompose_grid};

pub type Swap = (usize, usize);

/// Qubit connectivity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Architecture {
    FullyConnected,
    Line,
    /// Hypercubic lattice; position index `c0 + s0 (c1 + s1 (c2 + ...))`.
    Grid { sides: Vec<usize> },
}

impl Architecture {
    /// `d`-dimensional grid with equal sides.
    pub fn grid(d: usize, side: usize) -> Result<Self> {
        Self::grid_sides(vec![side; d])
    }

    pub fn grid_sides(sides: Vec<usize>) -> Result<Self> {
        if sides.is_empty() || sides.contains(&0) {
            return Err(Error::Parameter(format!("invalid grid sides {sides:?}")));
        }
        Ok(Architecture::Grid { sides })
    }

    /// Lattice dimension; fully connected reports 0.
    pub fn dimension(&self) -> usize {
        match self {
            Architecture::FullyConnected => 0,
            Architecture::Line => 1,
            Architecture::Grid { sides } => sides.len(),
        }
    }

    /// Checks that the architecture can host `n` qubits.
    pub fn check_size(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidSize("architecture with zero qubits".into()));
        }
        if let Architecture::Grid { sides } = self {
            let product: usize = sides.iter().product();
            if product != n {
                return Err(Error::Shape(format!(
                    "grid {sides:?} holds {product} qubits, not {n}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        match self {
            Architecture::FullyConnected => true,
            Architecture::Line => a.abs_diff(b) == 1,
            Architecture::Grid { sides } => {
                let (mut a, mut b) = (a, b);
                let mut differing = 0;
                for &s in sides {
                    let (ca, cb) = (a % s, b % s);
                    if ca != cb {
                        if ca.abs_diff(cb) != 1 {
                            return false;
                        }
                        differing += 1;
                    }
                    a /= s;
                    b /= s;
                }
                differing == 1 && a == b
            }
        }
    }

    /// Short name used in tables: `fc`, `line` or `grid`.
    pub fn label(&self) -> &'static str {
        match self {
            Architecture::FullyConnected => "fc",
            Architecture::Line => "line",
            Architecture::Grid { .. } => "grid",
        }
    }

    pub fn decompose(&self, p: &Permutation) -> Result<SwapSchedule> {
        match self {
            Architecture::FullyConnected => Ok(decompose_fully_connected(p)),
            Architecture::Line => Ok(decompose_line(p)),
            Architecture::Grid { .. } => decompose_grid(p, self),
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Architecture::Grid { sides } => {
                let s: Vec<String> = sides.iter().map(|x| x.to_string()).collect();
                write!(f, "grid[{}]", s.join("x"))
            }
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapSchedule {
    len: usize,
    layers: Vec<Vec<Swap>>,
}

impl SwapSchedule {
    pub fn new(len: usize, layers: Vec<Vec<Swap>>) -> Result<Self> {
        for layer in &layers {
            let mut used = vec![false; len];
            for &(a, b) in layer {
                if a >= len || b >= len || a == b {
                    return Err(Error::Index(format!("swap ({a}, {b}) on {len} positions")));
                }
                if used[a] || used[b] {
                    return Err(Error::Parameter(format!("layer {layer:?} is not disjoint")));
                }
                used[a] = true;
                used[b] = true;
            }
        }
        Ok(SwapSchedule { len, layers })
    }

    pub fn empty(len: usize) -> Self {
        SwapSchedule { len, layers: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[Vec<Swap>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn num_swaps(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn swaps(&self) -> impl Iterator<Item = Swap> + '_ {
        self.layers.iter().flatten().copied()
    }

    /// Every swap is an edge of `arch`.
    pub fn is_legal(&self, arch: &Architecture) -> bool {
        self.swaps().all(|(a, b)| arch.is_edge(a, b))
    }

    /// Permutation realized when executing the swaps for which `keep`
    /// returns true, in schedule order.
    pub fn compose_kept(&self, mut keep: impl FnMut() -> bool) -> Permutation {
        let mut occupant: Vec<usize> = (0..self.len).collect();
        for (a, b) in self.swaps() {
            if keep() {
                occupant.swap(a, b);
            }
        }
        let mut image = vec![0; self.len];
        for (pos, token) in occupant.into_iter().enumerate() {
            image[token] = pos;
        }
        Permutation::new(image).expect("swaps compose to a bijection")
    }

    pub fn compose(&self) -> Permutation {
        self.compose_kept(|| true)
    }

    /// Permutation realized with the given per-swap keep mask.
    pub fn compose_masked(&self, keep: &[bool]) -> Result<Permutation> {
        if keep.len() != self.num_swaps() {
            return Err(Error::Shape(format!(
                "{} mask entries for {} swaps",
                keep.len(),
                self.num_swaps()
            )));
        }
        let mut it = keep.iter();
        Ok(self.compose_kept(|| *it.next().unwrap()))
    }
}

/// Two layers: a `k`-cycle `c0 -> c1 -> ... ` first takes `c_i -> c_{-i}`,
/// then `c_i -> c_{1-i}`. Together `k - 1` swaps.
pub fn decompose_fully_connected(p: &Permutation) -> SwapSchedule {
    let mut first = Vec::new();
    let mut second = Vec::new();
    for cycle in p.cycles() {
        let k = cycle.len();
        if k < 2 {
            continue;
        }
        for i in 1..k.div_ceil(2) {
            first.push((cycle[i], cycle[k - i]));
        }
        second.push((cycle[0], cycle[1]));
        for i in 2..(k + 1) / 2 + 1 {
            if i < k + 1 - i {
                second.push((cycle[i], cycle[k + 1 - i]));
            }
        }
    }
    let layers = [first, second].into_iter().filter(|l| !l.is_empty()).collect();
    SwapSchedule {
        len: p.len(),
        layers,
    }
}

/// Odd-even transposition sort of the destinations `P(k)`.
pub fn decompose_line(p: &Permutation) -> SwapSchedule {
    let mut keys = p.image().to_vec();
    SwapSchedule {
        len: p.len(),
        layers: sort::odd_even_layers(&mut keys),
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Parameter(format!("omission probability {p} outside [0, 1/2]")));
    }
    Ok(())
}

/// Executes `schedule`, omitting each swap independently with probability `p`.
pub fn realize_faulty_with(schedule: &SwapSchedule, p: f64, rng: &mut Rng) -> Result<Permutation> {
    check_p(p)?;
    if p == 0.0 {
        return Ok(schedule.compose());
    }
    Ok(schedule.compose_kept(|| rng.random::<f64>() >= p))
}

pub fn realize_faulty(schedule: &SwapSchedule, p: f64, seed: Seed) -> Result<Permutation> {
    realize_faulty_with(schedule, p, &mut seed.rng())
}

/// Pulse exponents `beta ~ N(1, sigma^2)`, one per swap.
pub fn sample_betas(schedule: &SwapSchedule, sigma: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Parameter(format!("pulse width must be >= 0, got {sigma}")));
    }
    Ok((0..schedule.num_swaps())
        .map(|_| {
            if sigma == 0.0 {
                1.0
            } else {
                1.0 + sigma * rng.sample::<f64, _>(StandardNormal)
            }
        })
        .collect())
}

/// Applies each swap as `S^beta` with the supplied exponents.
pub fn apply_schedule_betas(state: &mut Statevector, schedule: &SwapSchedule, betas: &[f64]) -> Result<()> {
    if betas.len() != schedule.num_swaps() {
        return Err(Error::Shape(format!(
            "{} exponents for {} swaps",
            betas.len(),
            schedule.num_swaps()
        )));
    }
    if state.num_qubits() != schedule.len() {
        return Err(Error::Shape(format!(
            "schedule on {} positions applied to {} qubits",
            schedule.len(),
            state.num_qubits()
        )));
    }
    for ((a, b), &beta) in schedule.swaps().zip(betas) {
        if beta == 1.0 {
            state.swap_qubits(a, b)?;
        } else if beta != 0.0 {
            state.apply_two_qubit_gate(&ComplexMatrix::swap_power(beta), a, b)?;
        }
    }
    Ok(())
}

pub fn apply_faulty_schedule_beta_with(
    state: &mut Statevector,
    schedule: &SwapSchedule,
    sigma: f64,
    rng: &mut Rng,
) -> Result<()> {
    let betas = sample_betas(schedule, sigma, rng)?;
    apply_schedule_betas(state, schedule, &betas)
}

pub fn apply_faulty_schedule_beta(
    mut state: Statevector,
    schedule: &SwapSchedule,
    sigma: f64,
    seed: Seed,
) -> Result<Statevector> {
    apply_faulty_schedule_beta_with(&mut state, schedule, sigma, &mut seed.rng())?;
    Ok(state)
}

/// One sample of `4^m`, `m` the cycle count of `P~ P^-1`.
pub fn error_factor_sample(n: usize, arch: &Architecture, p: f64, rng: &mut Rng) -> Result<f64> {
    let perm = Permutation::random(n, rng)?;
    let schedule = arch.decompose(&perm)?;
    let faulty = realize_faulty_with(&schedule, p, rng)?;
    let m = perm.inverse().then(&faulty)?.cycle_count();
    Ok(4f64.powi(m as i32))
}

/// Monte Carlo estimate of the error factor `delta = <4^m>`.
pub fn error_factor_mc(n: usize, arch: &Architecture, p: f64, trials: usize, seed: Seed) -> Result<Estimate> {
    arch.check_size(n)?;
    check_p(p)?;
    let samples: Result<Vec<f64>> =
        stats::run_trials(trials, seed, |s| error_factor_sample(n, arch, p, &mut s.rng()))
            .into_iter()
            .collect();
    Estimate::from_samples(&samples?, seed)
}

/// Swap-omission and pulse-error parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// GUE gate-noise strength.
    pub alpha: f64,
    /// Swap-omission probability.
    pub p: f64,
    /// Pulse width, when the swap error is parameterized by it.
    pub sigma: Option<f64>,
    pub channel: SwapChannel,
}

/// How faulty swaps are modeled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwapChannel {
    /// Each swap omitted with probability `p`.
    #[default]
    Omission,
    /// Each swap applied as `S^beta`, `beta ~ N(1, sigma^2)`.
    Pulse,
}

/// `p = (1 - exp(-pi^2 sigma^2 / 2)) / 2`.
pub fn omission_from_sigma(sigma: f64) -> f64 {
    let x = std::f64::consts::PI * sigma;
    -0.5 * (-0.5 * x * x).exp_m1()
}

/// Inverse of [`omission_from_sigma`] on `[0, 1/2)`.
pub fn sigma_from_omission(p: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::Parameter(format!("no pulse width gives p = {p}")));
    }
    Ok((-2.0 * (-2.0 * p).ln_1p()).sqrt() / std::f64::consts::PI)
}

impl NoiseParams {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        let n = NoiseParams {
            alpha,
            p,
            sigma: None,
            channel: SwapChannel::Omission,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn noiseless() -> Self {
        NoiseParams {
            alpha: 0.0,
            p: 0.0,
            sigma: None,
            channel: SwapChannel::Omission,
        }
    }

    /// Pulse-width parameterization; `p` is derived from `sigma`.
    pub fn from_sigma(alpha: f64, sigma: f64, channel: SwapChannel) -> Result<Self> {
        let n = NoiseParams {
            alpha,
            p: omission_from_sigma(sigma),
            sigma: Some(sigma),
            channel,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::Parameter(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        check_p(self.p)?;
        match self.sigma {
            Some(s) => {
                if !(s >= 0.0) || !s.is_finite() {
                    return Err(Error::Parameter(format!("sigma must be >= 0, got {s}")));
                }
                let expect = omission_from_sigma(s);
                if (expect - self.p).abs() > 1e-12 {
                    return Err(Error::Parameter(format!(
                        "p = {} inconsistent with sigma = {s} (expected {expect})",
                        self.p
                    )));
                }
            }
            None if self.channel == SwapChannel::Pulse => {
                return Err(Error::Parameter("the pulse channel needs sigma".into()));
            }
            None => {}
        }
        Ok(())
    }
}

/// Swap and layer statistics of a decomposition over uniform permutations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingStats {
    pub arch: String,
    #[serde(rename = "L")]
    pub len: usize,
    pub samples: usize,
    pub mean_swaps: f64,
    /// Unbiased sample variance.
    pub var_swaps: f64,
    pub mean_layers: f64,
    pub max_layers: usize,
}

impl RoutingStats {
    pub const HEADER: [&'static str; 7] =
        ["arch", "L", "samples", "mean_swaps", "var_swaps", "mean_layers", "max_layers"];

    pub fn collect(n: usize, arch: &Architecture, samples: usize, seed: Seed) -> Result<Self> {
        arch.check_size(n)?;
        if samples < 2 {
            return Err(Error::Parameter("routing statistics need >= 2 samples".into()));
        }
        let counts: Result<Vec<(usize, usize)>> = stats::run_trials(samples, seed, |s| {
            let p = Permutation::random(n, &mut s.rng())?;
            let sch = arch.decompose(&p)?;
            Ok((sch.num_swaps(), sch.depth()))
        })
        .into_iter()
        .collect();
        let counts = counts?;
        let swaps: Vec<f64> = counts.iter().map(|c| c.0 as f64).collect();
        let layers: Vec<f64> = counts.iter().map(|c| c.1 as f64).collect();
        let (mean_swaps, var_swaps) = mean_var(&swaps);
        Ok(RoutingStats {
            arch: arch.to_string(),
            len: n,
            samples,
            mean_swaps,
            var_swaps,
            mean_layers: mean_var(&layers).0,
            max_layers: counts.iter().map(|c| c.1).max().unwrap_or(0),
        })
    }
}
