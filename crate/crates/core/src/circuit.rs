//! Paired ideal/faulty random circuits.
//!
//! A trial evolves the ideal and the faulty state side by side. Both consume
//! the same ideal draws (permutations, Haar gates, global unitaries); the
//! faulty one additionally draws gate noise and swap errors from their own
//! streams. Every layer takes its draws from `seed.derive(layer)`, so a
//! trajectory of `T` layers passes through exactly the states of the shorter
//! runs with the same seed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gue, haar_unitary, perturbed_unitary, C64};
use crate::permutation::Permutation;
use crate::rng::{Seed, Stream};
use crate::routing::{apply_faulty_schedule_beta_with, realize_faulty_with, Architecture, NoiseParams, SwapChannel};
use crate::state::{apply_shared_haar, Statevector, MAX_QUBITS};

/// Largest register for the solvable model.
pub const SOLVABLE_MAX_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Uniform permutations followed by Haar gates on fixed pairs.
    #[default]
    Original,
    /// As `Original`, with faultless global Haar unitaries around every
    /// permutation.
    Solvable,
    /// Nearest-neighbor gates on alternating bonds with periodic boundary,
    /// faultless shifts.
    BrickWall,
}

impl Model {
    pub fn label(&self) -> &'static str {
        match self {
            Model::Original => "original",
            Model::Solvable => "solvable",
            Model::BrickWall => "brickwall",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitialState {
    #[default]
    ZeroState,
    RandomBasisState,
}

/// Order of the two halves of an original-model layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayerOrder {
    /// Two-qubit gates, then the permutation.
    #[default]
    GatesFirst,
    /// Permutation, then the two-qubit gates.
    PermutationFirst,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitConfig {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub arch: Architecture,
    pub noise: NoiseParams,
    pub model: Model,
    pub init: InitialState,
    pub order: LayerOrder,
}

impl CircuitConfig {
    /// Original model on `arch` with swap omission.
    pub fn new(l: usize, t: usize, arch: Architecture, alpha: f64, p: f64) -> Result<Self> {
        let c = CircuitConfig {
            l,
            t,
            arch,
            noise: NoiseParams::new(alpha, p)?,
            model: Model::Original,
            init: InitialState::ZeroState,
            order: LayerOrder::GatesFirst,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn with_init(mut self, init: InitialState) -> Self {
        self.init = init;
        self
    }

    pub fn with_order(mut self, order: LayerOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_noise(mut self, noise: NoiseParams) -> Self {
        self.noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.l % 2 != 0 {
            return Err(Error::Config(format!("L must be even and positive, got {}", self.l)));
        }
        if self.t == 0 {
            return Err(Error::Config("a circuit needs at least one layer".into()));
        }
        if self.l > MAX_QUBITS {
            return Err(Error::Resource(format!("{} qubits exceed the dense limit", self.l)));
        }
        if self.model == Model::Solvable && self.l > SOLVABLE_MAX_QUBITS {
            return Err(Error::Resource(format!(
                "solvable model limited to {SOLVABLE_MAX_QUBITS} qubits, got {}",
                self.l
            )));
        }
        self.noise.validate()?;
        if self.model != Model::BrickWall {
            self.arch.check_size(self.l)?;
        }
        Ok(())
    }
}

/// Outcome of one paired run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub fidelity: f64,
    /// `(h_ideal, h_faulty)`.
    pub heavy: Option<(f64, f64)>,
    pub seed: Seed,
}

/// Observables recorded after one layer of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerSample {
    pub fidelity: f64,
    pub h_ideal: f64,
    pub h_faulty: f64,
}

/// Global unitaries of the solvable model: the exact two-vector action, or a
/// dense `2^L` Haar matrix for cross-checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlobalSampling {
    Pair,
    Dense,
}

struct Pair {
    ideal: Statevector,
    faulty: Statevector,
    scratch: Vec<C64>,
}

impl Pair {
    fn fidelity(&self) -> f64 {
        self.ideal.fidelity(&self.faulty).expect("same register").min(1.0)
    }
}

fn initial_pair(config: &CircuitConfig, seed: Seed) -> Result<Pair> {
    let state = match config.init {
        InitialState::ZeroState => Statevector::zero(config.l)?,
        InitialState::RandomBasisState => Statevector::random_basis(config.l, &mut seed.stream(Stream::Initial).rng())?,
    };
    Ok(Pair {
        faulty: state.clone(),
        ideal: state,
        scratch: Vec::new(),
    })
}

fn gate_layer(pair: &mut Pair, bonds: &[(usize, usize)], alpha: f64, layer: Seed) -> Result<()> {
    let mut ideal_rng = layer.stream(Stream::Ideal).rng();
    let mut noise_rng = layer.stream(Stream::GateNoise).rng();
    for &(a, b) in bonds {
        let u = haar_unitary(4, &mut ideal_rng)?;
        pair.ideal.apply_two_qubit_gate(&u, a, b)?;
        if alpha == 0.0 {
            pair.faulty.apply_two_qubit_gate(&u, a, b)?;
        } else {
            let h = gue(4, &mut noise_rng)?;
            pair.faulty.apply_two_qubit_gate(&perturbed_unitary(&u, &h, alpha)?, a, b)?;
        }
    }
    Ok(())
}

fn permutation_layer(pair: &mut Pair, config: &CircuitConfig, layer: Seed) -> Result<()> {
    // A dedicated stream keeps the gate draws independent of the permutation.
    let mut rng = layer.derive(1).stream(Stream::Ideal).rng();
    let perm = Permutation::random(config.l, &mut rng)?;
    pair.ideal.apply_qubit_permutation_with(&perm, &mut pair.scratch)?;
    let noise = &config.noise;
    match noise.channel {
        SwapChannel::Omission if noise.p == 0.0 => {
            pair.faulty.apply_qubit_permutation_with(&perm, &mut pair.scratch)?;
        }
        SwapChannel::Omission => {
            let schedule = config.arch.decompose(&perm)?;
            let realized = realize_faulty_with(&schedule, noise.p, &mut layer.stream(Stream::PermNoise).rng())?;
            pair.faulty.apply_qubit_permutation_with(&realized, &mut pair.scratch)?;
        }
        SwapChannel::Pulse => {
            let schedule = config.arch.decompose(&perm)?;
            let sigma = noise.sigma.expect("validated pulse channel");
            apply_faulty_schedule_beta_with(
                &mut pair.faulty,
                &schedule,
                sigma,
                &mut layer.stream(Stream::PulseNoise).rng(),
            )?;
        }
    }
    Ok(())
}

fn global_layer(pair: &mut Pair, rng: &mut crate::rng::Rng, sampling: GlobalSampling) -> Result<()> {
    match sampling {
        GlobalSampling::Pair => apply_shared_haar(&mut pair.ideal, &mut pair.faulty, rng),
        GlobalSampling::Dense => {
            let r = haar_unitary(pair.ideal.dim(), rng)?;
            pair.ideal.apply_unitary(&r)?;
            pair.faulty.apply_unitary(&r)?;
            pair.ideal.renormalize();
            pair.faulty.renormalize();
            Ok(())
        }
    }
}

/// Bonds `(2r, 2r + 1)`.
fn even_bonds(l: usize) -> Vec<(usize, usize)> {
    (0..l / 2).map(|r| (2 * r, 2 * r + 1)).collect()
}

/// Bonds `(2r + 1, 2r + 2 mod L)`. Acting on these is the same as shifting
/// every qubit by one site, acting on the even bonds and shifting back.
fn odd_bonds(l: usize) -> Vec<(usize, usize)> {
    (0..l / 2).map(|r| (2 * r + 1, (2 * r + 2) % l)).collect()
}

fn layer_by_layer(
    config: &CircuitConfig,
    seed: Seed,
    sampling: GlobalSampling,
    mut observe: impl FnMut(&Pair) -> Result<()>,
) -> Result<Pair> {
    config.validate()?;
    let mut pair = initial_pair(config, seed)?;
    let alpha = config.noise.alpha;
    let bonds = even_bonds(config.l);
    let shifted = odd_bonds(config.l);
    for tau in 0..config.t {
        let layer = seed.derive(tau as u64);
        match config.model {
            Model::Original => match config.order {
                LayerOrder::GatesFirst => {
                    gate_layer(&mut pair, &bonds, alpha, layer)?;
                    permutation_layer(&mut pair, config, layer)?;
                }
                LayerOrder::PermutationFirst => {
                    permutation_layer(&mut pair, config, layer)?;
                    gate_layer(&mut pair, &bonds, alpha, layer)?;
                }
            },
            Model::Solvable => {
                let mut rng = layer.stream(Stream::Global).rng();
                global_layer(&mut pair, &mut rng, sampling)?;
                permutation_layer(&mut pair, config, layer)?;
                global_layer(&mut pair, &mut rng, sampling)?;
                gate_layer(&mut pair, &bonds, alpha, layer)?;
            }
            Model::BrickWall => {
                let b = if tau % 2 == 0 { &bonds } else { &shifted };
                gate_layer(&mut pair, b, alpha, layer)?;
            }
        }
        observe(&pair)?;
    }
    Ok(pair)
}

/// Weight of `p_ideal` and `p_other` on the heavy set
/// `{m : p_ideal[m] > median(p_ideal)}`; the median of an even count is the
/// mean of the two central values.
pub fn heavy_output(p_ideal: &[f64], p_other: &[f64]) -> Result<(f64, f64)> {
    if p_ideal.len() != p_other.len() || p_ideal.is_empty() {
        return Err(Error::Shape("heavy output of mismatched distributions".into()));
    }
    let median = median(p_ideal);
    let mut h_ideal = 0.0;
    let mut h_other = 0.0;
    for (a, b) in p_ideal.iter().zip(p_other) {
        if *a > median {
            h_ideal += a;
            h_other += b;
        }
    }
    Ok((h_ideal, h_other))
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    let n = v.len();
    let mid = n / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        return upper;
    }
    let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    0.5 * (lower + upper)
}

fn heavy_sample(pair: &Pair) -> Result<LayerSample> {
    let (h_ideal, h_faulty) = heavy_output(&pair.ideal.probabilities(), &pair.faulty.probabilities())?;
    Ok(LayerSample {
        fidelity: pair.fidelity(),
        h_ideal,
        h_faulty,
    })
}

fn require(config: &CircuitConfig, model: Model) -> Result<()> {
    if config.model != model {
        return Err(Error::Config(format!(
            "expected a {} circuit, got {}",
            model.label(),
            config.model.label()
        )));
    }
    Ok(())
}

/// Final ideal and faulty states of one trial.
pub fn run_states(config: &CircuitConfig, seed: Seed) -> Result<(Statevector, Statevector)> {
    let pair = layer_by_layer(config, seed, GlobalSampling::Pair, |_| Ok(()))?;
    Ok((pair.ideal, pair.faulty))
}

/// Fidelity of one trial of any model.
pub fn run_trial(config: &CircuitConfig, seed: Seed) -> Result<TrialResult> {
    let pair = layer_by_layer(config, seed, GlobalSampling::Pair, |_| Ok(()))?;
    Ok(TrialResult {
        fidelity: pair.fidelity(),
        heavy: None,
        seed,
    })
}

pub fn run_fidelity_trial(config: &CircuitConfig, seed: Seed) -> Result<TrialResult> {
    require(config, Model::Original)?;
    run_trial(config, seed)
}

pub fn run_solvable_trial(config: &CircuitConfig, seed: Seed) -> Result<TrialResult> {
    require(config, Model::Solvable)?;
    run_trial(config, seed)
}

/// Solvable model with dense `2^L x 2^L` global unitaries.
pub fn run_solvable_trial_dense(config: &CircuitConfig, seed: Seed) -> Result<TrialResult> {
    require(config, Model::Solvable)?;
    let pair = layer_by_layer(config, seed, GlobalSampling::Dense, |_| Ok(()))?;
    Ok(TrialResult {
        fidelity: pair.fidelity(),
        heavy: None,
        seed,
    })
}

/// Configuration of a brick-wall circuit with gate noise only.
pub fn brickwall_config(l: usize, t: usize, alpha: f64) -> Result<CircuitConfig> {
    Ok(CircuitConfig::new(l, t, Architecture::Line, alpha, 0.0)?.with_model(Model::BrickWall))
}

pub fn run_brickwall_trial(l: usize, t: usize, alpha: f64, seed: Seed) -> Result<TrialResult> {
    run_trial(&brickwall_config(l, t, alpha)?, seed)
}

pub fn run_heavy_output_trial(config: &CircuitConfig, seed: Seed) -> Result<TrialResult> {
    let pair = layer_by_layer(config, seed, GlobalSampling::Pair, |_| Ok(()))?;
    let s = heavy_sample(&pair)?;
    Ok(TrialResult {
        fidelity: s.fidelity,
        heavy: Some((s.h_ideal, s.h_faulty)),
        seed,
    })
}

/// Fidelity after each of the `T` layers of one trial.
pub fn fidelity_trajectory(config: &CircuitConfig, seed: Seed) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(config.t);
    layer_by_layer(config, seed, GlobalSampling::Pair, |pair| {
        out.push(pair.fidelity());
        Ok(())
    })?;
    Ok(out)
}

/// Fidelity and heavy-output weights after each layer of one trial.
pub fn heavy_trajectory(config: &CircuitConfig, seed: Seed) -> Result<Vec<LayerSample>> {
    let depths: Vec<usize> = (1..=config.t).collect();
    heavy_at_depths(config, seed, &depths)
}

/// Like [`heavy_trajectory`], sampled only after the listed layers (ascending,
/// within `1..=T`).
pub fn heavy_at_depths(config: &CircuitConfig, seed: Seed, depths: &[usize]) -> Result<Vec<LayerSample>> {
    if depths.windows(2).any(|w| w[0] >= w[1]) || depths.first() == Some(&0) || depths.last().is_some_and(|&d| d > config.t) {
        return Err(Error::Parameter(format!("depths {depths:?} not ascending within 1..={}", config.t)));
    }
    let mut out = Vec::with_capacity(depths.len());
    let mut tau = 0;
    layer_by_layer(config, seed, GlobalSampling::Pair, |pair| {
        tau += 1;
        if depths.get(out.len()) == Some(&tau) {
            out.push(heavy_sample(pair)?);
        }
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(l: usize, t: usize, alpha: f64, p: f64) -> CircuitConfig {
        CircuitConfig::new(l, t, Architecture::FullyConnected, alpha, p).unwrap()
    }

    #[test]
    fn noiseless_collapse_is_bit_identical() {
        for model in [Model::Original, Model::Solvable, Model::BrickWall] {
            let c = cfg(6, 5, 0.0, 0.0).with_model(model);
            let (a, b) = run_states(&c, Seed::new(3)).unwrap();
            assert_eq!(a, b, "{model:?}");
            assert!((run_trial(&c, Seed::new(4)).unwrap().fidelity - 1.0).abs() < 1e-10);
        }
        let pulse = cfg(4, 3, 0.0, 0.0)
            .with_noise(NoiseParams::from_sigma(0.0, 0.0, SwapChannel::Pulse).unwrap());
        let (a, b) = run_states(&pulse, Seed::new(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ideal_draws_do_not_depend_on_noise() {
        let clean = run_states(&cfg(6, 4, 0.0, 0.0), Seed::new(8)).unwrap().0;
        let noisy = run_states(&cfg(6, 4, 0.2, 0.1), Seed::new(8)).unwrap().0;
        assert_eq!(clean, noisy);
        let solv = |a, p| run_states(&cfg(6, 4, a, p).with_model(Model::Solvable), Seed::new(8)).unwrap().0;
        assert_eq!(solv(0.0, 0.0), solv(0.2, 0.1));
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            CircuitConfig::new(5, 2, Architecture::Line, 0.1, 0.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            run_brickwall_trial(7, 2, 0.1, Seed::new(1)),
            Err(Error::Config(_))
        ));
        let big = CircuitConfig {
            l: 14,
            ..cfg(4, 1, 0.0, 0.0)
        }
        .with_model(Model::Solvable);
        assert!(matches!(run_solvable_trial(&big, Seed::new(1)), Err(Error::Resource(_))));
        assert!(run_fidelity_trial(&cfg(4, 1, 0.0, 0.0).with_model(Model::Solvable), Seed::new(1)).is_err());
    }

    #[test]
    fn trajectory_matches_short_runs() {
        let base = cfg(6, 6, 0.1, 0.05);
        let traj = fidelity_trajectory(&base, Seed::new(12)).unwrap();
        for tau in 1..=6 {
            let c = CircuitConfig { t: tau, ..base.clone() };
            assert_eq!(run_fidelity_trial(&c, Seed::new(12)).unwrap().fidelity, traj[tau - 1]);
        }
        let heavy = heavy_trajectory(&base, Seed::new(12)).unwrap();
        let last = run_heavy_output_trial(&base, Seed::new(12)).unwrap();
        assert_eq!(last.heavy.unwrap(), (heavy[5].h_ideal, heavy[5].h_faulty));
    }

    #[test]
    fn fidelity_in_unit_interval() {
        for s in 0..50 {
            let f = run_trial(&cfg(4, 3, 0.5, 0.3), Seed::new(s)).unwrap().fidelity;
            assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        }
    }

    #[test]
    fn heavy_output_rules() {
        let p = [0.1, 0.4, 0.2, 0.3];
        let (hi, ho) = heavy_output(&p, &p).unwrap();
        assert!((hi - 0.7).abs() < 1e-15);
        assert_eq!(hi, ho);
        let uniform = [0.25; 4];
        assert_eq!(heavy_output(&p, &uniform).unwrap().1, 0.5);
        assert!((median(&[3.0, 1.0, 2.0, 4.0]) - 2.5).abs() < 1e-15);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }

    #[test]
    fn heavy_set_size() {
        let c = cfg(8, 8, 0.0, 0.0);
        let (ideal, _) = run_states(&c, Seed::new(2)).unwrap();
        let probs = ideal.probabilities();
        let m = median(&probs);
        let size = probs.iter().filter(|&&x| x > m).count();
        assert!(size == 127 || size == 128, "{size}");
    }
}
