//! Closed-form fidelities and error factors.

mod brickwall;
mod delta;
mod qv;
mod sff;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::Architecture;

pub use brickwall::{brickwall_finite_size_term, brickwall_fidelity_perturbative, catalan, xi};
pub use delta::{delta_for_arch, delta_formula, error_factor_exact_fc, harmonic, stirling_first, DeltaMode, EULER_GAMMA};
pub use qv::{qv_contour, qv_threshold, threshold_omission, ContourPoint, H_IDEAL_ASYMPTOTE};
pub use sff::{f4_polynomial, f_approx, f_exact};

pub use crate::routing::omission_from_sigma as swap_omission_prob;

/// Noise-strength exponent of the average fidelity decay, `15/8`.
pub const NU: f64 = 15.0 / 8.0;

/// Average fidelity of the solvable model with `T` layers:
/// `(1 - 2^-L) [(delta - 1)(Delta - 1) / (4^L - 1)^2]^T + 2^-L`,
/// `Delta = 2^L (3 f_4(alpha) + 1)^(L/2)`.
pub fn solvable_fidelity(l: usize, t: usize, alpha: f64, delta: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidSize("zero qubits".into()));
    }
    let four_l = 4f64.powi(l as i32);
    if !(delta > 0.0) || delta > four_l * (1.0 + 1e-12) {
        return Err(Error::Parameter(format!("error factor {delta} outside (0, 4^{l}]")));
    }
    let two_l = 2f64.powi(l as i32);
    let f = f_exact(4, alpha)?;
    let big_delta = two_l * (3.0 * f + 1.0).powf(l as f64 / 2.0);
    let per_layer = ((delta - 1.0) / (four_l - 1.0)) * ((big_delta - 1.0) / (four_l - 1.0));
    Ok((1.0 - 1.0 / two_l) * per_layer.powi(t as i32) + 1.0 / two_l)
}

/// Large-size decay `exp(-nu alpha^2 L T) exp(-(3/4) mu p L^(1+1/d) T)` with
/// `mu = d - 1/2`, the upper bound on the routing prefactor of the grid
/// sorter. The result is therefore a lower-bound estimate.
pub fn asymptotic_fidelity(l: usize, t: usize, alpha: f64, p: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Parameter("lattice dimension must be >= 1".into()));
    }
    let (l, t, d) = (l as f64, t as f64, d as f64);
    let mu = d - 0.5;
    Ok((-NU * alpha * alpha * l * t).exp() * (-0.75 * mu * p * l.powf(1.0 + 1.0 / d) * t).exp())
}

/// Fidelity implied by heavy-output frequencies:
/// `1 - ((2^L - 1)/2^L)(h_ideal - h_faulty)/(h_ideal - 1/2)`.
pub fn fidelity_from_heavy_output(h_faulty: f64, h_ideal: f64, l: usize) -> Result<f64> {
    if !(h_ideal > 0.5) {
        return Err(Error::Parameter(format!("ideal heavy-output frequency {h_ideal} must exceed 1/2")));
    }
    let scale = 1.0 - 0.5f64.powi(l as i32);
    Ok(1.0 - scale * (h_ideal - h_faulty) / (h_ideal - 0.5))
}

/// Which closed form a prediction comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    /// Solvable-model formula with the exact fully connected error factor.
    Exact,
    /// Exponential large-size decay.
    Asymptotic,
    /// Perturbative brick-wall sum.
    BrickwallPerturbative,
    /// Solvable-model formula with the sparse-error factor of a lattice.
    LowerBound,
    /// Solvable-model formula with the optimized-routing error factor.
    UpperBoundOptimized,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::Asymptotic => "asymptotic",
            Provenance::BrickwallPerturbative => "brickwall",
            Provenance::LowerBound => "lower-bound",
            Provenance::UpperBoundOptimized => "upper-bound-optimized",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "exact" => Provenance::Exact,
            "asymptotic" => Provenance::Asymptotic,
            "brickwall" => Provenance::BrickwallPerturbative,
            "lower-bound" => Provenance::LowerBound,
            "upper-bound-optimized" => Provenance::UpperBoundOptimized,
            _ => return Err(Error::Parse(format!("unknown prediction mode '{s}'"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityPrediction {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub alpha: f64,
    pub p: f64,
    pub arch: Architecture,
    pub provenance: Provenance,
    pub value: f64,
}

impl FidelityPrediction {
    pub const HEADER: [&'static str; 7] = ["L", "T", "alpha", "p", "arch", "mode", "value"];
}

/// Evaluates the closed form named by `provenance`.
pub fn predict(
    l: usize,
    t: usize,
    alpha: f64,
    p: f64,
    arch: &Architecture,
    provenance: Provenance,
) -> Result<FidelityPrediction> {
    let value = match (provenance, arch) {
        (Provenance::Exact, Architecture::FullyConnected) => {
            solvable_fidelity(l, t, alpha, error_factor_exact_fc(l, p)?)?
        }
        (Provenance::Exact, _) => {
            return Err(Error::Parameter(format!("no exact error factor for {arch}")));
        }
        (Provenance::LowerBound, Architecture::FullyConnected) => {
            return Err(Error::Parameter("sparse-error bounds need a lattice".into()));
        }
        (Provenance::LowerBound, _) => solvable_fidelity(l, t, alpha, delta_for_arch(arch, l, p)?)?,
        (Provenance::UpperBoundOptimized, a) => {
            let mode = match a {
                Architecture::FullyConnected => {
                    return Err(Error::Parameter("no optimized bound for full connectivity".into()));
                }
                Architecture::Line => DeltaMode::OptimizedBound1D,
                Architecture::Grid { .. } => DeltaMode::OptimizedBoundGrid,
            };
            solvable_fidelity(l, t, alpha, delta_formula(a, l, p, mode)?)?
        }
        (Provenance::Asymptotic, Architecture::FullyConnected) => {
            let delta = delta_formula(arch, l, p, DeltaMode::AsymptoticFC)?;
            (-NU * alpha * alpha * (l * t) as f64).exp() * (delta / 4f64.powi(l as i32)).powi(t as i32)
        }
        (Provenance::Asymptotic, a) => asymptotic_fidelity(l, t, alpha, p, a.dimension())?,
        (Provenance::BrickwallPerturbative, _) => brickwall_fidelity_perturbative(l, t, alpha),
    };
    Ok(FidelityPrediction {
        l,
        t,
        alpha,
        p,
        arch: arch.clone(),
        provenance,
        value,
    })
}
