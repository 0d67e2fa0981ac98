//! Error factors `delta(p) = <4^m>` of faulty permutation routing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::Architecture;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest size handled by [`error_factor_exact_fc`].
pub const MAX_EXACT_L: usize = 20;

pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Unsigned Stirling numbers of the first kind `[n, c]` for `c = 0..=n`.
pub fn stirling_first(n: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for k in 0..n {
        let mut next = vec![0u128; row.len() + 1];
        for (c, &v) in row.iter().enumerate() {
            next[c] += v * k as u128;
            next[c + 1] += v;
        }
        row = next;
    }
    row
}

/// Exact fully connected error factor,
/// `sum_c [L, c] / L! 4^c (4 - 3p)^(L - c)`.
pub fn error_factor_exact_fc(l: usize, p: f64) -> Result<f64> {
    if l == 0 || l > MAX_EXACT_L {
        return Err(Error::Parameter(format!(
            "exact error factor needs 1 <= L <= {MAX_EXACT_L}, got {l}"
        )));
    }
    check_p(p)?;
    if p == 0.0 {
        return Ok(4f64.powi(l as i32));
    }
    let stirling = stirling_first(l);
    let total: u128 = stirling.iter().sum();
    let q = 4.0 - 3.0 * p;
    Ok(stirling
        .iter()
        .enumerate()
        .map(|(c, &s)| (s as f64 / total as f64) * 4f64.powi(c as i32) * q.powi((l - c) as i32))
        .sum())
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Parameter(format!("omission probability {p} outside [0, 1/2]")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeltaMode {
    /// Stirling-number sum for full connectivity.
    ExactFC,
    /// `4^L exp(-(3/4) p (L - ln L - gamma))`.
    AsymptoticFC,
    /// `4^L exp(-(3/4) p L (L - 1) / 4)`; a lower bound once errors are not sparse.
    Sparse1D,
    /// `4^L exp(-(3/4)(d - 1/2) p L^(1 + 1/d))`; a lower bound.
    SparseGrid,
    /// `4^L exp(-p L (L - 2) / 8)`; upper bound for optimized routing in 1D.
    OptimizedBound1D,
    /// `4^L exp(-(d/8) p L^(1 + 1/d))`; upper bound for optimized routing.
    OptimizedBoundGrid,
}

impl DeltaMode {
    pub fn label(&self) -> &'static str {
        match self {
            DeltaMode::ExactFC => "exact-fc",
            DeltaMode::AsymptoticFC => "asymptotic-fc",
            DeltaMode::Sparse1D => "sparse-1d",
            DeltaMode::SparseGrid => "sparse-grid",
            DeltaMode::OptimizedBound1D => "optimized-1d",
            DeltaMode::OptimizedBoundGrid => "optimized-grid",
        }
    }
}

/// Evaluates the closed form `mode`, which must fit `arch`.
pub fn delta_formula(arch: &Architecture, l: usize, p: f64, mode: DeltaMode) -> Result<f64> {
    arch.check_size(l)?;
    check_p(p)?;
    let lf = l as f64;
    let base = 4f64.powi(l as i32);
    let fc = matches!(arch, Architecture::FullyConnected);
    let one_d = arch.dimension() == 1;
    let lattice = !fc;
    let exponent = match mode {
        DeltaMode::ExactFC if fc => return error_factor_exact_fc(l, p),
        DeltaMode::AsymptoticFC if fc => 0.75 * p * (lf - lf.ln() - EULER_GAMMA),
        DeltaMode::Sparse1D if one_d => 0.75 * p * lf * (lf - 1.0) / 4.0,
        DeltaMode::OptimizedBound1D if one_d => p * lf * (lf - 2.0) / 8.0,
        DeltaMode::SparseGrid if lattice => {
            let d = arch.dimension() as f64;
            0.75 * (d - 0.5) * p * lf.powf(1.0 + 1.0 / d)
        }
        DeltaMode::OptimizedBoundGrid if lattice => {
            let d = arch.dimension() as f64;
            d / 8.0 * p * lf.powf(1.0 + 1.0 / d)
        }
        _ => {
            return Err(Error::Parameter(format!(
                "error-factor mode {} does not apply to {arch}",
                mode.label()
            )))
        }
    };
    Ok(base * (-exponent).exp())
}

/// Default closed form per architecture: exact for full connectivity,
/// sparse-error for lattices.
pub fn delta_for_arch(arch: &Architecture, l: usize, p: f64) -> Result<f64> {
    let mode = match arch {
        Architecture::FullyConnected => DeltaMode::ExactFC,
        a if a.dimension() == 1 => DeltaMode::Sparse1D,
        _ => DeltaMode::SparseGrid,
    };
    delta_formula(arch, l, p, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_rows() {
        assert_eq!(stirling_first(0), vec![1]);
        assert_eq!(stirling_first(4), vec![0, 6, 11, 6, 1]);
        let row = stirling_first(20);
        assert_eq!(row.iter().sum::<u128>(), 2_432_902_008_176_640_000);
    }

    #[test]
    fn two_qubits() {
        for p in [0.0, 0.1, 0.3, 0.5] {
            assert!((error_factor_exact_fc(2, p).unwrap() - (16.0 - 6.0 * p)).abs() < 1e-12);
        }
        assert!(error_factor_exact_fc(0, 0.1).is_err());
        assert!(error_factor_exact_fc(21, 0.1).is_err());
    }

    #[test]
    fn first_order_in_p() {
        // d delta / dp at 0 is -(3/4) 4^L (L - H_L).
        let l = 6;
        let p = 1e-6;
        let slope = (error_factor_exact_fc(l, p).unwrap() - 4096.0) / p;
        let expect = -0.75 * 4096.0 * (l as f64 - harmonic(l));
        assert!((slope - expect).abs() < 1e-3 * expect.abs());
    }

    #[test]
    fn modes_at_zero_p() {
        let cases = [
            (Architecture::FullyConnected, DeltaMode::ExactFC),
            (Architecture::FullyConnected, DeltaMode::AsymptoticFC),
            (Architecture::Line, DeltaMode::Sparse1D),
            (Architecture::Line, DeltaMode::OptimizedBound1D),
            (Architecture::grid(2, 3).unwrap(), DeltaMode::SparseGrid),
            (Architecture::grid(2, 3).unwrap(), DeltaMode::OptimizedBoundGrid),
        ];
        for (arch, mode) in cases {
            let l = if matches!(arch, Architecture::Grid { .. }) { 9 } else { 8 };
            assert_eq!(delta_formula(&arch, l, 0.0, mode).unwrap(), 4f64.powi(l as i32));
        }
        assert!(delta_formula(&Architecture::Line, 8, 0.1, DeltaMode::ExactFC).is_err());
        assert!(delta_formula(&Architecture::FullyConnected, 8, 0.1, DeltaMode::SparseGrid).is_err());
    }

    #[test]
    fn sparse_line_value() {
        let v = delta_formula(&Architecture::Line, 8, 0.01, DeltaMode::Sparse1D).unwrap();
        assert!((v - 65536.0 * (-0.75f64 * 0.01 * 14.0).exp()).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_close_to_exact() {
        let fc = Architecture::FullyConnected;
        let a = delta_formula(&fc, 10, 0.02, DeltaMode::AsymptoticFC).unwrap();
        let e = delta_formula(&fc, 10, 0.02, DeltaMode::ExactFC).unwrap();
        assert!(((a - e) / e).abs() < 0.02);
    }
}
