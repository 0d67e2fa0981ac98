//! Quantum-volume threshold in the `(alpha, p)` plane.

use serde::{Deserialize, Serialize};

use super::{delta_for_arch, fidelity_from_heavy_output, solvable_fidelity};
use crate::error::{Error, Result};
use crate::routing::Architecture;

/// Large-`L` mean heavy-output frequency of Haar states, `(1 + ln 2) / 2`.
pub const H_IDEAL_ASYMPTOTE: f64 = 0.846_573_590_279_972_6;

/// Largest noise strength searched for a crossing.
const ALPHA_MAX: f64 = 0.5;
const TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub p: f64,
    pub alpha: f64,
    /// The error factor alone already fails the test; `alpha` is 0.
    pub boundary: bool,
}

/// Fidelity at which the mean faulty heavy-output frequency equals 2/3.
pub fn qv_threshold(l: usize, h_ideal: Option<f64>) -> Result<f64> {
    fidelity_from_heavy_output(2.0 / 3.0, h_ideal.unwrap_or(H_IDEAL_ASYMPTOTE), l)
}

fn bisect(mut lo: f64, mut hi: f64, mut above: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    while hi - lo > TOL {
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// For each `p`, the noise strength `alpha*` at which the solvable-model
/// fidelity falls to the threshold. The first `p` whose error factor alone
/// pushes the fidelity below threshold ends the contour with a boundary
/// point at `alpha* = 0`.
pub fn qv_contour(
    l: usize,
    t: usize,
    arch: &Architecture,
    p_grid: &[f64],
    h_ideal: Option<f64>,
) -> Result<Vec<ContourPoint>> {
    let target = qv_threshold(l, h_ideal)?;
    let mut out = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let delta = delta_for_arch(arch, l, p)?;
        let fid = |a: f64| solvable_fidelity(l, t, a, delta);
        if fid(0.0)? < target {
            out.push(ContourPoint {
                p,
                alpha: 0.0,
                boundary: true,
            });
            break;
        }
        if fid(ALPHA_MAX)? >= target {
            return Err(Error::Parameter(format!(
                "fidelity stays above threshold up to alpha = {ALPHA_MAX} at p = {p}"
            )));
        }
        let alpha = bisect(0.0, ALPHA_MAX, |a| Ok(fid(a)? >= target))?;
        out.push(ContourPoint {
            p,
            alpha,
            boundary: false,
        });
    }
    Ok(out)
}

/// The `p` at which the contour meets `alpha = 0`.
pub fn threshold_omission(l: usize, t: usize, arch: &Architecture, h_ideal: Option<f64>) -> Result<f64> {
    let target = qv_threshold(l, h_ideal)?;
    let fid = |p: f64| solvable_fidelity(l, t, 0.0, delta_for_arch(arch, l, p)?);
    if fid(0.5)? >= target {
        return Err(Error::Parameter("threshold not crossed for p <= 1/2".into()));
    }
    bisect(0.0, 0.5, |p| Ok(fid(p)? >= target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymptote_value() {
        assert!((H_IDEAL_ASYMPTOTE - (1.0 + std::f64::consts::LN_2) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_p_is_architecture_free() {
        let fc = qv_contour(4, 4, &Architecture::FullyConnected, &[0.0], None).unwrap();
        let line = qv_contour(4, 4, &Architecture::Line, &[0.0], None).unwrap();
        assert_eq!(fc, line);
        let target = qv_threshold(4, None).unwrap();
        let f = solvable_fidelity(4, 4, fc[0].alpha, 256.0).unwrap();
        assert!((f - target).abs() < 1e-4);
    }

    #[test]
    fn boundary_point_terminates() {
        let c = qv_contour(4, 4, &Architecture::Line, &[0.0, 0.1, 0.4, 0.45], None).unwrap();
        let last = c.last().unwrap();
        assert!(last.boundary);
        assert_eq!(last.alpha, 0.0);
        assert!(c.len() < 4);
    }

    #[test]
    fn larger_registers_shrink_the_region() {
        let grid = [0.0, 0.005, 0.01];
        let small = qv_contour(4, 4, &Architecture::FullyConnected, &grid, None).unwrap();
        let big = qv_contour(8, 8, &Architecture::FullyConnected, &grid, None).unwrap();
        for (s, b) in small.iter().zip(&big) {
            assert!(b.alpha < s.alpha);
        }
    }
}
