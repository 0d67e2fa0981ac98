//! Small dense complex matrices and the random-matrix ensembles used by the
//! circuits: Haar (CUE) unitaries and GUE Hermitian generators.

use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{Rng, Seed};

pub type C64 = Complex64;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| format!("{:.4}", self.get(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {dim}x{dim} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parameter("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = C64::new(*v, 0.0);
        }
        m
    }

    /// Two-qubit SWAP in the `|q1 q2>` slot order.
    pub fn swap() -> Self {
        let mut m = Self::zeros(4);
        m.data[0] = C64::new(1.0, 0.0);
        m.data[4 + 2] = C64::new(1.0, 0.0);
        m.data[2 * 4 + 1] = C64::new(1.0, 0.0);
        m.data[15] = C64::new(1.0, 0.0);
        m
    }

    /// Fractional swap `S^beta = P_S + e^{i pi beta} P_A`.
    pub fn swap_power(beta: f64) -> Self {
        if beta == 1.0 {
            return Self::swap();
        }
        if beta == 0.0 {
            return Self::identity(4);
        }
        let phase = C64::from_polar(1.0, std::f64::consts::PI * beta);
        let one = C64::new(1.0, 0.0);
        let sym = (one + phase) * 0.5;
        let anti = (one - phase) * 0.5;
        let mut m = Self::zeros(4);
        m.data[0] = one;
        m.data[4 + 1] = sym;
        m.data[4 + 2] = anti;
        m.data[2 * 4 + 1] = anti;
        m.data[2 * 4 + 2] = sym;
        m.data[15] = one;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.dim, self.dim, rhs.dim, rhs.dim
            )));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector of length {} against {}x{} matrix",
                v.len(),
                self.dim,
                self.dim
            )));
        }
        let n = self.dim;
        Ok((0..n)
            .map(|r| (0..n).map(|c| self.data[r * n + c] * v[c]).sum())
            .collect())
    }

    /// `max |(M^† M - I)_{ij}|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.data[k * n + r].conj() * self.data[k * n + c];
                }
                if r == c {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// `max |(M - M^†)_{ij}|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                worst = worst.max((self.data[r * n + c] - self.data[c * n + r].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let n = m.nrows();
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[r * n + c] = m[(r, c)];
            }
        }
        out
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a dimension mismatch; use [`ComplexMatrix::matmul`] to get
    /// an error instead.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
#[inline]
pub fn complex_gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary drawn from `rng`.
///
/// QR of a complex Ginibre matrix, with the columns of `Q` rephased by the
/// phases of `diag(R)` so that the result is exactly Haar.
pub fn haar_unitary(dim: usize, rng: &mut Rng) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension("Haar unitary of dimension 0".into()));
    }
    let ginibre = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = ginibre.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        let d = r[(c, c)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    Ok(ComplexMatrix::from_nalgebra(&q))
}

pub fn sample_haar_unitary(dim: usize, seed: Seed) -> Result<ComplexMatrix> {
    haar_unitary(dim, &mut seed.rng())
}

/// GUE matrix with density proportional to `exp(-tr H^2 / 2)`: unit-variance
/// real diagonal, off-diagonal real and imaginary parts of variance 1/2.
pub fn gue(dim: usize, rng: &mut Rng) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension("GUE matrix of dimension 0".into()));
    }
    let mut h = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        let diag: f64 = rng.sample(StandardNormal);
        h.set(r, r, C64::new(diag, 0.0));
        for c in (r + 1)..dim {
            let z = complex_gaussian(rng);
            h.set(r, c, z);
            h.set(c, r, z.conj());
        }
    }
    Ok(h)
}

pub fn sample_gue(dim: usize, seed: Seed) -> Result<ComplexMatrix> {
    gue(dim, &mut seed.rng())
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and the unitary
/// whose columns are the matching eigenvectors.
pub fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = nalgebra::SymmetricEigen::new(h.to_nalgebra());
    (
        eig.eigenvalues.iter().copied().collect(),
        ComplexMatrix::from_nalgebra(&eig.eigenvectors),
    )
}

/// Eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    nalgebra::SymmetricEigen::new(h.to_nalgebra())
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// `exp(i alpha h)` for Hermitian `h`, through its eigendecomposition so the
/// result is unitary to rounding.
pub fn hermitian_phase_exp(h: &ComplexMatrix, alpha: f64) -> ComplexMatrix {
    let n = h.dim();
    let (values, vectors) = hermitian_eigen(h);
    let phases: Vec<C64> = values
        .iter()
        .map(|&l| C64::from_polar(1.0, alpha * l))
        .collect();
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (k, phase) in phases.iter().enumerate() {
                acc += vectors.get(r, k) * phase * vectors.get(c, k).conj();
            }
            out.set(r, c, acc);
        }
    }
    out
}

/// Faulty gate `exp(i alpha h) u`.
pub fn perturbed_unitary(u: &ComplexMatrix, h: &ComplexMatrix, alpha: f64) -> Result<ComplexMatrix> {
    if u.dim() != h.dim() {
        return Err(Error::Shape(format!(
            "gate is {0}x{0} but generator is {1}x{1}",
            u.dim(),
            h.dim()
        )));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Parameter(format!("noise strength must be >= 0, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(u.clone());
    }
    hermitian_phase_exp(h, alpha).matmul(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn haar_dim_one_is_a_phase() {
        let u = sample_haar_unitary(1, Seed::new(3)).unwrap();
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn haar_rejects_zero_dimension() {
        assert!(matches!(
            sample_haar_unitary(0, Seed::new(1)),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(sample_gue(0, Seed::new(1)), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn haar_is_unitary() {
        for dim in [2, 4, 8, 16] {
            for s in 0..50 {
                let u = sample_haar_unitary(dim, Seed::new(s)).unwrap();
                assert!(u.unitarity_error() < 1e-10);
            }
        }
    }

    #[test]
    fn haar_first_moment() {
        let n = 10_000;
        let mut rng = Seed::new(11).rng();
        let xs: Vec<f64> = (0..n)
            .map(|_| haar_unitary(4, &mut rng).unwrap().get(0, 0).norm_sqr())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 0.25).abs() < 4.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn gue_is_hermitian_by_construction() {
        let h = sample_gue(5, Seed::new(9)).unwrap();
        assert_eq!(h.hermiticity_error(), 0.0);
        for i in 0..5 {
            assert_eq!(h.get(i, i).im, 0.0);
        }
    }

    #[test]
    fn gue_is_deterministic() {
        assert_eq!(sample_gue(4, Seed::new(5)).unwrap(), sample_gue(4, Seed::new(5)).unwrap());
        assert_eq!(
            sample_haar_unitary(4, Seed::new(5)).unwrap(),
            sample_haar_unitary(4, Seed::new(5)).unwrap()
        );
    }

    #[test]
    fn perturbation_edge_cases() {
        let u = sample_haar_unitary(4, Seed::new(1)).unwrap();
        let h = sample_gue(4, Seed::new(2)).unwrap();
        assert_eq!(perturbed_unitary(&u, &h, 0.0).unwrap(), u);

        let flipped = perturbed_unitary(&u, &ComplexMatrix::identity(4), PI).unwrap();
        assert!(flipped.max_abs_diff(&u.scale(C64::new(-1.0, 0.0))) < 1e-12);

        for a in [0.01, 0.3, 2.0, 10.0] {
            assert!(perturbed_unitary(&u, &h, a).unwrap().unitarity_error() < 1e-10);
        }
        let small = sample_gue(2, Seed::new(2)).unwrap();
        assert!(matches!(perturbed_unitary(&u, &small, 0.1), Err(Error::Shape(_))));
    }

    #[test]
    fn phase_exp_matches_series_for_small_argument() {
        let h = sample_gue(4, Seed::new(4)).unwrap();
        let a = 1e-3;
        let e = hermitian_phase_exp(&h, a);
        // 1 + i a h - a^2 h^2 / 2
        let h2 = &h * &h;
        let mut series = ComplexMatrix::identity(4);
        for r in 0..4 {
            for c in 0..4 {
                let v = series.get(r, c) + C64::new(0.0, a) * h.get(r, c) - h2.get(r, c) * (a * a / 2.0);
                series.set(r, c, v);
            }
        }
        assert!(e.max_abs_diff(&series) < 1e-8);
    }

    #[test]
    fn swap_power_endpoints() {
        assert_eq!(ComplexMatrix::swap_power(1.0), ComplexMatrix::swap());
        assert_eq!(ComplexMatrix::swap_power(0.0), ComplexMatrix::identity(4));
        assert!(ComplexMatrix::swap_power(1.0 + 1e-9).max_abs_diff(&ComplexMatrix::swap()) < 1e-8);
        assert!(ComplexMatrix::swap_power(0.37).unitarity_error() < 1e-12);
    }
}
