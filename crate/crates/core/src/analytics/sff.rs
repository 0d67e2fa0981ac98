//! GUE spectral form factor `f_d(alpha)`, the average of
//! `exp(i alpha (lambda_m - lambda_n))` over distinct eigenvalue pairs.

use crate::error::{Error, Result};

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// Exact finite-`d` form factor for the weight `exp(-tr H^2 / 2)`.
///
/// `d(d-1) f_d = e^{-a^2} [ (sum_k L_k(a^2))^2 - sum_{k,k'} k<! k>! a^{2|k-k'|} S_{kk'}^2 ]`
/// with `L_k` the Laguerre polynomials and
/// `S_{kk'} = sum_l (-a^2)^l / (l! (k< - l)! (|k-k'| + l)!)`.
pub fn f_exact(d: usize, alpha: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Parameter(format!("form factor needs d >= 2, got {d}")));
    }
    if d > 16 {
        return Err(Error::Precision(format!(
            "d = {d} exceeds the double-precision range of the factorial sums (d <= 16)"
        )));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Parameter(format!("alpha must be >= 0, got {alpha}")));
    }
    let fact = factorials(2 * d);
    let x = alpha * alpha;
    let pow: Vec<f64> = (0..2 * d).map(|l| (-x).powi(l as i32)).collect();

    let mut laguerre_sum = 0.0;
    for k in 0..d {
        let inner: f64 = (0..=k).map(|l| pow[l] / (fact[l] * fact[l] * fact[k - l])).sum();
        laguerre_sum += fact[k] * inner;
    }
    let mut connected = 0.0;
    for k in 0..d {
        for kp in 0..d {
            let (lo, hi) = (k.min(kp), k.max(kp));
            let gap = hi - lo;
            let inner: f64 = (0..=lo)
                .map(|l| pow[l] / (fact[l] * fact[lo - l] * fact[gap + l]))
                .sum();
            connected += fact[lo] * fact[hi] * x.powi(gap as i32) * inner * inner;
        }
    }
    Ok((-x).exp() / (d * (d - 1)) as f64 * (laguerre_sum * laguerre_sum - connected))
}

/// `f_4` as an explicit polynomial in `alpha^2` times `exp(-alpha^2)`.
pub fn f4_polynomial(alpha: f64) -> f64 {
    let x = alpha * alpha;
    let poly = 36.0 + x * (-144.0 + x * (138.0 + x * (-64.0 + x * (12.5 - x))));
    (-x).exp() * poly / 36.0
}

/// Gaussian approximation `exp(-(d + 1) alpha^2)`.
pub fn f_approx(d: usize, alpha: f64) -> f64 {
    (-((d + 1) as f64) * alpha * alpha).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time() {
        for d in 2..=16 {
            assert!((f_exact(d, 0.0).unwrap() - 1.0).abs() < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn matches_polynomial() {
        for i in 0..=300 {
            let a = i as f64 * 0.01;
            assert!((f_exact(4, a).unwrap() - f4_polynomial(a)).abs() < 1e-10, "alpha = {a}");
        }
        assert!((f_exact(4, 1.0).unwrap() + 0.229_92).abs() < 5e-6);
    }

    #[test]
    fn small_alpha_expansion() {
        let a = 1e-3;
        assert!((f_exact(4, a).unwrap() - (1.0 - 5.0 * a * a)).abs() < 1e-8);
    }

    #[test]
    fn ranges() {
        assert!(matches!(f_exact(17, 0.5), Err(Error::Precision(_))));
        assert!(f_exact(1, 0.5).is_err());
        assert_eq!(f_approx(4, 0.0), 1.0);
        assert!((f_approx(4, 0.1) - 0.951_229).abs() < 1e-6);
        // The Gaussian form stays within 0.01 up to alpha = 0.22; the gap
        // reaches 0.0255 at alpha = 0.3.
        for i in 0..=22 {
            let a = i as f64 * 0.01;
            assert!((f_approx(4, a) - f_exact(4, a).unwrap()).abs() < 0.01);
        }
        let gap = f_approx(4, 0.3) - f_exact(4, 0.3).unwrap();
        assert!((gap - 0.025_498).abs() < 1e-5, "{gap}");
    }
}
