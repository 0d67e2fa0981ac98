//! Perturbative average fidelity of the brick-wall circuit with faulty gates.

/// Catalan number `(2m)! / ((m + 1)! m!)`.
pub fn catalan(m: u32) -> u128 {
    binomial(2 * m, m) / (m as u128 + 1)
}

/// `C(2l + 1, l + 1)`.
pub fn xi(l: u32) -> u128 {
    binomial(2 * l + 1, l + 1)
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

const WEIGHT: f64 = 4.0 / 25.0;

/// `Sigma_T = sum_{l<T} [(T - 1 - l) x^(l+1) chi_{l+1} + x^l xi_l]` with
/// `x = (2/5)^2`. Terms are built by running ratios, which stay finite for
/// any depth.
fn diagram_sum(t: usize) -> f64 {
    let mut chi_term = WEIGHT; // x^1 chi_1
    let mut xi_term = 1.0; // x^0 xi_0
    let mut sum = 0.0;
    for l in 0..t {
        sum += (t - 1 - l) as f64 * chi_term + xi_term;
        let m = (l + 1) as f64;
        chi_term *= WEIGHT * 2.0 * (2.0 * m + 1.0) / (m + 2.0);
        let lf = l as f64;
        xi_term *= WEIGHT * 2.0 * (2.0 * lf + 3.0) / (lf + 2.0);
    }
    sum
}

/// `1 - alpha^2 L (2T - Sigma_T / 2)`, valid to `O(alpha^4)`.
pub fn brickwall_fidelity_perturbative(l: usize, t: usize, alpha: f64) -> f64 {
    1.0 - alpha * alpha * l as f64 * (2.0 * t as f64 - 0.5 * diagram_sum(t))
}

/// Finite-depth correction `F - (1 - (15/8) L T alpha^2)`; tends to
/// `(5/6) L alpha^2` for deep circuits.
pub fn brickwall_finite_size_term(l: usize, t: usize, alpha: f64) -> f64 {
    brickwall_fidelity_perturbative(l, t, alpha) - (1.0 - super::NU * (l * t) as f64 * alpha * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences() {
        let c: Vec<u128> = (1..=4).map(catalan).collect();
        assert_eq!(c, vec![1, 2, 5, 14]);
        let x: Vec<u128> = (0..5).map(xi).collect();
        assert_eq!(x, vec![1, 3, 10, 35, 126]);
    }

    #[test]
    fn running_terms_match_integers() {
        let mut chi_term = WEIGHT;
        let mut xi_term = 1.0;
        for l in 0..30u32 {
            let c = catalan(l + 1) as f64 * WEIGHT.powi(l as i32 + 1);
            let x = xi(l) as f64 * WEIGHT.powi(l as i32);
            assert!((chi_term - c).abs() < 1e-12 * c);
            assert!((xi_term - x).abs() < 1e-12 * x);
            let m = (l + 1) as f64;
            chi_term *= WEIGHT * 2.0 * (2.0 * m + 1.0) / (m + 2.0);
            xi_term *= WEIGHT * 2.0 * (2.0 * l as f64 + 3.0) / (l as f64 + 2.0);
        }
    }

    #[test]
    fn noiseless_and_single_layer() {
        assert_eq!(brickwall_fidelity_perturbative(8, 8, 0.0), 1.0);
        // One layer on a product state: every pair decays as 1 - 3 alpha^2.
        let a = 0.01;
        assert!((brickwall_fidelity_perturbative(8, 1, a) - (1.0 - 12.0 * a * a)).abs() < 1e-15);
    }

    #[test]
    fn finite_size_term_bounded() {
        let a = 0.05;
        let l = 8;
        let limit = 5.0 / 6.0 * l as f64 * a * a;
        for t in 1..200 {
            assert!(brickwall_finite_size_term(l, t, a).abs() <= limit + 1e-15, "T = {t}");
        }
        assert!((brickwall_finite_size_term(l, 400, a) - limit).abs() < 1e-3 * limit);
    }

    #[test]
    fn deep_circuit_slope() {
        let (l, t, a) = (8, 200, 1e-3);
        let deficit = 1.0 - brickwall_fidelity_perturbative(l, t, a);
        assert!((deficit / (a * a * (l * t) as f64) / super::super::NU - 1.0).abs() < 0.01);
    }
}
