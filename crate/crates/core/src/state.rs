//! Dense statevector and the gate/permutation kernels.
//!
//! Basis states are little-endian: qubit `k` is bit `k` of the basis index.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, ComplexMatrix, C64};
use crate::permutation::Permutation;
use crate::rng::Rng;

/// Largest register the dense kernels accept.
pub const MAX_QUBITS: usize = 26;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<C64>,
}

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::InvalidSize("a register needs at least one qubit".into()));
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::Resource(format!(
            "{num_qubits} qubits exceed the dense limit of {MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Index(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Statevector { num_qubits, amps })
    }

    /// Wraps amplitudes that must already be normalized to 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Shape(format!("{dim} amplitudes do not form a register")));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_size(num_qubits)?;
        let s = Statevector { num_qubits, amps };
        if (s.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::Parameter(format!("state norm^2 is {}", s.norm_sqr())));
        }
        Ok(s)
    }

    /// Haar-random pure state.
    pub fn random(num_qubits: usize, rng: &mut Rng) -> Result<Self> {
        check_size(num_qubits)?;
        let mut amps: Vec<C64> = (0..1usize << num_qubits).map(|_| complex_gaussian(rng)).collect();
        normalize(&mut amps);
        Ok(Statevector { num_qubits, amps })
    }

    /// Uniformly random computational basis state.
    pub fn random_basis(num_qubits: usize, rng: &mut Rng) -> Result<Self> {
        check_size(num_qubits)?;
        let index = rng.random_range(0..1usize << num_qubits);
        Self::basis(num_qubits, index)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Shape(format!(
                "overlap of {} and {} qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Statevector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Born probabilities of the computational basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_pair(&self, q1: usize, q2: usize) -> Result<()> {
        if q1 == q2 {
            return Err(Error::Index(format!("gate acts twice on qubit {q1}")));
        }
        if q1 >= self.num_qubits || q2 >= self.num_qubits {
            return Err(Error::Index(format!(
                "qubits ({q1}, {q2}) out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Applies a 4x4 gate with `q1` as the more significant input slot.
    pub fn apply_two_qubit_gate(&mut self, gate: &ComplexMatrix, q1: usize, q2: usize) -> Result<()> {
        if gate.dim() != 4 {
            return Err(Error::Shape(format!("two-qubit gate must be 4x4, got {0}x{0}", gate.dim())));
        }
        self.check_pair(q1, q2)?;
        let g = gate.as_slice();
        let b1 = 1usize << q1;
        let b2 = 1usize << q2;
        let (lo, hi) = if q1 < q2 { (q1, q2) } else { (q2, q1) };
        let lo_mask = (1usize << lo) - 1;
        let hi_mask = (1usize << hi) - 1;
        for j in 0..self.amps.len() >> 2 {
            // Insert zero bits at positions lo and hi.
            let t = ((j & !lo_mask) << 1) | (j & lo_mask);
            let base = ((t & !hi_mask) << 1) | (t & hi_mask);
            let idx = [base, base | b2, base | b1, base | b1 | b2];
            let v = [self.amps[idx[0]], self.amps[idx[1]], self.amps[idx[2]], self.amps[idx[3]]];
            for r in 0..4 {
                let row = &g[4 * r..4 * r + 4];
                self.amps[idx[r]] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
            }
        }
        Ok(())
    }

    /// Exchanges the contents of two qubits.
    pub fn swap_qubits(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        let ba = 1usize << a;
        let bb = 1usize << b;
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, i ^ ba ^ bb);
            }
        }
        Ok(())
    }

    /// Moves the content of qubit `k` to qubit `perm(k)`.
    pub fn apply_qubit_permutation(&mut self, perm: &Permutation) -> Result<()> {
        let mut scratch = Vec::new();
        self.apply_qubit_permutation_with(perm, &mut scratch)
    }

    /// As [`Self::apply_qubit_permutation`], reusing `scratch` as the
    /// temporary buffer.
    pub fn apply_qubit_permutation_with(&mut self, perm: &Permutation, scratch: &mut Vec<C64>) -> Result<()> {
        if perm.len() != self.num_qubits {
            return Err(Error::Shape(format!(
                "permutation of {} elements on {} qubits",
                perm.len(),
                self.num_qubits
            )));
        }
        if perm.is_identity() {
            return Ok(());
        }
        let image = perm.image();
        scratch.clear();
        scratch.resize(self.amps.len(), ZERO);
        for (b, amp) in self.amps.iter().enumerate() {
            let mut target = 0usize;
            let mut rest = b;
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                target |= 1 << image[k];
                rest &= rest - 1;
            }
            scratch[target] = *amp;
        }
        std::mem::swap(&mut self.amps, scratch);
        Ok(())
    }

    /// Applies a dense `2^L x 2^L` unitary.
    pub fn apply_unitary(&mut self, u: &ComplexMatrix) -> Result<()> {
        self.amps = u.apply(&self.amps)?;
        Ok(())
    }

    /// Rescales to unit norm, removing accumulated rounding.
    pub fn renormalize(&mut self) {
        normalize(&mut self.amps);
    }
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in v.iter_mut() {
        *a /= n;
    }
}

pub fn apply_two_qubit_gate(
    mut state: Statevector,
    gate: &ComplexMatrix,
    q1: usize,
    q2: usize,
) -> Result<Statevector> {
    state.apply_two_qubit_gate(gate, q1, q2)?;
    Ok(state)
}

pub fn apply_qubit_permutation(mut state: Statevector, perm: &Permutation) -> Result<Statevector> {
    state.apply_qubit_permutation(perm)?;
    Ok(state)
}

/// Applies one Haar-random global unitary `R` to both `psi` and `phi`.
///
/// Only the joint action on the two vectors is sampled: `R psi` and
/// `R e2` (the normalized part of `phi` orthogonal to `psi`) form a uniformly
/// random orthonormal pair, which is exactly their law under Haar `R`. This
/// costs `O(2^L)` instead of the `O(4^L)` draws of a dense unitary.
pub fn apply_shared_haar(psi: &mut Statevector, phi: &mut Statevector, rng: &mut Rng) -> Result<()> {
    if psi.num_qubits != phi.num_qubits {
        return Err(Error::Shape("shared unitary on registers of different size".into()));
    }
    let dim = psi.dim();
    // Both vectors are always drawn so the stream advances the same way
    // whatever the inputs.
    let mut v1: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let mut v2: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    normalize(&mut v1);
    if psi.amps == phi.amps {
        phi.amps.copy_from_slice(&v1);
        psi.amps = v1;
        return Ok(());
    }
    let proj: C64 = v1.iter().zip(&v2).map(|(a, b)| a.conj() * b).sum();
    for (x, a) in v2.iter_mut().zip(&v1) {
        *x -= proj * a;
    }
    normalize(&mut v2);

    // psi is mapped to v1 exactly, so the ideal branch never depends on phi.
    let n_psi = psi.norm_sqr().sqrt();
    let a = psi.inner(phi)? / (n_psi * n_psi);
    let mut b = 0.0;
    for (p, q) in psi.amps.iter().zip(&phi.amps) {
        b += (q - a * p).norm_sqr();
    }
    let b = b.sqrt();
    let a = a * n_psi;
    for i in 0..dim {
        phi.amps[i] = a * v1[i] + b * v2[i];
    }
    psi.amps = v1;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, sample_haar_unitary};
    use crate::rng::Seed;

    #[test]
    fn identity_gate_is_noop() {
        let mut rng = Seed::new(1).rng();
        let s = Statevector::random(3, &mut rng).unwrap();
        let t = apply_two_qubit_gate(s.clone(), &ComplexMatrix::identity(4), 0, 2).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn swap_gate_moves_excitation() {
        // |01> with qubit 0 set is basis index 1.
        let s = Statevector::basis(2, 0b01).unwrap();
        let t = apply_two_qubit_gate(s, &ComplexMatrix::swap(), 0, 1).unwrap();
        assert_eq!(t, Statevector::basis(2, 0b10).unwrap());
    }

    #[test]
    fn slot_order_convention() {
        // A gate mapping slot |00> -> |01> flips q2 only.
        let mut g = ComplexMatrix::zeros(4);
        g.set(1, 0, ONE);
        g.set(0, 1, ONE);
        g.set(2, 2, ONE);
        g.set(3, 3, ONE);
        let t = apply_two_qubit_gate(Statevector::zero(3).unwrap(), &g, 2, 0).unwrap();
        assert_eq!(t, Statevector::basis(3, 0b001).unwrap());
        let t = apply_two_qubit_gate(Statevector::zero(3).unwrap(), &g, 0, 2).unwrap();
        assert_eq!(t, Statevector::basis(3, 0b100).unwrap());
    }

    #[test]
    fn gate_matches_dense_kron() {
        // Compare against an explicit embedding built index by index.
        let mut rng = Seed::new(2).rng();
        let g = haar_unitary(4, &mut rng).unwrap();
        let s = Statevector::random(4, &mut rng).unwrap();
        for (q1, q2) in [(0, 1), (1, 0), (3, 1), (0, 3), (2, 3)] {
            let mut dense = ComplexMatrix::zeros(16);
            for row in 0..16usize {
                for col in 0..16usize {
                    let others = !((1 << q1) | (1 << q2));
                    if row & others != col & others {
                        continue;
                    }
                    let slot = |i: usize| 2 * ((i >> q1) & 1) + ((i >> q2) & 1);
                    dense.set(row, col, g.get(slot(row), slot(col)));
                }
            }
            let mut expect = s.clone();
            expect.apply_unitary(&dense).unwrap();
            let got = apply_two_qubit_gate(s.clone(), &g, q1, q2).unwrap();
            let diff = got
                .amplitudes()
                .iter()
                .zip(expect.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "pair ({q1},{q2}) diff {diff}");
        }
    }

    #[test]
    fn gate_index_errors() {
        let s = Statevector::zero(3).unwrap();
        let g = ComplexMatrix::identity(4);
        assert!(matches!(apply_two_qubit_gate(s.clone(), &g, 1, 1), Err(Error::Index(_))));
        assert!(matches!(apply_two_qubit_gate(s, &g, 0, 3), Err(Error::Index(_))));
    }

    #[test]
    fn permutation_moves_qubits() {
        let swap01 = Permutation::new(vec![1, 0]).unwrap();
        let t = apply_qubit_permutation(Statevector::basis(2, 0b01).unwrap(), &swap01).unwrap();
        assert_eq!(t, Statevector::basis(2, 0b10).unwrap());

        let cyc = Permutation::new(vec![1, 2, 0]).unwrap();
        let t = apply_qubit_permutation(Statevector::basis(3, 0b001).unwrap(), &cyc).unwrap();
        assert_eq!(t, Statevector::basis(3, 0b010).unwrap());
        let id = Permutation::identity(3);
        let s = Statevector::basis(3, 0b101).unwrap();
        assert_eq!(apply_qubit_permutation(s.clone(), &id).unwrap(), s);
        assert!(matches!(
            apply_qubit_permutation(s, &swap01),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn permutation_then_inverse_is_exact() {
        let mut rng = Seed::new(3).rng();
        for _ in 0..50 {
            let s = Statevector::random(6, &mut rng).unwrap();
            let p = Permutation::random(6, &mut rng).unwrap();
            let t = apply_qubit_permutation(s.clone(), &p).unwrap();
            assert_eq!(apply_qubit_permutation(t, &p.inverse()).unwrap(), s);
        }
    }

    #[test]
    fn swap_qubits_matches_swap_gate() {
        let mut rng = Seed::new(4).rng();
        let s = Statevector::random(4, &mut rng).unwrap();
        let mut a = s.clone();
        a.swap_qubits(1, 3).unwrap();
        let b = apply_two_qubit_gate(s, &ComplexMatrix::swap(), 1, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn norm_conservation() {
        let mut rng = Seed::new(5).rng();
        let mut s = Statevector::random(5, &mut rng).unwrap();
        for i in 0..10_000u64 {
            if i % 2 == 0 {
                let g = haar_unitary(4, &mut rng).unwrap();
                let q1 = rng.random_range(0..5);
                let q2 = (q1 + rng.random_range(1..5)) % 5;
                s.apply_two_qubit_gate(&g, q1, q2).unwrap();
            } else {
                s.apply_qubit_permutation(&Permutation::random(5, &mut rng).unwrap()).unwrap();
            }
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn shared_haar_preserves_overlap() {
        let mut rng = Seed::new(6).rng();
        let mut a = Statevector::random(5, &mut rng).unwrap();
        let mut b = Statevector::random(5, &mut rng).unwrap();
        let before = a.inner(&b).unwrap();
        apply_shared_haar(&mut a, &mut b, &mut rng).unwrap();
        let after = a.inner(&b).unwrap();
        assert!((before - after).norm() < 1e-12);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((b.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shared_haar_keeps_identical_states_identical() {
        let mut rng = Seed::new(7).rng();
        let mut a = Statevector::random(4, &mut rng).unwrap();
        let mut b = a.clone();
        apply_shared_haar(&mut a, &mut b, &mut rng).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shared_haar_matches_dense_statistics() {
        // <|<0|R psi>|^2 |<0|R phi>|^2> computed both ways.
        let n = 4000;
        let psi0 = Statevector::zero(2).unwrap();
        let phi0 = Statevector::basis(2, 1).unwrap();
        let stat = |a: &Statevector, b: &Statevector| a.probabilities()[0] * b.probabilities()[0];
        let mut fast = Vec::with_capacity(n);
        let mut dense = Vec::with_capacity(n);
        for i in 0..n as u64 {
            let mut rng = Seed::new(i).rng();
            let (mut a, mut b) = (psi0.clone(), phi0.clone());
            apply_shared_haar(&mut a, &mut b, &mut rng).unwrap();
            fast.push(stat(&a, &b));
            let r = sample_haar_unitary(4, Seed::with_stream(i, 9)).unwrap();
            let (mut a, mut b) = (psi0.clone(), phi0.clone());
            a.apply_unitary(&r).unwrap();
            b.apply_unitary(&r).unwrap();
            dense.push(stat(&a, &b));
        }
        let ms = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
            (m, var / v.len() as f64)
        };
        let (mf, vf) = ms(&fast);
        let (md, vd) = ms(&dense);
        // Exact value: 1/(d(d+1)) for orthogonal inputs, d = 4.
        assert!((mf - 0.05).abs() < 4.0 * vf.sqrt(), "fast {mf}");
        assert!((md - 0.05).abs() < 4.0 * vd.sqrt(), "dense {md}");
    }
}
