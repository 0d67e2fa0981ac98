//! Permutations of qubit positions, stored by image: `image[k] = P(k)`.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Rng, Seed};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        if image.is_empty() {
            return Err(Error::InvalidSize("permutation of zero elements".into()));
        }
        let mut seen = vec![false; image.len()];
        for &x in &image {
            if x >= image.len() || seen[x] {
                return Err(Error::Parameter(format!("{image:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(len: usize) -> Self {
        Permutation {
            image: (0..len).collect(),
        }
    }

    pub fn transposition(len: usize, a: usize, b: usize) -> Result<Self> {
        if a >= len || b >= len {
            return Err(Error::Index(format!("transposition ({a} {b}) on {len} elements")));
        }
        let mut p = Self::identity(len);
        p.image.swap(a, b);
        Ok(p)
    }

    /// Uniform element of `S_len` by Fisher-Yates.
    pub fn random(len: usize, rng: &mut Rng) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidSize("permutation of zero elements".into()));
        }
        let mut image: Vec<usize> = (0..len).collect();
        image.shuffle(rng);
        Ok(Permutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, k: usize) -> usize {
        self.image[k]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(k, &x)| k == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (k, &x) in self.image.iter().enumerate() {
            inv[x] = k;
        }
        Permutation { image: inv }
    }

    /// `self` followed by `next`: `k -> next(self(k))`.
    pub fn then(&self, next: &Permutation) -> Result<Self> {
        if self.len() != next.len() {
            return Err(Error::Shape(format!(
                "composing permutations of {} and {} elements",
                self.len(),
                next.len()
            )));
        }
        Ok(Permutation {
            image: self.image.iter().map(|&x| next.image[x]).collect(),
        })
    }

    /// Disjoint cycles `[c0, c1, ...]` with `P(c_i) = c_{i+1}`, each starting
    /// at its smallest element, ordered by that element. Fixed points appear
    /// as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut k = self.image[start];
            while k != start {
                seen[k] = true;
                cycle.push(k);
                k = self.image[k];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of cycles including fixed points.
    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.image[k];
            }
        }
        count
    }

    /// Pairs `i < j` with `P(i) > P(j)`.
    pub fn inversions(&self) -> usize {
        let n = self.len();
        let mut count = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if self.image[i] > self.image[j] {
                    count += 1;
                }
            }
        }
        count
    }
}

pub fn sample_permutation(len: usize, seed: Seed) -> Result<Permutation> {
    Permutation::random(len, &mut seed.rng())
}

pub fn cycle_structure(p: &Permutation) -> Vec<Vec<usize>> {
    p.cycles()
}
