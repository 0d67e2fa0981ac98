//! Random quantum circuits with faulty gates and faulty permutation routing.
//!
//! The crate simulates paired ideal/faulty circuits on dense statevectors,
//! decomposes qubit permutations into swap schedules for fully connected,
//! linear and grid architectures, and evaluates the closed-form fidelity and
//! error-factor expressions these circuits are compared against.

pub mod analytics;
pub mod circuit;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod permutation;
pub mod rng;
pub mod routing;
pub mod state;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
pub use linalg::{perturbed_unitary, sample_gue, sample_haar_unitary, ComplexMatrix, C64};
pub use permutation::{cycle_structure, sample_permutation, Permutation};
pub use rng::{Seed, Stream};
pub use state::{apply_qubit_permutation, apply_two_qubit_gate, Statevector};
pub use stats::Estimate;
