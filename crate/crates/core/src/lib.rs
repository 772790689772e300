//! Multi-target quantum circuit compilation by genetic structure search with
//! variational parameter training.
//!
//! A [`genome::CircuitGenome`] is a gate sequence over the pool
//! {H, S, CX, RX, RY, RZ}. For a fixed structure, every target gets its own
//! parameter row, trained with Adam on parameter-shift gradients
//! ([`opt`]). The search in [`ga`] ranks structures by aggregate kernel
//! fidelity and breeds new ones by elitism, roulette selection, one-point
//! crossover and mutation.
//!
//! Workloads live in [`targets`] (Haar unitaries, thermal states, driven spin
//! chains, Pauli Hamiltonians) and the end-to-end drivers in [`pipelines`].
//! The `gavqa` binary wraps them in [`cli`].
//!
//! Qubit `q` is bit `q` of a basis index, and rotations are
//! `R_P(θ) = exp(-iθP/2)`.
//!
//! ```
//! use gavqa::cost::{kernel, Target};
//! use gavqa::genome::CircuitGenome;
//! use gavqa::sim::Statevector;
//!
//! let g: CircuitGenome = "qubits=1 params=1\nRY q0 slot0\n".parse().unwrap();
//! let zero = Statevector::zero(1);
//! let target = Target::State(Statevector::basis(1, 1).unwrap());
//! let k = kernel(&target, &g, &[std::f64::consts::PI], &zero).unwrap();
//! assert!((k - 1.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod config;
pub mod cost;
pub mod error;
pub mod ga;
pub mod genome;
pub mod opt;
pub mod pipelines;
pub mod rng;
pub mod sim;
pub mod targets;
pub mod verify;

pub use error::{Error, Result};
