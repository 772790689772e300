//! Dense statevector and matrix engine.
//!
//! Basis convention (used by every module in the crate): basis index `b`
//! encodes qubit `k` as bit `k` of `b`, so qubit 0 is the least-significant
//! bit. A Pauli word string lists qubit 0 first, i.e. `"XZ"` is `X` on
//! qubit 0 and `Z` on qubit 1.

mod gate;
mod linalg;
mod pauli;
mod state;

pub use gate::{Gate, GateKind};
pub use linalg::{
    eigh, expm_hermitian, haar_random_unitary, partial_trace_b, trace_norm, DenseOperator, Eigendecomposition,
};
pub use pauli::{Pauli, PauliSum, PauliWord};
pub use state::Statevector;

pub use num_complex::Complex64 as C64;
