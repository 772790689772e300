//! Target workloads: Haar-random unitary sets, thermal states of the
//! transverse-field Ising ring, a driven open spin chain with exact and
//! Trotterized propagators, and Pauli-sum Hamiltonian files.

mod dynamics;
mod haar;
mod hamfile;
mod thermal;

pub use dynamics::{
    domain_wall_state, exact_propagator, exact_propagators, td_hamiltonian, trotter_circuit, trotter_states,
    DynamicsSpec, TrotterOrder,
};
pub use haar::haar_target_set;
pub use hamfile::{load_pauli_hamiltonians, parse_pauli_hamiltonians};
pub use thermal::{
    dense_purified_state, eigenbasis_dephase, gibbs_state, tfd_state, tfim_hamiltonian, GibbsState, ThermalMethod,
    ThermalSpec,
};
