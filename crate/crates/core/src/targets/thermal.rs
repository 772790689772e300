use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::sim::{eigh, DenseOperator, Pauli, PauliSum, PauliWord, Statevector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThermalMethod {
    /// `N`-qubit dense purification.
    Dense,
    /// `2N`-qubit thermofield double.
    Conventional,
}

impl std::str::FromStr for ThermalMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(ThermalMethod::Dense),
            "conventional" => Ok(ThermalMethod::Conventional),
            other => Err(invalid(format!("unknown thermal method `{other}` (expected dense or conventional)"))),
        }
    }
}

impl std::fmt::Display for ThermalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ThermalMethod::Dense => "dense",
            ThermalMethod::Conventional => "conventional",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    pub num_sites: usize,
    pub beta: f64,
    pub method: ThermalMethod,
}

impl ThermalSpec {
    pub fn new(num_sites: usize, beta: f64, method: ThermalMethod) -> Result<Self> {
        if num_sites < 2 {
            return Err(invalid(format!("thermal ring needs at least 2 sites, got {num_sites}")));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(invalid(format!("beta must be finite and non-negative, got {beta}")));
        }
        Ok(ThermalSpec { num_sites, beta, method })
    }
}

/// `Σ Z_i Z_{i+1} + Σ X_i` on a ring. At two sites the wrapped bond repeats
/// the single bond, so `Z0 Z1` carries coefficient 2.
pub fn tfim_hamiltonian(num_sites: usize) -> Result<PauliSum> {
    if num_sites < 2 {
        return Err(invalid(format!("ring needs at least 2 sites, got {num_sites}")));
    }
    let n = num_sites;
    let mut terms = Vec::with_capacity(2 * n);
    for i in 0..n {
        let w = PauliWord::from_sparse(n, &[(i, Pauli::Z), ((i + 1) % n, Pauli::Z)])?;
        terms.push((1.0, w));
    }
    for i in 0..n {
        terms.push((1.0, PauliWord::from_sparse(n, &[(i, Pauli::X)])?));
    }
    PauliSum::new(n, terms)
}

/// Gibbs state with the spectral data used to build its purifications.
#[derive(Clone, Debug)]
pub struct GibbsState {
    pub rho: DenseOperator,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Column `j` is the eigenvector for `energies[j]`.
    pub eigenvectors: DenseOperator,
    /// `Tr e^{-βH}`.
    pub partition: f64,
    /// Boltzmann weights `e^{-βE_j} / Z`.
    pub weights: Vec<f64>,
}

/// `ρ(β) = e^{-βH} / Z` for the TFIM ring.
pub fn gibbs_state(spec: &ThermalSpec) -> Result<GibbsState> {
    let spec = ThermalSpec::new(spec.num_sites, spec.beta, spec.method)?;
    let h = tfim_hamiltonian(spec.num_sites)?.to_dense();
    let eig = eigh(&h)?;
    let e0 = eig.values[0];
    // Shifted by the ground energy so large β does not underflow.
    let boltz: Vec<f64> = eig.values.iter().map(|e| (-spec.beta * (e - e0)).exp()).collect();
    let total: f64 = boltz.iter().sum();
    let weights: Vec<f64> = boltz.iter().map(|w| w / total).collect();
    let partition = total * (-spec.beta * e0).exp();
    let v = eig.vectors.matrix();
    let d = weights.len();
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for (j, &p) in weights.iter().enumerate() {
        let col = v.column(j);
        rho += (col * col.adjoint()) * C64::new(p, 0.0);
    }
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    Ok(GibbsState { rho: DenseOperator::new(rho), energies: eig.values, eigenvectors: eig.vectors, partition, weights })
}

/// `Σ_j √p_j |j⟩_A |j⟩_B` on `2N` qubits. Register A is the low `N` bits.
pub fn tfd_state(gibbs: &GibbsState) -> Result<Statevector> {
    let v = gibbs.eigenvectors.matrix();
    let d = v.nrows();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for (j, &p) in gibbs.weights.iter().enumerate() {
        let s = p.sqrt();
        if s == 0.0 {
            continue;
        }
        for b in 0..d {
            let vb = v[(b, j)] * s;
            for a in 0..d {
                amps[a + b * d] += v[(a, j)] * vb;
            }
        }
    }
    Statevector::from_amplitudes(amps)
}

/// `Σ_j √p_j |j⟩` on `N` qubits.
pub fn dense_purified_state(gibbs: &GibbsState) -> Result<Statevector> {
    let v = gibbs.eigenvectors.matrix();
    let d = v.nrows();
    let mut amps = vec![C64::new(0.0, 0.0); d];
    for (j, &p) in gibbs.weights.iter().enumerate() {
        let s = p.sqrt();
        for (i, a) in amps.iter_mut().enumerate() {
            *a += v[(i, j)] * s;
        }
    }
    Statevector::from_amplitudes(amps)
}

/// `Σ_j |⟨j|ψ⟩|² |j⟩⟨j|` in the given eigenbasis (columns of `basis`).
pub fn eigenbasis_dephase(state: &Statevector, basis: &DenseOperator) -> Result<DenseOperator> {
    let v = basis.matrix();
    if v.nrows() != state.dim() {
        return Err(crate::Error::DimensionMismatch { expected: v.nrows(), got: state.dim() });
    }
    let d = v.nrows();
    let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for j in 0..d {
        let col = v.column(j);
        let p = col.dotc(&psi).norm_sqr();
        rho += (col * col.adjoint()) * C64::new(p, 0.0);
    }
    Ok(DenseOperator::new(rho))
}
