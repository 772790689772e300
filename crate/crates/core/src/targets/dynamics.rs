use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sim::{expm_hermitian, DenseOperator, Gate, GateKind, Pauli, PauliSum, PauliWord, Statevector, C64};

/// Driven open chain
/// `H(t) = Σ_j [-(J/2)(1 - t/T) X_j X_{j+1} - (J/2)(1 + t/T) Y_j Y_{j+1} + u Z_j Z_{j+1}] + h Σ_j X_j`
/// sampled on the grid `t_i = i·T/steps`, `i = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSpec {
    pub num_qubits: usize,
    pub j: f64,
    pub u: f64,
    pub h: f64,
    pub total_time: f64,
    pub steps: usize,
    /// Left-endpoint sub-intervals per grid interval.
    pub substeps: usize,
    pub trotter_r: usize,
}

impl DynamicsSpec {
    pub fn new(num_qubits: usize, j: f64, u: f64, h: f64) -> Self {
        DynamicsSpec { num_qubits, j, u, h, total_time: 10.0, steps: 100, substeps: 5, trotter_r: 100 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 2 {
            return Err(invalid(format!("chain needs at least 2 qubits, got {}", self.num_qubits)));
        }
        for (name, v) in [("J", self.j), ("u", self.u), ("h", self.h)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("coupling {name}")));
            }
        }
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(invalid("total time must be positive"));
        }
        if self.steps == 0 || self.substeps == 0 || self.trotter_r == 0 {
            return Err(invalid("steps, substeps and Trotter number must be at least 1"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|i| i as f64 * self.dt()).collect()
    }

    fn check_step(&self, step: usize) -> Result<()> {
        self.validate()?;
        if step > self.steps {
            return Err(invalid(format!("grid index {step} beyond the last point {}", self.steps)));
        }
        Ok(())
    }

    /// Left endpoints of every sub-interval before grid point `step`.
    fn sample_times(&self, step: usize, refine: usize) -> impl Iterator<Item = f64> + '_ {
        let k = self.substeps * refine;
        let tau = self.dt() / k as f64;
        (0..step * k).map(move |s| s as f64 * tau)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrotterOrder {
    First,
    Second,
}

impl TryFrom<u8> for TrotterOrder {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(TrotterOrder::First),
            2 => Ok(TrotterOrder::Second),
            other => Err(invalid(format!("Trotter order must be 1 or 2, got {other}"))),
        }
    }
}

pub fn td_hamiltonian(spec: &DynamicsSpec, t: f64) -> Result<PauliSum> {
    spec.validate()?;
    let tol = 1e-12 * spec.total_time;
    if !(t >= -tol && t <= spec.total_time + tol) {
        return Err(invalid(format!("time {t} outside [0, {}]", spec.total_time)));
    }
    let n = spec.num_qubits;
    let s = t / spec.total_time;
    let xx = -0.5 * spec.j * (1.0 - s);
    let yy = -0.5 * spec.j * (1.0 + s);
    let mut terms = Vec::new();
    for q in 0..n - 1 {
        for (c, p) in [(xx, Pauli::X), (yy, Pauli::Y), (spec.u, Pauli::Z)] {
            if c != 0.0 {
                terms.push((c, PauliWord::from_sparse(n, &[(q, p), (q + 1, p)])?));
            }
        }
    }
    if spec.h != 0.0 {
        for q in 0..n {
            terms.push((spec.h, PauliWord::from_sparse(n, &[(q, Pauli::X)])?));
        }
    }
    PauliSum::new(n, terms)
}

/// Time-ordered left-endpoint product up to grid point `step`, with
/// `substeps · refine` sub-intervals per grid interval.
pub fn exact_propagator(spec: &DynamicsSpec, step: usize, refine: usize) -> Result<DenseOperator> {
    spec.check_step(step)?;
    if refine == 0 {
        return Err(invalid("refinement factor must be at least 1"));
    }
    let tau = spec.dt() / (spec.substeps * refine) as f64;
    let mut u = DenseOperator::identity(1 << spec.num_qubits);
    for s in spec.sample_times(step, refine) {
        let step_u = expm_hermitian(&td_hamiltonian(spec, s)?.to_dense(), C64::new(0.0, -tau))?;
        u = &step_u * &u;
    }
    Ok(u)
}

/// Propagators at every grid point, built incrementally.
pub fn exact_propagators(spec: &DynamicsSpec) -> Result<Vec<DenseOperator>> {
    spec.validate()?;
    let k = spec.substeps;
    let tau = spec.dt() / k as f64;
    let mut out = Vec::with_capacity(spec.steps + 1);
    let mut u = DenseOperator::identity(1 << spec.num_qubits);
    out.push(u.clone());
    for i in 0..spec.steps {
        for s in 0..k {
            let t = (i * k + s) as f64 * tau;
            let step_u = expm_hermitian(&td_hamiltonian(spec, t)?.to_dense(), C64::new(0.0, -tau))?;
            u = &step_u * &u;
        }
        out.push(u.clone());
    }
    Ok(out)
}

fn rotation(word: &PauliWord, angle: f64) -> Result<Gate> {
    let support = word.support();
    let kind = match support.as_slice() {
        [(_, Pauli::X)] => GateKind::Rx,
        [(_, Pauli::Y)] => GateKind::Ry,
        [(_, Pauli::Z)] => GateKind::Rz,
        [(_, Pauli::X), (_, Pauli::X)] => GateKind::Rxx,
        [(_, Pauli::Y), (_, Pauli::Y)] => GateKind::Ryy,
        [(_, Pauli::Z), (_, Pauli::Z)] => GateKind::Rzz,
        _ => return Err(invalid(format!("no native rotation for {word}"))),
    };
    let qubits: Vec<usize> = support.iter().map(|(q, _)| *q).collect();
    Gate::new(kind, &qubits, Some(angle))
}

/// Per-sub-interval Trotter layer: `r` repetitions of the term exponentials
/// `exp(-i c P τ / r)`, sequential for order 1, symmetrized for order 2.
fn trotter_layer(h: &PauliSum, tau: f64, r: usize, order: TrotterOrder) -> Result<Vec<Gate>> {
    let terms = h.terms();
    let mut rep = Vec::with_capacity(2 * terms.len());
    match order {
        TrotterOrder::First => {
            for (c, w) in terms {
                rep.push(rotation(w, 2.0 * c * tau / r as f64)?);
            }
        }
        TrotterOrder::Second => {
            for (c, w) in terms.iter().chain(terms.iter().rev()) {
                rep.push(rotation(w, c * tau / r as f64)?);
            }
        }
    }
    let mut out = Vec::with_capacity(rep.len() * r);
    for _ in 0..r {
        out.extend_from_slice(&rep);
    }
    Ok(out)
}

/// Gate sequence approximating the propagator to grid point `step`.
pub fn trotter_circuit(spec: &DynamicsSpec, step: usize, order: TrotterOrder) -> Result<Vec<Gate>> {
    spec.check_step(step)?;
    let tau = spec.dt() / spec.substeps as f64;
    let mut gates = Vec::new();
    for s in spec.sample_times(step, 1) {
        gates.extend(trotter_layer(&td_hamiltonian(spec, s)?, tau, spec.trotter_r, order)?);
    }
    Ok(gates)
}

/// Trotterized evolution of `initial`, recorded at every grid point.
pub fn trotter_states(spec: &DynamicsSpec, initial: &Statevector, order: TrotterOrder) -> Result<Vec<Statevector>> {
    spec.validate()?;
    if initial.num_qubits() != spec.num_qubits {
        return Err(Error::DimensionMismatch { expected: spec.num_qubits, got: initial.num_qubits() });
    }
    let k = spec.substeps;
    let tau = spec.dt() / k as f64;
    let mut state = initial.clone();
    let mut out = Vec::with_capacity(spec.steps + 1);
    out.push(state.clone());
    for i in 0..spec.steps {
        for s in 0..k {
            let h = td_hamiltonian(spec, (i * k + s) as f64 * tau)?;
            state.apply_all(&trotter_layer(&h, tau, spec.trotter_r, order)?)?;
        }
        out.push(state.clone());
    }
    Ok(out)
}

/// Qubits `0..N/2` in `|1⟩`, the rest in `|0⟩`.
pub fn domain_wall_state(num_qubits: usize) -> Result<Statevector> {
    if num_qubits == 0 || !num_qubits.is_multiple_of(2) {
        return Err(invalid(format!("domain wall needs an even qubit count, got {num_qubits}")));
    }
    Statevector::basis(num_qubits, (1 << (num_qubits / 2)) - 1)
}
