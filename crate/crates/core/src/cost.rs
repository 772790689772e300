//! Objective functions and figures of merit.
//!
//! For a unitary target `U` the compilation kernel is
//! `K = |⟨ψ|U V†(θ)|ψ⟩|²`; for a state target `|t⟩` it is `|⟨t|V(θ)|ψ⟩|²`.
//! Both are squared overlaps between a *target image* (`U†|ψ⟩` or `|t⟩`) and
//! a *prepared state* (`V†(θ)|ψ⟩` or `V(θ)|ψ⟩`); [`PreparedTarget`] caches the
//! image so the training loop only simulates the circuit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::genome::CircuitGenome;
use crate::opt::Objective;
use crate::sim::{eigh, trace_norm, DenseOperator, PauliSum, Statevector, C64};

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Unitary(DenseOperator),
    State(Statevector),
}

impl Target {
    pub fn num_qubits(&self) -> usize {
        match self {
            Target::Unitary(u) => u.num_qubits().unwrap_or(0),
            Target::State(s) => s.num_qubits(),
        }
    }

    fn check(&self, genome: &CircuitGenome, reference: &Statevector) -> Result<()> {
        for got in [genome.num_qubits(), reference.num_qubits()] {
            if got != self.num_qubits() {
                return Err(Error::DimensionMismatch { expected: self.num_qubits(), got });
            }
        }
        Ok(())
    }

    /// `U†|ψ⟩` for a unitary, `|t⟩` for a state.
    pub fn image(&self, reference: &Statevector) -> Result<Statevector> {
        match self {
            Target::Unitary(u) => reference.apply_operator(&u.adjoint()),
            Target::State(t) => {
                if t.num_qubits() != reference.num_qubits() {
                    return Err(Error::DimensionMismatch { expected: t.num_qubits(), got: reference.num_qubits() });
                }
                Ok(t.clone())
            }
        }
    }

    /// Whether the circuit acts as `V†` (unitary targets) or `V` (states).
    pub fn uses_adjoint(&self) -> bool {
        matches!(self, Target::Unitary(_))
    }
}

/// Multi-target workload with a train/test partition.
#[derive(Clone, Debug)]
pub struct TargetSet {
    num_qubits: usize,
    targets: Vec<Target>,
    train: Vec<usize>,
    test: Vec<usize>,
}

impl TargetSet {
    pub fn new(targets: Vec<Target>, train: Vec<usize>, test: Vec<usize>) -> Result<Self> {
        let num_qubits = targets.first().map(Target::num_qubits).ok_or_else(|| invalid("target set is empty"))?;
        if let Some(t) = targets.iter().find(|t| t.num_qubits() != num_qubits) {
            return Err(Error::DimensionMismatch { expected: num_qubits, got: t.num_qubits() });
        }
        let mut seen = vec![false; targets.len()];
        for &i in train.iter().chain(&test) {
            if i >= targets.len() || std::mem::replace(&mut seen[i], true) {
                return Err(invalid(format!("index {i} is out of range or in both splits")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("train and test splits must cover every target"));
        }
        Ok(TargetSet { num_qubits, targets, train, test })
    }

    /// Every target in the training split.
    pub fn all_train(targets: Vec<Target>) -> Result<Self> {
        let n = targets.len();
        Self::new(targets, (0..n).collect(), Vec::new())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn train_indices(&self) -> &[usize] {
        &self.train
    }

    pub fn test_indices(&self) -> &[usize] {
        &self.test
    }

    pub fn train(&self) -> Vec<Target> {
        self.train.iter().map(|&i| self.targets[i].clone()).collect()
    }

    pub fn test(&self) -> Vec<Target> {
        self.test.iter().map(|&i| self.targets[i].clone()).collect()
    }
}

/// Per-target parameter rows bound to one genome (`n × m`, row-major).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterTable {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl ParameterTable {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(invalid(format!("{} values do not fill a {rows}x{cols} table", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("parameter table entry".into()));
        }
        Ok(ParameterTable { rows, cols, values })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("ragged parameter rows"));
        }
        Self::new(n, cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ParameterTable { rows, cols, values: vec![0.0; rows * cols] }
    }

    /// Entries uniform in `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let values = (0..rows * cols).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        ParameterTable { rows, cols, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.cols..(j + 1) * self.cols]
    }

    pub fn row_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.values[j * self.cols..(j + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |j| self.row(j))
    }
}

/// Target image cached against a reference state.
#[derive(Clone, Debug)]
pub struct PreparedTarget {
    image: Statevector,
    adjoint: bool,
    reference: Statevector,
}

impl PreparedTarget {
    pub fn new(target: &Target, reference: &Statevector) -> Result<Self> {
        Ok(PreparedTarget {
            image: target.image(reference)?,
            adjoint: target.uses_adjoint(),
            reference: reference.clone(),
        })
    }

    pub fn image(&self) -> &Statevector {
        &self.image
    }

    /// The state the circuit produces from the reference.
    pub fn prepared(&self, genome: &CircuitGenome, theta: &[f64]) -> Result<Statevector> {
        genome.bind_and_run(theta, &self.reference, self.adjoint)
    }

    pub fn kernel(&self, genome: &CircuitGenome, theta: &[f64]) -> Result<f64> {
        let p = self.prepared(genome, theta)?;
        Ok(self.image.inner(&p)?.norm_sqr().min(1.0))
    }

    /// `1 - K` as an optimizer objective.
    pub fn objective<'a>(&'a self, genome: &'a CircuitGenome) -> KernelObjective<'a> {
        KernelObjective { target: self, genome }
    }
}

/// Kernel infidelity `1 - K(θ)` of one target.
pub struct KernelObjective<'a> {
    target: &'a PreparedTarget,
    genome: &'a CircuitGenome,
}

impl Objective for KernelObjective<'_> {
    fn evaluate(&self, params: &[f64]) -> Result<f64> {
        Ok(1.0 - self.target.kernel(self.genome, params)?)
    }

    fn param_count(&self) -> usize {
        self.genome.param_count()
    }
}

/// Compilation kernel, evaluated literally: `V†` then `U` on `|ψ⟩` for a
/// unitary target, `|⟨t|V(θ)|ψ⟩|²` for a state target.
pub fn kernel(target: &Target, genome: &CircuitGenome, theta: &[f64], reference: &Statevector) -> Result<f64> {
    target.check(genome, reference)?;
    let k = match target {
        Target::Unitary(u) => {
            let s = genome.bind_and_run(theta, reference, true)?;
            let s = s.apply_operator(u)?;
            reference.inner(&s)?.norm_sqr()
        }
        Target::State(t) => {
            let s = genome.bind_and_run(theta, reference, false)?;
            t.inner(&s)?.norm_sqr()
        }
    };
    Ok(k.min(1.0))
}

fn check_rows(targets: &[Target], params: &ParameterTable) -> Result<()> {
    if targets.is_empty() {
        return Err(invalid("empty target subset"));
    }
    if params.rows() != targets.len() {
        return Err(Error::DimensionMismatch { expected: targets.len(), got: params.rows() });
    }
    Ok(())
}

/// `1 - (1/n) Σ_j K_j(θ_j)`.
pub fn multi_target_loss(
    targets: &[Target],
    genome: &CircuitGenome,
    params: &ParameterTable,
    reference: &Statevector,
) -> Result<f64> {
    check_rows(targets, params)?;
    let mut sum = 0.0;
    for (t, theta) in targets.iter().zip(params.iter_rows()) {
        sum += kernel(t, genome, theta, reference)?;
    }
    Ok(1.0 - sum / targets.len() as f64)
}

/// Mean of `¼‖|a⟩⟨a| - |b⟩⟨b|‖₁²` over targets, where `|a⟩` is the target
/// image and `|b⟩` the prepared state (their overlap is the kernel). Computed
/// through the trace norm rather than the overlap.
pub fn expected_risk(
    targets: &[Target],
    genome: &CircuitGenome,
    params: &ParameterTable,
    reference: &Statevector,
) -> Result<f64> {
    check_rows(targets, params)?;
    let mut sum = 0.0;
    for (t, theta) in targets.iter().zip(params.iter_rows()) {
        t.check(genome, reference)?;
        let a = t.image(reference)?;
        let b = genome.bind_and_run(theta, reference, t.uses_adjoint())?;
        let diff = &a.projector() - &b.projector();
        let d = trace_norm(&diff)?;
        sum += 0.25 * d * d;
    }
    Ok(sum / targets.len() as f64)
}

fn psd_sqrt(rho: &DenseOperator) -> Result<DenseOperator> {
    Ok(eigh(rho)?.reconstruct(|l| C64::new(l.max(0.0).sqrt(), 0.0)))
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho: &DenseOperator, sigma: &DenseOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    rho.check_density()?;
    sigma.check_density()?;
    let s = psd_sqrt(rho)?;
    let inner = &(&s * sigma) * &s;
    let inner = DenseOperator::new((inner.matrix() + inner.matrix().adjoint()) * C64::new(0.5, 0.0));
    let root_trace: f64 = eigh(&inner)?.values.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// `Tr[ρ²]`.
pub fn purity(rho: &DenseOperator) -> Result<f64> {
    rho.check_density()?;
    Ok(rho.matrix().iter().map(|z| z.norm_sqr()).sum())
}

/// Interval weights for the weighted-sum thermal fitness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaWeights {
    /// `[0,4)`, `[4,7)`, `[7,10]`.
    pub weights: [f64; 3],
}

impl Default for BetaWeights {
    fn default() -> Self {
        BetaWeights { weights: [2.2, 1.6, 0.9] }
    }
}

impl BetaWeights {
    pub fn interval(beta: f64) -> Result<usize> {
        match beta {
            b if (0.0..4.0).contains(&b) => Ok(0),
            b if (4.0..7.0).contains(&b) => Ok(1),
            b if (7.0..=10.0).contains(&b) => Ok(2),
            b => Err(invalid(format!("beta {b} outside [0, 10]"))),
        }
    }
}

/// Weighted mean of per-interval mean fidelities; empty intervals drop out
/// of both numerator and denominator.
pub fn weighted_sum_fidelity(fidelities: &[f64], betas: &[f64], weights: &BetaWeights) -> Result<f64> {
    if fidelities.len() != betas.len() {
        return Err(Error::DimensionMismatch { expected: betas.len(), got: fidelities.len() });
    }
    let mut sums = [0.0; 3];
    let mut counts = [0usize; 3];
    for (&f, &b) in fidelities.iter().zip(betas) {
        let k = BetaWeights::interval(b)?;
        sums[k] += f;
        counts[k] += 1;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..3 {
        if counts[k] > 0 {
            num += weights.weights[k] * sums[k] / counts[k] as f64;
            den += weights.weights[k];
        }
    }
    if den == 0.0 {
        return Err(invalid("no beta interval is populated"));
    }
    Ok(num / den)
}

/// `Σ_j ⟨0|V†(θ_j) H_j V(θ_j)|0⟩`.
pub fn vqe_energy(hamiltonians: &[PauliSum], genome: &CircuitGenome, params: &ParameterTable) -> Result<f64> {
    if params.rows() != hamiltonians.len() {
        return Err(Error::DimensionMismatch { expected: hamiltonians.len(), got: params.rows() });
    }
    let zero = Statevector::zero(genome.num_qubits());
    let mut total = 0.0;
    for (h, theta) in hamiltonians.iter().zip(params.iter_rows()) {
        if h.num_qubits() != genome.num_qubits() {
            return Err(Error::DimensionMismatch { expected: genome.num_qubits(), got: h.num_qubits() });
        }
        total += genome.bind_and_run(theta, &zero, false)?.expectation(h)?;
    }
    Ok(total)
}

/// `p(0) - p(1)` on one qubit.
pub fn magnetization(state: &Statevector, qubit: usize) -> Result<f64> {
    Ok(state.probability(qubit, false)? - state.probability(qubit, true)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{Gene, GeneKind};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn genome(n: usize, genes: &[(GeneKind, &[usize])]) -> CircuitGenome {
        CircuitGenome::new(n, genes.iter().map(|(k, q)| Gene::new(*k, q).unwrap()).collect()).unwrap()
    }

    fn hadamard() -> DenseOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DenseOperator::new(DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)],
        ))
    }

    #[test]
    fn perfect_and_orthogonal_kernels() {
        let zero = Statevector::zero(1);
        let v = genome(1, &[(GeneKind::H, &[0])]);
        assert_abs_diff_eq!(kernel(&Target::Unitary(hadamard()), &v, &[], &zero).unwrap(), 1.0, epsilon = 1e-14);
        let x = DenseOperator::new(DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ));
        assert_abs_diff_eq!(kernel(&Target::Unitary(x), &CircuitGenome::empty(1), &[], &zero).unwrap(), 0.0);
    }

    #[test]
    fn loss_is_mean_infidelity() {
        let zero = Statevector::zero(1);
        let plus = genome(1, &[(GeneKind::H, &[0])]).bind_and_run(&[], &zero, false).unwrap();
        // State targets |0⟩ and |+⟩ against the empty circuit: kernels 1 and 0.5.
        let targets = vec![Target::State(zero.clone()), Target::State(plus)];
        let loss = multi_target_loss(&targets, &CircuitGenome::empty(1), &ParameterTable::zeros(2, 0), &zero).unwrap();
        assert_abs_diff_eq!(loss, 0.25, epsilon = 1e-14);
        assert!(multi_target_loss(&[], &CircuitGenome::empty(1), &ParameterTable::zeros(0, 0), &zero).is_err());
    }

    #[test]
    fn risk_edge_cases() {
        let zero = Statevector::zero(1);
        let one = Statevector::basis(1, 1).unwrap();
        let empty = CircuitGenome::empty(1);
        let p = ParameterTable::zeros(1, 0);
        assert_abs_diff_eq!(
            expected_risk(&[Target::State(zero.clone())], &empty, &p, &zero).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(expected_risk(&[Target::State(one)], &empty, &p, &zero).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let p0 = Statevector::zero(1).projector();
        let p1 = Statevector::basis(1, 1).unwrap().projector();
        let mixed = DenseOperator::from_diagonal(&[0.5, 0.5]);
        assert_abs_diff_eq!(uhlmann_fidelity(&p0, &p0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(uhlmann_fidelity(&p0, &p1).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(uhlmann_fidelity(&mixed, &p0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(uhlmann_fidelity(&p0, &mixed).unwrap(), 0.5, epsilon = 1e-12);
        let bad = DenseOperator::from_diagonal(&[1.5, -0.5]);
        assert!(uhlmann_fidelity(&bad, &p0).is_err());
    }

    #[test]
    fn purity_examples() {
        assert_abs_diff_eq!(purity(&Statevector::zero(2).projector()).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(purity(&DenseOperator::from_diagonal(&[0.25; 4])).unwrap(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn weighted_sum_examples() {
        let w = BetaWeights::default();
        let betas = [0.0, 2.0, 5.0, 8.0, 10.0];
        assert_abs_diff_eq!(weighted_sum_fidelity(&[1.0; 5], &betas, &w).unwrap(), 1.0, epsilon = 1e-15);
        // Interval means 0.9, 0.8, 0.7.
        let f = weighted_sum_fidelity(&[0.85, 0.95, 0.8, 0.6, 0.8], &betas, &w).unwrap();
        assert_abs_diff_eq!(f, (2.2 * 0.9 + 1.6 * 0.8 + 0.9 * 0.7) / 4.7, epsilon = 1e-14);
        assert_abs_diff_eq!(weighted_sum_fidelity(&[0.5, 0.5], &[0.0, 3.9], &w).unwrap(), 0.5);
        assert!(weighted_sum_fidelity(&[], &[], &w).is_err());
        assert!(weighted_sum_fidelity(&[1.0], &[10.5], &w).is_err());
    }

    #[test]
    fn weighted_sum_scale_invariant() {
        let betas = [0.5, 4.5, 9.0];
        let fids = [0.3, 0.6, 0.9];
        let a = weighted_sum_fidelity(&fids, &betas, &BetaWeights::default()).unwrap();
        let b = weighted_sum_fidelity(&fids, &betas, &BetaWeights { weights: [22.0, 16.0, 9.0] }).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
    }

    #[test]
    fn vqe_energy_examples() {
        let z = PauliSum::new(1, vec![(1.0, "Z".parse().unwrap())]).unwrap();
        let e = vqe_energy(std::slice::from_ref(&z), &CircuitGenome::empty(1), &ParameterTable::zeros(1, 0)).unwrap();
        assert_abs_diff_eq!(e, 1.0);
        let rx = genome(1, &[(GeneKind::Rx, &[0])]);
        let e =
            vqe_energy(std::slice::from_ref(&z), &rx, &ParameterTable::new(1, 1, vec![std::f64::consts::PI]).unwrap())
                .unwrap();
        assert_abs_diff_eq!(e, -1.0, epsilon = 1e-14);
        let zz = PauliSum::new(2, vec![(1.0, "ZZ".parse().unwrap())]).unwrap();
        assert!(vqe_energy(&[zz], &rx, &ParameterTable::zeros(1, 1)).is_err());
    }

    #[test]
    fn magnetization_examples() {
        let wall = Statevector::basis(2, 1).unwrap();
        assert_abs_diff_eq!(magnetization(&wall, 0).unwrap(), -1.0);
        assert_abs_diff_eq!(magnetization(&wall, 1).unwrap(), 1.0);
        let plus = genome(1, &[(GeneKind::H, &[0])]).bind_and_run(&[], &Statevector::zero(1), false).unwrap();
        assert_abs_diff_eq!(magnetization(&plus, 0).unwrap(), 0.0, epsilon = 1e-15);
        assert!(magnetization(&plus, 1).is_err());
    }

    #[test]
    fn target_set_split_validation() {
        let t = || Target::State(Statevector::zero(1));
        assert!(TargetSet::new(vec![t(), t()], vec![0], vec![1]).is_ok());
        assert!(TargetSet::new(vec![t(), t()], vec![0], vec![0, 1]).is_err());
        assert!(TargetSet::new(vec![t(), t()], vec![0], vec![]).is_err());
        assert!(TargetSet::new(vec![t(), Target::State(Statevector::zero(2))], vec![0, 1], vec![]).is_err());
    }
}
