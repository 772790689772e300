use crate::cost::{weighted_sum_fidelity, BetaWeights, PreparedTarget, Target};
use crate::error::{invalid, Error, Result};
use crate::genome::CircuitGenome;
use crate::opt::{nelder_mead, vqa_optimize, AdamConfig, NelderMeadOptions, Objective};
use crate::sim::{PauliSum, Statevector};

/// A multi-target workload the search can train and rank circuits on.
///
/// Each target has its own parameter row; `loss` is minimized per target and
/// `fitness` (higher is better) aggregates the per-target losses.
pub trait Problem: Sync {
    fn num_qubits(&self) -> usize;

    fn num_targets(&self) -> usize;

    /// Per-target loss at fixed parameters.
    fn loss(&self, genome: &CircuitGenome, target: usize, theta: &[f64]) -> Result<f64>;

    /// Trains one target's parameters from `init`; returns the best
    /// parameters seen and their loss.
    fn train(
        &self,
        genome: &CircuitGenome,
        target: usize,
        init: &[f64],
        iters: usize,
        threshold: f64,
    ) -> Result<(Vec<f64>, f64)>;

    fn fitness(&self, losses: &[f64]) -> Result<f64>;

    /// Termination test for the search.
    fn passes(&self, fitness: f64, _losses: &[f64], threshold: f64) -> bool {
        1.0 - fitness <= threshold
    }
}

/// How per-target fidelities are combined into a fitness.
#[derive(Clone, Debug, PartialEq)]
pub enum Aggregate {
    Mean,
    /// Weighted mean over β intervals; `betas[j]` labels target `j`.
    WeightedBeta {
        betas: Vec<f64>,
        weights: BetaWeights,
    },
}

/// Kernel-based compilation of unitary or state targets.
pub struct CompilationProblem {
    num_qubits: usize,
    targets: Vec<PreparedTarget>,
    aggregate: Aggregate,
    adam: AdamConfig,
}

impl CompilationProblem {
    pub fn new(targets: &[Target], reference: &Statevector, aggregate: Aggregate, adam: AdamConfig) -> Result<Self> {
        if targets.is_empty() {
            return Err(invalid("no training targets"));
        }
        if let Aggregate::WeightedBeta { betas, .. } = &aggregate {
            if betas.len() != targets.len() {
                return Err(Error::DimensionMismatch { expected: targets.len(), got: betas.len() });
            }
        }
        let prepared = targets
            .iter()
            .map(|t| {
                if t.num_qubits() != reference.num_qubits() {
                    return Err(Error::DimensionMismatch { expected: reference.num_qubits(), got: t.num_qubits() });
                }
                PreparedTarget::new(t, reference)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompilationProblem { num_qubits: reference.num_qubits(), targets: prepared, aggregate, adam })
    }

    pub fn targets(&self) -> &[PreparedTarget] {
        &self.targets
    }
}

impl Problem for CompilationProblem {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn num_targets(&self) -> usize {
        self.targets.len()
    }

    fn loss(&self, genome: &CircuitGenome, target: usize, theta: &[f64]) -> Result<f64> {
        Ok(1.0 - self.targets[target].kernel(genome, theta)?)
    }

    fn train(
        &self,
        genome: &CircuitGenome,
        target: usize,
        init: &[f64],
        iters: usize,
        threshold: f64,
    ) -> Result<(Vec<f64>, f64)> {
        let obj = self.targets[target].objective(genome);
        let out = vqa_optimize(&obj, init, iters, threshold, self.adam)?;
        Ok((out.params, out.value))
    }

    fn fitness(&self, losses: &[f64]) -> Result<f64> {
        let fids: Vec<f64> = losses.iter().map(|l| 1.0 - l).collect();
        match &self.aggregate {
            Aggregate::Mean => Ok(fids.iter().sum::<f64>() / fids.len() as f64),
            Aggregate::WeightedBeta { betas, weights } => weighted_sum_fidelity(&fids, betas, weights),
        }
    }
}

/// Ground-state search over a family of Hamiltonians (`Σ_j ⟨H_j⟩`).
pub struct VqeProblem {
    hamiltonians: Vec<PauliSum>,
    ground: Vec<f64>,
    options: NelderMeadOptions,
    evals_per_iter: usize,
}

impl VqeProblem {
    /// `ground` holds the exact ground energies, used only for termination.
    /// A training call with `iters` iterations gets `iters * evals_per_iter`
    /// objective evaluations; `options.max_evals` is ignored.
    pub fn new(
        hamiltonians: Vec<PauliSum>,
        ground: Vec<f64>,
        options: NelderMeadOptions,
        evals_per_iter: usize,
    ) -> Result<Self> {
        let n = hamiltonians.first().map(PauliSum::num_qubits).ok_or_else(|| invalid("no Hamiltonians"))?;
        if let Some(h) = hamiltonians.iter().find(|h| h.num_qubits() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: h.num_qubits() });
        }
        if ground.len() != hamiltonians.len() {
            return Err(Error::DimensionMismatch { expected: hamiltonians.len(), got: ground.len() });
        }
        Ok(VqeProblem { hamiltonians, ground, options, evals_per_iter })
    }
}

struct Energy<'a> {
    h: &'a PauliSum,
    genome: &'a CircuitGenome,
}

impl Objective for Energy<'_> {
    fn evaluate(&self, params: &[f64]) -> Result<f64> {
        let zero = Statevector::zero(self.genome.num_qubits());
        self.genome.bind_and_run(params, &zero, false)?.expectation(self.h)
    }

    fn param_count(&self) -> usize {
        self.genome.param_count()
    }
}

impl Problem for VqeProblem {
    fn num_qubits(&self) -> usize {
        self.hamiltonians[0].num_qubits()
    }

    fn num_targets(&self) -> usize {
        self.hamiltonians.len()
    }

    fn loss(&self, genome: &CircuitGenome, target: usize, theta: &[f64]) -> Result<f64> {
        Energy { h: &self.hamiltonians[target], genome }.evaluate(theta)
    }

    /// Nelder–Mead; `threshold` is unused.
    fn train(
        &self,
        genome: &CircuitGenome,
        target: usize,
        init: &[f64],
        iters: usize,
        _threshold: f64,
    ) -> Result<(Vec<f64>, f64)> {
        let obj = Energy { h: &self.hamiltonians[target], genome };
        let start = obj.evaluate(init)?;
        let budget = self.evals_per_iter.saturating_mul(iters.max(1)).max(init.len() + 1);
        let out = nelder_mead(&obj, init, NelderMeadOptions { max_evals: budget, ..self.options })?;
        if out.value <= start {
            Ok((out.params, out.value))
        } else {
            Ok((init.to_vec(), start))
        }
    }

    fn fitness(&self, losses: &[f64]) -> Result<f64> {
        Ok(-losses.iter().sum::<f64>())
    }

    /// Passes when every energy is within `threshold` of its ground energy.
    fn passes(&self, _fitness: f64, losses: &[f64], threshold: f64) -> bool {
        losses.iter().zip(&self.ground).all(|(e, g)| e - g <= threshold)
    }
}
