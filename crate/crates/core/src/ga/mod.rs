//! Genetic search over circuit structures with variational parameter
//! training as the fitness evaluation.
//!
//! One search runs:
//! 1. `pop_size` random genomes at the target depth;
//! 2. per generation, every new genome gets fresh parameters trained for
//!    `iters` steps per target, and the fittest individual is tracked; the
//!    search stops as soon as it meets the threshold;
//! 3. otherwise the next generation keeps the elites unchanged and fills the
//!    rest with mutated midpoint-crossover children of fitness-proportionally
//!    drawn parents;
//! 4. if no generation passes, the best circuit gets a final training stage
//!    of `final_iters` steps per target, warm-started from its parameters.

mod checkpoint;
mod operators;
mod problem;

pub use checkpoint::{Checkpoint, IndividualRecord};
pub use operators::{crossover, mutate, select_elite};
pub use problem::{Aggregate, CompilationProblem, Problem, VqeProblem};

use std::path::PathBuf;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{expected_risk, ParameterTable, PreparedTarget, Target};
use crate::error::{invalid, Result};
use crate::genome::CircuitGenome;
use crate::opt::{vqa_optimize, AdamConfig};
use crate::rng::stream;
use crate::sim::Statevector;

const TAG_INIT: u64 = 1;
const TAG_EVAL: u64 = 2;
const TAG_BREED: u64 = 3;
const TAG_TEST: u64 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub pop_size: usize,
    pub generations: usize,
    /// Adam steps per target when scoring a genome.
    pub iters: usize,
    pub threshold: f64,
    pub depth: usize,
    pub mutation_rate: f64,
    pub elite_count: usize,
    /// Steps per target in the final training stage.
    pub final_iters: usize,
    pub seed: u64,
    pub adam: AdamConfig,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            pop_size: 8,
            generations: 10,
            iters: 100,
            threshold: 0.01,
            depth: 4,
            mutation_rate: 0.01,
            elite_count: 2,
            final_iters: 1000,
            seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return Err(invalid(format!("pop_size must be even and >= 2, got {}", self.pop_size)));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(invalid(format!("threshold must lie in (0, 1), got {}", self.threshold)));
        }
        if self.elite_count == 0 || self.elite_count > self.pop_size {
            return Err(invalid(format!("elite_count must lie in 1..={}", self.pop_size)));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(invalid("mutation_rate must lie in [0, 1]"));
        }
        if self.generations == 0 || self.iters == 0 || self.depth == 0 {
            return Err(invalid("generations, iters and depth must be positive"));
        }
        Ok(())
    }
}

/// A scored genome with its trained parameter rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genome: CircuitGenome,
    pub params: ParameterTable,
    pub losses: Vec<f64>,
    pub fitness: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinalStage {
    pub fitness_before: f64,
    pub fitness_after: f64,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best: Individual,
    pub history: Vec<GenerationRecord>,
    /// Whether the best individual meets the threshold.
    pub passed: bool,
    /// Present when the generations ran out without passing.
    pub final_stage: Option<FinalStage>,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Written after every generation.
    pub checkpoint_path: Option<PathBuf>,
    pub resume: Option<Checkpoint>,
}

/// Trains fresh parameters for every target and scores the genome.
pub fn evaluate_fitness<R: Rng + ?Sized>(
    problem: &dyn Problem,
    genome: &CircuitGenome,
    cfg: &GaConfig,
    rng: &mut R,
) -> Result<Individual> {
    let init = ParameterTable::random(problem.num_targets(), genome.param_count(), rng);
    let trained = (0..problem.num_targets())
        .into_par_iter()
        .map(|j| problem.train(genome, j, init.row(j), cfg.iters, cfg.threshold))
        .collect::<Result<Vec<_>>>()?;
    let (rows, losses): (Vec<_>, Vec<_>) = trained.into_iter().unzip();
    let params = ParameterTable::from_rows(rows, genome.param_count())?;
    let fitness = problem.fitness(&losses)?;
    Ok(Individual { genome: genome.clone(), params, losses, fitness })
}

enum Slot {
    Elite(Individual),
    Fresh(CircuitGenome),
}

fn evaluate_generation(
    problem: &dyn Problem,
    slots: Vec<Slot>,
    generation: usize,
    cfg: &GaConfig,
) -> Result<Vec<Individual>> {
    slots
        .into_par_iter()
        .enumerate()
        .map(|(i, slot)| match slot {
            Slot::Elite(ind) => Ok(ind),
            Slot::Fresh(g) => {
                let mut rng = stream(cfg.seed, &[TAG_EVAL, generation as u64, i as u64]);
                evaluate_fitness(problem, &g, cfg, &mut rng)
            }
        })
        .collect()
}

fn breed(pop: &[Individual], generation: usize, cfg: &GaConfig) -> Result<Vec<Slot>> {
    let mut rng = stream(cfg.seed, &[TAG_BREED, generation as u64]);
    let fitness: Vec<f64> = pop.iter().map(|p| p.fitness).collect();
    let mut next: Vec<Slot> =
        select_elite(&fitness, cfg.elite_count).into_iter().map(|i| Slot::Elite(pop[i].clone())).collect();
    let min = fitness.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = if min < 0.0 { -min } else { 0.0 };
    let weights: Vec<f64> = fitness.iter().map(|f| f + shift).collect();
    let roulette = if weights.iter().sum::<f64>() > 0.0 { WeightedIndex::new(&weights).ok() } else { None };
    let pick = |rng: &mut crate::rng::Stream| match &roulette {
        Some(w) => w.sample(rng),
        None => rng.random_range(0..pop.len()),
    };
    while next.len() < cfg.pop_size {
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let (c1, c2) = crossover(&pop[a].genome, &pop[b].genome)?;
        next.push(Slot::Fresh(mutate(&c1, cfg.mutation_rate, &mut rng)?));
        if next.len() < cfg.pop_size {
            next.push(Slot::Fresh(mutate(&c2, cfg.mutation_rate, &mut rng)?));
        }
    }
    Ok(next)
}

fn record(generation: usize, pop: &[Individual]) -> GenerationRecord {
    GenerationRecord {
        generation,
        best_fitness: pop.iter().map(|p| p.fitness).fold(f64::NEG_INFINITY, f64::max),
        mean_fitness: pop.iter().map(|p| p.fitness).sum::<f64>() / pop.len() as f64,
    }
}

fn fittest(pop: &[Individual]) -> &Individual {
    let fitness: Vec<f64> = pop.iter().map(|p| p.fitness).collect();
    &pop[select_elite(&fitness, 1)[0]]
}

/// Runs the full search. Results depend only on `(problem, cfg)`, never on
/// the rayon thread count.
pub fn ga_vqa_search(problem: &dyn Problem, cfg: &GaConfig, options: &SearchOptions) -> Result<SearchOutcome> {
    cfg.validate()?;
    if problem.num_targets() == 0 {
        return Err(invalid("no training targets"));
    }
    let (mut generation, mut pop, mut history) = match &options.resume {
        Some(cp) => cp.restore(cfg)?,
        None => {
            let mut rng = stream(cfg.seed, &[TAG_INIT]);
            let slots = (0..cfg.pop_size)
                .map(|_| CircuitGenome::random(problem.num_qubits(), cfg.depth, &mut rng).map(Slot::Fresh))
                .collect::<Result<Vec<_>>>()?;
            let pop = evaluate_generation(problem, slots, 0, cfg)?;
            let history = vec![record(0, &pop)];
            (0, pop, history)
        }
    };

    loop {
        if let Some(path) = &options.checkpoint_path {
            Checkpoint::capture(cfg, generation, &pop, &history).write(path)?;
        }
        let best = fittest(&pop);
        if problem.passes(best.fitness, &best.losses, cfg.threshold) {
            return Ok(SearchOutcome { best: best.clone(), history, passed: true, final_stage: None });
        }
        if generation + 1 >= cfg.generations {
            break;
        }
        let slots = breed(&pop, generation, cfg)?;
        generation += 1;
        pop = evaluate_generation(problem, slots, generation, cfg)?;
        history.push(record(generation, &pop));
    }

    let mut best = fittest(&pop).clone();
    let before = best.fitness;
    let refined = (0..problem.num_targets())
        .into_par_iter()
        .map(|j| problem.train(&best.genome, j, best.params.row(j), cfg.final_iters, cfg.threshold))
        .collect::<Result<Vec<_>>>()?;
    for (j, (theta, loss)) in refined.into_iter().enumerate() {
        if loss <= best.losses[j] {
            best.params.row_mut(j).copy_from_slice(&theta);
            best.losses[j] = loss;
        }
    }
    best.fitness = problem.fitness(&best.losses)?;
    let passed = problem.passes(best.fitness, &best.losses, cfg.threshold);
    Ok(SearchOutcome {
        final_stage: Some(FinalStage { fitness_before: before, fitness_after: best.fitness }),
        best,
        history,
        passed,
    })
}

/// Held-out evaluation of a frozen structure.
#[derive(Clone, Debug)]
pub struct TestRisk {
    pub risk: f64,
    pub mean_fidelity: f64,
    pub params: ParameterTable,
}

/// Retrains fresh parameters on each test target with the structure frozen,
/// then reports the expected risk over the test set.
pub fn test_risk(
    genome: &CircuitGenome,
    test_targets: &[Target],
    reference: &Statevector,
    cfg: &GaConfig,
) -> Result<TestRisk> {
    if test_targets.is_empty() {
        return Err(invalid("empty test set"));
    }
    let m = genome.param_count();
    let trained = test_targets
        .par_iter()
        .enumerate()
        .map(|(j, t)| {
            let prepared = PreparedTarget::new(t, reference)?;
            let mut rng = stream(cfg.seed, &[TAG_TEST, j as u64]);
            let init = ParameterTable::random(1, m, &mut rng);
            let out = vqa_optimize(&prepared.objective(genome), init.row(0), cfg.iters, cfg.threshold, cfg.adam)?;
            Ok((out.params, 1.0 - out.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, fids): (Vec<_>, Vec<_>) = trained.into_iter().unzip();
    let params = ParameterTable::from_rows(rows, m)?;
    let risk = expected_risk(test_targets, genome, &params, reference)?;
    Ok(TestRisk { risk, mean_fidelity: fids.iter().sum::<f64>() / fids.len() as f64, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::haar_random_unitary;

    fn problem(seed: u64) -> CompilationProblem {
        let mut rng = stream(seed, &[99]);
        let targets: Vec<Target> = (0..2).map(|_| Target::Unitary(haar_random_unitary(4, &mut rng).unwrap())).collect();
        CompilationProblem::new(&targets, &Statevector::zero(2), Aggregate::Mean, AdamConfig::default()).unwrap()
    }

    fn cfg() -> GaConfig {
        GaConfig {
            pop_size: 4,
            generations: 3,
            iters: 5,
            threshold: 1e-6,
            depth: 3,
            final_iters: 10,
            seed: 11,
            ..GaConfig::default()
        }
    }

    fn run_with_threads(n: usize) -> SearchOutcome {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        let p = problem(1);
        pool.install(|| ga_vqa_search(&p, &cfg(), &SearchOptions::default()).unwrap())
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        assert!(GaConfig { pop_size: 3, ..cfg() }.validate().is_err());
        assert!(GaConfig { threshold: 1.0, ..cfg() }.validate().is_err());
        assert!(GaConfig { elite_count: 5, ..cfg() }.validate().is_err());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let a = run_with_threads(1);
        let b = run_with_threads(4);
        assert_eq!(a.best, b.best);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn best_fitness_never_drops_between_generations() {
        let out = run_with_threads(2);
        assert_eq!(out.history.len(), 3);
        for w in out.history.windows(2) {
            assert!(w[1].best_fitness >= w[0].best_fitness);
        }
        let stage = out.final_stage.unwrap();
        assert!(stage.fitness_after >= stage.fitness_before);
    }

    #[test]
    fn resume_matches_uninterrupted_run() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");
        let p = problem(1);
        let short = GaConfig { generations: 2, ..cfg() };
        let opts = SearchOptions { checkpoint_path: Some(path.clone()), resume: None };
        ga_vqa_search(&p, &short, &opts).unwrap();
        let cp = Checkpoint::load(&path).unwrap();
        assert_eq!(cp.generation, 1);
        let resumed = ga_vqa_search(&p, &cfg(), &SearchOptions { checkpoint_path: None, resume: Some(cp) }).unwrap();
        let full = ga_vqa_search(&p, &cfg(), &SearchOptions::default()).unwrap();
        assert_eq!(resumed.best, full.best);
        assert_eq!(resumed.history, full.history);
    }

    #[test]
    fn resume_rejects_changed_settings() {
        let p = problem(1);
        let pop = vec![
            evaluate_fitness(
                &p,
                &CircuitGenome::random(2, 3, &mut stream(0, &[])).unwrap(),
                &cfg(),
                &mut stream(1, &[])
            )
            .unwrap();
            4
        ];
        let cp = Checkpoint::capture(&cfg(), 0, &pop, &[record(0, &pop)]);
        let other = GaConfig { seed: 12, ..cfg() };
        assert!(cp.restore(&other).is_err());
        assert!(cp.restore(&GaConfig { generations: 9, ..cfg() }).is_ok());
    }

    #[test]
    fn held_out_risk_is_bounded() {
        let mut rng = stream(5, &[]);
        let g = CircuitGenome::random(2, 3, &mut rng).unwrap();
        let tests: Vec<Target> = (0..2).map(|_| Target::Unitary(haar_random_unitary(4, &mut rng).unwrap())).collect();
        let r = test_risk(&g, &tests, &Statevector::zero(2), &cfg()).unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&r.risk));
        assert!((r.risk - (1.0 - r.mean_fidelity)).abs() < 1e-9);
    }
}
