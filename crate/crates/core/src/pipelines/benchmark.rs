use serde_json::Map;

use super::{RunOptions, RunResult};
use crate::config::RunConfig;
use crate::error::Result;
use crate::ga::{ga_vqa_search, test_risk, Aggregate, CompilationProblem};
use crate::sim::Statevector;
use crate::targets::haar_target_set;

/// Haar-random compilation: GA search on the training split, then risk on
/// the held-out split with the structure frozen.
pub fn run_benchmark(cfg: &RunConfig, options: &RunOptions) -> Result<RunResult> {
    let set = haar_target_set(cfg.qubits, cfg.n_train, cfg.n_test, cfg.seed)?;
    let reference = Statevector::zero(cfg.qubits);
    let problem = CompilationProblem::new(&set.train(), &reference, Aggregate::Mean, cfg.adam)?;
    let ga = cfg.ga();
    let search = ga_vqa_search(&problem, &ga, &options.search())?;
    let risk = test_risk(&search.best.genome, &set.test(), &reference, &ga)?;

    let columns = vec![
        ("generation".to_string(), search.history.iter().map(|h| h.generation as f64).collect()),
        ("best_fidelity".to_string(), search.history.iter().map(|h| h.best_fitness).collect()),
        ("mean_fidelity".to_string(), search.history.iter().map(|h| h.mean_fitness).collect()),
    ];
    let mut summary = Map::new();
    summary.insert("train_fidelity".into(), search.best.fitness.into());
    summary.insert("test_risk".into(), risk.risk.into());
    summary.insert("test_fidelity".into(), risk.mean_fidelity.into());
    RunResult::new(cfg, columns, summary, &search)
}
