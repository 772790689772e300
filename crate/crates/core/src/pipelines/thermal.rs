use rayon::prelude::*;
use serde_json::Map;

use super::{RunOptions, RunResult};
use crate::config::{FitnessMode, RunConfig};
use crate::cost::{purity, uhlmann_fidelity, Target};
use crate::error::Result;
use crate::ga::{ga_vqa_search, Aggregate, CompilationProblem};
use crate::sim::{partial_trace_b, Statevector};
use crate::targets::{dense_purified_state, eigenbasis_dephase, gibbs_state, tfd_state, ThermalMethod, ThermalSpec};

/// Thermal-state preparation over a β grid: one shared structure with
/// per-β parameters, scored against the exact Gibbs states.
pub fn run_thermal(cfg: &RunConfig, options: &RunOptions) -> Result<RunResult> {
    let betas = cfg.beta_grid.values();
    let gibbs = betas
        .iter()
        .map(|&b| gibbs_state(&ThermalSpec::new(cfg.qubits, b, cfg.method)?))
        .collect::<Result<Vec<_>>>()?;
    let targets = gibbs
        .iter()
        .map(|g| {
            Ok(Target::State(match cfg.method {
                ThermalMethod::Dense => dense_purified_state(g)?,
                ThermalMethod::Conventional => tfd_state(g)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let width = match cfg.method {
        ThermalMethod::Dense => cfg.qubits,
        ThermalMethod::Conventional => 2 * cfg.qubits,
    };
    let reference = Statevector::zero(width);
    let aggregate = match cfg.fitness {
        FitnessMode::Mean => Aggregate::Mean,
        FitnessMode::Weighted => Aggregate::WeightedBeta { betas: betas.clone(), weights: cfg.weights.clone() },
    };
    let problem = CompilationProblem::new(&targets, &reference, aggregate, cfg.adam)?;
    let search = ga_vqa_search(&problem, &cfg.ga(), &options.search())?;

    let best = &search.best;
    let scored = gibbs
        .par_iter()
        .enumerate()
        .map(|(j, g)| {
            let state = best.genome.bind_and_run(best.params.row(j), &reference, false)?;
            let recovered = match cfg.method {
                ThermalMethod::Dense => eigenbasis_dephase(&state, &g.eigenvectors)?,
                ThermalMethod::Conventional => partial_trace_b(&state.projector(), cfg.qubits)?,
            };
            let fidelity = uhlmann_fidelity(&recovered, &g.rho)?;
            Ok((purity(&g.rho)?, fidelity, purity(&recovered)?, 1.0 - best.losses[j]))
        })
        .collect::<Result<Vec<_>>>()?;

    let pick = |f: fn(&(f64, f64, f64, f64)) -> f64| scored.iter().map(f).collect::<Vec<f64>>();
    let purity_theory = pick(|s| s.0);
    let fidelity = pick(|s| s.1);
    let purity_compiled = pick(|s| s.2);
    let kernel = pick(|s| s.3);
    let sq_err_fidelity: Vec<f64> = fidelity.iter().map(|f| (1.0 - f).powi(2)).collect();
    let sq_err_purity: Vec<f64> = purity_compiled.iter().zip(&purity_theory).map(|(a, b)| (a - b).powi(2)).collect();

    let mut summary = Map::new();
    summary.insert("min_fidelity".into(), fidelity.iter().copied().fold(f64::INFINITY, f64::min).into());
    summary.insert("max_purity_error".into(), sq_err_purity.iter().map(|e| e.sqrt()).fold(0.0, f64::max).into());
    summary.insert("fitness".into(), best.fitness.into());
    let columns = vec![
        ("beta".to_string(), betas),
        ("purity_theory".to_string(), purity_theory),
        ("fidelity".to_string(), fidelity),
        ("purity".to_string(), purity_compiled),
        ("kernel".to_string(), kernel),
        ("sq_err_fidelity".to_string(), sq_err_fidelity),
        ("sq_err_purity".to_string(), sq_err_purity),
    ];
    RunResult::new(cfg, columns, summary, &search)
}
