use rayon::prelude::*;
use serde_json::Map;

use super::{RunOptions, RunResult};
use crate::config::RunConfig;
use crate::cost::{magnetization, Target};
use crate::error::Result;
use crate::ga::{ga_vqa_search, Aggregate, CompilationProblem, Problem};
use crate::targets::{domain_wall_state, exact_propagators, trotter_states, DynamicsSpec, TrotterOrder};

/// Driven-chain magnetization: exact, Trotter orders 1 and 2, and GA-VQA.
///
/// The search trains on every `train_stride`-th grid point. The winning
/// structure is then fitted at every grid point, warm-started from the
/// parameters of the nearest training point.
pub fn run_dynamics(cfg: &RunConfig, options: &RunOptions) -> Result<RunResult> {
    let [j, u, h] = cfg.couplings;
    let spec = DynamicsSpec {
        total_time: cfg.total_time,
        steps: cfg.steps,
        substeps: cfg.substeps,
        trotter_r: cfg.trotter_r,
        ..DynamicsSpec::new(cfg.qubits, j, u, h)
    };
    spec.validate()?;
    let q = cfg.measure_qubit;
    let psi0 = domain_wall_state(cfg.qubits)?;
    let exact_states = exact_propagators(&spec)?.iter().map(|u| psi0.apply_operator(u)).collect::<Result<Vec<_>>>()?;
    let m_exact = exact_states.iter().map(|s| magnetization(s, q)).collect::<Result<Vec<_>>>()?;
    let m_t1 = trotter_states(&spec, &psi0, TrotterOrder::First)?
        .iter()
        .map(|s| magnetization(s, q))
        .collect::<Result<Vec<_>>>()?;
    let m_t2 = trotter_states(&spec, &psi0, TrotterOrder::Second)?
        .iter()
        .map(|s| magnetization(s, q))
        .collect::<Result<Vec<_>>>()?;

    let all_targets: Vec<Target> = exact_states.iter().cloned().map(Target::State).collect();
    let mut train_idx: Vec<usize> = (0..=spec.steps).step_by(cfg.train_stride).collect();
    if *train_idx.last().expect("grid has a point") != spec.steps {
        train_idx.push(spec.steps);
    }
    let train: Vec<Target> = train_idx.iter().map(|&i| all_targets[i].clone()).collect();
    let problem = CompilationProblem::new(&train, &psi0, Aggregate::Mean, cfg.adam)?;
    let search = ga_vqa_search(&problem, &cfg.ga(), &options.search())?;

    let best = &search.best;
    let full = CompilationProblem::new(&all_targets, &psi0, Aggregate::Mean, cfg.adam)?;
    let fitted = (0..=spec.steps)
        .into_par_iter()
        .map(|i| {
            let k = train_idx
                .iter()
                .enumerate()
                .min_by_key(|(_, &t)| t.abs_diff(i))
                .map(|(k, _)| k)
                .expect("training grid is non-empty");
            let (theta, loss) =
                full.train(&best.genome, i, best.params.row(k), cfg.final_iters, cfg.final_threshold)?;
            let state = best.genome.bind_and_run(&theta, &psi0, false)?;
            Ok((magnetization(&state, q)?, 1.0 - loss))
        })
        .collect::<Result<Vec<_>>>()?;
    let m_ga: Vec<f64> = fitted.iter().map(|f| f.0).collect();
    let fid_ga: Vec<f64> = fitted.iter().map(|f| f.1).collect();

    let sq = |m: &[f64]| m.iter().zip(&m_exact).map(|(a, b)| (a - b).powi(2)).collect::<Vec<f64>>();
    let (e1, e2, eg) = (sq(&m_t1), sq(&m_t2), sq(&m_ga));
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let mut summary = Map::new();
    summary.insert("max_sq_err_trotter1".into(), max(&e1).into());
    summary.insert("max_sq_err_trotter2".into(), max(&e2).into());
    summary.insert("max_sq_err_gavqa".into(), max(&eg).into());
    summary.insert("min_fidelity_gavqa".into(), fid_ga.iter().copied().fold(1.0, f64::min).into());
    summary.insert("train_points".into(), train_idx.len().into());
    let columns = vec![
        ("t".to_string(), spec.times()),
        ("m_exact".to_string(), m_exact.clone()),
        ("m_trotter1".to_string(), m_t1),
        ("m_trotter2".to_string(), m_t2),
        ("m_gavqa".to_string(), m_ga),
        ("sq_err_trotter1".to_string(), e1),
        ("sq_err_trotter2".to_string(), e2),
        ("sq_err_gavqa".to_string(), eg),
        ("fidelity_gavqa".to_string(), fid_ga),
    ];
    RunResult::new(cfg, columns, summary, &search)
}
