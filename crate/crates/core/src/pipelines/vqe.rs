use serde_json::Map;

use super::{RunOptions, RunResult};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::ga::{ga_vqa_search, VqeProblem};
use crate::opt::NelderMeadOptions;
use crate::sim::{eigh, PauliSum};
use crate::targets::{load_pauli_hamiltonians, parse_pauli_hamiltonians};

/// `Z0 Z1 + 0.5 X0`, used when no Hamiltonian file is given.
pub fn toy_hamiltonians() -> Vec<PauliSum> {
    parse_pauli_hamiltonians("ZZ 1.0\nXI 0.5\n").expect("built-in Hamiltonian parses")
}

/// Ground-state search over a family of Hamiltonians with one shared
/// structure and Nelder–Mead parameter training per Hamiltonian.
pub fn run_vqe(cfg: &RunConfig, options: &RunOptions) -> Result<RunResult> {
    let hs = match &cfg.hamiltonians {
        Some(path) => load_pauli_hamiltonians(path)?,
        None => toy_hamiltonians(),
    };
    let n = hs[0].num_qubits();
    let mut cfg = cfg.clone();
    if cfg.qubits != n {
        if cfg.hamiltonians.is_none() {
            return Err(Error::Config {
                key: "qubits".into(),
                msg: format!("the built-in Hamiltonian acts on {n} qubits"),
            });
        }
        cfg.qubits = n;
    }
    let ground = hs.iter().map(|h| eigh(&h.to_dense()).map(|e| e.values[0])).collect::<Result<Vec<_>>>()?;
    let problem = VqeProblem::new(hs, ground.clone(), NelderMeadOptions::default(), cfg.evals_per_iter)?;
    let search = ga_vqa_search(&problem, &cfg.ga(), &options.search())?;

    let energies = search.best.losses.clone();
    let gap: Vec<f64> = energies.iter().zip(&ground).map(|(e, g)| e - g).collect();
    let mut summary = Map::new();
    summary.insert("max_gap".into(), gap.iter().copied().fold(f64::NEG_INFINITY, f64::max).into());
    summary.insert("energy_sum".into(), energies.iter().sum::<f64>().into());
    let columns = vec![
        ("index".to_string(), (0..energies.len()).map(|i| i as f64).collect()),
        ("ground_energy".to_string(), ground),
        ("best_energy".to_string(), energies),
        ("gap".to_string(), gap),
    ];
    RunResult::new(&cfg, columns, summary, &search)
}
