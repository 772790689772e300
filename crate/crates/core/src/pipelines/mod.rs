//! End-to-end experiment drivers. Each returns a [`RunResult`] holding a
//! table of series, a summary, the GA history and the best circuit.

mod benchmark;
mod dynamics;
mod thermal;
mod vqe;

pub use benchmark::run_benchmark;
pub use dynamics::run_dynamics;
pub use thermal::run_thermal;
pub use vqe::{run_vqe, toy_hamiltonians};

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Experiment, RunConfig};
use crate::error::{invalid, Result};
use crate::ga::{Checkpoint, GenerationRecord, SearchOptions, SearchOutcome};
use crate::genome::CircuitGenome;

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CIRCUIT_FILE: &str = "best_circuit.txt";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";

/// Checkpointing for the GA stage of a run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub checkpoint_path: Option<PathBuf>,
    pub resume: Option<Checkpoint>,
}

impl RunOptions {
    fn search(&self) -> SearchOptions {
        SearchOptions { checkpoint_path: self.checkpoint_path.clone(), resume: self.resume.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub config: RunConfig,
    /// Named, equal-length columns.
    pub columns: Vec<(String, Vec<f64>)>,
    pub summary: Map<String, Value>,
    pub history: Vec<GenerationRecord>,
    pub best_circuit: CircuitGenome,
    /// Whether the GA stage met its threshold.
    pub passed: bool,
    pub started_unix: u64,
    pub finished_unix: u64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    program: &'static str,
    version: &'static str,
    experiment: Experiment,
    seed: u64,
    config: &'a RunConfig,
    passed: bool,
    summary: &'a Map<String, Value>,
    history: &'a [GenerationRecord],
    columns: Vec<&'a str>,
    started_unix: u64,
    finished_unix: u64,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// C-style `%.12e`, e.g. `1.234567890123e+00`.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

impl RunResult {
    fn new(
        config: &RunConfig,
        columns: Vec<(String, Vec<f64>)>,
        summary: Map<String, Value>,
        search: &SearchOutcome,
    ) -> Result<Self> {
        let mut result = RunResult {
            config: config.clone(),
            columns,
            summary,
            history: search.history.clone(),
            best_circuit: search.best.genome.clone(),
            passed: search.passed,
            started_unix: 0,
            finished_unix: 0,
        };
        result.check()?;
        let m = result.best_circuit.metrics();
        let s = &mut result.summary;
        s.insert("depth".into(), m.depth.into());
        s.insert("one_qubit_gates".into(), m.one_qubit_gates.into());
        s.insert("two_qubit_gates".into(), m.two_qubit_gates.into());
        s.insert("param_count".into(), m.param_count.into());
        s.insert("generations_run".into(), search.history.len().into());
        if let Some(f) = &search.final_stage {
            s.insert("fitness_before_final_stage".into(), f.fitness_before.into());
            s.insert("fitness_after_final_stage".into(), f.fitness_after.into());
        }
        Ok(result)
    }

    fn check(&self) -> Result<()> {
        let n = self.columns.first().map_or(0, |c| c.1.len());
        if let Some((name, col)) = self.columns.iter().find(|c| c.1.len() != n) {
            return Err(invalid(format!("column {name} has {} rows, expected {n}", col.len())));
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.0 == name).map(|c| c.1.as_slice())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.1.len())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.0.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for r in 0..self.rows() {
            let row: Vec<String> = self.columns.iter().map(|c| format_sci(c.1[r])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn manifest_json(&self) -> Result<String> {
        let m = Manifest {
            program: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            experiment: self.config.experiment,
            seed: self.config.seed,
            config: &self.config,
            passed: self.passed,
            summary: &self.summary,
            history: &self.history,
            columns: self.columns.iter().map(|c| c.0.as_str()).collect(),
            started_unix: self.started_unix,
            finished_unix: self.finished_unix,
        };
        Ok(serde_json::to_string_pretty(&m)? + "\n")
    }

    /// Writes the three output files into `dir`, each through a temporary
    /// file and a rename.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let files = [
            (RESULTS_FILE, self.to_csv()),
            (MANIFEST_FILE, self.manifest_json()?),
            (CIRCUIT_FILE, self.best_circuit.to_text()),
        ];
        let mut staged = Vec::with_capacity(files.len());
        for (name, body) in files {
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(body.as_bytes())?;
            tmp.as_file().sync_all()?;
            staged.push((tmp, dir.join(name)));
        }
        for (tmp, path) in staged {
            tmp.persist(path).map_err(|e| crate::Error::Io(e.error))?;
        }
        Ok(())
    }
}

/// Runs the driver matching `config.experiment`.
pub fn run(config: &RunConfig, options: &RunOptions) -> Result<RunResult> {
    config.validate()?;
    let started = now();
    let mut result = match config.experiment {
        Experiment::Benchmark => run_benchmark(config, options),
        Experiment::Thermal => run_thermal(config, options),
        Experiment::Dynamics => run_dynamics(config, options),
        Experiment::Vqe => run_vqe(config, options),
    }?;
    result.started_unix = started;
    result.finished_unix = now();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(format_sci(1.234567890123), "1.234567890123e+00");
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(format_sci(3e120), "3.000000000000e+120");
        assert_eq!(format_sci(f64::NAN), "nan");
    }
}
