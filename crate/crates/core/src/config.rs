//! Run configuration. Values resolve in three layers: built-in defaults for
//! the experiment, then a flat TOML file, then command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cost::BetaWeights;
use crate::error::{Error, Result};
use crate::ga::GaConfig;
use crate::opt::AdamConfig;
use crate::targets::ThermalMethod;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Benchmark,
    Thermal,
    Dynamics,
    Vqe,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Benchmark => "benchmark",
            Experiment::Thermal => "thermal",
            Experiment::Dynamics => "dynamics",
            Experiment::Vqe => "vqe",
        })
    }
}

/// Evenly spaced grid written `start:stop:count`, both ends included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.stop } else { self.start + i as f64 * step }).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected start:stop:count, got `{s}`"));
        };
        let start: f64 = a.trim().parse().map_err(|_| format!("bad start `{a}`"))?;
        let stop: f64 = b.trim().parse().map_err(|_| format!("bad stop `{b}`"))?;
        let count: usize = n.trim().parse().map_err(|_| format!("bad count `{n}`"))?;
        if !start.is_finite() || !stop.is_finite() {
            return Err("grid ends must be finite".into());
        }
        if count == 0 {
            return Err("grid count must be at least 1".into());
        }
        if count > 1 && stop <= start {
            return Err("grid stop must exceed start".into());
        }
        Ok(Grid { start, stop, count })
    }
}

impl TryFrom<String> for Grid {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<Grid> for String {
    fn from(g: Grid) -> String {
        g.to_string()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// `J,u,h`.
pub fn parse_couplings(s: &str) -> std::result::Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad coupling `{x}`")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [j, u, h] if v.iter().all(|x| x.is_finite()) => Ok([j, u, h]),
        _ => Err(format!("expected three finite values J,u,h, got `{s}`")),
    }
}

/// How per-target fidelities combine into GA fitness for thermal runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitnessMode {
    Mean,
    Weighted,
}

impl FromStr for FitnessMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mean" => Ok(FitnessMode::Mean),
            "weighted" => Ok(FitnessMode::Weighted),
            _ => Err(format!("expected mean or weighted, got `{s}`")),
        }
    }
}

/// Every setting a run uses. Serialized in full into the run manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub qubits: usize,
    pub depth: usize,
    pub pop_size: usize,
    pub generations: usize,
    pub iters: usize,
    pub final_iters: usize,
    pub threshold: f64,
    pub mutation_rate: f64,
    pub elite_count: usize,
    pub seed: u64,
    pub adam: AdamConfig,
    // benchmark
    pub n_train: usize,
    pub n_test: usize,
    // thermal
    pub method: ThermalMethod,
    pub beta_grid: Grid,
    pub fitness: FitnessMode,
    pub weights: BetaWeights,
    // dynamics
    pub couplings: [f64; 3],
    pub total_time: f64,
    pub steps: usize,
    pub substeps: usize,
    pub trotter_r: usize,
    /// GA trains on every `train_stride`-th grid point.
    pub train_stride: usize,
    pub measure_qubit: usize,
    /// Early-stop loss for the per-point fit after the search.
    pub final_threshold: f64,
    // vqe
    pub hamiltonians: Option<PathBuf>,
    pub evals_per_iter: usize,
}

/// Partial configuration from a file or flags. Unset keys fall through.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub qubits: Option<usize>,
    pub depth: Option<usize>,
    pub pop_size: Option<usize>,
    pub generations: Option<usize>,
    pub iters: Option<usize>,
    pub final_iters: Option<usize>,
    pub threshold: Option<f64>,
    pub mutation_rate: Option<f64>,
    pub elite_count: Option<usize>,
    pub seed: Option<u64>,
    pub learning_rate: Option<f64>,
    pub n_train: Option<usize>,
    pub n_test: Option<usize>,
    pub method: Option<ThermalMethod>,
    pub beta_grid: Option<Grid>,
    pub fitness: Option<FitnessMode>,
    pub weights: Option<[f64; 3]>,
    pub couplings: Option<[f64; 3]>,
    pub total_time: Option<f64>,
    pub steps: Option<usize>,
    pub substeps: Option<usize>,
    pub trotter_r: Option<usize>,
    pub train_stride: Option<usize>,
    pub measure_qubit: Option<usize>,
    pub final_threshold: Option<f64>,
    pub hamiltonians: Option<PathBuf>,
    pub evals_per_iter: Option<usize>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let from_span = e.span().and_then(|sp| {
                let line_start = text[..sp.start].rfind('\n').map_or(0, |i| i + 1);
                let line = text[line_start..].lines().next()?;
                let (k, _) = line.split_once('=')?;
                Some(k.trim().to_string())
            });
            let from_msg = msg.split('`').nth(1).filter(|_| msg.starts_with("unknown field")).map(str::to_string);
            let key = from_msg.or(from_span).unwrap_or_else(|| "<file>".into());
            Error::Config { key, msg }
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config { key: "config".into(), msg: format!("{}: {e}", path.display()) })?;
        Self::from_toml(&text)
    }

    /// `other` wins wherever it is set.
    pub fn merge(self, other: Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => { Overrides { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            qubits,
            depth,
            pop_size,
            generations,
            iters,
            final_iters,
            threshold,
            mutation_rate,
            elite_count,
            seed,
            learning_rate,
            n_train,
            n_test,
            method,
            beta_grid,
            fitness,
            weights,
            couplings,
            total_time,
            steps,
            substeps,
            trotter_r,
            train_stride,
            measure_qubit,
            final_threshold,
            hamiltonians,
            evals_per_iter
        )
    }
}

struct Defaults {
    qubits: usize,
    pop_size: usize,
    generations: usize,
    iters: usize,
}

fn base(experiment: Experiment, method: ThermalMethod) -> Defaults {
    match (experiment, method) {
        (Experiment::Benchmark, _) => Defaults { qubits: 2, pop_size: 8, generations: 10, iters: 100 },
        (Experiment::Thermal, ThermalMethod::Dense) => Defaults { qubits: 2, pop_size: 8, generations: 16, iters: 100 },
        (Experiment::Thermal, ThermalMethod::Conventional) => {
            Defaults { qubits: 2, pop_size: 16, generations: 20, iters: 100 }
        }
        (Experiment::Dynamics, _) => Defaults { qubits: 2, pop_size: 8, generations: 16, iters: 500 },
        (Experiment::Vqe, _) => Defaults { qubits: 2, pop_size: 8, generations: 20, iters: 100 },
    }
}

/// Default depth once the qubit count is known.
fn default_depth(experiment: Experiment, method: ThermalMethod, qubits: usize) -> usize {
    match (experiment, method) {
        (Experiment::Benchmark, _) => match qubits {
            2 => 3,
            3 => 9,
            n => 4 * n,
        },
        (Experiment::Thermal, ThermalMethod::Dense) => 2 * qubits,
        (Experiment::Thermal, ThermalMethod::Conventional) => 29,
        (Experiment::Dynamics, _) | (Experiment::Vqe, _) => 4,
    }
}

fn bad(key: &str, msg: impl Into<String>) -> Error {
    Error::Config { key: key.into(), msg: msg.into() }
}

impl RunConfig {
    /// Applies `overrides` on top of the defaults and validates the result.
    pub fn resolve(experiment: Experiment, o: &Overrides) -> Result<RunConfig> {
        let method = o.method.unwrap_or(ThermalMethod::Dense);
        let d = base(experiment, method);
        let qubits = o.qubits.unwrap_or(d.qubits);
        let iters = o.iters.unwrap_or(d.iters);
        let mut adam = AdamConfig::default();
        if let Some(lr) = o.learning_rate {
            adam.lr = lr;
        }
        let cfg = RunConfig {
            experiment,
            qubits,
            depth: o.depth.unwrap_or_else(|| default_depth(experiment, method, qubits)),
            pop_size: o.pop_size.unwrap_or(d.pop_size),
            generations: o.generations.unwrap_or(d.generations),
            iters,
            final_iters: o.final_iters.unwrap_or(10 * iters),
            threshold: o.threshold.unwrap_or(0.01),
            mutation_rate: o.mutation_rate.unwrap_or(0.01),
            elite_count: o.elite_count.unwrap_or(2),
            seed: o.seed.unwrap_or(0),
            adam,
            n_train: o.n_train.unwrap_or(20),
            n_test: o.n_test.unwrap_or(10),
            method,
            beta_grid: o.beta_grid.unwrap_or(Grid { start: 0.0, stop: 10.0, count: 11 }),
            fitness: o.fitness.unwrap_or(match method {
                ThermalMethod::Dense => FitnessMode::Mean,
                ThermalMethod::Conventional => FitnessMode::Weighted,
            }),
            weights: o.weights.map(|weights| BetaWeights { weights }).unwrap_or_default(),
            couplings: o.couplings.unwrap_or([1.0, 0.0, 0.0]),
            total_time: o.total_time.unwrap_or(10.0),
            steps: o.steps.unwrap_or(100),
            substeps: o.substeps.unwrap_or(5),
            trotter_r: o.trotter_r.unwrap_or(100),
            train_stride: o.train_stride.unwrap_or(10),
            measure_qubit: o.measure_qubit.unwrap_or(1),
            final_threshold: o.final_threshold.unwrap_or(1e-4),
            hamiltonians: o.hamiltonians.clone(),
            evals_per_iter: o.evals_per_iter.unwrap_or(10),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let min_qubits = match (self.experiment, self.method) {
            (Experiment::Thermal, _) | (Experiment::Dynamics, _) => 2,
            _ => 1,
        };
        if self.qubits < min_qubits || self.qubits > 12 {
            return Err(bad("qubits", format!("must lie in {min_qubits}..=12, got {}", self.qubits)));
        }
        if self.experiment == Experiment::Thermal && self.method == ThermalMethod::Conventional && self.qubits > 6 {
            return Err(bad("qubits", "conventional thermal runs use 2N qubits; N must be at most 6"));
        }
        if self.experiment == Experiment::Dynamics && !self.qubits.is_multiple_of(2) {
            return Err(bad("qubits", "dynamics needs an even qubit count for the domain wall"));
        }
        for (key, v) in [
            ("depth", self.depth),
            ("generations", self.generations),
            ("iters", self.iters),
            ("final_iters", self.final_iters),
            ("n_train", self.n_train),
            ("n_test", self.n_test),
            ("steps", self.steps),
            ("substeps", self.substeps),
            ("trotter_r", self.trotter_r),
            ("train_stride", self.train_stride),
            ("evals_per_iter", self.evals_per_iter),
        ] {
            if v == 0 {
                return Err(bad(key, "must be at least 1"));
            }
        }
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return Err(bad("pop_size", format!("must be even and at least 2, got {}", self.pop_size)));
        }
        if self.elite_count == 0 || self.elite_count > self.pop_size {
            return Err(bad("elite_count", format!("must lie in 1..={}", self.pop_size)));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(bad("threshold", format!("must lie in (0, 1), got {}", self.threshold)));
        }
        if !(self.final_threshold > 0.0 && self.final_threshold < 1.0) {
            return Err(bad("final_threshold", "must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(bad("mutation_rate", "must lie in [0, 1]"));
        }
        if !(self.adam.lr.is_finite() && self.adam.lr > 0.0) {
            return Err(bad("learning_rate", "must be positive"));
        }
        if self.beta_grid.start < 0.0 {
            return Err(bad("beta_grid", "inverse temperatures must be non-negative"));
        }
        if self.weights.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(bad("weights", "must be finite and non-negative"));
        }
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(bad("total_time", "must be positive"));
        }
        if self.measure_qubit >= self.qubits {
            return Err(bad("measure_qubit", format!("must be below the qubit count {}", self.qubits)));
        }
        Ok(())
    }

    pub fn ga(&self) -> GaConfig {
        GaConfig {
            pop_size: self.pop_size,
            generations: self.generations,
            iters: self.iters,
            threshold: self.threshold,
            depth: self.depth,
            mutation_rate: self.mutation_rate,
            elite_count: self.elite_count,
            final_iters: self.final_iters,
            seed: self.seed,
            adam: self.adam,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:10:11".parse().unwrap();
        assert_eq!(g.values(), (0..=10).map(f64::from).collect::<Vec<_>>());
        assert_eq!("2:2:1".parse::<Grid>().unwrap().values(), vec![2.0]);
        assert!("0:10".parse::<Grid>().is_err());
        assert!("0:10:0".parse::<Grid>().is_err());
        assert!("5:1:3".parse::<Grid>().is_err());
        assert_eq!(g.to_string().parse::<Grid>().unwrap(), g);
    }

    #[test]
    fn couplings() {
        assert_eq!(parse_couplings("1, -1, 0.25").unwrap(), [1.0, -1.0, 0.25]);
        assert!(parse_couplings("1,2").is_err());
        assert!(parse_couplings("1,x,2").is_err());
    }

    #[test]
    fn defaults_per_experiment() {
        let b = RunConfig::resolve(Experiment::Benchmark, &Overrides::default()).unwrap();
        assert_eq!((b.depth, b.pop_size, b.generations, b.iters, b.threshold), (3, 8, 10, 100, 0.01));
        assert_eq!(b.final_iters, 1000);
        let t = RunConfig::resolve(Experiment::Thermal, &Overrides { qubits: Some(3), ..Default::default() }).unwrap();
        assert_eq!((t.depth, t.pop_size, t.generations), (6, 8, 16));
        let c = RunConfig::resolve(
            Experiment::Thermal,
            &Overrides { method: Some(ThermalMethod::Conventional), ..Default::default() },
        )
        .unwrap();
        assert_eq!((c.depth, c.pop_size, c.generations, c.fitness), (29, 16, 20, FitnessMode::Weighted));
        let d = RunConfig::resolve(Experiment::Dynamics, &Overrides::default()).unwrap();
        assert_eq!((d.depth, d.iters, d.pop_size, d.generations), (4, 500, 8, 16));
        let v = RunConfig::resolve(Experiment::Vqe, &Overrides::default()).unwrap();
        assert_eq!((v.pop_size, v.generations), (8, 20));
    }

    #[test]
    fn precedence_and_errors() {
        let file = Overrides::from_toml("depth = 5\nseed = 3\nbeta_grid = \"0:2:3\"\n").unwrap();
        let flags = Overrides { depth: Some(7), ..Default::default() };
        let cfg = RunConfig::resolve(Experiment::Thermal, &file.merge(flags)).unwrap();
        assert_eq!((cfg.depth, cfg.seed, cfg.beta_grid.count), (7, 3, 3));

        let Err(Error::Config { key, .. }) = Overrides::from_toml("colour = 1\n") else { panic!() };
        assert_eq!(key, "colour");
        let Err(Error::Config { key, .. }) = Overrides::from_toml("beta_grid = \"1:0:3\"\n") else { panic!() };
        assert_eq!(key, "beta_grid");
        let Err(Error::Config { key, .. }) = Overrides::from_toml("seed = 1\ndepth = \"x\"\n") else { panic!() };
        assert_eq!(key, "depth");
        let odd = Overrides { pop_size: Some(5), ..Default::default() };
        let Err(Error::Config { key, .. }) = RunConfig::resolve(Experiment::Benchmark, &odd) else { panic!() };
        assert_eq!(key, "pop_size");
    }
}
