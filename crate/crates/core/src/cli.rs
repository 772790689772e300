//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::config::{parse_couplings, Experiment, FitnessMode, Grid, Overrides, RunConfig};
use crate::error::{Error, Result};
use crate::ga::Checkpoint;
use crate::pipelines::{run, RunOptions, CHECKPOINT_FILE};
use crate::targets::ThermalMethod;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "GAVQA_OUT";

#[derive(Debug, Parser)]
#[command(name = "gavqa", version, about = "Genetic circuit-structure search with variational training")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a set of Haar-random unitaries and report held-out risk.
    Benchmark(RunArgs),
    /// Prepare TFIM thermal states over a grid of inverse temperatures.
    Thermal(RunArgs),
    /// Track domain-wall magnetization under a driven XY chain.
    Dynamics(RunArgs),
    /// Search a shared ansatz for the ground states of a Hamiltonian family.
    Vqe(RunArgs),
    /// Run the built-in consistency checks.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Flat TOML file with any of the keys below (underscores for dashes).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory [default: $GAVQA_OUT/<experiment>-s<seed>, or runs/<experiment>-s<seed>].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Resume the search from a checkpoint file.
    #[arg(long, value_name = "FILE")]
    pub resume: Option<PathBuf>,
    /// Also write the best circuit to this path.
    #[arg(long, value_name = "FILE")]
    pub export_circuit: Option<PathBuf>,

    /// Qubit count N (thermal: ring sites).
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Target circuit depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Population size (even).
    #[arg(long)]
    pub pop_size: Option<usize>,
    /// Generation limit.
    #[arg(long)]
    pub generations: Option<usize>,
    /// Adam steps per target during fitness evaluation.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Steps per target in the final training stage.
    #[arg(long)]
    pub final_iters: Option<usize>,
    /// Loss threshold for stopping.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Per-gene mutation probability.
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    /// Individuals carried unchanged into the next generation.
    #[arg(long)]
    pub elite_count: Option<usize>,
    /// Root random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Adam step size.
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Training unitaries (benchmark).
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Held-out unitaries (benchmark).
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Thermal purification: dense or conventional.
    #[arg(long)]
    pub method: Option<ThermalMethod>,
    /// Inverse temperatures as start:stop:count.
    #[arg(long, value_name = "START:STOP:COUNT")]
    pub beta_grid: Option<Grid>,
    /// Thermal fitness: mean or weighted.
    #[arg(long)]
    pub fitness: Option<FitnessMode>,
    /// Weights of the β intervals [0,4), [4,7), [7,10] as a,b,c.
    #[arg(long, value_parser = parse_couplings, value_name = "A,B,C")]
    pub weights: Option<[f64; 3]>,
    /// Dynamics couplings J,u,h.
    #[arg(long, value_parser = parse_couplings, value_name = "J,U,H")]
    pub couplings: Option<[f64; 3]>,
    /// Total evolution time.
    #[arg(long)]
    pub total_time: Option<f64>,
    /// Grid intervals over the evolution time.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sub-intervals per grid interval in the exact propagator.
    #[arg(long)]
    pub substeps: Option<usize>,
    /// Trotter number r.
    #[arg(long)]
    pub trotter_r: Option<usize>,
    /// Train the search on every k-th grid point.
    #[arg(long)]
    pub train_stride: Option<usize>,
    /// Qubit whose magnetization is reported.
    #[arg(long)]
    pub measure_qubit: Option<usize>,
    /// Early-stop loss for the per-point fit after the search.
    #[arg(long)]
    pub final_threshold: Option<f64>,
    /// Pauli-sum Hamiltonian file (vqe).
    #[arg(long, value_name = "FILE")]
    pub hamiltonians: Option<PathBuf>,
    /// Nelder–Mead evaluations per iteration (vqe).
    #[arg(long)]
    pub evals_per_iter: Option<usize>,
}

impl RunArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            qubits: self.qubits,
            depth: self.depth,
            pop_size: self.pop_size,
            generations: self.generations,
            iters: self.iters,
            final_iters: self.final_iters,
            threshold: self.threshold,
            mutation_rate: self.mutation_rate,
            elite_count: self.elite_count,
            seed: self.seed,
            learning_rate: self.learning_rate,
            n_train: self.n_train,
            n_test: self.n_test,
            method: self.method,
            beta_grid: self.beta_grid,
            fitness: self.fitness,
            weights: self.weights,
            couplings: self.couplings,
            total_time: self.total_time,
            steps: self.steps,
            substeps: self.substeps,
            trotter_r: self.trotter_r,
            train_stride: self.train_stride,
            measure_qubit: self.measure_qubit,
            final_threshold: self.final_threshold,
            hamiltonians: self.hamiltonians.clone(),
            evals_per_iter: self.evals_per_iter,
        }
    }

    /// Flags over file over defaults.
    pub fn resolve(&self, experiment: Experiment) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => Overrides::load(p)?,
            None => Overrides::default(),
        };
        RunConfig::resolve(experiment, &file.merge(self.overrides()))
    }
}

fn defaults_table(experiment: Experiment) -> String {
    let mut out = format!("Defaults for {experiment}:\n");
    let mut add = |label: &str, cfg: &RunConfig| {
        let mut line = format!(
            "  {label}qubits={} depth={} pop-size={} generations={} iters={} final-iters={} threshold={} \
             mutation-rate={} elite-count={} seed={} learning-rate={}",
            cfg.qubits,
            cfg.depth,
            cfg.pop_size,
            cfg.generations,
            cfg.iters,
            cfg.final_iters,
            cfg.threshold,
            cfg.mutation_rate,
            cfg.elite_count,
            cfg.seed,
            cfg.adam.lr
        );
        match experiment {
            Experiment::Benchmark => line += &format!(" n-train={} n-test={}", cfg.n_train, cfg.n_test),
            Experiment::Thermal => {
                let [a, b, c] = cfg.weights.weights;
                line += &format!(" beta-grid={} fitness={:?} weights={a},{b},{c}", cfg.beta_grid, cfg.fitness)
            }
            Experiment::Dynamics => {
                let [j, u, h] = cfg.couplings;
                line += &format!(
                    " couplings={j},{u},{h} total-time={} steps={} substeps={} trotter-r={} train-stride={} \
                     measure-qubit={} final-threshold={}",
                    cfg.total_time,
                    cfg.steps,
                    cfg.substeps,
                    cfg.trotter_r,
                    cfg.train_stride,
                    cfg.measure_qubit,
                    cfg.final_threshold
                )
            }
            Experiment::Vqe => {
                line += &format!(" evals-per-iter={} hamiltonians=<built-in Z0Z1 + 0.5 X0>", cfg.evals_per_iter)
            }
        }
        out.push_str(&line);
        out.push('\n');
    };
    let base = RunConfig::resolve(experiment, &Overrides::default()).expect("defaults are valid");
    match experiment {
        Experiment::Thermal => {
            add("dense: ", &base);
            let conv = RunConfig::resolve(
                experiment,
                &Overrides { method: Some(ThermalMethod::Conventional), ..Default::default() },
            )
            .expect("defaults are valid");
            add("conventional: ", &conv);
            out.push_str("  depth defaults to 2N for dense runs.\n");
        }
        Experiment::Benchmark => {
            add("", &base);
            out.push_str("  depth defaults to 3 for N=2, 9 for N=3, 4N otherwise; final-iters to 10 x iters.\n");
        }
        _ => {
            add("", &base);
            out.push_str("  final-iters defaults to 10 x iters.\n");
        }
    }
    out
}

pub fn command() -> clap::Command {
    let mut cmd = Cli::command();
    for (name, exp) in [
        ("benchmark", Experiment::Benchmark),
        ("thermal", Experiment::Thermal),
        ("dynamics", Experiment::Dynamics),
        ("vqe", Experiment::Vqe),
    ] {
        cmd = cmd.mut_subcommand(name, |c| c.after_help(defaults_table(exp)));
    }
    cmd
}

fn default_out(experiment: Experiment, seed: u64) -> PathBuf {
    let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(format!("{experiment}-s{seed}"))
}

fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(body.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn run_experiment(experiment: Experiment, args: &RunArgs) -> Result<PathBuf> {
    let cfg = args.resolve(experiment)?;
    let out = args.out.clone().unwrap_or_else(|| default_out(experiment, cfg.seed));
    let resume = args.resume.as_deref().map(Checkpoint::load).transpose()?;
    let options = RunOptions { checkpoint_path: Some(out.join(CHECKPOINT_FILE)), resume };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .map_err(|e| Error::Config { key: "workers".into(), msg: e.to_string() })?;
    let result = pool.install(|| run(&cfg, &options))?;
    result.write(&out)?;
    if let Some(path) = &args.export_circuit {
        write_atomic(path, &result.best_circuit.to_text())?;
    }
    println!("{experiment}: {} rows, passed={} -> {}", result.rows(), result.passed, out.display());
    println!("{}", serde_json::to_string(&result.summary)?);
    Ok(out)
}

fn run_verify(seed: u64) -> bool {
    let mut ok = true;
    for r in crate::verify::run_all(seed) {
        match r {
            Ok(c) => {
                ok &= c.passed;
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Err((name, e)) => {
                ok = false;
                println!("FAIL {name}: {e}");
            }
        }
    }
    ok
}

fn dispatch(matches: &ArgMatches) -> std::result::Result<bool, Error> {
    let cli = Cli::from_arg_matches(matches).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let (experiment, args) = match cli.command {
        Command::Verify { seed } => return Ok(run_verify(seed)),
        Command::Benchmark(a) => (Experiment::Benchmark, a),
        Command::Thermal(a) => (Experiment::Thermal, a),
        Command::Dynamics(a) => (Experiment::Dynamics, a),
        Command::Vqe(a) => (Experiment::Vqe, a),
    };
    run_experiment(experiment, &args)?;
    Ok(true)
}

/// Parses `argv`, runs, and maps the outcome to an exit code.
pub fn main_with_args<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&matches) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        let m = command().try_get_matches_from(args).unwrap();
        Cli::from_arg_matches(&m).unwrap()
    }

    #[test]
    fn flags_reach_the_config() {
        let Command::Thermal(a) =
            parse(&["gavqa", "thermal", "--method", "dense", "--qubits", "2", "--beta-grid", "0:10:11"]).command
        else {
            panic!()
        };
        let cfg = a.resolve(Experiment::Thermal).unwrap();
        assert_eq!(cfg.beta_grid.values().len(), 11);
        assert_eq!(cfg.depth, 4);
        let Command::Dynamics(a) =
            parse(&["gavqa", "dynamics", "--couplings", "1,1,0.25", "--trotter-r", "50"]).command
        else {
            panic!()
        };
        let cfg = a.resolve(Experiment::Dynamics).unwrap();
        assert_eq!((cfg.couplings, cfg.trotter_r), ([1.0, 1.0, 0.25], 50));
    }

    #[test]
    fn file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "depth = 6\nseed = 9\n").unwrap();
        let p = path.to_str().unwrap();
        let Command::Benchmark(a) = parse(&["gavqa", "benchmark", "--config", p, "--depth", "4"]).command else {
            panic!()
        };
        let cfg = a.resolve(Experiment::Benchmark).unwrap();
        assert_eq!((cfg.depth, cfg.seed), (4, 9));
    }

    #[test]
    fn bad_values_name_their_key() {
        assert!(command().try_get_matches_from(["gavqa", "benchmark", "--bogus", "1"]).is_err());
        assert!(command().try_get_matches_from(["gavqa", "thermal", "--beta-grid", "3:1:2"]).is_err());
        let Command::Benchmark(a) = parse(&["gavqa", "benchmark", "--threshold", "1.5"]).command else { panic!() };
        let err = a.resolve(Experiment::Benchmark).unwrap_err().to_string();
        assert!(err.contains("threshold"), "{err}");
    }

    #[test]
    fn help_lists_defaults() {
        let mut cmd = command();
        let sub = cmd.find_subcommand_mut("thermal").unwrap();
        let help = sub.render_long_help().to_string();
        assert!(help.contains("beta-grid=0:10:11"));
        assert!(help.contains("conventional: qubits=2 depth=29 pop-size=16 generations=20"));
        let help = command().find_subcommand_mut("dynamics").unwrap().render_long_help().to_string();
        assert!(help.contains("iters=500"));
        assert!(help.contains("trotter-r=100"));
    }
}
