use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GaConfig, GenerationRecord, Individual};
use crate::cost::ParameterTable;
use crate::error::{Error, Result};
use crate::genome::CircuitGenome;

const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndividualRecord {
    /// Circuit in the text format.
    pub genome: String,
    pub params: ParameterTable,
    pub losses: Vec<f64>,
    pub fitness: f64,
}

/// Search state after a completed generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: GaConfig,
    pub generation: usize,
    pub population: Vec<IndividualRecord>,
    pub history: Vec<GenerationRecord>,
}

impl Checkpoint {
    pub fn capture(cfg: &GaConfig, generation: usize, pop: &[Individual], history: &[GenerationRecord]) -> Self {
        Checkpoint {
            version: FORMAT_VERSION,
            config: cfg.clone(),
            generation,
            population: pop
                .iter()
                .map(|p| IndividualRecord {
                    genome: p.genome.to_text(),
                    params: p.params.clone(),
                    losses: p.losses.clone(),
                    fitness: p.fitness,
                })
                .collect(),
            history: history.to_vec(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cp: Checkpoint = serde_json::from_str(&text)?;
        if cp.version != FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "checkpoint format {} is not supported (expected {FORMAT_VERSION})",
                cp.version
            )));
        }
        Ok(cp)
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn write(&self, path: &Path) -> Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        std::fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer_pretty(&mut tmp, self)?;
        tmp.write_all(b"\n")?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }

    /// Rebuilds the population. Every setting except `generations` must match.
    pub(super) fn restore(&self, cfg: &GaConfig) -> Result<(usize, Vec<Individual>, Vec<GenerationRecord>)> {
        let mut mine = self.config.clone();
        mine.generations = cfg.generations;
        if &mine != cfg {
            return Err(Error::InvalidArgument("checkpoint was written with different search settings".into()));
        }
        if self.population.len() != cfg.pop_size {
            return Err(Error::InvalidArgument(format!(
                "checkpoint holds {} individuals, expected {}",
                self.population.len(),
                cfg.pop_size
            )));
        }
        let pop = self
            .population
            .iter()
            .map(|r| {
                let genome: CircuitGenome = r.genome.parse()?;
                if r.params.cols() != genome.param_count() || r.params.rows() != r.losses.len() {
                    return Err(Error::InvalidArgument("checkpoint parameter table does not match its circuit".into()));
                }
                Ok(Individual { genome, params: r.params.clone(), losses: r.losses.clone(), fitness: r.fitness })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((self.generation, pop, self.history.clone()))
    }
}
