//! Config-driven sweeps over (family, Δ, algorithm, seed) cells.
//!
//! Each cell leaves `cells/cell-NNNNN.json` (description and CSV row) and
//! `cells/cell-NNNNN.colouring.json` in the output directory. A cell whose
//! record exists and describes the same cell is skipped on the next run, and
//! `results.csv` is always rewritten from the records in cell order, so
//! rerunning a finished sweep reproduces it byte for byte.
//!
//! Seeds: replicate `r` of a cell uses graph seed `split_seed(seed, r)`, shared
//! by every algorithm on that graph, and algorithm seed
//! `split_seed(graph_seed, 1 + cell_index)`.

use std::collections::BTreeMap;
use std::panic::AssertUnwindSafe;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use peacekit::rng::split_seed;
use peacekit::{peace_report, Graph, LogBase, PartialColouring};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algos::{self, AlgoParams, Algorithm};
use crate::families::{self, Family, GraphSpec};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// `seeds = 5` means seeds `0..5`; a list is taken as is.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::Count(1)
    }
}

/// One `[[cells]]` table; list-valued keys expand into a product.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellGroup {
    pub family: Family,
    pub n: Option<OneOrMany<usize>>,
    pub delta: Option<OneOrMany<usize>>,
    pub path: Option<PathBuf>,
    pub algorithm: OneOrMany<Algorithm>,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub params: AlgoParams,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub log_base: LogBase,
    pub cells: Vec<CellGroup>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).context("invalid experiment config")?;
        if config.cells.is_empty() {
            bail!("config has no [[cells]]");
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    /// All cells in index order.
    pub fn expand(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for group in &self.cells {
            let ns = group.n.as_ref().map_or(vec![None], |v| v.to_vec().into_iter().map(Some).collect());
            let deltas = group.delta.as_ref().map_or(vec![None], |v| v.to_vec().into_iter().map(Some).collect());
            let seeds = match &group.seeds {
                Seeds::Count(k) => (0..*k).collect(),
                Seeds::List(v) => v.clone(),
            };
            for &n in &ns {
                for &delta in &deltas {
                    for algorithm in group.algorithm.to_vec() {
                        for &seed in &seeds {
                            out.push(Cell {
                                index: out.len(),
                                family: group.family,
                                n,
                                delta,
                                path: group.path.clone(),
                                algorithm,
                                params: group.params.render(),
                                seed,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn params_for(&self, cell: &Cell) -> AlgoParams {
        self.cells
            .iter()
            .map(|g| &g.params)
            .find(|p| p.render() == cell.params)
            .cloned()
            .unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub family: Family,
    pub n: Option<usize>,
    pub delta: Option<usize>,
    pub path: Option<PathBuf>,
    pub algorithm: Algorithm,
    pub params: String,
    pub seed: u64,
}

impl Cell {
    pub fn graph_seed(&self, experiment_seed: u64) -> u64 {
        split_seed(experiment_seed, self.seed)
    }

    pub fn algorithm_seed(&self, experiment_seed: u64) -> u64 {
        split_seed(self.graph_seed(experiment_seed), 1 + self.index as u64)
    }

    pub fn graph_spec(&self, experiment_seed: u64) -> GraphSpec {
        GraphSpec {
            family: self.family,
            n: self.n,
            delta: self.delta,
            path: self.path.clone(),
            seed: self.graph_seed(experiment_seed),
        }
    }
}

/// One CSV row. Numeric fields are empty when the cell failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub family: String,
    pub n: Option<usize>,
    pub delta: Option<usize>,
    pub codegree_max: Option<usize>,
    pub algorithm: String,
    pub params: String,
    pub seed: u64,
    pub colours_used: Option<usize>,
    pub peacefulness: Option<usize>,
    pub unique_mean: Option<f64>,
    pub runtime_ms: u128,
    pub status: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CellRecord {
    cell: Cell,
    experiment_seed: u64,
    graph_seed: u64,
    algorithm_seed: u64,
    graph_file: Option<PathBuf>,
    row: Row,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub cells: usize,
    pub ran: usize,
    pub skipped: usize,
    pub failed: usize,
}

fn record_path(out: &Path, index: usize) -> PathBuf {
    out.join("cells").join(format!("cell-{index:05}.json"))
}

pub fn colouring_path(out: &Path, index: usize) -> PathBuf {
    out.join("cells").join(format!("cell-{index:05}.colouring.json"))
}

fn existing_record(out: &Path, cell: &Cell, seed: u64) -> Option<CellRecord> {
    let text = std::fs::read_to_string(record_path(out, cell.index)).ok()?;
    let rec: CellRecord = serde_json::from_str(&text).ok()?;
    (rec.cell == *cell && rec.experiment_seed == seed).then_some(rec)
}

fn codegree_if_cheap(g: &Graph) -> Option<usize> {
    let work: u128 = (0..g.n()).map(|v| (g.degree(v) as u128).pow(2)).sum();
    (work <= 1 << 31).then(|| g.max_codegree())
}

fn execute(config: &ExperimentConfig, cell: &Cell, out: &Path, cache: Option<&Path>) -> CellRecord {
    let seed = config.seed;
    let spec = cell.graph_spec(seed);
    let graph_file = cache.and_then(|c| spec.cache_name().map(|name| c.join(name)));
    let mut row = Row {
        family: cell.family.name().into(),
        n: cell.n,
        delta: cell.delta,
        codegree_max: None,
        algorithm: cell.algorithm.name().into(),
        params: cell.params.clone(),
        seed: cell.seed,
        colours_used: None,
        peacefulness: None,
        unique_mean: None,
        runtime_ms: 0,
        status: String::new(),
    };
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(|| -> Result<(Graph, &'static str)> {
        let g = families::obtain(&spec, cache, config.log_base)?;
        let run = algos::run(
            &g,
            cell.algorithm,
            &config.params_for(cell),
            cell.algorithm_seed(seed),
            config.log_base,
        )?;
        run.colouring.save(colouring_path(out, cell.index))?;
        Ok((g, run.status))
    }));
    row.runtime_ms = start.elapsed().as_millis();
    match outcome {
        Ok(Ok((g, status))) => {
            row.n = Some(g.n());
            row.delta = Some(g.max_degree());
            row.codegree_max = codegree_if_cheap(&g);
            // Report values come from the persisted file, not the in-memory colouring.
            match PartialColouring::load(colouring_path(out, cell.index))
                .map_err(anyhow::Error::from)
                .and_then(|f| Ok((peace_report(&g, &f)?, f)))
            {
                Ok((report, f)) => {
                    row.colours_used = Some(f.colours_used());
                    row.peacefulness = Some(report.peacefulness);
                    row.unique_mean = Some(report.unique_fraction_mean());
                    row.status = status.into();
                }
                Err(e) => row.status = format!("error: {e:#}"),
            }
        }
        Ok(Err(e)) => row.status = format!("error: {e:#}"),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            row.status = format!("panic: {msg}");
        }
    }
    CellRecord {
        cell: cell.clone(),
        experiment_seed: seed,
        graph_seed: cell.graph_seed(seed),
        algorithm_seed: cell.algorithm_seed(seed),
        graph_file,
        row,
    }
}

/// Runs every cell not already recorded under `out` and rewrites `results.csv`.
///
/// Cells run on the current rayon pool; a single writer stores records and
/// emits CSV rows in cell order.
pub fn run_experiment(config: &ExperimentConfig, out: &Path, only: Option<&[usize]>) -> Result<SweepSummary> {
    std::fs::create_dir_all(out.join("cells"))?;
    let cache = families::cache_dir(Some(&out.join("graphs")));
    let cells = config.expand();
    let mut summary = SweepSummary {
        cells: cells.len(),
        ..Default::default()
    };
    let mut done: BTreeMap<usize, CellRecord> = BTreeMap::new();
    let mut pending = Vec::new();
    for cell in &cells {
        match existing_record(out, cell, config.seed) {
            Some(rec) => {
                done.insert(cell.index, rec);
            }
            None if only.is_none_or(|o| o.contains(&cell.index)) => pending.push(cell.clone()),
            None => {}
        }
    }
    summary.skipped = done.len();
    summary.ran = pending.len();

    let csv_path = out.join("results.csv");
    let (tx, rx) = mpsc::channel::<CellRecord>();
    let writer = {
        let out = out.to_path_buf();
        let expected: Vec<usize> = cells.iter().map(|c| c.index).collect();
        std::thread::spawn(move || -> Result<usize> {
            let mut writer = csv::Writer::from_path(&csv_path)?;
            let mut next = 0;
            let mut failed = 0;
            let mut flush = |done: &mut BTreeMap<usize, CellRecord>, next: &mut usize| -> Result<()> {
                while *next < expected.len() {
                    let Some(rec) = done.get(&expected[*next]) else { break };
                    writer.serialize(&rec.row)?;
                    *next += 1;
                }
                writer.flush()?;
                Ok(())
            };
            flush(&mut done, &mut next)?;
            for rec in rx {
                if rec.row.status.starts_with("error") || rec.row.status.starts_with("panic") {
                    failed += 1;
                }
                std::fs::write(record_path(&out, rec.cell.index), serde_json::to_string_pretty(&rec)?)?;
                done.insert(rec.cell.index, rec);
                flush(&mut done, &mut next)?;
            }
            // Cells left out by `only` leave gaps; later rows still go out in order.
            for index in expected.iter().skip(next) {
                if let Some(rec) = done.get(index) {
                    writer.serialize(&rec.row)?;
                }
            }
            writer.flush()?;
            Ok(failed)
        })
    };
    let cache_ref = cache.as_deref();
    pending.par_iter().for_each_with(tx, |tx, cell| {
        let rec = execute(config, cell, out, cache_ref);
        let _ = tx.send(rec);
    });
    summary.failed = writer.join().map_err(|_| anyhow::anyhow!("report writer panicked"))??;
    Ok(summary)
}

/// Recomputes every successful row from its graph and persisted colouring;
/// returns the indices whose values differ.
pub fn recheck(config: &ExperimentConfig, out: &Path) -> Result<Vec<usize>> {
    let cache = families::cache_dir(Some(&out.join("graphs")));
    let mut bad = Vec::new();
    for cell in config.expand() {
        let Some(rec) = existing_record(out, &cell, config.seed) else { continue };
        let Some(peace) = rec.row.peacefulness else { continue };
        let g = families::obtain(&cell.graph_spec(config.seed), cache.as_deref(), config.log_base)?;
        let f = PartialColouring::load(colouring_path(out, cell.index))?;
        let report = peace_report(&g, &f)?;
        if report.peacefulness != peace
            || Some(f.colours_used()) != rec.row.colours_used
            || Some(report.unique_fraction_mean()) != rec.row.unique_mean
        {
            bad.push(cell.index);
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_is_a_product_in_order() {
        let config = ExperimentConfig::from_toml(
            r#"
seed = 3
[[cells]]
family = "regular"
n = 40
delta = [4, 6]
algorithm = ["greedy", "oneshot", "dsatur"]
seeds = 5
"#,
        )
        .unwrap();
        let cells = config.expand();
        assert_eq!(cells.len(), 30);
        assert_eq!(cells[0].delta, Some(4));
        assert_eq!(cells[5].algorithm, Algorithm::Oneshot);
        assert_eq!(cells[15].delta, Some(6));
        assert!(cells.iter().enumerate().all(|(i, c)| c.index == i));
        assert_eq!(cells[0].graph_seed(3), cells[5].graph_seed(3));
        assert_ne!(cells[0].algorithm_seed(3), cells[5].algorithm_seed(3));
    }

    #[test]
    fn rejects_unknown_keys_and_empty_configs() {
        assert!(ExperimentConfig::from_toml("seed = 1\ncells = []").is_err());
        assert!(ExperimentConfig::from_toml("[[cells]]\nfamily = \"regular\"\nalgorithm = \"greedy\"\ncolour = 3").is_err());
        assert!(ExperimentConfig::from_toml("[[cells]]\nfamily = \"moebius\"\nalgorithm = \"greedy\"").is_err());
    }
}
