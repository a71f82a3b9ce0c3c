//! Named graph families and the on-disk cache of generated graphs.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use peacekit::graph::{adversarial_bipartite, load_graph, random_regular, regularize_by_doubling, save_graph};
use peacekit::{Graph, LogBase};
use serde::{Deserialize, Serialize};

pub const CACHE_ENV: &str = "PEACEKIT_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Random `Δ`-regular graph on `n` vertices.
    Regular,
    /// `K_{Δ+1}`.
    Complete,
    /// `C_n`.
    Cycle,
    /// Star with `Δ` leaves.
    Star,
    Petersen,
    /// Bipartite lower-bound construction at `Δ`.
    Adversarial,
    /// `Δ`-regular supergraph (`4n` vertices) of a random `(Δ-2)`-regular graph on `n` vertices.
    Doubled,
    /// Read from `path`.
    File,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Regular => "regular",
            Family::Complete => "complete",
            Family::Cycle => "cycle",
            Family::Star => "star",
            Family::Petersen => "petersen",
            Family::Adversarial => "adversarial",
            Family::Doubled => "doubled",
            Family::File => "file",
        }
    }

    fn is_random(self) -> bool {
        matches!(self, Family::Regular | Family::Adversarial | Family::Doubled)
    }
}

/// Everything needed to build one graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub family: Family,
    pub n: Option<usize>,
    pub delta: Option<usize>,
    pub path: Option<PathBuf>,
    pub seed: u64,
}

impl GraphSpec {
    fn need_n(&self) -> Result<usize> {
        self.n
            .with_context(|| format!("family `{}` needs n", self.family.name()))
    }

    fn need_delta(&self) -> Result<usize> {
        self.delta
            .with_context(|| format!("family `{}` needs delta", self.family.name()))
    }

    /// File name used in the cache; `None` for families that are not worth caching.
    pub fn cache_name(&self) -> Option<String> {
        if !self.family.is_random() {
            return None;
        }
        let n = self.n.map_or(String::new(), |n| format!("-n{n}"));
        let d = self.delta.map_or(String::new(), |d| format!("-d{d}"));
        Some(format!("{}{n}{d}-s{}.txt", self.family.name(), self.seed))
    }

    pub fn generate(&self, log_base: LogBase) -> Result<Graph> {
        let g = match self.family {
            Family::Regular => random_regular(self.need_n()?, self.need_delta()?, self.seed)?,
            Family::Complete => Graph::complete(self.need_delta()? + 1),
            Family::Cycle => Graph::cycle(self.need_n()?),
            Family::Star => Graph::star(self.need_delta()?),
            Family::Petersen => Graph::petersen(),
            Family::Adversarial => adversarial_bipartite(self.need_delta()?, self.seed, log_base)?.0,
            Family::Doubled => {
                let delta = self.need_delta()?;
                let base = random_regular(self.need_n()?, delta.saturating_sub(2), self.seed)?;
                regularize_by_doubling(&base, delta)?
            }
            Family::File => {
                let path = self.path.as_ref().context("family `file` needs path")?;
                load_graph(path).with_context(|| format!("reading {}", path.display()))?
            }
        };
        if let Some(delta) = self.delta {
            if self.family != Family::File && g.max_degree() != delta && g.n() > 0 {
                bail!("generated graph has maximum degree {} instead of {delta}", g.max_degree());
            }
        }
        Ok(g)
    }
}

/// Cache directory from the environment, else `fallback`.
pub fn cache_dir(fallback: Option<&Path>) -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .or_else(|| fallback.map(Path::to_path_buf))
}

/// Loads `spec` from the cache or generates and stores it.
pub fn obtain(spec: &GraphSpec, cache: Option<&Path>, log_base: LogBase) -> Result<Graph> {
    let (Some(dir), Some(name)) = (cache, spec.cache_name()) else {
        return spec.generate(log_base);
    };
    let path = dir.join(name);
    if path.exists() {
        return load_graph(&path).with_context(|| format!("reading cached {}", path.display()));
    }
    let g = spec.generate(log_base)?;
    std::fs::create_dir_all(dir)?;
    // Write then rename so a concurrent reader never sees half a file.
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    save_graph(&g, &tmp)?;
    std::fs::rename(&tmp, &path)?;
    Ok(g)
}
