//! Run configuration: TOML file, then `RANGEBENCH_SEED`, then flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rangebench::harness::{CheckMode, EngineKind, EngineSpec};
use rangebench::workload::{MeshSpec, QueryMode};
use rangebench::{Aabb, Point3, RecordKind};
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "RANGEBENCH_SEED";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub jitter: f64,
    pub domain_min: [f64; 3],
    pub domain_max: [f64; 3],
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { nx: 101, ny: 101, nz: 101, jitter: 0.2, domain_min: [0.0; 3], domain_max: [1.0; 3] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub workers: usize,
    pub records: RecordKind,
    pub mode: QueryMode,
    /// Unset means full checking for reduced runs and sampled checking for
    /// full runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckMode>,
    pub runs: usize,
    /// Unset means every engine that supports `records`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engines: Option<Vec<EngineKind>>,
    pub leaf_sizes: Vec<usize>,
    pub out: PathBuf,
    pub mesh: MeshConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            workers: 1,
            records: RecordKind::Points,
            mode: QueryMode::Reduced,
            check: None,
            runs: 3,
            engines: None,
            leaf_sizes: vec![20, 200],
            out: PathBuf::from("rangebench-out"),
            mesh: MeshConfig::default(),
        }
    }
}

/// Values given on the command line; `None` leaves the lower layer alone.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub records: Option<RecordKind>,
    pub mode: Option<QueryMode>,
    pub check: bool,
    pub runs: Option<usize>,
    pub engines: Option<Vec<EngineKind>>,
    pub leaf_sizes: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
    pub mesh_n: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// File (or defaults), then the environment, then flags.
    pub fn resolve(file: Option<&Path>, env_seed: Option<String>, flags: &Overrides) -> anyhow::Result<Self> {
        let mut cfg = match file {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(s) = env_seed {
            cfg.seed = s.trim().parse().with_context(|| format!("{SEED_ENV}=`{s}` is not an unsigned integer"))?;
        }
        let f = flags.clone();
        if let Some(v) = f.seed {
            cfg.seed = v;
        }
        if let Some(v) = f.workers {
            cfg.workers = v;
        }
        if let Some(v) = f.records {
            cfg.records = v;
        }
        if let Some(v) = f.mode {
            cfg.mode = v;
        }
        if f.check {
            cfg.check = Some(CheckMode::Full);
        }
        if let Some(v) = f.runs {
            cfg.runs = v;
        }
        if f.engines.is_some() {
            cfg.engines = f.engines;
        }
        if let Some(v) = f.leaf_sizes {
            cfg.leaf_sizes = v;
        }
        if let Some(v) = f.out {
            cfg.out = v;
        }
        if let Some(n) = f.mesh_n {
            cfg.mesh.nx = n;
            cfg.mesh.ny = n;
            cfg.mesh.nz = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.workers == 0 {
            bail!("invalid `workers`: must be at least 1");
        }
        if self.runs == 0 {
            bail!("invalid `runs`: must be at least 1");
        }
        if self.leaf_sizes.is_empty() || self.leaf_sizes.contains(&0) {
            bail!("invalid `leaf_sizes`: need at least one positive value, got {:?}", self.leaf_sizes);
        }
        if self.engines.as_ref().is_some_and(|e| e.is_empty()) {
            bail!("invalid `engines`: list is empty");
        }
        self.mesh_spec().validate()?;
        Ok(())
    }

    pub fn mesh_spec(&self) -> MeshSpec {
        MeshSpec {
            nx: self.mesh.nx,
            ny: self.mesh.ny,
            nz: self.mesh.nz,
            domain: Aabb::new(Point3::from_array(self.mesh.domain_min), Point3::from_array(self.mesh.domain_max)),
            jitter: self.mesh.jitter,
            seed: self.seed,
        }
    }

    pub fn check_mode(&self) -> CheckMode {
        self.check.unwrap_or(match self.mode {
            QueryMode::Reduced => CheckMode::Full,
            QueryMode::Full => CheckMode::Sample,
        })
    }

    pub fn engine_kinds(&self) -> Vec<EngineKind> {
        match &self.engines {
            Some(e) => e.clone(),
            None => EngineKind::ALL.into_iter().filter(|k| k.supports(self.records)).collect(),
        }
    }

    pub fn engine_specs(&self) -> anyhow::Result<Vec<EngineSpec>> {
        Ok(EngineSpec::sweep(&self.engine_kinds(), &self.leaf_sizes)?)
    }
}
