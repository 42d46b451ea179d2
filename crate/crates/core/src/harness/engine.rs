use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::kdtree::{KdConfig, KdTree};
use crate::octree::{OctConfig, Octree};
use crate::oracle::BruteForceStore;
use crate::record::{BoxRecord, PointRecord, RecordKind, SpatialRecord};
use crate::rtree::{RTree, RTreeConfig};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Brute,
    KdTree,
    RTree,
    Octree,
}

impl EngineKind {
    pub const ALL: [EngineKind; 4] = [EngineKind::Brute, EngineKind::KdTree, EngineKind::RTree, EngineKind::Octree];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Brute => "brute",
            EngineKind::KdTree => "kdtree",
            EngineKind::RTree => "rtree",
            EngineKind::Octree => "octree",
        }
    }

    pub fn supports(self, kind: RecordKind) -> bool {
        match self {
            EngineKind::Brute | EngineKind::RTree => true,
            EngineKind::KdTree | EngineKind::Octree => kind == RecordKind::Points,
        }
    }

    /// Box queries are answered through an enclosing-sphere query plus a filter.
    pub fn is_adapter(self) -> bool {
        self == EngineKind::Octree
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = if s == "kd" { "kdtree" } else { s };
        EngineKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::InvalidConfig {
            field: "engines",
            reason: format!("unknown engine `{s}` (expected brute, kdtree, rtree or octree)"),
        })
    }
}

/// An engine plus its leaf capacity (R-tree: maximum fanout).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EngineSpec {
    pub kind: EngineKind,
    /// `None` for brute force.
    pub leaf_size: Option<usize>,
}

impl EngineSpec {
    pub fn brute() -> Self {
        EngineSpec { kind: EngineKind::Brute, leaf_size: None }
    }

    pub fn new(kind: EngineKind, leaf_size: usize) -> Result<Self> {
        if kind == EngineKind::Brute {
            return Ok(Self::brute());
        }
        let min = if kind == EngineKind::RTree { 2 } else { 1 };
        if leaf_size < min {
            return Err(Error::InvalidConfig {
                field: "leaf_sizes",
                reason: format!("{} needs leaf size at least {min}, got {leaf_size}", kind.name()),
            });
        }
        Ok(EngineSpec { kind, leaf_size: Some(leaf_size) })
    }

    /// Every engine in `kinds`, crossed with every leaf size (brute once).
    pub fn sweep(kinds: &[EngineKind], leaf_sizes: &[usize]) -> Result<Vec<EngineSpec>> {
        let mut out = Vec::new();
        for &k in kinds {
            if k == EngineKind::Brute {
                out.push(Self::brute());
            } else {
                for &l in leaf_sizes {
                    out.push(Self::new(k, l)?);
                }
            }
        }
        out.dedup();
        Ok(out)
    }

    /// Configuration column of the report.
    pub fn config_label(&self) -> String {
        match (self.kind, self.leaf_size) {
            (EngineKind::Brute, _) | (_, None) => "-".to_string(),
            (EngineKind::KdTree, Some(l)) => format!("leaf={l}"),
            (EngineKind::RTree, Some(m)) => {
                let min = RTreeConfig::new(m).map(|c| c.min_fanout).unwrap_or(0);
                format!("fanout={m};min={min}")
            }
            (EngineKind::Octree, Some(l)) => format!("leaf={l};adapter"),
        }
    }

    fn leaf(&self) -> usize {
        self.leaf_size.unwrap_or(20)
    }
}

impl fmt::Display for EngineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.leaf_size {
            Some(l) => write!(f, "{}:{l}", self.kind.name()),
            None => f.write_str(self.kind.name()),
        }
    }
}

impl FromStr for EngineSpec {
    type Err = Error;

    /// `brute`, `kdtree:20`, `rtree:200`, `octree:20`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None => {
                let kind: EngineKind = s.parse()?;
                if kind == EngineKind::Brute {
                    Ok(Self::brute())
                } else {
                    Err(Error::InvalidConfig {
                        field: "engines",
                        reason: format!("`{s}` needs a leaf size, e.g. `{s}:20`"),
                    })
                }
            }
            Some((k, l)) => {
                let kind: EngineKind = k.parse()?;
                let leaf = l
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidConfig { field: "leaf_sizes", reason: format!("`{l}`: {e}") })?;
                Self::new(kind, leaf)
            }
        }
    }
}

/// Record types the harness can build engines for.
pub trait EngineRecord: SpatialRecord {
    fn build_engine(spec: &EngineSpec, records: &[Self]) -> Result<Box<dyn SpatialIndex<Self>>>;
}

fn mismatch(spec: &EngineSpec, kind: RecordKind) -> Error {
    Error::KindMismatch { engine: spec.kind.name().to_string(), kind: kind.to_string() }
}

impl EngineRecord for PointRecord {
    fn build_engine(spec: &EngineSpec, records: &[Self]) -> Result<Box<dyn SpatialIndex<Self>>> {
        Ok(match spec.kind {
            EngineKind::Brute => Box::new(BruteForceStore::build(records)?),
            EngineKind::KdTree => Box::new(KdTree::build(records, KdConfig::new(spec.leaf()))),
            EngineKind::RTree => Box::new(RTree::build(records, RTreeConfig::new(spec.leaf())?)),
            EngineKind::Octree => Box::new(Octree::build(records, OctConfig::new(spec.leaf()))),
        })
    }
}

impl EngineRecord for BoxRecord {
    fn build_engine(spec: &EngineSpec, records: &[Self]) -> Result<Box<dyn SpatialIndex<Self>>> {
        Ok(match spec.kind {
            EngineKind::Brute => Box::new(BruteForceStore::build(records)?),
            EngineKind::RTree => Box::new(RTree::build(records, RTreeConfig::new(spec.leaf())?)),
            EngineKind::KdTree | EngineKind::Octree => return Err(mismatch(spec, RecordKind::Elements)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Aabb;

    #[test]
    fn parse_and_label() {
        let s: EngineSpec = "kdtree:20".parse().unwrap();
        assert_eq!(s, EngineSpec::new(EngineKind::KdTree, 20).unwrap());
        assert_eq!(s.config_label(), "leaf=20");
        assert_eq!("rtree:200".parse::<EngineSpec>().unwrap().config_label(), "fanout=200;min=80");
        assert_eq!("octree:20".parse::<EngineSpec>().unwrap().config_label(), "leaf=20;adapter");
        assert_eq!("brute".parse::<EngineSpec>().unwrap().config_label(), "-");
        assert!("kdtree".parse::<EngineSpec>().is_err());
        assert!("rtree:1".parse::<EngineSpec>().is_err());
        assert!("quadtree:4".parse::<EngineSpec>().is_err());
        assert_eq!(s.to_string().parse::<EngineSpec>().unwrap(), s);
    }

    #[test]
    fn sweep_expands_leaf_sizes() {
        let specs = EngineSpec::sweep(&EngineKind::ALL, &[20, 200]).unwrap();
        let names: Vec<String> = specs.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["brute", "kdtree:20", "kdtree:200", "rtree:20", "rtree:200", "octree:20", "octree:200"]);
    }

    #[test]
    fn point_only_engines_reject_boxes() {
        let boxes = [BoxRecord::new(Aabb::cube(0.0, 1.0), 0)];
        for kind in [EngineKind::KdTree, EngineKind::Octree] {
            let spec = EngineSpec::new(kind, 8).unwrap();
            assert!(matches!(BoxRecord::build_engine(&spec, &boxes), Err(Error::KindMismatch { .. })));
        }
        let spec = EngineSpec::new(EngineKind::RTree, 8).unwrap();
        assert_eq!(BoxRecord::build_engine(&spec, &boxes).unwrap().len(), 1);
    }
}
