//! Static R-tree bulk-loaded with Sort-Tile-Recursive packing.
//!
//! Packing one level of `n` entries into nodes of capacity `M`:
//! with `P = ceil(n / M)` nodes and `S = ceil(P^(1/3))`, sort by center x,
//! cut into slabs of `S*S*M` entries, sort each slab by center y, cut into
//! runs of `S*M`, sort each run by center z, and take consecutive groups of
//! `M`. Slab and run sizes are multiples of `M`, so only the final group of a
//! level can be under-filled. The nodes of one level become the entries of
//! the next until a single root remains.

use std::cmp::Ordering;
use std::mem::size_of;

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point3};
use crate::index::SpatialIndex;
use crate::memory::{vec_bytes, MemLedger, MemoryUsage};
use crate::record::{RecordId, SpatialRecord};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct RTreeConfig {
    /// Maximum children per node, also the leaf capacity.
    pub max_fanout: usize,
    pub min_fanout: usize,
}

impl RTreeConfig {
    /// `max_fanout` with the default minimum `ceil(0.4 * max_fanout)`.
    pub fn new(max_fanout: usize) -> Result<Self> {
        Self::with_min(max_fanout, (2 * max_fanout).div_ceil(5))
    }

    pub fn with_min(max_fanout: usize, min_fanout: usize) -> Result<Self> {
        if max_fanout < 2 {
            return Err(Error::InvalidConfig {
                field: "max_fanout",
                reason: format!("must be at least 2, got {max_fanout}"),
            });
        }
        if min_fanout < 1 || min_fanout > max_fanout.div_ceil(2) {
            return Err(Error::InvalidConfig {
                field: "min_fanout",
                reason: format!("must lie in 1..={}, got {min_fanout}", max_fanout.div_ceil(2)),
            });
        }
        Ok(RTreeConfig { max_fanout, min_fanout })
    }
}

/// A node: its bounding box and a range of entries in the level below
/// (records for a leaf, nodes otherwise).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RNode {
    pub mbr: Aabb,
    pub start: u32,
    pub len: u32,
}

impl RNode {
    fn range(&self) -> std::ops::Range<usize> {
        self.start as usize..(self.start + self.len) as usize
    }
}

#[derive(Clone, Debug)]
pub struct RTree<R: SpatialRecord> {
    /// `levels[0]` are leaves; the last level holds only the root.
    levels: Vec<Vec<RNode>>,
    records: Vec<R>,
    config: RTreeConfig,
    ledger: MemLedger,
}

impl<R: SpatialRecord> RTree<R> {
    pub fn build(input: &[R], config: RTreeConfig) -> RTree<R> {
        assert!(input.len() <= u32::MAX as usize, "too many records for an R-tree");
        let m = config.max_fanout;
        let mut ledger = MemLedger::new();
        let mut records = ledger.copy_slice(input);
        let mut levels: Vec<Vec<RNode>> = ledger.vec_with_capacity(0);

        if !records.is_empty() {
            str_order(&mut records, m, |r| (r.center(), r.id().0));
            let mut level: Vec<RNode> = ledger.vec_with_capacity(records.len().div_ceil(m));
            for (i, chunk) in records.chunks(m).enumerate() {
                let mut mbr = chunk[0].bounds();
                for r in &chunk[1..] {
                    mbr.expand_to_box(&r.bounds());
                }
                level.push(RNode { mbr, start: (i * m) as u32, len: chunk.len() as u32 });
            }
            while level.len() > 1 {
                str_order(&mut level, m, |n| (n.mbr.center(), n.start));
                let mut parents: Vec<RNode> = ledger.vec_with_capacity(level.len().div_ceil(m));
                for (i, chunk) in level.chunks(m).enumerate() {
                    let mbr = chunk[1..].iter().fold(chunk[0].mbr, |acc, n| acc.union(&n.mbr));
                    parents.push(RNode { mbr, start: (i * m) as u32, len: chunk.len() as u32 });
                }
                ledger.push(&mut levels, level);
                level = parents;
            }
            ledger.push(&mut levels, level);
        }
        RTree { levels, records, config, ledger }
    }

    pub fn config(&self) -> RTreeConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of levels, counting the leaf level; 0 for an empty tree.
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn root(&self) -> Option<&RNode> {
        self.levels.last().map(|l| &l[0])
    }

    /// Nodes of one level; level 0 are the leaves.
    pub fn level(&self, i: usize) -> &[RNode] {
        &self.levels[i]
    }

    pub fn leaf_records(&self, leaf: &RNode) -> &[R] {
        &self.records[leaf.range()]
    }

    pub fn storage_bytes(&self) -> usize {
        vec_bytes(&self.records)
            + self.levels.capacity() * size_of::<Vec<RNode>>()
            + self.levels.iter().map(vec_bytes).sum::<usize>()
    }

    pub fn query_box(&self, q: &Aabb) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_box_into(q, &mut out);
        out
    }

    pub fn query_box_into(&self, q: &Aabb, out: &mut Vec<RecordId>) {
        if let Some(root) = self.root() {
            if root.mbr.intersects(q) {
                self.visit(self.levels.len() - 1, root, q, out);
            }
        }
    }

    fn visit(&self, level: usize, node: &RNode, q: &Aabb, out: &mut Vec<RecordId>) {
        if q.contains_box(&node.mbr) {
            self.emit_all(level, node, out);
            return;
        }
        if level == 0 {
            out.extend(self.records[node.range()].iter().filter(|r| r.hit_by(q)).map(|r| r.id()));
        } else {
            for child in &self.levels[level - 1][node.range()] {
                if child.mbr.intersects(q) {
                    self.visit(level - 1, child, q, out);
                }
            }
        }
    }

    fn emit_all(&self, level: usize, node: &RNode, out: &mut Vec<RecordId>) {
        if level == 0 {
            out.extend(self.records[node.range()].iter().map(|r| r.id()));
        } else {
            for child in &self.levels[level - 1][node.range()] {
                self.emit_all(level - 1, child, out);
            }
        }
    }

    /// Full walk checking containment, exact tightness, fanout limits, the
    /// one-under-filled-node-per-level bound, record coverage and height.
    pub fn structure_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let n = self.records.len();
        let m = self.config.max_fanout;
        if n == 0 {
            if !self.levels.is_empty() {
                v.push("empty tree has nodes".into());
            }
            return v;
        }
        let expected_height = levels_needed(n, m);
        if self.height() != expected_height {
            v.push(format!("height {} but ceil(log_M n) = {expected_height}", self.height()));
        }
        if self.levels.last().map(Vec::len) != Some(1) {
            v.push("top level is not a single root".into());
        }
        for (li, level) in self.levels.iter().enumerate() {
            let below = if li == 0 { n } else { self.levels[li - 1].len() };
            // Packing the next level permutes this one, so child ranges are
            // checked as a tiling of the level below rather than in order.
            let mut ranges: Vec<(u32, u32)> = level.iter().map(|n| (n.start, n.len)).collect();
            ranges.sort_unstable();
            let mut covered = 0usize;
            for &(start, len) in &ranges {
                if start as usize != covered {
                    v.push(format!("level {li} has a range starting at {start}, expected {covered}"));
                }
                covered = start as usize + len as usize;
            }
            let mut underfilled = 0usize;
            for (ni, node) in level.iter().enumerate() {
                if node.len == 0 || node.len as usize > m {
                    v.push(format!("level {li} node {ni} has {} entries (max {m})", node.len));
                    continue;
                }
                if (node.len as usize) < self.config.min_fanout {
                    underfilled += 1;
                }
                let tight = if li == 0 {
                    let recs = &self.records[node.range()];
                    recs[1..].iter().fold(recs[0].bounds(), |acc, r| acc.union(&r.bounds()))
                } else {
                    let kids = &self.levels[li - 1][node.range()];
                    for k in kids {
                        if !node.mbr.contains_box(&k.mbr) {
                            v.push(format!("level {li} node {ni} does not contain a child"));
                        }
                    }
                    kids[1..].iter().fold(kids[0].mbr, |acc, k| acc.union(&k.mbr))
                };
                if tight != node.mbr {
                    v.push(format!("level {li} node {ni} mbr is not tight"));
                }
            }
            if covered != below {
                v.push(format!("level {li} covers {covered} of {below} entries"));
            }
            if underfilled > 1 {
                v.push(format!("level {li} has {underfilled} under-filled nodes"));
            }
        }
        v
    }
}

impl<R: SpatialRecord> SpatialIndex<R> for RTree<R> {
    fn engine_name(&self) -> &'static str {
        "rtree"
    }

    fn len(&self) -> usize {
        self.records.len()
    }

    fn query_box_into(&self, q: &Aabb, out: &mut Vec<RecordId>) {
        RTree::query_box_into(self, q, out)
    }

    fn memory(&self) -> MemoryUsage {
        self.ledger.usage()
    }
}

pub fn str_build<R: SpatialRecord>(records: &[R], cfg: RTreeConfig) -> RTree<R> {
    RTree::build(records, cfg)
}

pub fn rtree_query_box<R: SpatialRecord>(tree: &RTree<R>, q: &Aabb) -> Vec<RecordId> {
    tree.query_box(q)
}

/// Smallest `L` with `M^L >= n`, at least 1.
pub fn levels_needed(n: usize, m: usize) -> usize {
    let mut levels = 1;
    let mut cap = m as u128;
    while cap < n as u128 {
        cap *= m as u128;
        levels += 1;
    }
    levels
}

/// Smallest `s` with `s^3 >= p`.
fn cube_root_ceil(p: usize) -> usize {
    let mut s = (p as f64).cbrt().round() as usize;
    while s * s * s < p {
        s += 1;
    }
    while s > 1 && (s - 1) * (s - 1) * (s - 1) >= p {
        s -= 1;
    }
    s.max(1)
}

/// Reorders `items` into STR tile order for node capacity `m`. `key` gives
/// the center used for sorting and a tiebreaker that makes the order unique.
fn str_order<T, K>(items: &mut [T], m: usize, key: K)
where
    K: Fn(&T) -> (Point3, u32),
{
    let p = items.len().div_ceil(m);
    let s = cube_root_ceil(p);
    let by_axis = |axis: usize| {
        let key = &key;
        move |a: &T, b: &T| -> Ordering {
            let (ca, ta) = key(a);
            let (cb, tb) = key(b);
            ca.coord(axis).total_cmp(&cb.coord(axis)).then(ta.cmp(&tb))
        }
    };
    items.sort_unstable_by(by_axis(0));
    for slab in items.chunks_mut(s * s * m) {
        slab.sort_unstable_by(by_axis(1));
        for run in slab.chunks_mut(s * m) {
            run.sort_unstable_by(by_axis(2));
        }
    }
}
