//! Static k-d tree over mesh nodes with sliding-midpoint splits.
//!
//! Each node splits at the midpoint of the longest side of the tight bounding
//! box of its records. If every record falls on one side of that plane the
//! split slides to the nearest record so both children are non-empty.
//! Records are copied into one array in tree order, so every subtree owns a
//! contiguous range and a leaf is a slice.

use crate::geom::{Aabb, Sphere};
use crate::index::SpatialIndex;
use crate::memory::{vec_bytes, MemLedger, MemoryUsage};
use crate::record::{PointRecord, RecordId};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct KdConfig {
    /// Maximum records per leaf. Coincident points beyond this share a leaf.
    pub leaf_size: usize,
}

impl KdConfig {
    pub fn new(leaf_size: usize) -> Self {
        assert!(leaf_size >= 1, "leaf_size must be at least 1");
        KdConfig { leaf_size }
    }
}

impl Default for KdConfig {
    fn default() -> Self {
        KdConfig { leaf_size: 20 }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum KdNodeKind {
    Internal { split_dim: u8, split_value: f64, left: u32, right: u32 },
    Leaf,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct KdNode {
    /// Tight bounds of the records below this node.
    pub bounds: Aabb,
    /// Range of `KdTree::records` owned by this subtree.
    pub start: u32,
    pub end: u32,
    pub kind: KdNodeKind,
}

impl KdNode {
    pub fn len(&self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, KdNodeKind::Leaf)
    }
}

/// Counters from one traversal, for pruning diagnostics.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct TraversalStats {
    pub nodes_visited: usize,
    pub leaves_visited: usize,
}

#[derive(Clone, Debug)]
pub struct KdTree {
    nodes: Vec<KdNode>,
    records: Vec<PointRecord>,
    config: KdConfig,
    ledger: MemLedger,
}

impl KdTree {
    pub fn build(input: &[PointRecord], config: KdConfig) -> KdTree {
        assert!(input.len() <= u32::MAX as usize, "too many records for a k-d tree");
        let mut ledger = MemLedger::new();
        let records = ledger.copy_slice(input);
        let nodes = ledger.vec_with_capacity(0);
        let mut tree = KdTree { nodes, records, config, ledger };
        if !tree.records.is_empty() {
            tree.build_subtree(0, input.len());
        }
        tree
    }

    fn build_subtree(&mut self, start: usize, end: usize) -> u32 {
        let slice = &mut self.records[start..end];
        let bounds = Aabb::enclosing(slice.iter().map(|r| r.point)).expect("non-empty node");
        let idx = self.nodes.len() as u32;
        let leaf = KdNode { bounds, start: start as u32, end: end as u32, kind: KdNodeKind::Leaf };
        self.ledger.push(&mut self.nodes, leaf);

        if slice.len() <= self.config.leaf_size || bounds.max_extent() == 0.0 {
            return idx;
        }

        let dim = bounds.longest_axis();
        let lo = bounds.min.coord(dim);
        let hi = bounds.max.coord(dim);
        let mut split = lo + 0.5 * (hi - lo);
        let mut n_left = partition(slice, |r| r.point.coord(dim) <= split);
        if n_left == slice.len() {
            // Midpoint rounded onto the maximum: slide up so the records at
            // the maximum form the right child.
            split = hi;
            n_left = partition(slice, |r| r.point.coord(dim) < split);
        } else if n_left == 0 {
            split = lo;
            n_left = partition(slice, |r| r.point.coord(dim) <= split);
        }
        debug_assert!(n_left > 0 && n_left < slice.len());

        let mid = start + n_left;
        let left = self.build_subtree(start, mid);
        let right = self.build_subtree(mid, end);
        self.nodes[idx as usize].kind = KdNodeKind::Internal { split_dim: dim as u8, split_value: split, left, right };
        idx
    }

    pub fn config(&self) -> KdConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn root(&self) -> Option<&KdNode> {
        self.nodes.first()
    }

    pub fn nodes(&self) -> &[KdNode] {
        &self.nodes
    }

    /// Records of a node's subtree (all of them, for a leaf).
    pub fn node_records(&self, node: &KdNode) -> &[PointRecord] {
        &self.records[node.start as usize..node.end as usize]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &KdNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn depth(&self) -> usize {
        fn go(t: &KdTree, i: u32) -> usize {
            match t.nodes[i as usize].kind {
                KdNodeKind::Leaf => 0,
                KdNodeKind::Internal { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            go(self, 0)
        }
    }

    /// Bytes currently held, recomputed from the containers.
    pub fn storage_bytes(&self) -> usize {
        vec_bytes(&self.nodes) + vec_bytes(&self.records)
    }

    pub fn query_box(&self, q: &Aabb) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_box_with_stats(q, &mut out);
        out
    }

    pub fn query_box_with_stats(&self, q: &Aabb, out: &mut Vec<RecordId>) -> TraversalStats {
        let mut stats = TraversalStats::default();
        if let Some(root) = self.nodes.first() {
            if root.bounds.intersects(q) {
                self.visit_box(0, q, out, &mut stats);
            }
        }
        stats
    }

    fn visit_box(&self, idx: u32, q: &Aabb, out: &mut Vec<RecordId>, stats: &mut TraversalStats) {
        let node = &self.nodes[idx as usize];
        stats.nodes_visited += 1;
        if q.contains_box(&node.bounds) {
            out.extend(self.node_records(node).iter().map(|r| r.id));
            return;
        }
        match node.kind {
            KdNodeKind::Leaf => {
                stats.leaves_visited += 1;
                out.extend(self.node_records(node).iter().filter(|r| q.contains_point(&r.point)).map(|r| r.id));
            }
            KdNodeKind::Internal { left, right, .. } => {
                for child in [left, right] {
                    if self.nodes[child as usize].bounds.intersects(q) {
                        self.visit_box(child, q, out, stats);
                    }
                }
            }
        }
    }

    pub fn query_sphere(&self, s: &Sphere) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_sphere_into(s, &mut out);
        out
    }

    pub fn query_sphere_into(&self, s: &Sphere, out: &mut Vec<RecordId>) {
        if let Some(root) = self.nodes.first() {
            if s.intersects_box(&root.bounds) {
                self.visit_sphere(0, s, out);
            }
        }
    }

    fn visit_sphere(&self, idx: u32, s: &Sphere, out: &mut Vec<RecordId>) {
        let node = &self.nodes[idx as usize];
        if s.contains_box(&node.bounds) {
            out.extend(self.node_records(node).iter().map(|r| r.id));
            return;
        }
        match node.kind {
            KdNodeKind::Leaf => {
                out.extend(self.node_records(node).iter().filter(|r| s.contains_point(&r.point)).map(|r| r.id));
            }
            KdNodeKind::Internal { left, right, .. } => {
                for child in [left, right] {
                    if s.intersects_box(&self.nodes[child as usize].bounds) {
                        self.visit_sphere(child, s, out);
                    }
                }
            }
        }
    }

    /// Full walk of the tree checking leaf capacity, split ordering, bounds
    /// nesting and tightness, and that leaves partition the records.
    /// Returns one message per violation.
    pub fn structure_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.nodes.is_empty() {
            if !self.records.is_empty() {
                v.push("records without nodes".to_string());
            }
            return v;
        }
        let root = &self.nodes[0];
        if root.start != 0 || root.end as usize != self.records.len() {
            v.push(format!("root range {}..{} does not cover {} records", root.start, root.end, self.records.len()));
        }
        let mut covered = 0usize;
        let mut next_leaf_start = 0u32;
        self.check_node(0, &mut v, &mut covered, &mut next_leaf_start);
        if covered != self.records.len() {
            v.push(format!("leaves hold {covered} records, tree has {}", self.records.len()));
        }
        v
    }

    fn check_node(&self, idx: u32, v: &mut Vec<String>, covered: &mut usize, next_leaf_start: &mut u32) {
        let node = &self.nodes[idx as usize];
        let recs = self.node_records(node);
        if recs.is_empty() {
            v.push(format!("node {idx} is empty"));
            return;
        }
        match Aabb::enclosing(recs.iter().map(|r| r.point)) {
            Some(tight) if tight == node.bounds => {}
            _ => v.push(format!("node {idx} bounds are not tight")),
        }
        match node.kind {
            KdNodeKind::Leaf => {
                if node.start != *next_leaf_start {
                    v.push(format!("leaf {idx} starts at {} not {}", node.start, next_leaf_start));
                }
                *next_leaf_start = node.end;
                *covered += recs.len();
                let coincident = recs.iter().all(|r| r.point == recs[0].point);
                if recs.len() > self.config.leaf_size && !coincident {
                    v.push(format!("leaf {idx} holds {} > {} records", recs.len(), self.config.leaf_size));
                }
            }
            KdNodeKind::Internal { split_dim, split_value, left, right } => {
                let (l, r) = (&self.nodes[left as usize], &self.nodes[right as usize]);
                if l.start != node.start || l.end != r.start || r.end != node.end {
                    v.push(format!("node {idx} children do not split its range"));
                }
                let d = split_dim as usize;
                if self.node_records(l).iter().any(|p| p.point.coord(d) > split_value) {
                    v.push(format!("node {idx} left child crosses split"));
                }
                if self.node_records(r).iter().any(|p| p.point.coord(d) < split_value) {
                    v.push(format!("node {idx} right child crosses split"));
                }
                for c in [l, r] {
                    if !node.bounds.contains_box(&c.bounds) {
                        v.push(format!("node {idx} does not contain child bounds"));
                    }
                }
                self.check_node(left, v, covered, next_leaf_start);
                self.check_node(right, v, covered, next_leaf_start);
            }
        }
    }
}

impl SpatialIndex<PointRecord> for KdTree {
    fn engine_name(&self) -> &'static str {
        "kdtree"
    }

    fn len(&self) -> usize {
        self.records.len()
    }

    fn query_box_into(&self, q: &Aabb, out: &mut Vec<RecordId>) {
        self.query_box_with_stats(q, out);
    }

    fn memory(&self) -> MemoryUsage {
        self.ledger.usage()
    }
}

pub fn kd_build(records: &[PointRecord], cfg: KdConfig) -> KdTree {
    KdTree::build(records, cfg)
}

pub fn kd_query_box(tree: &KdTree, q: &Aabb) -> Vec<RecordId> {
    tree.query_box(q)
}

pub fn kd_query_sphere(tree: &KdTree, s: &Sphere) -> Vec<RecordId> {
    tree.query_sphere(s)
}

/// In-place partition; returns the number of items satisfying `pred`, which
/// end up first.
pub(crate) fn partition<T, F: Fn(&T) -> bool>(items: &mut [T], pred: F) -> usize {
    let mut first_false = 0;
    for i in 0..items.len() {
        if pred(&items[i]) {
            items.swap(first_false, i);
            first_false += 1;
        }
    }
    first_false
}
