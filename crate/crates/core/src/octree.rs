//! Region octree over mesh nodes.
//!
//! The root cell is a cube centered on the data bounds with side equal to
//! the longest extent. A cell splits into eight congruent octants while it
//! holds more than `leaf_size` records and is shallower than `max_depth`.
//! Records live only in leaves. While building, a record on an octant
//! boundary goes to the upper octant (cells are half-open on the low side),
//! so each record has exactly one leaf. Queries still use closed semantics.
//!
//! The native query shape is a sphere. Box queries go through
//! [`Octree::query_box_via_sphere`]: query the box's enclosing sphere, then
//! keep only records inside the box.

use crate::geom::{enclosing_sphere, Aabb, Point3, Sphere};
use crate::index::SpatialIndex;
use crate::kdtree::partition;
use crate::memory::{vec_bytes, MemLedger, MemoryUsage};
use crate::record::{PointRecord, RecordId};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OctConfig {
    pub leaf_size: usize,
    pub max_depth: usize,
}

impl OctConfig {
    pub fn new(leaf_size: usize) -> Self {
        Self::with_max_depth(leaf_size, 32)
    }

    pub fn with_max_depth(leaf_size: usize, max_depth: usize) -> Self {
        assert!(leaf_size >= 1, "leaf_size must be at least 1");
        assert!(max_depth >= 1, "max_depth must be at least 1");
        OctConfig { leaf_size, max_depth }
    }
}

impl Default for OctConfig {
    fn default() -> Self {
        OctConfig::new(20)
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum OctNodeKind {
    /// Children are stored at `first_child..first_child + 8`, octant `i`
    /// taking the upper half of axis `k` when bit `k` of `i` is set.
    Internal {
        first_child: u32,
    },
    Leaf,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct OctNode {
    pub cell: Aabb,
    /// Range of `Octree::records` below this node.
    pub start: u32,
    pub end: u32,
    pub depth: u16,
    pub kind: OctNodeKind,
}

impl OctNode {
    pub fn len(&self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, OctNodeKind::Leaf)
    }
}

#[derive(Clone, Debug)]
pub struct Octree {
    nodes: Vec<OctNode>,
    records: Vec<PointRecord>,
    config: OctConfig,
    ledger: MemLedger,
}

impl Octree {
    pub fn build(input: &[PointRecord], config: OctConfig) -> Octree {
        assert!(input.len() <= u32::MAX as usize, "too many records for an octree");
        let mut ledger = MemLedger::new();
        let records = ledger.copy_slice(input);
        let nodes = ledger.vec_with_capacity(0);
        let mut tree = Octree { nodes, records, config, ledger };
        if let Some(bounds) = Aabb::enclosing(input.iter().map(|r| r.point)) {
            let cell = root_cube(&bounds);
            let root = OctNode { cell, start: 0, end: input.len() as u32, depth: 0, kind: OctNodeKind::Leaf };
            tree.ledger.push(&mut tree.nodes, root);
            tree.split(0);
        }
        tree
    }

    fn split(&mut self, idx: usize) {
        let node = self.nodes[idx];
        if node.len() <= self.config.leaf_size || node.depth as usize >= self.config.max_depth {
            return;
        }
        let mid = node.cell.center();
        let recs = &mut self.records[node.start as usize..node.end as usize];

        // Three nested partitions (z, then y, then x) leave records grouped
        // by octant index in ascending order.
        let mut bounds = [0usize; 9];
        bounds[8] = recs.len();
        bounds[4] = partition(recs, |r| r.point.z < mid.z);
        for (lo, hi) in [(0usize, 4usize), (4, 8)] {
            let (a, b) = (bounds[lo], bounds[hi]);
            bounds[lo + 2] = a + partition(&mut recs[a..b], |r| r.point.y < mid.y);
        }
        for (lo, hi) in [(0usize, 2usize), (2, 4), (4, 6), (6, 8)] {
            let (a, b) = (bounds[lo], bounds[hi]);
            bounds[lo + 1] = a + partition(&mut recs[a..b], |r| r.point.x < mid.x);
        }

        let first_child = self.nodes.len() as u32;
        for octant in 0..8 {
            let child = OctNode {
                cell: octant_cell(&node.cell, &mid, octant),
                start: node.start + bounds[octant] as u32,
                end: node.start + bounds[octant + 1] as u32,
                depth: node.depth + 1,
                kind: OctNodeKind::Leaf,
            };
            self.ledger.push(&mut self.nodes, child);
        }
        self.nodes[idx].kind = OctNodeKind::Internal { first_child };
        for octant in 0..8 {
            self.split(first_child as usize + octant);
        }
    }

    pub fn config(&self) -> OctConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn root(&self) -> Option<&OctNode> {
        self.nodes.first()
    }

    pub fn nodes(&self) -> &[OctNode] {
        &self.nodes
    }

    pub fn node_records(&self, node: &OctNode) -> &[PointRecord] {
        &self.records[node.start as usize..node.end as usize]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &OctNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth as usize).max().unwrap_or(0)
    }

    pub fn storage_bytes(&self) -> usize {
        vec_bytes(&self.nodes) + vec_bytes(&self.records)
    }

    pub fn query_sphere(&self, s: &Sphere) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_sphere_into(s, &mut out);
        out
    }

    pub fn query_sphere_into(&self, s: &Sphere, out: &mut Vec<RecordId>) {
        self.for_each_in_sphere(s, |r| out.push(r.id));
    }

    fn for_each_in_sphere<F: FnMut(&PointRecord)>(&self, s: &Sphere, mut f: F) {
        if let Some(root) = self.nodes.first() {
            if s.intersects_box(&root.cell) {
                self.visit_sphere(0, s, &mut f);
            }
        }
    }

    fn visit_sphere<F: FnMut(&PointRecord)>(&self, idx: usize, s: &Sphere, f: &mut F) {
        let node = &self.nodes[idx];
        if node.is_empty() {
            return;
        }
        if s.contains_box(&node.cell) {
            self.node_records(node).iter().for_each(f);
            return;
        }
        match node.kind {
            OctNodeKind::Leaf => {
                for r in self.node_records(node) {
                    if s.contains_point(&r.point) {
                        f(r);
                    }
                }
            }
            OctNodeKind::Internal { first_child } => {
                for c in first_child as usize..first_child as usize + 8 {
                    if s.intersects_box(&self.nodes[c].cell) {
                        self.visit_sphere(c, s, f);
                    }
                }
            }
        }
    }

    pub fn query_box_via_sphere(&self, q: &Aabb) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_box_via_sphere_into(q, &mut out);
        out
    }

    /// Box query through the enclosing sphere. Returns the number of sphere
    /// candidates examined by the filter.
    pub fn query_box_via_sphere_into(&self, q: &Aabb, out: &mut Vec<RecordId>) -> usize {
        let s = enclosing_sphere(q);
        let mut candidates = 0usize;
        self.for_each_in_sphere(&s, |r| {
            candidates += 1;
            if q.contains_point(&r.point) {
                out.push(r.id);
            }
        });
        candidates
    }

    /// Ids returned by the sphere phase alone, before box filtering.
    pub fn sphere_candidates(&self, q: &Aabb) -> Vec<RecordId> {
        self.query_sphere(&enclosing_sphere(q))
    }

    /// Full walk checking the eight-children rule, exact octant tiling,
    /// leaf capacity, record placement and coverage.
    pub fn structure_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.nodes.is_empty() {
            if !self.records.is_empty() {
                v.push("records without nodes".into());
            }
            return v;
        }
        let root = &self.nodes[0];
        if root.start != 0 || root.end as usize != self.records.len() {
            v.push("root does not cover all records".into());
        }
        let e = root.cell.max_extent();
        if (0..3).any(|a| (root.cell.extent(a) - e).abs() > 4.0 * f64::EPSILON * e.max(root.cell.max.coord(a).abs())) {
            v.push(format!("root cell is not a cube: {:?}", root.cell));
        }
        let mut covered = 0usize;
        for (idx, node) in self.nodes.iter().enumerate() {
            match node.kind {
                OctNodeKind::Leaf => {
                    covered += node.len();
                    if node.len() > self.config.leaf_size && (node.depth as usize) < self.config.max_depth {
                        v.push(format!("leaf {idx} at depth {} holds {} records", node.depth, node.len()));
                    }
                    if let Some(r) = self.node_records(node).iter().find(|r| !node.cell.contains_point(&r.point)) {
                        v.push(format!("record {} lies outside leaf {idx}", r.id));
                    }
                }
                OctNodeKind::Internal { first_child } => {
                    let fc = first_child as usize;
                    if fc + 8 > self.nodes.len() {
                        v.push(format!("node {idx} children out of range"));
                        continue;
                    }
                    let mid = node.cell.center();
                    let mut expected_start = node.start;
                    for octant in 0..8 {
                        let c = &self.nodes[fc + octant];
                        if c.cell != octant_cell(&node.cell, &mid, octant) {
                            v.push(format!("node {idx} octant {octant} does not tile the parent"));
                        }
                        if c.depth != node.depth + 1 {
                            v.push(format!("node {idx} octant {octant} has wrong depth"));
                        }
                        if c.start != expected_start {
                            v.push(format!("node {idx} octant {octant} range is not contiguous"));
                        }
                        expected_start = c.end;
                    }
                    if expected_start != node.end {
                        v.push(format!("node {idx} children do not cover its records"));
                    }
                }
            }
        }
        let internal = self.nodes.iter().filter(|n| !n.is_leaf()).count();
        if self.nodes.len() != 1 + 8 * internal {
            v.push(format!("{} nodes for {internal} internal nodes", self.nodes.len()));
        }
        if covered != self.records.len() {
            v.push(format!("leaves hold {covered} of {} records", self.records.len()));
        }
        v
    }
}

/// Box queries go through the sphere adapter.
impl SpatialIndex<PointRecord> for Octree {
    fn engine_name(&self) -> &'static str {
        "octree"
    }

    fn len(&self) -> usize {
        self.records.len()
    }

    fn query_box_into(&self, q: &Aabb, out: &mut Vec<RecordId>) {
        self.query_box_via_sphere_into(q, out);
    }

    fn memory(&self) -> MemoryUsage {
        self.ledger.usage()
    }
}

pub fn oct_build(records: &[PointRecord], cfg: OctConfig) -> Octree {
    Octree::build(records, cfg)
}

pub fn oct_query_sphere(tree: &Octree, s: &Sphere) -> Vec<RecordId> {
    tree.query_sphere(s)
}

pub fn oct_query_box_via_sphere(tree: &Octree, q: &Aabb) -> Vec<RecordId> {
    tree.query_box_via_sphere(q)
}

/// Cube centered on the data bounds with side equal to the longest extent,
/// widened by rounding error where `center +- side/2` lands inside the data.
fn root_cube(bounds: &Aabb) -> Aabb {
    let mut cube = Aabb::centered_cube(bounds.center(), bounds.max_extent());
    cube.expand_to_box(bounds);
    cube
}

fn octant_cell(cell: &Aabb, mid: &Point3, octant: usize) -> Aabb {
    let mut b = *cell;
    for axis in 0..3 {
        if octant >> axis & 1 == 1 {
            *b.min.coord_mut(axis) = mid.coord(axis);
        } else {
            *b.max.coord_mut(axis) = mid.coord(axis);
        }
    }
    b
}
