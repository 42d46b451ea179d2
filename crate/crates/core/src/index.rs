//! The build-once, query-many contract shared by every engine.

use crate::geom::Aabb;
use crate::memory::MemoryUsage;
use crate::record::{RecordId, SpatialRecord};

pub trait SpatialIndex<R: SpatialRecord>: Send + Sync {
    /// Short engine name used in reports (`brute`, `kdtree`, `rtree`, `octree`).
    fn engine_name(&self) -> &'static str;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends the ids of every record hit by `q` (closed semantics).
    /// Each id appears once; order is unspecified.
    fn query_box_into(&self, q: &Aabb, out: &mut Vec<RecordId>);

    fn query_box(&self, q: &Aabb) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_box_into(q, &mut out);
        out
    }

    /// Index-attributable bytes after build and during build.
    fn memory(&self) -> MemoryUsage;
}
