//! Static spatial indices for axis-aligned box range queries over mesh
//! nodes and mesh-element bounding boxes, with a brute-force oracle, a
//! synthetic hex-mesh workload generator and a benchmark harness.

pub mod error;
pub mod geom;
pub mod harness;
pub mod index;
pub mod kdtree;
pub mod memory;
pub mod octree;
pub mod oracle;
pub mod record;
pub mod rtree;
pub mod workload;

pub use error::{Error, Result};
pub use geom::{Aabb, Point3, Sphere};
pub use index::SpatialIndex;
pub use kdtree::{KdConfig, KdTree};
pub use memory::MemoryUsage;
pub use octree::{OctConfig, Octree};
pub use oracle::BruteForceStore;
pub use record::{BoxRecord, PointRecord, RecordId, RecordKind, SpatialRecord};
pub use rtree::{RTree, RTreeConfig};
