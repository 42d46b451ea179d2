//! Synthetic meshes, worker decomposition, calibrated query workloads and
//! the flat binary record format.

pub mod calibrate;
pub mod decompose;
pub mod mesh;
pub mod rbm;

pub use calibrate::{
    build_workload, calibrate_queries, calibrate_workload, ClassWorkload, QueryClass, QueryMode, QueryWorkload,
};
pub use decompose::{block_layout, decompose, worker_seed, WorkerSubset};
pub use mesh::{generate_mesh, Mesh, MeshSpec};
