//! Synthetic unstructured hexahedral mesh: a jittered structured grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point3};
use crate::record::{BoxRecord, PointRecord};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    /// Node counts per axis.
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub domain: Aabb,
    /// Node perturbation as a fraction of the grid spacing, in `[0, 0.5)`.
    pub jitter: f64,
    pub seed: u64,
}

impl MeshSpec {
    pub fn cube(n: usize, jitter: f64, seed: u64) -> Self {
        MeshSpec { nx: n, ny: n, nz: n, domain: Aabb::cube(0.0, 1.0), jitter, seed }
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn element_count(&self) -> usize {
        self.nx.saturating_sub(1) * self.ny.saturating_sub(1) * self.nz.saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, n) in [("nx", self.nx), ("ny", self.ny), ("nz", self.nz)] {
            if n < 2 {
                return Err(Error::InvalidConfig {
                    field,
                    reason: format!("need at least 2 nodes per axis to form elements, got {n}"),
                });
            }
        }
        if self.node_count() > u32::MAX as usize {
            return Err(Error::InvalidConfig {
                field: "nx",
                reason: format!("{} nodes exceed 32-bit ids", self.node_count()),
            });
        }
        if !(0.0..0.5).contains(&self.jitter) {
            return Err(Error::InvalidConfig {
                field: "jitter",
                reason: format!("must lie in [0, 0.5), got {}", self.jitter),
            });
        }
        if !self.domain.is_valid() || (0..3).any(|a| self.domain.extent(a) <= 0.0) {
            return Err(Error::InvalidConfig {
                field: "domain",
                reason: "needs finite coordinates and positive extent on every axis".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub spec: MeshSpec,
    /// Nodes, id `i + nx * (j + ny * k)`.
    pub points: Vec<PointRecord>,
    /// One box per cell, id `i + (nx-1) * (j + (ny-1) * k)`.
    pub elements: Vec<BoxRecord>,
}

impl Mesh {
    #[inline]
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.spec.nx * (j + self.spec.ny * k)
    }

    #[inline]
    pub fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + (self.spec.nx - 1) * (j + (self.spec.ny - 1) * k)
    }

    pub fn cell_dims(&self) -> [usize; 3] {
        [self.spec.nx - 1, self.spec.ny - 1, self.spec.nz - 1]
    }
}

/// Builds the grid, perturbs every node by up to `jitter * spacing` per axis
/// (nodes on a domain face keep that face's coordinate), and boxes each cell
/// by its eight corners. Output depends only on `spec`.
pub fn generate_mesh(spec: &MeshSpec) -> Result<Mesh> {
    spec.validate()?;
    let dims = spec.dims();
    let spacing: [f64; 3] = std::array::from_fn(|a| spec.domain.extent(a) / (dims[a] - 1) as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut points = Vec::with_capacity(spec.node_count());
    for k in 0..spec.nz {
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let idx = [i, j, k];
                let mut c = [0.0; 3];
                for a in 0..3 {
                    let u: f64 = rng.gen_range(-1.0..1.0);
                    let base = if idx[a] == dims[a] - 1 {
                        spec.domain.max.coord(a)
                    } else {
                        spec.domain.min.coord(a) + idx[a] as f64 * spacing[a]
                    };
                    let on_face = idx[a] == 0 || idx[a] == dims[a] - 1;
                    c[a] = if on_face { base } else { base + u * spec.jitter * spacing[a] };
                }
                let id = points.len() as u32;
                points.push(PointRecord::new(Point3::from_array(c), id));
            }
        }
    }

    let mut mesh = Mesh { spec: *spec, points, elements: Vec::with_capacity(spec.element_count()) };
    for k in 0..spec.nz - 1 {
        for j in 0..spec.ny - 1 {
            for i in 0..spec.nx - 1 {
                let mut b = Aabb::from_point(mesh.points[mesh.node_index(i, j, k)].point);
                for corner in 1..8 {
                    let n = mesh.node_index(i + (corner & 1), j + (corner >> 1 & 1), k + (corner >> 2 & 1));
                    b.expand_to_point(mesh.points[n].point);
                }
                let id = mesh.elements.len() as u32;
                mesh.elements.push(BoxRecord::new(b, id));
            }
        }
    }
    Ok(mesh)
}
