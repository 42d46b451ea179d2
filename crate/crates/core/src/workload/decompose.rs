//! Block decomposition of the cell grid among independent workers.
//!
//! Each worker owns a box of cells and receives every node those cells
//! touch, so nodes on an inter-block face are copied to each touching
//! worker. Records are renumbered densely per worker; the global ids are
//! kept alongside.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::record::{BoxRecord, PointRecord};
use crate::workload::mesh::Mesh;

#[derive(Clone, Debug, PartialEq)]
pub struct WorkerSubset {
    pub worker: usize,
    /// Owned cell index ranges per axis.
    pub cells: [Range<usize>; 3],
    pub points: Vec<PointRecord>,
    pub elements: Vec<BoxRecord>,
    /// `node_global[local id]` is the node's id in the full mesh.
    pub node_global: Vec<u32>,
    pub element_global: Vec<u32>,
}

/// Blocks per axis for `workers` workers over a grid of `cells`: the
/// factorization with the smallest total internal interface, first found
/// on ties.
pub fn block_layout(cells: [usize; 3], workers: usize) -> Result<[usize; 3]> {
    let total: usize = cells.iter().product();
    if workers == 0 {
        return Err(Error::InvalidConfig { field: "workers", reason: "must be at least 1".into() });
    }
    if workers > total {
        return Err(Error::TooManyWorkers { workers, elements: total });
    }
    let mut best: Option<([usize; 3], usize)> = None;
    for px in (1..=workers).filter(|&p| workers.is_multiple_of(p)) {
        let rest = workers / px;
        for py in (1..=rest).filter(|&p| rest.is_multiple_of(p)) {
            let p = [px, py, rest / py];
            if (0..3).any(|a| p[a] > cells[a]) {
                continue;
            }
            let interface: usize = (0..3).map(|a| (p[a] - 1) * cells[(a + 1) % 3] * cells[(a + 2) % 3]).sum();
            if best.is_none_or(|(_, s)| interface < s) {
                best = Some((p, interface));
            }
        }
    }
    best.map(|(p, _)| p).ok_or(Error::TooManyWorkers { workers, elements: total })
}

fn block_range(n: usize, parts: usize, b: usize) -> Range<usize> {
    (b * n / parts)..((b + 1) * n / parts)
}

pub fn decompose(mesh: &Mesh, workers: usize) -> Result<Vec<WorkerSubset>> {
    let cells = mesh.cell_dims();
    let layout = block_layout(cells, workers)?;
    let mut out = Vec::with_capacity(workers);
    for w in 0..workers {
        let b = [w % layout[0], (w / layout[0]) % layout[1], w / (layout[0] * layout[1])];
        let r: [Range<usize>; 3] = std::array::from_fn(|a| block_range(cells[a], layout[a], b[a]));

        let mut subset = WorkerSubset {
            worker: w,
            cells: r.clone(),
            points: Vec::new(),
            elements: Vec::with_capacity(r.iter().map(|x| x.len()).product()),
            node_global: Vec::new(),
            element_global: Vec::new(),
        };
        for k in r[2].start..=r[2].end {
            for j in r[1].start..=r[1].end {
                for i in r[0].start..=r[0].end {
                    let g = mesh.node_index(i, j, k);
                    let local = subset.points.len() as u32;
                    subset.points.push(PointRecord::new(mesh.points[g].point, local));
                    subset.node_global.push(g as u32);
                }
            }
        }
        for k in r[2].clone() {
            for j in r[1].clone() {
                for i in r[0].clone() {
                    let g = mesh.cell_index(i, j, k);
                    let local = subset.elements.len() as u32;
                    subset.elements.push(BoxRecord::new(mesh.elements[g].bounds, local));
                    subset.element_global.push(g as u32);
                }
            }
        }
        out.push(subset);
    }
    Ok(out)
}

/// Per-worker seed for workload generation.
pub fn worker_seed(seed: u64, worker: usize) -> u64 {
    seed ^ worker as u64
}
