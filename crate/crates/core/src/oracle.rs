//! Linear-scan engine: the baseline every index is benchmarked against and
//! the ground truth every index is tested against.

use crate::error::Result;
use crate::geom::Aabb;
use crate::index::SpatialIndex;
use crate::memory::{MemLedger, MemoryUsage};
use crate::record::{validate_dense_ids, validate_geometry, RecordId, SpatialRecord};

/// A copy of the input records, scanned in full on every query.
///
/// Geometry is stored as a flat array of shapes. When the input ids are the
/// identity sequence (the usual case) the id of a record is its position and
/// no id column is kept; otherwise a parallel id column is stored and charged.
#[derive(Clone, Debug)]
pub struct BruteForceStore<R: SpatialRecord> {
    shapes: Vec<R::Shape>,
    ids: Option<Vec<RecordId>>,
    payload_bytes: usize,
    ledger: MemLedger,
}

impl<R: SpatialRecord> BruteForceStore<R> {
    pub fn build(records: &[R]) -> Result<Self> {
        let in_order = validate_dense_ids(records)?;
        validate_geometry(records)?;
        let mut ledger = MemLedger::new();
        let mut shapes = ledger.vec_with_capacity(records.len());
        shapes.extend(records.iter().map(|r| r.shape()));
        let ids = if in_order {
            None
        } else {
            let mut ids = ledger.vec_with_capacity(records.len());
            ids.extend(records.iter().map(|r| r.id()));
            Some(ids)
        };
        Ok(BruteForceStore { payload_bytes: records.len() * R::PAYLOAD_BYTES, shapes, ids, ledger })
    }

    /// Geometry bytes only: 24 per point, 48 per box. This is the raw data
    /// size that memory classification divides by.
    pub fn payload_bytes(&self) -> usize {
        self.payload_bytes
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    /// The i-th stored record, in input order.
    pub fn record(&self, i: usize) -> R {
        R::from_parts(self.shapes[i], self.id_at(i))
    }

    pub fn records(&self) -> impl Iterator<Item = R> + '_ {
        (0..self.len()).map(|i| self.record(i))
    }

    /// Tight bounds of all stored geometry.
    pub fn bounds(&self) -> Option<Aabb> {
        let mut it = self.shapes.iter();
        let first = R::shape_bounds(it.next()?);
        Some(it.fold(first, |acc, s| acc.union(&R::shape_bounds(s))))
    }

    #[inline]
    fn id_at(&self, i: usize) -> RecordId {
        match &self.ids {
            Some(ids) => ids[i],
            None => RecordId(i as u32),
        }
    }

    pub fn query(&self, q: &Aabb) -> Vec<RecordId> {
        let mut out = Vec::new();
        self.query_into(q, &mut out);
        out
    }

    pub fn query_into(&self, q: &Aabb, out: &mut Vec<RecordId>) {
        for (i, shape) in self.shapes.iter().enumerate() {
            if R::shape_hit(shape, q) {
                out.push(self.id_at(i));
            }
        }
    }

    /// Number of records hit by `q`, without materializing ids.
    pub fn count(&self, q: &Aabb) -> usize {
        self.shapes.iter().filter(|s| R::shape_hit(s, q)).count()
    }
}

impl<R: SpatialRecord> SpatialIndex<R> for BruteForceStore<R> {
    fn engine_name(&self) -> &'static str {
        "brute"
    }

    fn len(&self) -> usize {
        self.shapes.len()
    }

    fn query_box_into(&self, q: &Aabb, out: &mut Vec<RecordId>) {
        self.query_into(q, out)
    }

    fn memory(&self) -> MemoryUsage {
        self.ledger.usage()
    }
}

pub fn bf_build<R: SpatialRecord>(records: &[R]) -> Result<BruteForceStore<R>> {
    BruteForceStore::build(records)
}

pub fn bf_query_box<R: SpatialRecord>(store: &BruteForceStore<R>, q: &Aabb) -> Vec<RecordId> {
    store.query(q)
}
