//! Records stored by the indices: a mesh node or an element bounding box,
//! each carrying a dense identifier.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point3};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordId(pub u32);

impl RecordId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Points,
    Elements,
}

impl RecordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Points => "points",
            RecordKind::Elements => "elements",
        }
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RecordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "points" => Ok(RecordKind::Points),
            "elements" => Ok(RecordKind::Elements),
            other => Err(Error::InvalidConfig {
                field: "records",
                reason: format!("expected `points` or `elements`, got `{other}`"),
            }),
        }
    }
}

/// A mesh node.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PointRecord {
    pub point: Point3,
    pub id: RecordId,
}

/// A mesh element, represented by its axis-aligned bounding box.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BoxRecord {
    pub bounds: Aabb,
    pub id: RecordId,
}

impl PointRecord {
    pub fn new(point: Point3, id: u32) -> Self {
        PointRecord { point, id: RecordId(id) }
    }
}

impl BoxRecord {
    pub fn new(bounds: Aabb, id: u32) -> Self {
        BoxRecord { bounds, id: RecordId(id) }
    }
}

/// Common surface of [`PointRecord`] and [`BoxRecord`] used by the generic
/// engines (brute force, R-tree) and by the workload and harness code.
pub trait SpatialRecord: Copy + Send + Sync + fmt::Debug + 'static {
    /// Bare geometry, without the identifier.
    type Shape: Copy + Send + Sync + fmt::Debug + PartialEq;

    const KIND: RecordKind;

    /// Bytes of geometry per record: 3 doubles for a point, 6 for a box.
    const PAYLOAD_BYTES: usize = std::mem::size_of::<Self::Shape>();

    fn from_parts(shape: Self::Shape, id: RecordId) -> Self;
    fn shape(&self) -> Self::Shape;
    fn id(&self) -> RecordId;

    fn shape_bounds(shape: &Self::Shape) -> Aabb;
    /// Closed-boundary hit test of a bare shape against a query box.
    fn shape_hit(shape: &Self::Shape, q: &Aabb) -> bool;

    #[inline]
    fn bounds(&self) -> Aabb {
        Self::shape_bounds(&self.shape())
    }

    #[inline]
    fn center(&self) -> Point3 {
        self.bounds().center()
    }

    #[inline]
    fn hit_by(&self, q: &Aabb) -> bool {
        Self::shape_hit(&self.shape(), q)
    }
}

impl SpatialRecord for PointRecord {
    type Shape = Point3;
    const KIND: RecordKind = RecordKind::Points;

    #[inline]
    fn from_parts(shape: Point3, id: RecordId) -> Self {
        PointRecord { point: shape, id }
    }
    #[inline]
    fn shape(&self) -> Point3 {
        self.point
    }
    #[inline]
    fn id(&self) -> RecordId {
        self.id
    }
    #[inline]
    fn shape_bounds(shape: &Point3) -> Aabb {
        Aabb::from_point(*shape)
    }
    #[inline]
    fn shape_hit(shape: &Point3, q: &Aabb) -> bool {
        q.contains_point(shape)
    }
    #[inline]
    fn center(&self) -> Point3 {
        self.point
    }
}

impl SpatialRecord for BoxRecord {
    type Shape = Aabb;
    const KIND: RecordKind = RecordKind::Elements;

    #[inline]
    fn from_parts(shape: Aabb, id: RecordId) -> Self {
        BoxRecord { bounds: shape, id }
    }
    #[inline]
    fn shape(&self) -> Aabb {
        self.bounds
    }
    #[inline]
    fn id(&self) -> RecordId {
        self.id
    }
    #[inline]
    fn shape_bounds(shape: &Aabb) -> Aabb {
        *shape
    }
    #[inline]
    fn shape_hit(shape: &Aabb, q: &Aabb) -> bool {
        q.intersects(shape)
    }
}

/// Checks that ids are exactly a permutation of `0..records.len()`.
///
/// Returns `true` when they are additionally in order (`records[i].id == i`).
pub fn validate_dense_ids<R: SpatialRecord>(records: &[R]) -> Result<bool> {
    let n = records.len();
    if n > u32::MAX as usize {
        return Err(Error::TooManyRecords(n));
    }
    let mut seen = vec![false; n];
    let mut in_order = true;
    for (i, r) in records.iter().enumerate() {
        let id = r.id().0;
        let slot = seen.get_mut(id as usize).ok_or(Error::IdOutOfRange { id, count: n })?;
        if *slot {
            return Err(Error::DuplicateId { id });
        }
        *slot = true;
        in_order &= id as usize == i;
    }
    Ok(in_order)
}

/// Validates coordinates of every record (finite, non-inverted boxes).
pub fn validate_geometry<R: SpatialRecord>(records: &[R]) -> Result<()> {
    for r in records {
        let b = r.bounds();
        if !b.is_valid() {
            return Err(if b.min.is_finite() && b.max.is_finite() {
                Error::InvertedBox { min: b.min, max: b.max }
            } else {
                Error::NonFinite(format!("record {}", r.id()))
            });
        }
    }
    Ok(())
}

/// Tight bounding box of all records.
pub fn bounds_of<R: SpatialRecord>(records: &[R]) -> Option<Aabb> {
    let mut it = records.iter();
    let mut b = it.next()?.bounds();
    for r in it {
        b.expand_to_box(&r.bounds());
    }
    Some(b)
}
