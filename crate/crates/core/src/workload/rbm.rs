//! Flat binary record files.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic, ASCII "RBM1"
//! 4       4     record kind, u32: 0 = points, 1 = boxes
//! 8       8     record count, u64
//! 16      ...   records
//! ```
//!
//! A point record is 28 bytes: x, y, z as f64 then the id as u32. A box
//! record is 52 bytes: min.x, min.y, min.z, max.x, max.y, max.z as f64 then
//! the id as u32. There is no padding and nothing follows the last record.
//! Query workloads are written as box files with the query index as id.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point3};
use crate::record::{BoxRecord, PointRecord, RecordId, SpatialRecord};

pub const MAGIC: [u8; 4] = *b"RBM1";
pub const HEADER_BYTES: usize = 16;
pub const KIND_POINTS: u32 = 0;
pub const KIND_BOXES: u32 = 1;

/// Records with a fixed on-disk encoding.
pub trait RbmRecord: SpatialRecord {
    const KIND_CODE: u32;
    const ENCODED_BYTES: usize;

    fn encode(&self, out: &mut Vec<u8>);
    fn decode(bytes: &[u8]) -> Self;
}

fn f64_at(b: &[u8], i: usize) -> f64 {
    f64::from_le_bytes(b[8 * i..8 * i + 8].try_into().unwrap())
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes(b[off..off + 4].try_into().unwrap())
}

impl RbmRecord for PointRecord {
    const KIND_CODE: u32 = KIND_POINTS;
    const ENCODED_BYTES: usize = 28;

    fn encode(&self, out: &mut Vec<u8>) {
        for c in self.point.to_array() {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out.extend_from_slice(&self.id.0.to_le_bytes());
    }

    fn decode(b: &[u8]) -> Self {
        PointRecord { point: Point3::new(f64_at(b, 0), f64_at(b, 1), f64_at(b, 2)), id: RecordId(u32_at(b, 24)) }
    }
}

impl RbmRecord for BoxRecord {
    const KIND_CODE: u32 = KIND_BOXES;
    const ENCODED_BYTES: usize = 52;

    fn encode(&self, out: &mut Vec<u8>) {
        for c in self.bounds.min.to_array().into_iter().chain(self.bounds.max.to_array()) {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out.extend_from_slice(&self.id.0.to_le_bytes());
    }

    fn decode(b: &[u8]) -> Self {
        BoxRecord {
            bounds: Aabb::new(
                Point3::new(f64_at(b, 0), f64_at(b, 1), f64_at(b, 2)),
                Point3::new(f64_at(b, 3), f64_at(b, 4), f64_at(b, 5)),
            ),
            id: RecordId(u32_at(b, 48)),
        }
    }
}

pub fn encode<R: RbmRecord>(records: &[R]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_BYTES + records.len() * R::ENCODED_BYTES);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&R::KIND_CODE.to_le_bytes());
    out.extend_from_slice(&(records.len() as u64).to_le_bytes());
    for r in records {
        r.encode(&mut out);
    }
    out
}

pub fn decode<R: RbmRecord>(bytes: &[u8], path: &Path) -> Result<Vec<R>> {
    let bad = |reason: String| Error::Format { path: path.to_path_buf(), reason };
    if bytes.len() < HEADER_BYTES {
        return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if bytes[0..4] != MAGIC {
        return Err(bad("missing RBM1 magic".into()));
    }
    let kind = u32_at(bytes, 4);
    if kind != R::KIND_CODE {
        return Err(bad(format!("record kind {kind}, expected {}", R::KIND_CODE)));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let body = &bytes[HEADER_BYTES..];
    if Some(body.len()) != count.checked_mul(R::ENCODED_BYTES) {
        return Err(bad(format!("header says {count} records but body has {} bytes", body.len())));
    }
    Ok(body.chunks_exact(R::ENCODED_BYTES).map(R::decode).collect())
}

pub fn write_file<R: RbmRecord>(path: &Path, records: &[R]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode(records))?;
    w.flush()?;
    Ok(())
}

pub fn read_file<R: RbmRecord>(path: &Path) -> Result<Vec<R>> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode(&bytes, path)
}

/// Writes a list of query boxes; query `i` gets id `i`.
pub fn write_queries(path: &Path, queries: &[Aabb]) -> Result<()> {
    let recs: Vec<BoxRecord> = queries.iter().enumerate().map(|(i, q)| BoxRecord::new(*q, i as u32)).collect();
    write_file(path, &recs)
}
