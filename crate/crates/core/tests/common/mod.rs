//! Test-side reference answers, written independently of the library's
//! predicates: explicit per-coordinate comparisons over plain arrays.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rangebench::{Aabb, BoxRecord, Point3, PointRecord, RecordId, Sphere};

pub fn uniform_points(n: usize, seed: u64) -> Vec<PointRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| PointRecord::new(Point3::new(rng.gen(), rng.gen(), rng.gen()), i as u32)).collect()
}

/// Boxes with corners in `[0,1]^3` and sides up to `max_side`.
pub fn random_boxes(n: usize, max_side: f64, seed: u64) -> Vec<BoxRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| BoxRecord::new(random_box(&mut rng, max_side), i as u32)).collect()
}

pub fn random_box(rng: &mut ChaCha8Rng, max_side: f64) -> Aabb {
    let lo = [rng.gen::<f64>(), rng.gen(), rng.gen()];
    let side = [rng.gen::<f64>() * max_side, rng.gen::<f64>() * max_side, rng.gen::<f64>() * max_side];
    Aabb::new(Point3::from_array(lo), Point3::new(lo[0] + side[0], lo[1] + side[1], lo[2] + side[2]))
}

/// Query boxes of mixed sizes, some overhanging `[0,1]^3`.
pub fn mixed_queries(n: usize, seed: u64) -> Vec<Aabb> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = [0.0, 0.01, 0.05, 0.2, 0.5, 1.2];
    (0..n)
        .map(|i| {
            let s = sizes[i % sizes.len()];
            let c = [rng.gen_range(-0.1..1.1), rng.gen_range(-0.1..1.1), rng.gen_range(-0.1..1.1)];
            let ext = [s * rng.gen_range(0.2..1.0), s * rng.gen_range(0.2..1.0), s * rng.gen_range(0.2..1.0)];
            Aabb::new(
                Point3::new(c[0] - ext[0], c[1] - ext[1], c[2] - ext[2]),
                Point3::new(c[0] + ext[0], c[1] + ext[1], c[2] + ext[2]),
            )
        })
        .collect()
}

fn lo_hi(q: &Aabb) -> ([f64; 3], [f64; 3]) {
    ([q.min.x, q.min.y, q.min.z], [q.max.x, q.max.y, q.max.z])
}

pub fn naive_points(records: &[PointRecord], q: &Aabb) -> Vec<u32> {
    let (lo, hi) = lo_hi(q);
    let mut out: Vec<u32> = records
        .iter()
        .filter(|r| {
            let c = [r.point.x, r.point.y, r.point.z];
            (0..3).all(|k| lo[k] <= c[k] && c[k] <= hi[k])
        })
        .map(|r| r.id.0)
        .collect();
    out.sort_unstable();
    out
}

pub fn naive_boxes(records: &[BoxRecord], q: &Aabb) -> Vec<u32> {
    let (lo, hi) = lo_hi(q);
    let mut out: Vec<u32> = records
        .iter()
        .filter(|r| {
            let (blo, bhi) = lo_hi(&r.bounds);
            (0..3).all(|k| blo[k] <= hi[k] && lo[k] <= bhi[k])
        })
        .map(|r| r.id.0)
        .collect();
    out.sort_unstable();
    out
}

pub fn naive_ball(records: &[PointRecord], s: &Sphere) -> Vec<u32> {
    let c = [s.center.x, s.center.y, s.center.z];
    let mut out: Vec<u32> = records
        .iter()
        .filter(|r| {
            let p = [r.point.x, r.point.y, r.point.z];
            let d2: f64 = (0..3).map(|k| (p[k] - c[k]) * (p[k] - c[k])).sum();
            d2 <= s.radius * s.radius
        })
        .map(|r| r.id.0)
        .collect();
    out.sort_unstable();
    out
}

pub fn sorted(ids: Vec<RecordId>) -> Vec<u32> {
    let mut v: Vec<u32> = ids.into_iter().map(|r| r.0).collect();
    v.sort_unstable();
    v
}

/// Set comparison in O(result) using per-record stamps; also rejects
/// duplicate ids.
pub struct SetCheck {
    stamp: Vec<u32>,
    round: u32,
}

impl SetCheck {
    pub fn new(n: usize) -> Self {
        SetCheck { stamp: vec![0; n], round: 0 }
    }

    /// True iff `got` holds exactly the ids of `want`, each once.
    pub fn same(&mut self, want: &[RecordId], got: &[RecordId]) -> bool {
        if want.len() != got.len() {
            return false;
        }
        self.round += 2;
        let (mark, seen) = (self.round - 1, self.round);
        for id in want {
            self.stamp[id.index()] = mark;
        }
        for id in got {
            let s = &mut self.stamp[id.index()];
            if *s != mark {
                return false;
            }
            *s = seen;
        }
        true
    }
}
