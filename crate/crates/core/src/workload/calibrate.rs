//! Query workloads calibrated to target selectivities.
//!
//! Queries are cubes with centers drawn uniformly over the data bounds. The
//! cube side is tuned on a fixed probe set of 100 centers: start from
//! `target^(1/3)` times the mean data side, bracket by doubling or halving,
//! then bisect until the probe mean selectivity (measured by linear scan) is
//! within 10% of the target. Queries may overhang the data bounds.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point3};
use crate::oracle::BruteForceStore;
use crate::record::SpatialRecord;

pub const PROBE_QUERIES: usize = 100;
pub const AUDIT_QUERIES: usize = 100;
pub const MAX_ROUNDS: usize = 30;
/// Relative tolerance on the probe mean during calibration.
pub const CALIBRATION_TOLERANCE: f64 = 0.10;
pub const MIN_RECORDS: usize = 1000;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QueryClass {
    XSmall,
    Small,
    Medium,
    Large,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    /// 10,000 / 10,000 / 10,000 / 1,000 queries.
    Full,
    /// One tenth of full.
    #[default]
    Reduced,
}

impl QueryMode {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryMode::Full => "full",
            QueryMode::Reduced => "reduced",
        }
    }
}

impl std::str::FromStr for QueryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(QueryMode::Full),
            "reduced" => Ok(QueryMode::Reduced),
            other => Err(Error::InvalidConfig {
                field: "mode",
                reason: format!("expected `full` or `reduced`, got `{other}`"),
            }),
        }
    }
}

impl QueryClass {
    pub const ALL: [QueryClass; 4] = [QueryClass::XSmall, QueryClass::Small, QueryClass::Medium, QueryClass::Large];

    pub fn name(self) -> &'static str {
        match self {
            QueryClass::XSmall => "xsmall",
            QueryClass::Small => "small",
            QueryClass::Medium => "medium",
            QueryClass::Large => "large",
        }
    }

    /// Fraction of records a query should return.
    pub fn target_selectivity(self) -> f64 {
        match self {
            QueryClass::XSmall => 1e-5,
            QueryClass::Small => 1e-3,
            QueryClass::Medium => 1e-2,
            QueryClass::Large => 1e-1,
        }
    }

    pub fn count_full(self) -> usize {
        match self {
            QueryClass::Large => 1000,
            _ => 10_000,
        }
    }

    pub fn count_reduced(self) -> usize {
        self.count_full() / 10
    }

    pub fn count(self, mode: QueryMode) -> usize {
        match mode {
            QueryMode::Full => self.count_full(),
            QueryMode::Reduced => self.count_reduced(),
        }
    }

    fn seed_salt(self) -> u64 {
        // Distinct odd multipliers keep per-class streams apart.
        0x9E37_79B9_7F4A_7C15u64.wrapping_mul(self as u64 * 2 + 1)
    }
}

impl fmt::Display for QueryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassWorkload {
    pub label: String,
    pub target_selectivity: f64,
    /// Calibrated cube side.
    pub side: f64,
    pub queries: Vec<Aabb>,
    /// Mean selectivity of the first (up to) 100 generated queries.
    pub achieved_selectivity: f64,
    /// Probe evaluations used by calibration.
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryWorkload {
    pub mode: QueryMode,
    pub classes: Vec<(QueryClass, ClassWorkload)>,
}

impl QueryWorkload {
    pub fn get(&self, class: QueryClass) -> Option<&ClassWorkload> {
        self.classes.iter().find(|(c, _)| *c == class).map(|(_, w)| w)
    }
}

fn mean_selectivity<R: SpatialRecord>(store: &BruteForceStore<R>, centers: &[Point3], side: f64) -> f64 {
    let hits: usize = centers.iter().map(|c| store.count(&Aabb::centered_cube(*c, side))).sum();
    hits as f64 / (centers.len() as f64 * store.len() as f64)
}

fn draw_center(rng: &mut ChaCha8Rng, b: &Aabb) -> Point3 {
    let mut c = [0.0; 3];
    for (a, v) in c.iter_mut().enumerate() {
        let u: f64 = rng.gen();
        *v = b.min.coord(a) + u * b.extent(a);
    }
    Point3::from_array(c)
}

/// Calibrates a cube side for `target` on `store` and generates `count`
/// queries at that side.
pub fn calibrate_queries<R: SpatialRecord>(
    store: &BruteForceStore<R>,
    label: &str,
    target: f64,
    count: usize,
    seed: u64,
) -> Result<ClassWorkload> {
    if store.len() < MIN_RECORDS {
        return Err(Error::InvalidConfig {
            field: "records",
            reason: format!("calibration needs at least {MIN_RECORDS} records, got {}", store.len()),
        });
    }
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::InvalidConfig { field: "target_selectivity", reason: format!("{target} not in (0, 1]") });
    }
    let bounds = store.bounds().expect("non-empty store");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<Point3> = (0..PROBE_QUERIES).map(|_| draw_center(&mut rng, &bounds)).collect();

    let mean_side = (bounds.extent(0) + bounds.extent(1) + bounds.extent(2)) / 3.0;
    let tol = CALIBRATION_TOLERANCE * target;
    let ok = |v: f64| (v - target).abs() <= tol;

    let mut side = target.cbrt() * mean_side;
    let mut v = mean_selectivity(store, &probes, side);
    let mut rounds = 1usize;
    if !ok(v) {
        // Double or halve until the target is bracketed, then bisect.
        let growing = v < target;
        let (mut lo, mut hi) = (side, side);
        while rounds < MAX_ROUNDS {
            if growing {
                lo = side;
                side *= 2.0;
            } else {
                hi = side;
                side *= 0.5;
            }
            v = mean_selectivity(store, &probes, side);
            rounds += 1;
            if ok(v) || (growing && v > target) || (!growing && v < target) {
                break;
            }
        }
        if growing {
            hi = side;
        } else {
            lo = side;
        }
        while !ok(v) && rounds < MAX_ROUNDS {
            side = 0.5 * (lo + hi);
            v = mean_selectivity(store, &probes, side);
            rounds += 1;
            if v < target {
                lo = side;
            } else {
                hi = side;
            }
        }
    }
    if !ok(v) {
        return Err(Error::CalibrationDiverged { class: label.to_string(), rounds, last: v, target });
    }

    let queries: Vec<Aabb> = (0..count).map(|_| Aabb::centered_cube(draw_center(&mut rng, &bounds), side)).collect();
    let audit = &queries[..queries.len().min(AUDIT_QUERIES)];
    let achieved = if audit.is_empty() {
        0.0
    } else {
        audit.iter().map(|q| store.count(q)).sum::<usize>() as f64 / (audit.len() as f64 * store.len() as f64)
    };
    Ok(ClassWorkload {
        label: label.to_string(),
        target_selectivity: target,
        side,
        queries,
        achieved_selectivity: achieved,
        rounds,
    })
}

pub fn calibrate_workload<R: SpatialRecord>(
    store: &BruteForceStore<R>,
    class: QueryClass,
    mode: QueryMode,
    seed: u64,
) -> Result<ClassWorkload> {
    calibrate_queries(store, class.name(), class.target_selectivity(), class.count(mode), seed ^ class.seed_salt())
}

/// All four classes.
pub fn build_workload<R: SpatialRecord>(
    store: &BruteForceStore<R>,
    mode: QueryMode,
    seed: u64,
) -> Result<QueryWorkload> {
    let classes = QueryClass::ALL
        .iter()
        .map(|&c| calibrate_workload(store, c, mode, seed).map(|w| (c, w)))
        .collect::<Result<Vec<_>>>()?;
    Ok(QueryWorkload { mode, classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::PointRecord;

    fn uniform(n: usize, seed: u64) -> BruteForceStore<PointRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let recs: Vec<PointRecord> =
            (0..n).map(|i| PointRecord::new(Point3::new(rng.gen(), rng.gen(), rng.gen()), i as u32)).collect();
        BruteForceStore::build(&recs).unwrap()
    }

    #[test]
    fn class_table() {
        let t: Vec<f64> = QueryClass::ALL.iter().map(|c| c.target_selectivity()).collect();
        assert_eq!(t, vec![1e-5, 1e-3, 1e-2, 1e-1]);
        let full: Vec<usize> = QueryClass::ALL.iter().map(|c| c.count(QueryMode::Full)).collect();
        assert_eq!(full, vec![10_000, 10_000, 10_000, 1000]);
        let reduced: Vec<usize> = QueryClass::ALL.iter().map(|c| c.count(QueryMode::Reduced)).collect();
        assert_eq!(reduced, vec![1000, 1000, 1000, 100]);
    }

    #[test]
    fn medium_on_uniform_unit_cube() {
        let store = uniform(20_000, 1);
        let w = calibrate_workload(&store, QueryClass::Medium, QueryMode::Reduced, 5).unwrap();
        assert_eq!(w.queries.len(), 1000);
        // Overhanging queries lose volume near the faces, so the calibrated
        // side sits somewhat above the interior value 0.01^(1/3) ~ 0.215.
        assert!(w.side > 0.2 && w.side < 0.3, "side {}", w.side);
        assert!((w.achieved_selectivity - 0.01).abs() <= 0.3 * 0.01, "{}", w.achieved_selectivity);
        assert!(w.rounds <= MAX_ROUNDS);
    }

    #[test]
    fn saturating_target_returns_everything() {
        let store = uniform(2000, 2);
        let w = calibrate_queries(&store, "all", 1.0, 20, 3).unwrap();
        assert!(w.side >= 1.0);
        for q in &w.queries {
            assert_eq!(store.count(q), 2000);
        }
    }

    #[test]
    fn coincident_points_cannot_calibrate() {
        let recs: Vec<PointRecord> = (0..2000).map(|i| PointRecord::new(Point3::new(0.5, 0.5, 0.5), i)).collect();
        let store = BruteForceStore::build(&recs).unwrap();
        match calibrate_workload(&store, QueryClass::Small, QueryMode::Reduced, 1) {
            Err(Error::CalibrationDiverged { class, rounds, .. }) => {
                assert_eq!(class, "small");
                assert!(rounds <= MAX_ROUNDS);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_records() {
        let store = uniform(999, 1);
        assert!(calibrate_workload(&store, QueryClass::Large, QueryMode::Reduced, 1).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let store = uniform(5000, 4);
        let a = calibrate_workload(&store, QueryClass::Small, QueryMode::Reduced, 9).unwrap();
        let b = calibrate_workload(&store, QueryClass::Small, QueryMode::Reduced, 9).unwrap();
        assert_eq!(a, b);
    }
}
