//! Acceptance criteria, run in order with one PASS/FAIL line each.
//! Exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use common::*;
use rangebench::geom::enclosing_sphere;
use rangebench::harness::{
    bench_rows, classify_memory, classify_throughput, run_datasets, run_matrix, speedup, strong_throughput_class,
    weak_class, write_csv, CheckMode, CsvRow, EngineKind, EngineSpec, MatrixConfig, MemoryClass, Metric, MetricSource,
    ScalingClass, SpeedClass,
};
use rangebench::workload::{build_workload, generate_mesh, Mesh, MeshSpec, QueryClass, QueryMode, QueryWorkload};
use rangebench::{
    Aabb, BoxRecord, BruteForceStore, KdConfig, KdTree, OctConfig, Octree, PointRecord, RTree, RTreeConfig, RecordId,
    RecordKind, SpatialIndex, SpatialRecord, Sphere,
};

// Pinned tolerances.
const ORACLE_MISMATCHES_ALLOWED: usize = 0;
const ORACLE_BUDGET_SECS: f64 = 300.0;
const SELECTIVITY_REL_TOL: f64 = 0.30;
const MIN_XSMALL_SPEEDUP: f64 = 50.0;
const MIN_SPEEDUP_RATIO: f64 = 10.0;
const ADVANTAGE_BUDGET_SECS: f64 = 600.0;
const ANCHOR_POINTS: usize = 1_227_411;
const ANCHOR_BYTES: usize = 29_457_864;
const ANCHOR_RAW_MB: f64 = 29.2;
const ANCHOR_REL_TOL: f64 = 0.02;
const BRUTE_FLATNESS_MAX: f64 = 3.0;

const DESK_N: usize = 101;
const SEED: u64 = 42;
const LEAVES: [usize; 2] = [20, 200];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn desk_mesh() -> &'static Mesh {
    static MESH: OnceLock<Mesh> = OnceLock::new();
    MESH.get_or_init(|| generate_mesh(&MeshSpec::cube(DESK_N, 0.2, SEED)).expect("desk mesh"))
}

fn uniform_million() -> &'static Vec<PointRecord> {
    static PTS: OnceLock<Vec<PointRecord>> = OnceLock::new();
    PTS.get_or_init(|| uniform_points(1_000_000, SEED))
}

fn advantage_report() -> &'static Result<rangebench::harness::BenchReport, String> {
    static REPORT: OnceLock<Result<rangebench::harness::BenchReport, String>> = OnceLock::new();
    REPORT.get_or_init(|| {
        let engines = EngineSpec::sweep(&[EngineKind::Brute, EngineKind::KdTree, EngineKind::RTree], &[20])
            .map_err(|e| e.to_string())?;
        let mut cfg = MatrixConfig::new(engines, RecordKind::Points, 1, SEED);
        cfg.check = CheckMode::Sample;
        run_datasets(std::slice::from_ref(uniform_million()), &cfg).map_err(|e| e.to_string())
    })
}

// 1. Oracle equivalence.

struct Tally {
    queries: usize,
    mismatches: usize,
    first: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { queries: 0, mismatches: 0, first: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.queries += 1;
        if !ok {
            self.mismatches += 1;
            self.first.get_or_insert_with(what);
        }
    }
}

fn same_sorted(mut got: Vec<RecordId>, want: &[u32]) -> bool {
    got.sort_unstable();
    got.len() == want.len() && got.iter().zip(want).all(|(a, b)| a.0 == *b)
}

fn random_instances(t: &mut Tally) {
    for inst in 0..100u64 {
        let pts = uniform_points(1000, 1000 + inst);
        let boxes = random_boxes(1000, 0.1, 2000 + inst);
        let queries = mixed_queries(50, 3000 + inst);
        let bf_p = BruteForceStore::build(&pts).unwrap();
        let bf_b = BruteForceStore::build(&boxes).unwrap();
        let kd = KdTree::build(&pts, KdConfig::new(1 + inst as usize % 25));
        let rtp = RTree::build(&pts, RTreeConfig::new(2 + inst as usize % 30).unwrap());
        let oct = Octree::build(&pts, OctConfig::new(1 + inst as usize % 25));
        let rtb = RTree::build(&boxes, RTreeConfig::new(2 + inst as usize % 30).unwrap());
        for (qi, q) in queries.iter().enumerate() {
            let want = sorted(bf_p.query(q));
            t.record(want == naive_points(&pts, q), || format!("instance {inst} query {qi}: brute vs reference"));
            t.record(same_sorted(kd.query_box(q), &want), || format!("instance {inst} query {qi}: kdtree"));
            t.record(same_sorted(rtp.query_box(q), &want), || format!("instance {inst} query {qi}: rtree points"));
            t.record(same_sorted(oct.query_box_via_sphere(q), &want), || {
                format!("instance {inst} query {qi}: octree adapter")
            });
            let s = enclosing_sphere(q);
            let ball = naive_ball(&pts, &s);
            t.record(same_sorted(oct.query_sphere(&s), &ball), || format!("instance {inst} query {qi}: octree sphere"));
            t.record(same_sorted(kd.query_sphere(&s), &ball), || format!("instance {inst} query {qi}: kdtree sphere"));
            let want_b = sorted(bf_b.query(q));
            t.record(want_b == naive_boxes(&boxes, q), || {
                format!("instance {inst} query {qi}: brute boxes vs reference")
            });
            t.record(same_sorted(rtb.query_box(q), &want_b), || format!("instance {inst} query {qi}: rtree boxes"));
        }
    }
}

fn check_engines<R: SpatialRecord>(
    label: &str,
    oracle: &BruteForceStore<R>,
    engines: &[(String, Box<dyn SpatialIndex<R> + '_>)],
    workload: &QueryWorkload,
    t: &mut Tally,
) {
    let mut set = SetCheck::new(oracle.len());
    let (mut want, mut got) = (Vec::new(), Vec::new());
    for (class, w) in &workload.classes {
        for (qi, q) in w.queries.iter().enumerate() {
            want.clear();
            oracle.query_into(q, &mut want);
            for (name, e) in engines {
                got.clear();
                e.query_box_into(q, &mut got);
                let ok = set.same(&want, &got);
                t.record(ok, || format!("{label} {name} {class} query {qi}: {} vs {}", got.len(), want.len()));
            }
        }
    }
}

/// Native sphere queries against the oracle's box answer filtered by the
/// test-side ball predicate, on every tenth workload query.
fn check_spheres(
    pts: &[PointRecord],
    oracle: &BruteForceStore<PointRecord>,
    kd: &[KdTree],
    oct: &[Octree],
    workload: &QueryWorkload,
    t: &mut Tally,
) {
    let mut set = SetCheck::new(pts.len());
    for (class, w) in &workload.classes {
        for (qi, q) in w.queries.iter().enumerate().step_by(10) {
            let s: Sphere = enclosing_sphere(q);
            let r2 = s.radius * s.radius;
            let c = s.center;
            let reach = Aabb::new(
                rangebench::Point3::new(c.x - s.radius, c.y - s.radius, c.z - s.radius),
                rangebench::Point3::new(c.x + s.radius, c.y + s.radius, c.z + s.radius),
            );
            let want: Vec<RecordId> = oracle
                .query(&reach)
                .into_iter()
                .filter(|id| {
                    let p = pts[id.index()].point;
                    let d = [p.x - s.center.x, p.y - s.center.y, p.z - s.center.z];
                    d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= r2
                })
                .collect();
            for k in kd {
                let ok = set.same(&want, &k.query_sphere(&s));
                t.record(ok, || format!("kdtree sphere {class} query {qi}"));
            }
            for o in oct {
                let ok = set.same(&want, &o.query_sphere(&s));
                t.record(ok, || format!("octree sphere {class} query {qi}"));
            }
        }
    }
}

fn desk_scale(t: &mut Tally) -> Result<(), String> {
    let mesh = desk_mesh();
    let pts = &mesh.points;
    let oracle = BruteForceStore::build(pts).map_err(|e| e.to_string())?;
    let wl = build_workload(&oracle, QueryMode::Full, SEED).map_err(|e| e.to_string())?;
    let kd: Vec<KdTree> = LEAVES.iter().map(|&l| KdTree::build(pts, KdConfig::new(l))).collect();
    let oct: Vec<Octree> = LEAVES.iter().map(|&l| Octree::build(pts, OctConfig::new(l))).collect();
    {
        let mut engines: Vec<(String, Box<dyn SpatialIndex<PointRecord> + '_>)> = Vec::new();
        for (k, l) in kd.iter().zip(LEAVES) {
            engines.push((format!("kdtree:{l}"), Box::new(k.clone())));
        }
        for l in LEAVES {
            engines.push((format!("rtree:{l}"), Box::new(RTree::build(pts, RTreeConfig::new(l).unwrap()))));
        }
        for (o, l) in oct.iter().zip(LEAVES) {
            engines.push((format!("octree:{l} adapter"), Box::new(o.clone())));
        }
        check_engines("points", &oracle, &engines, &wl, t);
    }
    check_spheres(pts, &oracle, &kd, &oct, &wl, t);
    drop((kd, oct));

    let els = &mesh.elements;
    let oracle = BruteForceStore::build(els).map_err(|e| e.to_string())?;
    let wl = build_workload(&oracle, QueryMode::Full, SEED).map_err(|e| e.to_string())?;
    let engines: Vec<(String, Box<dyn SpatialIndex<BoxRecord>>)> = LEAVES
        .iter()
        .map(|&l| (format!("rtree:{l}"), Box::new(RTree::build(els, RTreeConfig::new(l).unwrap())) as Box<_>))
        .collect();
    check_engines("elements", &oracle, &engines, &wl, t);
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut small = Tally::new();
    random_instances(&mut small);
    let mut desk = Tally::new();
    desk_scale(&mut desk)?;
    let secs = start.elapsed().as_secs_f64();
    let mismatches = small.mismatches + desk.mismatches;
    ensure(mismatches == ORACLE_MISMATCHES_ALLOWED, || {
        format!("{mismatches} mismatches, first: {}", small.first.clone().or(desk.first.clone()).unwrap_or_default())
    })?;
    ensure(secs < ORACLE_BUDGET_SECS, || format!("took {secs:.0} s, budget {ORACLE_BUDGET_SECS} s"))?;
    Ok(format!(
        "{} random-instance and {} desk-scale comparisons, 0 mismatches, {secs:.0} s",
        small.queries, desk.queries
    ))
}

// 2. Selectivity calibration.

fn selectivity() -> Outcome {
    let oracle = BruteForceStore::build(&desk_mesh().points).map_err(|e| e.to_string())?;
    let wl = build_workload(&oracle, QueryMode::Reduced, SEED).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (c, w) in &wl.classes {
        let rel = (w.achieved_selectivity - c.target_selectivity()).abs() / c.target_selectivity();
        parts.push(format!("{c} {:.3e}", w.achieved_selectivity));
        ensure(rel <= SELECTIVITY_REL_TOL, || {
            format!(
                "{c}: achieved {:.3e} vs target {:.0e} ({:.0}% off)",
                w.achieved_selectivity,
                c.target_selectivity(),
                rel * 100.0
            )
        })?;
    }
    Ok(parts.join(", "))
}

// 3. Selectivity-dependent advantage.

fn advantage() -> Outcome {
    let start = Instant::now();
    let report = advantage_report().as_ref().map_err(Clone::clone)?;
    let secs = start.elapsed().as_secs_f64();
    let brute = report.engine(&EngineSpec::brute()).ok_or("no brute result")?;
    let mut parts = Vec::new();
    for kind in [EngineKind::KdTree, EngineKind::RTree] {
        let e = report.engine(&EngineSpec::new(kind, 20).unwrap()).ok_or("missing engine")?;
        let xs = speedup(e, brute, QueryClass::XSmall);
        let lg = speedup(e, brute, QueryClass::Large);
        parts.push(format!("{} x-small {xs:.0}x, large {lg:.2}x", kind.name()));
        ensure(xs >= MIN_XSMALL_SPEEDUP, || {
            format!("{}: x-small speedup {xs:.1} < {MIN_XSMALL_SPEEDUP}", kind.name())
        })?;
        ensure(xs / lg >= MIN_SPEEDUP_RATIO, || {
            format!("{}: speedup ratio {:.1} < {MIN_SPEEDUP_RATIO}", kind.name(), xs / lg)
        })?;
    }
    ensure(secs < ADVANTAGE_BUDGET_SECS, || format!("took {secs:.0} s"))?;
    Ok(parts.join("; "))
}

// 4. Classifier golden values.

fn classifiers() -> Outcome {
    use MemoryClass as M;
    use ScalingClass as Sc;
    use SpeedClass as S;
    let tp = classify_throughput(&[47900.0, 36100.0, 4290.0, 99.5]).map_err(|e| e.to_string())?;
    ensure(tp == [S::Fast, S::Fast, S::Moderate, S::Slow], || format!("throughput {tp:?}"))?;
    let mem: Vec<_> = [20.7, 105.0, 612.0].iter().map(|&m| classify_memory(m, 29.2)).collect();
    ensure(mem == [M::Low, M::Moderate, M::High], || format!("memory {mem:?}"))?;
    let g = 8.28;
    let threshold = 1.0 / f64::log2(g);
    ensure(format!("{threshold:.3}") == "0.328", || format!("threshold {threshold}"))?;
    let strong: Vec<_> = [0.81, 0.26, 0.15]
        .iter()
        .map(|&f| strong_throughput_class(f, g))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(strong == [Sc::Good, Sc::Moderate, Sc::Poor], || format!("strong {strong:?}"))?;
    let weak: Vec<_> = [0.047, 0.217, 0.389].iter().map(|&c| weak_class(c)).collect();
    ensure(weak == [Sc::Good, Sc::Moderate, Sc::Poor], || format!("weak {weak:?}"))?;
    Ok("throughput F/F/M/S, memory L/M/H, strong G/M/P at threshold 0.328, weak G/M/P".into())
}

// 5. Raw-memory anchor.

fn memory_anchor() -> Outcome {
    let pts = uniform_points(ANCHOR_POINTS, SEED);
    let bf = BruteForceStore::build(&pts).map_err(|e| e.to_string())?;
    let bytes = bf.memory().live_bytes;
    ensure(bytes == ANCHOR_BYTES, || format!("{bytes} B, expected {ANCHOR_BYTES}"))?;
    let rel = (bytes as f64 / 1e6 - ANCHOR_RAW_MB).abs() / ANCHOR_RAW_MB;
    ensure(rel <= ANCHOR_REL_TOL, || format!("{:.1}% from {ANCHOR_RAW_MB} MB", rel * 100.0))?;
    Ok(format!("{bytes} B, {:.2}% from {ANCHOR_RAW_MB} MB", rel * 100.0))
}

// 6. Structural invariants.

fn structure() -> Outcome {
    let mesh = desk_mesh();
    let mut violations: Vec<String> = Vec::new();
    let mut builds = 0;
    let mut tag = |name: String, v: Vec<String>| {
        builds += 1;
        violations.extend(v.into_iter().map(|s| format!("{name}: {s}")));
    };
    for l in LEAVES {
        tag(format!("kdtree:{l}"), KdTree::build(&mesh.points, KdConfig::new(l)).structure_violations());
        tag(
            format!("rtree:{l} points"),
            RTree::build(&mesh.points, RTreeConfig::new(l).unwrap()).structure_violations(),
        );
        tag(
            format!("rtree:{l} elements"),
            RTree::build(&mesh.elements, RTreeConfig::new(l).unwrap()).structure_violations(),
        );
        tag(format!("octree:{l}"), Octree::build(&mesh.points, OctConfig::new(l)).structure_violations());
    }
    ensure(violations.is_empty(), || format!("{} violations, first: {}", violations.len(), violations[0]))?;
    Ok(format!("{builds} builds, 0 violations"))
}

// 7. Brute-force flatness.

fn flatness() -> Outcome {
    let report = advantage_report().as_ref().map_err(Clone::clone)?;
    let brute = report.engine(&EngineSpec::brute()).ok_or("no brute result")?;
    let qps: Vec<f64> = QueryClass::ALL.iter().map(|&c| brute.metric(Metric::Queries(c))).collect();
    let hi = qps.iter().cloned().fold(f64::MIN, f64::max);
    let lo = qps.iter().cloned().fold(f64::MAX, f64::min);
    ensure(hi / lo < BRUTE_FLATNESS_MAX, || format!("spread {:.2}x over {qps:?}", hi / lo))?;
    Ok(format!("spread {:.2}x ({})", hi / lo, qps.iter().map(|v| format!("{v:.1}")).collect::<Vec<_>>().join(", ")))
}

// 8. Determinism.

fn non_timing_csv(rows: &[CsvRow]) -> Result<Vec<u8>, String> {
    let masked: Vec<CsvRow> = rows
        .iter()
        .map(|r| if r.is_timing() { CsvRow { value: 0.0, class: String::new(), ..r.clone() } } else { r.clone() })
        .collect();
    let mut buf = Vec::new();
    write_csv(&mut buf, &masked).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn determinism() -> Outcome {
    let mut out = Vec::new();
    // Element x-small calibration needs a few hundred thousand boxes per
    // worker, so elements run on a larger mesh with a single worker.
    for (kind, n, workers) in [(RecordKind::Points, 41, 2), (RecordKind::Elements, 71, 1)] {
        let kinds: Vec<EngineKind> = EngineKind::ALL.into_iter().filter(|k| k.supports(kind)).collect();
        let mut csvs = Vec::new();
        for _ in 0..2 {
            let mesh = generate_mesh(&MeshSpec::cube(n, 0.2, SEED)).map_err(|e| e.to_string())?;
            let mut cfg = MatrixConfig::new(EngineSpec::sweep(&kinds, &LEAVES).unwrap(), kind, workers, SEED);
            cfg.check = CheckMode::Full;
            cfg.runs = 1;
            let report = run_matrix(&mesh, &cfg).map_err(|e| e.to_string())?;
            let sides: Vec<[f64; 4]> = report.workers_detail.iter().map(|w| w.sides).collect();
            csvs.push((non_timing_csv(&bench_rows(&report))?, sides));
        }
        ensure(csvs[0] == csvs[1], || format!("{kind}: runs differ"))?;
        out.push(format!("{kind} {} bytes", csvs[0].0.len()));
    }
    Ok(format!("identical non-timing CSV ({})", out.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("selectivity calibration", selectivity),
        ("selectivity-dependent advantage", advantage),
        ("classifier golden values", classifiers),
        ("raw-memory anchor", memory_anchor),
        ("structural invariants", structure),
        ("brute-force flatness", flatness),
        ("determinism", determinism),
    ];
    // Numeric arguments select criteria; anything else is ignored.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (mut ran, mut failed) = (0, 0);
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{secs:.1} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
