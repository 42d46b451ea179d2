//! Independent workers, each with its own data, workload and engines.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::classify::{classify_memory, classify_throughput};
use crate::harness::engine::{EngineRecord, EngineSpec};
use crate::harness::measure::{measure_engine, CheckMode, EngineResult, MeasureOptions, Metric};
use crate::oracle::BruteForceStore;
use crate::record::RecordKind;
use crate::workload::{build_workload, decompose, worker_seed, Mesh, QueryClass, QueryMode};

/// Anything that carries per-metric values for one engine configuration.
pub trait MetricSource {
    fn engine_spec(&self) -> EngineSpec;
    fn record_kind(&self) -> RecordKind;
    /// Queries per class, in [`QueryClass::ALL`] order.
    fn query_counts(&self) -> [usize; 4];
    fn metric(&self, m: Metric) -> f64;
}

impl MetricSource for EngineResult {
    fn engine_spec(&self) -> EngineSpec {
        self.engine
    }
    fn record_kind(&self) -> RecordKind {
        self.kind
    }
    fn query_counts(&self) -> [usize; 4] {
        self.query_counts
    }
    fn metric(&self, m: Metric) -> f64 {
        EngineResult::metric(self, m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: Metric,
    /// Mean across workers of each worker's 3-run mean.
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub class: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineSummary {
    pub engine: EngineSpec,
    pub kind: RecordKind,
    pub query_counts: [usize; 4],
    pub metrics: Vec<MetricSummary>,
}

impl EngineSummary {
    pub fn get(&self, m: Metric) -> Option<&MetricSummary> {
        self.metrics.iter().find(|s| s.metric == m)
    }
}

impl MetricSource for EngineSummary {
    fn engine_spec(&self) -> EngineSpec {
        self.engine
    }
    fn record_kind(&self) -> RecordKind {
        self.kind
    }
    fn query_counts(&self) -> [usize; 4] {
        self.query_counts
    }
    fn metric(&self, m: Metric) -> f64 {
        self.get(m).map_or(f64::NAN, |s| s.mean)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkerResult {
    pub worker: usize,
    pub records: usize,
    pub raw_bytes: usize,
    /// Calibrated cube side and audited selectivity per class.
    pub sides: [f64; 4],
    pub achieved_selectivity: [f64; 4],
    pub engines: Vec<EngineResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub kind: RecordKind,
    pub mode: QueryMode,
    pub workers: usize,
    pub seed: u64,
    pub workers_detail: Vec<WorkerResult>,
    pub engines: Vec<EngineSummary>,
}

impl BenchReport {
    pub fn engine(&self, spec: &EngineSpec) -> Option<&EngineSummary> {
        self.engines.iter().find(|e| e.engine == *spec)
    }

    pub fn mean_records_per_worker(&self) -> f64 {
        mean(self.workers_detail.iter().map(|w| w.records as f64))
    }

    pub fn mean_raw_bytes(&self) -> f64 {
        mean(self.workers_detail.iter().map(|w| w.raw_bytes as f64))
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    s / n as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixConfig {
    pub engines: Vec<EngineSpec>,
    pub kind: RecordKind,
    pub workers: usize,
    pub mode: QueryMode,
    pub check: CheckMode,
    pub runs: usize,
    pub seed: u64,
    /// Upper bound on simultaneously running workers; `None` means one per
    /// available core, so per-worker timings are not skewed by
    /// oversubscription.
    pub max_concurrency: Option<usize>,
}

impl MatrixConfig {
    pub fn new(engines: Vec<EngineSpec>, kind: RecordKind, workers: usize, seed: u64) -> Self {
        MatrixConfig {
            engines,
            kind,
            workers,
            mode: QueryMode::Reduced,
            check: CheckMode::Sample,
            runs: 3,
            seed,
            max_concurrency: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.engines.is_empty() {
            return Err(Error::InvalidConfig { field: "engines", reason: "at least one engine is required".into() });
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig { field: "workers", reason: "must be at least 1".into() });
        }
        if let Some(e) = self.engines.iter().find(|e| !e.kind.supports(self.kind)) {
            return Err(Error::KindMismatch { engine: e.kind.name().to_string(), kind: self.kind.to_string() });
        }
        Ok(())
    }

    fn threads(&self, jobs: usize) -> usize {
        let cap = self.max_concurrency.unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()));
        cap.clamp(1, jobs.max(1))
    }
}

/// One worker: oracle, calibrated workload, then every engine in turn.
pub fn run_worker<R: EngineRecord>(worker: usize, records: &[R], cfg: &MatrixConfig) -> Result<WorkerResult> {
    let oracle = BruteForceStore::build(records)?;
    let workload = build_workload(&oracle, cfg.mode, worker_seed(cfg.seed, worker))?;
    let mut sides = [0.0; 4];
    let mut achieved = [0.0; 4];
    for (c, w) in &workload.classes {
        sides[*c as usize] = w.side;
        achieved[*c as usize] = w.achieved_selectivity;
    }
    let opts = MeasureOptions { runs: cfg.runs, check: cfg.check };
    let engines = cfg
        .engines
        .iter()
        .map(|spec| measure_engine(spec, records, &oracle, &workload, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(WorkerResult {
        worker,
        records: records.len(),
        raw_bytes: records.len() * R::PAYLOAD_BYTES,
        sides,
        achieved_selectivity: achieved,
        engines,
    })
}

/// Runs one worker per dataset and aggregates. The first failing worker (by
/// id) aborts the matrix.
pub fn run_datasets<R: EngineRecord>(datasets: &[Vec<R>], cfg: &MatrixConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let jobs = datasets.len();
    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let slots: Mutex<Vec<Option<Result<WorkerResult>>>> = Mutex::new((0..jobs).map(|_| None).collect());

    thread::scope(|s| {
        for _ in 0..cfg.threads(jobs) {
            s.spawn(|| loop {
                if failed.load(Ordering::Relaxed) {
                    break;
                }
                let w = next.fetch_add(1, Ordering::Relaxed);
                if w >= jobs {
                    break;
                }
                let r = run_worker(w, &datasets[w], cfg);
                if r.is_err() {
                    failed.store(true, Ordering::Relaxed);
                }
                slots.lock().unwrap()[w] = Some(r);
            });
        }
    });

    let mut results = Vec::with_capacity(jobs);
    for (w, slot) in slots.into_inner().unwrap().into_iter().enumerate() {
        match slot {
            Some(Ok(r)) => results.push(r),
            Some(Err(e)) => return Err(Error::Worker { worker: w, source: Box::new(e) }),
            // Workers are claimed in id order, so a skipped worker always
            // comes after the failed one that stopped the queue.
            None => unreachable!("worker {w} skipped without an earlier failure"),
        }
    }
    aggregate(R::KIND, cfg, results)
}

/// Decomposes `mesh` among `cfg.workers` and runs every worker.
pub fn run_matrix(mesh: &Mesh, cfg: &MatrixConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let subsets = decompose(mesh, cfg.workers)?;
    match cfg.kind {
        RecordKind::Points => {
            let data: Vec<_> = subsets.into_iter().map(|s| s.points).collect();
            run_datasets(&data, cfg)
        }
        RecordKind::Elements => {
            let data: Vec<_> = subsets.into_iter().map(|s| s.elements).collect();
            run_datasets(&data, cfg)
        }
    }
}

fn aggregate(kind: RecordKind, cfg: &MatrixConfig, workers: Vec<WorkerResult>) -> Result<BenchReport> {
    let raw = mean(workers.iter().map(|w| w.raw_bytes as f64));
    let mut engines: Vec<EngineSummary> = cfg
        .engines
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let per_worker: Vec<&EngineResult> = workers.iter().map(|w| &w.engines[i]).collect();
            let metrics = Metric::ALL
                .into_iter()
                .map(|m| {
                    let vals: Vec<f64> = per_worker.iter().map(|r| r.metric(m)).collect();
                    MetricSummary {
                        metric: m,
                        mean: mean(vals.iter().copied()),
                        min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                        max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                        class: String::new(),
                    }
                })
                .collect();
            EngineSummary { engine: *spec, kind, query_counts: per_worker[0].query_counts, metrics }
        })
        .collect();
    classify_summaries(&mut engines, raw)?;
    Ok(BenchReport { kind, mode: cfg.mode, workers: workers.len(), seed: cfg.seed, workers_detail: workers, engines })
}

/// Fills in the class of every metric: throughputs relative to the best
/// engine, memory relative to `raw_bytes`.
pub fn classify_summaries(engines: &mut [EngineSummary], raw_bytes: f64) -> Result<()> {
    for m in Metric::ALL {
        if m.is_memory() {
            for e in engines.iter_mut() {
                let s = e.metrics.iter_mut().find(|s| s.metric == m).expect("all metrics present");
                s.class =
                    if raw_bytes > 0.0 { classify_memory(s.mean, raw_bytes).tag().to_string() } else { "-".into() };
            }
        } else {
            let vals: Vec<f64> = engines.iter().map(|e| e.metric(m)).collect();
            if vals.is_empty() {
                continue;
            }
            for (e, c) in engines.iter_mut().zip(classify_throughput(&vals)?) {
                e.metrics.iter_mut().find(|s| s.metric == m).expect("all metrics present").class = c.tag().to_string();
            }
        }
    }
    Ok(())
}

/// Speedup of `engine` over `baseline` on one query class.
pub fn speedup(engine: &impl MetricSource, baseline: &impl MetricSource, class: QueryClass) -> f64 {
    engine.metric(Metric::Queries(class)) / baseline.metric(Metric::Queries(class))
}
