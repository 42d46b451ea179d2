//! Timing and memory measurement of one engine on one worker's data.

use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::engine::{EngineRecord, EngineSpec};
use crate::index::SpatialIndex;
use crate::oracle::BruteForceStore;
use crate::record::{RecordId, RecordKind};
use crate::workload::{QueryClass, QueryWorkload};

/// How engine answers are compared with the linear scan.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// No comparison.
    Off,
    /// Every 100th query of each class.
    #[default]
    Sample,
    /// Every query.
    Full,
}

impl CheckMode {
    pub const SAMPLE_STRIDE: usize = 100;

    fn stride(self) -> Option<usize> {
        match self {
            CheckMode::Off => None,
            CheckMode::Sample => Some(Self::SAMPLE_STRIDE),
            CheckMode::Full => Some(1),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    Insertions,
    Queries(QueryClass),
    Mem,
    PeakMem,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Insertions,
        Metric::Queries(QueryClass::XSmall),
        Metric::Queries(QueryClass::Small),
        Metric::Queries(QueryClass::Medium),
        Metric::Queries(QueryClass::Large),
        Metric::Mem,
        Metric::PeakMem,
    ];

    pub const TIMING: [Metric; 5] = [
        Metric::Insertions,
        Metric::Queries(QueryClass::XSmall),
        Metric::Queries(QueryClass::Small),
        Metric::Queries(QueryClass::Medium),
        Metric::Queries(QueryClass::Large),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Insertions => "insertions_per_sec",
            Metric::Queries(QueryClass::XSmall) => "queries_per_sec_xsmall",
            Metric::Queries(QueryClass::Small) => "queries_per_sec_small",
            Metric::Queries(QueryClass::Medium) => "queries_per_sec_medium",
            Metric::Queries(QueryClass::Large) => "queries_per_sec_large",
            Metric::Mem => "mem_bytes",
            Metric::PeakMem => "peak_mem_bytes",
        }
    }

    pub fn is_memory(self) -> bool {
        matches!(self, Metric::Mem | Metric::PeakMem)
    }

    pub fn from_name(s: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// One build plus one pass over every query class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSample {
    pub build_secs: f64,
    /// Seconds per class, in [`QueryClass::ALL`] order.
    pub query_secs: [f64; 4],
    pub mem_bytes: usize,
    pub peak_mem_bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineResult {
    pub engine: EngineSpec,
    pub kind: RecordKind,
    pub records: usize,
    /// Linear-scan payload for the same records.
    pub raw_bytes: usize,
    /// Queries per class, in [`QueryClass::ALL`] order.
    pub query_counts: [usize; 4],
    pub runs: Vec<RunSample>,
}

// Guards against a zero reading from a coarse clock.
const MIN_SECS: f64 = 1e-9;

impl EngineResult {
    fn mean(&self, f: impl Fn(&RunSample) -> f64) -> f64 {
        self.runs.iter().map(f).sum::<f64>() / self.runs.len() as f64
    }

    pub fn insertions_per_sec(&self) -> f64 {
        self.mean(|r| self.records as f64 / r.build_secs.max(MIN_SECS))
    }

    pub fn queries_per_sec(&self, class: QueryClass) -> f64 {
        let i = class as usize;
        self.mean(|r| self.query_counts[i] as f64 / r.query_secs[i].max(MIN_SECS))
    }

    pub fn mem_bytes(&self) -> f64 {
        self.mean(|r| r.mem_bytes as f64)
    }

    pub fn peak_mem_bytes(&self) -> f64 {
        self.mean(|r| r.peak_mem_bytes as f64)
    }

    /// Mean over runs of the given metric.
    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::Insertions => self.insertions_per_sec(),
            Metric::Queries(c) => self.queries_per_sec(c),
            Metric::Mem => self.mem_bytes(),
            Metric::PeakMem => self.peak_mem_bytes(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct MeasureOptions {
    pub runs: usize,
    pub check: CheckMode,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions { runs: 3, check: CheckMode::Sample }
    }
}

fn sorted_ids(v: &mut Vec<RecordId>) -> &[RecordId] {
    v.sort_unstable();
    v
}

/// Compares `engine` with `oracle` on every `stride`-th query of each class.
pub fn verify_against_oracle<R: EngineRecord>(
    engine: &dyn SpatialIndex<R>,
    oracle: &BruteForceStore<R>,
    workload: &QueryWorkload,
    stride: usize,
) -> Result<()> {
    let (mut want, mut got) = (Vec::new(), Vec::new());
    for (class, w) in &workload.classes {
        for (i, q) in w.queries.iter().enumerate().step_by(stride.max(1)) {
            want.clear();
            got.clear();
            oracle.query_into(q, &mut want);
            engine.query_box_into(q, &mut got);
            if sorted_ids(&mut want) != sorted_ids(&mut got) {
                return Err(Error::OracleMismatch {
                    engine: engine.engine_name().to_string(),
                    class: class.name().to_string(),
                    query: i,
                    expected: want.len(),
                    got: got.len(),
                });
            }
        }
    }
    Ok(())
}

fn timed_run<R: EngineRecord>(
    spec: &EngineSpec,
    records: &[R],
    workload: &QueryWorkload,
) -> Result<(RunSample, Box<dyn SpatialIndex<R>>)> {
    let t = Instant::now();
    let engine = R::build_engine(spec, records)?;
    let build_secs = t.elapsed().as_secs_f64();
    let usage = engine.memory();

    let mut query_secs = [0.0; 4];
    let mut out = Vec::new();
    let mut sink = 0u64;
    for (class, w) in &workload.classes {
        let t = Instant::now();
        for q in &w.queries {
            out.clear();
            engine.query_box_into(q, &mut out);
            sink = out.iter().fold(sink, |s, id| s.wrapping_add(id.0 as u64));
        }
        query_secs[*class as usize] = t.elapsed().as_secs_f64();
    }
    black_box(sink);
    Ok((RunSample { build_secs, query_secs, mem_bytes: usage.live_bytes, peak_mem_bytes: usage.peak_bytes }, engine))
}

/// Builds the engine `opts.runs` times, timing construction and every query
/// class each time. After the first build the answers are checked against
/// `oracle` as `opts.check` asks; checking is outside the timed regions.
pub fn measure_engine<R: EngineRecord>(
    spec: &EngineSpec,
    records: &[R],
    oracle: &BruteForceStore<R>,
    workload: &QueryWorkload,
    opts: MeasureOptions,
) -> Result<EngineResult> {
    if opts.runs == 0 {
        return Err(Error::InvalidConfig { field: "runs", reason: "must be at least 1".into() });
    }
    let mut query_counts = [0; 4];
    for (c, w) in &workload.classes {
        query_counts[*c as usize] = w.queries.len();
    }
    let mut runs = Vec::with_capacity(opts.runs);
    for run in 0..opts.runs {
        let (sample, engine) = timed_run(spec, records, workload)?;
        if run == 0 {
            if let Some(stride) = opts.check.stride() {
                verify_against_oracle(engine.as_ref(), oracle, workload, stride)?;
            }
        }
        drop(engine);
        runs.push(sample);
    }
    Ok(EngineResult {
        engine: *spec,
        kind: R::KIND,
        records: records.len(),
        raw_bytes: records.len() * R::PAYLOAD_BYTES,
        query_counts,
        runs,
    })
}
