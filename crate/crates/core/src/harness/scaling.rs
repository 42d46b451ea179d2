//! Strong and weak scaling comparisons between two results for one engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::classify::{strong_memory_class, strong_throughput_class, weak_class, ScalingClass};
use crate::harness::engine::EngineSpec;
use crate::harness::matrix::MetricSource;
use crate::harness::measure::Metric;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalingKind {
    /// Per-worker data grew by `growth`.
    Strong {
        growth: f64,
    },
    Weak,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub metric: Metric,
    /// Strong: large over small. Weak: relative change in time per operation.
    pub factor: f64,
    pub class: ScalingClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub engine: EngineSpec,
    pub kind: ScalingKind,
    pub rows: Vec<ScalingRow>,
}

impl ScalingReport {
    /// Smallest throughput factor still labelled good, for strong scaling.
    pub fn good_threshold(&self) -> Option<f64> {
        match self.kind {
            ScalingKind::Strong { growth } => Some(1.0 / growth.log2()),
            ScalingKind::Weak => None,
        }
    }

    pub fn row(&self, m: Metric) -> Option<&ScalingRow> {
        self.rows.iter().find(|r| r.metric == m)
    }
}

fn comparable(a: &impl MetricSource, b: &impl MetricSource) -> Result<()> {
    if a.engine_spec() != b.engine_spec() {
        return Err(Error::Incomparable(format!("engines {} and {}", a.engine_spec(), b.engine_spec())));
    }
    if a.record_kind() != b.record_kind() {
        return Err(Error::Incomparable(format!("{} records against {} records", a.record_kind(), b.record_kind())));
    }
    Ok(())
}

/// Growth factor between two per-worker record counts.
pub fn growth(small_records: usize, large_records: usize) -> Result<f64> {
    if small_records == 0 {
        return Err(Error::NoGrowth(f64::NAN));
    }
    let g = large_records as f64 / small_records as f64;
    if g <= 1.0 {
        return Err(Error::NoGrowth(g));
    }
    Ok(g)
}

pub fn strong_scaling<S: MetricSource>(small: &S, large: &S, g: f64) -> Result<ScalingReport> {
    if g.is_nan() || g <= 1.0 {
        return Err(Error::NoGrowth(g));
    }
    comparable(small, large)?;
    let rows = Metric::ALL
        .into_iter()
        .map(|m| {
            let factor = large.metric(m) / small.metric(m);
            let class =
                if m.is_memory() { strong_memory_class(factor, g)? } else { strong_throughput_class(factor, g)? };
            Ok(ScalingRow { metric: m, factor, class })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingReport { engine: small.engine_spec(), kind: ScalingKind::Strong { growth: g }, rows })
}

/// Timing metrics only; a throughput ratio `b/s` is a time ratio `s/b`.
pub fn weak_scaling<S: MetricSource>(baseline: &S, scaled: &S) -> Result<ScalingReport> {
    comparable(baseline, scaled)?;
    if baseline.query_counts() != scaled.query_counts() {
        return Err(Error::Incomparable(format!(
            "query counts differ ({:?} vs {:?})",
            baseline.query_counts(),
            scaled.query_counts()
        )));
    }
    let rows = Metric::TIMING
        .into_iter()
        .map(|m| {
            let change = baseline.metric(m) / scaled.metric(m) - 1.0;
            ScalingRow { metric: m, factor: change, class: weak_class(change) }
        })
        .collect();
    Ok(ScalingReport { engine: baseline.engine_spec(), kind: ScalingKind::Weak, rows })
}

/// Strong-scaling classes straight from factors, for replaying published rows.
pub fn classify_strong_factors(factors: &[(Metric, f64)], g: f64) -> Result<Vec<ScalingClass>> {
    factors
        .iter()
        .map(|&(m, f)| if m.is_memory() { strong_memory_class(f, g) } else { strong_throughput_class(f, g) })
        .collect()
}
