//! CSV and plain-text renderings of benchmark and scaling results.
//!
//! The CSV has a header line `engine,config,metric,value,class` and one row
//! per engine configuration and metric, engines in run order, metrics in the
//! order `insertions_per_sec`, `queries_per_sec_{xsmall,small,medium,large}`,
//! `mem_bytes`, `peak_mem_bytes`. `value` is the mean across workers printed
//! in shortest round-trip decimal form. Scaling CSVs use the same columns
//! with `value` holding the factor (strong) or relative change (weak).

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::classify::classify_throughput;
use crate::harness::engine::EngineSpec;
use crate::harness::matrix::{BenchReport, EngineSummary, MetricSummary};
use crate::harness::measure::Metric;
use crate::harness::scaling::{ScalingKind, ScalingReport};
use crate::record::RecordKind;

pub const CSV_HEADER: [&str; 5] = ["engine", "config", "metric", "value", "class"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub engine: String,
    pub config: String,
    pub metric: String,
    pub value: f64,
    pub class: String,
}

impl CsvRow {
    /// Everything except wall-clock-derived values.
    pub fn is_timing(&self) -> bool {
        Metric::from_name(&self.metric).is_some_and(|m| !m.is_memory())
    }
}

pub fn bench_rows(report: &BenchReport) -> Vec<CsvRow> {
    report
        .engines
        .iter()
        .flat_map(|e| {
            e.metrics.iter().map(|s| CsvRow {
                engine: e.engine.to_string(),
                config: e.engine.config_label(),
                metric: s.metric.name().to_string(),
                value: s.mean,
                class: s.class.clone(),
            })
        })
        .collect()
}

pub fn scaling_rows(reports: &[ScalingReport]) -> Vec<CsvRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.rows.iter().map(|row| CsvRow {
                engine: r.engine.to_string(),
                config: r.engine.config_label(),
                metric: row.metric.name().to_string(),
                value: row.factor,
                class: row.class.tag().to_string(),
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([&r.engine, &r.config, &r.metric, &r.value.to_string(), &r.class])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidConfig { field: "csv", reason: format!("unexpected header {:?}", header) });
    }
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Rebuilds per-engine summaries from bench CSV rows. Min and max are not
/// stored in the CSV and come back equal to the mean.
pub fn summaries_from_rows(rows: &[CsvRow], kind: RecordKind, query_counts: [usize; 4]) -> Result<Vec<EngineSummary>> {
    let mut out: Vec<EngineSummary> = Vec::new();
    for r in rows {
        let engine: EngineSpec = r.engine.parse()?;
        let metric = Metric::from_name(&r.metric)
            .ok_or_else(|| Error::InvalidConfig { field: "csv", reason: format!("unknown metric `{}`", r.metric) })?;
        let idx = match out.iter().position(|e| e.engine == engine) {
            Some(i) => i,
            None => {
                out.push(EngineSummary { engine, kind, query_counts, metrics: Vec::new() });
                out.len() - 1
            }
        };
        out[idx].metrics.push(MetricSummary {
            metric,
            mean: r.value,
            min: r.value,
            max: r.value,
            class: r.class.clone(),
        });
    }
    for e in &out {
        if let Some(m) = Metric::ALL.into_iter().find(|m| e.get(*m).is_none()) {
            return Err(Error::InvalidConfig {
                field: "csv",
                reason: format!("{} has no `{}` row", e.engine, m.name()),
            });
        }
    }
    Ok(out)
}

fn fmt_rate(v: f64) -> String {
    if v >= 1e4 {
        format!("{v:.3e}")
    } else {
        format!("{v:.1}")
    }
}

fn fmt_mb(bytes: f64) -> String {
    format!("{:.2}", bytes / 1e6)
}

/// Fixed-width table: one line per engine configuration, every cell a value
/// with its class tag.
pub fn bench_table(report: &BenchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} records, {} worker(s), {} queries, seed {}",
        report.kind,
        report.workers,
        report.mode.as_str(),
        report.seed
    );
    let _ = writeln!(
        s,
        "records per worker {:.0}, raw size {} MB",
        report.mean_records_per_worker(),
        fmt_mb(report.mean_raw_bytes())
    );
    s.push_str(&engine_table(&report.engines));
    s
}

/// The per-engine rows of [`bench_table`] without the run header.
pub fn engine_table(engines: &[EngineSummary]) -> String {
    let mut s = String::new();
    let headers =
        ["engine", "config", "insert/s", "xsmall q/s", "small q/s", "medium q/s", "large q/s", "mem MB", "peak MB"];
    let mut rows: Vec<Vec<String>> = vec![headers.iter().map(|h| h.to_string()).collect()];
    for e in engines {
        let mut row = vec![e.engine.to_string(), e.engine.config_label()];
        for m in Metric::ALL {
            let sm = e.get(m).expect("all metrics present");
            let v = if m.is_memory() { fmt_mb(sm.mean) } else { fmt_rate(sm.mean) };
            row.push(format!("{v} [{}]", sm.class));
        }
        rows.push(row);
    }
    render(&mut s, &rows);
    s
}

pub fn scaling_table(reports: &[ScalingReport]) -> String {
    let mut s = String::new();
    let Some(first) = reports.first() else {
        return s;
    };
    match first.kind {
        ScalingKind::Strong { growth } => {
            let _ = writeln!(
                s,
                "strong scaling, growth g = {growth:.2}, good throughput factor >= {:.3}, good memory factor < {growth:.2}",
                1.0 / growth.log2()
            );
        }
        ScalingKind::Weak => {
            let _ = writeln!(s, "weak scaling, change in time per operation, good <= 10%, moderate <= 25%");
        }
    }
    let metrics: Vec<Metric> = first.rows.iter().map(|r| r.metric).collect();
    let mut header = vec!["engine".to_string(), "config".to_string()];
    header.extend(metrics.iter().map(|m| m.name().to_string()));
    let mut rows = vec![header];
    for r in reports {
        let mut row = vec![r.engine.to_string(), r.engine.config_label()];
        for m in &metrics {
            row.push(match r.row(*m) {
                Some(x) if r.kind == ScalingKind::Weak => format!("{:+.1}% [{}]", 100.0 * x.factor, x.class),
                Some(x) => format!("{:.2} [{}]", x.factor, x.class),
                None => "-".into(),
            });
        }
        rows.push(row);
    }
    render(&mut s, &rows);
    s
}

fn render(s: &mut String, rows: &[Vec<String>]) {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|x| x.len()).max().unwrap_or(0)).collect();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(c, x)| format!("{x:<w$}", w = widths[c])).collect();
        let _ = writeln!(s, "{}", line.join("  ").trim_end());
    }
}

/// Re-derives throughput classes from CSV values, to confirm a report is
/// internally consistent.
pub fn recheck_throughput_classes(rows: &[CsvRow]) -> Result<bool> {
    for m in Metric::TIMING {
        let sel: Vec<&CsvRow> = rows.iter().filter(|r| r.metric == m.name()).collect();
        if sel.is_empty() {
            continue;
        }
        let classes = classify_throughput(&sel.iter().map(|r| r.value).collect::<Vec<_>>())?;
        if sel.iter().zip(classes).any(|(r, c)| r.class != c.tag()) {
            return Ok(false);
        }
    }
    Ok(true)
}
