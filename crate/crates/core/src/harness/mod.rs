//! Measurement, classification, scaling analysis and multi-worker runs.

pub mod classify;
pub mod engine;
pub mod matrix;
pub mod measure;
pub mod report;
pub mod scaling;

pub use classify::{
    classify_memory, classify_throughput, strong_memory_class, strong_throughput_class, weak_class, MemoryClass,
    ScalingClass, SpeedClass,
};
pub use engine::{EngineKind, EngineRecord, EngineSpec};
pub use matrix::{
    run_datasets, run_matrix, run_worker, speedup, BenchReport, EngineSummary, MatrixConfig, MetricSource,
    MetricSummary, WorkerResult,
};
pub use measure::{measure_engine, verify_against_oracle, CheckMode, EngineResult, MeasureOptions, Metric, RunSample};
pub use report::{
    bench_rows, bench_table, engine_table, read_csv, recheck_throughput_classes, scaling_rows, scaling_table,
    summaries_from_rows, write_csv, CsvRow,
};
pub use scaling::{
    classify_strong_factors, growth, strong_scaling, weak_scaling, ScalingKind, ScalingReport, ScalingRow,
};
