use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use rangebench::harness::{
    bench_rows, bench_table, engine_table, read_csv, recheck_throughput_classes, run_matrix, scaling_rows,
    scaling_table, strong_scaling, summaries_from_rows, weak_scaling, write_csv, BenchReport, CsvRow, MatrixConfig,
    ScalingReport,
};
use rangebench::workload::{build_workload, decompose, generate_mesh, rbm, worker_seed, Mesh, QueryClass};
use rangebench::{BruteForceStore, RecordKind, SpatialRecord};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const MANIFEST: &str = "manifest.toml";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_TXT: &str = "report.txt";

#[derive(Debug, Serialize, Deserialize)]
pub struct MeshCounts {
    pub nodes: usize,
    pub elements: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WorkerEntry {
    pub worker: usize,
    pub records: usize,
    pub raw_bytes: usize,
    /// Per class, xsmall to large.
    pub sides: Vec<f64>,
    pub achieved_selectivity: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub kind: RecordKind,
    pub workers: usize,
    pub mean_records_per_worker: f64,
    pub query_counts: Vec<usize>,
}

/// Written next to every output: the effective config plus what was made.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub mesh: MeshCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub worker: Vec<WorkerEntry>,
}

impl Manifest {
    fn new(cfg: &RunConfig, mesh: &Mesh) -> Self {
        Manifest {
            config: cfg.clone(),
            mesh: MeshCounts { nodes: mesh.points.len(), elements: mesh.elements.len() },
            run: None,
            worker: Vec::new(),
        }
    }

    fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let text = toml::to_string(self).context("serializing manifest")?;
        fs::write(dir.join(MANIFEST), text).with_context(|| format!("writing {}", dir.join(MANIFEST).display()))
    }

    pub fn read(dir: &Path) -> anyhow::Result<Self> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn prepare(cfg: &RunConfig) -> anyhow::Result<Mesh> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    Ok(generate_mesh(&cfg.mesh_spec())?)
}

pub fn generate(cfg: &RunConfig) -> anyhow::Result<()> {
    let mesh = prepare(cfg)?;
    rbm::write_file(&cfg.out.join("points.rbm"), &mesh.points)?;
    rbm::write_file(&cfg.out.join("elements.rbm"), &mesh.elements)?;
    Manifest::new(cfg, &mesh).write(&cfg.out)?;
    println!("{} nodes, {} elements -> {}", mesh.points.len(), mesh.elements.len(), cfg.out.display());
    Ok(())
}

fn calibrate_subset<R: SpatialRecord>(
    cfg: &RunConfig,
    worker: usize,
    records: &[R],
    qdir: &Path,
) -> anyhow::Result<WorkerEntry> {
    let store = BruteForceStore::build(records)?;
    let wl =
        build_workload(&store, cfg.mode, worker_seed(cfg.seed, worker)).with_context(|| format!("worker {worker}"))?;
    for (c, w) in &wl.classes {
        rbm::write_queries(&qdir.join(format!("worker{worker}_{}.rbm", c.name())), &w.queries)?;
    }
    Ok(WorkerEntry {
        worker,
        records: records.len(),
        raw_bytes: records.len() * R::PAYLOAD_BYTES,
        sides: wl.classes.iter().map(|(_, w)| w.side).collect(),
        achieved_selectivity: wl.classes.iter().map(|(_, w)| w.achieved_selectivity).collect(),
    })
}

pub fn calibrate(cfg: &RunConfig) -> anyhow::Result<()> {
    let mesh = prepare(cfg)?;
    let qdir = cfg.out.join("queries");
    fs::create_dir_all(&qdir)?;
    let mut manifest = Manifest::new(cfg, &mesh);
    for s in decompose(&mesh, cfg.workers)? {
        let entry = match cfg.records {
            RecordKind::Points => calibrate_subset(cfg, s.worker, &s.points, &qdir)?,
            RecordKind::Elements => calibrate_subset(cfg, s.worker, &s.elements, &qdir)?,
        };
        for (c, (side, sel)) in QueryClass::ALL.iter().zip(entry.sides.iter().zip(&entry.achieved_selectivity)) {
            println!(
                "worker {} {:<6} target {:.3e} side {:.6} achieved {:.3e}",
                entry.worker,
                c.name(),
                c.target_selectivity(),
                side,
                sel
            );
        }
        manifest.worker.push(entry);
    }
    manifest.write(&cfg.out)
}

fn write_rows(path: &Path, rows: &[CsvRow]) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_csv(&mut w, rows)?;
    w.flush()?;
    Ok(())
}

fn run_summary(report: &BenchReport) -> RunSummary {
    RunSummary {
        kind: report.kind,
        workers: report.workers,
        mean_records_per_worker: report.mean_records_per_worker(),
        query_counts: QueryClass::ALL.iter().map(|c| c.count(report.mode)).collect(),
    }
}

pub fn bench(cfg: &RunConfig) -> anyhow::Result<()> {
    let mesh = prepare(cfg)?;
    let mut mc = MatrixConfig::new(cfg.engine_specs()?, cfg.records, cfg.workers, cfg.seed);
    mc.mode = cfg.mode;
    mc.check = cfg.check_mode();
    mc.runs = cfg.runs;
    let report = run_matrix(&mesh, &mc)?;

    write_rows(&cfg.out.join(REPORT_CSV), &bench_rows(&report))?;
    let table = bench_table(&report);
    fs::write(cfg.out.join(REPORT_TXT), &table)?;
    let mut manifest = Manifest::new(cfg, &mesh);
    manifest.run = Some(run_summary(&report));
    manifest.worker = report
        .workers_detail
        .iter()
        .map(|w| WorkerEntry {
            worker: w.worker,
            records: w.records,
            raw_bytes: w.raw_bytes,
            sides: w.sides.to_vec(),
            achieved_selectivity: w.achieved_selectivity.to_vec(),
        })
        .collect();
    manifest.write(&cfg.out)?;
    print!("{table}");
    Ok(())
}

/// Per-engine summaries and per-worker record count of a finished bench.
fn load_bench(dir: &Path) -> anyhow::Result<(Manifest, Vec<rangebench::harness::EngineSummary>)> {
    let manifest = Manifest::read(dir)?;
    let Some(run) = &manifest.run else {
        bail!("{} has no bench results", dir.join(MANIFEST).display());
    };
    let counts: [usize; 4] = run
        .query_counts
        .as_slice()
        .try_into()
        .with_context(|| format!("{}: expected 4 query counts", dir.display()))?;
    let path = dir.join(REPORT_CSV);
    let rows = read_csv(File::open(&path).with_context(|| format!("opening {}", path.display()))?)?;
    let summaries = summaries_from_rows(&rows, run.kind, counts)?;
    Ok((manifest, summaries))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ScalingMode {
    Strong,
    Weak,
}

pub fn scaling(small: &Path, large: &Path, mode: ScalingMode, out: &Path) -> anyhow::Result<()> {
    let (ms, small_s) = load_bench(small)?;
    let (ml, large_s) = load_bench(large)?;
    let (rs, rl) = (ms.run.as_ref().unwrap(), ml.run.as_ref().unwrap());
    if rs.kind != rl.kind {
        bail!("incompatible record kinds: {} in {} but {} in {}", rs.kind, small.display(), rl.kind, large.display());
    }
    let mut reports: Vec<ScalingReport> = Vec::new();
    let g = match mode {
        ScalingMode::Strong => {
            let g = rl.mean_records_per_worker / rs.mean_records_per_worker;
            if g.is_nan() || g <= 1.0 {
                return Err(rangebench::Error::NoGrowth(g).into());
            }
            Some(g)
        }
        ScalingMode::Weak => None,
    };
    for s in &small_s {
        let Some(l) = large_s.iter().find(|l| l.engine == s.engine) else {
            continue;
        };
        reports.push(match g {
            Some(g) => strong_scaling(s, l, g)?,
            None => weak_scaling(s, l)?,
        });
    }
    if reports.is_empty() {
        bail!("no engine configuration appears in both runs");
    }
    fs::create_dir_all(out)?;
    write_rows(&out.join("scaling.csv"), &scaling_rows(&reports))?;
    let table = scaling_table(&reports);
    fs::write(out.join("scaling.txt"), &table)?;
    print!("{table}");
    Ok(())
}

pub fn report(dir: &Path) -> anyhow::Result<()> {
    let (manifest, summaries) = load_bench(dir)?;
    let path = dir.join(REPORT_CSV);
    let rows = read_csv(File::open(&path)?)?;
    if !recheck_throughput_classes(&rows)? {
        bail!("{}: throughput classes do not match the values", path.display());
    }
    let run = manifest.run.as_ref().unwrap();
    println!(
        "{} records, {} worker(s), {:.0} records per worker, seed {}",
        run.kind, run.workers, run.mean_records_per_worker, manifest.config.seed
    );
    print!("{}", engine_table(&summaries));
    Ok(())
}
