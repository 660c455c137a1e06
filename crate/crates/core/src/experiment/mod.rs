//! Experiment orchestration for the `rwre` binary: configuration, a task
//! queue of independent `(seed, size)` jobs, CSV outputs and the run
//! manifest.
//!
//! Every random quantity in a task derives from that task's pre-assigned
//! seed, and results are gathered in task order, so outputs do not depend on
//! the number of worker threads.

mod config;
mod kinds;

pub use config::{ConfigMap, ExperimentConfig, ExperimentKind};

use crate::env::{make_law, EnvironmentLaw, LawSpec};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Manifest fields that vary between identical runs.
pub const TIMESTAMP_FIELDS: [&str; 2] = ["started_at", "wall_time_s"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRecord {
    pub id: usize,
    pub label: String,
    pub seed: u64,
    /// `ok` or the error message.
    pub status: String,
}

impl TaskRecord {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub tasks: Vec<TaskRecord>,
    pub manifest: PathBuf,
}

impl RunReport {
    pub fn failed(&self) -> usize {
        self.tasks.iter().filter(|t| !t.ok()).count()
    }

    /// 0 on full success, 2 when some task failed.
    pub fn exit_code(&self) -> i32 {
        if self.failed() == 0 {
            0
        } else {
            2
        }
    }
}

/// A CSV file with a fixed header; every cell is preformatted.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(&self.name);
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(path)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// One unit of work.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Task {
    pub label: String,
    pub seed: u64,
    pub size: Option<i64>,
    pub radius: Option<f64>,
}

pub(crate) struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub law: EnvironmentLaw,
    pool: rayon::ThreadPool,
    records: std::sync::Mutex<Vec<TaskRecord>>,
}

impl Ctx<'_> {
    /// Runs tasks on the worker pool and returns the successful results in
    /// task order. Failures are recorded.
    pub fn run<T: Send>(&self, tasks: Vec<Task>, f: impl Fn(&Task) -> Result<T> + Sync) -> Vec<(Task, T)> {
        let results: Vec<Result<T>> = self.pool.install(|| tasks.par_iter().map(&f).collect());
        let mut records = self.records.lock().expect("records lock");
        let mut out = Vec::new();
        for (task, r) in tasks.into_iter().zip(results) {
            let id = records.len();
            match r {
                Ok(v) => {
                    records.push(TaskRecord {
                        id,
                        label: task.label.clone(),
                        seed: task.seed,
                        status: "ok".into(),
                    });
                    out.push((task, v));
                }
                Err(e) => records.push(TaskRecord {
                    id,
                    label: task.label.clone(),
                    seed: task.seed,
                    status: e.to_string(),
                }),
            }
        }
        out
    }

    /// Records a failure outside the task queue (e.g. an aggregate).
    pub fn fail(&self, label: &str, e: &Error) {
        let mut records = self.records.lock().expect("records lock");
        let id = records.len();
        records.push(TaskRecord {
            id,
            label: label.to_string(),
            seed: 0,
            status: e.to_string(),
        });
    }

    /// Tasks for every seed.
    pub fn per_seed(&self) -> Vec<Task> {
        self.cfg
            .seeds
            .iter()
            .map(|&seed| Task {
                label: format!("seed={seed}"),
                seed,
                size: None,
                radius: None,
            })
            .collect()
    }

    pub fn per_seed_size(&self) -> Vec<Task> {
        let mut t = Vec::new();
        for &seed in &self.cfg.seeds {
            for &n in &self.cfg.sizes {
                t.push(Task {
                    label: format!("seed={seed} n={n}"),
                    seed,
                    size: Some(n),
                    radius: None,
                });
            }
        }
        t
    }

    pub fn per_seed_radius(&self) -> Vec<Task> {
        let mut t = Vec::new();
        for &seed in &self.cfg.seeds {
            for &r in &self.cfg.radii {
                t.push(Task {
                    label: format!("seed={seed} R={r}"),
                    seed,
                    size: None,
                    radius: Some(r),
                });
            }
        }
        t
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    kind: ExperimentKind,
    /// Config echo without `out` and `jobs`, which never affect results.
    config: ConfigMap,
    law: &'a str,
    dim: usize,
    seeds: &'a [u64],
    tasks: &'a [TaskRecord],
    outputs: Vec<String>,
    started_at: u64,
    wall_time_s: f64,
}

/// Dispatches to the experiment, writes its CSV files and `manifest.json`
/// into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let started = Instant::now();
    let started_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    std::fs::create_dir_all(&cfg.out).map_err(|e| Error::Config {
        field: "out".into(),
        message: format!("{}: {e}", cfg.out.display()),
    })?;
    let spec = LawSpec::parse(&cfg.law, cfg.dim)?;
    let law = make_law(&spec).map_err(|e| Error::Config {
        field: "law".into(),
        message: e.to_string(),
    })?;
    if law.dim() != cfg.dim {
        return Err(Error::Config {
            field: "dim".into(),
            message: format!("law has dimension {}, config says {}", law.dim(), cfg.dim),
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config {
            field: "jobs".into(),
            message: e.to_string(),
        })?;
    let ctx = Ctx {
        cfg,
        law,
        pool,
        records: Default::default(),
    };
    let (tables, mut files) = kinds::dispatch(&ctx)?;
    let mut outputs = Vec::new();
    for t in &tables {
        outputs.push(t.write(&cfg.out)?);
    }
    outputs.append(&mut files);
    let tasks = ctx.records.into_inner().expect("records lock");
    let manifest_path = cfg.out.join("manifest.json");
    let manifest = Manifest {
        tool: "rwre",
        version: env!("CARGO_PKG_VERSION"),
        kind: cfg.kind,
        config: {
            let mut echo = cfg.raw.clone();
            echo.0.remove("out");
            echo.0.remove("jobs");
            echo
        },
        law: &cfg.law,
        dim: cfg.dim,
        seeds: &cfg.seeds,
        tasks: &tasks,
        outputs: outputs
            .iter()
            .map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default())
            .collect(),
        started_at,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&manifest_path, json + "\n")?;
    Ok(RunReport {
        outputs,
        tasks,
        manifest: manifest_path,
    })
}

/// Shortest round-trip form; scientific notation outside `[1e-4, 1e15)`.
pub(crate) fn fmt_f(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}
