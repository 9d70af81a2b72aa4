//! File-level pipeline steps behind the command-line tool.
//!
//! Layout under the run directory:
//! `cohort/` recordings and manifest, `features/` feature tables, `datasets/` task
//! exports, `eval/` per-run reports and `metrics.csv`, `explain/` attributions,
//! `report/metrics.csv`, and `run.json`.

use crate::config::RunConfig;
use crate::dataset::{build_tables, make_task, FeatureTable, SubjectFeatures, TableKind, Tables, Task, TaskDataset};
use crate::error::{Error, Result};
use crate::eval::{final_fit, loo_cv, write_metrics_csv, EvalReport};
use crate::explain::{shapley_exact, shapley_sampled, ShapReport, MAX_EXACT_FEATURES};
use crate::features::extract_features;
use crate::models::{save_model, ModelKind};
use crate::signal::{load_recording, AgeGroup, RecordingFormat, WritingTask};
use crate::synth::{read_manifest, write_cohort, ManifestEntry, MANIFEST_FILE};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const RUN_FILE: &str = "run.json";

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn read_artifact(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingArtifact(path.display().to_string()),
        _ => Error::Io(e),
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool_version: String,
    pub config: RunConfig,
    pub steps: BTreeMap<String, Vec<OutputRecord>>,
}

/// Writes every output and records it under `step` in `run.json`.
struct Outputs<'a> {
    cfg: &'a RunConfig,
    step: &'static str,
    written: Vec<OutputRecord>,
}

impl<'a> Outputs<'a> {
    fn new(cfg: &'a RunConfig, step: &'static str) -> Self {
        Outputs { cfg, step, written: Vec::new() }
    }

    fn write(&mut self, rel: impl AsRef<Path>, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.cfg.run_dir.join(rel.as_ref());
        write_atomic(&path, bytes)?;
        self.record(rel.as_ref(), bytes);
        Ok(path)
    }

    fn record(&mut self, rel: &Path, bytes: &[u8]) {
        self.written.push(OutputRecord { path: rel.display().to_string(), sha256: sha256_hex(bytes) });
    }

    fn finish(self) -> Result<()> {
        let path = self.cfg.run_dir.join(RUN_FILE);
        let mut record = match std::fs::read(&path) {
            Ok(bytes) => serde_json::from_slice::<RunRecord>(&bytes)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => RunRecord {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                config: self.cfg.clone(),
                steps: BTreeMap::new(),
            },
            Err(e) => return Err(e.into()),
        };
        record.tool_version = env!("CARGO_PKG_VERSION").to_string();
        record.config = self.cfg.clone();
        record.steps.insert(self.step.to_string(), self.written);
        write_atomic(&path, &serde_json::to_vec_pretty(&record)?)
    }
}

fn to_json<S: Serialize>(value: &S) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn features_path(kind: TableKind) -> PathBuf {
    Path::new("features").join(format!("{kind}.csv"))
}

pub fn eval_path(task: Task, kind: TableKind, model: ModelKind) -> PathBuf {
    Path::new("eval").join(format!("{task}_{kind}_{model}.json"))
}

fn explain_stem(task: Task, kind: TableKind, model: ModelKind) -> PathBuf {
    Path::new("explain").join(format!("{task}_{kind}_{model}"))
}

pub fn shap_path(task: Task, kind: TableKind, model: ModelKind) -> PathBuf {
    explain_stem(task, kind, model).with_extension("shap.json")
}

pub fn beeswarm_path(task: Task, kind: TableKind, model: ModelKind) -> PathBuf {
    explain_stem(task, kind, model).with_extension("beeswarm.csv")
}

pub fn model_path(task: Task, kind: TableKind, model: ModelKind) -> PathBuf {
    explain_stem(task, kind, model).with_extension("model.json")
}

pub const EVAL_METRICS: &str = "eval/metrics.csv";
pub const REPORT_METRICS: &str = "report/metrics.csv";

/// Generates the synthetic cohort into the input directory.
pub fn cmd_synth(cfg: &RunConfig) -> Result<Vec<ManifestEntry>> {
    let dir = cfg.input_dir();
    let entries = write_cohort(&dir, &cfg.cohort())?;
    let mut out = Outputs::new(cfg, "synth");
    let rel = |name: &str| dir.join(name).strip_prefix(&cfg.run_dir).map(Path::to_path_buf).unwrap_or(dir.join(name));
    for e in &entries {
        out.written.push(OutputRecord { path: rel(&e.file).display().to_string(), sha256: e.sha256.clone() });
    }
    let manifest = read_artifact(&dir.join(MANIFEST_FILE))?;
    out.record(&rel(MANIFEST_FILE), &manifest);
    out.finish()?;
    Ok(entries)
}

struct Source {
    path: PathBuf,
    format: RecordingFormat,
    subject_id: Option<String>,
    group: Option<AgeGroup>,
    task: Option<WritingTask>,
    sha256: Option<String>,
}

/// Recordings listed in `manifest.csv`, or every `.json` recording (which carries its
/// own metadata) when there is no manifest.
fn discover(dir: &Path) -> Result<Vec<Source>> {
    let manifest = dir.join(MANIFEST_FILE);
    if manifest.exists() {
        let entries = read_manifest(std::fs::File::open(&manifest)?)?;
        return Ok(entries
            .into_iter()
            .map(|e| Source {
                format: if e.file.ends_with(".json") { RecordingFormat::Json } else { RecordingFormat::Csv },
                path: dir.join(&e.file),
                subject_id: Some(e.subject_id),
                group: Some(e.age_group),
                task: Some(e.task),
                sha256: Some(e.sha256),
            })
            .collect());
    }
    if !dir.is_dir() {
        return Err(Error::MissingArtifact(dir.display().to_string()));
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "json"));
    paths.sort();
    if paths.is_empty() {
        return Err(Error::MissingArtifact(format!("{} has no manifest and no JSON recordings", dir.display())));
    }
    Ok(paths
        .into_iter()
        .map(|path| Source { path, format: RecordingFormat::Json, subject_id: None, group: None, task: None, sha256: None })
        .collect())
}

fn extract_one(src: &Source, cfg: &RunConfig) -> Result<(SubjectFeatures<f64>, Vec<String>)> {
    let bytes = read_artifact(&src.path)?;
    if let Some(expected) = &src.sha256 {
        let got = sha256_hex(&bytes);
        if &got != expected {
            return Err(Error::MalformedInput(format!("{}: sha256 {got} does not match manifest", src.path.display())));
        }
    }
    let rec = load_recording::<f64, _>(bytes.as_slice(), src.format)?;
    let meta = rec.meta();
    let subject_id = src.subject_id.clone().unwrap_or_else(|| meta.subject_id.clone());
    let group = src.group.or(meta.age_group);
    let task = src.task.or(meta.task);
    let (Some(group), Some(task)) = (group, task) else {
        return Err(Error::MalformedInput(format!("{}: age group or task unknown", src.path.display())));
    };
    if subject_id.is_empty() {
        return Err(Error::MalformedInput(format!("{}: subject id missing", src.path.display())));
    }
    let ex = extract_features(&rec, &cfg.feature_params())?;
    let warnings = ex.warnings.iter().map(|w| format!("{subject_id} {task}: {w}")).collect();
    Ok((SubjectFeatures { subject_id, group, task, features: ex.features }, warnings))
}

/// Extracts indicators from every recording and writes the three feature tables.
pub fn cmd_extract(cfg: &RunConfig) -> Result<Tables<f64>> {
    let sources = discover(&cfg.input_dir())?;
    let results: Vec<(SubjectFeatures<f64>, Vec<String>)> = sources
        .par_iter()
        .map(|s| {
            extract_one(s, cfg).inspect_err(|e| log::error!("{}: {e}", s.path.display()))
        })
        .collect::<Result<_>>()?;
    let mut warnings: Vec<String> = results.iter().flat_map(|r| r.1.iter().cloned()).collect();
    let items: Vec<SubjectFeatures<f64>> = results.into_iter().map(|r| r.0).collect();
    let tables = build_tables(&items)?;
    warnings.extend(tables.warnings.iter().cloned());
    warnings.sort();
    let mut out = Outputs::new(cfg, "extract");
    for kind in TableKind::ALL {
        let mut bytes = Vec::new();
        tables.get(kind).write_csv(&mut bytes)?;
        out.write(features_path(kind), &bytes)?;
    }
    out.write("features/warnings.json", &to_json(&warnings)?)?;
    out.finish()?;
    Ok(tables)
}

pub fn load_table(cfg: &RunConfig, kind: TableKind) -> Result<FeatureTable<f64>> {
    let bytes = read_artifact(&cfg.run_dir.join(features_path(kind)))?;
    FeatureTable::read_csv(kind, bytes.as_slice())
}

/// Writes every configured task × dataset export with its JSON sidecar.
pub fn cmd_dataset(cfg: &RunConfig) -> Result<Vec<TaskDataset<f64>>> {
    let mut out = Outputs::new(cfg, "dataset");
    let mut all = Vec::new();
    for &kind in &cfg.datasets {
        let table = load_table(cfg, kind)?;
        for &task in &cfg.tasks {
            let ds = make_task(&table, task)?;
            let mut bytes = Vec::new();
            ds.write_csv(&mut bytes)?;
            out.write(Path::new("datasets").join(format!("{task}_{kind}.csv")), &bytes)?;
            out.write(Path::new("datasets").join(format!("{task}_{kind}.json")), &to_json(&ds.sidecar())?)?;
            all.push(ds);
        }
    }
    out.finish()?;
    Ok(all)
}

/// Leave-one-out evaluation of every configured task × dataset × model.
pub fn cmd_train_eval(cfg: &RunConfig) -> Result<Vec<EvalReport>> {
    let train = cfg.train_config();
    let mut out = Outputs::new(cfg, "train-eval");
    let mut reports = Vec::new();
    for &task in &cfg.tasks {
        for &kind in &cfg.datasets {
            let ds = make_task(&load_table(cfg, kind)?, task)?;
            for &model in &cfg.models {
                log::info!("evaluating {task} {kind} {model}");
                let report = loo_cv(&ds, model, &train)?;
                out.write(eval_path(task, kind, model), &to_json(&report)?)?;
                reports.push(report);
            }
        }
    }
    let mut bytes = Vec::new();
    write_metrics_csv(&reports, &mut bytes)?;
    out.write(EVAL_METRICS, &bytes)?;
    out.finish()?;
    Ok(reports)
}

pub fn load_report(cfg: &RunConfig, task: Task, kind: TableKind, model: ModelKind) -> Result<EvalReport> {
    let bytes = read_artifact(&cfg.run_dir.join(eval_path(task, kind, model)))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Fits the final model on all rows of the configured explanation task and attributes
/// every row against the full training matrix as background.
pub fn cmd_explain(cfg: &RunConfig) -> Result<ShapReport> {
    let (task, kind, model_kind) = (cfg.explain_task, cfg.explain_dataset, cfg.explain_model);
    let ds = make_task(&load_table(cfg, kind)?, task)?;
    let mean_best = match model_kind {
        ModelKind::Gbdt => load_report(cfg, task, kind, model_kind)?.mean_best_iteration,
        ModelKind::LogReg => None,
    };
    let model = final_fit(&ds, model_kind, &cfg.train_config(), mean_best)?;
    let values = if ds.n_features() <= MAX_EXACT_FEATURES {
        shapley_exact(&model, &ds.x, &ds.x)?
    } else {
        shapley_sampled(&model, &ds.x, &ds.x, cfg.shap_permutations, cfg.seed)?
    };
    let report = ShapReport::new(&values, &ds.feature_names, &ds.subject_ids);
    let mut out = Outputs::new(cfg, "explain");
    let mut model_bytes = Vec::new();
    save_model(&model, &ds.feature_names, &mut model_bytes)?;
    out.write(model_path(task, kind, model_kind), &model_bytes)?;
    out.write(shap_path(task, kind, model_kind), &to_json(&report)?)?;
    let mut bees = Vec::new();
    report.write_beeswarm_csv(&ds.x, &mut bees)?;
    out.write(beeswarm_path(task, kind, model_kind), &bees)?;
    out.finish()?;
    Ok(report)
}

/// Collects the stored evaluation reports into one metrics table.
pub fn cmd_report(cfg: &RunConfig) -> Result<Vec<EvalReport>> {
    let mut reports = Vec::new();
    for &task in &cfg.tasks {
        for &kind in &cfg.datasets {
            for &model in &cfg.models {
                reports.push(load_report(cfg, task, kind, model)?);
            }
        }
    }
    let mut bytes = Vec::new();
    write_metrics_csv(&reports, &mut bytes)?;
    let mut out = Outputs::new(cfg, "report");
    out.write(REPORT_METRICS, &bytes)?;
    out.finish()?;
    Ok(reports)
}

/// Machine-readable failure record.
pub fn error_record(err: &Error) -> serde_json::Value {
    serde_json::json!({ "error": err.kind(), "message": err.to_string() })
}
