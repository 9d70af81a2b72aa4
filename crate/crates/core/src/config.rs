//! Flat run configuration shared by every pipeline step.

use crate::dataset::{TableKind, Task};
use crate::error::{Error, Result};
use crate::eval::TrainConfig;
use crate::features::FeatureParams;
use crate::gesture::GestureParams;
use crate::models::{GbdtConfig, LogRegConfig, ModelKind};
use crate::signal::SegmentParams;
use crate::synth::CohortConfig;
use crate::tremor::{EmdParams, RqaParams, TremorParams};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DEFAULT_SHAP_PERMUTATIONS: usize = 2000;

/// Every key is optional in the file; absent keys take the owning module's default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub run_dir: PathBuf,
    /// Recordings to extract from; `<run_dir>/cohort` when unset.
    pub input_dir: Option<PathBuf>,
    pub seed: u64,

    pub subjects_per_group: usize,
    pub sample_rate: f64,
    pub text_strokes: usize,
    pub list_strokes: usize,
    pub gap_scale: f64,
    pub noise_scale: f64,
    pub tremor_scale: f64,
    pub subject_cv: f64,

    pub force_threshold: f64,
    pub hysteresis: f64,
    pub min_stroke: f64,
    pub pause_cutoff: f64,
    pub tilt_alpha: f64,
    pub force_prominence: f64,
    pub accel_prominence: f64,

    pub window_len: usize,
    pub bin_width: f64,
    pub max_imfs: usize,
    pub sift_tol: f64,
    pub max_sift_iterations: usize,
    pub mirror_extrema: usize,
    pub apen_m: usize,
    pub apen_r_factor: f64,
    pub rqa_dim: usize,
    pub rqa_delay: usize,
    pub rqa_eps_factor: f64,
    pub rqa_l_min: usize,

    pub logreg_l2: f64,
    pub logreg_max_iters: usize,
    pub logreg_grad_tol: f64,
    pub gbdt_max_rounds: usize,
    pub gbdt_early_stopping_rounds: usize,
    pub gbdt_depth: usize,
    pub gbdt_learning_rate: f64,
    pub gbdt_l2_leaf: f64,
    pub gbdt_inner_val_fraction: f64,
    pub fold_safe_scaling: bool,

    pub tasks: Vec<Task>,
    pub datasets: Vec<TableKind>,
    pub models: Vec<ModelKind>,

    pub explain_task: Task,
    pub explain_dataset: TableKind,
    pub explain_model: ModelKind,
    pub shap_permutations: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let cohort = CohortConfig::default();
        let seg = SegmentParams::default();
        let ges = GestureParams::default();
        let tre = TremorParams::default();
        let lr = LogRegConfig::default();
        let gb = GbdtConfig::default();
        RunConfig {
            run_dir: PathBuf::from("run"),
            input_dir: None,
            seed: cohort.seed,
            subjects_per_group: cohort.subjects_per_group,
            sample_rate: cohort.sample_rate,
            text_strokes: cohort.text_strokes,
            list_strokes: cohort.list_strokes,
            gap_scale: cohort.gap_scale,
            noise_scale: cohort.noise_scale,
            tremor_scale: cohort.tremor_scale,
            subject_cv: cohort.subject_cv,
            force_threshold: seg.force_threshold,
            hysteresis: seg.hysteresis,
            min_stroke: seg.min_stroke,
            pause_cutoff: seg.pause_cutoff,
            tilt_alpha: ges.tilt_alpha,
            force_prominence: ges.force_prominence,
            accel_prominence: ges.accel_prominence,
            window_len: tre.window_len,
            bin_width: tre.bin_width,
            max_imfs: tre.emd.max_imfs,
            sift_tol: tre.emd.sift_tol,
            max_sift_iterations: tre.emd.max_sift_iterations,
            mirror_extrema: tre.emd.mirror_extrema,
            apen_m: tre.apen_m,
            apen_r_factor: tre.apen_r_factor,
            rqa_dim: tre.rqa.dim,
            rqa_delay: tre.rqa.delay,
            rqa_eps_factor: tre.rqa.eps_factor,
            rqa_l_min: tre.rqa.l_min,
            logreg_l2: lr.l2,
            logreg_max_iters: lr.max_iters,
            logreg_grad_tol: lr.grad_tol,
            gbdt_max_rounds: gb.max_rounds,
            gbdt_early_stopping_rounds: gb.early_stopping_rounds,
            gbdt_depth: gb.depth,
            gbdt_learning_rate: gb.learning_rate,
            gbdt_l2_leaf: gb.l2_leaf,
            gbdt_inner_val_fraction: gb.inner_val_fraction,
            fold_safe_scaling: false,
            tasks: Task::ALL.to_vec(),
            datasets: TableKind::ALL.to_vec(),
            models: ModelKind::ALL.to_vec(),
            explain_task: Task::EFvsEE,
            explain_dataset: TableKind::Text,
            explain_model: ModelKind::Gbdt,
            shap_permutations: DEFAULT_SHAP_PERMUTATIONS,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::ConfigInvalid(msg.to_string()));
        if self.subjects_per_group < 2 {
            return bad("subjects_per_group must be at least 2");
        }
        if !(self.sample_rate > 0.0) {
            return bad("sample_rate must be positive");
        }
        if !(self.force_threshold > 0.0) || !(self.hysteresis > 0.0 && self.hysteresis <= 1.0) {
            return bad("force_threshold must be positive and hysteresis in (0, 1]");
        }
        if !(self.tilt_alpha >= 0.0 && self.tilt_alpha <= 1.0) {
            return bad("tilt_alpha must lie in [0, 1]");
        }
        if self.window_len < 2 || !(self.bin_width > 0.0) {
            return bad("window_len must be at least 2 and bin_width positive");
        }
        if self.rqa_dim == 0 || self.rqa_delay == 0 || self.apen_m == 0 {
            return bad("embedding dimensions and delays must be positive");
        }
        if !(self.gbdt_learning_rate > 0.0) || self.gbdt_depth == 0 || self.gbdt_max_rounds == 0 {
            return bad("gbdt learning rate, depth and max rounds must be positive");
        }
        if !(self.gbdt_inner_val_fraction > 0.0 && self.gbdt_inner_val_fraction < 1.0) {
            return bad("gbdt_inner_val_fraction must lie in (0, 1)");
        }
        if !(self.logreg_l2 >= 0.0) || !(self.gbdt_l2_leaf >= 0.0) {
            return bad("regularization strengths must be non-negative");
        }
        if self.shap_permutations == 0 {
            return bad("shap_permutations must be positive");
        }
        if self.tasks.is_empty() || self.datasets.is_empty() || self.models.is_empty() {
            return bad("tasks, datasets and models must be non-empty");
        }
        Ok(())
    }

    pub fn cohort(&self) -> CohortConfig {
        CohortConfig {
            subjects_per_group: self.subjects_per_group,
            seed: self.seed,
            sample_rate: self.sample_rate,
            text_strokes: self.text_strokes,
            list_strokes: self.list_strokes,
            gap_scale: self.gap_scale,
            noise_scale: self.noise_scale,
            tremor_scale: self.tremor_scale,
            subject_cv: self.subject_cv,
            ..CohortConfig::default()
        }
    }

    pub fn feature_params(&self) -> FeatureParams {
        FeatureParams {
            segment: SegmentParams {
                force_threshold: self.force_threshold,
                hysteresis: self.hysteresis,
                min_stroke: self.min_stroke,
                pause_cutoff: self.pause_cutoff,
            },
            gesture: GestureParams {
                tilt_alpha: self.tilt_alpha,
                force_prominence: self.force_prominence,
                accel_prominence: self.accel_prominence,
            },
            tremor: TremorParams {
                window_len: self.window_len,
                bin_width: self.bin_width,
                emd: EmdParams {
                    max_imfs: self.max_imfs,
                    sift_tol: self.sift_tol,
                    max_sift_iterations: self.max_sift_iterations,
                    mirror_extrema: self.mirror_extrema,
                },
                apen_m: self.apen_m,
                apen_r_factor: self.apen_r_factor,
                rqa: RqaParams {
                    dim: self.rqa_dim,
                    delay: self.rqa_delay,
                    eps_factor: self.rqa_eps_factor,
                    l_min: self.rqa_l_min,
                },
            },
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            logreg: LogRegConfig { l2: self.logreg_l2, max_iters: self.logreg_max_iters, grad_tol: self.logreg_grad_tol },
            gbdt: GbdtConfig {
                max_rounds: self.gbdt_max_rounds,
                early_stopping_rounds: self.gbdt_early_stopping_rounds,
                depth: self.gbdt_depth,
                learning_rate: self.gbdt_learning_rate,
                l2_leaf: self.gbdt_l2_leaf,
                seed: self.seed,
                inner_val_fraction: self.gbdt_inner_val_fraction,
            },
            fold_safe_scaling: self.fold_safe_scaling,
        }
    }

    pub fn input_dir(&self) -> PathBuf {
        self.input_dir.clone().unwrap_or_else(|| self.run_dir.join("cohort"))
    }
}
