use super::params::{CohortConfig, GroupParams, DISPERSION_SCALE};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{write_recording_csv, AgeGroup, PenRecording, RecordingMeta, WritingTask};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::{PI, TAU};
use std::io::Read;
use std::path::Path;

pub const MANIFEST_FILE: &str = "manifest.csv";
const GRAVITY: f64 = 9.81;
const LEAD_SECONDS: f64 = 0.5;

/// Seed of subject `index` of `group`, one ChaCha stream per subject.
pub fn subject_seed(cohort_seed: u64, group: AgeGroup, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(cohort_seed);
    rng.set_stream((group.index() as u64) << 32 | index as u64);
    rng.next_u64()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Subject-level draw around the group parameters. Shared by both tasks.
fn subject_params(p: &GroupParams, cv: f64, rng: &mut ChaCha8Rng) -> GroupParams {
    let mut scale = |v: f64| v * (1.0 + cv * normal(rng)).max(0.2);
    let mut q = GroupParams {
        stroke_mean: scale(p.stroke_mean),
        gap_mean: scale(p.gap_mean),
        force_level: scale(p.force_level),
        force_ripple: scale(p.force_ripple),
        tilt_deg: scale(p.tilt_deg),
        tilt_jitter_deg: scale(p.tilt_jitter_deg),
        tremor_freq: scale(p.tremor_freq),
        tremor_amp: scale(p.tremor_amp),
        ..*p
    };
    q.tremor_regularity = (p.tremor_regularity + 0.5 * cv * normal(rng)).clamp(0.0, 1.0);
    let dev: [f64; 4] = std::array::from_fn(|k| {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        sign * p.dispersion * DISPERSION_SCALE[k] * rng.random_range(0.8..1.0)
    });
    q.stroke_mean += dev[0];
    q.tilt_deg += dev[1];
    q.force_ripple += dev[2];
    q.tremor_freq += dev[3];
    q
}

/// Pink noise by Kellet's filter bank, scaled to unit RMS.
fn pink_noise(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut b = [0.0f64; 7];
    let mut out: Vec<f64> = (0..n)
        .map(|_| {
            let w = normal(rng);
            b[0] = 0.99886 * b[0] + w * 0.0555179;
            b[1] = 0.99332 * b[1] + w * 0.0750759;
            b[2] = 0.96900 * b[2] + w * 0.1538520;
            b[3] = 0.86650 * b[3] + w * 0.3104856;
            b[4] = 0.55000 * b[4] + w * 0.5329522;
            b[5] = -0.7616 * b[5] - w * 0.0168980;
            let pink = b.iter().sum::<f64>() + w * 0.5362;
            b[6] = w * 0.115926;
            pink
        })
        .collect();
    let mean = out.iter().sum::<f64>() / n.max(1) as f64;
    let rms = (out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n.max(1) as f64).sqrt();
    if rms > 0.0 {
        out.iter_mut().for_each(|v| *v = (*v - mean) / rms);
    }
    out
}

/// Alternating stroke/gap schedule in samples: `(start, len)` of each stroke.
fn schedule(p: &GroupParams, strokes: usize, rate: f64, rng: &mut ChaCha8Rng) -> (Vec<(usize, usize)>, usize) {
    let lead = (LEAD_SECONDS * rate).round() as usize;
    let mut pos = lead;
    let mut out = Vec::with_capacity(strokes);
    for k in 0..strokes {
        let dur = (p.stroke_mean + p.stroke_sd * normal(rng)).max(0.16);
        let len = ((dur * rate).round() as usize).max(8);
        out.push((pos, len));
        pos += len;
        if k + 1 < strokes {
            let gap = if rng.random::<f64>() < p.pause_rate {
                rng.random_range(2.5..4.0)
            } else {
                (p.gap_mean + p.gap_sd * normal(rng)).clamp(0.06, 1.9)
            };
            pos += ((gap * rate).round() as usize).max(3);
        }
    }
    (out, pos + lead)
}

/// One recording. The same `(group, task, cfg, subject_seed)` always gives the same
/// samples.
pub fn generate_subject<T: Real>(
    group: AgeGroup,
    task: WritingTask,
    cfg: &CohortConfig,
    subject_seed: u64,
    subject_id: &str,
) -> Result<PenRecording<T>> {
    let rate = cfg.sample_rate;
    let mut srng = ChaCha8Rng::seed_from_u64(subject_seed);
    let p = subject_params(&cfg.group_params(group), cfg.subject_cv, &mut srng);
    let mut rng = ChaCha8Rng::seed_from_u64(subject_seed);
    rng.set_stream(1 + task as u64);

    let n_strokes = match task {
        WritingTask::Text => cfg.text_strokes,
        WritingTask::List => cfg.list_strokes,
    };
    let (strokes, n) = schedule(&p, n_strokes, rate, &mut rng);

    let mut force = vec![0.0f64; n];
    for &(start, len) in &strokes {
        let peak = p.force_level * (1.0 + 0.05 * normal(&mut rng)).max(0.3);
        let cycles = rng.random_range(1.5..3.5);
        let phase = rng.random_range(0.0..TAU);
        for j in 0..len {
            let tau = (j as f64 + 0.5) / len as f64;
            let env = (PI * tau).sin();
            let ripple = 1.0 + p.force_ripple * (TAU * cycles * tau + phase).sin();
            let noise = 0.01 * cfg.noise_scale * normal(&mut rng);
            force[start + j] = (peak * env * (ripple + noise)).max(0.0);
        }
    }

    let tilt0 = p.tilt_deg.to_radians();
    let jitter = p.tilt_jitter_deg.to_radians();
    let ph: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
    let azimuth0 = rng.random_range(0.0..TAU);
    let tone_phase = rng.random_range(0.0..TAU);
    let pink = pink_noise(n, &mut rng);
    let tone_w = (2.0 * p.tremor_regularity).sqrt();
    let pink_w = (1.0 - p.tremor_regularity).sqrt();
    let amp = p.tremor_amp * cfg.tremor_scale;
    let (w1, w2, w3) = (TAU * 0.23, TAU * 0.61, TAU * 0.11);

    let mut time = Vec::with_capacity(n);
    let mut accel: [Vec<T>; 3] = std::array::from_fn(|_| Vec::with_capacity(n));
    let mut gyro: [Vec<T>; 3] = std::array::from_fn(|_| Vec::with_capacity(n));
    for (i, &p_i) in pink.iter().enumerate() {
        let t = i as f64 / rate;
        let theta = tilt0 + jitter * (0.6 * (w1 * t + ph[0]).sin() + 0.4 * (w2 * t + ph[1]).sin());
        let theta_dot = jitter * (0.6 * w1 * (w1 * t + ph[0]).cos() + 0.4 * w2 * (w2 * t + ph[1]).cos());
        let phi = azimuth0 + 0.3 * (w3 * t + ph[2]).sin() + 0.05 * t;
        let phi_dot = 0.3 * w3 * (w3 * t + ph[2]).cos() + 0.05;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let u = [ct * cp, ct * sp, st];
        let du = [
            -st * cp * theta_dot - ct * sp * phi_dot,
            -st * sp * theta_dot + ct * cp * phi_dot,
            ct * theta_dot,
        ];
        let tremor = amp * (tone_w * (TAU * p.tremor_freq * t + tone_phase).sin() + pink_w * p_i);
        let g = GRAVITY + tremor;
        let omega = [
            du[1] * u[2] - du[2] * u[1],
            du[2] * u[0] - du[0] * u[2],
            du[0] * u[1] - du[1] * u[0],
        ];
        for k in 0..3 {
            let noise = cfg.noise_scale * p.noise_floor * normal(&mut rng);
            accel[k].push(T::lit(g * u[k] + noise));
            gyro[k].push(T::lit(omega[k].to_degrees()));
        }
        time.push(T::lit(t));
    }
    let meta = RecordingMeta {
        subject_id: subject_id.to_string(),
        task: Some(task),
        age_group: Some(group),
        sample_rate: rate,
    };
    PenRecording::new(meta, time, accel, gyro, force.into_iter().map(T::lit).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub age_group: AgeGroup,
    pub task: WritingTask,
    pub seed: u64,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct SyntheticRecording<T> {
    pub subject_id: String,
    pub group: AgeGroup,
    pub task: WritingTask,
    pub seed: u64,
    pub recording: PenRecording<T>,
}

pub fn subject_id(group: AgeGroup, index: usize) -> String {
    format!("{group}{:02}", index + 1)
}

/// All groups × subjects × tasks, in that order.
pub fn generate_cohort<T: Real>(cfg: &CohortConfig) -> Result<Vec<SyntheticRecording<T>>> {
    let jobs: Vec<(AgeGroup, usize, WritingTask)> = AgeGroup::ALL
        .into_iter()
        .flat_map(|g| (0..cfg.subjects_per_group).flat_map(move |i| WritingTask::ALL.map(|t| (g, i, t))))
        .collect();
    jobs.into_par_iter()
        .map(|(group, i, task)| {
            let seed = subject_seed(cfg.seed, group, i);
            let id = subject_id(group, i);
            let recording = generate_subject(group, task, cfg, seed, &id)?;
            Ok(SyntheticRecording { subject_id: id, group, task, seed, recording })
        })
        .collect()
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes one CSV per recording plus `manifest.csv` into `dir`.
pub fn write_cohort(dir: &Path, cfg: &CohortConfig) -> Result<Vec<ManifestEntry>> {
    std::fs::create_dir_all(dir)?;
    let cohort = generate_cohort::<f64>(cfg)?;
    let entries: Vec<ManifestEntry> = cohort
        .par_iter()
        .map(|r| {
            let mut bytes = Vec::new();
            write_recording_csv(&r.recording, &mut bytes)?;
            let file = format!("{}_{}.csv", r.subject_id, r.task);
            crate::pipeline::write_atomic(&dir.join(&file), &bytes)?;
            Ok(ManifestEntry {
                subject_id: r.subject_id.clone(),
                age_group: r.group,
                task: r.task,
                seed: r.seed,
                file,
                sha256: sha256_hex(&bytes),
            })
        })
        .collect::<Result<_>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in &entries {
        w.serialize(e)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    crate::pipeline::write_atomic(&dir.join(MANIFEST_FILE), &bytes)?;
    Ok(entries)
}

pub fn read_manifest<R: Read>(input: R) -> Result<Vec<ManifestEntry>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|e| e.map_err(Error::from)).collect()
}
