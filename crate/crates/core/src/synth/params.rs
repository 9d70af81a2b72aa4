use crate::signal::AgeGroup;
use serde::{Deserialize, Serialize};

/// Generative parameters of one age group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupParams {
    /// Stroke duration (s): mean and within-recording SD.
    pub stroke_mean: f64,
    pub stroke_sd: f64,
    /// In-air gap duration (s): mean and within-recording SD.
    pub gap_mean: f64,
    pub gap_sd: f64,
    /// Probability that a gap is a pause of 2.5–4 s.
    pub pause_rate: f64,
    /// Peak tip force (N).
    pub force_level: f64,
    /// Relative amplitude of the force ripple within a stroke.
    pub force_ripple: f64,
    /// Pen tilt (deg) and the amplitude of its slow wander.
    pub tilt_deg: f64,
    pub tilt_jitter_deg: f64,
    pub tremor_freq: f64,
    /// Tremor amplitude along gravity (m/s²).
    pub tremor_amp: f64,
    /// Share of tremor power in the tone; the rest is pink noise.
    pub tremor_regularity: f64,
    /// White accelerometer noise (m/s²).
    pub noise_floor: f64,
    /// Size of the subject's two-sided departure from the typical stroke length,
    /// tilt, force ripple and tremor frequency, in units of `DISPERSION_SCALE`.
    pub dispersion: f64,
}

/// Departure per unit of dispersion: stroke length (s), tilt (deg), force ripple,
/// tremor frequency (Hz).
pub const DISPERSION_SCALE: [f64; 4] = [0.15, 10.0, 0.06, 2.0];

impl GroupParams {
    pub fn defaults(group: AgeGroup) -> Self {
        let dispersion = match group {
            AgeGroup::YY => 0.0,
            AgeGroup::EY => 0.6,
            AgeGroup::EF => 1.2,
            AgeGroup::EE => 1.8,
        };
        let (stroke_mean, gap_mean, pause_rate) = match group {
            AgeGroup::YY => (0.55, 0.28, 0.02),
            AgeGroup::EY => (0.55, 0.30, 0.03),
            AgeGroup::EF => (0.55, 0.32, 0.04),
            AgeGroup::EE => (0.55, 0.46, 0.05),
        };
        let (force_level, force_ripple, tilt_deg, tilt_jitter_deg) = match group {
            AgeGroup::YY => (1.95, 0.14, 52.0, 2.5),
            AgeGroup::EY => (1.92, 0.14, 52.0, 2.5),
            AgeGroup::EF => (1.89, 0.14, 52.0, 2.5),
            AgeGroup::EE => (1.86, 0.14, 52.0, 2.5),
        };
        let (tremor_freq, tremor_amp, tremor_regularity) = match group {
            AgeGroup::YY => (8.5, 0.13, 0.76),
            AgeGroup::EY => (8.5, 0.13, 0.77),
            AgeGroup::EF => (8.5, 0.13, 0.78),
            AgeGroup::EE => (8.5, 0.13, 0.79),
        };
        GroupParams {
            stroke_mean,
            stroke_sd: 0.25 * stroke_mean,
            gap_mean,
            gap_sd: 0.3 * gap_mean,
            pause_rate,
            force_level,
            force_ripple,
            tilt_deg,
            tilt_jitter_deg,
            tremor_freq,
            tremor_amp,
            tremor_regularity,
            noise_floor: 0.03,
            dispersion,
        }
    }

    fn map(self, other: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        GroupParams {
            stroke_mean: f(self.stroke_mean, other.stroke_mean),
            stroke_sd: f(self.stroke_sd, other.stroke_sd),
            gap_mean: f(self.gap_mean, other.gap_mean),
            gap_sd: f(self.gap_sd, other.gap_sd),
            pause_rate: f(self.pause_rate, other.pause_rate),
            force_level: f(self.force_level, other.force_level),
            force_ripple: f(self.force_ripple, other.force_ripple),
            tilt_deg: f(self.tilt_deg, other.tilt_deg),
            tilt_jitter_deg: f(self.tilt_jitter_deg, other.tilt_jitter_deg),
            tremor_freq: f(self.tremor_freq, other.tremor_freq),
            tremor_amp: f(self.tremor_amp, other.tremor_amp),
            tremor_regularity: f(self.tremor_regularity, other.tremor_regularity),
            noise_floor: f(self.noise_floor, other.noise_floor),
            dispersion: f(self.dispersion, other.dispersion),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CohortConfig {
    pub subjects_per_group: usize,
    pub seed: u64,
    pub sample_rate: f64,
    pub text_strokes: usize,
    pub list_strokes: usize,
    /// Scales every group's distance from the across-group mean; 0 makes the groups
    /// identical.
    pub gap_scale: f64,
    /// Multiplies accelerometer and force noise.
    pub noise_scale: f64,
    /// Multiplies tremor amplitude.
    pub tremor_scale: f64,
    /// Coefficient of variation of subject-level parameters around the group values.
    pub subject_cv: f64,
    /// Indexed YY, EY, EF, EE.
    pub groups: [GroupParams; 4],
}

impl Default for CohortConfig {
    fn default() -> Self {
        CohortConfig {
            subjects_per_group: 20,
            seed: 2024,
            sample_rate: 50.0,
            text_strokes: 60,
            list_strokes: 25,
            gap_scale: 1.0,
            noise_scale: 1.0,
            tremor_scale: 1.0,
            subject_cv: 0.03,
            groups: AgeGroup::ALL.map(GroupParams::defaults),
        }
    }
}

impl CohortConfig {
    /// Group parameters after applying `gap_scale`.
    pub fn group_params(&self, group: AgeGroup) -> GroupParams {
        let n = self.groups.len() as f64;
        let mean = self.groups[1..].iter().fold(self.groups[0], |acc, g| acc.map(*g, |a, b| a + b));
        let mean = mean.map(mean, |a, _| a / n);
        let s = self.gap_scale;
        mean.map(self.groups[group.index()], |m, g| m + s * (g - m))
    }
}
