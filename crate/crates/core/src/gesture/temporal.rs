use super::require_strokes;
use crate::error::Result;
use crate::scalar::Real;
use crate::signal::StrokeSegmentation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalIndicators<T> {
    /// Mean stroke duration (s).
    pub on_sheet: T,
    /// Mean in-air gap duration (s), pauses excluded; zero without gaps.
    pub in_air: T,
    pub air_sheet_ratio: T,
}

pub fn temporal_indicators<T: Real>(seg: &StrokeSegmentation) -> Result<TemporalIndicators<T>> {
    require_strokes(seg)?;
    let rate = T::lit(seg.sample_rate);
    let mean_len = |ivs: &[crate::signal::Interval]| -> T {
        if ivs.is_empty() {
            return T::zero();
        }
        let total: usize = ivs.iter().map(|iv| iv.len()).sum();
        T::from_usize_exact(total) / T::from_usize_exact(ivs.len()) / rate
    };
    let on_sheet = mean_len(&seg.strokes);
    let in_air = mean_len(&seg.in_air);
    Ok(TemporalIndicators { on_sheet, in_air, air_sheet_ratio: in_air / on_sheet })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::signal::{segment_force, Interval, SegmentParams};
    use rand::{Rng, SeedableRng};

    #[test]
    fn square_wave_timing() {
        let mut f = Vec::new();
        for _ in 0..10 {
            f.extend(vec![1.0f64; 50]);
            f.extend(vec![0.0; 25]);
        }
        let seg = segment_force(&f, 50.0, &SegmentParams::default()).unwrap();
        let t = temporal_indicators::<f64>(&seg).unwrap();
        assert!((t.on_sheet - 1.0).abs() < 1e-12);
        assert!((t.in_air - 0.5).abs() < 1e-12);
        assert!((t.air_sheet_ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_stroke_has_no_air_time() {
        let mut f = vec![0.0f64; 20];
        f.extend(vec![0.7; 73]);
        f.extend(vec![0.0; 20]);
        let seg = segment_force(&f, 50.0, &SegmentParams::default()).unwrap();
        let t = temporal_indicators::<f64>(&seg).unwrap();
        assert!((t.on_sheet - 73.0 / 50.0).abs() < 1e-12);
        assert_eq!(t.in_air, 0.0);
        assert_eq!(t.air_sheet_ratio, 0.0);
    }

    #[test]
    fn empty_segmentation_errors() {
        let seg = StrokeSegmentation {
            strokes: vec![],
            in_air: vec![],
            pauses: vec![],
            leading: Interval::new(0, 0),
            trailing: Interval::new(0, 0),
            pause_cutoff: 2.0,
            sample_rate: 50.0,
            n_samples: 0,
        };
        assert!(matches!(temporal_indicators::<f64>(&seg), Err(Error::EmptyWriting)));
    }

    #[test]
    fn randomized_schedule_matches_list_averaging() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n_strokes = rng.random_range(2..15);
            let pause_at = rng.random_range(0..n_strokes - 1);
            let mut strokes = Vec::new();
            let mut gaps = Vec::new();
            let mut f = vec![0.0f64; 7];
            for k in 0..n_strokes {
                let s = rng.random_range(3..80usize);
                strokes.push(s as f64 / 50.0);
                f.extend(vec![0.9; s]);
                if k + 1 < n_strokes {
                    let g = if k == pause_at { 150 } else { rng.random_range(1..100usize) };
                    if k != pause_at {
                        gaps.push(g as f64 / 50.0);
                    }
                    f.extend(vec![0.0; g]);
                }
            }
            let seg = segment_force(&f, 50.0, &SegmentParams::default()).unwrap();
            let t = temporal_indicators::<f64>(&seg).unwrap();
            let oracle_on = strokes.iter().sum::<f64>() / strokes.len() as f64;
            let oracle_air = if gaps.is_empty() { 0.0 } else { gaps.iter().sum::<f64>() / gaps.len() as f64 };
            assert!((t.on_sheet - oracle_on).abs() < 1e-12);
            assert!((t.in_air - oracle_air).abs() < 1e-12);
            assert!((t.air_sheet_ratio - oracle_air / oracle_on).abs() < 1e-12);
        }
    }

    #[test]
    fn force_scaling_leaves_timing_unchanged() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f: Vec<f64> = (0..600)
            .map(|i| if (i / 37) % 3 == 0 { 0.0 } else { rng.random_range(0.1..2.0) })
            .collect();
        let base = SegmentParams::default();
        let t0 = temporal_indicators::<f64>(&segment_force(&f, 50.0, &base).unwrap()).unwrap();
        for c in [0.01, 0.5, 3.0, 1000.0] {
            let scaled: Vec<f64> = f.iter().map(|v| v * c).collect();
            let p = SegmentParams { force_threshold: base.force_threshold * c, ..base };
            let t = temporal_indicators::<f64>(&segment_force(&scaled, 50.0, &p).unwrap()).unwrap();
            assert_eq!(t, t0);
        }
    }
}
