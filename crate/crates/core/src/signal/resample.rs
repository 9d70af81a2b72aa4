use super::recording::{PenRecording, RecordingMeta, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Linearly interpolates every channel onto the grid `k / target_hz`, `k = 0, 1, ...`,
/// up to the last input timestamp.
pub fn resample_uniform<T: Real>(rec: &PenRecording<T>, target_hz: f64) -> Result<PenRecording<T>> {
    if !(target_hz > 0.0 && target_hz.is_finite()) {
        return Err(Error::MalformedInput(format!("target rate {target_hz}")));
    }
    let time = rec.time();
    let t0 = time[0];
    let span = (time[time.len() - 1] - t0).as_f64();
    let hz = T::lit(target_hz);
    // Tolerate rounding in the last timestamp so a uniform input keeps its final sample.
    let n_out = (span * target_hz + 1e-9).floor() as usize + 1;
    if n_out < MIN_SAMPLES {
        return Err(Error::TooShort { samples: n_out, required: MIN_SAMPLES });
    }
    let grid: Vec<T> = (0..n_out).map(|k| T::from_usize_exact(k) / hz).collect();

    // Segment index and weight for each grid point, shared across channels.
    let mut locs = Vec::with_capacity(n_out);
    let mut seg = 0usize;
    for &g in &grid {
        let tg = g + t0;
        while seg + 2 < time.len() && time[seg + 1] < tg {
            seg += 1;
        }
        let (a, b) = (time[seg], time[seg + 1]);
        let w = ((tg - a) / (b - a)).max(T::zero()).min(T::one());
        locs.push((seg, w));
    }
    let interp = |ch: &[T]| -> Vec<T> {
        locs.iter()
            .map(|&(i, w)| {
                if w == T::zero() {
                    ch[i]
                } else if w == T::one() {
                    ch[i + 1]
                } else {
                    ch[i] + w * (ch[i + 1] - ch[i])
                }
            })
            .collect()
    };
    let meta = RecordingMeta { sample_rate: target_hz, ..rec.meta().clone() };
    let a = rec.accel();
    let g = rec.gyro();
    let mut force = interp(rec.force());
    // Interpolation of non-negative samples is non-negative up to rounding.
    for f in force.iter_mut() {
        *f = f.max(T::zero());
    }
    PenRecording::new(
        meta,
        grid,
        [interp(&a[0]), interp(&a[1]), interp(&a[2])],
        [interp(&g[0]), interp(&g[1]), interp(&g[2])],
        force,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(time: Vec<f64>, f: impl Fn(f64) -> f64, rate: f64) -> PenRecording<f64> {
        let sig: Vec<f64> = time.iter().map(|&t| f(t)).collect();
        let force: Vec<f64> = sig.iter().map(|v| v.abs()).collect();
        PenRecording::new(
            RecordingMeta::anonymous(rate),
            time,
            [sig.clone(), sig.clone(), sig.clone()],
            [sig.clone(), sig.clone(), sig],
            force,
        )
        .unwrap()
    }

    #[test]
    fn uniform_input_is_identity() {
        let time: Vec<f64> = (0..400).map(|i| i as f64 / 50.0).collect();
        let rec = build(time, |t| (3.0 * t).sin(), 50.0);
        let out = resample_uniform(&rec, 50.0).unwrap();
        assert_eq!(out.len(), rec.len());
        for (a, b) in out.channels().iter().zip(rec.channels().iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ramp_is_exact_after_downsampling() {
        let time: Vec<f64> = (0..1000).map(|i| i as f64 / 100.0).collect();
        let rec = build(time, |t| t, 100.0);
        let out = resample_uniform(&rec, 50.0).unwrap();
        assert_eq!(out.len(), 500);
        for (t, a) in out.time().iter().zip(&out.accel()[0]) {
            assert!((t - a).abs() < 1e-12);
        }
        assert!((out.duration() - rec.duration()).abs() <= 1.0 / 50.0);
    }

    #[test]
    fn jittered_sine_within_interpolation_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let freq = 2.0;
        let omega = 2.0 * std::f64::consts::PI * freq;
        let time: Vec<f64> = (0..600)
            .map(|i| i as f64 / 50.0 + rng.random_range(-0.003..0.003))
            .collect();
        let rec = build(time.clone(), |t| (omega * t).sin(), 50.0);
        let out = resample_uniform(&rec, 50.0).unwrap();
        // Oracle: evaluate the true sine on the output grid. Linear interpolation over
        // an interval of width h errs by at most h^2/8 * max|f''|.
        let h_max = time.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let bound = h_max * h_max / 8.0 * omega * omega;
        let t0 = time[0];
        let max_dev = out
            .time()
            .iter()
            .zip(&out.accel()[0])
            .map(|(&t, &v)| (v - (omega * (t + t0)).sin()).abs())
            .fold(0.0, f64::max);
        assert!(max_dev <= bound, "{max_dev} > {bound}");
    }

    #[test]
    fn resampling_is_idempotent() {
        let time: Vec<f64> = (0..700).map(|i| i as f64 / 73.0).collect();
        let rec = build(time, |t| (5.0 * t).cos() + t, 73.0);
        let once = resample_uniform(&rec, 50.0).unwrap();
        let twice = resample_uniform(&once, 50.0).unwrap();
        assert_eq!(once.len(), twice.len());
        for (a, b) in once.channels().iter().zip(twice.channels().iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn too_short_after_downsampling() {
        let time: Vec<f64> = (0..300).map(|i| i as f64 / 100.0).collect();
        let rec = build(time, |t| t, 100.0);
        assert!(matches!(resample_uniform(&rec, 50.0), Err(Error::TooShort { .. })));
    }
}
