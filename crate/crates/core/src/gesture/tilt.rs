use crate::error::{Error, Result};
use crate::scalar::{mean, population_variance, Real};
use crate::signal::{PenRecording, StrokeSegmentation};

/// Below this accelerometer norm (m/s²) a frame is treated as free fall and only the
/// gyro propagation is applied.
const FREE_FALL_NORM: f64 = 0.5;

/// Pen tilt in degrees per non-pause sample: 90° vertical, 0° horizontal.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltSeries<T> {
    pub tilt: Vec<T>,
    pub filter_alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltStats<T> {
    pub mean: T,
    /// `None` when the mean is zero.
    pub cv: Option<T>,
    pub var: T,
}

type Vec3<T> = [T; 3];

fn dot<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm<T: Real>(a: Vec3<T>) -> T {
    dot(a, a).sqrt()
}

fn scale<T: Real>(a: Vec3<T>, s: T) -> Vec3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Rotates `v` by the rotation vector `rot` (axis times angle, radians).
fn rotate<T: Real>(v: Vec3<T>, rot: Vec3<T>) -> Vec3<T> {
    let angle = norm(rot);
    if angle == T::zero() {
        return v;
    }
    let k = scale(rot, angle.recip());
    let (s, c) = angle.sin_cos();
    let kxv = cross(k, v);
    let kdv = dot(k, v);
    [
        v[0] * c + kxv[0] * s + k[0] * kdv * (T::one() - c),
        v[1] * c + kxv[1] * s + k[1] * kdv * (T::one() - c),
        v[2] * c + kxv[2] * s + k[2] * kdv * (T::one() - c),
    ]
}

/// Complementary filter over the whole recording.
///
/// Tracks the world "up" direction in the pen frame: the gyro rate propagates it
/// (`du/dt = -ω × u`) and the normalised accelerometer reading pulls it back with
/// weight `1 - alpha`. The pen's long axis is the sensor z axis, so the tilt is
/// `asin(|u_z|)`.
pub fn tilt_trajectory<T: Real>(rec: &PenRecording<T>, alpha: f64) -> Vec<T> {
    let alpha = T::lit(alpha);
    let free_fall = T::lit(FREE_FALL_NORM);
    let deg_to_rad = T::PI() / T::lit(180.0);
    let half = T::lit(0.5);
    let a = rec.accel();
    let g = rec.gyro();
    let t = rec.time();
    let accel_at = |i: usize| [a[0][i], a[1][i], a[2][i]];
    let gyro_at = |i: usize| scale([g[0][i], g[1][i], g[2][i]], deg_to_rad);

    let first = accel_at(0);
    let mut up = if norm(first) > free_fall {
        scale(first, norm(first).recip())
    } else {
        [T::zero(), T::zero(), T::one()]
    };
    let mut out = Vec::with_capacity(rec.len());
    for i in 0..rec.len() {
        if i > 0 {
            let dt = t[i] - t[i - 1];
            let w0 = gyro_at(i - 1);
            let w1 = gyro_at(i);
            let w = [(w0[0] + w1[0]) * half, (w0[1] + w1[1]) * half, (w0[2] + w1[2]) * half];
            up = rotate(up, scale(w, -dt));
            let acc = accel_at(i);
            let an = norm(acc);
            if an > free_fall {
                let blended = [
                    alpha * up[0] + (T::one() - alpha) * acc[0] / an,
                    alpha * up[1] + (T::one() - alpha) * acc[1] / an,
                    alpha * up[2] + (T::one() - alpha) * acc[2] / an,
                ];
                let bn = norm(blended);
                if bn > T::zero() {
                    up = scale(blended, bn.recip());
                }
            }
        }
        let s = up[2].abs().min(T::one());
        out.push(s.asin().to_degrees());
    }
    out
}

/// Tilt series over the writing samples (pauses removed).
pub fn estimate_tilt<T: Real>(rec: &PenRecording<T>, seg: &StrokeSegmentation, alpha: f64) -> TiltSeries<T> {
    let full = tilt_trajectory(rec, alpha);
    let mask = seg.non_pause_mask();
    let tilt = full.into_iter().zip(mask).filter_map(|(v, keep)| keep.then_some(v)).collect();
    TiltSeries { tilt, filter_alpha: alpha }
}

/// Population mean, coefficient of variation and variance.
pub fn tilt_stats<T: Real>(series: &TiltSeries<T>) -> Result<TiltStats<T>> {
    let m = mean(&series.tilt).ok_or(Error::EmptyWriting)?;
    let var = population_variance(&series.tilt).ok_or(Error::EmptyWriting)?;
    let cv = (m != T::zero()).then(|| var.sqrt() / m);
    Ok(TiltStats { mean: m, cv, var })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{segment_strokes, RecordingMeta, SegmentParams};
    use nalgebra::{UnitQuaternion, Vector3};

    fn stationary(accel: [f64; 3], n: usize) -> PenRecording<f64> {
        let time = (0..n).map(|i| i as f64 / 50.0).collect();
        PenRecording::new(
            RecordingMeta::anonymous(50.0),
            time,
            [vec![accel[0]; n], vec![accel[1]; n], vec![accel[2]; n]],
            [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            vec![1.0; n],
        )
        .unwrap()
    }

    #[test]
    fn vertical_pen_reads_ninety() {
        let rec = stationary([0.0, 0.0, 9.81], 300);
        assert!(tilt_trajectory(&rec, 0.98).iter().all(|t| (t - 90.0).abs() < 0.1));
        let rec = stationary([0.0, 0.0, -9.81], 300);
        assert!(tilt_trajectory(&rec, 0.98).iter().all(|t| (t - 90.0).abs() < 0.1));
    }

    #[test]
    fn horizontal_pen_reads_zero() {
        let rec = stationary([9.81, 0.0, 0.0], 300);
        assert!(tilt_trajectory(&rec, 0.98).iter().all(|t| t.abs() < 0.1));
        let rec = stationary([0.0, -9.81, 0.0], 300);
        assert!(tilt_trajectory(&rec, 0.98).iter().all(|t| t.abs() < 0.1));
    }

    #[test]
    fn free_fall_uses_gyro_only() {
        let mut rec = stationary([0.0, 0.0, 9.81], 300);
        let n = rec.len();
        let mut az = rec.accel()[2].clone();
        az[100..150].iter_mut().for_each(|v| *v = 0.0);
        rec = PenRecording::new(
            rec.meta().clone(),
            rec.time().to_vec(),
            [vec![0.0; n], vec![0.0; n], az],
            rec.gyro().clone(),
            rec.force().to_vec(),
        )
        .unwrap();
        let tilt = tilt_trajectory(&rec, 0.98);
        assert!(tilt.iter().all(|t| t.is_finite() && (t - 90.0).abs() < 0.1));
    }

    /// Simulates IMU readings from a body-rate quaternion trajectory and returns
    /// (recording, ground-truth tilt in degrees).
    fn simulate(q0: UnitQuaternion<f64>, rate: Vector3<f64>, secs: f64) -> (PenRecording<f64>, Vec<f64>) {
        let fs = 50.0;
        let n = (secs * fs) as usize;
        let gravity_up = Vector3::new(0.0, 0.0, 9.81);
        let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); 6];
        let mut truth = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 / fs;
            let q = q0 * UnitQuaternion::from_scaled_axis(rate * t);
            let acc = q.inverse_transform_vector(&gravity_up);
            for k in 0..3 {
                cols[k].push(acc[k]);
                cols[3 + k].push(rate[k].to_degrees());
            }
            let axis_world = q.transform_vector(&Vector3::z());
            truth.push(axis_world.z.abs().min(1.0).asin().to_degrees());
        }
        let time = (0..n).map(|i| i as f64 / fs).collect();
        let g = cols.split_off(3);
        let [ax, ay, az]: [Vec<f64>; 3] = cols.try_into().unwrap();
        let [gx, gy, gz]: [Vec<f64>; 3] = g.try_into().unwrap();
        let rec = PenRecording::new(
            RecordingMeta::anonymous(fs),
            time,
            [ax, ay, az],
            [gx, gy, gz],
            vec![1.0; n],
        )
        .unwrap();
        (rec, truth)
    }

    #[test]
    fn tracks_quaternion_rotation() {
        let q0 = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), 0.2);
        let (rec, truth) = simulate(q0, Vector3::new(0.25, -0.1, 0.6), 12.0);
        let est = tilt_trajectory(&rec, 0.98);
        let rms = (est.iter().zip(&truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / est.len() as f64).sqrt();
        assert!(rms < 1.0, "rms {rms}");
    }

    #[test]
    fn roll_about_pen_axis_keeps_tilt() {
        // Pen tilted by 35° from vertical, spinning about its own axis.
        let q0 = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), 35f64.to_radians());
        let (rec, truth) = simulate(q0, Vector3::new(0.0, 0.0, 2.0), 10.0);
        let est = tilt_trajectory(&rec, 0.98);
        assert!(truth.iter().all(|t| (t - 55.0).abs() < 1e-9));
        assert!(est.iter().all(|t| (t - 55.0).abs() < 0.5));
    }

    #[test]
    fn stats_on_constant_and_two_value_series() {
        let s = tilt_stats(&TiltSeries { tilt: vec![45.0f64; 10], filter_alpha: 0.98 }).unwrap();
        assert_eq!((s.mean, s.cv, s.var), (45.0, Some(0.0), 0.0));
        let s = tilt_stats(&TiltSeries { tilt: vec![30.0f64, 60.0], filter_alpha: 0.98 }).unwrap();
        assert_eq!(s.mean, 45.0);
        assert_eq!(s.var, 225.0);
        assert!((s.cv.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let s = tilt_stats(&TiltSeries { tilt: vec![0.0f64; 5], filter_alpha: 0.98 }).unwrap();
        assert_eq!(s.cv, None);
    }

    #[test]
    fn stats_match_two_pass_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let xs: Vec<f64> = (0..997).map(|_| rng.random_range(10.0..80.0)).collect();
        let n = xs.len() as f64;
        let mut m = 0.0;
        for x in &xs {
            m += x;
        }
        m /= n;
        let mut v = 0.0;
        for x in &xs {
            v += (x - m) * (x - m);
        }
        v /= n;
        let s = tilt_stats(&TiltSeries { tilt: xs, filter_alpha: 0.98 }).unwrap();
        assert!((s.mean - m).abs() < 1e-12);
        assert!((s.var - v).abs() < 1e-12 * v.max(1.0));
        assert!((s.cv.unwrap() - v.sqrt() / m).abs() < 1e-9);
    }

    #[test]
    fn pauses_are_removed_from_series() {
        let n = 400;
        let mut force = vec![1.0; n];
        force[100..250].iter_mut().for_each(|f| *f = 0.0);
        let rec = stationary([0.0, 0.0, 9.81], n).with_force(force).unwrap();
        let seg = segment_strokes(&rec, &SegmentParams::default()).unwrap();
        assert_eq!(seg.pauses.len(), 1);
        let series = estimate_tilt(&rec, &seg, 0.98);
        assert_eq!(series.tilt.len(), n - 150);
        assert!(series.tilt.iter().all(|t| (0.0..=180.0).contains(t)));
    }
}
