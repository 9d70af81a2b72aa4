//! Empirical mode decomposition by envelope sifting.

use super::spline::natural_spline_on_grid;
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

pub const MIN_EMD_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmdParams {
    pub max_imfs: usize,
    /// Sifting stops once `Σ(h_prev - h)² / Σ h_prev²` falls below this value.
    pub sift_tol: f64,
    pub max_sift_iterations: usize,
    /// Extrema mirrored across each boundary when building envelopes.
    pub mirror_extrema: usize,
}

impl Default for EmdParams {
    fn default() -> Self {
        EmdParams {
            max_imfs: 10,
            sift_tol: 0.2,
            max_sift_iterations: 100,
            mirror_extrema: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub imfs: Vec<Vec<T>>,
    pub residual: Vec<T>,
    /// Sifting iterations spent on each IMF.
    pub iterations: Vec<usize>,
}

impl<T: Real> Decomposition<T> {
    /// Sum of all IMFs and the residual.
    pub fn reconstruct(&self) -> Vec<T> {
        let mut out = self.residual.clone();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf) {
                *o += *v;
            }
        }
        out
    }
}

/// Indices of strict interior maxima and minima. On a plateau only the first
/// sample counts.
pub(crate) fn local_extrema<T: Real>(x: &[T]) -> (Vec<usize>, Vec<usize>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for i in 1..x.len().saturating_sub(1) {
        if x[i - 1] < x[i] && x[i] >= x[i + 1] {
            maxima.push(i);
        } else if x[i - 1] > x[i] && x[i] <= x[i + 1] {
            minima.push(i);
        }
    }
    (maxima, minima)
}

/// Sub-sample position and value of the extremum at `i`. Uses a zero-mean sinusoid
/// through the three samples when they determine one with fewer than about 14
/// samples per period, and a parabola otherwise.
fn refine<T: Real>(x: &[T], i: usize) -> (T, T) {
    let pos = T::from_usize_exact(i);
    if i == 0 || i + 1 >= x.len() {
        return (pos, x[i]);
    }
    let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
    let half = T::lit(0.5);
    if b != T::zero() {
        let cos_w = (a + c) / (b + b);
        if cos_w > -T::one() && cos_w < T::lit(0.9) {
            let w = cos_w.acos();
            let d = ((c - a) / ((b + b) * w.sin())).atan() / w;
            if d.abs() <= half {
                return (pos + d, b / (w * d).cos());
            }
        }
    }
    let curv = a - b - b + c;
    if curv == T::zero() {
        return (pos, b);
    }
    let delta = (half * (a - c) / curv).max(-half).min(half);
    (pos + delta, b - T::lit(0.25) * (a - c) * delta)
}

/// Cubic-spline envelope through the extrema at `idx`, with `mirror` extrema
/// reflected across each end of the signal.
fn envelope<T: Real>(x: &[T], idx: &[usize], mirror: usize) -> Vec<T> {
    let n = x.len();
    let last = T::from_usize_exact(n - 1);
    let points: Vec<(T, T)> = idx.iter().map(|&i| refine(x, i)).collect();
    let take = mirror.min(points.len()).max(1);
    let mut knots: Vec<(T, T)> = Vec::with_capacity(points.len() + 2 * take);
    for &(p, v) in points[..take].iter().rev() {
        knots.push((-p, v));
    }
    knots.extend(points.iter().copied());
    for &(p, v) in points[points.len() - take..].iter().rev() {
        knots.push((last + last - p, v));
    }
    knots.dedup_by(|b, a| b.0 <= a.0);
    let (xs, ys): (Vec<T>, Vec<T>) = knots.into_iter().unzip();
    natural_spline_on_grid(&xs, &ys, n)
}

fn sift<T: Real>(signal: &[T], params: &EmdParams) -> Result<(Vec<T>, usize)> {
    let tol = T::lit(params.sift_tol);
    let half = T::lit(0.5);
    let mut h = signal.to_vec();
    for iter in 1..=params.max_sift_iterations {
        let (maxima, minima) = local_extrema(&h);
        if maxima.is_empty() || minima.is_empty() {
            return Ok((h, iter - 1));
        }
        let upper = envelope(&h, &maxima, params.mirror_extrema);
        let lower = envelope(&h, &minima, params.mirror_extrema);
        let mut num = T::zero();
        let mut den = T::zero();
        for ((v, u), l) in h.iter_mut().zip(&upper).zip(&lower) {
            let m = (*u + *l) * half;
            num += m * m;
            den += *v * *v;
            *v -= m;
        }
        if den == T::zero() || num / den < tol {
            return Ok((h, iter));
        }
    }
    Err(Error::SiftDiverged { iterations: params.max_sift_iterations })
}

/// Decomposes `signal` into IMFs plus a residual; `Σ imfs + residual == signal` up to
/// rounding.
pub fn emd<T: Real>(signal: &[T], params: &EmdParams) -> Result<Decomposition<T>> {
    if signal.len() < MIN_EMD_LEN {
        return Err(Error::InvalidSignal(format!(
            "length {} < {MIN_EMD_LEN}",
            signal.len()
        )));
    }
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSignal("non-finite sample".into()));
    }
    let scale = signal.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = T::lit(1e-10) * scale;
    let mut residual = signal.to_vec();
    let mut imfs = Vec::new();
    let mut iterations = Vec::new();
    while imfs.len() < params.max_imfs {
        let (maxima, minima) = local_extrema(&residual);
        if maxima.is_empty() || minima.is_empty() {
            break;
        }
        if !imfs.is_empty() && residual.iter().all(|v| v.abs() <= floor) {
            break;
        }
        let (imf, iters) = sift(&residual, params)?;
        for (r, v) in residual.iter_mut().zip(&imf) {
            *r -= *v;
        }
        imfs.push(imf);
        iterations.push(iters);
    }
    Ok(Decomposition { imfs, residual, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tone(freq: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * freq * i as f64 / 50.0).sin()).collect()
    }

    fn dominant_freq(x: &[f64]) -> f64 {
        // Brute-force DFT peak, independent of the FFT used by the Hilbert step.
        let n = x.len();
        (1..n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (i, v) in x.iter().enumerate() {
                    let a = 2.0 * PI * (k * i) as f64 / n as f64;
                    re += v * a.cos();
                    im -= v * a.sin();
                }
                (k, re * re + im * im)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k as f64 * 50.0 / n as f64)
            .unwrap()
    }

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let ma = a.iter().sum::<f64>() / a.len() as f64;
        let mb = b.iter().sum::<f64>() / b.len() as f64;
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma).powi(2);
            sbb += (y - mb).powi(2);
        }
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn pure_tone_lands_in_first_imf() {
        let x = tone(8.0, 500);
        let d = emd(&x, &EmdParams::default()).unwrap();
        assert!(!d.imfs.is_empty());
        assert!(corr(&d.imfs[0], &x) >= 0.99, "r = {}", corr(&d.imfs[0], &x));
        let e_in: f64 = x.iter().map(|v| v * v).sum();
        let e_res: f64 = d.residual.iter().map(|v| v * v).sum();
        assert!(e_res <= 0.01 * e_in);
    }

    #[test]
    fn two_tones_separate_by_frequency() {
        let a = tone(10.0, 500);
        let b = tone(3.0, 500);
        let x: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        let d = emd(&x, &EmdParams::default()).unwrap();
        assert!(d.imfs.len() >= 2);
        assert!((dominant_freq(&d.imfs[0]) - 10.0).abs() <= 0.5);
        assert!((dominant_freq(&d.imfs[1]) - 3.0).abs() <= 0.5);
    }

    #[test]
    fn zero_and_monotone_signals_have_no_imfs() {
        let d = emd(&[0.0f64; 64], &EmdParams::default()).unwrap();
        assert!(d.imfs.is_empty());
        let ramp: Vec<f64> = (0..64).map(|i| (i as f64).sqrt()).collect();
        let d = emd(&ramp, &EmdParams::default()).unwrap();
        assert!(d.imfs.is_empty());
        assert_eq!(d.residual, ramp);
    }

    #[test]
    fn rejects_short_or_non_finite() {
        assert!(matches!(emd(&[1.0f64; 15], &EmdParams::default()), Err(Error::InvalidSignal(_))));
        let mut x = tone(5.0, 40);
        x[7] = f64::NAN;
        assert!(matches!(emd(&x, &EmdParams::default()), Err(Error::InvalidSignal(_))));
    }

    #[test]
    fn iteration_cap_reports_divergence() {
        let x = tone(4.0, 200);
        let p = EmdParams { sift_tol: 0.0, max_sift_iterations: 3, ..Default::default() };
        assert!(matches!(emd(&x, &p), Err(Error::SiftDiverged { iterations: 3 })));
    }

    #[test]
    fn works_in_single_precision() {
        let x: Vec<f32> = tone(6.0, 300).into_iter().map(|v| v as f32).collect();
        let d = emd(&x, &EmdParams::default()).unwrap();
        let rec = d.reconstruct();
        let err = rec.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
        assert!(err < 1e-5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn reconstruction_is_exact(xs in prop::collection::vec(-100.0f64..100.0, 16..400)) {
            let d = emd(&xs, &EmdParams::default()).unwrap();
            let norm = xs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let rec = d.reconstruct();
            let err = rec.iter().zip(&xs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            prop_assert!(err <= 1e-8 * norm.max(f64::MIN_POSITIVE));
        }
    }
}
