//! Hilbert marginal spectrum of the IMFs of a window.

use super::emd::{emd, EmdParams};
use crate::error::Result;
use crate::scalar::Real;
use num_traits::Float;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Marginal power spectrum on fixed frequency bins.
#[derive(Debug, Clone, PartialEq)]
pub struct HhtSpectrum<T> {
    /// Bin centres (Hz): `0, w, 2w, ...` up to Nyquist.
    pub freqs: Vec<T>,
    pub power: Vec<T>,
    pub n_imfs: usize,
}

/// Analytic signal via the frequency-domain Hilbert transform.
pub fn analytic_signal<T: Real>(x: &[T]) -> Vec<Complex<T>> {
    let n = x.len();
    let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
    if n == 0 {
        return buf;
    }
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let two = T::lit(2.0);
    let half = n / 2;
    for (k, c) in buf.iter_mut().enumerate() {
        let w = if k == 0 || (n % 2 == 0 && k == half) {
            T::one()
        } else if k <= (n - 1) / 2 {
            two
        } else {
            T::zero()
        };
        *c = *c * w;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = T::from_usize_exact(n).recip();
    for c in buf.iter_mut() {
        *c = *c * scale;
    }
    buf
}

/// Instantaneous amplitude and frequency (Hz, clamped to `[0, Nyquist]`).
pub fn instantaneous<T: Real>(x: &[T], sample_rate: T) -> (Vec<T>, Vec<T>) {
    let z = analytic_signal(x);
    let amp: Vec<T> = z.iter().map(|c| c.norm()).collect();
    let mut phase: Vec<T> = z.iter().map(|c| c.im.atan2(c.re)).collect();
    let tau = T::TAU();
    for i in 1..phase.len() {
        let mut d = phase[i] - phase[i - 1];
        while d > T::PI() {
            d -= tau;
        }
        while d < -T::PI() {
            d += tau;
        }
        phase[i] = phase[i - 1] + d;
    }
    let nyquist = sample_rate / T::lit(2.0);
    let n = phase.len();
    let freq = (0..n)
        .map(|i| {
            let dphi = match (i, n) {
                (_, 0 | 1) => T::zero(),
                (0, _) => phase[1] - phase[0],
                (i, n) if i == n - 1 => phase[i] - phase[i - 1],
                (i, _) => (phase[i + 1] - phase[i - 1]) / T::lit(2.0),
            };
            (dphi * sample_rate / tau).max(T::zero()).min(nyquist)
        })
        .collect();
    (amp, freq)
}

/// Decomposes the window and accumulates squared instantaneous amplitude of every
/// IMF into bins of width `bin_width` centred on multiples of it.
pub fn hht_spectrum<T: Real>(
    window: &[T],
    sample_rate: T,
    bin_width: T,
    emd_params: &EmdParams,
) -> Result<HhtSpectrum<T>> {
    let decomposition = emd(window, emd_params)?;
    let nyquist = sample_rate / T::lit(2.0);
    let n_bins = Float::floor(nyquist / bin_width + T::lit(1e-9)).to_usize().unwrap_or(0) + 1;
    let freqs: Vec<T> = (0..n_bins).map(|k| T::from_usize_exact(k) * bin_width).collect();
    let mut power = vec![T::zero(); n_bins];
    for imf in &decomposition.imfs {
        let (amp, freq) = instantaneous(imf, sample_rate);
        for (a, f) in amp.into_iter().zip(freq) {
            let bin = Float::round(f / bin_width).to_usize().unwrap_or(0).min(n_bins - 1);
            power[bin] += a * a;
        }
    }
    Ok(HhtSpectrum { freqs, power, n_imfs: decomposition.imfs.len() })
}
