//! Tremor indicators from windowed acceleration: Hilbert–Huang modal frequency and
//! spectral RMS, approximate entropy and recurrence quantification.

mod apen;
mod emd;
mod hht;
mod rqa;
mod spline;
mod windows;

pub use apen::approximate_entropy;
pub use emd::{emd, Decomposition, EmdParams, MIN_EMD_LEN};
pub use hht::{analytic_signal, hht_spectrum, instantaneous, HhtSpectrum};
pub use rqa::{rqa, RqaMeasures, RqaParams};
pub use windows::{make_windows, windows_from_series, SourceChannel, TremorWindows, WINDOW_LEN};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{PenRecording, StrokeSegmentation};
use num_traits::Float;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TremorParams {
    pub window_len: usize,
    pub bin_width: f64,
    pub emd: EmdParams,
    pub apen_m: usize,
    pub apen_r_factor: f64,
    pub rqa: RqaParams,
}

impl Default for TremorParams {
    fn default() -> Self {
        TremorParams {
            window_len: WINDOW_LEN,
            bin_width: 0.5,
            emd: EmdParams::default(),
            apen_m: 2,
            apen_r_factor: 0.2,
            rqa: RqaParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TremorFeatures<T> {
    pub f_modal: T,
    pub rms: T,
    pub apen: T,
    pub rr: T,
    pub det: T,
}

/// Mean over windows of the bin centre with the largest power. Windows without
/// power are skipped; ties go to the lower frequency.
pub fn modal_frequency<T: Real>(spectra: &[HhtSpectrum<T>]) -> Result<T> {
    let peaks: Vec<T> = spectra
        .iter()
        .filter(|s| s.power.iter().any(|p| *p > T::zero()))
        .map(|s| {
            let mut best = 0;
            for (k, p) in s.power.iter().enumerate() {
                if *p > s.power[best] {
                    best = k;
                }
            }
            s.freqs[best]
        })
        .collect();
    if peaks.is_empty() {
        return Err(Error::AllZeroSpectra);
    }
    Ok(peaks.iter().copied().sum::<T>() / T::from_usize_exact(peaks.len()))
}

/// Mean over windows of the RMS of the power bins.
pub fn tremor_rms<T: Real>(spectra: &[HhtSpectrum<T>]) -> T {
    if spectra.is_empty() {
        return T::zero();
    }
    let total: T = spectra
        .iter()
        .map(|s| {
            let n = T::from_usize_exact(s.power.len().max(1));
            Float::sqrt(s.power.iter().map(|p| *p * *p).sum::<T>() / n)
        })
        .sum();
    total / T::from_usize_exact(spectra.len())
}

struct WindowResult<T> {
    spectrum: HhtSpectrum<T>,
    apen: T,
    rqa: RqaMeasures<T>,
}

pub fn tremor_features<T: Real>(
    rec: &PenRecording<T>,
    seg: &StrokeSegmentation,
    params: &TremorParams,
) -> Result<TremorFeatures<T>> {
    let windows = make_windows(rec, seg, params.window_len)?;
    features_from_windows(&windows.windows, rec.sample_rate(), params)
}

pub fn features_from_windows<T: Real>(
    windows: &[Vec<T>],
    sample_rate: T,
    params: &TremorParams,
) -> Result<TremorFeatures<T>> {
    // Indexed parallel collect keeps window order, so reductions are deterministic.
    let results: Vec<WindowResult<T>> = windows
        .par_iter()
        .map(|w| {
            Ok(WindowResult {
                spectrum: hht_spectrum(w, sample_rate, T::lit(params.bin_width), &params.emd)?,
                apen: approximate_entropy(w, params.apen_m, params.apen_r_factor),
                rqa: rqa(w, &params.rqa)?,
            })
        })
        .collect::<Result<_>>()?;
    let spectra: Vec<HhtSpectrum<T>> = results.iter().map(|r| r.spectrum.clone()).collect();
    let n = T::from_usize_exact(results.len());
    Ok(TremorFeatures {
        f_modal: modal_frequency(&spectra)?,
        rms: tremor_rms(&spectra),
        apen: results.iter().map(|r| r.apen).sum::<T>() / n,
        rr: results.iter().map(|r| r.rqa.rr).sum::<T>() / n,
        det: results.iter().map(|r| r.rqa.det).sum::<T>() / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn spectrum(power: Vec<f64>) -> HhtSpectrum<f64> {
        let freqs = (0..power.len()).map(|k| k as f64 * 0.5).collect();
        HhtSpectrum { freqs, power, n_imfs: 1 }
    }

    fn peak_at(f: f64) -> HhtSpectrum<f64> {
        let mut p = vec![0.1; 51];
        p[(f / 0.5) as usize] = 5.0;
        spectrum(p)
    }

    #[test]
    fn modal_frequency_averages_window_peaks() {
        assert_eq!(modal_frequency(&[peak_at(6.0), peak_at(10.0)]).unwrap(), 8.0);
    }

    #[test]
    fn modal_frequency_tie_goes_low() {
        let mut p = vec![0.0; 51];
        p[10] = 2.0;
        p[14] = 2.0;
        assert_eq!(modal_frequency(&[spectrum(p)]).unwrap(), 5.0);
    }

    #[test]
    fn modal_frequency_rejects_all_zero() {
        assert!(matches!(modal_frequency(&[spectrum(vec![0.0; 51])]), Err(Error::AllZeroSpectra)));
    }

    #[test]
    fn modal_frequency_of_tones() {
        for f in (4..=40).map(|k| k as f64 * 0.5) {
            let x: Vec<f64> = (0..500).map(|i| (2.0 * PI * f * i as f64 / 50.0).sin()).collect();
            let s = hht_spectrum(&x, 50.0, 0.5, &EmdParams::default()).unwrap();
            let got = modal_frequency(&[s]).unwrap();
            assert!((got - f).abs() <= 0.5, "{f}: {got}");
        }
    }

    #[test]
    fn rms_examples() {
        assert_eq!(tremor_rms(&[spectrum(vec![0.0; 51])]), 0.0);
        let got = tremor_rms(&[spectrum(vec![3.0, 4.0])]);
        assert!((got - (12.5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rms_matches_direct_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let spectra: Vec<_> = (0..7).map(|_| spectrum((0..51).map(|_| rng.random_range(0.0..3.0)).collect())).collect();
        let per: Vec<f64> = spectra
            .iter()
            .map(|s| (s.power.iter().map(|p| p * p).sum::<f64>() / s.power.len() as f64).sqrt())
            .collect();
        let oracle = per.iter().sum::<f64>() / per.len() as f64;
        assert!((tremor_rms(&spectra) - oracle).abs() <= 1e-12);
    }

    #[test]
    fn tone_versus_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let tone: Vec<Vec<f64>> = (0..2)
            .map(|w| (0..500).map(|i| 0.3 * (2.0 * PI * 8.0 * (w * 500 + i) as f64 / 50.0).sin()).collect())
            .collect();
        let noise: Vec<Vec<f64>> = (0..2).map(|_| (0..500).map(|_| rng.random_range(-0.3..0.3)).collect()).collect();
        let p = TremorParams::default();
        let a = features_from_windows(&tone, 50.0, &p).unwrap();
        let b = features_from_windows(&noise, 50.0, &p).unwrap();
        assert!((a.f_modal - 8.0).abs() <= 0.5);
        assert!(a.apen < b.apen);
        assert!(a.det > b.det);
        let again = features_from_windows(&tone, 50.0, &p).unwrap();
        assert_eq!(a, again);
    }
}
