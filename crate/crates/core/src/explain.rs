//! Interventional Shapley values in log-odds space and feature ranking.

use crate::error::{Error, Result};
use crate::models::AdditiveModel;
use crate::scalar::Real;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const MAX_EXACT_FEATURES: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputSpace {
    LogOdds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapMethod {
    Exact,
    Sampled,
}

/// Attributions for a batch of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapValues<T> {
    pub method: ShapMethod,
    /// Mean raw output over the background rows.
    pub baseline: T,
    /// Raw model output of each explained row.
    pub raw: Vec<T>,
    pub phi: Vec<Vec<T>>,
    /// Monte-Carlo standard errors (sampled estimator only).
    pub se: Option<Vec<Vec<T>>>,
}

fn check_inputs<T: Real, M: AdditiveModel<T> + ?Sized>(model: &M, x: &[Vec<T>], background: &[Vec<T>]) -> Result<()> {
    if background.is_empty() {
        return Err(Error::TooFewSamples("empty background".into()));
    }
    let d = model.n_features();
    match x.iter().chain(background).find(|r| r.len() != d) {
        Some(r) => Err(Error::DimensionMismatch { expected: d, got: r.len() }),
        None => Ok(()),
    }
}

fn baseline<T: Real, M: AdditiveModel<T> + ?Sized>(model: &M, background: &[Vec<T>]) -> T {
    background.iter().map(|b| model.raw_score(b)).sum::<T>() / T::from_usize_exact(background.len())
}

/// `s!(f-s-1)!/f!` for `s = 0..f`.
fn shapley_weights<T: Real>(f: usize) -> Vec<T> {
    let fact = |k: usize| (1..=k).fold(T::one(), |acc, v| acc * T::from_usize_exact(v));
    (0..f).map(|s| fact(s) * fact(f - s - 1) / fact(f)).collect()
}

/// Exact enumeration. Each additive part is expanded only over the features it
/// reads, so the cost is `Σ_parts 2^|part| · |background|` per row.
pub fn shapley_exact<T: Real, M: AdditiveModel<T> + ?Sized>(
    model: &M,
    x: &[Vec<T>],
    background: &[Vec<T>],
) -> Result<ShapValues<T>> {
    let d = model.n_features();
    if d > MAX_EXACT_FEATURES {
        return Err(Error::TooManyFeaturesForExact { max: MAX_EXACT_FEATURES, got: d });
    }
    check_inputs(model, x, background)?;
    let parts: Vec<(usize, Vec<usize>, Vec<T>)> = (0..model.n_parts())
        .map(|k| {
            let f = model.part_features(k);
            let w = shapley_weights(f.len());
            (k, f, w)
        })
        .filter(|(_, f, _)| !f.is_empty())
        .collect();
    let nb = T::from_usize_exact(background.len());
    let phi: Vec<Vec<T>> = x
        .par_iter()
        .map(|row| {
            let mut out = vec![T::zero(); d];
            let mut z = vec![T::zero(); d];
            for (k, feats, w) in &parts {
                let f = feats.len();
                let values: Vec<T> = (0..1usize << f)
                    .map(|mask| {
                        let mut acc = T::zero();
                        for b in background {
                            z.copy_from_slice(b);
                            for (bit, &j) in feats.iter().enumerate() {
                                if mask & (1 << bit) != 0 {
                                    z[j] = row[j];
                                }
                            }
                            acc += model.part_value(*k, &z);
                        }
                        acc / nb
                    })
                    .collect();
                for (bit, &j) in feats.iter().enumerate() {
                    let mut s = T::zero();
                    for mask in (0..1usize << f).filter(|m| m & (1 << bit) == 0) {
                        s += w[mask.count_ones() as usize] * (values[mask | (1 << bit)] - values[mask]);
                    }
                    out[j] += s;
                }
            }
            out
        })
        .collect();
    Ok(ShapValues {
        method: ShapMethod::Exact,
        baseline: baseline(model, background),
        raw: x.iter().map(|r| model.raw_score(r)).collect(),
        phi,
        se: None,
    })
}

/// Antithetic permutation sampling. Each permutation pair uses one background row,
/// cycling through the background set; row `i` draws from ChaCha stream `i` of
/// `seed`, so results do not depend on thread count. Estimates are then shifted,
/// in proportion to their variance, so that they sum to `raw − baseline`.
pub fn shapley_sampled<T: Real, M: AdditiveModel<T> + ?Sized>(
    model: &M,
    x: &[Vec<T>],
    background: &[Vec<T>],
    n_permutations: usize,
    seed: u64,
) -> Result<ShapValues<T>> {
    check_inputs(model, x, background)?;
    let d = model.n_features();
    let n_pairs = (n_permutations / 2).max(2);
    let parts_of: Vec<Vec<usize>> = {
        let mut v = vec![Vec::new(); d];
        for k in 0..model.n_parts() {
            for j in model.part_features(k) {
                v[j].push(k);
            }
        }
        v
    };
    let base = baseline(model, background);
    let results: Vec<(Vec<T>, Vec<T>)> = x
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut perm: Vec<usize> = (0..d).collect();
            let mut sum = vec![T::zero(); d];
            let mut sum_sq = vec![T::zero(); d];
            let mut contrib = vec![T::zero(); d];
            let mut z = vec![T::zero(); d];
            let mut part_vals = vec![T::zero(); model.n_parts()];
            let mut walk = |order: &mut dyn Iterator<Item = usize>, b: &[T], out: &mut [T]| {
                z.copy_from_slice(b);
                for (k, pv) in part_vals.iter_mut().enumerate() {
                    *pv = model.part_value(k, &z);
                }
                for j in order {
                    z[j] = row[j];
                    let mut delta = T::zero();
                    for &k in &parts_of[j] {
                        let v = model.part_value(k, &z);
                        delta += v - part_vals[k];
                        part_vals[k] = v;
                    }
                    out[j] = delta;
                }
            };
            let mut forward = vec![T::zero(); d];
            let half = T::lit(0.5);
            for p in 0..n_pairs {
                perm.shuffle(&mut rng);
                let b = &background[p % background.len()];
                walk(&mut perm.iter().copied(), b, &mut forward);
                walk(&mut perm.iter().rev().copied(), b, &mut contrib);
                for j in 0..d {
                    let a = (forward[j] + contrib[j]) * half;
                    sum[j] += a;
                    sum_sq[j] += a * a;
                }
            }
            let n = T::from_usize_exact(n_pairs);
            let mean: Vec<T> = sum.iter().map(|s| *s / n).collect();
            let var: Vec<T> = sum_sq
                .iter()
                .zip(&mean)
                .map(|(sq, m)| ((*sq - n * *m * *m) / (n - T::one())).max(T::zero()) / n)
                .collect();
            let gap = model.raw_score(row) - base - mean.iter().copied().sum::<T>();
            let total_var: T = var.iter().copied().sum();
            let phi = mean
                .iter()
                .zip(&var)
                .map(|(m, v)| {
                    if total_var > T::zero() {
                        *m + gap * *v / total_var
                    } else {
                        *m + gap / T::from_usize_exact(d.max(1))
                    }
                })
                .collect();
            (phi, var.into_iter().map(|v| v.sqrt()).collect())
        })
        .collect();
    let (phi, se) = results.into_iter().unzip();
    Ok(ShapValues {
        method: ShapMethod::Sampled,
        baseline: base,
        raw: x.iter().map(|r| model.raw_score(r)).collect(),
        phi,
        se: Some(se),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature: String,
    pub index: usize,
    pub mean_abs_phi: f64,
}

/// Features by mean |phi|, largest first; equal means are ordered by name.
pub fn rank_features<T: Real>(names: &[String], phi: &[Vec<T>]) -> Vec<RankedFeature> {
    let n = phi.len().max(1) as f64;
    let mut ranked: Vec<RankedFeature> = names
        .iter()
        .enumerate()
        .map(|(j, name)| RankedFeature {
            feature: name.clone(),
            index: j,
            mean_abs_phi: phi.iter().map(|r| r[j].abs().as_f64()).sum::<f64>() / n,
        })
        .collect();
    ranked.sort_by(|a, b| b.mean_abs_phi.total_cmp(&a.mean_abs_phi).then_with(|| a.feature.cmp(&b.feature)));
    ranked
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleAttribution {
    pub sample_id: String,
    pub raw_output: f64,
    pub phi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub se: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapReport {
    pub output_space: OutputSpace,
    pub method: ShapMethod,
    pub baseline: f64,
    pub feature_names: Vec<String>,
    pub samples: Vec<SampleAttribution>,
    pub ranking: Vec<RankedFeature>,
}

impl ShapReport {
    pub fn new<T: Real>(values: &ShapValues<T>, feature_names: &[String], sample_ids: &[String]) -> Self {
        let conv = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        let samples = sample_ids
            .iter()
            .enumerate()
            .map(|(i, id)| SampleAttribution {
                sample_id: id.clone(),
                raw_output: values.raw[i].as_f64(),
                phi: conv(&values.phi[i]),
                se: values.se.as_ref().map(|se| conv(&se[i])),
            })
            .collect();
        ShapReport {
            output_space: OutputSpace::LogOdds,
            method: values.method,
            baseline: values.baseline.as_f64(),
            feature_names: feature_names.to_vec(),
            samples,
            ranking: rank_features(feature_names, &values.phi),
        }
    }

    /// `feature,sample_id,feature_value,phi`, features in ranking order.
    pub fn write_beeswarm_csv<T: Real, W: Write>(&self, x: &[Vec<T>], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["feature", "sample_id", "feature_value", "phi"])?;
        for r in &self.ranking {
            for (s, row) in self.samples.iter().zip(x) {
                w.write_record([
                    r.feature.clone(),
                    s.sample_id.clone(),
                    row[r.index].to_string(),
                    s.phi[r.index].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
