//! Reference implementations and fixtures shared by the integration tests.
#![allow(dead_code)]

use inkage::models::{AdditiveModel, GbdtModel, Node, Tree};
use inkage::signal::{PenRecording, RecordingMeta};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_series(seed: u64, n: usize) -> Vec<f64> {
    let mut r = rng(seed);
    let f = r.random_range(2.0..15.0);
    (0..n)
        .map(|i| (2.0 * std::f64::consts::PI * f * i as f64 / 50.0).sin() + r.random_range(-0.5..0.5))
        .collect()
}

fn sd(x: &[f64]) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}

/// Pincus approximate entropy straight from the definition.
pub fn naive_apen(x: &[f64], m: usize, r_factor: f64) -> f64 {
    let s = sd(x);
    if s == 0.0 {
        return 0.0;
    }
    let r = r_factor * s;
    let phi = |m: usize| -> f64 {
        let n = x.len() - m + 1;
        let mut acc = 0.0;
        for i in 0..n {
            let mut c = 0usize;
            for j in 0..n {
                let d = (0..m).map(|k| (x[i + k] - x[j + k]).abs()).fold(0.0, f64::max);
                if d <= r {
                    c += 1;
                }
            }
            acc += (c as f64 / n as f64).ln();
        }
        acc / n as f64
    };
    phi(m) - phi(m + 1)
}

/// Recurrence rate and determinism from the full recurrence matrix.
pub fn naive_rqa(x: &[f64], dim: usize, delay: usize, eps_factor: f64, l_min: usize) -> (f64, f64) {
    let m = x.len() - (dim - 1) * delay;
    let eps = (eps_factor * sd(x)).max(f64::EPSILON);
    let emb: Vec<Vec<f64>> = (0..m).map(|i| (0..dim).map(|k| x[i + k * delay]).collect()).collect();
    let rec = |i: usize, j: usize| {
        i != j && emb[i].iter().zip(&emb[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= eps * eps
    };
    let mut total = 0usize;
    for i in 0..m {
        for j in 0..m {
            total += usize::from(rec(i, j));
        }
    }
    let mut on_lines = 0usize;
    for i0 in 0..m {
        for j0 in 0..m {
            // Start of a diagonal run: recurrent here and not at (i0-1, j0-1).
            if !rec(i0, j0) || (i0 > 0 && j0 > 0 && rec(i0 - 1, j0 - 1)) {
                continue;
            }
            let mut len = 0;
            while i0 + len < m && j0 + len < m && rec(i0 + len, j0 + len) {
                len += 1;
            }
            if len >= l_min {
                on_lines += len;
            }
        }
    }
    let rr = total as f64 / (m * (m - 1)) as f64;
    let det = if total == 0 { 0.0 } else { on_lines as f64 / total as f64 };
    (rr, det)
}

/// AUC in percent by comparing every positive with every negative.
pub fn brute_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in labels.iter().enumerate() {
        for (j, &yj) in labels.iter().enumerate() {
            if yi == 1 && yj == 0 {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    100.0 * wins / pairs
}

/// Shapley values of `v` over all coalitions, by the permutation definition.
pub fn brute_shapley<M: AdditiveModel<f64>>(model: &M, x: &[f64], background: &[Vec<f64>]) -> Vec<f64> {
    let d = x.len();
    let value = |mask: usize| -> f64 {
        background
            .iter()
            .map(|b| {
                let z: Vec<f64> = (0..d).map(|j| if mask >> j & 1 == 1 { x[j] } else { b[j] }).collect();
                model.raw_score(&z)
            })
            .sum::<f64>()
            / background.len() as f64
    };
    let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    let mut phi = vec![0.0; d];
    for mask in 0..1usize << d {
        let s = mask.count_ones() as usize;
        let vm = value(mask);
        for (j, p) in phi.iter_mut().enumerate() {
            if mask >> j & 1 == 0 {
                let w = fact(s) * fact(d - s - 1) / fact(d);
                *p += w * (value(mask | 1 << j) - vm);
            }
        }
    }
    phi
}

/// Hand-built recording: strokes of `stroke` seconds separated by `gap` seconds.
pub fn stroke_recording(n_strokes: usize, stroke: f64, gap: f64, rate: f64) -> PenRecording<f64> {
    let lead = 0.5;
    let total = 2.0 * lead + n_strokes as f64 * stroke + (n_strokes - 1) as f64 * gap;
    let n = (total * rate).ceil() as usize + 1;
    let t: Vec<f64> = (0..n).map(|i| i as f64 / rate).collect();
    let force: Vec<f64> = t
        .iter()
        .map(|&ti| {
            let u = ti - lead;
            if u < 0.0 {
                return 0.0;
            }
            let k = (u / (stroke + gap)).floor();
            let phase = u - k * (stroke + gap);
            if (k as usize) < n_strokes && phase < stroke {
                1.0 + 0.5 * (std::f64::consts::PI * phase / stroke).sin()
            } else {
                0.0
            }
        })
        .collect();
    let tilt = 50f64.to_radians();
    let accel = [
        t.iter().map(|&ti| 9.81 * tilt.cos() + 0.05 * (2.0 * std::f64::consts::PI * 8.0 * ti).sin()).collect(),
        vec![0.0; n],
        vec![9.81 * tilt.sin(); n],
    ];
    let gyro = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    PenRecording::new(RecordingMeta::anonymous(rate), t, accel, gyro, force).expect("valid recording")
}

fn random_node(r: &mut ChaCha8Rng, features: &[usize], depth: usize) -> Node<f64> {
    if depth == 0 {
        return Node::Leaf { value: r.random_range(-1.0..1.0) };
    }
    Node::Split {
        feature: features[r.random_range(0..features.len())],
        threshold: r.random_range(0.2..0.8),
        left: Box::new(random_node(r, features, depth - 1)),
        right: Box::new(random_node(r, features, depth - 1)),
    }
}

pub fn random_forest(seed: u64, d: usize, used: &[usize], n_trees: usize) -> GbdtModel<f64> {
    let mut r = rng(seed);
    let trees: Vec<Tree<f64>> = (0..n_trees).map(|_| Tree { root: random_node(&mut r, used, 3) }).collect();
    GbdtModel {
        best_iteration: trees.len(),
        trees,
        learning_rate: 0.5,
        base_score: 0.3,
        n_features: d,
        train_loss: vec![],
        val_loss: vec![],
    }
}

pub fn random_rows(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..n).map(|_| (0..d).map(|_| r.random_range(0.0..1.0)).collect()).collect()
}
