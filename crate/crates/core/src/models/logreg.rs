use super::{check_training_data, AdditiveModel};
use crate::error::Result;
use crate::scalar::{sigmoid, softplus, Real};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRegConfig {
    /// Penalty `l2/2 · ‖w‖²` on the weights; the bias is not penalized.
    pub l2: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig { l2: 1.0, max_iters: 10_000, grad_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LogRegModel<T> {
    pub weights: Vec<T>,
    pub bias: T,
    pub l2: T,
    pub n_iters: usize,
}

/// Summed negative log-likelihood plus the weight penalty, with its gradient
/// `(∂w, ∂b)`.
pub fn logreg_objective<T: Real>(w: &[T], b: T, x: &[Vec<T>], y: &[u8], l2: T) -> (T, Vec<T>, T) {
    let half = T::lit(0.5);
    let mut loss = half * l2 * w.iter().map(|v| *v * *v).sum::<T>();
    let mut gw: Vec<T> = w.iter().map(|v| l2 * *v).collect();
    let mut gb = T::zero();
    for (row, &label) in x.iter().zip(y) {
        let z = row.iter().zip(w).fold(b, |acc, (a, c)| acc + *a * *c);
        let t = T::lit(f64::from(label));
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, v) in gw.iter_mut().zip(row) {
            *g += r * *v;
        }
        gb += r;
    }
    (loss, gw, gb)
}

/// Full-batch gradient descent with Armijo backtracking. The step doubles after each
/// accepted move.
pub fn train_logreg<T: Real>(x: &[Vec<T>], y: &[u8], cfg: &LogRegConfig) -> Result<LogRegModel<T>> {
    let d = check_training_data(x, y)?;
    let l2 = T::lit(cfg.l2);
    let tol = T::lit(cfg.grad_tol);
    let armijo = T::lit(1e-4);
    let mut w = vec![T::zero(); d];
    let mut b = T::zero();
    let mut step = T::one();
    let (mut loss, mut gw, mut gb) = logreg_objective(&w, b, x, y, l2);
    let mut iters = 0;
    while iters < cfg.max_iters {
        let gnorm_inf = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if gnorm_inf <= tol {
            break;
        }
        let gsq = gw.iter().map(|g| *g * *g).sum::<T>() + gb * gb;
        iters += 1;
        let mut accepted = false;
        for _ in 0..60 {
            let w_new: Vec<T> = w.iter().zip(&gw).map(|(a, g)| *a - step * *g).collect();
            let b_new = b - step * gb;
            let (l_new, gw_new, gb_new) = logreg_objective(&w_new, b_new, x, y, l2);
            if l_new <= loss - armijo * step * gsq {
                w = w_new;
                b = b_new;
                loss = l_new;
                gw = gw_new;
                gb = gb_new;
                step = step + step;
                accepted = true;
                break;
            }
            step = step * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    Ok(LogRegModel { weights: w, bias: b, l2, n_iters: iters })
}

impl<T: Real> LogRegModel<T> {
    pub fn decision(&self, x: &[T]) -> T {
        self.raw_score(x)
    }
}

impl<T: Real> AdditiveModel<T> for LogRegModel<T> {
    fn n_features(&self) -> usize {
        self.weights.len()
    }
    fn offset(&self) -> T {
        self.bias
    }
    fn n_parts(&self) -> usize {
        self.weights.len()
    }
    fn part_features(&self, k: usize) -> Vec<usize> {
        vec![k]
    }
    fn part_value(&self, k: usize, x: &[T]) -> T {
        self.weights[k] * x[k]
    }
}
