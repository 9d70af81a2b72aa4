use super::{check_dims, check_training_data, AdditiveModel};
use crate::error::{Error, Result};
use crate::scalar::{sigmoid, softplus, Real};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbdtConfig {
    pub max_rounds: usize,
    pub early_stopping_rounds: usize,
    pub depth: usize,
    pub learning_rate: f64,
    pub l2_leaf: f64,
    pub seed: u64,
    pub inner_val_fraction: f64,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        GbdtConfig {
            max_rounds: 500,
            early_stopping_rounds: 20,
            depth: 4,
            learning_rate: 0.1,
            l2_leaf: 3.0,
            seed: 0,
            inner_val_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", bound = "T: Real")]
pub enum Node<T> {
    /// Samples with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: T, left: Box<Node<T>>, right: Box<Node<T>> },
    Leaf { value: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Tree<T> {
    pub root: Node<T>,
}

impl<T: Real> Tree<T> {
    pub fn predict(&self, x: &[T]) -> T {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { value } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Sorted distinct split features.
    pub fn features(&self) -> Vec<usize> {
        fn walk<T>(n: &Node<T>, out: &mut Vec<usize>) {
            if let Node::Split { feature, left, right, .. } = n {
                out.push(*feature);
                walk(left, out);
                walk(right, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn scale_leaves(&mut self, c: T) {
        fn walk<T: Real>(n: &mut Node<T>, c: T) {
            match n {
                Node::Leaf { value } => *value = *value * c,
                Node::Split { left, right, .. } => {
                    walk(left, c);
                    walk(right, c);
                }
            }
        }
        walk(&mut self.root, c);
    }
}

/// Boosted ensemble. Only the first `best_iteration` trees take part in prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GbdtModel<T> {
    pub trees: Vec<Tree<T>>,
    pub learning_rate: T,
    pub base_score: T,
    pub best_iteration: usize,
    pub n_features: usize,
    /// Mean training log-loss after 0, 1, ... trees.
    pub train_loss: Vec<T>,
    /// Mean validation log-loss after 0, 1, ... trees, when a validation set was given.
    pub val_loss: Vec<T>,
}

impl<T: Real> GbdtModel<T> {
    /// Copy holding exactly the trees used for prediction.
    pub fn truncated(&self) -> GbdtModel<T> {
        let mut m = self.clone();
        m.trees.truncate(self.best_iteration);
        m
    }

    pub fn rounds_trained(&self) -> usize {
        self.trees.len()
    }
}

impl<T: Real> AdditiveModel<T> for GbdtModel<T> {
    fn n_features(&self) -> usize {
        self.n_features
    }
    fn offset(&self) -> T {
        self.base_score
    }
    fn n_parts(&self) -> usize {
        self.best_iteration.min(self.trees.len())
    }
    fn part_features(&self, k: usize) -> Vec<usize> {
        self.trees[k].features()
    }
    fn part_value(&self, k: usize, x: &[T]) -> T {
        self.learning_rate * self.trees[k].predict(x)
    }
}

fn point_loss<T: Real>(f: T, y: u8) -> T {
    softplus(f) - if y == 1 { f } else { T::zero() }
}

/// Mean logistic loss of raw scores.
pub fn log_loss<T: Real>(raw: &[T], y: &[u8]) -> T {
    let total = raw.iter().zip(y).fold(T::zero(), |acc, (f, t)| acc + point_loss(*f, *t));
    total / T::from_usize_exact(raw.len().max(1))
}

/// Per class, a seeded shuffle moves `round(fraction · n_class)` rows (at least one,
/// at most `n_class − 1`) to validation. Both index lists come back sorted.
pub fn stratified_split(y: &[u8], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        let n = idx.len();
        let k = if n < 2 { 0 } else { ((fraction * n as f64).round() as usize).clamp(1, n - 1) };
        val.extend_from_slice(&idx[..k]);
        train.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

struct Grower<'a, T> {
    x: &'a [Vec<T>],
    y: &'a [u8],
    raw: &'a [T],
    grad: Vec<T>,
    hess: Vec<T>,
    depth: usize,
    lambda: T,
    lr: T,
}

impl<T: Real> Grower<'_, T> {
    fn score(&self, g: T, h: T) -> T {
        g * g / (h + self.lambda)
    }

    fn grow(&self, idx: &[usize], depth: usize) -> Node<T> {
        let (g, h) = idx.iter().fold((T::zero(), T::zero()), |(g, h), &i| (g + self.grad[i], h + self.hess[i]));
        if depth >= self.depth || idx.len() < 2 {
            return self.leaf(idx, g, h);
        }
        let parent = self.score(g, h);
        let d = self.x[idx[0]].len();
        let mut best: Option<(T, usize, T)> = None;
        let mut order = idx.to_vec();
        for j in 0..d {
            order.sort_by(|&a, &b| self.x[a][j].partial_cmp(&self.x[b][j]).expect("finite features"));
            let (mut gl, mut hl) = (T::zero(), T::zero());
            for w in 0..order.len() - 1 {
                let i = order[w];
                gl += self.grad[i];
                hl += self.hess[i];
                let (a, b) = (self.x[i][j], self.x[order[w + 1]][j]);
                if a == b {
                    continue;
                }
                let gain = self.score(gl, hl) + self.score(g - gl, h - hl) - parent;
                let better = match best {
                    None => gain >= T::zero(),
                    Some((bg, _, _)) => gain > bg,
                };
                if better {
                    best = Some((gain, j, (a + b) * T::lit(0.5)));
                }
            }
        }
        match best {
            None => self.leaf(idx, g, h),
            Some((_, feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
                Node::Split {
                    feature,
                    threshold,
                    left: Box::new(self.grow(&l, depth + 1)),
                    right: Box::new(self.grow(&r, depth + 1)),
                }
            }
        }
    }

    /// Newton leaf weight, halved until the leaf's own training loss does not rise.
    fn leaf(&self, idx: &[usize], g: T, h: T) -> Node<T> {
        let mut value = -g / (h + self.lambda);
        let before = idx.iter().fold(T::zero(), |acc, &i| acc + point_loss(self.raw[i], self.y[i]));
        for _ in 0..60 {
            let after =
                idx.iter().fold(T::zero(), |acc, &i| acc + point_loss(self.raw[i] + self.lr * value, self.y[i]));
            if after <= before {
                return Node::Leaf { value };
            }
            value = value * T::lit(0.5);
        }
        Node::Leaf { value: T::zero() }
    }
}

/// Trains on logistic loss. With a validation set, stops after
/// `early_stopping_rounds` rounds without a validation loss at or below the best so
/// far, and `best_iteration` is the last round reaching that best.
pub fn train_gbdt<T: Real>(
    x: &[Vec<T>],
    y: &[u8],
    cfg: &GbdtConfig,
    validation: Option<(&[Vec<T>], &[u8])>,
) -> Result<GbdtModel<T>> {
    let d = check_training_data(x, y)?;
    if let Some((xv, yv)) = validation {
        check_dims(xv, d)?;
        if xv.len() != yv.len() || xv.is_empty() {
            return Err(Error::MalformedInput("validation rows and labels differ or are empty".into()));
        }
    }
    let n = T::from_usize_exact(y.len());
    let pos = T::from_usize_exact(y.iter().filter(|v| **v == 1).count());
    let base = (pos / (n - pos)).ln();
    let lr = T::lit(cfg.learning_rate);
    let mut raw = vec![base; x.len()];
    let mut val_raw = validation.map(|(xv, _)| vec![base; xv.len()]).unwrap_or_default();
    let mut trees: Vec<Tree<T>> = Vec::new();
    let mut train_loss = vec![log_loss(&raw, y)];
    let mut val_loss = Vec::new();
    let mut best_iteration = 0;
    if let Some((_, yv)) = validation {
        val_loss.push(log_loss(&val_raw, yv));
    }
    let all: Vec<usize> = (0..x.len()).collect();
    for round in 1..=cfg.max_rounds {
        let p: Vec<T> = raw.iter().map(|f| sigmoid(*f)).collect();
        let grower = Grower {
            x,
            y,
            raw: &raw,
            grad: p.iter().zip(y).map(|(p, t)| *p - T::lit(f64::from(*t))).collect(),
            hess: p.iter().map(|p| *p * (T::one() - *p)).collect(),
            depth: cfg.depth,
            lambda: T::lit(cfg.l2_leaf),
            lr,
        };
        let mut tree = Tree { root: grower.grow(&all, 0) };
        let prev = *train_loss.last().expect("initial loss");
        let mut next: Vec<T>;
        let mut attempts = 0;
        loop {
            next = raw.iter().zip(x).map(|(f, row)| *f + lr * tree.predict(row)).collect();
            if log_loss(&next, y) <= prev || attempts == 60 {
                break;
            }
            tree.scale_leaves(T::lit(0.5));
            attempts += 1;
        }
        if attempts == 60 {
            tree.scale_leaves(T::zero());
            next = raw.iter().zip(x).map(|(f, row)| *f + lr * tree.predict(row)).collect();
        }
        raw = next;
        train_loss.push(log_loss(&raw, y));
        match validation {
            Some((xv, yv)) => {
                for (f, row) in val_raw.iter_mut().zip(xv) {
                    *f += lr * tree.predict(row);
                }
                let loss = log_loss(&val_raw, yv);
                let best = val_loss[best_iteration];
                val_loss.push(loss);
                trees.push(tree);
                if loss <= best {
                    best_iteration = round;
                } else if round - best_iteration >= cfg.early_stopping_rounds {
                    break;
                }
            }
            None => {
                trees.push(tree);
                best_iteration = round;
            }
        }
    }
    Ok(GbdtModel { trees, learning_rate: lr, base_score: base, best_iteration, n_features: d, train_loss, val_loss })
}
