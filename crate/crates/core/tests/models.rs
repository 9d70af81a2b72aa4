mod common;

use inkage::models::{
    load_model, log_loss, logreg_objective, predict_proba, save_model, stratified_split, train_gbdt, train_logreg,
    AdditiveModel, GbdtConfig, GbdtModel, LogRegConfig, LogRegModel, Model,
};
use inkage::Error;
use proptest::prelude::*;
use rand::Rng;

fn random_data(seed: u64, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut r = common::rng(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.random_range(0.0..1.0)).collect()).collect();
    let y = x
        .iter()
        .map(|row| u8::from(row.iter().sum::<f64>() + r.random_range(-0.4..0.4) > d as f64 / 2.0))
        .collect();
    (x, y)
}

fn accuracy(p: &[f64], y: &[u8]) -> f64 {
    p.iter().zip(y).filter(|(p, y)| u8::from(**p >= 0.5) == **y).count() as f64 / y.len() as f64
}

#[test]
fn separable_one_dimensional_data() {
    let x: Vec<Vec<f64>> = (0..20).map(|i| vec![if i % 2 == 0 { 0.1 } else { 0.9 }]).collect();
    let y: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
    let m = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
    assert_eq!(accuracy(&predict_proba(&m, &x).unwrap(), &y), 1.0);
}

#[test]
fn gradient_matches_central_differences() {
    let h = 1e-5;
    for seed in 0..20 {
        let (x, y) = random_data(seed, 30, 5);
        let mut r = common::rng(seed + 100);
        let w: Vec<f64> = (0..5).map(|_| r.random_range(-2.0..2.0)).collect();
        let b = r.random_range(-1.0..1.0);
        let (_, gw, gb) = logreg_objective(&w, b, &x, &y, 1.0);
        let rel = |num: f64, ana: f64| (num - ana).abs() / ana.abs().max(1e-8);
        for j in 0..5 {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[j] += h;
            wm[j] -= h;
            let num = (logreg_objective(&wp, b, &x, &y, 1.0).0 - logreg_objective(&wm, b, &x, &y, 1.0).0) / (2.0 * h);
            assert!(rel(num, gw[j]) <= 1e-5, "seed {seed} w{j}: {num} vs {}", gw[j]);
        }
        let num = (logreg_objective(&w, b + h, &x, &y, 1.0).0 - logreg_objective(&w, b - h, &x, &y, 1.0).0) / (2.0 * h);
        assert!(rel(num, gb) <= 1e-5);
    }
}

#[test]
fn zero_features_give_class_balance_intercept() {
    let x = vec![vec![0.0f64, 0.0]; 40];
    let y: Vec<u8> = (0..40).map(|i| u8::from(i < 30)).collect();
    let m = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
    assert!(m.weights.iter().all(|w| w.abs() < 1e-9));
    assert!((m.bias - (30.0f64 / 10.0).ln()).abs() < 1e-6);
}

#[test]
fn logreg_final_loss_beats_random_weights() {
    let (x, y) = random_data(7, 40, 6);
    let m = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
    let best = logreg_objective(&m.weights, m.bias, &x, &y, 1.0).0;
    let mut r = common::rng(8);
    for _ in 0..100 {
        let w: Vec<f64> = (0..6).map(|_| r.random_range(-5.0..5.0)).collect();
        let b = r.random_range(-3.0..3.0);
        assert!(best <= logreg_objective(&w, b, &x, &y, 1.0).0 + 1e-12);
    }
}

#[test]
fn permuting_columns_permutes_weights() {
    let (x, y) = random_data(3, 40, 5);
    let perm = [3, 0, 4, 1, 2];
    let xp: Vec<Vec<f64>> = x.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
    let a = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
    let b = train_logreg(&xp, &y, &LogRegConfig::default()).unwrap();
    for (k, &j) in perm.iter().enumerate() {
        assert!((b.weights[k] - a.weights[j]).abs() < 1e-9);
    }
    let pa = predict_proba(&a, &x).unwrap();
    let pb = predict_proba(&b, &xp).unwrap();
    for (u, v) in pa.iter().zip(&pb) {
        assert!((u - v).abs() < 1e-12);
    }
}

#[test]
fn xor_is_learned_by_shallow_trees() {
    let corners = [([0.0, 0.0], 0u8), ([1.0, 1.0], 0), ([0.0, 1.0], 1), ([1.0, 0.0], 1)];
    let x: Vec<Vec<f64>> = corners.iter().cycle().take(20).map(|c| c.0.to_vec()).collect();
    let y: Vec<u8> = corners.iter().cycle().take(20).map(|c| c.1).collect();
    let cfg = GbdtConfig { depth: 2, max_rounds: 50, ..GbdtConfig::default() };
    let m = train_gbdt(&x, &y, &cfg, None).unwrap();
    assert!(m.rounds_trained() <= 50);
    assert_eq!(accuracy(&predict_proba(&m, &x).unwrap(), &y), 1.0);
}

#[test]
fn validation_equal_to_training_keeps_every_round() {
    let (x, y) = random_data(11, 40, 4);
    let cfg = GbdtConfig { max_rounds: 60, ..GbdtConfig::default() };
    let m = train_gbdt(&x, &y, &cfg, Some((&x, &y))).unwrap();
    assert_eq!(m.best_iteration, m.rounds_trained());
}

#[test]
fn untrained_models_predict_their_offset() {
    let lr = LogRegModel { weights: vec![0.0; 3], bias: 0.0, l2: 1.0, n_iters: 0 };
    assert_eq!(predict_proba(&lr, &[vec![5.0, -2.0, 1.0]]).unwrap(), vec![0.5]);
    let g = GbdtModel::<f64> {
        trees: vec![],
        learning_rate: 0.1,
        base_score: 0.7,
        best_iteration: 0,
        n_features: 2,
        train_loss: vec![],
        val_loss: vec![],
    };
    let p = predict_proba(&g, &[vec![1.0, 2.0]]).unwrap()[0];
    assert_eq!(p, 1.0 / (1.0 + (-0.7f64).exp()));
}

#[test]
fn early_stopped_model_equals_its_truncation() {
    let (x, y) = random_data(5, 40, 4);
    let (tr, va) = stratified_split(&y, 0.2, 9);
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<u8>) { (idx.iter().map(|&i| x[i].clone()).collect(), idx.iter().map(|&i| y[i]).collect()) };
    let (xt, yt) = pick(&tr);
    let (xv, yv) = pick(&va);
    let m = train_gbdt(&xt, &yt, &GbdtConfig::default(), Some((&xv, &yv))).unwrap();
    let t = m.truncated();
    assert_eq!(t.trees.len(), m.best_iteration);
    for row in &x {
        assert!((m.raw_score(row) - t.raw_score(row)).abs() <= 1e-15);
    }
}

#[test]
fn stratified_split_keeps_both_classes() {
    let y: Vec<u8> = (0..39).map(|i| u8::from(i < 19)).collect();
    let (tr, va) = stratified_split(&y, 0.2, 1);
    assert_eq!(tr.len() + va.len(), 39);
    assert_eq!(va.iter().filter(|&&i| y[i] == 1).count(), 4);
    assert_eq!(va.iter().filter(|&&i| y[i] == 0).count(), 4);
    assert_eq!(stratified_split(&y, 0.2, 1), (tr, va));
}

#[test]
fn training_is_deterministic() {
    let (x, y) = random_data(21, 40, 5);
    let a = train_gbdt(&x, &y, &GbdtConfig::default(), None).unwrap();
    let b = train_gbdt(&x, &y, &GbdtConfig::default(), None).unwrap();
    assert_eq!(a, b);
    let c = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
    assert_eq!(c, train_logreg(&x, &y, &LogRegConfig::default()).unwrap());
}

#[test]
fn saved_models_round_trip() {
    let (x, y) = random_data(4, 40, 3);
    let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    for model in [
        Model::LogReg(train_logreg(&x, &y, &LogRegConfig::default()).unwrap()),
        Model::Gbdt(train_gbdt(&x, &y, &GbdtConfig { max_rounds: 40, ..GbdtConfig::default() }, None).unwrap()),
    ] {
        let mut buf = Vec::new();
        save_model(&model, &names, &mut buf).unwrap();
        let loaded = load_model::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(loaded.feature_names, names);
        for row in &x {
            assert!((loaded.model.raw_score(row) - model.raw_score(row)).abs() <= 1e-15);
        }
    }
}

#[test]
fn unknown_model_version_is_rejected() {
    let json = r#"{"version": 99, "feature_names": [], "model": {"kind": "logreg", "weights": [], "bias": 0.0, "l2": 1.0, "n_iters": 0}}"#;
    assert!(matches!(load_model::<f64, _>(json.as_bytes()), Err(Error::UnsupportedVersion(99))));
}

#[test]
fn single_class_training_is_rejected() {
    let x = vec![vec![0.0f64]; 5];
    let y = vec![1u8; 5];
    assert!(matches!(train_logreg(&x, &y, &LogRegConfig::default()), Err(Error::SingleClassInput)));
    assert!(matches!(train_gbdt(&x, &y, &GbdtConfig::default(), None), Err(Error::SingleClassInput)));
}

#[test]
fn works_in_single_precision() {
    let (x, y) = random_data(2, 30, 3);
    let xf: Vec<Vec<f32>> = x.iter().map(|r| r.iter().map(|&v| v as f32).collect()).collect();
    let m = train_gbdt(&xf, &y, &GbdtConfig { max_rounds: 30, ..GbdtConfig::default() }, None).unwrap();
    assert!(m.train_loss.windows(2).all(|w| w[1] <= w[0]));
    let lr = train_logreg(&xf, &y, &LogRegConfig::default()).unwrap();
    assert!(lr.weights.iter().all(|w| w.is_finite()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn boosting_never_increases_training_loss(seed in 0u64..10_000, n in 8usize..40, d in 1usize..5) {
        let (x, mut y) = random_data(seed, n, d);
        y[0] = 0;
        y[1] = 1;
        let cfg = GbdtConfig { max_rounds: 40, ..GbdtConfig::default() };
        let m = train_gbdt(&x, &y, &cfg, None).unwrap();
        for w in m.train_loss.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        let raw: Vec<f64> = x.iter().map(|r| m.raw_score(r)).collect();
        let last = *m.train_loss.last().unwrap();
        prop_assert!((log_loss(&raw, &y) - last).abs() < 1e-12);
    }
}
