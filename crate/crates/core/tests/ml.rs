//! Model and selector checks against independent oracles.

use cogspeech::featureset::Dataset;
use cogspeech::fixtures::blobs;
use cogspeech::ml::forest::fit_tree;
use cogspeech::ml::*;
use cogspeech::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// F from the total = between + within decomposition, computed per class
/// with plain loops.
fn anova_oracle(x: &[Vec<f64>], y: &[u8], j: usize) -> f64 {
    let col: Vec<f64> = x.iter().map(|r| r[j]).collect();
    let n = col.len() as f64;
    let grand = col.iter().sum::<f64>() / n;
    let total: f64 = col.iter().map(|v| (v - grand).powi(2)).sum();
    let mut within = 0.0;
    for c in [0u8, 1] {
        let g: Vec<f64> = col.iter().zip(y).filter(|(_, &l)| l == c).map(|(v, _)| *v).collect();
        let m = g.iter().sum::<f64>() / g.len() as f64;
        within += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    let between = total - within;
    between / (within / (n - 2.0))
}

#[test]
fn anova_matches_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let x = random_matrix(&mut rng, 20, 5);
        let y: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
        let f = anova_f_classif(&x, &y).unwrap();
        for j in 0..5 {
            assert!(close(f[j], anova_oracle(&x, &y, j), 1e-9), "{} vs {}", f[j], anova_oracle(&x, &y, j));
        }
    }
}

#[test]
fn anova_argmax_is_affine_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let x = random_matrix(&mut rng, 30, 8);
        let y: Vec<u8> = (0..30).map(|i| (i % 2) as u8).collect();
        let (a, b, col) = (rng.gen_range(0.1..10.0), rng.gen_range(-5.0..5.0), rng.gen_range(0..8));
        let scaled: Vec<Vec<f64>> = x
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r[col] = a * r[col] + b;
                r
            })
            .collect();
        let top = |m: &[Vec<f64>]| select_top_k(&anova_f_classif(m, &y).unwrap(), 1).unwrap();
        assert_eq!(top(&x), top(&scaled));
    }
}

fn pearson_oracle(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let saa: f64 = a.iter().map(|x| x * x).sum();
    let sbb: f64 = b.iter().map(|x| x * x).sum();
    (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt())
}

#[test]
fn regression_f_matches_oracle() {
    let r: f64 = 0.5;
    assert!(close(r * r / (1.0 - r * r) * 45.0, 15.0, 1e-12));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let x = random_matrix(&mut rng, 25, 4);
        let t: Vec<f64> = (0..25).map(|_| rng.gen_range(0.0..30.0)).collect();
        let f = f_regression_scores(&x, &t).unwrap();
        for j in 0..4 {
            let col: Vec<f64> = x.iter().map(|r| r[j]).collect();
            let r = pearson_oracle(&col, &t);
            assert!(close(f[j], r * r / (1.0 - r * r) * 23.0, 1e-9));
        }
    }
    let constant = vec![vec![1.0]; 5];
    assert_eq!(f_regression_scores(&constant, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), vec![0.0]);
}

proptest! {
    #[test]
    fn top_k_matches_sort_oracle(scores in prop::collection::vec(-100i32..100, 1..40), k_frac in 0.0f64..1.0) {
        let scores: Vec<f64> = scores.into_iter().map(f64::from).collect();
        let k = ((scores.len() as f64 * k_frac) as usize).max(1);
        let mut oracle: Vec<(f64, usize)> = scores.iter().copied().zip(0..).collect();
        oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let want: Vec<usize> = oracle.iter().take(k).map(|p| p.1).collect();
        prop_assert_eq!(select_top_k(&scores, k).unwrap(), want);
    }

    #[test]
    fn ridge_shrinks_with_alpha(seed in 0u64..1000, a1 in 0.01f64..50.0, extra in 0.01f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(&mut rng, 20, 4);
        let y: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..30.0)).collect();
        let norm = |a: f64| LinearModel::fit(&x, &y, a).unwrap().weights.iter().map(|w| w * w).sum::<f64>();
        prop_assert!(norm(a1) >= norm(a1 + extra) - 1e-12);
    }
}

#[test]
fn top_k_identity_and_range() {
    let s = [0.5, 2.0, 1.0];
    let mut all = select_top_k(&s, 3).unwrap();
    all.sort_unstable();
    assert_eq!(all, vec![0, 1, 2]);
    assert!(matches!(select_top_k(&s, 4), Err(Error::InvalidArgument(_))));
}

#[test]
fn naive_bayes_four_points_by_hand() {
    let x = vec![vec![0.0], vec![2.0], vec![4.0], vec![6.0]];
    let y = [0, 0, 1, 1];
    let nb = GaussianNb::fit(&x, &y, 1e-10, [0.5, 0.5]).unwrap();
    // overall variance of {0,2,4,6} is 5; each class has variance 1
    let eps = 1e-10 * 5.0;
    assert_eq!(nb.epsilon, eps);
    let var = 1.0 + eps;
    let density = |x: f64, m: f64| (-(x - m) * (x - m) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
    for q in [2.0, 3.0, 3.7, -1.0] {
        let (p0, p1) = (0.5 * density(q, 1.0), 0.5 * density(q, 5.0));
        let post = nb.predict_proba(&[q]);
        assert!(close(post[1], p1 / (p0 + p1), 1e-12), "{q}: {post:?}");
        assert!((post[0] + post[1] - 1.0).abs() <= 1e-12);
    }
    assert_eq!(nb.predict_proba(&[3.0]), [0.5, 0.5]);
}

#[test]
fn naive_bayes_separates_blobs() {
    let (x, y) = blobs(60, 3, 6.0, 1);
    let nb = GaussianNb::fit(&x, &y, 1e-10, [0.5, 0.5]).unwrap();
    assert!(x.iter().zip(&y).all(|(r, &l)| nb.predict(r) == l));
    for r in &x {
        let p = nb.predict_proba(r);
        assert!((p[0] + p[1] - 1.0).abs() <= 1e-12);
    }
}

/// Accelerated projected gradient on the SVM dual. The projection onto
/// `{0 <= a <= C, y'a = 0}` bisects on the hyperplane multiplier.
fn dual_oracle(k: &[Vec<f64>], y: &[f64], c: f64) -> f64 {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];
    let lip: f64 = (0..n).map(|i| (0..n).map(|j| q(i, j).abs()).sum::<f64>()).fold(0.0, f64::max);
    let project = |v: &[f64]| -> Vec<f64> {
        let at = |lam: f64| -> Vec<f64> { (0..n).map(|i| (v[i] - lam * y[i]).clamp(0.0, c)).collect() };
        let g = |lam: f64| at(lam).iter().zip(y).map(|(a, y)| a * y).sum::<f64>();
        let (mut lo, mut hi) = (-1e6, 1e6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi))
    };
    let obj = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += 0.5 * a[i] * a[j] * q(i, j);
            }
        }
        s - a.iter().sum::<f64>()
    };
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t: f64 = 1.0;
    for _ in 0..20_000 {
        let grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q(i, j) * z[j]).sum::<f64>() - 1.0).collect();
        let step: Vec<f64> = (0..n).map(|i| z[i] - grad[i] / lip).collect();
        let next = project(&step);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = (0..n).map(|i| next[i] + (t - 1.0) / t_next * (next[i] - a[i])).collect();
        a = next;
        t = t_next;
    }
    obj(&a)
}

#[test]
fn svm_two_points() {
    let x = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
    let p = SvmParams::default();
    let (m, dual) = SvmModel::fit_with_dual(&x, &[0, 1], &p).unwrap();
    assert_eq!(m.predict(&x[0]), 0);
    assert_eq!(m.predict(&x[1]), 1);
    assert!(dual.alpha.iter().all(|&a| (0.0..=p.c).contains(&a)));
    let s: f64 = dual.alpha.iter().zip(&dual.y).map(|(a, y)| a * y).sum();
    assert!(s.abs() < 1e-12);
}

#[test]
fn svm_xor() {
    let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
    let y = [0, 0, 1, 1];
    let p = SvmParams {
        gamma: 10.0,
        ..Default::default()
    };
    let m = SvmModel::fit(&x, &y, &p).unwrap();
    assert!(x.iter().zip(&y).all(|(r, &l)| m.predict(r) == l));
}

#[test]
fn svm_blobs_match_dual_oracle() {
    for seed in 0..3 {
        let (x, y) = blobs(40, 2, 3.0, seed);
        let p = SvmParams {
            c: 10.0,
            gamma: 0.5,
            ..Default::default()
        };
        let (m, dual) = SvmModel::fit_with_dual(&x, &y, &p).unwrap();
        assert!(dual.kkt_gap(p.c) < p.tolerance);
        let acc = x.iter().zip(&y).filter(|(r, &l)| m.predict(r) == l).count() as f64 / 40.0;
        assert_eq!(acc, 1.0);
        let signed: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let oracle = dual_oracle(&kernel_matrix(&x, p.gamma), &signed, p.c);
        assert!(
            (dual.objective() - oracle).abs() <= 1e-3 * oracle.abs().max(1.0),
            "smo {} vs oracle {oracle}",
            dual.objective()
        );
    }
}

#[test]
fn svm_kkt_on_noisy_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = random_matrix(&mut rng, 60, 5);
    let y: Vec<u8> = (0..60).map(|i| (i % 2) as u8).collect();
    let p = SvmParams::default();
    let (_, dual) = SvmModel::fit_with_dual(&x, &y, &p).unwrap();
    assert!(dual.kkt_gap(p.c) < p.tolerance);
    assert!(dual.alpha.iter().all(|&a| (0.0..=p.c).contains(&a)));
}

#[test]
fn tree_recovers_threshold() {
    let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
    let y: Vec<u8> = (0..20).map(|i| u8::from(i >= 10)).collect();
    let params = ForestParams {
        bootstrap: false,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let rows: Vec<usize> = (0..20).collect();
    assert_eq!(fit_tree(&x, &y, &rows, &params, &mut rng).root_split(), Some((0, 9.5)));
    let forest = RandomForest::fit(&x, &y, &params, 4).unwrap();
    assert_eq!(forest.trees[0].root_split(), Some((0, 9.5)));

    // with bootstrap the root split still separates the classes
    let forest = RandomForest::fit(&x, &y, &ForestParams::default(), 4).unwrap();
    let (_, t) = forest.trees[0].root_split().unwrap();
    assert!((8.0..10.0).contains(&t), "{t}");
}

#[test]
fn forest_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let base = random_matrix(&mut rng, 15, 4);
    let x: Vec<Vec<f64>> = base.iter().chain(&base).cloned().collect();
    let y: Vec<u8> = (0..30).map(|i| ((i % 15) % 2) as u8).collect();
    let a = RandomForest::fit(&x, &y, &ForestParams::default(), 17).unwrap();
    let b = RandomForest::fit(&x, &y, &ForestParams::default(), 17).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.oob_predictions, b.oob_predictions);
    assert_eq!(a.trees.len(), 200);
}

#[test]
fn forest_fits_blobs() {
    let (x, y) = blobs(60, 4, 3.0, 3);
    let f = RandomForest::fit(&x, &y, &ForestParams::default(), 0).unwrap();
    let acc = x.iter().zip(&y).filter(|(r, &l)| f.predict(r) == l).count() as f64 / 60.0;
    assert!(acc >= 0.95, "{acc}");
    assert!(f.oob_accuracy(&y).unwrap() > 0.8);
}

#[test]
fn mlp_gradient_matches_finite_differences() {
    let net = Mlp::new(4, &[10, 10], 2, 1e-2, 3);
    let x = vec![vec![0.3, -1.2, 0.8, 0.1], vec![-0.5, 0.4, 1.5, -0.9], vec![1.1, 0.2, -0.3, 0.7]];
    let y = [0, 1, 1];
    let (_, grad) = net.loss_and_gradient(&x, &y);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for k in 0..net.params.len() {
        let mut plus = net.clone();
        plus.params[k] += h;
        let mut minus = net.clone();
        minus.params[k] -= h;
        let fd = (plus.loss_and_gradient(&x, &y).0 - minus.loss_and_gradient(&x, &y).0) / (2.0 * h);
        let denom = fd.abs().max(grad[k].abs());
        if denom > 1e-7 {
            worst = worst.max((fd - grad[k]).abs() / denom);
        }
    }
    assert!(worst < 1e-4, "max relative error {worst}");
}

#[test]
fn mlp_learns_separable_data_deterministically() {
    let (raw, y) = blobs(80, 5, 3.0, 4);
    // the pipeline standardizes before the network sees the data
    let s = Standardizer::fit(&raw);
    let x: Vec<Vec<f64>> = raw.iter().map(|r| s.apply(r)).collect();
    let (a, history) = Mlp::fit(&x, &y, &MlpParams::default(), 1).unwrap();
    let (b, _) = Mlp::fit(&x, &y, &MlpParams::default(), 1).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(history.len(), 200);
    assert!(history.last() < history.first());
    let acc = x.iter().zip(&y).filter(|(r, &l)| a.predict(r) == l).count() as f64 / 80.0;
    assert!(acc >= 0.99, "{acc}");
}

/// Least squares through modified Gram-Schmidt QR on `[1, X]`.
fn ols_oracle(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let n = x.len();
    let d = x[0].len() + 1;
    let mut cols: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..n).map(|i| if j == 0 { 1.0 } else { x[i][j - 1] }).collect())
        .collect();
    let mut r = vec![vec![0.0; d]; d];
    for j in 0..d {
        for k in 0..j {
            let dot: f64 = (0..n).map(|i| cols[k][i] * cols[j][i]).sum();
            r[k][j] = dot;
            for i in 0..n {
                cols[j][i] -= dot * cols[k][i];
            }
        }
        let norm = (0..n).map(|i| cols[j][i] * cols[j][i]).sum::<f64>().sqrt();
        r[j][j] = norm;
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    let qty: Vec<f64> = (0..d).map(|j| (0..n).map(|i| cols[j][i] * y[i]).sum()).collect();
    let mut beta = vec![0.0; d];
    for j in (0..d).rev() {
        let s: f64 = (j + 1..d).map(|k| r[j][k] * beta[k]).sum();
        beta[j] = (qty[j] - s) / r[j][j];
    }
    (beta[1..].to_vec(), beta[0])
}

/// Plain gradient descent on the ridge objective with the intercept free.
fn ridge_gd_oracle(x: &[Vec<f64>], y: &[f64], alpha: f64) -> (Vec<f64>, f64) {
    let n = x.len();
    let d = x[0].len();
    let (mut w, mut b) = (vec![0.0; d], 0.0);
    let step = 1.0 / (n as f64 * 9.0 * d as f64 + alpha);
    for _ in 0..200_000 {
        let mut gw: Vec<f64> = w.iter().map(|v| alpha * v).collect();
        let mut gb = 0.0;
        for (row, t) in x.iter().zip(y) {
            let r = b + row.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() - t;
            gb += r;
            for j in 0..d {
                gw[j] += r * row[j];
            }
        }
        b -= step * gb;
        for j in 0..d {
            w[j] -= step * gw[j];
        }
    }
    (w, b)
}

#[test]
fn ridge_and_ols_match_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let x = random_matrix(&mut rng, 30, 5);
    let y: Vec<f64> = x.iter().map(|r| 15.0 + r.iter().sum::<f64>() + rng.gen_range(-1.0..1.0)).collect();
    let ols = LinearModel::fit(&x, &y, 0.0).unwrap();
    let (w, b) = ols_oracle(&x, &y);
    for j in 0..5 {
        assert!((ols.weights[j] - w[j]).abs() < 1e-8);
    }
    assert!((ols.intercept - b).abs() < 1e-8);

    let ridge = LinearModel::fit(&x, &y, 10.0).unwrap();
    let (w, b) = ridge_gd_oracle(&x, &y, 10.0);
    for j in 0..5 {
        assert!((ridge.weights[j] - w[j]).abs() < 1e-6, "{} vs {}", ridge.weights[j], w[j]);
    }
    assert!((ridge.intercept - b).abs() < 1e-6);
    assert!(x.iter().all(|r| (0.0..=30.0).contains(&ridge.predict_clipped(r))));
}

#[test]
fn ols_on_collinear_columns_suggests_ridge() {
    let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
    let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let err = LinearModel::fit(&x, &y, 0.0).unwrap_err();
    assert!(err.to_string().contains("ridge"), "{err}");
}

fn small_dataset() -> Dataset {
    let (x, y) = blobs(30, 6, 2.5, 8);
    let names: Vec<String> = (0..6).map(|j| format!("f{j}")).collect();
    let mut d = Dataset::new(names, "h");
    for (i, (row, l)) in x.into_iter().zip(y).enumerate() {
        let mut row: Vec<Option<f64>> = row.into_iter().map(Some).collect();
        if i % 7 == 0 {
            row[2] = None;
        }
        d.push(format!("s{i}"), row, cogspeech::chat::Label::from_binary(l), Some(20.0 + l as f64)).unwrap();
    }
    d
}

#[test]
fn fitted_model_round_trips_through_json() {
    let data = small_dataset();
    let train: Vec<usize> = (0..data.len()).collect();
    for kind in MODEL_KINDS {
        let spec = ModelSpec {
            k_features: Some(3),
            forest: ForestParams {
                n_trees: 10,
                ..Default::default()
            },
            ..ModelSpec::new(kind)
        };
        let model = FittedModel::fit(&data, &train, &spec, 5).unwrap();
        let back = FittedModel::from_json(&model.to_json()).unwrap();
        assert_eq!(back.predict(&data.rows), model.predict(&data.rows), "{kind}");
        assert_eq!(model.selector.chosen.len(), 3);
    }
}

#[test]
fn registry_mismatch_is_detected() {
    let data = small_dataset();
    let model = FittedModel::fit(&data, &[0, 1, 2, 3, 4, 5], &ModelSpec::new(ModelKind::Nb), 0).unwrap();
    let mut other = data.clone();
    other.registry_hash = "other".into();
    assert!(matches!(model.check_registry(&other), Err(Error::RegistryMismatch { .. })));
    assert!(model.check_registry(&data).is_ok());
}
