mod common;

use common::{blobs, grad_check};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serve_predict::models::{
    accuracy, derive_seed, train, Dataset, DecisionTree, ForestParams, Hyperparameters, LinearSvm, LogisticModel,
    LogisticParams, MaxFeatures, Mlp, MlpParams, ModelKind, RandomForest, SvmParams, TrainedModel,
    TreeParams,
};
use serve_predict::synth;

fn small_hp() -> Hyperparameters {
    let mut hp = Hyperparameters::default();
    hp.forest.n_trees = 15;
    hp.mlp = MlpParams { hidden: vec![16, 8], max_epochs: 30, ..MlpParams::default() };
    hp
}

#[test]
fn mlp_gradient_matches_finite_differences() {
    let data = blobs(1, 40, 6, 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let net = Mlp::init(&[6, 8, 5, 3], &mut rng);
    let rows: Vec<usize> = (0..5).map(|_| rng.gen_range(0..data.len())).collect();
    let all: Vec<usize> = (0..net.n_params()).collect();
    let worst = grad_check(&net, &data, &rows, &all);
    assert!(worst < 1e-4, "worst relative error {worst}");
}

#[test]
fn mlp_gradient_at_production_width() {
    let x = synth::feature_matrix(4, 60);
    let y = (0..x.rows()).map(|i| i % 3).collect();
    let names = serve_predict::features::FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    let data = Dataset::new(x, y, 3, names);
    let data = data.with_x(serve_predict::models::Standardizer::fit(&data.x).transform(&data.x));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let net = Mlp::init(&[data.x.cols(), 200, 100, 3], &mut rng);
    let rows: Vec<usize> = (0..5).collect();
    let coords: Vec<usize> = (0..300).map(|_| rng.gen_range(0..net.n_params())).collect();
    let worst = grad_check(&net, &data, &rows, &coords);
    assert!(worst < 1e-4, "worst relative error {worst}");
}

#[test]
fn logistic_loss_never_increases() {
    let data = blobs(3, 90, 5, 4.0);
    let (model, history) = LogisticModel::fit(&data, &LogisticParams::default());
    assert!(history.len() > 1);
    for w in history.windows(2) {
        assert!(w[1] <= w[0], "{} -> {}", w[0], w[1]);
    }
    let l = model.loss(&data, LogisticParams::default().l2);
    assert!((l - history.last().unwrap()).abs() < 1e-9);
}

#[test]
fn single_tree_forest_equals_tree() {
    let data = blobs(4, 120, 6, 5.0);
    let tree_params = TreeParams { max_depth: 150, max_features: MaxFeatures::All, ..TreeParams::default() };
    let forest = RandomForest::fit(&data, &ForestParams { n_trees: 1, bootstrap: false, tree: tree_params }, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(9, 0));
    let tree = DecisionTree::fit(&data, &tree_params, &mut rng);
    assert_eq!(forest.trees[0], tree);
    for r in data.x.iter_rows() {
        assert_eq!(forest.predict_row(r), tree.predict_row(r));
    }
    assert_eq!(forest.importance(), tree.importance());
}

#[test]
fn tree_importances_sum_to_one() {
    let data = blobs(5, 150, 7, 5.0);
    let hp = small_hp();
    for kind in [ModelKind::DT, ModelKind::RF] {
        let m = train(kind, &data, &hp, 1).unwrap();
        let imp = m.feature_importance().unwrap();
        let total: f64 = imp.iter().map(|(_, v)| v).sum();
        assert!((total - 1.0).abs() < 1e-9, "{kind}: {total}");
        assert!(imp.windows(2).all(|w| w[0].1 >= w[1].1));
    }
}

#[test]
fn every_model_is_deterministic() {
    let data = blobs(6, 120, 5, 3.0);
    let hp = small_hp();
    for kind in ModelKind::ALL {
        let a = train(kind, &data, &hp, 77).unwrap().to_json();
        let b = train(kind, &data, &hp, 77).unwrap().to_json();
        assert_eq!(a, b, "{kind}");
        let back = TrainedModel::from_json(&a).unwrap();
        assert_eq!(back.to_json(), a, "{kind}");
    }
}

#[test]
fn models_learn_separable_blobs() {
    let data = blobs(7, 150, 6, 1.0);
    let hp = small_hp();
    for kind in ModelKind::ALL {
        let m = train(kind, &data, &hp, 3).unwrap();
        let acc = accuracy(&m.predict(&data.x).unwrap(), &data.y).unwrap();
        assert!(acc > 0.95, "{kind}: {acc}");
    }
}

#[test]
fn svm_ignores_classes_missing_from_training() {
    let mut data = blobs(8, 60, 3, 1.0);
    data.y.iter_mut().for_each(|c| *c = (*c).min(1));
    let svm = LinearSvm::fit(&data, &SvmParams::default());
    for r in data.x.iter_rows() {
        assert!(svm.margins(r)[2] == f64::NEG_INFINITY);
        assert!(svm.predict_row(r) < 2);
    }
}
