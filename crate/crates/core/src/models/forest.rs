use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{argmax_counts, Dataset};
use super::derive_seed;
use super::tree::{normalize, DecisionTree, MaxFeatures, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub bootstrap: bool,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 200,
            bootstrap: true,
            tree: TreeParams { max_depth: 150, max_features: MaxFeatures::Sqrt, ..TreeParams::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
}

impl RandomForest {
    /// Tree `i` draws from its own generator seeded by `(seed, i)`, so the
    /// result does not depend on thread scheduling.
    pub fn fit(data: &Dataset, params: &ForestParams, seed: u64) -> RandomForest {
        assert!(!data.is_empty(), "empty training set");
        let n = data.len();
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
                let rows = if params.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit_rows(data, rows, &params.tree, &mut rng)
            })
            .collect();
        RandomForest { trees, n_classes: data.n_classes }
    }

    /// Majority vote; ties go to the lowest class index.
    pub fn predict_row(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        for t in &self.trees {
            votes[t.predict_row(x)] += 1;
        }
        argmax_counts(&votes)
    }

    /// Mean of the per-tree normalized importances, renormalized.
    pub fn importance(&self) -> Vec<f64> {
        let d = self.trees.first().map_or(0, |t| t.n_features);
        let mut acc = vec![0.0; d];
        for t in &self.trees {
            for (a, v) in acc.iter_mut().zip(t.importance()) {
                *a += v;
            }
        }
        normalize(&acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::data::Matrix;
    use crate::models::tree::Node;

    #[test]
    fn trees_see_n_rows_and_are_seeded() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0], [4.0]], 1);
        let data = Dataset::new(x, vec![0, 0, 1, 1, 2], 3, vec!["a".into()]);
        let p = ForestParams { n_trees: 8, ..ForestParams::default() };
        let a = RandomForest::fit(&data, &p, 11);
        let b = RandomForest::fit(&data, &p, 11);
        assert_eq!(a, b);
        for t in &a.trees {
            let seen: usize = t
                .nodes
                .iter()
                .map(|n| match n {
                    Node::Leaf { counts, .. } => counts.iter().sum(),
                    Node::Split { .. } => 0,
                })
                .sum();
            assert_eq!(seen, 5);
        }
        assert_ne!(a, RandomForest::fit(&data, &p, 12));
    }

    #[test]
    fn vote_tie_goes_low() {
        let leaf = |class| DecisionTree {
            nodes: vec![Node::Leaf { class, counts: vec![0; 3] }],
            n_features: 1,
            n_classes: 3,
            raw_importance: vec![0.0],
        };
        let f = RandomForest { trees: vec![leaf(2), leaf(1), leaf(2), leaf(1)], n_classes: 3 };
        assert_eq!(f.predict_row(&[0.0]), 1);
    }
}
