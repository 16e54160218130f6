//! CART classification tree with Gini impurity.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::data::{argmax_counts, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxFeatures {
    All,
    /// `round(sqrt(d))`, at least one.
    Sqrt,
}

impl MaxFeatures {
    pub fn resolve(self, d: usize) -> usize {
        match self {
            MaxFeatures::All => d,
            MaxFeatures::Sqrt => ((d as f64).sqrt().round() as usize).clamp(1, d.max(1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: 150, min_samples_split: 2, min_samples_leaf: 1, max_features: MaxFeatures::All }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        class: usize,
        counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Rows with `x[feature] <= threshold`.
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Root is node 0.
    pub nodes: Vec<Node>,
    pub n_features: usize,
    pub n_classes: usize,
    /// Weighted impurity decrease per feature, not normalized.
    pub raw_importance: Vec<f64>,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

struct Best {
    feature: usize,
    threshold: f64,
    score: f64,
}

struct Builder<'a, R> {
    data: &'a Dataset,
    params: TreeParams,
    rng: &'a mut R,
    nodes: Vec<Node>,
    importance: Vec<f64>,
    n_total: f64,
}

impl<'a, R: Rng> Builder<'a, R> {
    fn counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.data.n_classes];
        for &r in rows {
            c[self.data.y[r]] += 1;
        }
        c
    }

    fn is_constant(&self, rows: &[usize], f: usize) -> bool {
        let first = self.data.x.get(rows[0], f);
        rows.iter().all(|&r| self.data.x.get(r, f) == first)
    }

    /// Lowest weighted child impurity over midpoints of one feature.
    fn best_for_feature(&self, rows: &[usize], f: usize, total: &[usize]) -> Option<Best> {
        let x = &self.data.x;
        let mut sorted: Vec<(f64, usize)> = rows.iter().map(|&r| (x.get(r, f), self.data.y[r])).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = sorted.len();
        let leaf = self.params.min_samples_leaf.max(1);
        let mut left = vec![0usize; self.data.n_classes];
        let mut right = total.to_vec();
        let mut best: Option<Best> = None;
        for i in 0..n - 1 {
            let (v, y) = sorted[i];
            left[y] += 1;
            right[y] -= 1;
            let next = sorted[i + 1].0;
            if next <= v {
                continue;
            }
            let nl = i + 1;
            let nr = n - nl;
            if nl < leaf || nr < leaf {
                continue;
            }
            let score = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / n as f64;
            if best.as_ref().is_none_or(|b| score < b.score) {
                let mut threshold = 0.5 * (v + next);
                // midpoint of adjacent floats can round up to `next`
                if threshold >= next {
                    threshold = v;
                }
                best = Some(Best { feature: f, threshold, score });
            }
        }
        best
    }

    fn leaf(&mut self, counts: Vec<usize>) -> usize {
        self.nodes.push(Node::Leaf { class: argmax_counts(&counts), counts });
        self.nodes.len() - 1
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&rows);
        let n = rows.len();
        let impurity = gini(&counts, n);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.params.max_depth || n < self.params.min_samples_split.max(2) {
            return self.leaf(counts);
        }
        let d = self.data.x.cols();
        let k = self.params.max_features.resolve(d);
        let mut order: Vec<usize> = (0..d).collect();
        if k < d {
            order.shuffle(self.rng);
        }
        let mut best: Option<Best> = None;
        let mut tried = 0;
        for &f in &order {
            if tried >= k {
                break;
            }
            if self.is_constant(&rows, f) {
                continue;
            }
            tried += 1;
            if let Some(b) = self.best_for_feature(&rows, f, &counts) {
                if best.as_ref().is_none_or(|cur| b.score < cur.score) {
                    best = Some(b);
                }
            }
        }
        let Some(best) = best else {
            return self.leaf(counts);
        };
        let (l, r): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&i| self.data.x.get(i, best.feature) <= best.threshold);
        self.importance[best.feature] += n as f64 / self.n_total * (impurity - best.score);
        let id = self.nodes.len();
        self.nodes.push(Node::Split { feature: best.feature, threshold: best.threshold, left: 0, right: 0 });
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split { feature: best.feature, threshold: best.threshold, left, right };
        id
    }
}

impl DecisionTree {
    /// Grows a tree on the given row indexes (repeats allowed).
    pub fn fit_rows<R: Rng>(data: &Dataset, rows: Vec<usize>, params: &TreeParams, rng: &mut R) -> DecisionTree {
        assert!(!rows.is_empty(), "empty training set");
        let mut b = Builder {
            data,
            params: *params,
            rng,
            nodes: Vec::new(),
            importance: vec![0.0; data.x.cols()],
            n_total: rows.len() as f64,
        };
        b.grow(rows, 0);
        DecisionTree { nodes: b.nodes, n_features: data.x.cols(), n_classes: data.n_classes, raw_importance: b.importance }
    }

    pub fn fit<R: Rng>(data: &Dataset, params: &TreeParams, rng: &mut R) -> DecisionTree {
        DecisionTree::fit_rows(data, (0..data.len()).collect(), params, rng)
    }

    pub fn predict_row(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class, .. } => return *class,
                Node::Split { feature, threshold, left, right } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Sums to one unless the tree never split, in which case all zeros.
    pub fn importance(&self) -> Vec<f64> {
        normalize(&self.raw_importance)
    }
}

pub(crate) fn normalize(v: &[f64]) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter().map(|x| x / total).collect()
    } else {
        vec![0.0; v.len()]
    }
}
