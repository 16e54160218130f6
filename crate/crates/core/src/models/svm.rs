//! Linear one-vs-rest SVM trained by full-batch subgradient descent on the
//! L2-regularized hinge loss.

use serde::{Deserialize, Serialize};

use super::data::{argmax, Dataset, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub learning_rate: f64,
    pub lambda: f64,
    pub tol: f64,
    pub max_epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { learning_rate: 0.1, lambda: 1e-4, tol: 1e-6, max_epochs: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    /// One row of `d + 1` weights per class, bias last.
    pub weights: Matrix,
    /// Classes seen in training; the rest always score `-inf`.
    pub present: Vec<bool>,
}

fn margin(w: &[f64], x: &[f64]) -> f64 {
    let d = w.len() - 1;
    w[d] + w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
}

/// Returns `(objective, mean hinge)` for one binary problem.
pub fn binary_objective(w: &[f64], data: &Dataset, class: usize, lambda: f64) -> (f64, f64) {
    let d = w.len() - 1;
    let n = data.len().max(1) as f64;
    let hinge = data
        .x
        .iter_rows()
        .zip(&data.y)
        .map(|(x, &y)| {
            let t = if y == class { 1.0 } else { -1.0 };
            (1.0 - t * margin(w, x)).max(0.0)
        })
        .sum::<f64>()
        / n;
    let norm: f64 = w[..d].iter().map(|v| v * v).sum();
    (hinge + 0.5 * lambda * norm, hinge)
}

fn subgradient(w: &[f64], data: &Dataset, class: usize, lambda: f64) -> Vec<f64> {
    let d = w.len() - 1;
    let n = data.len().max(1) as f64;
    let mut g = vec![0.0; d + 1];
    for (x, &y) in data.x.iter_rows().zip(&data.y) {
        let t = if y == class { 1.0 } else { -1.0 };
        if t * margin(w, x) < 1.0 {
            for j in 0..d {
                g[j] -= t * x[j];
            }
            g[d] -= t;
        }
    }
    for j in 0..=d {
        g[j] /= n;
        if j < d {
            g[j] += lambda * w[j];
        }
    }
    g
}

fn fit_binary(data: &Dataset, class: usize, params: &SvmParams) -> Vec<f64> {
    let d = data.x.cols();
    let mut w = vec![0.0; d + 1];
    let mut obj = binary_objective(&w, data, class, params.lambda).0;
    let mut lr = params.learning_rate;
    for _ in 0..params.max_epochs {
        let g = subgradient(&w, data, class, params.lambda);
        let cand: Vec<f64> = w.iter().zip(&g).map(|(a, b)| a - lr * b).collect();
        let next = binary_objective(&cand, data, class, params.lambda).0;
        if next > obj {
            lr *= 0.5;
            if lr < 1e-12 {
                break;
            }
            continue;
        }
        let improvement = obj - next;
        w = cand;
        obj = next;
        if improvement < params.tol {
            break;
        }
    }
    w
}

impl LinearSvm {
    pub fn fit(data: &Dataset, params: &SvmParams) -> LinearSvm {
        let d = data.x.cols();
        let counts = data.class_counts();
        let mut weights = Matrix::zeros(data.n_classes, d + 1);
        for (k, &c) in counts.iter().enumerate() {
            if c > 0 {
                weights.row_mut(k).copy_from_slice(&fit_binary(data, k, params));
            }
        }
        LinearSvm { weights, present: counts.iter().map(|&c| c > 0).collect() }
    }

    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        (0..self.weights.rows())
            .map(|k| if self.present[k] { margin(self.weights.row(k), x) } else { f64::NEG_INFINITY })
            .collect()
    }

    pub fn predict_row(&self, x: &[f64]) -> usize {
        argmax(&self.margins(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> Dataset {
        let x = Matrix::from_rows(&[[-2.0, 0.0], [-1.5, 1.0], [1.5, -1.0], [2.0, 0.0]], 2);
        Dataset::new(x, vec![0, 0, 2, 2], 3, vec!["a".into(), "b".into()])
    }

    #[test]
    fn separable_reaches_zero_hinge() {
        let data = separable();
        let m = LinearSvm::fit(&data, &SvmParams { lambda: 0.0, tol: 0.0, ..SvmParams::default() });
        for k in [0, 2] {
            assert_eq!(binary_objective(m.weights.row(k), &data, k, 0.0).1, 0.0);
        }
    }

    #[test]
    fn absent_class_never_predicted() {
        let data = separable();
        let m = LinearSvm::fit(&data, &SvmParams::default());
        assert!(!m.present[1]);
        for x in [[0.0, 0.0], [0.1, 5.0], [-9.0, -9.0]] {
            assert_ne!(m.predict_row(&x), 1);
        }
    }
}
