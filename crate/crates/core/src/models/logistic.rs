//! Multinomial logistic regression, fitted by full-batch gradient descent.
//!
//! A step that raises the loss is rejected and the learning rate halved, so
//! the recorded loss sequence never increases.

use serde::{Deserialize, Serialize};

use super::data::{argmax, Dataset, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub l2: f64,
    pub tol: f64,
    pub max_epochs: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams { learning_rate: 0.1, l2: 1e-4, tol: 1e-6, max_epochs: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// `n_classes` rows of `n_features + 1` weights, bias last.
    pub weights: Matrix,
}

pub(crate) fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

impl LogisticModel {
    pub fn zeros(n_features: usize, n_classes: usize) -> LogisticModel {
        LogisticModel { weights: Matrix::zeros(n_classes, n_features + 1) }
    }

    pub fn n_features(&self) -> usize {
        self.weights.cols() - 1
    }

    fn logits(&self, x: &[f64], out: &mut [f64]) {
        let d = self.n_features();
        for (k, o) in out.iter_mut().enumerate() {
            let w = self.weights.row(k);
            *o = w[d] + w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    pub fn predict_proba_row(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.weights.rows()];
        self.logits(x, &mut p);
        softmax_in_place(&mut p);
        p
    }

    pub fn predict_row(&self, x: &[f64]) -> usize {
        let mut z = vec![0.0; self.weights.rows()];
        self.logits(x, &mut z);
        argmax(&z)
    }

    /// Mean cross-entropy plus `l2/2 · ||W||²` (biases unpenalized).
    pub fn loss(&self, data: &Dataset, l2: f64) -> f64 {
        self.loss_and_grad(data, l2, false).0
    }

    fn loss_and_grad(&self, data: &Dataset, l2: f64, with_grad: bool) -> (f64, Matrix) {
        let k = self.weights.rows();
        let d = self.n_features();
        let n = data.len().max(1) as f64;
        let mut grad = Matrix::zeros(if with_grad { k } else { 0 }, d + 1);
        let mut p = vec![0.0; k];
        let mut loss = 0.0;
        for (x, &y) in data.x.iter_rows().zip(&data.y) {
            self.logits(x, &mut p);
            softmax_in_place(&mut p);
            loss -= p[y].max(1e-300).ln();
            if with_grad {
                for c in 0..k {
                    let r = p[c] - if c == y { 1.0 } else { 0.0 };
                    let g = grad.row_mut(c);
                    for j in 0..d {
                        g[j] += r * x[j];
                    }
                    g[d] += r;
                }
            }
        }
        loss /= n;
        let mut penalty = 0.0;
        for c in 0..k {
            let w = self.weights.row(c);
            penalty += w[..d].iter().map(|v| v * v).sum::<f64>();
            if with_grad {
                let g = grad.row_mut(c);
                for j in 0..=d {
                    g[j] /= n;
                    if j < d {
                        g[j] += l2 * w[j];
                    }
                }
            }
        }
        (loss + 0.5 * l2 * penalty, grad)
    }

    /// Fits from zero weights; returns the model and the loss after every accepted step
    /// (the first entry is the initial loss).
    pub fn fit(data: &Dataset, params: &LogisticParams) -> (LogisticModel, Vec<f64>) {
        let mut model = LogisticModel::zeros(data.x.cols(), data.n_classes);
        let mut lr = params.learning_rate;
        let (mut loss, mut grad) = model.loss_and_grad(data, params.l2, true);
        let mut history = vec![loss];
        for _ in 0..params.max_epochs {
            let mut candidate = model.clone();
            for (w, g) in candidate.weights.as_mut_slice().iter_mut().zip(grad.as_slice()) {
                *w -= lr * g;
            }
            let (next_loss, next_grad) = candidate.loss_and_grad(data, params.l2, true);
            if next_loss > loss {
                lr *= 0.5;
                if lr < 1e-12 {
                    break;
                }
                continue;
            }
            let improvement = loss - next_loss;
            model = candidate;
            loss = next_loss;
            grad = next_grad;
            history.push(loss);
            if improvement < params.tol {
                break;
            }
        }
        (model, history)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        let x = Matrix::from_rows(&[[-2.0, 0.5], [-1.0, -0.5], [1.0, 0.3], [2.0, -0.2]], 2);
        Dataset::new(x, vec![0, 0, 1, 1], 3, vec!["a".into(), "b".into()])
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = LogisticModel::zeros(2, 3);
        for p in m.predict_proba_row(&[3.0, -1.0]) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn separable_toy_is_learned() {
        let data = toy();
        let (m, hist) = LogisticModel::fit(&data, &LogisticParams::default());
        for (x, &y) in data.x.iter_rows().zip(&data.y) {
            assert_eq!(m.predict_row(x), y);
        }
        assert!(hist.windows(2).all(|w| w[1] <= w[0]));
    }
}
