//! Feed-forward ReLU network with a softmax output, trained by mini-batch Adam.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::data::{argmax, Dataset, Matrix};
use super::logistic::softmax_in_place;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub l2: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Stop once the epoch loss has failed to beat the best by `tol` this many times.
    pub patience: usize,
    pub tol: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: vec![200, 100],
            learning_rate: 1e-3,
            l2: 1e-4,
            batch_size: 64,
            max_epochs: 200,
            patience: 10,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `out × in`.
    pub w: Matrix,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Layer>,
}

impl Mlp {
    /// Glorot-uniform weights, zero biases.
    pub fn init<R: Rng>(sizes: &[usize], rng: &mut R) -> Mlp {
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let data = (0..fan_in * fan_out).map(|_| rng.gen_range(-limit..=limit)).collect();
                Layer { w: Matrix::from_vec(fan_out, fan_in, data), b: vec![0.0; fan_out] }
            })
            .collect();
        Mlp { layers }
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].w.cols()
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.w.as_slice().len() + l.b.len()).sum()
    }

    /// Weights then biases, layer by layer.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend_from_slice(l.w.as_slice());
            out.extend_from_slice(&l.b);
        }
        out
    }

    pub fn set_params_flat(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params());
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.w.as_slice().len();
            l.w.as_mut_slice().copy_from_slice(&p[at..at + nw]);
            at += nw;
            let nb = l.b.len();
            l.b.copy_from_slice(&p[at..at + nb]);
            at += nb;
        }
    }

    /// Activations of every layer; the last entry holds class probabilities.
    fn forward(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        let last = self.layers.len() - 1;
        for (li, l) in self.layers.iter().enumerate() {
            let input = acts.last().expect("input pushed");
            let mut z: Vec<f64> = (0..l.w.rows())
                .map(|o| l.b[o] + l.w.row(o).iter().zip(input).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            if li == last {
                softmax_in_place(&mut z);
            } else {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            acts.push(z);
        }
        acts
    }

    pub fn predict_proba_row(&self, x: &[f64]) -> Vec<f64> {
        self.forward(x).pop().expect("output layer")
    }

    pub fn predict_row(&self, x: &[f64]) -> usize {
        argmax(&self.predict_proba_row(x))
    }

    /// Mean cross-entropy over `rows` plus `l2/2 · Σw²` (biases unpenalized),
    /// with the gradient in `params_flat` order.
    pub fn loss_and_grad(&self, data: &Dataset, rows: &[usize], l2: f64) -> (f64, Vec<f64>) {
        let n = rows.len().max(1) as f64;
        let mut gw: Vec<Matrix> = self.layers.iter().map(|l| Matrix::zeros(l.w.rows(), l.w.cols())).collect();
        let mut gb: Vec<Vec<f64>> = self.layers.iter().map(|l| vec![0.0; l.b.len()]).collect();
        let mut loss = 0.0;
        for &r in rows {
            let acts = self.forward(data.x.row(r));
            let y = data.y[r];
            let out = acts.last().expect("output layer");
            loss -= out[y].max(1e-300).ln();
            let mut delta: Vec<f64> = out.clone();
            delta[y] -= 1.0;
            for li in (0..self.layers.len()).rev() {
                let input = &acts[li];
                let g = &mut gw[li];
                for (o, &dv) in delta.iter().enumerate() {
                    if dv == 0.0 {
                        continue;
                    }
                    gb[li][o] += dv;
                    for (gv, &iv) in g.row_mut(o).iter_mut().zip(input) {
                        *gv += dv * iv;
                    }
                }
                if li > 0 {
                    let w = &self.layers[li].w;
                    let mut back = vec![0.0; w.cols()];
                    for (o, &dv) in delta.iter().enumerate() {
                        if dv == 0.0 {
                            continue;
                        }
                        for (bv, &wv) in back.iter_mut().zip(w.row(o)) {
                            *bv += dv * wv;
                        }
                    }
                    for (bv, &a) in back.iter_mut().zip(input) {
                        if a <= 0.0 {
                            *bv = 0.0;
                        }
                    }
                    delta = back;
                }
            }
        }
        loss /= n;
        let mut grad = Vec::with_capacity(self.n_params());
        for (li, l) in self.layers.iter().enumerate() {
            let mut sq = 0.0;
            for (g, &w) in gw[li].as_slice().iter().zip(l.w.as_slice()) {
                grad.push(g / n + l2 * w);
                sq += w * w;
            }
            loss += 0.5 * l2 * sq;
            grad.extend(gb[li].iter().map(|g| g / n));
        }
        (loss, grad)
    }

    pub fn fit(data: &Dataset, params: &MlpParams, seed: u64) -> Mlp {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sizes = vec![data.x.cols()];
        sizes.extend_from_slice(&params.hidden);
        sizes.push(data.n_classes);
        let mut net = Mlp::init(&sizes, &mut rng);
        let mut p = net.params_flat();
        let mut m = vec![0.0; p.len()];
        let mut v = vec![0.0; p.len()];
        let (b1, b2, eps) = (0.9, 0.999, 1e-8);
        let mut t = 0i32;
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut best = f64::INFINITY;
        let mut stale = 0;
        for _ in 0..params.max_epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for batch in order.chunks(params.batch_size.max(1)) {
                let (loss, g) = net.loss_and_grad(data, batch, params.l2);
                epoch_loss += loss * batch.len() as f64;
                t += 1;
                let c1 = 1.0 - f64::powi(b1, t);
                let c2 = 1.0 - f64::powi(b2, t);
                for i in 0..p.len() {
                    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                    p[i] -= params.learning_rate * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
                }
                net.set_params_flat(&p);
            }
            epoch_loss /= data.len().max(1) as f64;
            if epoch_loss < best - params.tol {
                best = epoch_loss;
                stale = 0;
            } else {
                stale += 1;
                if stale >= params.patience {
                    break;
                }
            }
        }
        net
    }
}
