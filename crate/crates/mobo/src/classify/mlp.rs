//! A small feed-forward network for binary classification under log loss.
//!
//! Architecture: configurable ReLU hidden layers followed by a single
//! sigmoid output unit. Training is plain backpropagation with the
//! adaptive-moment update (β₁ = 0.9, β₂ = 0.999, ε = 1e-8) on mean
//! cross-entropy, full-batch by default. Weights initialise uniformly in
//! ±1/√fan_in from the seeded generator and biases at zero, so a fit is a
//! pure function of (data, config, seed). Everything is hand-rolled loops:
//! the layers are small enough that dense-algebra libraries buy nothing,
//! and keeping the arithmetic explicit makes the determinism auditable.

use super::{sigmoid, LabelledDataset, MlpConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// One dense layer; `weight[j]` holds the fan-in row for output unit `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DenseLayer {
    weight: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl DenseLayer {
    fn out_dim(&self) -> usize {
        self.bias.len()
    }

    fn in_dim(&self) -> usize {
        self.weight[0].len()
    }
}

/// A fitted feed-forward classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    layers: Vec<DenseLayer>,
    n_features: usize,
    train_loss_trace: Vec<f64>,
}

impl MlpModel {
    /// Feature dimension the model was trained on.
    pub fn dim(&self) -> usize {
        self.n_features
    }

    /// Unclamped class-1 probability.
    pub(crate) fn predict_raw(&self, x: &[f64]) -> f64 {
        let mut current = x.to_vec();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut next = vec![0.0; layer.out_dim()];
            for (j, row) in layer.weight.iter().enumerate() {
                let mut s = layer.bias[j];
                for (w, v) in row.iter().zip(&current) {
                    s += w * v;
                }
                next[j] = if l < last { s.max(0.0) } else { s };
            }
            current = next;
        }
        sigmoid(current[0])
    }

    pub(crate) fn train_loss_trace(&self) -> &[f64] {
        &self.train_loss_trace
    }
}

/// Flattened per-batch workspace; `acts[l]` and `pre[l]` are row-major
/// `batch × width(l)` slabs.
struct Workspace {
    acts: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(sizes: &[usize], batch: usize) -> Self {
        Workspace {
            acts: sizes.iter().map(|&w| vec![0.0; w * batch]).collect(),
            pre: sizes.iter().map(|&w| vec![0.0; w * batch]).collect(),
            delta: sizes.iter().map(|&w| vec![0.0; w * batch]).collect(),
        }
    }
}

struct Trainer<'a> {
    layers: Vec<DenseLayer>,
    sizes: Vec<usize>,
    grad_w: Vec<Vec<Vec<f64>>>,
    grad_b: Vec<Vec<f64>>,
    m_w: Vec<Vec<Vec<f64>>>,
    v_w: Vec<Vec<Vec<f64>>>,
    m_b: Vec<Vec<f64>>,
    v_b: Vec<Vec<f64>>,
    step: u64,
    config: &'a MlpConfig,
}

impl<'a> Trainer<'a> {
    fn new(d: usize, config: &'a MlpConfig, rng: &mut StdRng) -> Self {
        let mut sizes = vec![d];
        sizes.extend_from_slice(&config.layers);
        sizes.push(1);
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for l in 1..sizes.len() {
            let fan_in = sizes[l - 1];
            let bound = 1.0 / (fan_in as f64).sqrt();
            let weight = (0..sizes[l])
                .map(|_| (0..fan_in).map(|_| rng.gen_range(-bound..bound)).collect())
                .collect();
            layers.push(DenseLayer {
                weight,
                bias: vec![0.0; sizes[l]],
            });
        }
        let grad_w: Vec<Vec<Vec<f64>>> = layers
            .iter()
            .map(|l| vec![vec![0.0; l.in_dim()]; l.out_dim()])
            .collect();
        let grad_b: Vec<Vec<f64>> = layers.iter().map(|l| vec![0.0; l.out_dim()]).collect();
        Trainer {
            m_w: grad_w.clone(),
            v_w: grad_w.clone(),
            m_b: grad_b.clone(),
            v_b: grad_b.clone(),
            grad_w,
            grad_b,
            layers,
            sizes,
            step: 0,
            config,
        }
    }

    /// Forward pass over `batch` rows already loaded into `ws.acts[0]`.
    /// Leaves logits in `ws.acts[last]` (the output layer is linear here;
    /// the sigmoid is applied where probabilities are needed).
    fn forward(&self, ws: &mut Workspace, batch: usize) {
        let n_layers = self.layers.len();
        for l in 0..n_layers {
            let (in_w, out_w) = (self.sizes[l], self.sizes[l + 1]);
            let hidden = l + 1 < n_layers;
            let layer = &self.layers[l];
            let (below, above) = ws.acts.split_at_mut(l + 1);
            let (input_slab, output_slab) = (&below[l], &mut above[0]);
            let pre_slab = &mut ws.pre[l + 1];
            for i in 0..batch {
                let input = &input_slab[i * in_w..(i + 1) * in_w];
                for j in 0..out_w {
                    let mut s = layer.bias[j];
                    let row = &layer.weight[j];
                    for k in 0..in_w {
                        s += row[k] * input[k];
                    }
                    pre_slab[i * out_w + j] = s;
                    output_slab[i * out_w + j] = if hidden { s.max(0.0) } else { s };
                }
            }
        }
    }

    /// Backward pass: fills `grad_w`/`grad_b` with the mean-loss gradient.
    /// `labels` aligns with the batch rows.
    fn backward(&mut self, ws: &mut Workspace, batch: usize, labels: &[u8]) {
        let n_layers = self.layers.len();
        let scale = 1.0 / batch as f64;
        let (acts, deltas) = (&ws.acts[n_layers], &mut ws.delta[n_layers]);
        for ((delta, &act), &label) in deltas.iter_mut().zip(acts).zip(labels).take(batch) {
            *delta = (sigmoid(act) - label as f64) * scale;
        }
        for l in (0..n_layers).rev() {
            let (in_w, out_w) = (self.sizes[l], self.sizes[l + 1]);
            for j in 0..out_w {
                self.grad_b[l][j] = 0.0;
                for v in &mut self.grad_w[l][j] {
                    *v = 0.0;
                }
            }
            for i in 0..batch {
                let input = &ws.acts[l][i * in_w..(i + 1) * in_w];
                for j in 0..out_w {
                    let d = ws.delta[l + 1][i * out_w + j];
                    if d == 0.0 {
                        continue;
                    }
                    self.grad_b[l][j] += d;
                    let gr = &mut self.grad_w[l][j];
                    for k in 0..in_w {
                        gr[k] += d * input[k];
                    }
                }
            }
            if l > 0 {
                let layer = &self.layers[l];
                for i in 0..batch {
                    for k in 0..in_w {
                        let mut s = 0.0;
                        for j in 0..out_w {
                            s += ws.delta[l + 1][i * out_w + j] * layer.weight[j][k];
                        }
                        let active = ws.pre[l][i * in_w + k] > 0.0;
                        ws.delta[l][i * in_w + k] = if active { s } else { 0.0 };
                    }
                }
            }
        }
    }

    fn adam_step(&mut self) {
        self.step += 1;
        let t = self.step as i32;
        let corr1 = 1.0 - BETA1.powi(t);
        let corr2 = 1.0 - BETA2.powi(t);
        let alpha = self.config.step_size;
        for l in 0..self.layers.len() {
            for j in 0..self.layers[l].out_dim() {
                for k in 0..self.layers[l].in_dim() {
                    let g = self.grad_w[l][j][k];
                    let m = &mut self.m_w[l][j][k];
                    let v = &mut self.v_w[l][j][k];
                    *m = BETA1 * *m + (1.0 - BETA1) * g;
                    *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                    self.layers[l].weight[j][k] -=
                        alpha * (*m / corr1) / ((*v / corr2).sqrt() + ADAM_EPS);
                }
                let g = self.grad_b[l][j];
                let m = &mut self.m_b[l][j];
                let v = &mut self.v_b[l][j];
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                self.layers[l].bias[j] -= alpha * (*m / corr1) / ((*v / corr2).sqrt() + ADAM_EPS);
            }
        }
    }

    /// Mean cross-entropy over the whole dataset with the current weights.
    fn full_loss(&self, ws: &mut Workspace, data: &LabelledDataset) -> f64 {
        let t = data.len();
        let d = data.dim();
        for (i, row) in data.x().iter().enumerate() {
            ws.acts[0][i * d..(i + 1) * d].copy_from_slice(row);
        }
        self.forward(ws, t);
        let n_layers = self.layers.len();
        let mut total = 0.0;
        for (i, &label) in data.z().iter().enumerate() {
            let p = sigmoid(ws.acts[n_layers][i]).clamp(1e-15, 1.0 - 1e-15);
            total += if label == 1 { p.ln() } else { (1.0 - p).ln() };
        }
        -total / t as f64
    }
}

/// Train the network. The caller guarantees both classes are present.
pub(super) fn fit_mlp(dataset: &LabelledDataset, config: &MlpConfig, seed: u64) -> MlpModel {
    let t = dataset.len();
    let d = dataset.dim();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut trainer = Trainer::new(d, config, &mut rng);

    let batch = if config.batch_size == 0 || config.batch_size >= t {
        t
    } else {
        config.batch_size
    };
    // One workspace sized for the full dataset serves both the batched
    // updates (using a prefix of each slab) and the per-epoch loss pass.
    let mut ws = Workspace::new(&trainer.sizes, t);

    let mut trace = Vec::with_capacity(config.epochs + 1);
    trace.push(trainer.full_loss(&mut ws, dataset));

    let mut batch_labels = vec![0u8; batch];
    for _ in 0..config.epochs {
        let mut start = 0;
        while start < t {
            let end = (start + batch).min(t);
            let nb = end - start;
            for (bi, i) in (start..end).enumerate() {
                ws.acts[0][bi * d..(bi + 1) * d].copy_from_slice(&dataset.x()[i]);
                batch_labels[bi] = dataset.z()[i];
            }
            trainer.forward(&mut ws, nb);
            trainer.backward(&mut ws, nb, &batch_labels[..nb]);
            trainer.adam_step();
            start = end;
        }
        trace.push(trainer.full_loss(&mut ws, dataset));
    }

    MlpModel {
        layers: trainer.layers,
        n_features: d,
        train_loss_trace: trace,
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::separable_blobs;
    use super::super::{fit, ClassifierConfig, ClassifierModel, MlpConfig};

    fn fit_mlp_blobs(epochs: usize, seed: u64) -> super::MlpModel {
        let data = separable_blobs(40, 19);
        let config = ClassifierConfig::Mlp(MlpConfig {
            epochs,
            ..MlpConfig::default()
        });
        match fit(&data, &config, seed).unwrap() {
            ClassifierModel::Mlp(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn loss_trace_has_initial_entry_plus_one_per_epoch() {
        let model = fit_mlp_blobs(25, 1);
        assert_eq!(model.train_loss_trace().len(), 26);
    }

    #[test]
    fn training_reduces_loss_markedly() {
        let model = fit_mlp_blobs(600, 1);
        let trace = model.train_loss_trace();
        assert!(
            trace.last().unwrap() < &(0.5 * trace[0]),
            "600 epochs should at least halve the loss: {} -> {}",
            trace[0],
            trace.last().unwrap()
        );
    }

    #[test]
    fn different_seeds_give_different_models() {
        let a = fit_mlp_blobs(10, 1);
        let b = fit_mlp_blobs(10, 2);
        let pa = a.predict_raw(&[0.6, 0.6]);
        let pb = b.predict_raw(&[0.6, 0.6]);
        assert_ne!(pa.to_bits(), pb.to_bits());
    }

    #[test]
    fn mini_batches_cover_every_row() {
        // Batched training must also converge; this catches chunking bugs
        // that silently drop the tail of the dataset.
        let data = separable_blobs(41, 23); // odd count -> ragged final batch
        let config = ClassifierConfig::Mlp(MlpConfig {
            epochs: 300,
            batch_size: 16,
            ..MlpConfig::default()
        });
        let model = fit(&data, &config, 5).unwrap();
        assert!(model.predict_proba(&[0.75, 0.75]).unwrap() > 0.6);
        assert!(model.predict_proba(&[0.25, 0.25]).unwrap() < 0.4);
    }
}
