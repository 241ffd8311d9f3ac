//! Softmax classifiers with an optional tanh hidden layer, trained by plain
//! mini-batch gradient descent.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledData;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub config_id: String,
    /// 0 means a linear softmax model.
    pub hidden_width: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

/// Network parameters. `w1` is `hidden × input`, `w2` is
/// `classes × (hidden or input)`, both row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    input: usize,
    hidden: usize,
    classes: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

/// Parameter gradients, laid out like [`Mlp`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl Mlp {
    pub fn new<R: Rng + ?Sized>(input: usize, hidden: usize, classes: usize, rng: &mut R) -> Self {
        let mut xavier = |fan_in: usize, fan_out: usize| {
            let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
            (0..fan_in * fan_out).map(|_| rng.random_range(-a..a)).collect::<Vec<f64>>()
        };
        let w1 = if hidden > 0 { xavier(input, hidden) } else { Vec::new() };
        let feat = if hidden > 0 { hidden } else { input };
        let w2 = xavier(feat, classes);
        Self { input, hidden, classes, w1, b1: vec![0.0; hidden], w2, b2: vec![0.0; classes] }
    }

    pub fn input_dim(&self) -> usize {
        self.input
    }

    pub fn penultimate_dim(&self) -> usize {
        if self.hidden > 0 {
            self.hidden
        } else {
            self.input
        }
    }

    /// Hidden activations, or the input itself for a linear model.
    pub fn penultimate(&self, x: &[f64]) -> Vec<f64> {
        if self.hidden == 0 {
            return x.to_vec();
        }
        (0..self.hidden)
            .map(|h| {
                let w = &self.w1[h * self.input..(h + 1) * self.input];
                (self.b1[h] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).tanh()
            })
            .collect()
    }

    fn logits_from(&self, feat: &[f64]) -> Vec<f64> {
        let f = feat.len();
        (0..self.classes)
            .map(|c| {
                let w = &self.w2[c * f..(c + 1) * f];
                self.b2[c] + w.iter().zip(feat).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect()
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        self.logits_from(&self.penultimate(x))
    }

    pub fn predict(&self, x: &[f64]) -> u32 {
        argmax(&self.logits(x)) as u32
    }

    /// Mean cross-entropy over `rows` of `data` and its gradient.
    pub fn loss_and_gradients(&self, data: &LabeledData, rows: &[usize]) -> (f64, Gradients) {
        let f = self.penultimate_dim();
        let mut g = Gradients {
            w1: vec![0.0; self.w1.len()],
            b1: vec![0.0; self.hidden],
            w2: vec![0.0; self.w2.len()],
            b2: vec![0.0; self.classes],
        };
        let mut loss = 0.0;
        let scale = 1.0 / rows.len() as f64;
        let mut delta_hidden = vec![0.0; self.hidden];
        for &r in rows {
            let x = data.row(r);
            let y = data.y[r] as usize;
            let feat = self.penultimate(x);
            let z = self.logits_from(&feat);
            let lse = log_sum_exp(&z);
            loss += lse - z[y];
            let probs: Vec<f64> = z.iter().map(|v| (v - lse).exp()).collect();
            delta_hidden.iter_mut().for_each(|d| *d = 0.0);
            for (c, p) in probs.iter().enumerate() {
                let dz = (p - if c == y { 1.0 } else { 0.0 }) * scale;
                g.b2[c] += dz;
                let row = &mut g.w2[c * f..(c + 1) * f];
                for (gw, a) in row.iter_mut().zip(&feat) {
                    *gw += dz * a;
                }
                if self.hidden > 0 {
                    let w = &self.w2[c * f..(c + 1) * f];
                    for (d, wv) in delta_hidden.iter_mut().zip(w) {
                        *d += dz * wv;
                    }
                }
            }
            for h in 0..self.hidden {
                let dh = delta_hidden[h] * (1.0 - feat[h] * feat[h]);
                g.b1[h] += dh;
                let row = &mut g.w1[h * self.input..(h + 1) * self.input];
                for (gw, xv) in row.iter_mut().zip(x) {
                    *gw += dh * xv;
                }
            }
        }
        (loss * scale, g)
    }

    fn step(&mut self, g: &Gradients, lr: f64) {
        for (p, d) in
            [(&mut self.w1, &g.w1), (&mut self.b1, &g.b1), (&mut self.w2, &g.w2), (&mut self.b2, &g.b2)]
        {
            for (pv, dv) in p.iter_mut().zip(d) {
                *pv -= lr * dv;
            }
        }
    }

    /// Flat view of every parameter, in `w1, b1, w2, b2` order.
    pub fn parameters_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1.iter_mut().chain(self.b1.iter_mut()).chain(self.w2.iter_mut()).chain(self.b2.iter_mut())
    }
}

impl Gradients {
    pub fn flatten(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter().enumerate().fold(0, |best, (i, x)| if *x > v[best] { i } else { best })
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedClassifier {
    pub config: ClassifierConfig,
    pub model: Mlp,
    /// Mean mini-batch loss of every epoch.
    pub epoch_losses: Vec<f64>,
}

impl TrainedClassifier {
    /// Mean loss of the last epoch, or `None` after zero epochs.
    pub fn final_loss(&self) -> Option<f64> {
        self.epoch_losses.last().copied()
    }

    pub fn predict(&self, x: &[f64]) -> u32 {
        self.model.predict(x)
    }

    pub fn predictions(&self, data: &LabeledData) -> Vec<u32> {
        (0..data.len()).map(|i| self.predict(data.row(i))).collect()
    }

    pub fn correctness(&self, data: &LabeledData) -> Vec<bool> {
        (0..data.len()).map(|i| self.predict(data.row(i)) == data.y[i]).collect()
    }

    pub fn accuracy(&self, data: &LabeledData) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        self.correctness(data).iter().filter(|&&c| c).count() as f64 / data.len() as f64
    }

    /// Penultimate activations of every row, rounded to `f32`.
    pub fn features(&self, data: &LabeledData) -> Vec<f64> {
        (0..data.len()).flat_map(|i| self.model.penultimate(data.row(i))).map(|v| v as f32 as f64).collect()
    }
}

/// Trains on every row of `data`. The config seed drives both the
/// initialization and the per-epoch shuffles.
pub fn train_classifier(config: &ClassifierConfig, data: &LabeledData) -> Result<TrainedClassifier> {
    if data.is_empty() {
        return Err(Error::DegenerateInput(format!("no training rows for `{}`", config.config_id)));
    }
    if config.batch_size == 0 || config.learning_rate.is_nan() || config.learning_rate <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "`{}` needs a positive batch size and learning rate",
            config.config_id
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = Mlp::new(data.dim, config.hidden_width, data.num_labels as usize, &mut rng);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let (mut total, mut batches) = (0.0, 0usize);
        for batch in order.chunks(config.batch_size) {
            let (loss, g) = model.loss_and_gradients(data, batch);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { config: config.config_id.clone(), epoch });
            }
            model.step(&g, config.learning_rate);
            if !model.parameters_mut().all(|p| p.is_finite()) {
                return Err(Error::NonFiniteLoss { config: config.config_id.clone(), epoch });
            }
            total += loss;
            batches += 1;
        }
        epoch_losses.push(total / batches as f64);
    }
    Ok(TrainedClassifier { config: config.clone(), model, epoch_losses })
}
