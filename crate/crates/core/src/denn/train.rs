use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{DennError, DennModel, Gradients, TrainExample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    Sgd,
    Adam,
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimizer::Sgd => "sgd",
            Optimizer::Adam => "adam",
        })
    }
}

impl FromStr for Optimizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sgd" => Ok(Optimizer::Sgd),
            "adam" => Ok(Optimizer::Adam),
            other => Err(format!("unknown optimizer {other:?} (sgd, adam)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub optimizer: Optimizer,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Seeds shuffling and dropout.
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            optimizer: Optimizer::Adam,
            lr: 1e-3,
            batch_size: 64,
            epochs: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainReport {
    /// Mean training loss of each epoch.
    pub epoch_losses: Vec<f64>,
    pub steps: usize,
    /// Examples whose output had zero norm.
    pub zero_norm_outputs: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error(transparent)]
    Model(#[from] DennError),
    #[error("no training examples")]
    Empty,
    #[error("invalid options: {0}")]
    Options(String),
    #[error("non-finite value at epoch {epoch}, step {step}")]
    NonFinite { epoch: usize, step: usize },
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

enum State {
    Sgd,
    Adam {
        t: i32,
        m: Vec<Vec<f64>>,
        v: Vec<Vec<f64>>,
    },
}

impl State {
    fn new(optimizer: Optimizer, model: &DennModel) -> Self {
        match optimizer {
            Optimizer::Sgd => State::Sgd,
            Optimizer::Adam => {
                let z = Gradients::zeros_like(model).0;
                State::Adam {
                    t: 0,
                    m: z.clone(),
                    v: z,
                }
            }
        }
    }

    fn step(&mut self, model: &mut DennModel, grads: &Gradients, lr: f64) {
        match self {
            State::Sgd => {
                for (p, g) in model.tensors_mut().into_iter().zip(&grads.0) {
                    for (p, g) in p.iter_mut().zip(g) {
                        *p = (f64::from(*p) - lr * g) as f32;
                    }
                }
            }
            State::Adam { t, m, v } => {
                *t += 1;
                let c1 = 1.0 - BETA1.powi(*t);
                let c2 = 1.0 - BETA2.powi(*t);
                let tensors = model
                    .tensors_mut()
                    .into_iter()
                    .zip(&grads.0)
                    .zip(m.iter_mut().zip(v.iter_mut()));
                for ((p, g), (m, v)) in tensors {
                    for (((p, g), m), v) in p.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
                        *m = BETA1 * *m + (1.0 - BETA1) * g;
                        *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                        let update = lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
                        *p = (f64::from(*p) - update) as f32;
                    }
                }
            }
        }
    }
}

/// Mini-batch training on the mean cosine loss. Stops with
/// [`TrainError::NonFinite`] as soon as a loss or parameter stops being
/// finite.
pub fn train(
    model: &mut DennModel,
    data: &[TrainExample],
    options: &TrainOptions,
) -> Result<TrainReport, TrainError> {
    if data.is_empty() {
        return Err(TrainError::Empty);
    }
    if options.batch_size == 0 {
        return Err(TrainError::Options("batch_size must be positive".into()));
    }
    if !(options.lr >= 0.0 && options.lr.is_finite()) {
        return Err(TrainError::Options("lr must be finite and non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut state = State::new(options.optimizer, model);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut report = TrainReport::default();
    for epoch in 0..options.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(options.batch_size) {
            let mut grads = Gradients::zeros_like(model);
            for &i in batch {
                let cache = model.forward_cached(&data[i].input(), Some(&mut rng))?;
                let (loss, g_out) = super::loss_with_gradient(&cache.output, &data[i].target)?;
                if !loss.value.is_finite() {
                    return Err(TrainError::NonFinite {
                        epoch,
                        step: report.steps,
                    });
                }
                if loss.zero_norm_output {
                    report.zero_norm_outputs += 1;
                    log::warn!("zero-norm output at epoch {epoch}, example {i}");
                }
                total += loss.value;
                model.backward(&cache, &g_out, &mut grads);
            }
            grads.scale(1.0 / batch.len() as f64);
            state.step(model, &grads, options.lr);
            report.steps += 1;
            if !model.is_finite() {
                return Err(TrainError::NonFinite {
                    epoch,
                    step: report.steps,
                });
            }
        }
        let mean = total / data.len() as f64;
        log::info!("epoch {} loss {mean:.6}", epoch + 1);
        report.epoch_losses.push(mean);
    }
    Ok(report)
}

/// Mean loss over `data` with dropout off.
pub fn mean_loss(model: &DennModel, data: &[TrainExample]) -> Result<f64, DennError> {
    let mut total = 0.0;
    for ex in data {
        let out = model.forward_cached(&ex.input(), None)?.output;
        total += super::loss_with_gradient(&out, &ex.target)?.0.value;
    }
    Ok(total / data.len().max(1) as f64)
}
