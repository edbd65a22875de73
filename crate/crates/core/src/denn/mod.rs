//! The definition network: two word vectors and three POS tags in, one
//! word vector out.
//!
//! ```text
//! s   = LeakyReLU(W_h·v_h + W_m·v_m)
//! p_i = W_pos_i·ε(pos_i)              i ∈ {h, m, c}
//! out = W_3·LeakyReLU(W_2·LeakyReLU(W_1·[s; p_h; p_m; p_c]))
//! ```
//!
//! Parameters are stored as `f32`; all arithmetic runs in `f64`.

mod checkpoint;
mod train;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::defparse::DefPair;
use crate::embed_store::{self, EmbeddingTable};

pub use checkpoint::{load_model, read_model, save_model, write_model, CheckpointError};
pub use train::{mean_loss, train, Optimizer, TrainError, TrainOptions, TrainReport};

/// Tag used for a missing modifier.
pub const NONE_TAG: &str = "NONE";

#[derive(Debug, Error, PartialEq)]
pub enum DennError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{what}: expected length {expected}, got {found}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("POS index {index} out of range for a vocabulary of {size}")]
    PosIndex { index: usize, size: usize },
    #[error("unknown POS tag {0:?}")]
    UnknownTag(String),
    #[error("head word {0:?} is not in the embedding table")]
    UnusablePair(String),
    #[error("target vector has zero norm")]
    ZeroTarget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DennConfig {
    pub dim: usize,
    pub pos_vocab: Vec<String>,
    pub pos_dim: usize,
    pub hidden1: usize,
    pub hidden2: usize,
    pub leaky_slope: f64,
    pub dropout_p: f64,
    pub seed: u64,
}

/// Penn tags plus [`NONE_TAG`]; anything else maps to `X`.
pub fn default_pos_vocab() -> Vec<String> {
    [
        NONE_TAG, "X", "NN", "NNS", "NNP", "NNPS", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "JJ", "JJR",
        "JJS", "RB", "RBR", "RBS", "CD", "FW", "IN", "TO", "DT", "PRP", "PRP$", "WP", "WDT", "MD", "CC",
        "RP",
    ]
    .map(String::from)
    .to_vec()
}

impl Default for DennConfig {
    fn default() -> Self {
        DennConfig {
            dim: 300,
            pos_vocab: default_pos_vocab(),
            pos_dim: 16,
            hidden1: 512,
            hidden2: 512,
            leaky_slope: 0.01,
            dropout_p: 0.1,
            seed: 0,
        }
    }
}

impl DennConfig {
    pub fn validate(&self) -> Result<(), DennError> {
        let bad = |m: &str| Err(DennError::Config(m.to_owned()));
        if self.dim == 0 || self.pos_dim == 0 || self.hidden1 == 0 || self.hidden2 == 0 {
            return bad("all widths must be positive");
        }
        if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
            return bad("leaky_slope must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return bad("dropout_p must lie in [0, 1)");
        }
        if self.pos_vocab.is_empty() {
            return bad("pos_vocab is empty");
        }
        let mut sorted = self.pos_vocab.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.pos_vocab.len() {
            return bad("pos_vocab has duplicates");
        }
        Ok(())
    }

    pub fn input_width(&self) -> usize {
        self.dim + 3 * self.pos_dim
    }

    /// Index of a tag; unknown tags fall back to `X` when the vocabulary
    /// has it.
    pub fn pos_index(&self, tag: &str) -> Result<usize, DennError> {
        let find = |t: &str| self.pos_vocab.iter().position(|v| v == t);
        find(tag)
            .or_else(|| find("X"))
            .ok_or_else(|| DennError::UnknownTag(tag.to_owned()))
    }
}

/// A fully connected layer, `out = W·x + b`, with `W` row-major
/// (`n_out` rows of `n_in`).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    pub w: Vec<f32>,
    pub b: Vec<f32>,
}

impl Dense {
    fn zeros(n_in: usize, n_out: usize) -> Self {
        Dense {
            n_in,
            n_out,
            w: vec![0.0; n_in * n_out],
            b: vec![0.0; n_out],
        }
    }

    fn he_uniform(n_in: usize, n_out: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = (6.0 / n_in as f64).sqrt();
        let mut d = Dense::zeros(n_in, n_out);
        for w in &mut d.w {
            *w = rng.gen_range(-limit..limit) as f32;
        }
        d
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, (row, b)) in out.iter_mut().zip(self.w.chunks_exact(self.n_in).zip(&self.b)) {
            let mut acc = f64::from(*b);
            for (w, xi) in row.iter().zip(x) {
                acc += f64::from(*w) * xi;
            }
            *o = acc;
        }
    }

    /// Accumulates parameter gradients for upstream `g` and input `x`, and
    /// adds `Wᵀ·g` into `gx` when given.
    fn backward(&self, x: &[f64], g: &[f64], gw: &mut [f64], gb: &mut [f64], gx: Option<&mut [f64]>) {
        for (o, &go) in g.iter().enumerate() {
            if go == 0.0 {
                continue;
            }
            gb[o] += go;
            let row = &mut gw[o * self.n_in..(o + 1) * self.n_in];
            for (r, xi) in row.iter_mut().zip(x) {
                *r += go * xi;
            }
        }
        if let Some(gx) = gx {
            for (o, &go) in g.iter().enumerate() {
                if go == 0.0 {
                    continue;
                }
                let row = &self.w[o * self.n_in..(o + 1) * self.n_in];
                for (gxi, w) in gx.iter_mut().zip(row) {
                    *gxi += go * f64::from(*w);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DennModel {
    pub config: DennConfig,
    pub w_h: Dense,
    pub w_m: Dense,
    /// POS embedding matrix, `pos_vocab.len()` rows of `pos_dim`.
    pub eps: Vec<f32>,
    pub w_pos: [Dense; 3],
    pub w1: Dense,
    pub w2: Dense,
    pub w3: Dense,
}

/// Names of the parameter tensors in checkpoint and gradient order.
pub const TENSOR_NAMES: [&str; 17] = [
    "W_h", "b_h", "W_m", "b_m", "eps", "W_pos_h", "b_pos_h", "W_pos_m", "b_pos_m", "W_pos_c", "b_pos_c",
    "W_1", "b_1", "W_2", "b_2", "W_3", "b_3",
];

/// Gradients with the same layout as [`DennModel::tensors`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub Vec<Vec<f64>>);

impl Gradients {
    pub fn zeros_like(model: &DennModel) -> Self {
        Gradients(model.tensors().iter().map(|t| vec![0.0; t.len()]).collect())
    }

    fn scale(&mut self, k: f64) {
        for t in &mut self.0 {
            for g in t {
                *g *= k;
            }
        }
    }
}

pub struct Example<'a> {
    pub vec_h: &'a [f32],
    pub vec_m: &'a [f32],
    /// Indices of pos_h, pos_m and pos_c in the POS vocabulary.
    pub pos: [usize; 3],
}

/// One training pair: the two definition word vectors and tags, and the
/// pretrained vector of the defined word.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainExample {
    pub vec_h: Vec<f32>,
    pub vec_m: Vec<f32>,
    pub pos_h: usize,
    pub pos_m: usize,
    pub pos_c: usize,
    pub target: Vec<f32>,
}

impl TrainExample {
    pub fn input(&self) -> Example<'_> {
        Example {
            vec_h: &self.vec_h,
            vec_m: &self.vec_m,
            pos: [self.pos_h, self.pos_m, self.pos_c],
        }
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct Cache {
    vh: Vec<f64>,
    vm: Vec<f64>,
    pos: [usize; 3],
    z_s: Vec<f64>,
    mask_s: Vec<f64>,
    e: [Vec<f64>; 3],
    h: Vec<f64>,
    z1: Vec<f64>,
    mask1: Vec<f64>,
    a1: Vec<f64>,
    z2: Vec<f64>,
    mask2: Vec<f64>,
    a2: Vec<f64>,
    pub output: Vec<f64>,
}

fn leaky(x: f64, slope: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        slope * x
    }
}

fn leaky_grad(x: f64, slope: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        slope
    }
}

impl DennModel {
    /// He-uniform weights, zero biases, POS embeddings uniform in
    /// [-0.05, 0.05], all drawn from `config.seed`.
    pub fn new(config: DennConfig) -> Result<Self, DennError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let d = config.dim;
        let p = config.pos_dim;
        let w_h = Dense::he_uniform(d, d, &mut rng);
        let w_m = Dense::he_uniform(d, d, &mut rng);
        let eps = (0..config.pos_vocab.len() * p)
            .map(|_| rng.gen_range(-0.05f64..0.05) as f32)
            .collect();
        let w_pos = [
            Dense::he_uniform(p, p, &mut rng),
            Dense::he_uniform(p, p, &mut rng),
            Dense::he_uniform(p, p, &mut rng),
        ];
        let w1 = Dense::he_uniform(config.input_width(), config.hidden1, &mut rng);
        let w2 = Dense::he_uniform(config.hidden1, config.hidden2, &mut rng);
        let w3 = Dense::he_uniform(config.hidden2, d, &mut rng);
        Ok(DennModel {
            config,
            w_h,
            w_m,
            eps,
            w_pos,
            w1,
            w2,
            w3,
        })
    }

    /// A model with every parameter set to zero.
    pub fn zeros(config: DennConfig) -> Result<Self, DennError> {
        let mut m = DennModel::new(config)?;
        for t in m.tensors_mut() {
            t.iter_mut().for_each(|x| *x = 0.0);
        }
        Ok(m)
    }

    pub fn tensors(&self) -> [&[f32]; 17] {
        let [ph, pm, pc] = &self.w_pos;
        [
            &self.w_h.w,
            &self.w_h.b,
            &self.w_m.w,
            &self.w_m.b,
            &self.eps,
            &ph.w,
            &ph.b,
            &pm.w,
            &pm.b,
            &pc.w,
            &pc.b,
            &self.w1.w,
            &self.w1.b,
            &self.w2.w,
            &self.w2.b,
            &self.w3.w,
            &self.w3.b,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f32>; 17] {
        let [ph, pm, pc] = &mut self.w_pos;
        [
            &mut self.w_h.w,
            &mut self.w_h.b,
            &mut self.w_m.w,
            &mut self.w_m.b,
            &mut self.eps,
            &mut ph.w,
            &mut ph.b,
            &mut pm.w,
            &mut pm.b,
            &mut pc.w,
            &mut pc.b,
            &mut self.w1.w,
            &mut self.w1.b,
            &mut self.w2.w,
            &mut self.w2.b,
            &mut self.w3.w,
            &mut self.w3.b,
        ]
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    fn check(&self, x: &Example) -> Result<(), DennError> {
        let d = self.config.dim;
        for (what, v) in [("vec_h", x.vec_h), ("vec_m", x.vec_m)] {
            if v.len() != d {
                return Err(DennError::Shape {
                    what,
                    expected: d,
                    found: v.len(),
                });
            }
        }
        let size = self.config.pos_vocab.len();
        for &index in &x.pos {
            if index >= size {
                return Err(DennError::PosIndex { index, size });
            }
        }
        Ok(())
    }

    /// Forward pass. Dropout is applied only when `dropout_rng` is given.
    pub fn forward_cached(
        &self,
        x: &Example,
        mut dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<Cache, DennError> {
        self.check(x)?;
        let c = &self.config;
        let slope = c.leaky_slope;
        let mut mask = |n: usize| -> Vec<f64> {
            match dropout_rng.as_deref_mut() {
                Some(rng) if c.dropout_p > 0.0 => {
                    let keep = 1.0 / (1.0 - c.dropout_p);
                    (0..n)
                        .map(|_| if rng.gen::<f64>() < c.dropout_p { 0.0 } else { keep })
                        .collect()
                }
                _ => vec![1.0; n],
            }
        };
        let vh: Vec<f64> = x.vec_h.iter().map(|&v| f64::from(v)).collect();
        let vm: Vec<f64> = x.vec_m.iter().map(|&v| f64::from(v)).collect();
        let mut z_s = vec![0.0; c.dim];
        let mut tmp = vec![0.0; c.dim];
        self.w_h.apply(&vh, &mut z_s);
        self.w_m.apply(&vm, &mut tmp);
        z_s.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);
        let mask_s = mask(c.dim);
        let mut h = Vec::with_capacity(c.input_width());
        h.extend(z_s.iter().zip(&mask_s).map(|(&z, &m)| leaky(z, slope) * m));
        let p = c.pos_dim;
        let e: [Vec<f64>; 3] = std::array::from_fn(|i| {
            self.eps[x.pos[i] * p..(x.pos[i] + 1) * p]
                .iter()
                .map(|&v| f64::from(v))
                .collect()
        });
        let mut proj = vec![0.0; p];
        for (layer, e) in self.w_pos.iter().zip(&e) {
            layer.apply(e, &mut proj);
            h.extend_from_slice(&proj);
        }
        let mut z1 = vec![0.0; c.hidden1];
        self.w1.apply(&h, &mut z1);
        let mask1 = mask(c.hidden1);
        let a1: Vec<f64> = z1
            .iter()
            .zip(&mask1)
            .map(|(&z, &m)| leaky(z, slope) * m)
            .collect();
        let mut z2 = vec![0.0; c.hidden2];
        self.w2.apply(&a1, &mut z2);
        let mask2 = mask(c.hidden2);
        let a2: Vec<f64> = z2
            .iter()
            .zip(&mask2)
            .map(|(&z, &m)| leaky(z, slope) * m)
            .collect();
        let mut output = vec![0.0; c.dim];
        self.w3.apply(&a2, &mut output);
        Ok(Cache {
            vh,
            vm,
            pos: x.pos,
            z_s,
            mask_s,
            e,
            h,
            z1,
            mask1,
            a1,
            z2,
            mask2,
            a2,
            output,
        })
    }

    /// Forward pass returning the output as `f32`.
    pub fn forward(&self, x: &Example, dropout_rng: Option<&mut ChaCha8Rng>) -> Result<Vec<f32>, DennError> {
        Ok(self
            .forward_cached(x, dropout_rng)?
            .output
            .iter()
            .map(|&v| v as f32)
            .collect())
    }

    /// Accumulates into `grads` the gradient of the loss whose derivative
    /// with respect to the output is `g_out`.
    pub fn backward(&self, cache: &Cache, g_out: &[f64], grads: &mut Gradients) {
        let c = &self.config;
        let slope = c.leaky_slope;
        let [gwh, gbh, gwm, gbm, geps, gph, gbph, gpm, gbpm, gpc, gbpc, gw1, gb1, gw2, gb2, gw3, gb3] =
            &mut grads.0[..]
        else {
            unreachable!("gradient layout has 17 tensors")
        };
        let mut g_a2 = vec![0.0; c.hidden2];
        self.w3.backward(&cache.a2, g_out, gw3, gb3, Some(&mut g_a2));
        let g_z2: Vec<f64> = g_a2
            .iter()
            .zip(&cache.mask2)
            .zip(&cache.z2)
            .map(|((g, m), z)| g * m * leaky_grad(*z, slope))
            .collect();
        let mut g_a1 = vec![0.0; c.hidden1];
        self.w2.backward(&cache.a1, &g_z2, gw2, gb2, Some(&mut g_a1));
        let g_z1: Vec<f64> = g_a1
            .iter()
            .zip(&cache.mask1)
            .zip(&cache.z1)
            .map(|((g, m), z)| g * m * leaky_grad(*z, slope))
            .collect();
        let mut g_h = vec![0.0; c.input_width()];
        self.w1.backward(&cache.h, &g_z1, gw1, gb1, Some(&mut g_h));
        let g_zs: Vec<f64> = g_h[..c.dim]
            .iter()
            .zip(&cache.mask_s)
            .zip(&cache.z_s)
            .map(|((g, m), z)| g * m * leaky_grad(*z, slope))
            .collect();
        self.w_h.backward(&cache.vh, &g_zs, gwh, gbh, None);
        self.w_m.backward(&cache.vm, &g_zs, gwm, gbm, None);
        let p = c.pos_dim;
        let pos_grads: [(&mut Vec<f64>, &mut Vec<f64>); 3] = [(gph, gbph), (gpm, gbpm), (gpc, gbpc)];
        for (i, (gw, gb)) in pos_grads.into_iter().enumerate() {
            let g_p = &g_h[c.dim + i * p..c.dim + (i + 1) * p];
            let mut g_e = vec![0.0; p];
            self.w_pos[i].backward(&cache.e[i], g_p, gw, gb, Some(&mut g_e));
            let row = cache.pos[i] * p;
            for (dst, g) in geps[row..row + p].iter_mut().zip(&g_e) {
                *dst += g;
            }
        }
    }

    /// Loss and gradient set for one example.
    pub fn loss_and_gradients(
        &self,
        example: &TrainExample,
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(Loss, Gradients), DennError> {
        let cache = self.forward_cached(&example.input(), dropout_rng)?;
        let (l, g_out) = loss_with_gradient(&cache.output, &example.target)?;
        let mut grads = Gradients::zeros_like(self);
        self.backward(&cache, &g_out, &mut grads);
        Ok((l, grads))
    }
}

/// Value of `1 - cos(output, target)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loss {
    pub value: f64,
    /// The output had zero norm and the fixed penalty was used.
    pub zero_norm_output: bool,
}

/// Penalty for an output with zero norm.
pub const ZERO_NORM_PENALTY: f64 = 2.0;

pub fn loss<T: Copy + Into<f64>>(output: &[T], target: &[T]) -> Result<Loss, DennError> {
    let o: Vec<f64> = output.iter().map(|&x| x.into()).collect();
    let t: Vec<f64> = target.iter().map(|&x| x.into()).collect();
    loss_with_gradient(&o, &t).map(|(l, _)| l)
}

/// Loss and its derivative with respect to the output.
pub fn loss_with_gradient<T: Copy + Into<f64>>(
    output: &[f64],
    target: &[T],
) -> Result<(Loss, Vec<f64>), DennError> {
    if output.len() != target.len() {
        return Err(DennError::Shape {
            what: "target",
            expected: output.len(),
            found: target.len(),
        });
    }
    let t: Vec<f64> = target.iter().map(|&x| x.into()).collect();
    let nt = embed_store::norm(&t);
    if nt == 0.0 {
        return Err(DennError::ZeroTarget);
    }
    let no = embed_store::norm(output);
    if no == 0.0 {
        return Ok((
            Loss {
                value: ZERO_NORM_PENALTY,
                zero_norm_output: true,
            },
            vec![0.0; output.len()],
        ));
    }
    let cos = embed_store::dot(output, &t) / (no * nt);
    let grad = output
        .iter()
        .zip(&t)
        .map(|(o, t)| -(t / (no * nt) - cos * o / (no * no)))
        .collect();
    Ok((
        Loss {
            value: 1.0 - cos,
            zero_norm_output: false,
        },
        grad,
    ))
}

/// Finds `word` in `table`, trying the lowercase form second.
pub fn lookup_folded<'t>(table: &'t EmbeddingTable, word: &str) -> Option<&'t [f32]> {
    table.lookup(word).or_else(|| table.lookup(&word.to_lowercase()))
}

/// Head vector, modifier vector and the three POS indices.
pub type PairInput = (Vec<f32>, Vec<f32>, [usize; 3]);

/// Assembles the network input for a definition pair. A missing or
/// out-of-vocabulary modifier becomes a zero vector tagged [`NONE_TAG`].
pub fn pair_input(
    config: &DennConfig,
    table: &EmbeddingTable,
    pair: &DefPair,
    pos_c: &str,
) -> Result<PairInput, DennError> {
    if table.dim() != config.dim {
        return Err(DennError::Shape {
            what: "embedding table",
            expected: config.dim,
            found: table.dim(),
        });
    }
    let vh = lookup_folded(table, &pair.w_h).ok_or_else(|| DennError::UnusablePair(pair.w_h.clone()))?;
    let modifier = pair
        .w_m
        .as_deref()
        .and_then(|w| lookup_folded(table, w))
        .zip(pair.pos_m.as_deref());
    let (vm, tag_m) = match modifier {
        Some((v, tag)) => (v.to_vec(), tag),
        None => (vec![0.0; config.dim], NONE_TAG),
    };
    let pos = [
        config.pos_index(&pair.pos_h)?,
        config.pos_index(tag_m)?,
        config.pos_index(pos_c)?,
    ];
    Ok((vh.to_vec(), vm, pos))
}

/// Embedding for an out-of-vocabulary word from its definition pair.
pub fn predict_oov(
    model: &DennModel,
    table: &EmbeddingTable,
    pair: &DefPair,
    pos_c: &str,
) -> Result<Vec<f32>, DennError> {
    let (vh, vm, pos) = pair_input(&model.config, table, pair, pos_c)?;
    model.forward(
        &Example {
            vec_h: &vh,
            vec_m: &vm,
            pos,
        },
        None,
    )
}

#[cfg(test)]
mod tests;
