//! Model parameters and the two classifiers: the document-polarity softmax
//! and the opinion-word scoring function.

mod checkpoint;
mod encoder;

pub use checkpoint::{load_checkpoint, save_checkpoint, vocab_hash, Checkpoint};
pub use encoder::{ConvFilterBank, EncodeCache, Encoded, EncoderGrads, EncoderParams};

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Document encoder architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EncoderKind {
    /// Mean of trainable token embeddings.
    Bag { dim: usize },
    /// Convolution over token embeddings with per-width filter banks,
    /// ReLU, and max-pooling per filter.
    Conv {
        dim: usize,
        widths: Vec<usize>,
        filters_per_width: usize,
    },
}

impl EncoderKind {
    /// The full-scale convolutional encoder: widths {2,3,4,5}, 100 filters each.
    pub fn conv_default(dim: usize) -> EncoderKind {
        EncoderKind::Conv {
            dim,
            widths: vec![2, 3, 4, 5],
            filters_per_width: 100,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            EncoderKind::Bag { dim } => *dim,
            EncoderKind::Conv {
                widths,
                filters_per_width,
                ..
            } => widths.len() * filters_per_width,
        }
    }
}

/// Per-class probability vector q(C|x).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarityDistribution {
    probs: Array1<f64>,
}

impl PolarityDistribution {
    pub fn new(probs: Array1<f64>) -> PolarityDistribution {
        let sum: f64 = probs.sum();
        debug_assert!((sum - 1.0).abs() < 1e-9, "probabilities sum to {sum}");
        debug_assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
        PolarityDistribution { probs }
    }

    pub fn probs(&self) -> &Array1<f64> {
        &self.probs
    }

    pub fn get(&self, class: usize) -> f64 {
        self.probs[class]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Argmax class with deterministic tie-break toward the lowest index.
    /// Returns `(class, tied)`.
    pub fn argmax(&self) -> (usize, bool) {
        let mut best = 0;
        for (c, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = c;
            }
        }
        let tied = self
            .probs
            .iter()
            .enumerate()
            .any(|(c, &p)| c != best && p == self.probs[best]);
        (best, tied)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelParams {
    pub encoder: EncoderParams,
    /// One weight vector per class, encoder-output dimension.
    pub class_weights: Array2<f64>,
    /// One embedding row per opinion-vocabulary word.
    pub opinion_embeddings: Array2<f64>,
    /// One score vector per class, opinion-embedding dimension.
    pub class_score_vectors: Array2<f64>,
}

impl ModelParams {
    /// Seeded uniform initialization in [-0.1, 0.1]; the PAD embedding row
    /// stays zero and untrainable.
    pub fn init(
        kind: &EncoderKind,
        token_vocab_size: usize,
        opinion_vocab_size: usize,
        num_classes: usize,
        opinion_dim: usize,
        seed: u64,
    ) -> ModelParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut uniform = |rows: usize, cols: usize| -> Array2<f64> {
            Array2::from_shape_fn((rows, cols), |_| rng.random_range(-0.1..0.1))
        };
        let encoder = EncoderParams::init(kind, token_vocab_size, &mut uniform);
        let out_dim = kind.output_dim();
        ModelParams {
            encoder,
            class_weights: uniform(num_classes, out_dim),
            opinion_embeddings: uniform(opinion_vocab_size, opinion_dim),
            class_score_vectors: uniform(num_classes, opinion_dim),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.class_weights.nrows()
    }

    pub fn opinion_vocab_size(&self) -> usize {
        self.opinion_embeddings.nrows()
    }

    /// Encode a document given its token ids. Empty documents are an error.
    pub fn encode(&self, doc_id: &str, token_ids: &[usize]) -> Result<Encoded> {
        if token_ids.is_empty() {
            return Err(Error::EmptyDocument {
                id: doc_id.to_string(),
            });
        }
        Ok(self.encoder.forward(token_ids))
    }

    /// Softmax over class logits w_c . x, computed with max-subtraction.
    pub fn polarity_posterior(&self, x: &Array1<f64>) -> Result<PolarityDistribution> {
        let logits = self.class_weights.dot(x);
        if logits.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "class logits".into(),
            });
        }
        Ok(PolarityDistribution::new(softmax(&logits)))
    }

    /// The bilinear score a_c . w_o.
    pub fn opinion_score(&self, word: usize, class: usize) -> Result<f64> {
        if word >= self.opinion_embeddings.nrows() {
            return Err(Error::OpinionIndexOutOfRange {
                index: word,
                size: self.opinion_embeddings.nrows(),
            });
        }
        Ok(self
            .class_score_vectors
            .row(class)
            .dot(&self.opinion_embeddings.row(word)))
    }

    /// Full-softmax probability of an opinion word given a class. Exact
    /// partition over the opinion vocabulary; oracle/testing use only.
    pub fn opinion_softmax(&self, word: usize, class: usize) -> Result<f64> {
        let score = self.opinion_score(word, class)?;
        Ok((score - self.opinion_log_partition(class)).exp())
    }

    /// log sum_w exp(a_c . w), via logsumexp.
    pub fn opinion_log_partition(&self, class: usize) -> f64 {
        let scores = self
            .opinion_embeddings
            .dot(&self.class_score_vectors.row(class));
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
    }

    /// Flatten trainable parameters in a fixed block order. The PAD
    /// embedding row is always excluded; token embeddings can be excluded
    /// as a whole when frozen.
    pub fn flat(&self, train_embeddings: bool) -> Vec<f64> {
        let mut out = Vec::new();
        self.encoder.append_flat(train_embeddings, &mut out);
        out.extend(self.class_weights.iter());
        out.extend(self.opinion_embeddings.iter());
        out.extend(self.class_score_vectors.iter());
        out
    }

    /// Inverse of [`ModelParams::flat`].
    pub fn assign_flat(&mut self, train_embeddings: bool, flat: &[f64]) {
        let mut offset = 0;
        self.encoder.assign_flat(train_embeddings, flat, &mut offset);
        for v in self.class_weights.iter_mut() {
            *v = flat[offset];
            offset += 1;
        }
        for v in self.opinion_embeddings.iter_mut() {
            *v = flat[offset];
            offset += 1;
        }
        for v in self.class_score_vectors.iter_mut() {
            *v = flat[offset];
            offset += 1;
        }
        assert_eq!(offset, flat.len(), "flat parameter length mismatch");
    }

    /// Ascent step: params += lr * grads. Used by plain SGD.
    pub fn sgd_step(&mut self, grads: &ParamGrads, lr: f64, train_embeddings: bool) {
        let mut flat = self.flat(train_embeddings);
        let gflat = grads.flat(train_embeddings);
        for (p, g) in flat.iter_mut().zip(&gflat) {
            *p += lr * g;
        }
        self.assign_flat(train_embeddings, &flat);
    }
}

/// Gradient record shaped like [`ModelParams`].
#[derive(Debug, Clone)]
pub struct ParamGrads {
    pub encoder: EncoderGrads,
    pub class_weights: Array2<f64>,
    pub opinion_embeddings: Array2<f64>,
    pub class_score_vectors: Array2<f64>,
}

impl ParamGrads {
    pub fn zeros_like(params: &ModelParams) -> ParamGrads {
        ParamGrads {
            encoder: EncoderGrads::zeros_like(&params.encoder),
            class_weights: Array2::zeros(params.class_weights.raw_dim()),
            opinion_embeddings: Array2::zeros(params.opinion_embeddings.raw_dim()),
            class_score_vectors: Array2::zeros(params.class_score_vectors.raw_dim()),
        }
    }

    /// Same flattening order as [`ModelParams::flat`].
    pub fn flat(&self, train_embeddings: bool) -> Vec<f64> {
        let mut out = Vec::new();
        self.encoder.append_flat(train_embeddings, &mut out);
        out.extend(self.class_weights.iter());
        out.extend(self.opinion_embeddings.iter());
        out.extend(self.class_score_vectors.iter());
        out
    }

    /// Name of the parameter block holding flat coordinate `idx`; used in
    /// non-finite gradient errors.
    pub fn block_of(&self, train_embeddings: bool, idx: usize) -> &'static str {
        let enc = self.encoder.flat_len(train_embeddings);
        if idx < enc {
            return self.encoder.block_name(train_embeddings, idx);
        }
        let mut rest = idx - enc;
        if rest < self.class_weights.len() {
            return "class_weights";
        }
        rest -= self.class_weights.len();
        if rest < self.opinion_embeddings.len() {
            return "opinion_embeddings";
        }
        "class_score_vectors"
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &Array1<f64>) -> Array1<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut exps: Array1<f64> = logits.mapv(|z| (z - max).exp());
    let sum = exps.sum();
    exps.mapv_inplace(|e| e / sum);
    exps
}
