//! The full training loop: keyword pretraining followed by mini-batch
//! ascent on the regularized variational objective, plus prediction.

mod grid;

pub use grid::{grid_search, GridResult, GridRow, GridSpec};

use ndarray::Array1;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::TrainView;
use crate::error::{Error, Result};
use crate::model::{EncoderKind, ModelParams, PolarityDistribution};
use crate::objective::{
    batch_eval_with_gradients, draw_batch_samples, BatchDoc, BatchEvalOptions, NegSampling,
    NegativeSampler,
};
use crate::pretrain::{compute_pseudo_labels, pretrain_classifier, KeywordSpec, PretrainMetrics};
use crate::regularizer::{batch_constraints, PrConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum OptimizerKind {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl OptimizerKind {
    pub fn adam_default() -> OptimizerKind {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Entropy weight.
    pub alpha: f64,
    /// Posterior-regularization settings; `None` is the plain variational
    /// code path (no constraint machinery runs at all).
    pub pr: Option<PrConfig>,
    /// Negative samples per positive opinion word.
    pub negatives: usize,
    pub neg_sampling: NegSampling,
    pub batch_size: usize,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
    pub encoder: EncoderKind,
    pub opinion_dim: usize,
    pub pretrain_epochs: usize,
    pub pretrain_lr: f64,
    /// Token embeddings become untrainable once pretraining finishes.
    pub freeze_embeddings_after_pretrain: bool,
    pub optimizer: OptimizerKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 0.1,
            pr: None,
            negatives: 5,
            neg_sampling: NegSampling::Uniform,
            batch_size: 32,
            lr: 0.01,
            epochs: 10,
            seed: 0,
            encoder: EncoderKind::Bag { dim: 100 },
            opinion_dim: 100,
            pretrain_epochs: 5,
            pretrain_lr: 0.1,
            freeze_embeddings_after_pretrain: true,
            optimizer: OptimizerKind::Sgd,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.negatives < 1 || self.batch_size < 1 || self.opinion_dim < 1 {
            return Err(Error::InvalidConfig("counts must be >= 1".into()));
        }
        if self.lr <= 0.0 || self.pretrain_lr <= 0.0 {
            return Err(Error::InvalidConfig("learning rates must be > 0".into()));
        }
        if let Some(pr) = &self.pr {
            pr.validate()?;
        }
        Ok(())
    }

    /// The active regularizer, if any: a zero beta is the plain path.
    fn active_pr(&self) -> Option<&PrConfig> {
        self.pr.as_ref().filter(|p| p.beta > 0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub epoch: usize,
    pub step: usize,
    pub j: f64,
    pub l2: f64,
    pub pr: f64,
    pub entropy_mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub j: f64,
    pub l2: f64,
    pub pr: f64,
    pub entropy_mean: f64,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub per_epoch: Vec<EpochRecord>,
    pub per_step: Vec<StepRecord>,
    pub params: ModelParams,
    pub pretrain: PretrainMetrics,
    pub wall_time_secs: f64,
    pub seed: u64,
    /// Documents excluded from the main phase for lack of opinion words.
    pub skipped_docs: usize,
}

struct Optimizer {
    kind: OptimizerKind,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Optimizer {
    fn new(kind: OptimizerKind, dim: usize) -> Optimizer {
        Optimizer {
            kind,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }

    /// Ascent step on flat parameters.
    fn step(&mut self, params: &mut Vec<f64>, grads: &[f64], lr: f64) {
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grads) {
                    *p += lr * g;
                }
            }
            OptimizerKind::Adam { beta1, beta2, eps } => {
                self.t += 1;
                let bc1 = 1.0 - beta1.powi(self.t as i32);
                let bc2 = 1.0 - beta2.powi(self.t as i32);
                for i in 0..params.len() {
                    let g = grads[i];
                    self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
                    self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
                    let mhat = self.m[i] / bc1;
                    let vhat = self.v[i] / bc2;
                    params[i] += lr * mhat / (vhat.sqrt() + eps);
                }
            }
        }
    }
}

/// Pretrain from keywords, then run mini-batch ascent on the combined
/// objective. Fully deterministic given the seed.
pub fn train(view: TrainView<'_>, keywords: &KeywordSpec, config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    let start = std::time::Instant::now();

    let batch_docs: Vec<BatchDoc> = view
        .documents
        .iter()
        .map(|d| BatchDoc::from_document(d, view.token_vocab))
        .collect();
    let usable: Vec<usize> = (0..batch_docs.len())
        .filter(|&i| !batch_docs[i].opinion_words.is_empty())
        .collect();
    if usable.is_empty() {
        return Err(Error::NoOpinionWords);
    }
    let skipped_docs = batch_docs.len() - usable.len();

    let (pseudo_labels, _) = compute_pseudo_labels(view.documents, keywords)?;
    let mut params = ModelParams::init(
        &config.encoder,
        view.token_vocab.len(),
        view.opinion_vocab.len(),
        view.class_labels.len(),
        config.opinion_dim,
        config.seed,
    );
    let pretrain = pretrain_classifier(
        view,
        &pseudo_labels,
        &mut params,
        config.pretrain_epochs,
        config.pretrain_lr,
    )?;
    let train_embeddings = !config.freeze_embeddings_after_pretrain;

    let sampler = NegativeSampler::new(
        &config.neg_sampling,
        config.negatives,
        view.opinion_vocab.len(),
        || {
            let mut freq = vec![0.0; view.opinion_vocab.len()];
            for doc in &batch_docs {
                for &w in &doc.opinion_words {
                    freq[w] += 1.0;
                }
            }
            freq
        },
    );

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut optimizer = Optimizer::new(
        config.optimizer.clone(),
        params.flat(train_embeddings).len(),
    );
    let active_pr = config.active_pr().cloned();

    let mut per_epoch = Vec::with_capacity(config.epochs);
    let mut per_step = Vec::new();
    let mut global_step = 0usize;
    for epoch in 0..config.epochs {
        let mut order = usable.clone();
        order.shuffle(&mut rng);
        let mut epoch_j = 0.0;
        let mut epoch_l2 = 0.0;
        let mut epoch_pr = 0.0;
        let mut entropy_sum = 0.0;
        let mut steps_in_epoch = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let docs: Vec<BatchDoc> = chunk.iter().map(|&i| batch_docs[i].clone()).collect();
            let samples = draw_batch_samples(&docs, &sampler, &mut rng);
            let constraints = active_pr
                .as_ref()
                .map(|pr| batch_constraints(&docs, &params, pr));
            let opts = BatchEvalOptions {
                alpha: config.alpha,
                samples: Some(&samples),
                pr: active_pr
                    .as_ref()
                    .zip(constraints.as_deref())
                    .map(|(c, cs)| (c, cs)),
            };
            let (value, grads) = batch_eval_with_gradients(&docs, &params, &opts)?;
            if !value.total.is_finite() {
                return Err(Error::NonFinite {
                    what: format!("objective at step {global_step}"),
                });
            }
            let mut flat = params.flat(train_embeddings);
            optimizer.step(&mut flat, &grads.flat(train_embeddings), config.lr);
            params.assign_flat(train_embeddings, &flat);

            per_step.push(StepRecord {
                epoch,
                step: global_step,
                j: value.total,
                l2: value.l2.total,
                pr: value.pr,
                entropy_mean: value.entropy_mean,
            });
            epoch_j += value.total;
            epoch_l2 += value.l2.total;
            epoch_pr += value.pr;
            entropy_sum += value.entropy_mean;
            steps_in_epoch += 1;
            global_step += 1;
        }
        per_epoch.push(EpochRecord {
            epoch,
            j: epoch_j,
            l2: epoch_l2,
            pr: epoch_pr,
            entropy_mean: if steps_in_epoch == 0 {
                0.0
            } else {
                entropy_sum / steps_in_epoch as f64
            },
        });
    }

    Ok(TrainReport {
        per_epoch,
        per_step,
        params,
        pretrain,
        wall_time_secs: start.elapsed().as_secs_f64(),
        seed: config.seed,
        skipped_docs,
    })
}

#[derive(Debug, Clone)]
pub struct Prediction {
    pub id: String,
    pub label: usize,
    pub probs: Array1<f64>,
    pub tied: bool,
}

/// Argmax prediction with deterministic tie-break toward the first class.
pub fn predict_one(
    id: &str,
    token_ids: &[usize],
    params: &ModelParams,
) -> Result<Prediction> {
    let enc = params.encode(id, token_ids)?;
    let q: PolarityDistribution = params.polarity_posterior(&enc.vector)?;
    let (label, tied) = q.argmax();
    Ok(Prediction {
        id: id.to_string(),
        label,
        probs: q.probs().clone(),
        tied,
    })
}

/// Predict every document in a view against the model vocabulary.
pub fn predict(view: TrainView<'_>, params: &ModelParams) -> Result<Vec<Prediction>> {
    view.documents
        .iter()
        .map(|d| predict_one(&d.id, &view.token_vocab.ids_or_unk(&d.tokens), params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{generate, SyntheticConfig};
    use ndarray::array;

    fn small_setup() -> (crate::corpus::Corpus, KeywordSpec) {
        let cfg = SyntheticConfig {
            num_docs: 40,
            ..SyntheticConfig::default()
        };
        generate(&cfg)
    }

    fn fast_config() -> TrainConfig {
        TrainConfig {
            epochs: 2,
            pretrain_epochs: 2,
            encoder: EncoderKind::Bag { dim: 8 },
            opinion_dim: 8,
            batch_size: 8,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn beta_zero_is_bit_identical_to_plain_path() {
        let (corpus, keywords) = small_setup();
        let mut with_zero_beta = fast_config();
        with_zero_beta.pr = Some(PrConfig {
            beta: 0.0,
            ..PrConfig::default()
        });
        let plain = fast_config();
        let r1 = train(corpus.train_view(), &keywords, &with_zero_beta).unwrap();
        let r2 = train(corpus.train_view(), &keywords, &plain).unwrap();
        assert_eq!(r1.params.flat(true), r2.params.flat(true));
        assert_eq!(r1.per_step.len(), r2.per_step.len());
        for (a, b) in r1.per_step.iter().zip(&r2.per_step) {
            assert_eq!(a.j, b.j);
        }
    }

    #[test]
    fn training_is_deterministic_given_seed() {
        let (corpus, keywords) = small_setup();
        let mut cfg = fast_config();
        cfg.pr = Some(PrConfig::default());
        let r1 = train(corpus.train_view(), &keywords, &cfg).unwrap();
        let r2 = train(corpus.train_view(), &keywords, &cfg).unwrap();
        assert_eq!(r1.params.flat(true), r2.params.flat(true));
    }

    #[test]
    fn j_decomposes_into_l2_plus_beta_pr_each_step() {
        let (corpus, keywords) = small_setup();
        let mut cfg = fast_config();
        cfg.pr = Some(PrConfig {
            beta: 0.4,
            ..PrConfig::default()
        });
        let report = train(corpus.train_view(), &keywords, &cfg).unwrap();
        for step in &report.per_step {
            assert!((step.j - (step.l2 + 0.4 * step.pr)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_epochs_keeps_pretrain_state() {
        let (corpus, keywords) = small_setup();
        let mut cfg = fast_config();
        cfg.epochs = 0;
        let report = train(corpus.train_view(), &keywords, &cfg).unwrap();
        assert!(report.per_epoch.is_empty());
        assert!(report.per_step.is_empty());
    }

    #[test]
    fn frozen_embeddings_are_bit_identical_after_main_phase() {
        let (corpus, keywords) = small_setup();
        let mut cfg = fast_config();
        cfg.epochs = 0;
        let after_pretrain = train(corpus.train_view(), &keywords, &cfg).unwrap();
        cfg.epochs = 3;
        let trained = train(corpus.train_view(), &keywords, &cfg).unwrap();
        assert_eq!(
            after_pretrain.params.encoder.embeddings(),
            trained.params.encoder.embeddings()
        );
    }

    #[test]
    fn no_opinion_words_is_an_error() {
        let (mut corpus, keywords) = small_setup();
        for doc in &mut corpus.documents {
            doc.opinion_words.clear();
        }
        let err = train(corpus.train_view(), &keywords, &fast_config()).unwrap_err();
        assert!(matches!(err, Error::NoOpinionWords));
    }

    #[test]
    fn predict_argmax_and_tie_rules() {
        let params = ModelParams::init(&EncoderKind::Bag { dim: 4 }, 6, 3, 2, 4, 1);
        let mut p = params.clone();
        p.class_weights.fill(0.0); // all ties
        let pred = predict_one("d", &[2, 3], &p).unwrap();
        assert_eq!(pred.label, 0);
        assert!(pred.tied);
        // shift invariance of argmax: add the same row to both classes
        let mut shifted = params.clone();
        let delta = array![0.3, -0.1, 0.2, 0.05];
        for c in 0..2 {
            let updated = &shifted.class_weights.row(c) + &delta;
            shifted.class_weights.row_mut(c).assign(&updated);
        }
        let ids = [2usize, 3, 4];
        let a = predict_one("d", &ids, &params).unwrap();
        let b = predict_one("d", &ids, &shifted).unwrap();
        assert_eq!(a.label, b.label);
        // empty document errors
        assert!(predict_one("d", &[], &params).is_err());
    }

    #[test]
    fn adam_runs_and_differs_from_sgd() {
        let (corpus, keywords) = small_setup();
        let mut cfg = fast_config();
        cfg.optimizer = OptimizerKind::adam_default();
        let adam = train(corpus.train_view(), &keywords, &cfg).unwrap();
        let sgd = train(corpus.train_view(), &keywords, &fast_config()).unwrap();
        assert_ne!(adam.params.flat(true), sgd.params.flat(true));
    }
}
