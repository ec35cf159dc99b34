//! Two-stage hyperparameter grid search for the posterior regularizer.
//!
//! Stage one sweeps the cosine thresholds `(gamma1, gamma2)` at a fixed base
//! `beta`; stage two sweeps `beta` at the best threshold pair. Each cell is
//! scored by mean positive-class F1 on a held-out labeled set, averaged over
//! the requested seeds.

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::evaluation::{f1, population_std};
use crate::pretrain::KeywordSpec;
use crate::regularizer::PrConfig;
use crate::training::{predict_one, train, TrainConfig};

#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    pub gamma1: Vec<f64>,
    pub gamma2: Vec<f64>,
    pub beta: Vec<f64>,
    pub seeds: Vec<u64>,
}

fn range(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step).round() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            gamma1: range(0.5, 1.0, 0.1),
            gamma2: range(-0.5, 0.0, 0.1),
            beta: range(0.1, 1.0, 0.1),
            seeds: vec![0],
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.gamma1.is_empty()
            || self.gamma2.is_empty()
            || self.beta.is_empty()
            || self.seeds.is_empty()
        {
            return Err(Error::InvalidConfig(
                "grid axes and seed list must be non-empty".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub gamma1: f64,
    pub gamma2: f64,
    pub beta: f64,
    pub mean_f1: f64,
    pub std_f1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridResult {
    pub stage1: Vec<GridRow>,
    pub stage2: Vec<GridRow>,
    pub best: GridRow,
}

impl GridResult {
    /// The base configuration with the winning regularizer settings applied.
    pub fn best_config(&self, base: &TrainConfig) -> TrainConfig {
        let mut cfg = base.clone();
        let template = base.pr.clone().unwrap_or_default();
        cfg.pr = Some(PrConfig {
            beta: self.best.beta,
            gamma1: self.best.gamma1,
            gamma2: self.best.gamma2,
            ..template
        });
        cfg
    }
}

/// Dev-set F1 (positive class = index 0) of one trained model, averaged over
/// seeds. Dev documents are mapped through the training vocabulary.
fn eval_cell(
    train_corpus: &Corpus,
    dev: &Corpus,
    keywords: &KeywordSpec,
    cfg: &TrainConfig,
    seeds: &[u64],
) -> Result<(f64, f64)> {
    let view = train_corpus.train_view();
    let mut scores = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let mut run = cfg.clone();
        run.seed = seed;
        let report = train(view, keywords, &run)?;
        let mut pred = Vec::new();
        let mut gold = Vec::new();
        for (i, doc) in dev.documents.iter().enumerate() {
            if let Some(g) = dev.gold_label(i) {
                let ids = view.token_vocab.ids_or_unk(&doc.tokens);
                pred.push(predict_one(&doc.id, &ids, &report.params)?.label);
                gold.push(g);
            }
        }
        if gold.is_empty() {
            return Err(Error::InvalidConfig(
                "dev corpus has no gold-labeled documents".into(),
            ));
        }
        scores.push(f1(&pred, &gold, 0)?);
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    Ok((mean, population_std(&scores)))
}

/// Two-stage search. Ties break toward the earlier cell, so results are
/// deterministic given the spec and seeds.
pub fn grid_search(
    train_corpus: &Corpus,
    dev: &Corpus,
    keywords: &KeywordSpec,
    base: &TrainConfig,
    spec: &GridSpec,
) -> Result<GridResult> {
    spec.validate()?;
    base.validate()?;
    let template = base.pr.clone().unwrap_or_default();

    let mut stage1 = Vec::new();
    for &g1 in &spec.gamma1 {
        for &g2 in &spec.gamma2 {
            if g2 > g1 {
                continue; // infeasible threshold pair
            }
            let mut cfg = base.clone();
            cfg.pr = Some(PrConfig {
                gamma1: g1,
                gamma2: g2,
                ..template.clone()
            });
            let (mean_f1, std_f1) = eval_cell(train_corpus, dev, keywords, &cfg, &spec.seeds)?;
            stage1.push(GridRow {
                gamma1: g1,
                gamma2: g2,
                beta: template.beta,
                mean_f1,
                std_f1,
            });
        }
    }
    if stage1.is_empty() {
        return Err(Error::InvalidConfig(
            "no feasible (gamma1, gamma2) pair in the grid".into(),
        ));
    }
    let best1 = stage1
        .iter()
        .cloned()
        .reduce(|a, b| if b.mean_f1 > a.mean_f1 { b } else { a })
        .unwrap();

    let mut stage2 = Vec::new();
    for &beta in &spec.beta {
        let mut cfg = base.clone();
        cfg.pr = Some(PrConfig {
            beta,
            gamma1: best1.gamma1,
            gamma2: best1.gamma2,
            ..template.clone()
        });
        let (mean_f1, std_f1) = eval_cell(train_corpus, dev, keywords, &cfg, &spec.seeds)?;
        stage2.push(GridRow {
            gamma1: best1.gamma1,
            gamma2: best1.gamma2,
            beta,
            mean_f1,
            std_f1,
        });
    }
    let best = stage2
        .iter()
        .cloned()
        .reduce(|a, b| if b.mean_f1 > a.mean_f1 { b } else { a })
        .unwrap();

    Ok(GridResult {
        stage1,
        stage2,
        best,
    })
}
