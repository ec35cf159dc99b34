//! F1 evaluation over seeds and the lexicon majority-voting baseline.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{Corpus, Document, Vocab};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::pretrain::{compute_pseudo_labels, pretrain_classifier, KeywordSpec};
use crate::training::{predict, train, TrainConfig};

/// Positive-class F1: harmonic mean of precision and recall, 0 when both
/// degenerate.
pub fn f1(predictions: &[usize], gold: &[usize], positive_class: usize) -> Result<f64> {
    if predictions.len() != gold.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    let (_, _, f) = precision_recall_f1(predictions, gold, positive_class);
    Ok(f)
}

pub fn precision_recall_f1(
    predictions: &[usize],
    gold: &[usize],
    class: usize,
) -> (f64, f64, f64) {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&p, &g) in predictions.iter().zip(gold) {
        match (p == class, g == class) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f)
}

pub fn macro_f1(predictions: &[usize], gold: &[usize], num_classes: usize) -> f64 {
    (0..num_classes)
        .map(|c| precision_recall_f1(predictions, gold, c).2)
        .sum::<f64>()
        / num_classes as f64
}

/// Word lists for the lexicon baseline. Words claimed by both polarities
/// are dropped at construction and reported back to the caller.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub positive: HashSet<String>,
    pub negative: HashSet<String>,
    pub negation_words: HashSet<String>,
}

impl Lexicon {
    pub fn new(
        positive: impl IntoIterator<Item = String>,
        negative: impl IntoIterator<Item = String>,
    ) -> (Lexicon, Vec<String>) {
        let pos: HashSet<String> = positive.into_iter().map(|w| w.to_lowercase()).collect();
        let neg: HashSet<String> = negative.into_iter().map(|w| w.to_lowercase()).collect();
        let conflicts: Vec<String> = pos.intersection(&neg).cloned().collect();
        let lexicon = Lexicon {
            positive: pos.difference(&neg).cloned().collect(),
            negative: neg
                .iter()
                .filter(|w| !conflicts.contains(w))
                .cloned()
                .collect(),
            negation_words: ["no", "not"].iter().map(|s| s.to_string()).collect(),
        };
        (lexicon, conflicts)
    }

    /// Load from two files, one word per line per polarity.
    pub fn load(positive_path: &Path, negative_path: &Path) -> Result<(Lexicon, Vec<String>)> {
        let read = |path: &Path| -> Result<Vec<String>> {
            Ok(fs::read_to_string(path)
                .map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    source: e,
                })?
                .lines()
                .map(|l| l.trim().to_string())
                .filter(|l| !l.is_empty())
                .collect())
        };
        Ok(Lexicon::new(read(positive_path)?, read(negative_path)?))
    }
}

/// Majority voting over the document's extracted opinion words, with a vote
/// flipped when a negation word occurs in the 3 tokens preceding it. Ties
/// and zero-vote documents get a uniformly random label.
/// Returns `(class, was_random)`.
pub fn lexicon_classify(
    doc: &Document,
    opinion_vocab: &Vocab,
    lexicon: &Lexicon,
    positive_class: usize,
    negative_class: usize,
    rng: &mut ChaCha8Rng,
) -> (usize, bool) {
    const NEGATION_WINDOW: usize = 3;
    let support: HashSet<&str> = doc
        .opinion_set()
        .into_iter()
        .filter_map(|w| opinion_vocab.word(w))
        .collect();
    let mut pos_votes = 0i64;
    let mut neg_votes = 0i64;
    for (t, token) in doc.tokens.iter().enumerate() {
        if !support.contains(token.as_str()) {
            continue;
        }
        let mut polarity = if lexicon.positive.contains(token) {
            1i64
        } else if lexicon.negative.contains(token) {
            -1i64
        } else {
            continue;
        };
        let window_start = t.saturating_sub(NEGATION_WINDOW);
        if doc.tokens[window_start..t]
            .iter()
            .any(|w| lexicon.negation_words.contains(w))
        {
            polarity = -polarity;
        }
        if polarity > 0 {
            pos_votes += 1;
        } else {
            neg_votes += 1;
        }
    }
    match pos_votes.cmp(&neg_votes) {
        std::cmp::Ordering::Greater => (positive_class, false),
        std::cmp::Ordering::Less => (negative_class, false),
        std::cmp::Ordering::Equal => {
            let label = if rng.random_range(0..2) == 0 {
                positive_class
            } else {
                negative_class
            };
            (label, true)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassPrf {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalResult {
    pub method: String,
    pub per_seed_f1: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over seeds.
    pub std: f64,
    pub macro_f1_mean: f64,
    pub per_class: Vec<ClassPrf>,
    pub tie_count: usize,
    pub failures: Vec<String>,
}

pub enum EvalMethod<'a> {
    Lexicon(&'a Lexicon),
    KeywordPretrain(&'a KeywordSpec),
    Variational(&'a KeywordSpec),
    VariationalPr(&'a KeywordSpec),
}

impl EvalMethod<'_> {
    fn name(&self) -> &'static str {
        match self {
            EvalMethod::Lexicon(_) => "lexicon",
            EvalMethod::KeywordPretrain(_) => "keyword-pretrain",
            EvalMethod::Variational(_) => "variational",
            EvalMethod::VariationalPr(_) => "variational-pr",
        }
    }
}

pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64).sqrt()
}

/// One prediction pass of the given method against the corpus, returning
/// predicted classes aligned with gold-labeled documents, plus a tie count.
fn run_once(
    method: &EvalMethod<'_>,
    corpus: &Corpus,
    config: &TrainConfig,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>, usize)> {
    let mut labels: Vec<usize> = Vec::new();
    let mut gold: Vec<usize> = Vec::new();
    let mut ties = 0usize;
    let mut push = |i: usize, label: usize, tied: bool, gold_store: &mut Vec<usize>| {
        if let Some(g) = corpus.gold_label(i) {
            labels.push(label);
            gold_store.push(g);
            if tied {
                ties += 1;
            }
        }
    };
    match method {
        EvalMethod::Lexicon(lexicon) => {
            let positive = 0;
            let negative = 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for (i, doc) in corpus.documents.iter().enumerate() {
                let (label, tied) = lexicon_classify(
                    doc,
                    &corpus.opinion_vocab,
                    lexicon,
                    positive,
                    negative,
                    &mut rng,
                );
                push(i, label, tied, &mut gold);
            }
        }
        EvalMethod::KeywordPretrain(keywords) => {
            let view = corpus.train_view();
            let (pseudo, _) = compute_pseudo_labels(view.documents, keywords)?;
            let mut params = ModelParams::init(
                &config.encoder,
                view.token_vocab.len(),
                view.opinion_vocab.len().max(1),
                view.class_labels.len(),
                config.opinion_dim,
                seed,
            );
            pretrain_classifier(
                view,
                &pseudo,
                &mut params,
                config.pretrain_epochs,
                config.pretrain_lr,
            )?;
            for (i, p) in predict(view, &params)?.into_iter().enumerate() {
                push(i, p.label, p.tied, &mut gold);
            }
        }
        EvalMethod::Variational(keywords) | EvalMethod::VariationalPr(keywords) => {
            let mut cfg = config.clone();
            cfg.seed = seed;
            match method {
                EvalMethod::Variational(_) => cfg.pr = None,
                EvalMethod::VariationalPr(_) => {
                    if cfg.pr.is_none() {
                        cfg.pr = Some(Default::default());
                    }
                }
                _ => unreachable!(),
            }
            let view = corpus.train_view();
            let report = train(view, keywords, &cfg)?;
            for (i, p) in predict(view, &report.params)?.into_iter().enumerate() {
                push(i, p.label, p.tied, &mut gold);
            }
        }
    }
    Ok((labels, gold, ties))
}

/// Train/predict once per seed and aggregate F1 mean and population std.
/// Follows the test-on-train protocol: gold labels are read only here,
/// never by the training path.
pub fn evaluate_runs(
    method: EvalMethod<'_>,
    corpus: &Corpus,
    config: &TrainConfig,
    seeds: &[u64],
) -> EvalResult {
    let positive_class = 0;
    let num_classes = corpus.class_labels.len();
    let mut per_seed_f1 = Vec::new();
    let mut macro_f1s = Vec::new();
    let mut pooled_pred: Vec<usize> = Vec::new();
    let mut pooled_gold: Vec<usize> = Vec::new();
    let mut tie_count = 0usize;
    let mut failures = Vec::new();
    for &seed in seeds {
        match run_once(&method, corpus, config, seed) {
            Ok((pred, gold, ties)) => {
                if gold.is_empty() {
                    failures.push(format!("seed {seed}: no gold-labeled documents"));
                    continue;
                }
                per_seed_f1.push(f1(&pred, &gold, positive_class).unwrap());
                macro_f1s.push(macro_f1(&pred, &gold, num_classes));
                tie_count += ties;
                pooled_pred.extend(pred);
                pooled_gold.extend(gold);
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    let mean = if per_seed_f1.is_empty() {
        0.0
    } else {
        per_seed_f1.iter().sum::<f64>() / per_seed_f1.len() as f64
    };
    let per_class = (0..num_classes)
        .map(|c| {
            let (precision, recall, f) = precision_recall_f1(&pooled_pred, &pooled_gold, c);
            ClassPrf {
                class: corpus.class_labels[c].clone(),
                precision,
                recall,
                f1: f,
            }
        })
        .collect();
    EvalResult {
        method: method.name().to_string(),
        std: population_std(&per_seed_f1),
        macro_f1_mean: if macro_f1s.is_empty() {
            0.0
        } else {
            macro_f1s.iter().sum::<f64>() / macro_f1s.len() as f64
        },
        mean,
        per_seed_f1,
        per_class,
        tie_count,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_predictions_give_one() {
        assert_eq!(f1(&[0, 1, 0], &[0, 1, 0], 0).unwrap(), 1.0);
    }

    #[test]
    fn hand_computed_confusion_counts() {
        // TP=2, FP=1, FN=1: P = R = 2/3, F1 = 2/3
        let pred = [0, 0, 0, 1, 1];
        let gold = [0, 0, 1, 0, 1];
        assert_abs_diff_eq!(f1(&pred, &gold, 0).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn all_wrong_gives_zero() {
        assert_eq!(f1(&[1, 1], &[0, 0], 0).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(f1(&[0], &[0, 1], 0).is_err());
    }

    #[test]
    fn f1_invariant_under_joint_permutation() {
        let pred = [0, 1, 0, 1, 1, 0];
        let gold = [0, 0, 1, 1, 1, 0];
        let base = f1(&pred, &gold, 0).unwrap();
        let perm = [3usize, 0, 5, 1, 4, 2];
        let pred_p: Vec<usize> = perm.iter().map(|&i| pred[i]).collect();
        let gold_p: Vec<usize> = perm.iter().map(|&i| gold[i]).collect();
        assert_eq!(f1(&pred_p, &gold_p, 0).unwrap(), base);
    }

    fn doc(tokens: &[&str], opinions: &[usize]) -> Document {
        Document {
            id: "d".into(),
            text: String::new(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            pseudo_label: None,
            opinion_words: opinions.to_vec(),
        }
    }

    fn vocab(words: &[&str]) -> Vocab {
        let mut v = Vocab::new();
        for w in words {
            v.add(w);
        }
        v
    }

    fn lexicon() -> Lexicon {
        Lexicon::new(
            ["good".to_string(), "great".to_string()],
            ["bad".to_string(), "awful".to_string()],
        )
        .0
    }

    #[test]
    fn unanimous_vote_wins() {
        let v = vocab(&["good", "great"]);
        let d = doc(&["good", "food", "great", "mood"], &[0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (label, tied) = lexicon_classify(&d, &v, &lexicon(), 0, 1, &mut rng);
        assert_eq!(label, 0);
        assert!(!tied);
    }

    #[test]
    fn negation_flips_a_vote_within_the_window() {
        let v = vocab(&["good"]);
        let d = doc(&["it", "was", "not", "very", "good"], &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (label, tied) = lexicon_classify(&d, &v, &lexicon(), 0, 1, &mut rng);
        assert_eq!(label, 1);
        assert!(!tied);
        // negation outside the 3-token window does not flip
        let far = doc(&["not", "a", "b", "c", "good"], &[0]);
        let (label, _) = lexicon_classify(&far, &v, &lexicon(), 0, 1, &mut rng);
        assert_eq!(label, 0);
    }

    #[test]
    fn tied_votes_go_random() {
        let v = vocab(&["good", "bad"]);
        let d = doc(&["good", "and", "bad"], &[0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut saw = [false, false];
        for _ in 0..50 {
            let (label, tied) = lexicon_classify(&d, &v, &lexicon(), 0, 1, &mut rng);
            assert!(tied);
            saw[label] = true;
        }
        assert!(saw[0] && saw[1]);
    }

    #[test]
    fn empty_lexicon_assigns_uniformly_at_random() {
        let v = vocab(&["word"]);
        let empty = Lexicon::new(Vec::new(), Vec::new()).0;
        let d = doc(&["word"], &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let mut positives = 0usize;
        for _ in 0..n {
            let (label, _) = lexicon_classify(&d, &v, &empty, 0, 1, &mut rng);
            if label == 0 {
                positives += 1;
            }
        }
        let rate = positives as f64 / n as f64;
        assert!((0.47..=0.53).contains(&rate), "positive rate {rate}");
    }

    #[test]
    fn conflicting_lexicon_entries_are_dropped() {
        let (lex, dropped) = Lexicon::new(
            ["fine".to_string(), "ok".to_string()],
            ["fine".to_string()],
        );
        assert_eq!(dropped, vec!["fine".to_string()]);
        assert!(!lex.positive.contains("fine"));
        assert!(!lex.negative.contains("fine"));
        assert!(lex.positive.contains("ok"));
    }

    #[test]
    fn swapped_lists_and_labels_preserve_f1() {
        // relabeling symmetry on a lexicon with deterministic votes
        let v = vocab(&["good", "bad"]);
        let docs = vec![
            doc(&["good", "meal"], &[0]),
            doc(&["bad", "meal"], &[1]),
            doc(&["good", "day"], &[0]),
        ];
        let gold = [0usize, 1, 0];
        let lex = lexicon();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pred: Vec<usize> = docs
            .iter()
            .map(|d| lexicon_classify(d, &v, &lex, 0, 1, &mut rng).0)
            .collect();
        let base = f1(&pred, &gold, 0).unwrap();

        let swapped = Lexicon::new(
            lex.negative.iter().cloned().collect::<Vec<_>>(),
            lex.positive.iter().cloned().collect::<Vec<_>>(),
        )
        .0;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pred_sw: Vec<usize> = docs
            .iter()
            .map(|d| lexicon_classify(d, &v, &swapped, 0, 1, &mut rng).0)
            .collect();
        let gold_sw: Vec<usize> = gold.iter().map(|&g| 1 - g).collect();
        assert_eq!(f1(&pred_sw, &gold_sw, 1).unwrap(), base);
    }

    #[test]
    fn population_std_basics() {
        assert_eq!(population_std(&[0.5]), 0.0);
        assert_abs_diff_eq!(population_std(&[1.0, 3.0]), 1.0, epsilon = 1e-12);
    }
}
