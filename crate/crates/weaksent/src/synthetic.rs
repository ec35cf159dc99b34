//! Synthetic corpus generator for tests, examples, and benchmarking.
//!
//! Documents are bags of filler tokens plus a handful of opinion words drawn
//! from two polarity clusters and a small shared pool. The shared pool and
//! the cross-cluster flip rate control task difficulty.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{default_class_labels, Corpus, Document};
use crate::evaluation::Lexicon;
use crate::pretrain::KeywordSpec;

#[derive(Debug, Clone, Copy)]
pub struct SyntheticConfig {
    pub num_docs: usize,
    pub seed: u64,
    /// Filler tokens per document, on top of the opinion words.
    pub filler_per_doc: usize,
    pub filler_vocab: usize,
    /// Opinion words per document.
    pub opinion_per_doc: usize,
    /// Distinct opinion words per polarity cluster.
    pub cluster_size: usize,
    /// Polarity-neutral opinion words shared by both classes.
    pub shared_words: usize,
    /// Probability that an opinion slot draws from the shared pool.
    pub noise_rate: f64,
    /// Probability that an opinion slot draws from the opposite cluster.
    pub flip_rate: f64,
    /// Cluster words per class promoted to pretraining keywords.
    pub keyword_count: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            num_docs: 2000,
            seed: 0,
            filler_per_doc: 12,
            filler_vocab: 200,
            opinion_per_doc: 4,
            cluster_size: 30,
            shared_words: 8,
            noise_rate: 0.10,
            flip_rate: 0.05,
            keyword_count: 3,
        }
    }
}

fn cluster_word(class: usize, i: usize) -> String {
    match class {
        0 => format!("pos{i:02}"),
        _ => format!("neg{i:02}"),
    }
}

/// Generate a balanced, gold-labeled corpus with opinion words already
/// attached, plus the matching keyword spec. Deterministic in the seed.
pub fn generate(cfg: &SyntheticConfig) -> (Corpus, KeywordSpec) {
    assert!(cfg.cluster_size >= cfg.keyword_count);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shared: Vec<String> = (0..cfg.shared_words).map(|i| format!("mix{i:02}")).collect();
    let fillers: Vec<String> = (0..cfg.filler_vocab).map(|i| format!("word{i:03}")).collect();

    let mut documents = Vec::with_capacity(cfg.num_docs);
    let mut gold = Vec::with_capacity(cfg.num_docs);
    let mut extracted: HashMap<String, Vec<String>> = HashMap::new();
    for d in 0..cfg.num_docs {
        let class = d % 2; // balanced by construction
        let mut opinions = Vec::with_capacity(cfg.opinion_per_doc);
        for _ in 0..cfg.opinion_per_doc {
            let r: f64 = rng.random();
            let word = if r < cfg.noise_rate && !shared.is_empty() {
                shared[rng.random_range(0..shared.len())].clone()
            } else if r < cfg.noise_rate + cfg.flip_rate {
                cluster_word(1 - class, rng.random_range(0..cfg.cluster_size))
            } else {
                cluster_word(class, rng.random_range(0..cfg.cluster_size))
            };
            opinions.push(word);
        }
        let mut tokens: Vec<String> = opinions.clone();
        for _ in 0..cfg.filler_per_doc {
            tokens.push(fillers[rng.random_range(0..fillers.len())].clone());
        }
        tokens.shuffle(&mut rng);
        let id = format!("syn-{d:05}");
        extracted.insert(id.clone(), opinions);
        documents.push(Document {
            id: id.clone(),
            text: tokens.join(" "),
            tokens,
            pseudo_label: None,
            opinion_words: Vec::new(),
        });
        gold.push(Some(class));
    }

    let mut corpus = Corpus::from_documents(documents, gold, default_class_labels());
    corpus.set_opinion_words(&extracted);

    let keywords = KeywordSpec::new(
        (0..2)
            .map(|c| (0..cfg.keyword_count).map(|i| cluster_word(c, i)).collect())
            .collect(),
    )
    .expect("generated keywords are valid");
    (corpus, keywords)
}

/// A lexicon that knows only the first half of each polarity cluster,
/// mimicking the partial coverage of a real word list.
pub fn half_coverage_lexicon(cfg: &SyntheticConfig) -> Lexicon {
    let half = cfg.cluster_size / 2;
    Lexicon::new(
        (0..half).map(|i| cluster_word(0, i)),
        (0..half).map(|i| cluster_word(1, i)),
    )
    .0
}
