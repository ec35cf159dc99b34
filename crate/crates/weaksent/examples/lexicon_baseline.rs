//! The lexicon baseline: majority voting over extracted opinion words with
//! negation handling, no training at all.
//!
//!     cargo run --example lexicon_baseline

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weaksent::corpus::{tokenize, Document};
use weaksent::evaluation::{evaluate_runs, EvalMethod, Lexicon};
use weaksent::synthetic::{generate, half_coverage_lexicon, SyntheticConfig};
use weaksent::training::TrainConfig;

fn main() {
    // a single hand-run classification, showing the negation window
    let (lexicon, _) = Lexicon::new(
        ["good".to_string(), "great".to_string()],
        ["bad".to_string(), "awful".to_string()],
    );
    let mut vocab = weaksent::corpus::Vocab::new();
    let good = vocab.add("good");
    let doc = Document {
        id: "d1".into(),
        text: "the food was not good".into(),
        tokens: tokenize("the food was not good"),
        pseudo_label: None,
        opinion_words: vec![good],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (label, tied) =
        weaksent::evaluation::lexicon_classify(&doc, &vocab, &lexicon, 0, 1, &mut rng);
    println!(
        "{:?} -> class {label} (tie: {tied}) — 'not' flips the vote",
        doc.text
    );

    // full corpus run with a lexicon that only knows half the opinion words
    let cfg = SyntheticConfig {
        num_docs: 500,
        ..SyntheticConfig::default()
    };
    let (corpus, _) = generate(&cfg);
    let partial = half_coverage_lexicon(&cfg);
    let result = evaluate_runs(
        EvalMethod::Lexicon(&partial),
        &corpus,
        &TrainConfig::default(),
        &[0, 1, 2],
    );
    println!(
        "\nlexicon baseline: mean F1 {:.4} (std {:.4}), {} randomly broken ties",
        result.mean, result.std, result.tie_count
    );
    for row in &result.per_class {
        println!(
            "  {:<9} precision {:.4} recall {:.4} f1 {:.4}",
            row.class, row.precision, row.recall, row.f1
        );
    }
}
