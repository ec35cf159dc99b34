//! Pseudo-label a corpus by keyword matching and pretrain the polarity
//! classifier on those labels alone.
//!
//!     cargo run --example keyword_pretrain

use weaksent::model::{EncoderKind, ModelParams};
use weaksent::pretrain::{compute_pseudo_labels, pretrain_classifier, KeywordSpec};
use weaksent::synthetic::{generate, SyntheticConfig};
use weaksent::training::predict;

fn main() {
    let cfg = SyntheticConfig {
        num_docs: 400,
        ..SyntheticConfig::default()
    };
    let (corpus, keywords) = generate(&cfg);
    println!("built-in keyword sets also exist, e.g. {:?}", KeywordSpec::yelp());

    let view = corpus.train_view();
    let (pseudo, counts) = compute_pseudo_labels(view.documents, &keywords).unwrap();
    println!(
        "pseudo-labeled {} of {} documents (per class: {counts:?})",
        pseudo.iter().flatten().count(),
        view.documents.len()
    );

    let mut params = ModelParams::init(
        &EncoderKind::Bag { dim: 32 },
        view.token_vocab.len(),
        view.opinion_vocab.len(),
        view.class_labels.len(),
        32,
        0,
    );
    let metrics = pretrain_classifier(view, &pseudo, &mut params, 30, 0.5).unwrap();
    println!(
        "pretrain: {} epochs, final loss {:.4}, pseudo accuracy {:.4}",
        metrics.epochs, metrics.final_loss, metrics.pseudo_accuracy
    );

    // measure against gold, which the training path never saw
    let mut correct = 0;
    let mut total = 0;
    for (i, p) in predict(view, &params).unwrap().iter().enumerate() {
        if let Some(g) = corpus.gold_label(i) {
            total += 1;
            if p.label == g {
                correct += 1;
            }
        }
    }
    println!("gold accuracy after pretraining: {:.4}", correct as f64 / total as f64);
}
