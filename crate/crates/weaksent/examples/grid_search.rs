//! Two-stage hyperparameter search for the regularizer: threshold pair
//! first at a fixed weight, then the weight with thresholds pinned.
//!
//!     cargo run --release --example grid_search

use weaksent::model::EncoderKind;
use weaksent::synthetic::{generate, SyntheticConfig};
use weaksent::training::{grid_search, GridSpec, TrainConfig};

fn main() {
    let cfg = SyntheticConfig {
        num_docs: 300,
        ..SyntheticConfig::default()
    };
    let (train_corpus, keywords) = generate(&cfg);
    let (dev_corpus, _) = generate(&SyntheticConfig {
        num_docs: 100,
        seed: cfg.seed + 1,
        ..cfg
    });

    let base = TrainConfig {
        encoder: EncoderKind::Bag { dim: 24 },
        opinion_dim: 24,
        epochs: 3,
        ..TrainConfig::default()
    };
    // a trimmed grid so the example finishes quickly; GridSpec::default()
    // carries the full 6 x 6 and 10-point sweeps
    let spec = GridSpec {
        gamma1: vec![0.5, 0.7, 0.9],
        gamma2: vec![-0.3, -0.1],
        beta: vec![0.1, 0.3, 0.5],
        seeds: vec![0, 1],
    };

    let result = grid_search(&train_corpus, &dev_corpus, &keywords, &base, &spec).unwrap();

    println!("stage 1 (threshold pair at beta {:.1}):", result.stage1[0].beta);
    for row in &result.stage1 {
        println!(
            "  gamma1 {:+.1} gamma2 {:+.1} -> dev F1 {:.4} (std {:.4})",
            row.gamma1, row.gamma2, row.mean_f1, row.std_f1
        );
    }
    println!("stage 2 (weight sweep):");
    for row in &result.stage2 {
        println!(
            "  beta {:.1} -> dev F1 {:.4} (std {:.4})",
            row.beta, row.mean_f1, row.std_f1
        );
    }
    println!(
        "best: gamma1 {:+.1} gamma2 {:+.1} beta {:.1} (dev F1 {:.4})",
        result.best.gamma1, result.best.gamma2, result.best.beta, result.best.mean_f1
    );
    let chosen = result.best_config(&base);
    println!("winning config: {:?}", chosen.pr.unwrap());
}
