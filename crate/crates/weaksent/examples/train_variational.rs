//! Train the variational objective with and without the pairwise posterior
//! regularizer on a synthetic corpus, and compare F1 across seeds.
//!
//!     cargo run --release --example train_variational

use weaksent::evaluation::{evaluate_runs, EvalMethod};
use weaksent::model::EncoderKind;
use weaksent::regularizer::PrConfig;
use weaksent::synthetic::{generate, SyntheticConfig};
use weaksent::training::TrainConfig;

fn main() {
    let (corpus, keywords) = generate(&SyntheticConfig {
        num_docs: 600,
        ..SyntheticConfig::default()
    });

    let base = TrainConfig {
        encoder: EncoderKind::Bag { dim: 32 },
        opinion_dim: 32,
        epochs: 5,
        ..TrainConfig::default()
    };
    let with_pr = TrainConfig {
        pr: Some(PrConfig {
            beta: 0.3,
            ..PrConfig::default()
        }),
        ..base.clone()
    };
    let seeds = [0, 1, 2];

    let plain = evaluate_runs(EvalMethod::Variational(&keywords), &corpus, &base, &seeds);
    let regularized = evaluate_runs(
        EvalMethod::VariationalPr(&keywords),
        &corpus,
        &with_pr,
        &seeds,
    );

    println!("method            mean F1   std");
    for r in [&plain, &regularized] {
        println!("{:<17} {:<9.4} {:.4}", r.method, r.mean, r.std);
    }
    println!("\nper-seed F1:");
    println!("  {}: {:?}", plain.method, plain.per_seed_f1);
    println!("  {}: {:?}", regularized.method, regularized.per_seed_f1);
}
