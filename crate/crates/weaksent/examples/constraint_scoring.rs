//! The piecewise constraint score between two documents' opinion words, and
//! the posterior-regularization term it drives.
//!
//!     cargo run --example constraint_scoring

use ndarray::array;

use weaksent::model::{EncoderKind, ModelParams, PolarityDistribution};
use weaksent::regularizer::{pr_term, score_s, Branch, PrConfig};

fn main() {
    let cfg = PrConfig::default(); // gamma1 0.7, gamma2 -0.1, delta 1.0

    // hand-set 2-d opinion embeddings at known angles so the pairwise
    // cosines are easy to read off
    let mut params = ModelParams::init(&EncoderKind::Bag { dim: 4 }, 4, 6, 2, 2, 0);
    params.opinion_embeddings = array![
        [1.0, 0.0],   // 0: reference direction
        [0.98, 0.20], // 1: nearly parallel (cos ~ 0.98)
        [-1.0, 0.1],  // 2: nearly opposite (cos ~ -0.99)
        [0.5, 0.87],  // 3: ~60 degrees (cos ~ 0.5)
        [0.0, 1.0],   // 4: orthogonal (cos ~ 0)
        [0.71, 0.71], // 5: ~45 degrees
    ];

    let cases: [(&str, Vec<usize>, Vec<usize>); 4] = [
        ("strongly aligned pair", vec![0], vec![1]),
        ("strongly opposed pair", vec![0], vec![2]),
        ("both extremes present", vec![0], vec![1, 2]),
        ("nothing decisive", vec![0], vec![3, 4]),
    ];
    for (name, set_i, set_j) in &cases {
        let score = score_s(set_i, set_j, &params, &cfg);
        let branch = match score.branch {
            Branch::Similar => "similar",
            Branch::Dissimilar => "dissimilar",
            Branch::Mixed => "mixed",
            Branch::Neutral => "neutral",
        };
        println!(
            "{name:<24} max {:+.2} min {:+.2} -> S = {:+.2} ({branch})",
            score.max_cos, score.min_cos, score.value
        );
    }

    // R = -d(q_i, q_j) * S: a positive S rewards close posteriors, a
    // negative S rewards distant ones
    let q_close = PolarityDistribution::new(array![0.6, 0.4]);
    let q_far = PolarityDistribution::new(array![0.1, 0.9]);
    let q_anchor = PolarityDistribution::new(array![0.7, 0.3]);
    let similar = score_s(&[0], &[1], &params, &cfg);
    println!(
        "\nS = {:+.2}: R(close) = {:+.4}, R(far) = {:+.4}",
        similar.value,
        pr_term(&q_anchor, &q_close, &similar),
        pr_term(&q_anchor, &q_far, &similar),
    );
    let dissimilar = score_s(&[0], &[2], &params, &cfg);
    println!(
        "S = {:+.2}: R(close) = {:+.4}, R(far) = {:+.4}",
        dissimilar.value,
        pr_term(&q_anchor, &q_close, &dissimilar),
        pr_term(&q_anchor, &q_far, &dissimilar),
    );
}
