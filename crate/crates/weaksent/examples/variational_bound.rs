//! The variational lower bound on one document's opinion-word
//! log-likelihood, and the negative-sampling approximation used in training.
//!
//!     cargo run --example variational_bound

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ndarray::array;
use weaksent::model::{softmax, EncoderKind, ModelParams, PolarityDistribution};
use weaksent::objective::{elbo_exact, neg_sampled_term, NegativeSampler, PriorHandling};

fn main() {
    let vocab = 6;
    let mut params = ModelParams::init(&EncoderKind::Bag { dim: 4 }, 4, vocab, 2, 8, 42);
    // scale the scores up so the classes disagree visibly about the words
    params.opinion_embeddings *= 10.0;
    params.class_score_vectors *= 10.0;
    // one opinion word, so the bound can be closed exactly
    let opinion_words = vec![3usize];

    // true log-likelihood: marginalize the class out per opinion word
    let num_classes = params.num_classes();
    let mut log_lik = 0.0;
    for &w in &opinion_words {
        let mut p = 0.0;
        for c in 0..num_classes {
            let log_p_w = params.opinion_score(w, c).unwrap() - params.opinion_log_partition(c);
            p += (1.0 / num_classes as f64) * log_p_w.exp();
        }
        log_lik += p.ln();
    }

    // any posterior q gives a lower bound; the bound is tight when q equals
    // the true posterior p(class | opinion word)
    for (name, q) in [
        ("uniform q      ", PolarityDistribution::new(array![0.5, 0.5])),
        ("confident q    ", PolarityDistribution::new(array![0.95, 0.05])),
        ("true posterior ", true_posterior(&params, &opinion_words)),
    ] {
        let bound = elbo_exact(&q, &opinion_words, &params, PriorHandling::Uniform).unwrap();
        println!(
            "{name} bound {bound:+.6}  log-likelihood {log_lik:+.6}  slack {:.2e}",
            log_lik - bound
        );
    }

    // training sidesteps the full softmax with sampled negatives
    let sampler = NegativeSampler::uniform(3, vocab);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let negs = sampler.draw(0, &mut rng);
    println!(
        "\nnegative-sampling term for word 0, class 0, negatives {:?}: {:+.6}",
        negs.samples,
        neg_sampled_term(0, 0, &negs, &params).unwrap()
    );
}

fn true_posterior(params: &ModelParams, opinion_words: &[usize]) -> PolarityDistribution {
    let num_classes = params.num_classes();
    let logits = ndarray::Array1::from_shape_fn(num_classes, |c| {
        opinion_words
            .iter()
            .map(|&w| params.opinion_score(w, c).unwrap() - params.opinion_log_partition(c))
            .sum::<f64>()
    });
    PolarityDistribution::new(softmax(&logits))
}
