//! Pairwise posterior regularization: a distance penalty between two
//! documents' polarity posteriors, weighted by a piecewise similarity score
//! over their extracted opinion words.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, PolarityDistribution};
use crate::objective::BatchDoc;

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct PrConfig {
    /// Regularization weight applied to the summed pair terms.
    pub beta: f64,
    /// Similarity threshold on max_cos.
    pub gamma1: f64,
    /// Dissimilarity threshold on min_cos.
    pub gamma2: f64,
    /// Score for the mixed branch (both similar and dissimilar pairs present).
    pub delta: f64,
    /// Let gradients flow through the score into the opinion embeddings.
    /// Off by default: the score acts as a constraint weight.
    #[serde(default)]
    pub backprop_s: bool,
}

impl Default for PrConfig {
    fn default() -> Self {
        PrConfig {
            beta: 0.1,
            gamma1: 0.7,
            gamma2: -0.1,
            delta: 1.0,
            backprop_s: false,
        }
    }
}

impl PrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beta < 0.0 {
            return Err(Error::InvalidConfig("beta must be >= 0".into()));
        }
        if self.gamma2 > self.gamma1 {
            return Err(Error::InvalidConfig(format!(
                "gamma2 ({}) must not exceed gamma1 ({})",
                self.gamma2, self.gamma1
            )));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::InvalidConfig("delta must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Similar,
    Dissimilar,
    Mixed,
    Neutral,
}

/// The score value, which branch fired, and the extreme cosine pairs
/// (opinion-vocabulary indices) that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintScore {
    pub value: f64,
    pub branch: Branch,
    pub max_cos: f64,
    pub min_cos: f64,
    pub argmax_pair: Option<(usize, usize)>,
    pub argmin_pair: Option<(usize, usize)>,
}

impl ConstraintScore {
    /// The no-constraint sentinel used when either opinion set is empty.
    pub fn neutral() -> ConstraintScore {
        ConstraintScore {
            value: 0.0,
            branch: Branch::Neutral,
            max_cos: 0.0,
            min_cos: 0.0,
            argmax_pair: None,
            argmin_pair: None,
        }
    }
}

/// Cosine of two opinion-embedding rows; zero-norm embeddings give 0.
pub fn embedding_cosine(params: &ModelParams, a: usize, b: usize) -> f64 {
    let ea = params.opinion_embeddings.row(a);
    let eb = params.opinion_embeddings.row(b);
    let dot = ea.dot(&eb);
    let na = ea.dot(&ea).sqrt();
    let nb = eb.dot(&eb).sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// All cross-set cosine values (|O_i| * |O_j| of them), or `None` when
/// either set is empty (no constraint).
pub fn pairwise_cosines(
    set_i: &[usize],
    set_j: &[usize],
    params: &ModelParams,
) -> Option<Vec<f64>> {
    if set_i.is_empty() || set_j.is_empty() {
        return None;
    }
    let mut out = Vec::with_capacity(set_i.len() * set_j.len());
    for &a in set_i {
        for &b in set_j {
            out.push(embedding_cosine(params, a, b));
        }
    }
    Some(out)
}

/// Piecewise score over the cross-set cosines:
/// max_cos when the pair looks similar, min_cos when dissimilar,
/// delta when both extremes fire, 0 otherwise.
pub fn score_s(
    set_i: &[usize],
    set_j: &[usize],
    params: &ModelParams,
    config: &PrConfig,
) -> ConstraintScore {
    if set_i.is_empty() || set_j.is_empty() {
        return ConstraintScore::neutral();
    }
    let mut max_cos = f64::NEG_INFINITY;
    let mut min_cos = f64::INFINITY;
    let mut argmax = (set_i[0], set_j[0]);
    let mut argmin = (set_i[0], set_j[0]);
    for &a in set_i {
        for &b in set_j {
            let cos = embedding_cosine(params, a, b);
            if cos > max_cos {
                max_cos = cos;
                argmax = (a, b);
            }
            if cos < min_cos {
                min_cos = cos;
                argmin = (a, b);
            }
        }
    }
    let similar = max_cos > config.gamma1;
    let dissimilar = min_cos < config.gamma2;
    let (value, branch) = match (similar, dissimilar) {
        (true, false) => (max_cos, Branch::Similar),
        (false, true) => (min_cos, Branch::Dissimilar),
        (true, true) => (config.delta, Branch::Mixed),
        (false, false) => (0.0, Branch::Neutral),
    };
    ConstraintScore {
        value,
        branch,
        max_cos,
        min_cos,
        argmax_pair: Some(argmax),
        argmin_pair: Some(argmin),
    }
}

/// Euclidean distance between two polarity posteriors.
pub fn posterior_distance(q_i: &PolarityDistribution, q_j: &PolarityDistribution) -> f64 {
    q_i.probs()
        .iter()
        .zip(q_j.probs().iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// One pair term: R = -d(q_i, q_j) * S.
pub fn pr_term(q_i: &PolarityDistribution, q_j: &PolarityDistribution, score: &ConstraintScore) -> f64 {
    -posterior_distance(q_i, q_j) * score.value
}

/// A scored unordered pair; `i` and `j` index into the batch slice.
#[derive(Debug, Clone)]
pub struct PairConstraint {
    pub i: usize,
    pub j: usize,
    pub score: ConstraintScore,
}

/// Score every unordered pair in the batch against the current opinion
/// embeddings. Pairs with an empty opinion set come back neutral.
pub fn batch_constraints(
    docs: &[BatchDoc],
    params: &ModelParams,
    config: &PrConfig,
) -> Vec<PairConstraint> {
    let sets: Vec<Vec<usize>> = docs.iter().map(|d| d.opinion_set()).collect();
    let mut out = Vec::new();
    for i in 0..docs.len() {
        for j in (i + 1)..docs.len() {
            out.push(PairConstraint {
                i,
                j,
                score: score_s(&sets[i], &sets[j], params, config),
            });
        }
    }
    out
}

/// Sum of pair terms over all unordered pairs in a batch, posteriors and
/// constraints computed from the given params. Batches of size < 2 give 0.
pub fn batch_pr(docs: &[BatchDoc], params: &ModelParams, config: &PrConfig) -> Result<f64> {
    let posteriors: Vec<PolarityDistribution> = docs
        .iter()
        .map(|d| {
            let enc = params.encode(&d.id, &d.token_ids)?;
            params.polarity_posterior(&enc.vector)
        })
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for c in batch_constraints(docs, params, config) {
        total += pr_term(&posteriors[c.i], &posteriors[c.j], &c.score);
    }
    Ok(total)
}

/// Per-pair debug record for the optional constraint trace.
#[derive(Debug, Serialize)]
pub struct TraceRecord<'a> {
    pub doc_i: &'a str,
    pub doc_j: &'a str,
    pub branch: Branch,
    pub s: f64,
    pub d: f64,
}
