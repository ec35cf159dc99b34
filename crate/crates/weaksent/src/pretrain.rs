//! Keyword-based pseudo-labeling and supervised pretraining of the
//! polarity classifier. Pseudo labels never touch gold labels; the
//! training path only ever sees a [`TrainView`].

use std::collections::HashMap;
use std::collections::HashSet;
use std::fs;
use std::path::Path;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, TrainView};
use crate::error::{Error, Result};
use crate::model::{ModelParams, ParamGrads};

/// Per-class keyword lists. Index order follows the corpus class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordSpec {
    pub per_class: Vec<Vec<String>>,
}

impl KeywordSpec {
    pub fn new(per_class: Vec<Vec<String>>) -> Result<KeywordSpec> {
        let spec = KeywordSpec {
            per_class: per_class
                .into_iter()
                .map(|ws| ws.into_iter().map(|w| w.to_lowercase()).collect())
                .collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen: HashSet<&str> = HashSet::new();
        for (class, words) in self.per_class.iter().enumerate() {
            if words.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "class {class} has no keywords"
                )));
            }
            for w in words {
                if !seen.insert(w.as_str()) {
                    return Err(Error::InvalidConfig(format!(
                        "keyword `{w}` appears in more than one class"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Load from a JSON object mapping class name to keyword list, ordered
    /// against the given class labels.
    pub fn load(path: &Path, class_labels: &[String]) -> Result<KeywordSpec> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let map: HashMap<String, Vec<String>> =
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let per_class = class_labels
            .iter()
            .map(|label| {
                map.get(label)
                    .cloned()
                    .ok_or_else(|| Error::InvalidConfig(format!("no keywords for class `{label}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        KeywordSpec::new(per_class)
    }

    fn preset(positive: &[&str], negative: &[&str]) -> KeywordSpec {
        KeywordSpec::new(vec![
            positive.iter().map(|s| s.to_string()).collect(),
            negative.iter().map(|s| s.to_string()).collect(),
        ])
        .expect("preset keywords are valid")
    }

    pub fn yelp() -> KeywordSpec {
        Self::preset(
            &["terrific", "amazing", "awesome"],
            &["horrible", "worst", "bad"],
        )
    }

    pub fn imdb() -> KeywordSpec {
        Self::preset(&["great", "fantastic", "awesome"], &["awful", "worst", "bad"])
    }

    pub fn amazon() -> KeywordSpec {
        Self::preset(&["great", "fantastic", "awesome"], &["poor", "worst", "bad"])
    }
}

/// Pseudo label for one document: the class whose keyword list its tokens
/// intersect, or none when zero or several classes match.
pub fn pseudo_label_for(doc: &Document, keywords: &KeywordSpec) -> Option<usize> {
    let tokens: HashSet<&str> = doc.tokens.iter().map(|t| t.as_str()).collect();
    let mut matched = None;
    for (class, words) in keywords.per_class.iter().enumerate() {
        if words.iter().any(|w| tokens.contains(w.as_str())) {
            if matched.is_some() {
                return None; // conflicting supervision: assign nothing
            }
            matched = Some(class);
        }
    }
    matched
}

/// Pseudo labels for every document, plus per-class counts. Errors when any
/// class ends up empty, since pretraining would be impossible.
pub fn compute_pseudo_labels(
    documents: &[Document],
    keywords: &KeywordSpec,
) -> Result<(Vec<Option<usize>>, Vec<usize>)> {
    let num_classes = keywords.per_class.len();
    let labels: Vec<Option<usize>> = documents
        .iter()
        .map(|d| pseudo_label_for(d, keywords))
        .collect();
    let mut counts = vec![0usize; num_classes];
    for label in labels.iter().flatten() {
        counts[*label] += 1;
    }
    for (class, &count) in counts.iter().enumerate() {
        if count == 0 {
            return Err(Error::EmptyPseudoClass {
                class: class.to_string(),
            });
        }
    }
    Ok((labels, counts))
}

/// Assign pseudo labels in place and report per-class counts.
pub fn assign_pseudo_labels(corpus: &mut Corpus, keywords: &KeywordSpec) -> Result<Vec<usize>> {
    let (labels, counts) = compute_pseudo_labels(&corpus.documents, keywords)?;
    for (doc, label) in corpus.documents.iter_mut().zip(labels) {
        doc.pseudo_label = label;
    }
    Ok(counts)
}

#[derive(Debug, Clone, Serialize)]
pub struct PretrainMetrics {
    pub epochs: usize,
    pub pseudo_docs: usize,
    pub final_loss: f64,
    pub pseudo_accuracy: f64,
}

/// Full-batch SGD minimizing cross-entropy of the polarity posterior against
/// pseudo labels. Token embeddings are trainable here; the caller freezes
/// them afterwards for the main phase.
pub fn pretrain_classifier(
    view: TrainView<'_>,
    pseudo_labels: &[Option<usize>],
    params: &mut ModelParams,
    epochs: usize,
    lr: f64,
) -> Result<PretrainMetrics> {
    let labeled: Vec<(usize, usize)> = pseudo_labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|y| (i, y)))
        .collect();
    let num_classes = params.num_classes();
    let mut present = vec![false; num_classes];
    for &(_, y) in &labeled {
        present[y] = true;
    }
    for (class, ok) in present.iter().enumerate() {
        if !ok {
            return Err(Error::EmptyPseudoClass {
                class: class.to_string(),
            });
        }
    }

    let token_ids: Vec<(usize, Vec<usize>)> = labeled
        .iter()
        .map(|&(i, _)| (i, view.token_vocab.ids_or_unk(&view.documents[i].tokens)))
        .collect();

    let mut final_loss = 0.0;
    for _ in 0..epochs {
        let mut grads = ParamGrads::zeros_like(params);
        let mut loss = 0.0;
        for (&(_, y), (i, ids)) in labeled.iter().zip(&token_ids) {
            let enc = params.encode(&view.documents[*i].id, ids)?;
            let q = params.polarity_posterior(&enc.vector)?;
            let p = q.get(y).max(1e-300);
            loss -= p.ln();
            // ascent on -CE: dz_c = 1[c=y] - q_c
            let mut grad_x = Array1::zeros(enc.vector.len());
            for c in 0..num_classes {
                let g = (if c == y { 1.0 } else { 0.0 }) - q.get(c);
                grads.class_weights.row_mut(c).scaled_add(g, &enc.vector);
                grad_x.scaled_add(g, &params.class_weights.row(c));
            }
            params.encoder.backward(&enc.cache, &grad_x, &mut grads.encoder);
        }
        if !loss.is_finite() {
            return Err(Error::NonFinite {
                what: "pretraining loss".into(),
            });
        }
        final_loss = loss;
        params.sgd_step(&grads, lr, true);
    }

    let mut correct = 0usize;
    for (&(_, y), (i, ids)) in labeled.iter().zip(&token_ids) {
        let enc = params.encode(&view.documents[*i].id, ids)?;
        let q = params.polarity_posterior(&enc.vector)?;
        if q.argmax().0 == y {
            correct += 1;
        }
    }
    Ok(PretrainMetrics {
        epochs,
        pseudo_docs: labeled.len(),
        final_loss,
        pseudo_accuracy: if labeled.is_empty() {
            0.0
        } else {
            correct as f64 / labeled.len() as f64
        },
    })
}
