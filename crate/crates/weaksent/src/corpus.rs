//! Document ingestion, vocabularies, and corpus statistics.
//!
//! The corpus file format is line-delimited JSON, one document per line,
//! with fields `id`, `text`, and an optional `label`. Gold labels are kept
//! off the [`Document`] type entirely: they live on the [`Corpus`] and are
//! only reachable through [`Corpus::gold_label`], while training code works
//! against a [`TrainView`] that has no path to them.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reserved token-vocabulary index for out-of-vocabulary tokens.
pub const UNK_INDEX: usize = 0;
/// Reserved token-vocabulary index for padding; its embedding stays zero.
pub const PAD_INDEX: usize = 1;

/// A dense word → index map with stable, insertion-ordered indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocab {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn new() -> Self {
        Vocab {
            words: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// A token vocabulary with the reserved `<unk>` and `<pad>` entries.
    pub fn with_reserved() -> Self {
        let mut v = Vocab::new();
        v.add("<unk>");
        v.add("<pad>");
        v
    }

    pub fn add(&mut self, word: &str) -> usize {
        if let Some(&i) = self.index.get(word) {
            return i;
        }
        let i = self.words.len();
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), i);
        i
    }

    pub fn get(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, index: usize) -> Option<&str> {
        self.words.get(index).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Map tokens to indices, sending unknown tokens to `UNK_INDEX`.
    pub fn ids_or_unk(&self, tokens: &[String]) -> Vec<usize> {
        tokens
            .iter()
            .map(|t| self.get(t).unwrap_or(UNK_INDEX))
            .collect()
    }
}

impl Default for Vocab {
    fn default() -> Self {
        Vocab::new()
    }
}

/// A tokenized document. Gold labels are deliberately not stored here.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    /// Class index assigned by keyword matching, used only for pretraining.
    pub pseudo_label: Option<usize>,
    /// Multiset of opinion-vocabulary indices extracted from this document.
    pub opinion_words: Vec<usize>,
}

impl Document {
    /// Support set of `opinion_words`: unique indices, sorted.
    pub fn opinion_set(&self) -> Vec<usize> {
        let mut s = self.opinion_words.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// Lowercase and split on non-alphanumeric runs, keeping apostrophes that
/// sit between two alphanumeric characters (`don't` stays one token).
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.to_lowercase().chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let keep = c.is_alphanumeric()
            || (c == '\''
                && i > 0
                && chars[i - 1].is_alphanumeric()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric()));
        if keep {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<String>,
}

/// Corpus file format tag. Only line-delimited JSON is supported today;
/// the tag exists so the CLI surface stays stable if more formats land.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    JsonLines,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub class_labels: Vec<String>,
    pub token_vocab: Vocab,
    pub opinion_vocab: Vocab,
    /// True once opinion words have been attached via `set_opinion_words`.
    pub extraction_run: bool,
    gold: Vec<Option<usize>>,
}

/// Read-only window onto a corpus that carries no gold labels.
/// Training code takes this, not a `&Corpus`.
#[derive(Debug, Clone, Copy)]
pub struct TrainView<'a> {
    pub documents: &'a [Document],
    pub class_labels: &'a [String],
    pub token_vocab: &'a Vocab,
    pub opinion_vocab: &'a Vocab,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusStats {
    pub num_docs: usize,
    pub avg_doc_length: f64,
    pub opinion_vocab_size: usize,
    pub extraction_run: bool,
}

impl Corpus {
    /// Load a corpus from a line-delimited JSON file. Document order is
    /// file order; tokenization is deterministic, so reloading the same
    /// file yields an identical corpus.
    pub fn load(path: &Path, format: CorpusFormat) -> Result<Corpus> {
        let CorpusFormat::JsonLines = format;
        let file = File::open(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_reader(BufReader::new(file), &default_class_labels())
    }

    pub fn from_reader<R: BufRead>(reader: R, class_labels: &[String]) -> Result<Corpus> {
        assert!(class_labels.len() >= 2, "need at least two class labels");
        let mut documents = Vec::new();
        let mut gold = Vec::new();
        let mut seen = HashMap::new();
        let mut token_vocab = Vocab::with_reserved();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Io {
                path: "<corpus>".into(),
                source: e,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let record: RawRecord =
                serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                    line: lineno + 1,
                    reason: e.to_string(),
                })?;
            if seen.insert(record.id.clone(), lineno).is_some() {
                return Err(Error::DuplicateId { id: record.id });
            }
            let gold_idx = match &record.label {
                Some(l) => Some(
                    class_labels
                        .iter()
                        .position(|c| c == l)
                        .ok_or_else(|| Error::MalformedRecord {
                            line: lineno + 1,
                            reason: format!("unknown label `{l}`"),
                        })?,
                ),
                None => None,
            };
            let tokens = tokenize(&record.text);
            for t in &tokens {
                token_vocab.add(t);
            }
            documents.push(Document {
                id: record.id,
                text: record.text,
                tokens,
                pseudo_label: None,
                opinion_words: Vec::new(),
            });
            gold.push(gold_idx);
        }
        Ok(Corpus {
            documents,
            class_labels: class_labels.to_vec(),
            token_vocab,
            opinion_vocab: Vocab::new(),
            extraction_run: false,
            gold,
        })
    }

    /// Build an in-memory corpus; used by the synthetic generator and tests.
    pub fn from_documents(
        documents: Vec<Document>,
        gold: Vec<Option<usize>>,
        class_labels: Vec<String>,
    ) -> Corpus {
        assert_eq!(documents.len(), gold.len());
        let mut token_vocab = Vocab::with_reserved();
        for d in &documents {
            for t in &d.tokens {
                token_vocab.add(t);
            }
        }
        Corpus {
            documents,
            class_labels,
            token_vocab,
            opinion_vocab: Vocab::new(),
            extraction_run: false,
            gold,
        }
    }

    /// Attach extracted opinion words (by document id) and build the opinion
    /// vocabulary. Indices are assigned in first-seen document order.
    pub fn set_opinion_words(&mut self, extracted: &HashMap<String, Vec<String>>) {
        let mut vocab = Vocab::new();
        for doc in &mut self.documents {
            doc.opinion_words.clear();
            if let Some(words) = extracted.get(&doc.id) {
                for w in words {
                    doc.opinion_words.push(vocab.add(w));
                }
            }
        }
        self.opinion_vocab = vocab;
        self.extraction_run = true;
    }

    pub fn train_view(&self) -> TrainView<'_> {
        TrainView {
            documents: &self.documents,
            class_labels: &self.class_labels,
            token_vocab: &self.token_vocab,
            opinion_vocab: &self.opinion_vocab,
        }
    }

    /// Gold label (class index) for the document at `doc_idx`.
    /// Evaluation-only; the training path never sees this.
    pub fn gold_label(&self, doc_idx: usize) -> Option<usize> {
        self.gold.get(doc_idx).copied().flatten()
    }

    pub fn gold_labels(&self) -> &[Option<usize>] {
        &self.gold
    }

    pub fn class_index(&self, label: &str) -> Result<usize> {
        self.class_labels
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnknownClass(label.to_string()))
    }

    pub fn stats(&self) -> CorpusStats {
        let num_docs = self.documents.len();
        let total_tokens: usize = self.documents.iter().map(|d| d.tokens.len()).sum();
        CorpusStats {
            num_docs,
            avg_doc_length: if num_docs == 0 {
                0.0
            } else {
                total_tokens as f64 / num_docs as f64
            },
            opinion_vocab_size: if self.extraction_run {
                self.opinion_vocab.len()
            } else {
                0
            },
            extraction_run: self.extraction_run,
        }
    }
}

pub fn default_class_labels() -> Vec<String> {
    vec!["positive".to_string(), "negative".to_string()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn load_str(s: &str) -> Result<Corpus> {
        Corpus::from_reader(Cursor::new(s.as_bytes()), &default_class_labels())
    }

    #[test]
    fn tokenizes_reference_example() {
        let corpus =
            load_str(r#"{"id":"d1","text":"The room is big","label":"positive"}"#).unwrap();
        let doc = &corpus.documents[0];
        assert_eq!(doc.tokens, vec!["the", "room", "is", "big"]);
        assert_eq!(corpus.gold_label(0), Some(0));
    }

    #[test]
    fn tokenizer_keeps_intra_word_apostrophes() {
        assert_eq!(tokenize("Don't stop!"), vec!["don't", "stop"]);
        assert_eq!(tokenize("'quoted'"), vec!["quoted"]);
        assert_eq!(tokenize("rock 'n' roll"), vec!["rock", "n", "roll"]);
    }

    #[test]
    fn empty_file_gives_empty_corpus() {
        let corpus = load_str("").unwrap();
        assert!(corpus.documents.is_empty());
        assert_eq!(corpus.token_vocab.len(), 2); // reserved entries only
        let stats = corpus.stats();
        assert_eq!(stats.num_docs, 0);
        assert_eq!(stats.avg_doc_length, 0.0);
    }

    #[test]
    fn missing_text_is_an_error_with_line_number() {
        let err = load_str("{\"id\":\"d1\",\"text\":\"ok\"}\n{\"id\":\"d2\"}").unwrap_err();
        match err {
            Error::MalformedRecord { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_id_is_an_error() {
        let err =
            load_str("{\"id\":\"d1\",\"text\":\"a\"}\n{\"id\":\"d1\",\"text\":\"b\"}").unwrap_err();
        assert!(matches!(err, Error::DuplicateId { .. }));
    }

    #[test]
    fn stats_mean_length() {
        let corpus =
            load_str("{\"id\":\"a\",\"text\":\"one two three\"}\n{\"id\":\"b\",\"text\":\"one two three four five\"}")
                .unwrap();
        let stats = corpus.stats();
        assert_eq!(stats.num_docs, 2);
        assert_eq!(stats.avg_doc_length, 4.0);
        assert_eq!(stats.opinion_vocab_size, 0);
        assert!(!stats.extraction_run);
    }

    #[test]
    fn reload_is_deterministic() {
        let text = "{\"id\":\"a\",\"text\":\"red green blue\"}\n{\"id\":\"b\",\"text\":\"green red\"}";
        let c1 = load_str(text).unwrap();
        let c2 = load_str(text).unwrap();
        assert_eq!(c1.token_vocab, c2.token_vocab);
        assert_eq!(c1.documents.len(), c2.documents.len());
        for (a, b) in c1.documents.iter().zip(&c2.documents) {
            assert_eq!(a.tokens, b.tokens);
        }
    }

    #[test]
    fn opinion_vocab_built_from_extraction() {
        let mut corpus =
            load_str("{\"id\":\"a\",\"text\":\"great food\"}\n{\"id\":\"b\",\"text\":\"bad food\"}")
                .unwrap();
        let mut extracted = HashMap::new();
        extracted.insert("a".to_string(), vec!["great".to_string(), "great".to_string()]);
        extracted.insert("b".to_string(), vec!["bad".to_string()]);
        corpus.set_opinion_words(&extracted);
        assert_eq!(corpus.opinion_vocab.len(), 2);
        // multiset kept on the document, support set deduplicates
        assert_eq!(corpus.documents[0].opinion_words.len(), 2);
        assert_eq!(corpus.documents[0].opinion_set().len(), 1);
        assert_eq!(corpus.stats().opinion_vocab_size, 2);
    }
}
