use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("duplicate document id `{id}`")]
    DuplicateId { id: String },

    #[error("parse file line {line}: expected {expected} tab-separated columns, found {found}")]
    ColumnMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("document `{id}` has no tokens")]
    EmptyDocument { id: String },

    #[error("opinion word index {index} out of vocabulary (size {size})")]
    OpinionIndexOutOfRange { index: usize, size: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("class `{class}` has no pseudo-labeled documents; pretraining impossible")]
    EmptyPseudoClass { class: String },

    #[error("no usable documents in batch (all lack opinion words)")]
    EmptyBatch,

    #[error("no document in the corpus has opinion words")]
    NoOpinionWords,

    #[error("checkpoint vocabulary hash mismatch for {which} vocabulary")]
    VocabHashMismatch { which: String },

    #[error("checkpoint format: {0}")]
    Checkpoint(String),

    #[error("prediction/gold length mismatch: {predictions} vs {gold}")]
    LengthMismatch { predictions: usize, gold: usize },

    #[error("unknown class label `{0}`")]
    UnknownClass(String),
}

pub type Result<T> = std::result::Result<T, Error>;
