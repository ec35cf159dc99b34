//! Versioned model checkpoints with vocabulary hashes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Vocab;
use crate::error::{Error, Result};

use super::ModelParams;

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub class_labels: Vec<String>,
    pub token_vocab_hash: String,
    pub opinion_vocab_hash: String,
    pub params: ModelParams,
}

/// Hash of the vocabulary contents; order-sensitive, since indices matter.
pub fn vocab_hash(vocab: &Vocab) -> String {
    let mut hasher = Sha256::new();
    for word in vocab.words() {
        hasher.update(word.as_bytes());
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_checkpoint(
    path: &Path,
    params: &ModelParams,
    class_labels: &[String],
    token_vocab: &Vocab,
    opinion_vocab: &Vocab,
) -> Result<()> {
    let ckpt = Checkpoint {
        version: CHECKPOINT_VERSION,
        class_labels: class_labels.to_vec(),
        token_vocab_hash: vocab_hash(token_vocab),
        opinion_vocab_hash: vocab_hash(opinion_vocab),
        params: params.clone(),
    };
    let json = serde_json::to_string(&ckpt).map_err(|e| Error::Checkpoint(e.to_string()))?;
    fs::write(path, json).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Load a checkpoint and verify its vocabulary hashes against the corpus
/// vocabularies the caller intends to use it with.
pub fn load_checkpoint(
    path: &Path,
    token_vocab: &Vocab,
    opinion_vocab: &Vocab,
) -> Result<Checkpoint> {
    let json = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let ckpt: Checkpoint =
        serde_json::from_str(&json).map_err(|e| Error::Checkpoint(e.to_string()))?;
    if ckpt.version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported checkpoint version {}",
            ckpt.version
        )));
    }
    if ckpt.token_vocab_hash != vocab_hash(token_vocab) {
        return Err(Error::VocabHashMismatch {
            which: "token".into(),
        });
    }
    if ckpt.opinion_vocab_hash != vocab_hash(opinion_vocab) {
        return Err(Error::VocabHashMismatch {
            which: "opinion".into(),
        });
    }
    Ok(ckpt)
}
