//! Weakly supervised sentiment classification.
//!
//! The pipeline: extract opinion words from dependency parses
//! ([`extraction`]), pseudo-label documents by keyword matching and pretrain
//! a polarity classifier ([`pretrain`]), then train it on a variational
//! objective over the extracted opinion words ([`objective`], [`training`]),
//! optionally with a pairwise posterior regularizer that pulls documents with
//! similar opinion vocabulary toward similar polarity distributions
//! ([`regularizer`]). Evaluation utilities and a voting lexicon baseline live
//! in [`evaluation`]; [`synthetic`] generates labeled toy corpora.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod extraction;
pub mod model;
pub mod objective;
pub mod pretrain;
pub mod regularizer;
pub mod synthetic;
pub mod training;

pub use error::{Error, Result};
