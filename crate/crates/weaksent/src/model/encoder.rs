//! Document encoders: bag-of-embeddings mean and the convolutional encoder
//! (per-width filter banks, ReLU, max-pool per filter, concatenate).

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::corpus::PAD_INDEX;

/// One bank of convolution filters sharing a window width. Filter weights
/// are stored flattened: row f holds the width*dim window weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvFilterBank {
    pub width: usize,
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum EncoderParams {
    Bag {
        embeddings: Array2<f64>,
    },
    Conv {
        embeddings: Array2<f64>,
        banks: Vec<ConvFilterBank>,
    },
}

/// Forward-pass output plus what the backward pass needs.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub vector: Array1<f64>,
    pub cache: EncodeCache,
}

#[derive(Debug, Clone)]
pub enum EncodeCache {
    Bag {
        token_ids: Vec<usize>,
    },
    Conv {
        /// Token ids after right-padding to the largest filter width.
        padded_ids: Vec<usize>,
        /// Per bank, per filter: max-pool argmax position, None when the
        /// pooled activation is zero (all pre-activations non-positive).
        argmax: Vec<Vec<Option<usize>>>,
    },
}

#[derive(Debug, Clone)]
pub enum EncoderGrads {
    Bag {
        embeddings: Array2<f64>,
    },
    Conv {
        embeddings: Array2<f64>,
        banks: Vec<(Array2<f64>, Array1<f64>)>,
    },
}

impl EncoderParams {
    pub fn init(
        kind: &super::EncoderKind,
        token_vocab_size: usize,
        uniform: &mut impl FnMut(usize, usize) -> Array2<f64>,
    ) -> EncoderParams {
        match kind {
            super::EncoderKind::Bag { dim } => {
                let mut embeddings = uniform(token_vocab_size, *dim);
                embeddings.row_mut(PAD_INDEX).fill(0.0);
                EncoderParams::Bag { embeddings }
            }
            super::EncoderKind::Conv {
                dim,
                widths,
                filters_per_width,
            } => {
                let mut embeddings = uniform(token_vocab_size, *dim);
                embeddings.row_mut(PAD_INDEX).fill(0.0);
                let banks = widths
                    .iter()
                    .map(|&w| {
                        let weights = uniform(*filters_per_width, w * dim);
                        let bias_mat = uniform(*filters_per_width, 1);
                        ConvFilterBank {
                            width: w,
                            weights,
                            bias: bias_mat.column(0).to_owned(),
                        }
                    })
                    .collect();
                EncoderParams::Conv { embeddings, banks }
            }
        }
    }

    pub fn embeddings(&self) -> &Array2<f64> {
        match self {
            EncoderParams::Bag { embeddings } | EncoderParams::Conv { embeddings, .. } => {
                embeddings
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.embeddings().ncols()
    }

    pub fn forward(&self, token_ids: &[usize]) -> Encoded {
        match self {
            EncoderParams::Bag { embeddings } => {
                let dim = embeddings.ncols();
                let mut vector = Array1::zeros(dim);
                for &t in token_ids {
                    vector += &embeddings.row(t);
                }
                vector /= token_ids.len() as f64;
                Encoded {
                    vector,
                    cache: EncodeCache::Bag {
                        token_ids: token_ids.to_vec(),
                    },
                }
            }
            EncoderParams::Conv { embeddings, banks } => {
                let dim = embeddings.ncols();
                let max_width = banks.iter().map(|b| b.width).max().unwrap_or(1);
                let mut padded_ids = token_ids.to_vec();
                while padded_ids.len() < max_width {
                    padded_ids.push(PAD_INDEX);
                }
                let mut vector = Vec::new();
                let mut argmax = Vec::new();
                for bank in banks {
                    let num_filters = bank.weights.nrows();
                    let mut pooled = vec![0.0; num_filters];
                    let mut arg: Vec<Option<usize>> = vec![None; num_filters];
                    let mut window = Array1::zeros(bank.width * dim);
                    for t in 0..=padded_ids.len() - bank.width {
                        for k in 0..bank.width {
                            window
                                .slice_mut(ndarray::s![k * dim..(k + 1) * dim])
                                .assign(&embeddings.row(padded_ids[t + k]));
                        }
                        let preact = bank.weights.dot(&window) + &bank.bias;
                        for f in 0..num_filters {
                            if preact[f] > pooled[f] {
                                pooled[f] = preact[f];
                                arg[f] = Some(t);
                            }
                        }
                    }
                    vector.extend_from_slice(&pooled);
                    argmax.push(arg);
                }
                Encoded {
                    vector: Array1::from_vec(vector),
                    cache: EncodeCache::Conv { padded_ids, argmax },
                }
            }
        }
    }

    /// Accumulate d(objective)/d(encoder params) given d(objective)/dx.
    pub fn backward(&self, cache: &EncodeCache, grad_x: &Array1<f64>, grads: &mut EncoderGrads) {
        match (self, cache, grads) {
            (
                EncoderParams::Bag { .. },
                EncodeCache::Bag { token_ids },
                EncoderGrads::Bag { embeddings },
            ) => {
                let scale = 1.0 / token_ids.len() as f64;
                for &t in token_ids {
                    if t == PAD_INDEX {
                        continue;
                    }
                    let mut row = embeddings.row_mut(t);
                    row.scaled_add(scale, grad_x);
                }
            }
            (
                EncoderParams::Conv {
                    embeddings: emb,
                    banks,
                },
                EncodeCache::Conv { padded_ids, argmax },
                EncoderGrads::Conv {
                    embeddings: emb_grads,
                    banks: bank_grads,
                },
            ) => {
                let dim = emb.ncols();
                let mut offset = 0;
                for ((bank, arg), (w_grad, b_grad)) in
                    banks.iter().zip(argmax).zip(bank_grads.iter_mut())
                {
                    let num_filters = bank.weights.nrows();
                    for f in 0..num_filters {
                        let g = grad_x[offset + f];
                        let Some(t) = arg[f] else { continue };
                        if g == 0.0 {
                            continue;
                        }
                        b_grad[f] += g;
                        for k in 0..bank.width {
                            let tok = padded_ids[t + k];
                            let emb_row = emb.row(tok);
                            let mut w_seg =
                                w_grad.row_mut(f);
                            for d in 0..dim {
                                w_seg[k * dim + d] += g * emb_row[d];
                            }
                            if tok != PAD_INDEX {
                                let w_row = bank.weights.row(f);
                                let mut e_row = emb_grads.row_mut(tok);
                                for d in 0..dim {
                                    e_row[d] += g * w_row[k * dim + d];
                                }
                            }
                        }
                    }
                    offset += num_filters;
                }
            }
            _ => unreachable!("mismatched encoder cache/grads variant"),
        }
    }

    /// Flatten, skipping the PAD embedding row (always untrainable) and the
    /// whole embedding table when frozen.
    pub fn append_flat(&self, train_embeddings: bool, out: &mut Vec<f64>) {
        match self {
            EncoderParams::Bag { embeddings } => {
                if train_embeddings {
                    append_embedding_rows(embeddings, out);
                }
            }
            EncoderParams::Conv { embeddings, banks } => {
                if train_embeddings {
                    append_embedding_rows(embeddings, out);
                }
                for bank in banks {
                    out.extend(bank.weights.iter());
                    out.extend(bank.bias.iter());
                }
            }
        }
    }

    pub fn assign_flat(&mut self, train_embeddings: bool, flat: &[f64], offset: &mut usize) {
        match self {
            EncoderParams::Bag { embeddings } => {
                if train_embeddings {
                    assign_embedding_rows(embeddings, flat, offset);
                }
            }
            EncoderParams::Conv { embeddings, banks } => {
                if train_embeddings {
                    assign_embedding_rows(embeddings, flat, offset);
                }
                for bank in banks {
                    for v in bank.weights.iter_mut() {
                        *v = flat[*offset];
                        *offset += 1;
                    }
                    for v in bank.bias.iter_mut() {
                        *v = flat[*offset];
                        *offset += 1;
                    }
                }
            }
        }
    }
}

fn append_embedding_rows(embeddings: &Array2<f64>, out: &mut Vec<f64>) {
    for (r, row) in embeddings.rows().into_iter().enumerate() {
        if r == PAD_INDEX {
            continue;
        }
        out.extend(row.iter());
    }
}

fn assign_embedding_rows(embeddings: &mut Array2<f64>, flat: &[f64], offset: &mut usize) {
    for (r, mut row) in embeddings.rows_mut().into_iter().enumerate() {
        if r == PAD_INDEX {
            continue;
        }
        for v in row.iter_mut() {
            *v = flat[*offset];
            *offset += 1;
        }
    }
}

impl EncoderGrads {
    pub fn zeros_like(params: &EncoderParams) -> EncoderGrads {
        match params {
            EncoderParams::Bag { embeddings } => EncoderGrads::Bag {
                embeddings: Array2::zeros(embeddings.raw_dim()),
            },
            EncoderParams::Conv { embeddings, banks } => EncoderGrads::Conv {
                embeddings: Array2::zeros(embeddings.raw_dim()),
                banks: banks
                    .iter()
                    .map(|b| {
                        (
                            Array2::zeros(b.weights.raw_dim()),
                            Array1::zeros(b.bias.raw_dim()),
                        )
                    })
                    .collect(),
            },
        }
    }

    pub fn append_flat(&self, train_embeddings: bool, out: &mut Vec<f64>) {
        match self {
            EncoderGrads::Bag { embeddings } => {
                if train_embeddings {
                    append_embedding_rows(embeddings, out);
                }
            }
            EncoderGrads::Conv { embeddings, banks } => {
                if train_embeddings {
                    append_embedding_rows(embeddings, out);
                }
                for (w, b) in banks {
                    out.extend(w.iter());
                    out.extend(b.iter());
                }
            }
        }
    }

    pub fn flat_len(&self, train_embeddings: bool) -> usize {
        let mut v = Vec::new();
        self.append_flat(train_embeddings, &mut v);
        v.len()
    }

    pub fn block_name(&self, train_embeddings: bool, idx: usize) -> &'static str {
        match self {
            EncoderGrads::Bag { .. } => "token_embeddings",
            EncoderGrads::Conv { embeddings, .. } => {
                let emb_len = if train_embeddings {
                    embeddings.len() - embeddings.ncols()
                } else {
                    0
                };
                if idx < emb_len {
                    "token_embeddings"
                } else {
                    "conv_filters"
                }
            }
        }
    }
}
