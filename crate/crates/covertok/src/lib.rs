//! covertok — a tokenizer toolkit built on partition-cover optimization.
//!
//! Token selection treats tokenization as covering: pick at most `k`
//! multi-symbol tokens so that as many adjacent symbol pairs as possible
//! across the corpus are grouped under a chosen token, weighted by word
//! frequency. Fewer uncovered pairs means fewer emitted tokens, because a
//! word's token count is exactly its length minus its covered pairs.
//!
//! The crate provides:
//!
//! * [`corpus`] — byte-stream ingestion into counted words, word-count file
//!   IO, and candidate substring extraction;
//! * [`cover`] — the per-word pair-label state, the validity rule for
//!   claiming a span, and the exact partition/cover DP;
//! * [`trainer`] — greedy token selection with lazy re-scoring;
//! * [`encoder`] — rank-priority encoding, an exact-optimal mode, lossless
//!   decoding, and the vocabulary/token-id file formats;
//! * [`baselines`] — BPE, the greedy weighted-maximum-coverage relaxation,
//!   exact brute-force solvers for micro instances, and a unigram
//!   log-likelihood evaluator;
//! * [`reduction`] — the vertex-cover instance construction and its
//!   equivalence check;
//! * [`metrics`] — compression reports and the relaxation-ratio
//!   diagnostic.
//!
//! The `examples/` directory has one runnable walkthrough per capability;
//! start with `train_and_encode`.

pub mod baselines;
pub mod corpus;
pub mod cover;
mod error;
pub mod encoder;
pub mod metrics;
pub mod reduction;
pub mod symbol;
pub mod trainer;

pub use corpus::{extract_candidates, CandidateOptions, CandidateSet, Corpus, Word};
pub use cover::{cover_exact, partition_dp, CoverState, Segmentation, Symbol, TokenSet};
pub use encoder::{
    decode, encode_text, encode_word, load_vocab, save_vocab, EncodeMode, IdFormat, TokenId,
};
pub use error::{Error, Result};
pub use symbol::{Sym, ALPHABET_SIZE, MARKER};
pub use trainer::{select_tokens, OccurrenceIndex, TrainOutcome, TrainStep, Vocabulary};
