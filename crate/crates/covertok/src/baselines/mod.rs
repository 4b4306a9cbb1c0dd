//! Reference systems the greedy tokenizer is compared against: a BPE
//! trainer/encoder, the greedy weighted-maximum-coverage relaxation, exact
//! brute-force solvers for micro instances, and a unigram log-likelihood
//! evaluator.

mod bpe;
mod oracle;
mod unigram;
mod wmc;

pub use bpe::{bpe_encode, bpe_train, MergeList};
pub use oracle::{brute_force_tok, total_partitions, ORACLE_MAX_CANDIDATES, ORACLE_MAX_K};
pub use unigram::{unigram_loglik, viterbi_log_prob, LogBase, ProbTable};
pub use wmc::{build_wmc, build_wmc_instance, greed_wmc, WmcInstance, WmcOutcome, WmcStep};

pub(crate) use oracle::exhaustive_best_subset;
