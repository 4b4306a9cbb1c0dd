//! Exact solvers by subset enumeration, for micro instances only. These are
//! the reference answers the greedy algorithms are measured against.

use crate::corpus::{CandidateSet, Corpus};
use crate::cover::{cover_exact, Symbol, TokenSet};
use crate::error::{Error, Result};
use crate::symbol::Sym;

/// Guard rails for the public oracle entry point.
pub const ORACLE_MAX_CANDIDATES: usize = 20;
pub const ORACLE_MAX_K: usize = 5;

/// Walk every candidate subset of size at most `k` in lexicographic order
/// and keep the best objective. Candidates must be sorted ascending so the
/// first maximum found is also the lexicographically least one.
pub(crate) fn exhaustive_best_subset<S: Symbol>(
    words: &[&[S]],
    counts: &[u64],
    candidates: &[Vec<S>],
    k: usize,
) -> (Vec<usize>, u64) {
    debug_assert!(candidates.windows(2).all(|p| p[0] < p[1]));

    fn objective<S: Symbol>(words: &[&[S]], counts: &[u64], chosen: &[Vec<S>]) -> u64 {
        let tokens = TokenSet::new(chosen.iter().cloned());
        words
            .iter()
            .zip(counts)
            .map(|(word, &c)| c * cover_exact(word, &tokens) as u64)
            .sum()
    }

    let mut best_idx: Vec<usize> = Vec::new();
    let mut best_obj = objective::<S>(words, counts, &[]);
    let mut stack: Vec<usize> = Vec::new();

    fn recurse<S: Symbol>(
        words: &[&[S]],
        counts: &[u64],
        candidates: &[Vec<S>],
        k: usize,
        start: usize,
        stack: &mut Vec<usize>,
        best_idx: &mut Vec<usize>,
        best_obj: &mut u64,
    ) {
        if !stack.is_empty() {
            let chosen: Vec<Vec<S>> = stack.iter().map(|&i| candidates[i].clone()).collect();
            let obj = objective(words, counts, &chosen);
            if obj > *best_obj {
                *best_obj = obj;
                *best_idx = stack.clone();
            }
        }
        if stack.len() == k {
            return;
        }
        for i in start..candidates.len() {
            stack.push(i);
            recurse(words, counts, candidates, k, i + 1, stack, best_idx, best_obj);
            stack.pop();
        }
    }

    if k > 0 {
        recurse(
            words,
            counts,
            candidates,
            k,
            0,
            &mut stack,
            &mut best_idx,
            &mut best_obj,
        );
    }
    (best_idx, best_obj)
}

/// Exact optimum of the token-selection problem on a micro instance:
/// maximize total weighted covered pairs over every subset of at most `k`
/// candidates, scoring each subset with the per-word partition DP. Returns
/// the (lexicographically least) maximizer and its objective.
pub fn brute_force_tok(
    corpus: &Corpus,
    candidates: &CandidateSet,
    k: usize,
) -> Result<(Vec<Vec<Sym>>, u64)> {
    if candidates.len() > ORACLE_MAX_CANDIDATES || k > ORACLE_MAX_K {
        return Err(Error::OracleLimit(format!(
            "{} candidates, k={} (limits: {} candidates, k={})",
            candidates.len(),
            k,
            ORACLE_MAX_CANDIDATES,
            ORACLE_MAX_K
        )));
    }
    let words: Vec<&[Sym]> = (0..corpus.len()).map(|i| corpus.word(i)).collect();
    let counts = corpus.counts();
    let (idx, obj) = exhaustive_best_subset(&words, &counts, candidates.tokens(), k);
    Ok((idx.into_iter().map(|i| candidates.token(i).to_vec()).collect(), obj))
}

/// Weighted total partition count under the oracle's optimum: the
/// complementary view of [`brute_force_tok`]'s objective.
pub fn total_partitions(corpus: &Corpus, selected: &[Vec<Sym>]) -> u64 {
    let tokens = TokenSet::new(selected.iter().cloned());
    (0..corpus.len())
        .map(|w| corpus.count(w) * crate::cover::partition_dp(corpus.word(w), &tokens).0 as u64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Word;
    use crate::symbol::syms_from_bytes;

    fn corpus_of(words: &[(&str, u64)]) -> Corpus {
        Corpus::from_counts(
            words
                .iter()
                .map(|&(w, c)| (Word::from_bytes(w.as_bytes()), c)),
        )
        .unwrap()
    }

    fn candidates_of(tokens: &[&str]) -> CandidateSet {
        CandidateSet::from_tokens(
            tokens
                .iter()
                .map(|t| (syms_from_bytes(t.as_bytes()), 1))
                .collect(),
        )
    }

    #[test]
    fn four_word_instance_optimum() {
        let corpus = corpus_of(&[("random", 1), ("randose", 1), ("rosey", 1), ("randy", 1)]);
        let cands = candidates_of(&["random", "randose", "rosey", "randy", "rand", "ose"]);
        let (best, obj) = brute_force_tok(&corpus, &cands, 2).unwrap();
        // 23 total symbols, optimum leaves 10 partitions
        assert_eq!(obj, 13);
        assert_eq!(total_partitions(&corpus, &best), 10);
        let names: Vec<String> = best
            .iter()
            .map(|t| String::from_utf8(t.iter().map(|&s| s as u8).collect()).unwrap())
            .collect();
        // both {rand, ose} and {rand, rosey} reach 10; ose sorts first
        assert_eq!(names, vec!["ose", "rand"]);
    }

    #[test]
    fn zero_budget_covers_nothing() {
        let corpus = corpus_of(&[("abc", 2)]);
        let cands = candidates_of(&["ab", "bc"]);
        let (best, obj) = brute_force_tok(&corpus, &cands, 0).unwrap();
        assert!(best.is_empty());
        assert_eq!(obj, 0);
        assert_eq!(total_partitions(&corpus, &best), 6);
    }

    #[test]
    fn guard_rails() {
        let corpus = corpus_of(&[("abcdefgh", 1)]);
        let cands = crate::corpus::extract_candidates(
            &corpus,
            crate::corpus::CandidateOptions {
                max_len: 8,
                min_freq: 1,
            },
        )
        .unwrap();
        assert!(cands.len() > ORACLE_MAX_CANDIDATES);
        assert!(matches!(
            brute_force_tok(&corpus, &cands, 2),
            Err(Error::OracleLimit(_))
        ));
        let small = candidates_of(&["ab"]);
        assert!(matches!(
            brute_force_tok(&corpus, &small, ORACLE_MAX_K + 1),
            Err(Error::OracleLimit(_))
        ));
    }

    #[test]
    fn ties_prefer_lexicographically_least_subset() {
        // both {ab} and {cd} cover exactly one pair of "abcd"
        let corpus = corpus_of(&[("abcd", 1)]);
        let cands = candidates_of(&["ab", "cd"]);
        let (best, obj) = brute_force_tok(&corpus, &cands, 1).unwrap();
        assert_eq!(obj, 1);
        assert_eq!(best, vec![syms_from_bytes(b"ab")]);
    }
}
