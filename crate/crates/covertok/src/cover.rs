//! Cover-state bookkeeping shared by the trainer and the encoder, plus the
//! exact partition/cover routines.
//!
//! Every word of length `n` carries `n - 1` labels, one per adjacent symbol
//! pair. Label `0` means the pair is uncovered (a partition boundary); label
//! `r > 0` means the pair is grouped by the token with insertion rank `r`.
//! A token occurrence may claim a span only when the labels just outside the
//! span are free, so distinct occurrences never half-overlap: an occupied
//! span is only ever rewritten by a strictly longer token whose span
//! contains it.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Anything usable as an atomic symbol: bytes, byte-plus-marker codes, or
/// synthetic ids.
pub trait Symbol: Copy + Eq + Ord + Hash + Debug + Send + Sync {}

impl<T: Copy + Eq + Ord + Hash + Debug + Send + Sync> Symbol for T {}

/// Per-word pair labels for a whole corpus, stored as one contiguous array.
#[derive(Debug, Clone)]
pub struct CoverState {
    offsets: Vec<usize>,
    labels: Vec<u32>,
}

impl CoverState {
    /// Fresh all-zero state for words of the given lengths (in symbols).
    pub fn new<I: IntoIterator<Item = usize>>(word_lens: I) -> Self {
        let mut offsets = vec![0];
        for len in word_lens {
            let pairs = len.saturating_sub(1);
            offsets.push(offsets.last().unwrap() + pairs);
        }
        let total = *offsets.last().unwrap();
        CoverState {
            offsets,
            labels: vec![0; total],
        }
    }

    pub fn word_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Pair labels of word `w`.
    pub fn labels(&self, w: usize) -> &[u32] {
        &self.labels[self.offsets[w]..self.offsets[w + 1]]
    }

    pub(crate) fn total_labels(&self) -> usize {
        self.labels.len()
    }

    pub(crate) fn flat_range(&self, w: usize) -> std::ops::Range<usize> {
        self.offsets[w]..self.offsets[w + 1]
    }

    pub(crate) fn flat_labels(&self) -> &[u32] {
        &self.labels
    }

    /// Sum over all words of `weight(w) * covered pairs in w`.
    pub fn objective(&self, weights: &[u64]) -> u64 {
        let mut total = 0;
        for w in 0..self.word_count() {
            let covered = self.labels(w).iter().filter(|&&m| m != 0).count();
            total += weights[w] * covered as u64;
        }
        total
    }

    /// Endpoint test: the span `[pos, pos + tok_len)` of word `w` may be
    /// claimed iff the labels just outside it are zero (or the span touches
    /// the word edge).
    #[inline]
    pub(crate) fn endpoints_free(&self, w: usize, pos: usize, tok_len: usize) -> bool {
        let base = self.offsets[w];
        let pairs = self.offsets[w + 1] - base;
        let word_len = pairs + 1;
        (pos == 0 || self.labels[base + pos - 1] == 0)
            && (pos + tok_len == word_len || self.labels[base + pos + tok_len - 1] == 0)
    }

    /// Checked form of the endpoint test. Verifies that `token` really
    /// occurs in `word` at `pos` before consulting the labels.
    pub fn can_cover<S: Symbol>(
        &self,
        word: &[S],
        w: usize,
        token: &[S],
        pos: usize,
    ) -> Result<bool> {
        if pos + token.len() > word.len() || &word[pos..pos + token.len()] != token {
            return Err(Error::OccurrenceMismatch { word: w, pos });
        }
        Ok(self.endpoints_free(w, pos, token.len()))
    }

    /// Claim the span for the token with insertion rank `rank`, writing the
    /// `token.len() - 1` labels it spans. Fails if the occurrence is bogus
    /// or the endpoint test does not hold.
    pub fn apply_cover<S: Symbol>(
        &mut self,
        rank: u32,
        word: &[S],
        w: usize,
        token: &[S],
        pos: usize,
    ) -> Result<()> {
        if !self.can_cover(word, w, token, pos)? {
            return Err(Error::InvalidCover { word: w, pos });
        }
        self.set_span(w, pos, token.len(), rank);
        Ok(())
    }

    /// Unchecked label write; callers must have verified the endpoint test.
    /// Returns the number of labels written.
    #[inline]
    pub(crate) fn set_span(&mut self, w: usize, pos: usize, tok_len: usize, rank: u32) -> usize {
        debug_assert!(self.endpoints_free(w, pos, tok_len));
        #[cfg(debug_assertions)]
        self.assert_override_is_superset(w, pos, tok_len);
        let base = self.offsets[w];
        for m in &mut self.labels[base + pos..base + pos + tok_len - 1] {
            *m = rank;
        }
        tok_len - 1
    }

    /// Debug check: any occupied run inside the claimed span must lie
    /// strictly inside it, i.e. rewrites only replace shorter tokens whose
    /// spans the new one contains.
    #[cfg(debug_assertions)]
    fn assert_override_is_superset(&self, w: usize, pos: usize, tok_len: usize) {
        let labels = self.labels(w);
        let span = pos..pos + tok_len - 1;
        let mut j = span.start;
        while j < span.end {
            let rank = labels[j];
            if rank == 0 {
                j += 1;
                continue;
            }
            let mut end = j;
            while end < labels.len() && labels[end] == rank {
                end += 1;
            }
            assert!(
                j >= span.start && end <= span.end && end - j < tok_len - 1,
                "span rewrite must strictly contain the run it replaces"
            );
            j = end;
        }
    }
}

/// Membership structure for the selected (multi-symbol) tokens of a
/// vocabulary; singletons are implicit and always available.
#[derive(Debug, Clone, Default)]
pub struct TokenSet<S: Symbol> {
    tokens: HashSet<Vec<S>>,
    max_len: usize,
}

impl<S: Symbol> TokenSet<S> {
    pub fn new<I: IntoIterator<Item = Vec<S>>>(tokens: I) -> Self {
        let tokens: HashSet<Vec<S>> = tokens.into_iter().filter(|t| t.len() >= 2).collect();
        let max_len = tokens.iter().map(|t| t.len()).max().unwrap_or(1);
        TokenSet { tokens, max_len }
    }

    pub fn contains(&self, span: &[S]) -> bool {
        span.len() <= self.max_len && self.tokens.contains(span)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A witness segmentation: internal cut positions, strictly increasing,
/// excluding 0 and the word length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    boundaries: Vec<usize>,
}

impl Segmentation {
    pub fn token_count(&self) -> usize {
        self.boundaries.len() + 1
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// The segments of `word`, in order. Their concatenation is `word`.
    pub fn segments<'a, S: Symbol>(&'a self, word: &'a [S]) -> impl Iterator<Item = &'a [S]> + 'a {
        let starts = std::iter::once(0).chain(self.boundaries.iter().copied());
        let ends = self
            .boundaries
            .iter()
            .copied()
            .chain(std::iter::once(word.len()));
        starts.zip(ends).map(move |(a, b)| &word[a..b])
    }
}

/// Minimum token count over all segmentations of `word` into selected
/// tokens and singletons, with one witness.
///
/// Shortest-path DP over word positions. Among equally short segmentations
/// the witness takes the longest possible segment at each step from the
/// left, which makes the output deterministic.
pub fn partition_dp<S: Symbol>(word: &[S], tokens: &TokenSet<S>) -> (usize, Segmentation) {
    let n = word.len();
    if n == 0 {
        return (0, Segmentation { boundaries: vec![] });
    }
    // cost[i] = min tokens for word[i..].
    let mut cost = vec![usize::MAX; n + 1];
    cost[n] = 0;
    for i in (0..n).rev() {
        let mut best = 1 + cost[i + 1]; // singleton edge always exists
        let max_j = n.min(i + tokens.max_len());
        for j in i + 2..=max_j {
            if tokens.contains(&word[i..j]) {
                best = best.min(1 + cost[j]);
            }
        }
        cost[i] = best;
    }
    // Walk forward taking the longest edge consistent with the optimum.
    let mut boundaries = Vec::new();
    let mut i = 0;
    while i < n {
        let max_j = n.min(i + tokens.max_len());
        let mut next = i + 1;
        for j in (i + 2..=max_j).rev() {
            if cost[i] == 1 + cost[j] && tokens.contains(&word[i..j]) {
                next = j;
                break;
            }
        }
        if next < n {
            boundaries.push(next);
        }
        i = next;
    }
    (cost[0], Segmentation { boundaries })
}

/// Maximum number of adjacent pairs of `word` groupable under the selected
/// tokens: the word length minus the optimal partition size.
pub fn cover_exact<S: Symbol>(word: &[S], tokens: &TokenSet<S>) -> usize {
    word.len() - partition_dp(word, tokens).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn syms(s: &str) -> Vec<u16> {
        s.bytes().map(u16::from).collect()
    }

    fn token_set(words: &[&str]) -> TokenSet<u16> {
        TokenSet::new(words.iter().map(|w| syms(w)))
    }

    #[test]
    fn apply_single_token_leaves_tail_uncovered() {
        let word = syms("ababa");
        let mut state = CoverState::new([word.len()]);
        state.apply_cover(1, &word, 0, &syms("aba"), 0).unwrap();
        assert_eq!(state.labels(0), &[1, 1, 0, 0]);
        // the overlapping occurrence at 2 is now blocked
        assert!(!state.can_cover(&word, 0, &syms("aba"), 2).unwrap());
    }

    #[test]
    fn apply_two_disjoint_tokens() {
        let word = syms("abcdef");
        let mut state = CoverState::new([word.len()]);
        state.apply_cover(1, &word, 0, &syms("bc"), 1).unwrap();
        state.apply_cover(2, &word, 0, &syms("de"), 3).unwrap();
        assert_eq!(state.labels(0), &[0, 1, 0, 2, 0]);
    }

    #[test]
    fn length_two_token_writes_one_label() {
        let word = syms("ab");
        let mut state = CoverState::new([word.len()]);
        state.apply_cover(1, &word, 0, &syms("ab"), 0).unwrap();
        assert_eq!(state.labels(0), &[1]);
    }

    #[test]
    fn endpoint_blocking_after_interior_cover() {
        // covering "ap" at 1 blocks "pa" at both 0 and 2
        let word = syms("papaya");
        let mut state = CoverState::new([word.len()]);
        state.apply_cover(1, &word, 0, &syms("ap"), 1).unwrap();
        assert!(!state.can_cover(&word, 0, &syms("pa"), 0).unwrap());
        assert!(!state.can_cover(&word, 0, &syms("pa"), 2).unwrap());
        // "ya" at 4 is still fine
        assert!(state.can_cover(&word, 0, &syms("ya"), 4).unwrap());
        state.apply_cover(2, &word, 0, &syms("ya"), 4).unwrap();
        assert_eq!(state.labels(0), &[0, 1, 0, 0, 2]);
    }

    #[test]
    fn fresh_state_allows_any_genuine_occurrence() {
        let word = syms("papaya");
        let state = CoverState::new([word.len()]);
        for (tok, pos) in [("pa", 0), ("pa", 2), ("ap", 1), ("ya", 4), ("papaya", 0)] {
            assert!(state.can_cover(&word, 0, &syms(tok), pos).unwrap());
        }
    }

    #[test]
    fn bogus_occurrence_is_rejected() {
        let word = syms("papaya");
        let state = CoverState::new([word.len()]);
        let err = state.can_cover(&word, 0, &syms("ya"), 0).unwrap_err();
        assert!(err.to_string().contains("occurrence mismatch"));
    }

    #[test]
    fn invalid_cover_is_rejected() {
        let word = syms("papaya");
        let mut state = CoverState::new([word.len()]);
        state.apply_cover(1, &word, 0, &syms("ap"), 1).unwrap();
        let err = state.apply_cover(2, &word, 0, &syms("pa"), 2).unwrap_err();
        assert!(err.to_string().contains("invalid cover"));
    }

    #[test]
    fn partition_examples() {
        let word = syms("scaredy");
        assert_eq!(partition_dp(&word, &token_set(&["care", "edy"])).0, 4);
        assert_eq!(
            partition_dp(&word, &token_set(&["care", "edy", "scar"])).0,
            2
        );
        assert_eq!(partition_dp(&word, &token_set(&[])).0, 7);
    }

    #[test]
    fn partition_modularity_violations() {
        // the five hand-checked values behind the neither-sub-nor-supermodular
        // counterexample
        let word = syms("scaredy");
        assert_eq!(partition_dp(&word, &token_set(&["care"])).0, 4);
        assert_eq!(partition_dp(&word, &token_set(&["care", "edy"])).0, 4);
        assert_eq!(
            partition_dp(&word, &token_set(&["care", "edy", "scar"])).0,
            2
        );
        assert_eq!(partition_dp(&word, &token_set(&["care", "scared"])).0, 2);
        assert_eq!(partition_dp(&word, &token_set(&["care", "dy"])).0, 3);
    }

    #[test]
    fn cover_examples() {
        let word = syms("scaredy");
        assert_eq!(cover_exact(&word, &token_set(&["care", "edy"])), 3);
        assert_eq!(cover_exact(&word, &token_set(&["care", "scared"])), 5);
        assert_eq!(cover_exact(&word, &token_set(&[])), 0);
    }

    #[test]
    fn witness_takes_leftmost_longest_segment() {
        let word = syms("scaredy");
        let (count, seg) = partition_dp(&word, &token_set(&["care", "scared"]));
        assert_eq!(count, 2);
        let parts: Vec<Vec<u16>> = seg.segments(&word).map(|s| s.to_vec()).collect();
        assert_eq!(parts, vec![syms("scared"), syms("y")]);
    }

    /// Every segmentation of `word` into singletons plus `tokens`, by token
    /// count; brute force for short words.
    fn enumerate_min_partition(word: &[u16], tokens: &TokenSet<u16>) -> usize {
        fn go(word: &[u16], i: usize, tokens: &TokenSet<u16>) -> usize {
            if i == word.len() {
                return 0;
            }
            let mut best = 1 + go(word, i + 1, tokens);
            for j in i + 2..=word.len() {
                if tokens.contains(&word[i..j]) {
                    best = best.min(1 + go(word, j, tokens));
                }
            }
            best
        }
        go(word, 0, tokens)
    }

    proptest! {
        #[test]
        fn dp_matches_exhaustive_enumeration(
            word in proptest::collection::vec(0u16..4, 1..10),
            toks in proptest::collection::vec(proptest::collection::vec(0u16..4, 2..5), 0..6),
        ) {
            let tokens = TokenSet::new(toks);
            let (count, seg) = partition_dp(&word, &tokens);
            prop_assert_eq!(count, enumerate_min_partition(&word, &tokens));
            prop_assert_eq!(seg.token_count(), count);
            let concat: Vec<u16> = seg.segments(&word).flatten().copied().collect();
            prop_assert_eq!(concat, word.clone());
            for part in seg.segments(&word) {
                prop_assert!(part.len() == 1 || tokens.contains(part));
            }
        }

        #[test]
        fn partition_plus_cover_is_word_length(
            word in proptest::collection::vec(0u16..5, 1..20),
            toks in proptest::collection::vec(proptest::collection::vec(0u16..5, 2..6), 0..8),
        ) {
            let tokens = TokenSet::new(toks);
            let (count, _) = partition_dp(&word, &tokens);
            prop_assert_eq!(cover_exact(&word, &tokens) + count, word.len());
        }
    }
}
