//! Greedy token selection over the shared cover state.
//!
//! Selection maintains one score per candidate in a max-priority queue and
//! re-scores a candidate only when it surfaces at the head with a stale
//! score. Scores never have to be recomputed wholesale: a cached score is
//! the gain the candidate had against some earlier state, and acceptance
//! requires the head's score to be fresh against the current state.

use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;

use crate::corpus::{CandidateSet, Corpus};
use crate::cover::{CoverState, Symbol, TokenSet};
use crate::error::{Error, Result};
use crate::symbol::{token_to_hex, Sym, MARKER};

/// Occurrence lists for each candidate: every `(word, start)` at which the
/// candidate appears, sorted by `(word, start)`.
#[derive(Debug, Clone)]
pub struct OccurrenceIndex {
    occs: Vec<Vec<(u32, u32)>>,
}

impl OccurrenceIndex {
    pub fn build(corpus: &Corpus, candidates: &CandidateSet) -> Self {
        let words: Vec<&[Sym]> = (0..corpus.len()).map(|i| corpus.word(i)).collect();
        OccurrenceIndex {
            occs: occurrence_lists(&words, candidates.tokens()),
        }
    }

    pub fn occurrences(&self, candidate: usize) -> &[(u32, u32)] {
        &self.occs[candidate]
    }

    pub fn len(&self) -> usize {
        self.occs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occs.is_empty()
    }
}

/// Scan every word once and collect, per candidate, the sorted list of its
/// `(word, start)` occurrences.
pub(crate) fn occurrence_lists<S: Symbol>(
    words: &[&[S]],
    candidates: &[Vec<S>],
) -> Vec<Vec<(u32, u32)>> {
    let lookup: HashMap<&[S], u32> = candidates
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_slice(), i as u32))
        .collect();
    let max_len = candidates.iter().map(|t| t.len()).max().unwrap_or(0);
    let per_word: Vec<Vec<(u32, u32)>> = words
        .par_iter()
        .map(|word| {
            let mut found = Vec::new();
            for start in 0..word.len().saturating_sub(1) {
                let top = word.len().min(start + max_len);
                for end in start + 2..=top {
                    if let Some(&t) = lookup.get(&word[start..end]) {
                        found.push((t, start as u32));
                    }
                }
            }
            found
        })
        .collect();
    let mut occs = vec![Vec::new(); candidates.len()];
    for (w, found) in per_word.into_iter().enumerate() {
        for (t, start) in found {
            occs[t as usize].push((w as u32, start));
        }
    }
    occs
}

/// Reusable scratch marks over the flat label array, used to simulate the
/// covers an occurrence pass would apply without touching the real state.
/// Bumping the epoch clears all marks in O(1).
pub(crate) struct ScratchOverlay {
    stamps: Vec<u64>,
    epoch: u64,
}

impl ScratchOverlay {
    pub(crate) fn new(total_labels: usize) -> Self {
        ScratchOverlay {
            stamps: vec![0; total_labels],
            epoch: 0,
        }
    }

    #[inline]
    fn marked(&self, flat: usize) -> bool {
        self.stamps[flat] == self.epoch
    }

    #[inline]
    fn mark(&mut self, flat: usize) {
        self.stamps[flat] = self.epoch;
    }
}

/// Gain the token would realize against `state`: iterate its occurrences in
/// order, and for every occurrence whose endpoints are free in the scratch
/// view, add `count(word) * uncovered pairs in the span`, then mark the
/// span in the scratch view so overlapping occurrences of the same token
/// are not double counted. The real state is left untouched.
pub(crate) fn score_with_overlay(
    state: &CoverState,
    counts: &[u64],
    tok_len: usize,
    occs: &[(u32, u32)],
    overlay: &mut ScratchOverlay,
) -> u64 {
    overlay.epoch += 1;
    let labels = state.flat_labels();
    let mut total = 0u64;
    for &(w, pos) in occs {
        let (w, pos) = (w as usize, pos as usize);
        let range = state.flat_range(w);
        let word_len = range.len() + 1;
        let free = |flat: usize, overlay: &ScratchOverlay| labels[flat] == 0 && !overlay.marked(flat);
        let left_ok = pos == 0 || free(range.start + pos - 1, overlay);
        let right_ok =
            pos + tok_len == word_len || free(range.start + pos + tok_len - 1, overlay);
        if !(left_ok && right_ok) {
            continue;
        }
        let mut zeros = 0u64;
        for flat in range.start + pos..range.start + pos + tok_len - 1 {
            if labels[flat] == 0 && !overlay.marked(flat) {
                zeros += 1;
            }
            overlay.mark(flat);
        }
        total += counts[w] * zeros;
    }
    total
}

/// Score one token against a frozen state. `occs` must be the token's own
/// occurrence list.
pub fn score_token(
    state: &CoverState,
    counts: &[u64],
    token: &[Sym],
    occs: &[(u32, u32)],
) -> u64 {
    let mut overlay = ScratchOverlay::new(state.total_labels());
    score_with_overlay(state, counts, token.len(), occs, &mut overlay)
}

/// An ordered token vocabulary over the byte-plus-marker alphabet. The 257
/// singletons are implicit; selected tokens carry insertion ranks `1..=k`
/// that double as encoder priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    selected: Vec<Vec<Sym>>,
    rank_of: HashMap<Vec<Sym>, u32>,
}

impl Vocabulary {
    pub fn new(selected: Vec<Vec<Sym>>) -> Result<Self> {
        let mut rank_of = HashMap::with_capacity(selected.len());
        for (i, token) in selected.iter().enumerate() {
            let valid = token.len() >= 2
                && token.iter().skip(1).all(|&s| s != MARKER)
                && token.iter().all(|&s| s <= MARKER);
            if !valid {
                return Err(Error::parse("<vocab>", i + 1, "invalid token"));
            }
            if rank_of.insert(token.clone(), i as u32 + 1).is_some() {
                return Err(Error::parse("<vocab>", i + 1, "duplicate token"));
            }
        }
        Ok(Vocabulary { selected, rank_of })
    }

    pub fn empty() -> Self {
        Vocabulary {
            selected: Vec::new(),
            rank_of: HashMap::new(),
        }
    }

    /// Number of selected tokens.
    pub fn k(&self) -> usize {
        self.selected.len()
    }

    pub fn selected(&self) -> &[Vec<Sym>] {
        &self.selected
    }

    /// Token with insertion rank `rank` (1-based).
    pub fn token_by_rank(&self, rank: u32) -> Option<&[Sym]> {
        self.selected.get(rank as usize - 1).map(Vec::as_slice)
    }

    pub fn rank_of(&self, token: &[Sym]) -> Option<u32> {
        self.rank_of.get(token).copied()
    }

    pub fn max_token_len(&self) -> usize {
        self.selected.iter().map(Vec::len).max().unwrap_or(1)
    }

    /// Membership view for the partition DP.
    pub fn token_set(&self) -> TokenSet<Sym> {
        TokenSet::new(self.selected.iter().cloned())
    }

    /// First `k` tokens as their own vocabulary; selection order is nested,
    /// so this equals training with the smaller budget.
    pub fn prefix(&self, k: usize) -> Vocabulary {
        let selected: Vec<Vec<Sym>> = self.selected.iter().take(k).cloned().collect();
        Vocabulary::new(selected).expect("prefix of a valid vocabulary")
    }
}

/// One accepted token during selection.
#[derive(Debug, Clone)]
pub struct TrainStep {
    pub rank: u32,
    pub token: Vec<Sym>,
    pub gain: u64,
    pub cumulative: u64,
}

/// Selection result: the vocabulary plus the per-acceptance gain record.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub vocab: Vocabulary,
    pub steps: Vec<TrainStep>,
}

impl TrainOutcome {
    /// Final objective value (total weighted covered pairs).
    pub fn objective(&self) -> u64 {
        self.steps.last().map(|s| s.cumulative).unwrap_or(0)
    }

    /// Objective after the first `k` acceptances (saturating).
    pub fn objective_at(&self, k: usize) -> u64 {
        if k == 0 || self.steps.is_empty() {
            return 0;
        }
        let idx = k.min(self.steps.len()) - 1;
        self.steps[idx].cumulative
    }

    /// Training log: `rank  token-hex  gain  cumulative` per line.
    pub fn log_text(&self) -> String {
        let mut out = String::from("rank\ttoken\tgain\tcumulative\n");
        for step in &self.steps {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                step.rank,
                token_to_hex(&step.token),
                step.gain,
                step.cumulative
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    /// How many stale queue entries to re-score per pop. 1 re-scores
    /// exactly the popped head.
    pub rescore_batch: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { rescore_batch: 1 }
    }
}

#[derive(PartialEq, Eq)]
struct QueueEntry {
    score: u64,
    // candidates are stored in ascending lexicographic order, so the index
    // doubles as the tie-break key
    idx: u32,
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.score
            .cmp(&other.score)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Select up to `k` tokens greedily by cover gain.
///
/// Equal scores resolve to the lexicographically smallest token. Selection
/// stops early when the best available gain is zero.
pub fn select_tokens(corpus: &Corpus, candidates: &CandidateSet, k: usize) -> Result<TrainOutcome> {
    select_tokens_with(corpus, candidates, k, TrainOptions::default())
}

pub fn select_tokens_with(
    corpus: &Corpus,
    candidates: &CandidateSet,
    k: usize,
    opts: TrainOptions,
) -> Result<TrainOutcome> {
    if k == 0 {
        return Err(Error::InvalidBudget);
    }
    let batch = opts.rescore_batch.max(1);
    let index = OccurrenceIndex::build(corpus, candidates);
    let counts = corpus.counts();
    let mut state = CoverState::new(corpus.word_lens());

    // initial scores against the all-zero state, in parallel
    let initial: Vec<u64> = (0..candidates.len())
        .into_par_iter()
        .map_init(
            || ScratchOverlay::new(state.total_labels()),
            |overlay, t| {
                score_with_overlay(
                    &state,
                    &counts,
                    candidates.token(t).len(),
                    index.occurrences(t),
                    overlay,
                )
            },
        )
        .collect();

    let mut heap: BinaryHeap<QueueEntry> = initial
        .iter()
        .enumerate()
        .map(|(idx, &score)| QueueEntry {
            score,
            idx: idx as u32,
        })
        .collect();
    // round r = state after r acceptances; a score is fresh iff computed
    // against the current round
    let mut scored_round = vec![0u64; candidates.len()];
    let mut round = 0u64;
    let mut overlay = ScratchOverlay::new(state.total_labels());

    let mut selected: Vec<Vec<Sym>> = Vec::new();
    let mut steps: Vec<TrainStep> = Vec::new();
    let mut cumulative = 0u64;

    while selected.len() < k {
        let Some(top) = heap.pop() else { break };
        let t = top.idx as usize;
        if scored_round[t] != round {
            // stale: re-score (plus up to batch-1 more stale heads) and retry
            let mut pending = vec![top];
            while pending.len() < batch {
                match heap.peek() {
                    Some(e) if scored_round[e.idx as usize] != round => {
                        pending.push(heap.pop().unwrap());
                    }
                    _ => break,
                }
            }
            for entry in pending {
                let t = entry.idx as usize;
                let score = score_with_overlay(
                    &state,
                    &counts,
                    candidates.token(t).len(),
                    index.occurrences(t),
                    &mut overlay,
                );
                scored_round[t] = round;
                heap.push(QueueEntry {
                    score,
                    idx: entry.idx,
                });
            }
            continue;
        }
        if top.score == 0 {
            break;
        }

        // accept: next rank, cover every still-valid occurrence
        let token = candidates.token(t);
        let rank = selected.len() as u32 + 1;
        #[cfg(debug_assertions)]
        let before = state.objective(&counts);
        for &(w, pos) in index.occurrences(t) {
            let (w, pos) = (w as usize, pos as usize);
            if state.endpoints_free(w, pos, token.len()) {
                state.set_span(w, pos, token.len(), rank);
            }
        }
        #[cfg(debug_assertions)]
        debug_assert_eq!(
            state.objective(&counts) - before,
            top.score,
            "accepted gain must equal the fresh score"
        );
        cumulative += top.score;
        selected.push(token.to_vec());
        steps.push(TrainStep {
            rank,
            token: token.to_vec(),
            gain: top.score,
            cumulative,
        });
        round += 1;
    }

    Ok(TrainOutcome {
        vocab: Vocabulary::new(selected)?,
        steps,
    })
}
