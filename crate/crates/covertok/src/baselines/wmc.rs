//! Weighted-maximum-coverage relaxation: the overlap constraints are
//! dropped, so a token's set simply contains every adjacent pair any of its
//! occurrences touches.

use std::collections::BinaryHeap;

use crate::corpus::{CandidateSet, Corpus};
use crate::cover::Symbol;
use crate::error::{Error, Result};
use crate::trainer::occurrence_lists;

/// One element per (word, adjacent pair), weighted by the word count; one
/// set per candidate token.
#[derive(Debug, Clone)]
pub struct WmcInstance<S: Symbol> {
    tokens: Vec<Vec<S>>,
    sets: Vec<Vec<u32>>,
    weights: Vec<u64>,
    word_offsets: Vec<u32>,
}

impl<S: Symbol> WmcInstance<S> {
    pub fn tokens(&self) -> &[Vec<S>] {
        &self.tokens
    }

    /// Sorted element ids covered by candidate `t`.
    pub fn set(&self, t: usize) -> &[u32] {
        &self.sets[t]
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn element_count(&self) -> usize {
        self.weights.len()
    }

    pub fn element_weight(&self, e: u32) -> u64 {
        self.weights[e as usize]
    }

    pub fn total_element_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    /// Element id of pair `(i, i+1)` of word `w`.
    pub fn element_id(&self, w: usize, pair: usize) -> u32 {
        self.word_offsets[w] + pair as u32
    }
}

/// Build the relaxed instance for arbitrary symbol words.
pub fn build_wmc_instance<S: Symbol>(
    words: &[&[S]],
    counts: &[u64],
    candidates: &[Vec<S>],
) -> WmcInstance<S> {
    let mut word_offsets = Vec::with_capacity(words.len());
    let mut weights = Vec::new();
    for (w, word) in words.iter().enumerate() {
        word_offsets.push(weights.len() as u32);
        weights.extend(std::iter::repeat(counts[w]).take(word.len().saturating_sub(1)));
    }
    let occs = occurrence_lists(words, candidates);
    let sets = occs
        .into_iter()
        .enumerate()
        .map(|(t, list)| {
            let len = candidates[t].len();
            let mut elems: Vec<u32> = list
                .into_iter()
                .flat_map(|(w, pos)| {
                    let base = word_offsets[w as usize];
                    (pos..pos + len as u32 - 1).map(move |i| base + i)
                })
                .collect();
            elems.sort_unstable();
            elems.dedup();
            elems
        })
        .collect();
    WmcInstance {
        tokens: candidates.to_vec(),
        sets,
        weights,
        word_offsets,
    }
}

/// Byte-level convenience over a corpus and its candidate set.
pub fn build_wmc(corpus: &Corpus, candidates: &CandidateSet) -> WmcInstance<crate::symbol::Sym> {
    let words: Vec<&[crate::symbol::Sym]> = (0..corpus.len()).map(|i| corpus.word(i)).collect();
    build_wmc_instance(&words, &corpus.counts(), candidates.tokens())
}

#[derive(Debug, Clone)]
pub struct WmcStep {
    pub token_idx: usize,
    pub gain: u64,
    pub cumulative: u64,
}

#[derive(Debug, Clone)]
pub struct WmcOutcome {
    pub chosen: Vec<usize>,
    pub steps: Vec<WmcStep>,
}

impl WmcOutcome {
    pub fn objective(&self) -> u64 {
        self.steps.last().map(|s| s.cumulative).unwrap_or(0)
    }

    pub fn objective_at(&self, k: usize) -> u64 {
        if k == 0 || self.steps.is_empty() {
            return 0;
        }
        let idx = k.min(self.steps.len()) - 1;
        self.steps[idx].cumulative
    }
}

#[derive(PartialEq, Eq)]
struct QueueEntry {
    gain: u64,
    lex: u32,
    idx: u32,
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.gain
            .cmp(&other.gain)
            .then_with(|| other.lex.cmp(&self.lex))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy weighted maximum coverage: `k` rounds of picking the set with the
/// largest uncovered weight (lazy evaluation; coverage gains are
/// submodular, so stale scores are valid upper bounds). Ties prefer the
/// lexicographically smallest token.
pub fn greed_wmc<S: Symbol>(instance: &WmcInstance<S>, k: usize) -> Result<WmcOutcome> {
    if k == 0 {
        return Err(Error::InvalidBudget);
    }
    // lex rank per token for tie-breaking
    let mut order: Vec<u32> = (0..instance.set_count() as u32).collect();
    order.sort_unstable_by(|&a, &b| instance.tokens[a as usize].cmp(&instance.tokens[b as usize]));
    let mut lex = vec![0u32; instance.set_count()];
    for (rank, &t) in order.iter().enumerate() {
        lex[t as usize] = rank as u32;
    }

    let mut covered = vec![false; instance.element_count()];
    let gain_of = |covered: &[bool], t: usize| -> u64 {
        instance.sets[t]
            .iter()
            .filter(|&&e| !covered[e as usize])
            .map(|&e| instance.weights[e as usize])
            .sum()
    };

    let mut heap: BinaryHeap<QueueEntry> = (0..instance.set_count())
        .map(|t| QueueEntry {
            gain: gain_of(&covered, t),
            lex: lex[t],
            idx: t as u32,
        })
        .collect();
    let mut scored_round = vec![0u64; instance.set_count()];
    let mut round = 0u64;

    let mut chosen = Vec::new();
    let mut steps = Vec::new();
    let mut cumulative = 0u64;
    while chosen.len() < k {
        let Some(top) = heap.pop() else { break };
        let t = top.idx as usize;
        if scored_round[t] != round {
            let gain = gain_of(&covered, t);
            debug_assert!(gain <= top.gain, "coverage gains must be non-increasing");
            scored_round[t] = round;
            heap.push(QueueEntry { gain, ..top });
            continue;
        }
        if top.gain == 0 {
            break;
        }
        for &e in &instance.sets[t] {
            covered[e as usize] = true;
        }
        cumulative += top.gain;
        chosen.push(t);
        steps.push(WmcStep {
            token_idx: t,
            gain: top.gain,
            cumulative,
        });
        round += 1;
    }
    Ok(WmcOutcome { chosen, steps })
}
