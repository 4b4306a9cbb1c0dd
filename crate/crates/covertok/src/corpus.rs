//! Corpus ingestion: raw byte text into a counted word multiset, word-count
//! file IO, and candidate token extraction.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symbol::{marked_word, token_from_hex, token_to_hex, Sym, MARKER};

/// Whitespace bytes that delimit words; runs collapse to a single space on
/// decode.
pub const WHITESPACE: [u8; 4] = [b' ', b'\t', b'\n', b'\r'];

fn is_whitespace(b: u8) -> bool {
    WHITESPACE.contains(&b)
}

/// A corpus word: a non-empty symbol sequence in which the marker may only
/// occupy position 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Sym>);

impl Word {
    pub fn from_syms(syms: Vec<Sym>) -> Result<Self> {
        if syms.is_empty() {
            return Err(Error::parse("<word>", 0, "empty word"));
        }
        if syms.iter().skip(1).any(|&s| s == MARKER) || syms.iter().any(|&s| s > MARKER) {
            return Err(Error::parse("<word>", 0, "marker may only start a word"));
        }
        Ok(Word(syms))
    }

    /// Raw bytes, no marker.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Word(bytes.iter().map(|&b| Sym::from(b)).collect())
    }

    /// Marker-prefixed word, as produced by text ingestion.
    pub fn marked(bytes: &[u8]) -> Self {
        Word(marked_word(bytes))
    }

    pub fn syms(&self) -> &[Sym] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Deref for Word {
    type Target = [Sym];

    fn deref(&self) -> &[Sym] {
        &self.0
    }
}

/// Counted word multiset with a canonical (sorted) entry order.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    entries: Vec<(Word, u64)>,
    total_words: u64,
}

impl Corpus {
    /// Build from `(word, count)` pairs; duplicate words aggregate and zero
    /// counts are rejected.
    pub fn from_counts<I: IntoIterator<Item = (Word, u64)>>(pairs: I) -> Result<Self> {
        let mut map: HashMap<Word, u64> = HashMap::new();
        for (word, count) in pairs {
            if count == 0 {
                return Err(Error::parse("<corpus>", 0, "word count must be positive"));
            }
            *map.entry(word).or_insert(0) += count;
        }
        let mut entries: Vec<(Word, u64)> = map.into_iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let total_words = entries.iter().map(|(_, c)| c).sum();
        Ok(Corpus {
            entries,
            total_words,
        })
    }

    /// Split a byte stream on whitespace runs and count the words. Every
    /// word is marker-prefixed, the first one included: the stream start
    /// counts as an implicit delimiter, which is what makes decoding
    /// well-defined.
    pub fn ingest(text: &[u8]) -> Self {
        let mut map: HashMap<Vec<u8>, u64> = HashMap::new();
        for chunk in text.split(|&b| is_whitespace(b)) {
            if !chunk.is_empty() {
                *map.entry(chunk.to_vec()).or_insert(0) += 1;
            }
        }
        let mut entries: Vec<(Word, u64)> = map
            .into_iter()
            .map(|(bytes, count)| (Word::marked(&bytes), count))
            .collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let total_words = entries.iter().map(|(_, c)| c).sum();
        Corpus {
            entries,
            total_words,
        }
    }

    pub fn entries(&self) -> &[(Word, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_words(&self) -> u64 {
        self.total_words
    }

    pub fn word(&self, i: usize) -> &[Sym] {
        self.entries[i].0.syms()
    }

    pub fn count(&self, i: usize) -> u64 {
        self.entries[i].1
    }

    pub fn counts(&self) -> Vec<u64> {
        self.entries.iter().map(|&(_, c)| c).collect()
    }

    pub fn word_lens(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(w, _)| w.len())
    }

    pub fn get(&self, syms: &[Sym]) -> Option<u64> {
        self.entries
            .binary_search_by(|(w, _)| w.syms().cmp(syms))
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Total symbol count over distinct words (unweighted).
    pub fn distinct_symbols(&self) -> usize {
        self.entries.iter().map(|(w, _)| w.len()).sum()
    }

    /// Load a word-count file: one `<hex>\t<count>` line per word, where
    /// `<hex>` is the serialization of [`token_to_hex`].
    pub fn load_word_counts(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (hex, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, lineno + 1, "expected <hex>\\t<count>"))?;
            let syms =
                token_from_hex(hex).map_err(|msg| Error::parse(path, lineno + 1, msg))?;
            let word = Word::from_syms(syms)
                .map_err(|_| Error::parse(path, lineno + 1, "invalid word"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, lineno + 1, "invalid count"))?;
            if count == 0 {
                return Err(Error::parse(path, lineno + 1, "count must be positive"));
            }
            pairs.push((word, count));
        }
        Corpus::from_counts(pairs)
    }

    /// Serialize in canonical entry order; inverse of [`Corpus::load_word_counts`].
    pub fn word_counts_text(&self) -> String {
        let mut out = String::new();
        for (word, count) in &self.entries {
            out.push_str(&token_to_hex(word.syms()));
            out.push('\t');
            out.push_str(&count.to_string());
            out.push('\n');
        }
        out
    }

    pub fn save_word_counts(&self, path: &Path) -> Result<()> {
        fs::write(path, self.word_counts_text())?;
        Ok(())
    }
}

/// Candidate extraction knobs. Length and frequency pruning bound the
/// candidate universe on large corpora.
#[derive(Debug, Clone, Copy)]
pub struct CandidateOptions {
    /// Longest candidate, in symbols.
    pub max_len: usize,
    /// Minimum occurrence-weighted frequency.
    pub min_freq: u64,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        CandidateOptions {
            max_len: 64,
            min_freq: 2,
        }
    }
}

/// The candidate token universe: deduplicated multi-symbol substrings of
/// corpus words in ascending lexicographic order, with their weighted
/// frequencies.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    tokens: Vec<Vec<Sym>>,
    freqs: Vec<u64>,
}

impl CandidateSet {
    pub fn from_tokens(mut tokens: Vec<(Vec<Sym>, u64)>) -> Self {
        tokens.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        tokens.dedup_by(|a, b| a.0 == b.0);
        let freqs = tokens.iter().map(|&(_, f)| f).collect();
        CandidateSet {
            tokens: tokens.into_iter().map(|(t, _)| t).collect(),
            freqs,
        }
    }

    pub fn tokens(&self) -> &[Vec<Sym>] {
        &self.tokens
    }

    pub fn token(&self, i: usize) -> &[Sym] {
        &self.tokens[i]
    }

    pub fn freq(&self, i: usize) -> u64 {
        self.freqs[i]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn position(&self, token: &[Sym]) -> Option<usize> {
        self.tokens
            .binary_search_by(|t| t.as_slice().cmp(token))
            .ok()
    }
}

/// Enumerate every distinct substring of length `2..=max_len` of the corpus
/// words and keep those whose occurrence-weighted frequency reaches
/// `min_freq`. The frequency of a candidate counts every start position in
/// every word, weighted by the word count.
pub fn extract_candidates(corpus: &Corpus, opts: CandidateOptions) -> Result<CandidateSet> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let max_len = opts.max_len.max(2);
    let merged: HashMap<Vec<Sym>, u64> = corpus
        .entries()
        .par_iter()
        .fold(HashMap::new, |mut local: HashMap<Vec<Sym>, u64>, (word, count)| {
            let syms = word.syms();
            for start in 0..syms.len().saturating_sub(1) {
                let top = syms.len().min(start.saturating_add(max_len));
                for end in start + 2..=top {
                    *local.entry(syms[start..end].to_vec()).or_insert(0) += count;
                }
            }
            local
        })
        .reduce(HashMap::new, |mut a, mut b| {
            if a.len() < b.len() {
                std::mem::swap(&mut a, &mut b);
            }
            for (tok, freq) in b {
                *a.entry(tok).or_insert(0) += freq;
            }
            a
        });
    let kept: Vec<(Vec<Sym>, u64)> = merged
        .into_iter()
        .filter(|&(_, freq)| freq >= opts.min_freq)
        .collect();
    Ok(CandidateSet::from_tokens(kept))
}
