//! Unigram-style log-likelihood evaluation of a fixed vocabulary with given
//! token probabilities. No EM training here: probabilities are supplied or
//! derived from corpus frequencies.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::symbol::{token_from_hex, token_to_hex, Sym};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Ten,
}

impl LogBase {
    fn log(self, p: f64) -> f64 {
        match self {
            LogBase::Natural => p.ln(),
            LogBase::Ten => p.log10(),
        }
    }
}

/// Token probabilities. Values must be positive; they are not required to
/// sum to one.
#[derive(Debug, Clone)]
pub struct ProbTable {
    probs: HashMap<Vec<Sym>, f64>,
    max_len: usize,
    pub base: LogBase,
}

impl ProbTable {
    pub fn new<I: IntoIterator<Item = (Vec<Sym>, f64)>>(entries: I, base: LogBase) -> Result<Self> {
        let mut probs = HashMap::new();
        for (token, p) in entries {
            if !(p > 0.0) || token.is_empty() {
                return Err(Error::parse("<probs>", 0, "probabilities must be positive"));
            }
            probs.insert(token, p);
        }
        let max_len = probs.keys().map(Vec::len).max().unwrap_or(1);
        Ok(ProbTable {
            probs,
            max_len,
            base,
        })
    }

    /// Frequency-normalized proxy: the probability of each token (the given
    /// multi-symbol ones plus every singleton occurring in the corpus) is
    /// its occurrence-weighted frequency over the grand total.
    pub fn from_frequencies(corpus: &Corpus, tokens: &[Vec<Sym>], base: LogBase) -> Result<Self> {
        let mut freqs: HashMap<Vec<Sym>, u64> = HashMap::new();
        for w in 0..corpus.len() {
            let word = corpus.word(w);
            let count = corpus.count(w);
            for &s in word {
                *freqs.entry(vec![s]).or_insert(0) += count;
            }
            for token in tokens {
                if token.len() > word.len() {
                    continue;
                }
                for start in 0..=word.len() - token.len() {
                    if &word[start..start + token.len()] == token.as_slice() {
                        *freqs.entry(token.clone()).or_insert(0) += count;
                    }
                }
            }
        }
        let total: u64 = freqs.values().sum();
        if total == 0 {
            return Err(Error::EmptyCorpus);
        }
        ProbTable::new(
            freqs
                .into_iter()
                .map(|(t, f)| (t, f as f64 / total as f64)),
            base,
        )
    }

    pub fn get(&self, token: &[Sym]) -> Option<f64> {
        self.probs.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `<token-hex> <probability>` lines in lexicographic token order.
    pub fn to_text(&self) -> String {
        let mut entries: Vec<(&Vec<Sym>, f64)> =
            self.probs.iter().map(|(t, &p)| (t, p)).collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        for (token, p) in entries {
            out.push_str(&format!("{} {}\n", token_to_hex(token), p));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path, base: LogBase) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (hex, p) = line
                .split_once(' ')
                .ok_or_else(|| Error::parse(path, lineno + 1, "expected <hex> <prob>"))?;
            let token = token_from_hex(hex).map_err(|msg| Error::parse(path, lineno + 1, msg))?;
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, lineno + 1, "invalid probability"))?;
            entries.push((token, p));
        }
        ProbTable::new(entries, base)
    }
}

/// Log-probability of the most probable segmentation of `word`, by DP over
/// positions (product of token probabilities, maximized).
pub fn viterbi_log_prob(word: &[Sym], probs: &ProbTable) -> Result<f64> {
    let n = word.len();
    let mut best = vec![f64::NEG_INFINITY; n + 1];
    best[0] = 0.0;
    for end in 1..=n {
        let lowest_start = end.saturating_sub(probs.max_len);
        for start in lowest_start..end {
            if best[start] == f64::NEG_INFINITY {
                continue;
            }
            if let Some(p) = probs.get(&word[start..end]) {
                let cand = best[start] + probs.base.log(p);
                if cand > best[end] {
                    best[end] = cand;
                }
            }
        }
    }
    if best[n] == f64::NEG_INFINITY {
        let pos = best
            .iter()
            .rposition(|&b| b != f64::NEG_INFINITY)
            .unwrap_or(0);
        return Err(Error::Unsegmentable { pos });
    }
    Ok(best[n])
}

/// Corpus log-likelihood: the count-weighted sum over words of the best
/// segmentation log-probability.
pub fn unigram_loglik(corpus: &Corpus, probs: &ProbTable) -> Result<f64> {
    let mut total = 0.0;
    for w in 0..corpus.len() {
        total += corpus.count(w) as f64 * viterbi_log_prob(corpus.word(w), probs)?;
    }
    Ok(total)
}
