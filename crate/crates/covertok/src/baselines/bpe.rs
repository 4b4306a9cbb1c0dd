//! Byte-pair-encoding baseline: frequency-greedy merge training and
//! merge-replay encoding.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::symbol::{token_from_hex, token_to_hex, Sym};

/// An ordered list of merges. Each side is a singleton or the result of an
/// earlier merge; the merged token is the concatenation of the two sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeList {
    merges: Vec<(Vec<Sym>, Vec<Sym>)>,
}

impl MergeList {
    pub fn new(merges: Vec<(Vec<Sym>, Vec<Sym>)>) -> Self {
        MergeList { merges }
    }

    pub fn merges(&self) -> &[(Vec<Sym>, Vec<Sym>)] {
        &self.merges
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    /// The first `k` merges, i.e. the model BPE training would have
    /// produced with the smaller budget.
    pub fn prefix(&self, k: usize) -> MergeList {
        MergeList {
            merges: self.merges.iter().take(k).cloned().collect(),
        }
    }

    /// Merge results in merge order: the multi-symbol token set BPE adds on
    /// top of the singletons.
    pub fn token_set(&self) -> Vec<Vec<Sym>> {
        self.merges
            .iter()
            .map(|(l, r)| {
                let mut t = l.clone();
                t.extend_from_slice(r);
                t
            })
            .collect()
    }

    /// One `<left-hex> <right-hex>` line per merge, in order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (l, r) in &self.merges {
            out.push_str(&token_to_hex(l));
            out.push(' ');
            out.push_str(&token_to_hex(r));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut merges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (l, r) = line
                .split_once(' ')
                .ok_or_else(|| Error::parse(path, lineno + 1, "expected <left> <right>"))?;
            let l = token_from_hex(l).map_err(|msg| Error::parse(path, lineno + 1, msg))?;
            let r = token_from_hex(r).map_err(|msg| Error::parse(path, lineno + 1, msg))?;
            merges.push((l, r));
        }
        Ok(MergeList { merges })
    }
}

/// Train `k` merges: repeatedly merge the adjacent symbol pair with the
/// highest count-weighted frequency. Ties prefer the lexicographically
/// smallest merged string, then the smallest (left, right) pair, so runs
/// are reproducible across platforms.
pub fn bpe_train(corpus: &Corpus, k: usize) -> Result<MergeList> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if k == 0 {
        return Err(Error::InvalidBudget);
    }

    // interned symbol strings; ids are creation-ordered
    let mut symbols: Vec<Vec<Sym>> = Vec::new();
    let mut intern: HashMap<Vec<Sym>, u32> = HashMap::new();
    let intern_id = |symbols: &mut Vec<Vec<Sym>>,
                         intern: &mut HashMap<Vec<Sym>, u32>,
                         s: Vec<Sym>| match intern.get(&s) {
        Some(&id) => id,
        None => {
            let id = symbols.len() as u32;
            symbols.push(s.clone());
            intern.insert(s, id);
            id
        }
    };

    let counts = corpus.counts();
    let mut words: Vec<Vec<u32>> = (0..corpus.len())
        .map(|w| {
            corpus
                .word(w)
                .iter()
                .map(|&s| intern_id(&mut symbols, &mut intern, vec![s]))
                .collect()
        })
        .collect();

    let mut pair_counts: HashMap<(u32, u32), i64> = HashMap::new();
    // words that have contained the pair at some point; stale entries are
    // skipped when the pair is applied
    let mut pair_words: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (w, word) in words.iter().enumerate() {
        for pair in word.windows(2) {
            let key = (pair[0], pair[1]);
            *pair_counts.entry(key).or_insert(0) += counts[w] as i64;
            let entry = pair_words.entry(key).or_default();
            if entry.last() != Some(&(w as u32)) {
                entry.push(w as u32);
            }
        }
    }

    let concat = |pair: (u32, u32), symbols: &[Vec<Sym>]| {
        let mut merged = symbols[pair.0 as usize].clone();
        merged.extend_from_slice(&symbols[pair.1 as usize]);
        merged
    };
    let mut merges = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<((u32, u32), i64, Vec<Sym>)> = None;
        for (&pair, &count) in &pair_counts {
            if count <= 0 {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bpair, bcount, bmerged)) => {
                    if count != *bcount {
                        count > *bcount
                    } else {
                        // only materialize the merged string on count ties
                        match concat(pair, &symbols).cmp(bmerged) {
                            std::cmp::Ordering::Less => true,
                            std::cmp::Ordering::Greater => false,
                            std::cmp::Ordering::Equal => {
                                pair_key(pair, &symbols) < pair_key(*bpair, &symbols)
                            }
                        }
                    }
                }
            };
            if better {
                best = Some((pair, count, concat(pair, &symbols)));
            }
        }
        let Some(((left, right), _, merged)) = best else { break };
        let merged_id = intern_id(&mut symbols, &mut intern, merged);
        merges.push((
            symbols[left as usize].clone(),
            symbols[right as usize].clone(),
        ));

        let mut touched = pair_words.remove(&(left, right)).unwrap_or_default();
        touched.sort_unstable();
        touched.dedup();
        for &w in &touched {
            let w = w as usize;
            let old = &words[w];
            if !old.windows(2).any(|p| p[0] == left && p[1] == right) {
                continue;
            }
            let wc = counts[w] as i64;
            for pair in old.windows(2) {
                *pair_counts.entry((pair[0], pair[1])).or_insert(0) -= wc;
            }
            let mut new = Vec::with_capacity(old.len());
            let mut i = 0;
            while i < old.len() {
                if i + 1 < old.len() && old[i] == left && old[i + 1] == right {
                    new.push(merged_id);
                    i += 2;
                } else {
                    new.push(old[i]);
                    i += 1;
                }
            }
            for pair in new.windows(2) {
                let key = (pair[0], pair[1]);
                *pair_counts.entry(key).or_insert(0) += wc;
                let entry = pair_words.entry(key).or_default();
                if entry.last() != Some(&(w as u32)) {
                    entry.push(w as u32);
                }
            }
            words[w] = new;
        }
        debug_assert!(pair_counts.values().all(|&c| c >= 0));
        pair_counts.retain(|_, &mut c| c > 0);
    }

    Ok(MergeList { merges })
}

fn pair_key<'a>(pair: (u32, u32), symbols: &'a [Vec<Sym>]) -> (&'a [Sym], &'a [Sym]) {
    (&symbols[pair.0 as usize], &symbols[pair.1 as usize])
}

/// Encode a word by replaying merges: repeatedly apply the earliest-listed
/// merge present in the sequence until none applies.
pub fn bpe_encode(word: &[Sym], merges: &MergeList) -> Vec<Vec<Sym>> {
    let mut seq: Vec<Vec<Sym>> = word.iter().map(|&s| vec![s]).collect();
    let priority: HashMap<(&[Sym], &[Sym]), usize> = merges
        .merges
        .iter()
        .enumerate()
        .map(|(i, (l, r))| ((l.as_slice(), r.as_slice()), i))
        .collect();
    loop {
        let mut best: Option<usize> = None;
        for pair in seq.windows(2) {
            if let Some(&p) = priority.get(&(pair[0].as_slice(), pair[1].as_slice())) {
                if best.map_or(true, |b| p < b) {
                    best = Some(p);
                }
            }
        }
        let Some(p) = best else { break };
        let (l, r) = &merges.merges[p];
        let mut out: Vec<Vec<Sym>> = Vec::with_capacity(seq.len());
        let mut i = 0;
        while i < seq.len() {
            if i + 1 < seq.len() && seq[i] == *l && seq[i + 1] == *r {
                let mut m = l.clone();
                m.extend_from_slice(r);
                out.push(m);
                i += 2;
            } else {
                out.push(std::mem::take(&mut seq[i]));
                i += 1;
            }
        }
        seq = out;
    }
    seq
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

    #[test]
    fn single_pair_type() {
        let corpus = corpus_of(&[("aaaa", 1)]);
        let merges = bpe_train(&corpus, 1).unwrap();
        assert_eq!(
            merges.merges(),
            &[(syms_from_bytes(b"a"), syms_from_bytes(b"a"))]
        );
    }

    #[test]
    fn most_frequent_pair_wins() {
        let corpus = corpus_of(&[("ab", 2), ("ac", 1)]);
        let merges = bpe_train(&corpus, 1).unwrap();
        assert_eq!(
            merges.merges(),
            &[(syms_from_bytes(b"a"), syms_from_bytes(b"b"))]
        );
    }

    #[test]
    fn encode_applies_merges_in_order() {
        let merges = MergeList::new(vec![(syms_from_bytes(b"a"), syms_from_bytes(b"b"))]);
        let out = bpe_encode(&syms_from_bytes(b"abab"), &merges);
        assert_eq!(out, vec![syms_from_bytes(b"ab"), syms_from_bytes(b"ab")]);
    }

    #[test]
    fn encode_without_applicable_merges() {
        let merges = MergeList::new(vec![(syms_from_bytes(b"x"), syms_from_bytes(b"y"))]);
        let out = bpe_encode(&syms_from_bytes(b"abc"), &merges);
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn overlapping_merge_is_leftmost_first() {
        let corpus = corpus_of(&[("aaa", 1)]);
        let merges = bpe_train(&corpus, 1).unwrap();
        let out = bpe_encode(&syms_from_bytes(b"aaa"), &merges);
        assert_eq!(out, vec![syms_from_bytes(b"aa"), syms_from_bytes(b"a")]);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            bpe_train(&Corpus::default(), 1),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn merge_file_round_trip() {
        let dir = std::env::temp_dir().join("covertok-bpe-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("merges.txt");
        let corpus = Corpus::ingest(b"low lower lowest low low");
        let merges = bpe_train(&corpus, 5).unwrap();
        merges.save(&path).unwrap();
        assert_eq!(MergeList::load(&path).unwrap(), merges);
    }

    /// Textbook re-scan trainer: recount every pair from scratch each
    /// iteration. Slow but obviously correct.
    fn naive_bpe_train(corpus: &Corpus, k: usize) -> Vec<(Vec<Sym>, Vec<Sym>)> {
        let counts = corpus.counts();
        let mut words: Vec<Vec<Vec<Sym>>> = (0..corpus.len())
            .map(|w| corpus.word(w).iter().map(|&s| vec![s]).collect())
            .collect();
        let mut merges = Vec::new();
        for _ in 0..k {
            let mut pair_counts: HashMap<(Vec<Sym>, Vec<Sym>), u64> = HashMap::new();
            for (w, word) in words.iter().enumerate() {
                for pair in word.windows(2) {
                    *pair_counts
                        .entry((pair[0].clone(), pair[1].clone()))
                        .or_insert(0) += counts[w];
                }
            }
            let best = pair_counts.into_iter().max_by(|a, b| {
                let merged_a = [a.0 .0.as_slice(), a.0 .1.as_slice()].concat();
                let merged_b = [b.0 .0.as_slice(), b.0 .1.as_slice()].concat();
                (a.1, std::cmp::Reverse(merged_a), std::cmp::Reverse(a.0.clone()))
                    .cmp(&(b.1, std::cmp::Reverse(merged_b), std::cmp::Reverse(b.0.clone())))
            });
            let Some(((l, r), _)) = best else { break };
            for word in &mut words {
                let mut out = Vec::with_capacity(word.len());
                let mut i = 0;
                while i < word.len() {
                    if i + 1 < word.len() && word[i] == l && word[i + 1] == r {
                        out.push([l.as_slice(), r.as_slice()].concat());
                        i += 2;
                    } else {
                        out.push(word[i].clone());
                        i += 1;
                    }
                }
                *word = out;
            }
            merges.push((l, r));
        }
        merges
    }

    #[test]
    fn cached_trainer_matches_naive_replay() {
        let texts: [&[u8]; 3] = [
            b"the cat sat on the mat and the cat ran",
            b"aa ab aba abab bab ba",
            b"mississippi mississippi missouri miss",
        ];
        for text in texts {
            let corpus = Corpus::ingest(text);
            let fast = bpe_train(&corpus, 8).unwrap();
            let slow = naive_bpe_train(&corpus, 8);
            assert_eq!(fast.merges(), slow.as_slice());
        }
    }
}
