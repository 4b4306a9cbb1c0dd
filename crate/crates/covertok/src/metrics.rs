//! Compression metrics and the relaxation-ratio diagnostic.

use std::time::Instant;

use crate::baselines::{bpe_encode, bpe_train, build_wmc, greed_wmc};
use crate::corpus::{CandidateSet, Corpus};
use crate::cover::partition_dp;
use crate::encoder::{encode_word, EncodeMode};
use crate::error::{Error, Result};
use crate::trainer::{select_tokens, Vocabulary};

/// Count-weighted mean tokens per word under a trained vocabulary.
pub fn tokens_per_word(corpus: &Corpus, vocab: &Vocabulary, mode: EncodeMode) -> Result<f64> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let tokens = vocab.token_set();
    let mut total = 0u64;
    for w in 0..corpus.len() {
        let word = corpus.word(w);
        let n = match mode {
            EncodeMode::Greedy => encode_word(word, vocab).len(),
            EncodeMode::Optimal => partition_dp(word, &tokens).0,
        };
        total += corpus.count(w) * n as u64;
    }
    Ok(total as f64 / corpus.total_words() as f64)
}

/// One point of the relaxation-ratio curve.
#[derive(Debug, Clone, Copy)]
pub struct DinstPoint {
    pub k: usize,
    pub greedy_objective: u64,
    pub relaxed_objective: u64,
    pub ratio: f64,
}

/// Ratio of the greedy tokenizer's objective to the relaxed
/// maximum-coverage greedy objective on the same instance. The relaxation
/// ignores overlap constraints, so its objective is an upper bound and the
/// ratio certifies how much the constraints actually cost.
pub fn d_inst(corpus: &Corpus, candidates: &CandidateSet, k: usize) -> Result<f64> {
    let points = d_inst_sweep(corpus, candidates, &[k])?;
    Ok(points[0].ratio)
}

/// The ratio at several budgets, sharing one training run: greedy
/// selections are nested, so the objective at a smaller budget is a prefix
/// of the larger run's record.
pub fn d_inst_sweep(
    corpus: &Corpus,
    candidates: &CandidateSet,
    ks: &[usize],
) -> Result<Vec<DinstPoint>> {
    let max_k = ks.iter().copied().max().ok_or(Error::InvalidBudget)?;
    if ks.iter().any(|&k| k == 0) {
        return Err(Error::InvalidBudget);
    }
    let outcome = select_tokens(corpus, candidates, max_k)?;
    let instance = build_wmc(corpus, candidates);
    let relaxed = greed_wmc(&instance, max_k)?;
    ks.iter()
        .map(|&k| {
            let greedy_objective = outcome.objective_at(k);
            let relaxed_objective = relaxed.objective_at(k);
            if relaxed_objective == 0 {
                return Err(Error::DegenerateInstance);
            }
            Ok(DinstPoint {
                k,
                greedy_objective,
                relaxed_objective,
                ratio: greedy_objective as f64 / relaxed_objective as f64,
            })
        })
        .collect()
}

/// `k  greedy  relaxed  ratio` lines, suitable for plotting.
pub fn d_inst_table(points: &[DinstPoint]) -> String {
    let mut out = String::from("k\tgreedy_objective\trelaxed_objective\td_inst\n");
    for p in points {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.4}\n",
            p.k, p.greedy_objective, p.relaxed_objective, p.ratio
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    GreedTok,
    Bpe,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GreedTok => "greedtok",
            Algorithm::Bpe => "bpe",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    /// Candidate extraction knobs for the greedy tokenizer.
    pub max_len: usize,
    pub min_freq: u64,
    /// Include wall-clock times. Off yields byte-identical reruns.
    pub timing: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        let c = crate::corpus::CandidateOptions::default();
        ReportOptions {
            max_len: c.max_len,
            min_freq: c.min_freq,
            timing: true,
        }
    }
}

/// Train each algorithm at each budget and tabulate compression: one TSV
/// row per (algorithm, budget) with tokens/word, the covered-pair
/// objective, and wall time, plus a relative-improvement row per budget
/// where both algorithms ran.
pub fn compression_report(
    corpus: &Corpus,
    ks: &[usize],
    algorithms: &[Algorithm],
    opts: ReportOptions,
) -> Result<String> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let total_symbols: u64 = (0..corpus.len())
        .map(|w| corpus.count(w) * corpus.word(w).len() as u64)
        .sum();
    let mut out = String::from("algorithm\tk\ttokens_per_word\tobjective\twall_ms\n");
    let mut tpw: Vec<(Algorithm, usize, f64)> = Vec::new();
    for &k in ks {
        for &algo in algorithms {
            let start = Instant::now();
            let total_tokens: u64 = match algo {
                Algorithm::GreedTok => {
                    let cands = crate::corpus::extract_candidates(
                        corpus,
                        crate::corpus::CandidateOptions {
                            max_len: opts.max_len,
                            min_freq: opts.min_freq,
                        },
                    )?;
                    let outcome = select_tokens(corpus, &cands, k)?;
                    (0..corpus.len())
                        .map(|w| {
                            corpus.count(w) * encode_word(corpus.word(w), &outcome.vocab).len() as u64
                        })
                        .sum()
                }
                Algorithm::Bpe => {
                    let merges = bpe_train(corpus, k)?;
                    (0..corpus.len())
                        .map(|w| {
                            corpus.count(w) * bpe_encode(corpus.word(w), &merges).len() as u64
                        })
                        .sum()
                }
            };
            let wall = start.elapsed().as_secs_f64() * 1e3;
            let ratio = total_tokens as f64 / corpus.total_words() as f64;
            // covered pairs are exactly the symbols that do not start a token
            let objective = total_symbols - total_tokens;
            let wall_text = if opts.timing {
                format!("{wall:.4}")
            } else {
                "-".to_string()
            };
            out.push_str(&format!(
                "{}\t{}\t{:.4}\t{}\t{}\n",
                algo.name(),
                k,
                ratio,
                objective,
                wall_text
            ));
            tpw.push((algo, k, ratio));
        }
        let gtk = tpw
            .iter()
            .find(|&&(a, kk, _)| a == Algorithm::GreedTok && kk == k)
            .map(|&(_, _, v)| v);
        let bpe = tpw
            .iter()
            .find(|&&(a, kk, _)| a == Algorithm::Bpe && kk == k)
            .map(|&(_, _, v)| v);
        if let (Some(g), Some(b)) = (gtk, bpe) {
            out.push_str(&format!(
                "improvement_pct\t{}\t{:.4}\t-\t-\n",
                k,
                (b - g) / b * 100.0
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{extract_candidates, CandidateOptions, Word};
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
    fn empty_vocabulary_gives_mean_word_length() {
        let corpus = corpus_of(&[("abc", 1), ("de", 3)]);
        let tpw = tokens_per_word(&corpus, &Vocabulary::empty(), EncodeMode::Greedy).unwrap();
        assert!((tpw - (3.0 + 2.0 * 3.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn four_word_instance_tokens_per_word() {
        let corpus = corpus_of(&[("random", 1), ("randose", 1), ("rosey", 1), ("randy", 1)]);
        let cands = candidates_of(&["random", "randose", "rosey", "randy", "rand", "ose"]);
        let outcome = select_tokens(&corpus, &cands, 2).unwrap();
        let tpw = tokens_per_word(&corpus, &outcome.vocab, EncodeMode::Optimal).unwrap();
        assert!((tpw - 2.5).abs() < 1e-12);

        // the whole-word pruning outcome is strictly worse here
        let pruned = Vocabulary::new(vec![
            syms_from_bytes(b"random"),
            syms_from_bytes(b"randose"),
        ])
        .unwrap();
        let tpw = tokens_per_word(&corpus, &pruned, EncodeMode::Optimal).unwrap();
        assert!((tpw - 3.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_never_beats_greedy_never_beats_empty() {
        let corpus = Corpus::ingest(b"banana bandana cabana banana cab");
        let cands = extract_candidates(
            &corpus,
            CandidateOptions {
                max_len: 8,
                min_freq: 1,
            },
        )
        .unwrap();
        let outcome = select_tokens(&corpus, &cands, 5).unwrap();
        let optimal = tokens_per_word(&corpus, &outcome.vocab, EncodeMode::Optimal).unwrap();
        let greedy = tokens_per_word(&corpus, &outcome.vocab, EncodeMode::Greedy).unwrap();
        let empty = tokens_per_word(&corpus, &Vocabulary::empty(), EncodeMode::Greedy).unwrap();
        assert!(optimal <= greedy + 1e-12);
        assert!(greedy <= empty + 1e-12);
    }

    #[test]
    fn non_overlapping_instance_has_ratio_one() {
        let corpus = corpus_of(&[("abxcd", 2)]);
        let cands = candidates_of(&["ab", "cd"]);
        let ratio = d_inst(&corpus, &cands, 2).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_constraints_lower_the_ratio() {
        let corpus = corpus_of(&[("ayaya", 1)]);
        let cands = candidates_of(&["ay", "ya"]);
        let points = d_inst_sweep(&corpus, &cands, &[2]).unwrap();
        assert_eq!(points[0].greedy_objective, 2);
        assert_eq!(points[0].relaxed_objective, 4);
        assert!((points[0].ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_instance_is_an_error() {
        let corpus = corpus_of(&[("ab", 1)]);
        let cands = candidates_of(&["xy"]);
        assert!(matches!(
            d_inst(&corpus, &cands, 1),
            Err(Error::DegenerateInstance)
        ));
    }

    #[test]
    fn aggregated_identity_holds() {
        let corpus = Corpus::ingest(b"the cat sat on the mat");
        let cands = extract_candidates(
            &corpus,
            CandidateOptions {
                max_len: 8,
                min_freq: 1,
            },
        )
        .unwrap();
        let outcome = select_tokens(&corpus, &cands, 4).unwrap();
        let tokens = outcome.vocab.token_set();
        let mut partitions = 0u64;
        let mut covers = 0u64;
        let mut symbols = 0u64;
        for w in 0..corpus.len() {
            let c = corpus.count(w);
            let word = corpus.word(w);
            partitions += c * partition_dp(word, &tokens).0 as u64;
            covers += c * crate::cover::cover_exact(word, &tokens) as u64;
            symbols += c * word.len() as u64;
        }
        assert_eq!(covers + partitions, symbols);
    }

    #[test]
    fn report_is_deterministic_without_timing() {
        let corpus = Corpus::ingest(b"aa ab aa ba aa ab");
        let opts = ReportOptions {
            max_len: 4,
            min_freq: 1,
            timing: false,
        };
        let a = compression_report(&corpus, &[1, 2], &[Algorithm::GreedTok, Algorithm::Bpe], opts)
            .unwrap();
        let b = compression_report(&corpus, &[1, 2], &[Algorithm::GreedTok, Algorithm::Bpe], opts)
            .unwrap();
        assert_eq!(a, b);
        assert!(a.contains("improvement_pct"));
    }

    #[test]
    fn single_row_report() {
        let corpus = Corpus::ingest(b"aa aa");
        let opts = ReportOptions {
            max_len: 4,
            min_freq: 1,
            timing: false,
        };
        let report = compression_report(&corpus, &[1], &[Algorithm::GreedTok], opts).unwrap();
        let lines: Vec<&str> = report.lines().collect();
        assert_eq!(lines.len(), 2); // header + one row
        assert!(lines[1].starts_with("greedtok\t1\t"));
    }
}
