//! Encoding text to token ids and lossless decoding back to bytes, plus the
//! vocabulary and token-id stream file formats.
//!
//! Greedy encoding replays selection priority: all occurrences of selected
//! tokens in a word are applied in (rank, position) order under the
//! endpoint rule, so a later, longer token can absorb the spans of earlier
//! shorter ones. Optimal encoding instead emits a minimum-token
//! segmentation from the partition DP.

use std::fs;
use std::path::Path;

use crate::corpus::WHITESPACE;
use crate::cover::{partition_dp, CoverState};
use crate::error::{Error, Result};
use crate::symbol::{marked_word, token_from_hex, token_to_hex, Sym, MARKER};
use crate::trainer::Vocabulary;

/// Token ids: `0..=255` are bytes, 256 is the marker, `256 + r` is the
/// selected token with rank `r`.
pub type TokenId = u32;

/// Id of the word-start marker singleton.
pub const MARKER_ID: TokenId = 256;

/// Id of the first selected token (rank 1).
pub const FIRST_RANK_ID: TokenId = 257;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodeMode {
    Greedy,
    Optimal,
}

fn singleton_id(sym: Sym) -> TokenId {
    TokenId::from(sym)
}

/// Encode one word by rank-priority covering.
pub fn encode_word(word: &[Sym], vocab: &Vocabulary) -> Vec<TokenId> {
    if word.is_empty() {
        return Vec::new();
    }
    // all occurrences of selected tokens, then (rank, position) order
    let mut occs: Vec<(u32, usize, usize)> = Vec::new(); // (rank, pos, len)
    let max_len = vocab.max_token_len().min(word.len());
    for pos in 0..word.len().saturating_sub(1) {
        let top = word.len().min(pos + max_len);
        for end in pos + 2..=top {
            if let Some(rank) = vocab.rank_of(&word[pos..end]) {
                occs.push((rank, pos, end - pos));
            }
        }
    }
    occs.sort_unstable_by_key(|&(rank, pos, _)| (rank, pos));

    let mut state = CoverState::new([word.len()]);
    let mut writes = 0usize;
    for &(rank, pos, len) in &occs {
        if state.endpoints_free(0, pos, len) {
            writes += state.set_span(0, pos, len, rank);
        }
    }
    debug_assert!(
        writes <= word.len() * word.len(),
        "label writes exceed the quadratic bound"
    );

    emit(word, state.labels(0), vocab)
}

/// Read a fully covered word off its labels: maximal nonzero runs become
/// selected tokens, zero-delimited leftovers become singletons.
fn emit(word: &[Sym], labels: &[u32], vocab: &Vocabulary) -> Vec<TokenId> {
    let mut ids = Vec::new();
    let mut start = 0usize;
    for end in 1..=word.len() {
        // a segment ends where the pair (end-1, end) is uncovered
        if end == word.len() || labels[end - 1] == 0 {
            if end - start == 1 {
                ids.push(singleton_id(word[start]));
            } else {
                let rank = labels[start];
                debug_assert!(labels[start..end - 1].iter().all(|&m| m == rank));
                debug_assert_eq!(vocab.token_by_rank(rank), Some(&word[start..end]));
                ids.push(MARKER_ID + rank);
            }
            start = end;
        }
    }
    ids
}

/// Encode one word by minimum-token segmentation (the partition DP witness).
pub fn encode_word_optimal(word: &[Sym], vocab: &Vocabulary) -> Vec<TokenId> {
    let tokens = vocab.token_set();
    let (_, seg) = partition_dp(word, &tokens);
    seg.segments(word)
        .map(|part| {
            if part.len() == 1 {
                singleton_id(part[0])
            } else {
                MARKER_ID + vocab.rank_of(part).expect("DP segments come from the vocabulary")
            }
        })
        .collect()
}

/// Whitespace-split a byte stream and encode word by word. Each word is
/// marker-prefixed exactly as during ingestion.
pub fn encode_text(text: &[u8], vocab: &Vocabulary, mode: EncodeMode) -> Vec<TokenId> {
    let mut ids = Vec::new();
    for chunk in text.split(|b| WHITESPACE.contains(b)) {
        if chunk.is_empty() {
            continue;
        }
        let word = marked_word(chunk);
        match mode {
            EncodeMode::Greedy => ids.extend(encode_word(&word, vocab)),
            EncodeMode::Optimal => ids.extend(encode_word_optimal(&word, vocab)),
        }
    }
    ids
}

/// Concatenate token bytes; the marker renders as a single space except at
/// the very start of the stream.
pub fn decode(ids: &[TokenId], vocab: &Vocabulary) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let push_sym = |out: &mut Vec<u8>, sym: Sym| {
        if sym == MARKER {
            if !out.is_empty() {
                out.push(b' ');
            }
        } else {
            out.push(sym as u8);
        }
    };
    for &id in ids {
        if id < MARKER_ID {
            out.push(id as u8);
        } else if id == MARKER_ID {
            push_sym(&mut out, MARKER);
        } else {
            let rank = id - MARKER_ID;
            let token = vocab
                .token_by_rank(rank)
                .ok_or(Error::InvalidTokenId(id))?;
            for &sym in token {
                push_sym(&mut out, sym);
            }
        }
    }
    Ok(out)
}

/// Collapse whitespace runs to single spaces and trim the ends: the image
/// of `decode . encode_text`, and a fixed point of itself.
pub fn normalize_whitespace(text: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(text.len());
    for chunk in text.split(|b| WHITESPACE.contains(b)) {
        if chunk.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(b' ');
        }
        out.extend_from_slice(chunk);
    }
    out
}

const VOCAB_MAGIC: &str = "GREEDTOK-VOCAB v1";

/// Serialize a vocabulary: magic line, `k=<n>`, then one token per line in
/// rank order.
pub fn vocab_text(vocab: &Vocabulary) -> String {
    let mut out = String::new();
    out.push_str(VOCAB_MAGIC);
    out.push('\n');
    out.push_str(&format!("k={}\n", vocab.k()));
    for token in vocab.selected() {
        out.push_str(&token_to_hex(token));
        out.push('\n');
    }
    out
}

pub fn save_vocab(vocab: &Vocabulary, path: &Path) -> Result<()> {
    fs::write(path, vocab_text(vocab))?;
    Ok(())
}

pub fn load_vocab(path: &Path) -> Result<Vocabulary> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing header"))?;
    if magic != VOCAB_MAGIC {
        return Err(Error::parse(path, 1, "bad magic"));
    }
    let (_, kline) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 2, "missing k line"))?;
    let k: usize = kline
        .strip_prefix("k=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(path, 2, "expected k=<count>"))?;
    let mut selected = Vec::with_capacity(k);
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let token =
            token_from_hex(line).map_err(|msg| Error::parse(path, lineno + 1, msg))?;
        selected.push(token);
    }
    if selected.len() != k {
        return Err(Error::parse(
            path,
            2,
            format!("k={} but found {} tokens", k, selected.len()),
        ));
    }
    Vocabulary::new(selected)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdFormat {
    /// One decimal id per line.
    Dec,
    /// `u32` little-endian count, then one `u32` little-endian id each.
    Bin,
}

pub fn ids_to_bytes(ids: &[TokenId], format: IdFormat) -> Vec<u8> {
    match format {
        IdFormat::Dec => {
            let mut out = String::new();
            for id in ids {
                out.push_str(&id.to_string());
                out.push('\n');
            }
            out.into_bytes()
        }
        IdFormat::Bin => {
            let mut out = Vec::with_capacity(4 + ids.len() * 4);
            out.extend_from_slice(&(ids.len() as u32).to_le_bytes());
            for id in ids {
                out.extend_from_slice(&id.to_le_bytes());
            }
            out
        }
    }
}

pub fn ids_from_bytes(bytes: &[u8], format: IdFormat) -> Result<Vec<TokenId>> {
    match format {
        IdFormat::Dec => {
            let text = std::str::from_utf8(bytes)
                .map_err(|_| Error::parse("<ids>", 0, "id stream is not UTF-8"))?;
            text.lines()
                .enumerate()
                .filter(|(_, l)| !l.is_empty())
                .map(|(lineno, line)| {
                    line.trim()
                        .parse()
                        .map_err(|_| Error::parse("<ids>", lineno + 1, "invalid id"))
                })
                .collect()
        }
        IdFormat::Bin => {
            if bytes.len() < 4 {
                return Err(Error::parse("<ids>", 0, "truncated id stream"));
            }
            let n = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
            if bytes.len() != 4 + n * 4 {
                return Err(Error::parse("<ids>", 0, "id stream length mismatch"));
            }
            Ok(bytes[4..]
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect())
        }
    }
}
