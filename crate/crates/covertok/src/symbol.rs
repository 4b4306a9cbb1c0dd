//! The byte-level symbol alphabet and its textual serialization.
//!
//! Symbols are the 256 byte values plus one reserved word-start marker, so
//! tokens over this alphabet are `u16` sequences. Serialized form is
//! lowercase byte hex; a leading marker is written as a `_` prefix since it
//! has no byte value of its own. The marker only ever appears at position 0
//! of a word, so one prefix flag suffices.

/// A symbol: `0..=255` are bytes, [`MARKER`] is the word-start marker.
pub type Sym = u16;

/// Reserved word-start symbol, distinct from every byte value.
pub const MARKER: Sym = 256;

/// Number of singleton symbols (256 bytes + marker).
pub const ALPHABET_SIZE: usize = 257;

/// Raw bytes as symbols, no marker.
pub fn syms_from_bytes(bytes: &[u8]) -> Vec<Sym> {
    bytes.iter().map(|&b| Sym::from(b)).collect()
}

/// Marker-prefixed word symbols.
pub fn marked_word(bytes: &[u8]) -> Vec<Sym> {
    let mut syms = Vec::with_capacity(bytes.len() + 1);
    syms.push(MARKER);
    syms.extend(bytes.iter().map(|&b| Sym::from(b)));
    syms
}

/// Serialize a symbol sequence: optional `_` for a leading marker, then
/// lowercase hex of the byte symbols.
pub fn token_to_hex(token: &[Sym]) -> String {
    let (marked, rest) = match token.split_first() {
        Some((&MARKER, rest)) => (true, rest),
        _ => (false, token),
    };
    let mut out = String::with_capacity(rest.len() * 2 + usize::from(marked));
    if marked {
        out.push('_');
    }
    for &s in rest {
        debug_assert!(s < 256, "marker is only valid at position 0");
        out.push_str(&format!("{:02x}", s as u8));
    }
    out
}

/// Parse the serialization produced by [`token_to_hex`].
pub fn token_from_hex(text: &str) -> Result<Vec<Sym>, String> {
    let (marked, hex) = match text.strip_prefix('_') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    if hex.len() % 2 != 0 {
        return Err(format!("odd hex length {}", hex.len()));
    }
    let mut syms = Vec::with_capacity(hex.len() / 2 + usize::from(marked));
    if marked {
        syms.push(MARKER);
    }
    let bytes = hex.as_bytes();
    for pair in bytes.chunks_exact(2) {
        let hi = hex_digit(pair[0])?;
        let lo = hex_digit(pair[1])?;
        syms.push(Sym::from(hi * 16 + lo));
    }
    Ok(syms)
}

fn hex_digit(c: u8) -> Result<u8, String> {
    match c {
        b'0'..=b'9' => Ok(c - b'0'),
        b'a'..=b'f' => Ok(c - b'a' + 10),
        _ => Err(format!("invalid hex digit {:?}", char::from(c))),
    }
}

/// Human-oriented rendering: printable ASCII as-is, the marker as `▁`,
/// everything else as `\x..` escapes. For logs and reports only.
pub fn token_display(token: &[Sym]) -> String {
    let mut out = String::new();
    for &s in token {
        if s == MARKER {
            out.push('▁');
        } else if (0x21..=0x7e).contains(&s) {
            out.push(char::from(s as u8));
        } else {
            out.push_str(&format!("\\x{:02x}", s));
        }
    }
    out
}
