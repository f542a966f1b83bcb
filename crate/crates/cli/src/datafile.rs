//! Dataset files.
//!
//! Binary form, little-endian:
//!
//! ```text
//! magic "LCPKDATA" | version u16 | symbol width u16 | N u64 | L u32 | sigma u32
//! N rows of L symbols, each u16
//! ```
//!
//! Text form: one item per line, tokens separated by whitespace. Tokens are
//! numbered in order of first occurrence and the numbering is written out as a
//! vocabulary file, one token per line (line `i + 1` holds symbol `i`).

use std::collections::HashMap;
use std::io::Write;

use lcpk_core::{Alphabet, Dataset, Symbol};

use crate::error::CliError;

pub const DATASET_MAGIC: &[u8; 8] = b"LCPKDATA";
pub const DATASET_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 8 + 2 + 2 + 8 + 4 + 4;
const SYMBOL_WIDTH: u16 = 2;

pub fn encode_dataset(dataset: &Dataset) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + dataset.as_flat().len() * 2);
    out.extend_from_slice(DATASET_MAGIC);
    out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    out.extend_from_slice(&SYMBOL_WIDTH.to_le_bytes());
    out.extend_from_slice(&(dataset.len() as u64).to_le_bytes());
    out.extend_from_slice(&(dataset.seq_len() as u32).to_le_bytes());
    out.extend_from_slice(&dataset.alphabet().size().to_le_bytes());
    for &s in dataset.as_flat() {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn is_binary_dataset(bytes: &[u8]) -> bool {
    bytes.starts_with(DATASET_MAGIC)
}

pub fn decode_dataset(bytes: &[u8]) -> Result<Dataset, CliError> {
    let bad = |what: String| CliError::Data(format!("header: {what}"));
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("{} bytes, need at least {HEADER_LEN}", bytes.len())));
    }
    if !is_binary_dataset(bytes) {
        return Err(bad("bad magic (not a binary dataset file)".into()));
    }
    let u16_at = |at: usize| u16::from_le_bytes([bytes[at], bytes[at + 1]]);
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let version = u16_at(8);
    if version != DATASET_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let width = u16_at(10);
    if width != SYMBOL_WIDTH {
        return Err(bad(format!("symbol width {width}, expected {SYMBOL_WIDTH}")));
    }
    let n = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let len = u32_at(20) as usize;
    let sigma = u32_at(24);
    let alphabet = Alphabet::new(sigma).map_err(|e| bad(e.to_string()))?;
    if len == 0 {
        return Err(bad("sequence length is 0".into()));
    }
    let body = &bytes[HEADER_LEN..];
    let expected = (n as u128) * (len as u128) * 2;
    if body.len() as u128 != expected {
        let whole = body.len() / (len * 2);
        return Err(CliError::Data(format!(
            "record {whole}: file holds {} payload bytes, header promises {expected} ({n} records of {len} symbols)",
            body.len()
        )));
    }
    let symbols: Vec<Symbol> = body
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]))
        .collect();
    for (record, row) in symbols.chunks_exact(len).enumerate() {
        if let Some((pos, s)) = row.iter().enumerate().find(|(_, &s)| !alphabet.contains(s)) {
            return Err(CliError::Data(format!(
                "record {record}, position {pos}: symbol {s} outside alphabet of size {sigma}"
            )));
        }
    }
    Dataset::from_flat(alphabet, len, symbols).map_err(CliError::from)
}

/// Token numbering for text datasets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, Symbol>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn symbol(&self, token: &str) -> Option<Symbol> {
        self.ids.get(token).copied()
    }

    fn intern(&mut self, token: &str) -> Option<Symbol> {
        if let Some(&s) = self.ids.get(token) {
            return Some(s);
        }
        let s = Symbol::try_from(self.tokens.len()).ok()?;
        self.tokens.push(token.to_owned());
        self.ids.insert(token.to_owned(), s);
        Some(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(t);
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut vocab = Vocabulary::default();
        for (i, line) in text.lines().enumerate() {
            let token = line.trim();
            if token.is_empty() || token.split_whitespace().nth(1).is_some() {
                return Err(CliError::Data(format!("vocabulary line {}: expected one token", i + 1)));
            }
            if vocab.ids.contains_key(token) {
                return Err(CliError::Data(format!("vocabulary line {}: duplicate token {token:?}", i + 1)));
            }
            vocab
                .intern(token)
                .ok_or_else(|| CliError::Data(format!("vocabulary line {}: more than 65536 tokens", i + 1)))?;
        }
        Ok(vocab)
    }

    /// Maps a whitespace-separated token line through the vocabulary.
    pub fn encode_line(&self, line: &str) -> Result<Vec<Symbol>, String> {
        line.split_whitespace()
            .map(|t| self.symbol(t).ok_or_else(|| format!("unknown token {t:?}")))
            .collect()
    }
}

/// Parses the text form. Blank lines are skipped; every other line must hold
/// the same number of tokens. The alphabet is the vocabulary size (at least 2).
pub fn parse_text_dataset(text: &str) -> Result<(Dataset, Vocabulary), CliError> {
    let mut vocab = Vocabulary::default();
    let mut len = None;
    let mut symbols = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let before = symbols.len();
        for token in line.split_whitespace() {
            let s = vocab
                .intern(token)
                .ok_or_else(|| CliError::Data(format!("line {line_no}: more than 65536 distinct tokens")))?;
            symbols.push(s);
        }
        let count = symbols.len() - before;
        if count == 0 {
            continue;
        }
        match len {
            None => len = Some(count),
            Some(l) if l != count => {
                return Err(CliError::Data(format!(
                    "line {line_no}: {count} tokens, expected {l} like the first item"
                )))
            }
            Some(_) => {}
        }
    }
    let Some(len) = len else {
        return Err(CliError::Data(
            "line 1: no items; use the binary form for an empty dataset".into(),
        ));
    };
    let alphabet = Alphabet::new((vocab.len() as u32).max(2))?;
    Ok((Dataset::from_flat(alphabet, len, symbols)?, vocab))
}

/// Writes `bytes` to `path`, creating parent directories.
pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(bytes).map_err(|e| CliError::io(path, e))
}

pub fn read_file(path: &std::path::Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}
