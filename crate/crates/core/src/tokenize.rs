//! Base token streams: words, subword pieces, or caller-supplied tokens.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::error::{Error, Result};

/// Prefix carried by non-initial subword pieces.
pub const CONTINUATION_MARKER: &str = "##";

/// Piece emitted for words the subword vocabulary cannot decompose.
pub const UNKNOWN_PIECE: &str = "[UNK]";

/// Lowercases, splits on Unicode whitespace and strips leading and trailing
/// ASCII punctuation from every word. Intra-word punctuation is kept.
pub fn word_tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| c.is_ascii_punctuation()))
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

/// BERT-style piece vocabulary (`vocab.txt`: one piece per line, id order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordVocab {
    pieces: Vec<String>,
    index: HashSet<String>,
}

impl SubwordVocab {
    pub fn new<I, S>(pieces: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = SubwordVocab {
            pieces: Vec::new(),
            index: HashSet::new(),
        };
        for (position, piece) in pieces.into_iter().enumerate() {
            let piece: String = piece.into();
            if piece.is_empty() {
                return Err(Error::EmptyWord(position));
            }
            if !vocab.index.insert(piece.clone()) {
                return Err(Error::DuplicateWord(piece));
            }
            vocab.pieces.push(piece);
        }
        Ok(vocab)
    }

    /// Parses the one-piece-per-line file format. Trailing whitespace on a
    /// line and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.lines().map(str::trim_end).filter(|l| !l.is_empty()))
    }

    pub fn pieces(&self) -> &[String] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, piece: &str) -> bool {
        self.index.contains(piece)
    }
}

/// Greedy longest-prefix decomposition of a single word.
pub fn subword_tokenize(word: &str, vocab: &SubwordVocab) -> Vec<String> {
    if word.is_empty() {
        return Vec::new();
    }
    let mut pieces = Vec::new();
    let mut candidate = String::with_capacity(word.len() + CONTINUATION_MARKER.len());
    let mut start = 0;
    while start < word.len() {
        let rest = &word[start..];
        let mut found = None;
        // Char boundaries of `rest`, longest first.
        let mut ends: Vec<usize> = rest.char_indices().skip(1).map(|(i, _)| i).collect();
        ends.push(rest.len());
        for &end in ends.iter().rev() {
            candidate.clear();
            if start > 0 {
                candidate.push_str(CONTINUATION_MARKER);
            } else if rest[..end].starts_with(CONTINUATION_MARKER) {
                // continuation pieces never match at word start
                continue;
            }
            candidate.push_str(&rest[..end]);
            if vocab.contains(&candidate) {
                found = Some(end);
                break;
            }
        }
        match found {
            Some(end) => {
                pieces.push(candidate.clone());
                start += end;
            }
            None => return vec![UNKNOWN_PIECE.to_string()],
        }
    }
    pieces
}

/// How corpus text becomes base tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseTokenizer {
    Word,
    /// Words split further into subword pieces.
    Subword(SubwordVocab),
}

impl BaseTokenizer {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        match self {
            BaseTokenizer::Word => word_tokenize(text),
            BaseTokenizer::Subword(vocab) => word_tokenize(text)
                .iter()
                .flat_map(|w| subword_tokenize(w, vocab))
                .collect(),
        }
    }
}
