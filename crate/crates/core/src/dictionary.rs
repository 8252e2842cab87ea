//! Pair-linked phrase table shared by all encoders.
//!
//! Every multi-word entry is stored as `(prefix, suffix)` where `prefix` is an
//! existing token and `suffix` a base token, exactly like the string table of
//! an LZW coder. The table is therefore prefix-closed: every proper prefix of
//! a phrase is itself an entry.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::token::{TokenId, Window};

/// Surface emitted when decoding the unknown token.
pub const UNKNOWN_SURFACE: &str = "[UNK]";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DictEntry {
    pub id: TokenId,
    /// Token this entry extends. Equal to `id` for base and unknown entries.
    pub prefix: TokenId,
    /// Appended base token. Equal to `id` for base and unknown entries.
    pub suffix: TokenId,
    /// Number of base tokens represented.
    pub length: u32,
}

impl DictEntry {
    #[inline]
    pub fn is_multiword(&self) -> bool {
        self.prefix != self.id
    }
}

#[derive(Debug, Clone)]
pub struct MultiTokDictionary {
    entries: Vec<DictEntry>,
    pair_index: HashMap<(TokenId, TokenId), TokenId>,
    base_vocab: Vec<String>,
    base_index: HashMap<String, TokenId>,
    window: Window,
}

impl PartialEq for MultiTokDictionary {
    fn eq(&self, other: &Self) -> bool {
        // pair_index and base_index are functions of the other fields.
        self.window == other.window
            && self.base_vocab == other.base_vocab
            && self.entries == other.entries
    }
}

impl Eq for MultiTokDictionary {}

impl MultiTokDictionary {
    /// Creates a dictionary holding the unknown token and `base_vocab`, with
    /// ids `1..=|base_vocab|` assigned in iteration order.
    pub fn new<I, S>(base_vocab: I, window: Window) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let iter = base_vocab.into_iter();
        let mut dict = MultiTokDictionary {
            entries: Vec::with_capacity(iter.size_hint().0 + 1),
            pair_index: HashMap::new(),
            base_vocab: Vec::with_capacity(iter.size_hint().0),
            base_index: HashMap::with_capacity(iter.size_hint().0),
            window,
        };
        dict.entries.push(DictEntry {
            id: TokenId::UNKNOWN,
            prefix: TokenId::UNKNOWN,
            suffix: TokenId::UNKNOWN,
            length: 1,
        });
        for (position, word) in iter.enumerate() {
            let word: String = word.into();
            if word.is_empty() {
                return Err(Error::EmptyWord(position));
            }
            let id = dict.next_id()?;
            if dict.base_index.contains_key(&word) {
                return Err(Error::DuplicateWord(word));
            }
            dict.base_index.insert(word.clone(), id);
            dict.base_vocab.push(word);
            dict.entries.push(DictEntry {
                id,
                prefix: id,
                suffix: id,
                length: 1,
            });
        }
        Ok(dict)
    }

    /// Rebuilds a dictionary from its serialized parts. Multi-word entries
    /// must be given in ascending, dense id order starting right after the
    /// base block.
    pub fn from_parts<I, S, E>(base_vocab: I, window: Window, entries: E) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        E: IntoIterator<Item = (TokenId, TokenId, TokenId)>,
    {
        let mut dict = Self::new(base_vocab, window)?;
        for (id, prefix, suffix) in entries {
            let expected = dict.next_id()?;
            if id != expected {
                return Err(Error::NonDenseEntry {
                    expected,
                    found: id,
                });
            }
            dict.insert_extension(prefix, suffix)?;
        }
        Ok(dict)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Total number of entries, including the unknown token.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Always false: the unknown token is present in every dictionary.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn base_len(&self) -> usize {
        self.base_vocab.len()
    }

    pub fn multiword_len(&self) -> usize {
        self.entries.len() - 1 - self.base_vocab.len()
    }

    /// Id the next insertion will receive.
    pub fn next_id(&self) -> Result<TokenId> {
        u32::try_from(self.entries.len())
            .map(TokenId)
            .map_err(|_| Error::IdSpaceExhausted)
    }

    pub fn base_vocab(&self) -> &[String] {
        &self.base_vocab
    }

    pub fn entries(&self) -> &[DictEntry] {
        &self.entries
    }

    pub fn multiword_entries(&self) -> &[DictEntry] {
        &self.entries[1 + self.base_vocab.len()..]
    }

    pub fn entry(&self, id: TokenId) -> Result<&DictEntry> {
        self.entries.get(id.index()).ok_or(Error::InvalidId(id))
    }

    pub fn contains(&self, id: TokenId) -> bool {
        id.index() < self.entries.len()
    }

    #[inline]
    pub fn is_base(&self, id: TokenId) -> bool {
        id.0 >= 1 && id.index() <= self.base_vocab.len()
    }

    #[inline]
    pub fn is_multiword(&self, id: TokenId) -> bool {
        id.index() > self.base_vocab.len() && id.index() < self.entries.len()
    }

    pub fn base_id(&self, word: &str) -> Option<TokenId> {
        self.base_index.get(word).copied()
    }

    /// Surface of a base or unknown token; `None` for multi-word tokens.
    pub fn surface(&self, id: TokenId) -> Option<&str> {
        if id == TokenId::UNKNOWN {
            Some(UNKNOWN_SURFACE)
        } else if self.is_base(id) {
            Some(&self.base_vocab[id.index() - 1])
        } else {
            None
        }
    }

    /// Number of base tokens `id` represents.
    pub fn length(&self, id: TokenId) -> Result<usize> {
        self.entry(id).map(|e| e.length as usize)
    }

    /// Id of the phrase `expand(prefix) ++ [suffix]`, if present.
    pub fn lookup_extension(&self, prefix: TokenId, suffix: TokenId) -> Result<Option<TokenId>> {
        if !self.contains(prefix) {
            return Err(Error::InvalidId(prefix));
        }
        if !self.contains(suffix) {
            return Err(Error::InvalidId(suffix));
        }
        if !self.is_base(suffix) {
            return Err(Error::NotBaseToken(suffix));
        }
        Ok(self.pair_index.get(&(prefix, suffix)).copied())
    }

    /// Unchecked variant for the hot encoding loops, where both ids are
    /// known to be valid.
    #[inline]
    pub(crate) fn extension(&self, prefix: TokenId, suffix: TokenId) -> Option<TokenId> {
        self.pair_index.get(&(prefix, suffix)).copied()
    }

    /// Adds `expand(prefix) ++ [suffix]` at the next free id.
    pub fn insert_extension(&mut self, prefix: TokenId, suffix: TokenId) -> Result<TokenId> {
        if let Some(existing) = self.lookup_extension(prefix, suffix)? {
            return Err(Error::DuplicateExtension {
                prefix,
                suffix,
                existing,
            });
        }
        if prefix == TokenId::UNKNOWN {
            return Err(Error::NotExtendable(prefix));
        }
        let length = self.entries[prefix.index()].length as usize + 1;
        if !self.window.allows(length) {
            return Err(Error::WindowExceeded {
                prefix,
                length,
                window: self.window,
            });
        }
        let id = self.next_id()?;
        self.entries.push(DictEntry {
            id,
            prefix,
            suffix,
            length: length as u32,
        });
        self.pair_index.insert((prefix, suffix), id);
        Ok(id)
    }

    /// Base-token sequence represented by `id`.
    pub fn expand(&self, id: TokenId) -> Result<Vec<TokenId>> {
        let mut out = Vec::with_capacity(self.length(id)?);
        self.expand_into(id, &mut out)?;
        Ok(out)
    }

    /// Appends the expansion of `id` to `out`.
    pub fn expand_into(&self, id: TokenId, out: &mut Vec<TokenId>) -> Result<()> {
        let start = out.len();
        let mut current = *self.entry(id)?;
        while current.is_multiword() {
            out.push(current.suffix);
            current = self.entries[current.prefix.index()];
        }
        out.push(current.id);
        out[start..].reverse();
        Ok(())
    }
}
