//! Frequency analysis and removal of rarely used multi-word tokens.
//!
//! A multi-word token emitted at least once but fewer than `min_count` times
//! is pruned; every occurrence is replaced by its prefix and suffix, recursing
//! through pruned prefixes until a surviving token (or a base token) is
//! reached. Entries whose prefix chain contains a pruned token are removed as
//! well, so the output dictionary stays prefix-closed. Surviving multi-word
//! tokens are renumbered densely after the base block.
//!
//! Never-emitted entries are kept. After a training build they have no
//! children, so they cannot gain occurrences when pruned neighbours expand,
//! and a second pass with the same threshold removes nothing.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::dictionary::MultiTokDictionary;
use crate::encoder::EncodedSample;
use crate::error::{Error, Result};
use crate::token::TokenId;

/// Occurrence counts of emitted ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: BTreeMap<TokenId, u64>,
}

impl FrequencyTable {
    pub fn get(&self, id: TokenId) -> u64 {
        self.counts.get(&id).copied().unwrap_or(0)
    }

    /// Sum of all counts, i.e. the number of emitted tokens.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `(id, count)` pairs in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (TokenId, u64)> + '_ {
        self.counts.iter().map(|(&id, &n)| (id, n))
    }
}

pub fn count_frequencies(
    dict: &MultiTokDictionary,
    encoded: &[EncodedSample],
) -> Result<FrequencyTable> {
    let mut dense = vec![0u64; dict.len()];
    for sample in encoded {
        for (position, &id) in sample.token_ids.iter().enumerate() {
            let slot = dense
                .get_mut(id.index())
                .ok_or_else(|| Error::InvalidIdAt {
                    sample: sample.id.clone(),
                    position,
                    id,
                })?;
            *slot += 1;
        }
    }
    let counts = dense
        .into_iter()
        .enumerate()
        .filter(|&(_, n)| n > 0)
        .map(|(id, n)| (TokenId(id as u32), n))
        .collect();
    Ok(FrequencyTable { counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneConfig {
    /// Multi-word tokens emitted fewer times than this are pruned.
    pub min_count: u64,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig { min_count: 2 }
    }
}

/// Why an entry was removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Removal {
    /// Emitted, but fewer than `min_count` times.
    Count,
    /// Own count passed, but an ancestor in its prefix chain was pruned.
    Cascade,
}

/// Old-to-new id mapping produced by pruning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdRemap {
    /// Indexed by old id; `None` for removed entries.
    new_ids: Vec<Option<TokenId>>,
    removed: BTreeMap<TokenId, Removal>,
}

impl IdRemap {
    pub fn identity(len: usize) -> Self {
        IdRemap {
            new_ids: (0..len as u32).map(|i| Some(TokenId(i))).collect(),
            removed: BTreeMap::new(),
        }
    }

    /// Rebuilds a remap from explicit pairs, e.g. when loading one from disk.
    /// Ids absent from both lists are treated as unmapped.
    pub fn from_parts<M, R>(mapping: M, removed: R) -> Self
    where
        M: IntoIterator<Item = (TokenId, TokenId)>,
        R: IntoIterator<Item = (TokenId, Removal)>,
    {
        let mut new_ids = Vec::new();
        for (old, new) in mapping {
            if old.index() >= new_ids.len() {
                new_ids.resize(old.index() + 1, None);
            }
            new_ids[old.index()] = Some(new);
        }
        IdRemap {
            new_ids,
            removed: removed.into_iter().collect(),
        }
    }

    pub fn get(&self, old: TokenId) -> Option<TokenId> {
        self.new_ids.get(old.index()).copied().flatten()
    }

    pub fn is_identity(&self) -> bool {
        self.removed.is_empty()
            && self
                .new_ids
                .iter()
                .enumerate()
                .all(|(i, n)| *n == Some(TokenId(i as u32)))
    }

    /// Surviving `(old, new)` pairs in ascending old-id order.
    pub fn mapping(&self) -> impl Iterator<Item = (TokenId, TokenId)> + '_ {
        self.new_ids
            .iter()
            .enumerate()
            .filter_map(|(old, new)| new.map(|n| (TokenId(old as u32), n)))
    }

    /// Removed ids with the reason, ascending.
    pub fn removed(&self) -> impl Iterator<Item = (TokenId, Removal)> + '_ {
        self.removed.iter().map(|(&id, &r)| (id, r))
    }

    pub fn pruned_count(&self) -> usize {
        self.removed.len()
    }
}

/// Prunes rare multi-word tokens, re-expands their occurrences, and returns
/// the compacted dictionary, the corpus in the new id space and the remap.
pub fn prune_and_reencode(
    dict: &MultiTokDictionary,
    encoded: &[EncodedSample],
    config: &PruneConfig,
) -> Result<(MultiTokDictionary, Vec<EncodedSample>, IdRemap)> {
    if config.min_count < 1 {
        return Err(Error::InvalidMinCount);
    }
    let freq = count_frequencies(dict, encoded)?;

    let mut survives = vec![true; dict.len()];
    let mut removed = BTreeMap::new();
    for entry in dict.multiword_entries() {
        let count = freq.get(entry.id);
        let rare = count > 0 && count < config.min_count;
        if rare {
            survives[entry.id.index()] = false;
            removed.insert(entry.id, Removal::Count);
        } else if !survives[entry.prefix.index()] {
            survives[entry.id.index()] = false;
            removed.insert(entry.id, Removal::Cascade);
        }
    }

    let mut pruned = MultiTokDictionary::new(dict.base_vocab().iter().cloned(), dict.window())?;
    let mut new_ids: Vec<Option<TokenId>> = (0..=dict.base_len() as u32)
        .map(|i| Some(TokenId(i)))
        .collect();
    new_ids.resize(dict.len(), None);
    for entry in dict.multiword_entries() {
        if survives[entry.id.index()] {
            let prefix = new_ids[entry.prefix.index()].expect("surviving prefix is mapped");
            new_ids[entry.id.index()] = Some(pruned.insert_extension(prefix, entry.suffix)?);
        }
    }

    let mut suffixes = Vec::new();
    let reencoded = encoded
        .iter()
        .map(|sample| {
            let mut out = Vec::with_capacity(sample.token_ids.len());
            for &id in &sample.token_ids {
                // Walk up to the nearest surviving ancestor, remembering the
                // suffixes peeled off on the way.
                let mut current = id;
                suffixes.clear();
                while !survives[current.index()] {
                    let entry = dict.entries()[current.index()];
                    suffixes.push(entry.suffix);
                    current = entry.prefix;
                }
                out.push(new_ids[current.index()].expect("survivor is mapped"));
                out.extend(suffixes.iter().rev().copied());
            }
            EncodedSample {
                id: sample.id.clone(),
                token_ids: out,
                label: sample.label,
                multitok_applied: sample.multitok_applied,
            }
        })
        .collect();

    Ok((pruned, reencoded, IdRemap { new_ids, removed }))
}

/// Order-preserving id substitution.
pub fn remap_ids(remap: &IdRemap, encoded: &[EncodedSample]) -> Result<Vec<EncodedSample>> {
    encoded
        .iter()
        .map(|sample| {
            let token_ids = sample
                .token_ids
                .iter()
                .enumerate()
                .map(|(position, &id)| {
                    remap.get(id).ok_or_else(|| Error::Unmapped {
                        sample: sample.id.clone(),
                        position,
                        id,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(EncodedSample {
                token_ids,
                ..sample.clone()
            })
        })
        .collect()
}
