//! Adaptive dictionary construction and the two encoders built on it.
//!
//! Training ([`build_and_encode`]) walks each selected sample left to right.
//! At position `i` it follows the prefix chain as far as the dictionary (and
//! the training window) allows, emits the longest known phrase, registers
//! that phrase extended by the next base token when it fits the window, and
//! resumes right after the emitted phrase. This is the LZW string-table
//! update applied to word streams, with the table persisting across samples.
//!
//! Inference ([`encode_inference`]) never writes: it emits greedy longest
//! matches capped by the testing window. Because the table is prefix-closed,
//! following the chain until the first miss yields the longest match.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dictionary::MultiTokDictionary;
use crate::error::{Error, Result};
use crate::token::{TokenId, Window};

/// One corpus record in base-token form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub id: String,
    pub tokens: Vec<String>,
    pub label: Option<i64>,
}

impl Sample {
    pub fn new<I, S>(id: impl Into<String>, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Sample {
            id: id.into(),
            tokens: tokens.into_iter().map(Into::into).collect(),
            label: None,
        }
    }

    pub fn with_label(mut self, label: Option<i64>) -> Self {
        self.label = label;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSample {
    pub id: String,
    pub token_ids: Vec<TokenId>,
    pub label: Option<i64>,
    /// False for samples left as base tokens under partial application.
    pub multitok_applied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig {
    /// Training window: maximum length of any dictionary entry.
    pub window: Window,
    /// Share of samples (in `(0, 1]`) that grow the dictionary and are
    /// emitted as multi-word tokens.
    pub apply_fraction: f64,
    /// Seed for choosing which samples are processed.
    pub seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            window: Window::Max,
            apply_fraction: 1.0,
            seed: 0,
        }
    }
}

/// Marks which of `n` samples receive multi-word encoding.
///
/// Exactly `ceil(fraction * n)` samples are chosen by a seeded uniform
/// shuffle of the sample indices.
pub fn select_samples(n: usize, fraction: f64, seed: u64) -> Result<Vec<bool>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    let exact = fraction * n as f64;
    let mut count = exact as usize;
    if (count as f64) < exact {
        count += 1;
    }
    let count = count.min(n);
    if count == n {
        return Ok(vec![true; n]);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut selected = vec![false; n];
    for &index in &order[..count] {
        selected[index] = true;
    }
    Ok(selected)
}

/// Builds the base vocabulary from the whole corpus, grows the multi-word
/// dictionary over the selected samples, and encodes every sample.
///
/// Samples are processed in input order and the dictionary is never reset
/// between them.
pub fn build_and_encode(
    corpus: &[Sample],
    config: &BuildConfig,
) -> Result<(MultiTokDictionary, Vec<EncodedSample>)> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some(sample) = corpus.iter().find(|s| s.tokens.is_empty()) {
        return Err(Error::EmptySample(sample.id.clone()));
    }
    let selected = select_samples(corpus.len(), config.apply_fraction, config.seed)?;

    let mut seen = HashSet::new();
    let mut vocab = Vec::new();
    for token in corpus.iter().flat_map(|s| s.tokens.iter()) {
        if seen.insert(token.as_str()) {
            vocab.push(token.as_str());
        }
    }
    let mut dict = MultiTokDictionary::new(vocab, config.window)?;

    let mut encoded = Vec::with_capacity(corpus.len());
    let mut base = Vec::new();
    for (sample, &apply) in corpus.iter().zip(&selected) {
        base.clear();
        base.extend(sample.tokens.iter().map(|t| {
            dict.base_id(t)
                .expect("base vocabulary covers the whole corpus")
        }));
        let token_ids = if apply {
            let mut out = Vec::with_capacity(base.len());
            encode_adaptive(&mut dict, &base, &mut out)?;
            out
        } else {
            base.clone()
        };
        encoded.push(EncodedSample {
            id: sample.id.clone(),
            token_ids,
            label: sample.label,
            multitok_applied: apply,
        });
    }
    Ok((dict, encoded))
}

/// Encodes one base-id stream while growing `dict`.
///
/// Every id in `base` must be a base token of `dict`.
pub fn encode_adaptive(
    dict: &mut MultiTokDictionary,
    base: &[TokenId],
    out: &mut Vec<TokenId>,
) -> Result<()> {
    let window = dict.window();
    let mut i = 0;
    while i < base.len() {
        let mut current = base[i];
        let mut length = 1;
        let mut next = i + 1;
        // A full-window match stops without inserting.
        while next < base.len() && window.allows(length + 1) {
            match dict.extension(current, base[next]) {
                Some(longer) => {
                    current = longer;
                    length += 1;
                    next += 1;
                }
                None => {
                    dict.insert_extension(current, base[next])?;
                    break;
                }
            }
        }
        out.push(current);
        i = next;
    }
    Ok(())
}

/// Greedy longest-match encoding of raw base-token surfaces against a frozen
/// dictionary. Out-of-vocabulary tokens become [`TokenId::UNKNOWN`].
pub fn encode_tokens<S: AsRef<str>>(
    dict: &MultiTokDictionary,
    tokens: &[S],
    w_test: Window,
) -> Vec<TokenId> {
    let window = w_test.min(dict.window());
    let base: Vec<TokenId> = tokens
        .iter()
        .map(|t| dict.base_id(t.as_ref()).unwrap_or(TokenId::UNKNOWN))
        .collect();
    let mut out = Vec::with_capacity(base.len());
    let mut i = 0;
    while i < base.len() {
        let mut current = base[i];
        let mut length = 1;
        let mut next = i + 1;
        if current != TokenId::UNKNOWN {
            while next < base.len() && window.allows(length + 1) {
                match dict.extension(current, base[next]) {
                    Some(longer) => {
                        current = longer;
                        length += 1;
                        next += 1;
                    }
                    None => break,
                }
            }
        }
        out.push(current);
        i = next;
    }
    out
}

pub fn encode_inference(
    dict: &MultiTokDictionary,
    sample: &Sample,
    w_test: Window,
) -> EncodedSample {
    EncodedSample {
        id: sample.id.clone(),
        token_ids: encode_tokens(dict, &sample.tokens, w_test),
        label: sample.label,
        multitok_applied: true,
    }
}

/// Expands every token back to base-token surfaces.
pub fn decode(dict: &MultiTokDictionary, encoded: &EncodedSample) -> Result<Sample> {
    let mut base = Vec::with_capacity(encoded.token_ids.len());
    for (position, &id) in encoded.token_ids.iter().enumerate() {
        dict.expand_into(id, &mut base)
            .map_err(|_| Error::InvalidIdAt {
                sample: encoded.id.clone(),
                position,
                id,
            })?;
    }
    let tokens = base
        .into_iter()
        .map(|id| {
            dict.surface(id)
                .expect("expansion yields base or unknown ids")
                .to_string()
        })
        .collect();
    Ok(Sample {
        id: encoded.id.clone(),
        tokens,
        label: encoded.label,
    })
}
