//! Variable-length multi-word tokenization built on LZW-style dictionary coding.
//!
//! A [`MultiTokDictionary`] starts from a base vocabulary (words or subword
//! pieces) and grows while a training corpus is encoded: at every position the
//! encoder emits the longest phrase it already knows and registers that phrase
//! extended by the following base token. Phrases are stored as
//! `(prefix id, suffix id)` pairs, so membership is a single hash lookup and
//! expansion walks the prefix chain.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, manifests and
//! the command-line front end live in `multitok-cli`.
//!
//! Main entry points:
//!
//! - [`build_and_encode`]: grow a dictionary while encoding a corpus.
//! - [`encode_inference`]: greedy longest-match against a frozen dictionary.
//! - [`decode`]: exact inverse of either encoder.
//! - [`prune_and_reencode`]: drop rare multi-word tokens and compact ids.
//! - [`compression_ratio`] and [`training_time`]: corpus-level metrics.

#![no_std]

extern crate alloc;

pub mod dictionary;
pub mod encoder;
mod error;
pub mod metrics;
pub mod prune;
mod token;
pub mod tokenize;

pub use dictionary::{DictEntry, MultiTokDictionary, UNKNOWN_SURFACE};
pub use encoder::{
    build_and_encode, decode, encode_inference, encode_tokens, select_samples, BuildConfig,
    EncodedSample, Sample,
};
pub use error::{Error, Result};
pub use metrics::{
    compression_ratio, dictionary_stats, training_time, training_time_with_lookahead,
    CompressionReport, DictionaryStats, LossCurve, DEFAULT_LOOKAHEAD,
};
pub use prune::{
    count_frequencies, prune_and_reencode, remap_ids, FrequencyTable, IdRemap, PruneConfig, Removal,
};
pub use token::{ParseWindowError, TokenId, Window};
pub use tokenize::{subword_tokenize, word_tokenize, BaseTokenizer, SubwordVocab};
