use alloc::string::String;

use crate::token::{TokenId, Window};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate entry {0:?} in base vocabulary")]
    DuplicateWord(String),
    #[error("empty word at position {0} of base vocabulary")]
    EmptyWord(usize),
    #[error("token id {0} is not in the dictionary")]
    InvalidId(TokenId),
    #[error("token id {0} is not a base token")]
    NotBaseToken(TokenId),
    #[error("token id {0} cannot be extended")]
    NotExtendable(TokenId),
    #[error("extension ({prefix}, {suffix}) already exists as token {existing}")]
    DuplicateExtension {
        prefix: TokenId,
        suffix: TokenId,
        existing: TokenId,
    },
    #[error("extending token {prefix} gives length {length}, exceeding window {window}")]
    WindowExceeded {
        prefix: TokenId,
        length: usize,
        window: Window,
    },
    #[error("token id space exhausted")]
    IdSpaceExhausted,
    #[error("dictionary entry {found} out of order: expected id {expected}")]
    NonDenseEntry { expected: TokenId, found: TokenId },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("sample {0:?} has no tokens")]
    EmptySample(String),
    #[error("apply fraction {0} is outside (0, 1]")]
    InvalidFraction(f64),
    #[error("token id {id} at position {position} of sample {sample:?} is not in the dictionary")]
    InvalidIdAt {
        sample: String,
        position: usize,
        id: TokenId,
    },
    #[error("min_count must be at least 1")]
    InvalidMinCount,
    #[error("token id {id} at position {position} of sample {sample:?} has no remap entry")]
    Unmapped {
        sample: String,
        position: usize,
        id: TokenId,
    },
    #[error("corpora do not match: {0}")]
    CorpusMismatch(String),
    #[error("loss curve is empty")]
    EmptyCurve,
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("loss at epoch {epoch} must be finite and non-negative, got {loss}")]
    InvalidLoss { epoch: usize, loss: f64 },
    #[error("lookahead must be at least 1")]
    InvalidLookahead,
}
