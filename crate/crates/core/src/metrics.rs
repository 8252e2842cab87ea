//! Compression ratio, convergence time and dictionary statistics.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::dictionary::MultiTokDictionary;
use crate::encoder::{EncodedSample, Sample};
use crate::error::{Error, Result};
use crate::prune::FrequencyTable;

/// Consecutive sub-threshold epochs required by [`training_time`].
pub const DEFAULT_LOOKAHEAD: usize = 10;

/// Token counts before and after encoding.
///
/// Counts are exact integers; ratios are derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CompressionReport {
    /// Total base tokens, `Σ n(x)`.
    pub tokens_before: u64,
    /// Total emitted tokens, `Σ m(x)`.
    pub tokens_after: u64,
    /// Total words, for comparing encodings over different base tokenizers.
    pub words_reference: u64,
    pub dict_total: u64,
    pub dict_multiword: u64,
    pub dict_pruned: u64,
}

impl CompressionReport {
    /// `tokens_after / tokens_before`.
    pub fn ratio(&self) -> f64 {
        self.tokens_after as f64 / self.tokens_before as f64
    }

    /// `tokens_after / words_reference`; exceeds 1 for subword streams that
    /// are longer than the word stream.
    pub fn word_ratio(&self) -> f64 {
        self.tokens_after as f64 / self.words_reference as f64
    }

    pub fn with_words_reference(mut self, words: u64) -> Self {
        self.words_reference = words;
        self
    }

    pub fn with_dictionary(mut self, dict: &MultiTokDictionary, pruned: u64) -> Self {
        self.dict_total = dict.len() as u64;
        self.dict_multiword = dict.multiword_len() as u64;
        self.dict_pruned = pruned;
        self
    }
}

/// Compares an encoding with the base-token corpus it came from.
///
/// `words_reference` defaults to the base-token count; override it with
/// [`CompressionReport::with_words_reference`] for subword bases.
pub fn compression_ratio(
    original: &[Sample],
    encoded: &[EncodedSample],
) -> Result<CompressionReport> {
    if original.len() != encoded.len() {
        return Err(Error::CorpusMismatch(format!(
            "{} original samples, {} encoded",
            original.len(),
            encoded.len()
        )));
    }
    let mut before = 0u64;
    let mut after = 0u64;
    for (position, (x, y)) in original.iter().zip(encoded).enumerate() {
        if x.id != y.id {
            return Err(Error::CorpusMismatch(format!(
                "sample {position}: original id {:?}, encoded id {:?}",
                x.id, y.id
            )));
        }
        if y.token_ids.len() > x.tokens.len() {
            return Err(Error::CorpusMismatch(format!(
                "sample {:?}: {} encoded tokens for {} base tokens",
                x.id,
                y.token_ids.len(),
                x.tokens.len()
            )));
        }
        before += x.tokens.len() as u64;
        after += y.token_ids.len() as u64;
    }
    if before == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(CompressionReport {
        tokens_before: before,
        tokens_after: after,
        words_reference: before,
        ..CompressionReport::default()
    })
}

/// Per-epoch training losses `l_1..l_E` and the threshold `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    losses: Vec<f64>,
    epsilon: f64,
}

impl LossCurve {
    pub fn new(losses: Vec<f64>, epsilon: f64) -> Result<Self> {
        if losses.is_empty() {
            return Err(Error::EmptyCurve);
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if let Some((i, &loss)) = losses
            .iter()
            .enumerate()
            .find(|(_, l)| !(l.is_finite() && **l >= 0.0))
        {
            return Err(Error::InvalidLoss { epoch: i + 1, loss });
        }
        Ok(LossCurve { losses, epsilon })
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Smallest `i >= 0` with `l_{i+1}, …, l_{i+10}` all strictly below `ε`, or
/// `None` when the curve never has ten such consecutive epochs.
pub fn training_time(curve: &LossCurve) -> Option<usize> {
    training_time_with_lookahead(curve, DEFAULT_LOOKAHEAD).expect("default lookahead is positive")
}

pub fn training_time_with_lookahead(curve: &LossCurve, lookahead: usize) -> Result<Option<usize>> {
    if lookahead == 0 {
        return Err(Error::InvalidLookahead);
    }
    let mut run = 0;
    for (k, &loss) in curve.losses.iter().enumerate() {
        if loss < curve.epsilon {
            run += 1;
            if run == lookahead {
                return Ok(Some(k + 1 - lookahead));
            }
        } else {
            run = 0;
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DictionaryStats {
    pub multiword: u64,
    /// Entry length → number of multi-word entries.
    pub length_histogram: BTreeMap<u32, u64>,
    /// Emission count → number of multi-word entries.
    pub count_histogram: BTreeMap<u64, u64>,
    pub never_emitted: u64,
}

pub fn dictionary_stats(dict: &MultiTokDictionary, freq: &FrequencyTable) -> DictionaryStats {
    let mut stats = DictionaryStats::default();
    for entry in dict.multiword_entries() {
        let count = freq.get(entry.id);
        stats.multiword += 1;
        *stats.length_histogram.entry(entry.length).or_default() += 1;
        *stats.count_histogram.entry(count).or_default() += 1;
        if count == 0 {
            stats.never_emitted += 1;
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{build_and_encode, BuildConfig};
    use crate::prune::count_frequencies;
    use crate::token::Window;
    use alloc::vec;

    const ALICE: &str = "Alice goes to the Wonderland and Bob goes to the Wonderland Zoo";

    fn curve(losses: Vec<f64>, eps: f64) -> LossCurve {
        LossCurve::new(losses, eps).unwrap()
    }

    #[test]
    fn alice_ratio() {
        let corpus = [Sample::new("alice", ALICE.split_whitespace())];
        let (d, enc) = build_and_encode(&corpus, &BuildConfig::default()).unwrap();
        let report = compression_ratio(&corpus, &enc)
            .unwrap()
            .with_dictionary(&d, 0);
        assert_eq!((report.tokens_after, report.tokens_before), (10, 12));
        assert!((report.ratio() - 0.8333).abs() < 5e-5);
        assert_eq!(report.dict_multiword, 9);
        assert_eq!(report.dict_total, 18);
    }

    #[test]
    fn window_one_ratio_is_exactly_one() {
        let corpus = [Sample::new("alice", ALICE.split_whitespace())];
        let cfg = BuildConfig {
            window: Window::words(1).unwrap(),
            ..BuildConfig::default()
        };
        let (_, enc) = build_and_encode(&corpus, &cfg).unwrap();
        assert_eq!(compression_ratio(&corpus, &enc).unwrap().ratio(), 1.0);
    }

    #[test]
    fn mismatched_corpora_are_rejected() {
        let corpus = [Sample::new("a", ["x"]), Sample::new("b", ["y"])];
        let (_, enc) = build_and_encode(&corpus, &BuildConfig::default()).unwrap();
        assert!(matches!(
            compression_ratio(&corpus[..1], &enc),
            Err(Error::CorpusMismatch(_))
        ));
        let swapped = [enc[1].clone(), enc[0].clone()];
        assert!(matches!(
            compression_ratio(&corpus, &swapped),
            Err(Error::CorpusMismatch(_))
        ));
    }

    #[test]
    fn training_time_examples() {
        let mut losses = vec![0.5; 5];
        losses.extend(vec![0.005; 15]);
        assert_eq!(training_time(&curve(losses, 0.01)), Some(5));

        assert_eq!(training_time(&curve(vec![0.02; 30], 0.01)), None);

        let mut losses = vec![0.5];
        losses.extend(vec![0.001; 10]);
        losses.push(0.5);
        assert_eq!(losses.len(), 12);
        assert_eq!(training_time(&curve(losses, 0.01)), Some(1));
    }

    #[test]
    fn threshold_is_strict() {
        assert_eq!(training_time(&curve(vec![0.01; 12], 0.01)), None);
        assert_eq!(training_time(&curve(vec![0.0; 10], 0.01)), Some(0));
        assert_eq!(training_time(&curve(vec![0.0; 9], 0.01)), None);
    }

    #[test]
    fn lookahead_is_configurable() {
        let c = curve(vec![0.5, 0.001, 0.001, 0.5, 0.001], 0.01);
        assert_eq!(training_time_with_lookahead(&c, 2).unwrap(), Some(1));
        assert_eq!(training_time_with_lookahead(&c, 1).unwrap(), Some(1));
        assert_eq!(training_time_with_lookahead(&c, 3).unwrap(), None);
        assert_eq!(
            training_time_with_lookahead(&c, 0),
            Err(Error::InvalidLookahead)
        );
    }

    #[test]
    fn loss_curve_validation() {
        assert_eq!(LossCurve::new(vec![], 0.01), Err(Error::EmptyCurve));
        assert!(matches!(
            LossCurve::new(vec![0.1], 0.0),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            LossCurve::new(vec![0.1, f64::NAN], 0.01),
            Err(Error::InvalidLoss { epoch: 2, .. })
        ));
        assert!(matches!(
            LossCurve::new(vec![-0.1], 0.01),
            Err(Error::InvalidLoss { epoch: 1, .. })
        ));
    }

    #[test]
    fn stats() {
        let fresh = MultiTokDictionary::new(["a", "b"], Window::Max).unwrap();
        let stats = dictionary_stats(&fresh, &FrequencyTable::default());
        assert_eq!(stats.multiword, 0);
        assert!(stats.length_histogram.is_empty());

        let corpus = [Sample::new("alice", ALICE.split_whitespace())];
        let (d, enc) = build_and_encode(&corpus, &BuildConfig::default()).unwrap();
        let stats = dictionary_stats(&d, &count_frequencies(&d, &enc).unwrap());
        assert_eq!(stats.multiword, 9);
        assert_eq!(stats.never_emitted, 7);
        assert_eq!(
            stats.length_histogram.values().sum::<u64>(),
            stats.multiword
        );
        assert_eq!(stats.count_histogram.values().sum::<u64>(), stats.multiword);
        assert_eq!(stats.length_histogram[&2], 7);
        assert_eq!(stats.length_histogram[&3], 2);
    }
}
