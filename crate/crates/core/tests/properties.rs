use std::collections::HashSet;

use multitok_core::{
    build_and_encode, count_frequencies, decode, encode_inference, prune_and_reencode, remap_ids,
    subword_tokenize, training_time, BuildConfig, EncodedSample, LossCurve, MultiTokDictionary,
    PruneConfig, Sample, SubwordVocab, TokenId, Window,
};
use proptest::prelude::*;

fn window() -> impl Strategy<Value = Window> {
    prop_oneof![
        Just(Window::Max),
        (1u32..=4).prop_map(|n| Window::words(n).unwrap()),
    ]
}

/// Small vocabularies so phrases repeat often.
fn corpus() -> impl Strategy<Value = Vec<Sample>> {
    let word = prop::sample::select(vec!["a", "b", "c", "d", "e"]);
    prop::collection::vec(prop::collection::vec(word, 1..40), 1..12).prop_map(|samples| {
        samples
            .into_iter()
            .enumerate()
            .map(|(i, tokens)| Sample::new(i.to_string(), tokens))
            .collect()
    })
}

fn build(corpus: &[Sample], window: Window) -> (MultiTokDictionary, Vec<EncodedSample>) {
    let cfg = BuildConfig {
        window,
        ..BuildConfig::default()
    };
    build_and_encode(corpus, &cfg).unwrap()
}

/// Every phrase in the dictionary, materialized as base-id sequences.
fn phrases(dict: &MultiTokDictionary) -> HashSet<Vec<TokenId>> {
    dict.entries()
        .iter()
        .skip(1)
        .map(|e| dict.expand(e.id).unwrap())
        .collect()
}

/// Longest dictionary phrase of length <= cap at each position, found by
/// trying every candidate length.
fn brute_force_longest_match(
    dict: &MultiTokDictionary,
    tokens: &[String],
    cap: Option<usize>,
) -> Vec<Vec<TokenId>> {
    let known = phrases(dict);
    let base: Vec<TokenId> = tokens
        .iter()
        .map(|t| dict.base_id(t).unwrap_or(TokenId::UNKNOWN))
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < base.len() {
        let longest = (1..=base.len() - i)
            .filter(|len| cap.is_none_or(|c| *len <= c))
            .filter(|len| known.contains(&base[i..i + len]))
            .max()
            .unwrap_or(1);
        out.push(base[i..i + longest].to_vec());
        i += longest;
    }
    out
}

fn ratio(encoded: &[EncodedSample], original: &[Sample]) -> (usize, usize) {
    (
        encoded.iter().map(|e| e.token_ids.len()).sum(),
        original.iter().map(|s| s.tokens.len()).sum(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn round_trip_is_lossless(corpus in corpus(), w in window(), fraction in 0.05f64..=1.0, seed: u64) {
        let cfg = BuildConfig { window: w, apply_fraction: fraction, seed };
        let (dict, encoded) = build_and_encode(&corpus, &cfg).unwrap();
        for (x, y) in corpus.iter().zip(&encoded) {
            prop_assert!(y.token_ids.len() <= x.tokens.len());
            let expanded: usize = y.token_ids.iter().map(|&t| dict.length(t).unwrap()).sum();
            prop_assert_eq!(expanded, x.tokens.len());
            prop_assert_eq!(&decode(&dict, y).unwrap(), x);
        }
    }

    #[test]
    fn window_one_never_groups(corpus in corpus()) {
        let (dict, encoded) = build(&corpus, Window::words(1).unwrap());
        prop_assert_eq!(dict.multiword_len(), 0);
        let (after, before) = ratio(&encoded, &corpus);
        prop_assert_eq!(after, before);
    }

    #[test]
    fn dictionary_invariants(corpus in corpus(), w in window()) {
        let (dict, _) = build(&corpus, w);
        for (index, entry) in dict.entries().iter().enumerate() {
            prop_assert_eq!(entry.id, TokenId(index as u32));
        }
        for entry in dict.multiword_entries() {
            prop_assert!(entry.prefix < entry.id);
            prop_assert!(dict.is_base(entry.suffix));
            prop_assert!(w.allows(entry.length as usize));
            let mut expected = dict.expand(entry.prefix).unwrap();
            expected.push(entry.suffix);
            prop_assert_eq!(dict.expand(entry.id).unwrap().len(), entry.length as usize);
            prop_assert_eq!(dict.expand(entry.id).unwrap(), expected);
            prop_assert_eq!(dict.lookup_extension(entry.prefix, entry.suffix).unwrap(), Some(entry.id));
        }
        prop_assert_eq!(dict.len(), 1 + dict.base_len() + dict.multiword_len());
    }

    #[test]
    fn dictionary_growth_is_monotone(corpus in corpus(), w in window()) {
        let mut previous = 0;
        for k in 1..=corpus.len() {
            let (dict, _) = build(&corpus[..k], w);
            let bound: usize = corpus[..k].iter().map(|s| s.tokens.len()).sum();
            prop_assert!(dict.multiword_len() >= previous);
            prop_assert!(dict.multiword_len() <= bound);
            previous = dict.multiword_len();
        }
    }

    #[test]
    fn inference_is_greedy_longest_match(
        corpus in corpus(),
        w in window(),
        w_test in window(),
        probe in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e", "zz"]), 1..40),
    ) {
        let (dict, _) = build(&corpus, w);
        let sample = Sample::new("probe", probe);
        let encoded = encode_inference(&dict, &sample, w_test);
        let cap = w_test.min(w).limit();
        let expected = brute_force_longest_match(&dict, &sample.tokens, cap);
        let actual: Vec<Vec<TokenId>> = encoded.token_ids.iter().map(|&t| dict.expand(t).unwrap()).collect();
        prop_assert_eq!(actual, expected);
        prop_assert_eq!(&encode_inference(&dict, &sample, w_test), &encoded);
    }

    #[test]
    fn inference_round_trips_in_vocab_text(corpus in corpus(), w in window(), w_test in window(), pick in any::<prop::sample::Index>()) {
        let (dict, _) = build(&corpus, w);
        let sample = &corpus[pick.index(corpus.len())];
        let encoded = encode_inference(&dict, sample, w_test);
        prop_assert_eq!(&decode(&dict, &encoded).unwrap(), sample);
    }

    #[test]
    fn pruning_invariants(corpus in corpus(), w in window(), min_count in 1u64..6) {
        let (dict, encoded) = build(&corpus, w);
        let cfg = PruneConfig { min_count };
        let (pdict, pencoded, remap) = prune_and_reencode(&dict, &encoded, &cfg).unwrap();
        for (old, new) in encoded.iter().zip(&pencoded) {
            prop_assert!(new.token_ids.len() >= old.token_ids.len());
            prop_assert_eq!(decode(&pdict, new).unwrap(), decode(&dict, old).unwrap());
            prop_assert!(new.token_ids.iter().all(|&t| pdict.contains(t)));
        }
        for entry in pdict.multiword_entries() {
            prop_assert!(pdict.contains(entry.prefix));
            prop_assert!(entry.prefix < entry.id);
        }
        if min_count == 1 {
            prop_assert_eq!(&pdict, &dict);
            prop_assert_eq!(&pencoded, &encoded);
            prop_assert!(remap.is_identity());
        }
        let (again_dict, again_encoded, again_remap) = prune_and_reencode(&pdict, &pencoded, &cfg).unwrap();
        prop_assert_eq!(again_dict, pdict);
        prop_assert_eq!(again_encoded, pencoded);
        prop_assert!(again_remap.is_identity());
    }

    #[test]
    fn remap_matches_prune_output(corpus in corpus(), w in window(), min_count in 2u64..5) {
        let (dict, encoded) = build(&corpus, w);
        let (_, pencoded, remap) = prune_and_reencode(&dict, &encoded, &PruneConfig { min_count }).unwrap();
        // Samples untouched by pruning translate one-for-one through the remap.
        for (old, new) in encoded.iter().zip(&pencoded) {
            if old.token_ids.iter().all(|&t| remap.get(t).is_some()) {
                let translated = remap_ids(&remap, std::slice::from_ref(old)).unwrap();
                prop_assert_eq!(&translated[0], new);
            }
        }
    }

    #[test]
    fn frequency_total_matches_emitted(corpus in corpus(), w in window()) {
        let (dict, encoded) = build(&corpus, w);
        let freq = count_frequencies(&dict, &encoded).unwrap();
        let (after, _) = ratio(&encoded, &corpus);
        prop_assert_eq!(freq.total(), after as u64);
    }

    #[test]
    fn subword_pieces_reassemble(word in "[a-e]{1,12}") {
        let vocab = SubwordVocab::new([
            "a", "b", "ab", "abc", "cd", "##a", "##b", "##c", "##d", "##cd", "##de", "##e",
        ]).unwrap();
        let pieces = subword_tokenize(&word, &vocab);
        if pieces != ["[UNK]"] {
            let joined: String = pieces
                .iter()
                .enumerate()
                .map(|(i, p)| if i == 0 { p.as_str() } else { p.strip_prefix("##").unwrap() })
                .collect();
            prop_assert_eq!(joined, word);
        }
    }

    #[test]
    fn training_time_is_monotone_in_epsilon(
        losses in prop::collection::vec(0.0f64..0.05, 1..40),
        e1 in 0.001f64..0.05,
        e2 in 0.001f64..0.05,
    ) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let c_lo = training_time(&LossCurve::new(losses.clone(), lo).unwrap()).unwrap_or(usize::MAX);
        let c_hi = training_time(&LossCurve::new(losses, hi).unwrap()).unwrap_or(usize::MAX);
        prop_assert!(c_lo >= c_hi);
    }
}
