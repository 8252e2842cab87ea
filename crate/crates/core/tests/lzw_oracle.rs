//! The adaptive encoder on a single character stream with an unbounded window
//! must emit exactly what a textbook LZW coder emits.

use std::collections::HashMap;

use multitok_core::{build_and_encode, BuildConfig, Sample};
use proptest::prelude::*;

/// Textbook LZW over materialized strings. The alphabet receives codes
/// `1..=|alphabet|` in the given order; new strings take the next code.
fn lzw_reference(input: &[char], alphabet: &[char]) -> Vec<u32> {
    let mut table: HashMap<Vec<char>, u32> = alphabet
        .iter()
        .enumerate()
        .map(|(i, &c)| (vec![c], i as u32 + 1))
        .collect();
    let mut next_code = alphabet.len() as u32 + 1;
    let mut output = Vec::new();
    let mut w: Vec<char> = Vec::new();
    for &c in input {
        let mut wc = w.clone();
        wc.push(c);
        if table.contains_key(&wc) {
            w = wc;
        } else {
            output.push(table[&w]);
            table.insert(wc, next_code);
            next_code += 1;
            w = vec![c];
        }
    }
    if !w.is_empty() {
        output.push(table[&w]);
    }
    output
}

fn first_appearance(input: &[char]) -> Vec<char> {
    let mut seen = Vec::new();
    for &c in input {
        if !seen.contains(&c) {
            seen.push(c);
        }
    }
    seen
}

fn multitok(input: &[char]) -> Vec<u32> {
    let sample = Sample::new("s", input.iter().map(|c| c.to_string()));
    let (_, encoded) = build_and_encode(&[sample], &BuildConfig::default()).unwrap();
    encoded[0].token_ids.iter().map(|t| t.0).collect()
}

#[test]
fn classic_tobeornot() {
    let input: Vec<char> = "TOBEORNOTTOBEORTOBEORNOT".chars().collect();
    let alphabet = first_appearance(&input);
    let expected = lzw_reference(&input, &alphabet);
    // T O B E R N: 1..6; TO=7 OB=8 BE=9 EO=10 OR=11 RN=12 NO=13 OT=14 TT=15 TOB=16 ...
    assert_eq!(
        expected,
        [1, 2, 3, 4, 2, 5, 6, 2, 1, 7, 9, 11, 16, 10, 12, 14]
    );
    assert_eq!(multitok(&input), expected);
}

#[test]
fn repeated_single_symbol() {
    let input = vec!['a'; 10];
    // a | aa | aaa | aaaa  -> 1, 2, 3, 4
    assert_eq!(lzw_reference(&input, &['a']), [1, 2, 3, 4]);
    assert_eq!(multitok(&input), [1, 2, 3, 4]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_textbook_lzw(input in prop::collection::vec(prop::sample::select(vec!['a', 'b', 'c', 'd']), 1..512)) {
        let alphabet = first_appearance(&input);
        prop_assert_eq!(multitok(&input), lzw_reference(&input, &alphabet));
    }

    #[test]
    fn matches_textbook_lzw_wide_alphabet(input in prop::collection::vec(any::<char>(), 1..128)) {
        let alphabet = first_appearance(&input);
        prop_assert_eq!(multitok(&input), lzw_reference(&input, &alphabet));
    }
}
