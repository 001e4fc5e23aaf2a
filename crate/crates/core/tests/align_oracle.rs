//! Independent memoized-recursion oracle for the word aligner.

use std::collections::HashMap;

use gramaug_core::align::{align_words, AlignedPair};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn oracle_distance(truth: &[&str], decoded: &[&str]) -> usize {
    fn go<'a>(
        truth: &[&'a str],
        decoded: &[&'a str],
        i: usize,
        j: usize,
        memo: &mut HashMap<(usize, usize), usize>,
    ) -> usize {
        if i == truth.len() {
            return decoded.len() - j;
        }
        if j == decoded.len() {
            return truth.len() - i;
        }
        if let Some(&d) = memo.get(&(i, j)) {
            return d;
        }
        let sub = go(truth, decoded, i + 1, j + 1, memo)
            + usize::from(truth[i] != decoded[j]);
        let del = go(truth, decoded, i + 1, j, memo) + 1;
        let ins = go(truth, decoded, i, j + 1, memo) + 1;
        let best = sub.min(del).min(ins);
        memo.insert((i, j), best);
        best
    }
    go(truth, decoded, 0, 0, &mut HashMap::new())
}

const VOCAB: [&str; 6] = ["play", "pla", "music", "mesic", "song", "son"];

fn random_words(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<&'static str> {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| VOCAB[rng.random_range(0..VOCAB.len())])
        .collect()
}

#[test]
fn edit_cost_matches_oracle_on_500_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11E);
    for case in 0..500 {
        let mut truth = random_words(&mut rng, 8);
        if truth.is_empty() {
            truth.push("play");
        }
        let decoded = random_words(&mut rng, 8);
        let alignment = align_words(&truth, &decoded);
        let expected = oracle_distance(&truth, &decoded);
        assert_eq!(
            alignment.edit_cost(),
            expected,
            "case {case}: {truth:?} vs {decoded:?}"
        );
    }
}

#[test]
fn alignment_is_deterministic() {
    let truth = ["play", "the", "next", "song"];
    let decoded = ["pla", "next", "son", "now"];
    let first = align_words(&truth, &decoded);
    for _ in 0..10 {
        assert_eq!(align_words(&truth, &decoded), first);
    }
}

proptest! {
    #[test]
    fn alignment_reconstructs_inputs_and_matches_oracle(
        truth_idx in prop::collection::vec(0..VOCAB.len(), 1..8),
        decoded_idx in prop::collection::vec(0..VOCAB.len(), 0..8),
    ) {
        let truth: Vec<&str> = truth_idx.iter().map(|&i| VOCAB[i]).collect();
        let decoded: Vec<&str> = decoded_idx.iter().map(|&i| VOCAB[i]).collect();
        let alignment = align_words(&truth, &decoded);

        prop_assert_eq!(alignment.edit_cost(), oracle_distance(&truth, &decoded));

        let truth_back: Vec<&str> = alignment.pairs().iter().filter_map(|p| match p {
            AlignedPair::Match { word } => Some(word.as_str()),
            AlignedPair::Substitute { truth, .. } => Some(truth.as_str()),
            AlignedPair::Delete { truth } => Some(truth.as_str()),
            AlignedPair::Insert { .. } => None,
        }).collect();
        prop_assert_eq!(truth_back, truth);

        let decoded_back: Vec<&str> = alignment.pairs().iter().filter_map(|p| match p {
            AlignedPair::Match { word } => Some(word.as_str()),
            AlignedPair::Substitute { decoded, .. } => Some(decoded.as_str()),
            AlignedPair::Insert { decoded } => Some(decoded.as_str()),
            AlignedPair::Delete { .. } => None,
        }).collect();
        prop_assert_eq!(decoded_back, decoded);
    }
}
