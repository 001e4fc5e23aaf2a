//! CTC squashing, greedy decoding, and exact forward scoring.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::math::{ln, log_sum_exp};
use crate::{Alphabet, CoreError, LabelSequence, Posteriorgram};

/// Total number of [`forward_logprob`] invocations in this process.
///
/// Search algorithms must run entirely off a precomputed score matrix;
/// tests snapshot this counter around a search to prove no rescoring
/// happened.
static FORWARD_CALLS: AtomicU64 = AtomicU64::new(0);

/// Process-wide count of forward scoring calls, for caching diagnostics.
pub fn forward_call_count() -> u64 {
    FORWARD_CALLS.load(Ordering::Relaxed)
}

/// Collapses runs of identical symbols, then removes blanks.
///
/// Returns `None` when nothing survives (e.g. an all-blank input).
pub fn squash(raw: &[usize], alphabet: &Alphabet) -> Result<Option<LabelSequence>, CoreError> {
    let size = alphabet.size();
    let mut text = alloc::string::String::new();
    let mut prev: Option<usize> = None;
    for &index in raw {
        if index >= size {
            return Err(CoreError::SymbolIndexOutOfRange { index, size });
        }
        if prev != Some(index) {
            if let Some(ch) = alphabet.char_at(index) {
                text.push(ch);
            }
        }
        prev = Some(index);
    }
    if text.is_empty() {
        return Ok(None);
    }
    Ok(Some(LabelSequence::new(text, alphabet)?))
}

/// Greedy decoding: per-frame argmax followed by [`squash`].
///
/// Argmax ties break toward the lowest symbol index, so decoding is
/// deterministic.
pub fn greedy_decode(
    p: &Posteriorgram,
    alphabet: &Alphabet,
) -> Result<Option<LabelSequence>, CoreError> {
    if p.num_symbols() != alphabet.size() {
        return Err(CoreError::AlphabetSizeMismatch {
            expected: alphabet.size(),
            found: p.num_symbols(),
        });
    }
    let mut best_path = Vec::with_capacity(p.num_frames());
    for t in 0..p.num_frames() {
        let row = p.frame(t);
        let mut best = 0usize;
        for (i, &prob) in row.iter().enumerate() {
            if prob > row[best] {
                best = i;
            }
        }
        best_path.push(best);
    }
    squash(&best_path, alphabet)
}

/// Log of the total probability that a frame path squashing to `g` is
/// emitted under `p`.
///
/// Standard forward recursion over the blank-interleaved extended label of
/// length `2|g|+1`, computed entirely in log domain. Returns negative
/// infinity when the posteriorgram is too short to emit `g` at all.
pub fn forward_logprob(
    p: &Posteriorgram,
    g: &LabelSequence,
    alphabet: &Alphabet,
) -> Result<f64, CoreError> {
    FORWARD_CALLS.fetch_add(1, Ordering::Relaxed);
    if p.num_symbols() != alphabet.size() {
        return Err(CoreError::AlphabetSizeMismatch {
            expected: alphabet.size(),
            found: p.num_symbols(),
        });
    }
    let labels = g.indices(alphabet)?;
    let blank = alphabet.blank_index();

    // Extended label: blank, g1, blank, g2, ..., gL, blank.
    let ext_len = 2 * labels.len() + 1;
    let ext = |s: usize| -> usize {
        if s.is_multiple_of(2) {
            blank
        } else {
            labels[s / 2]
        }
    };

    let frames = p.num_frames();
    let mut alpha = vec![f64::NEG_INFINITY; ext_len];
    let mut next = vec![f64::NEG_INFINITY; ext_len];

    let row0 = p.frame(0);
    alpha[0] = ln(row0[blank]);
    if ext_len > 1 {
        alpha[1] = ln(row0[ext(1)]);
    }

    for t in 1..frames {
        let row = p.frame(t);
        for s in 0..ext_len {
            let symbol = ext(s);
            let mut terms = [f64::NEG_INFINITY; 3];
            terms[0] = alpha[s];
            if s >= 1 {
                terms[1] = alpha[s - 1];
            }
            // The skip transition is allowed only across a blank between
            // distinct labels.
            if s >= 2 && symbol != blank && symbol != ext(s - 2) {
                terms[2] = alpha[s - 2];
            }
            let from = log_sum_exp(&terms);
            next[s] = if from == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                from + ln(row[symbol])
            };
        }
        core::mem::swap(&mut alpha, &mut next);
    }

    let tail = [
        alpha[ext_len - 1],
        if ext_len >= 2 {
            alpha[ext_len - 2]
        } else {
            f64::NEG_INFINITY
        },
    ];
    Ok(log_sum_exp(&tail))
}
