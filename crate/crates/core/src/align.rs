//! Word-level Levenshtein alignment of transcripts to decodings.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// One aligned word pair from a minimum-edit path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlignedPair {
    /// Truth word decoded exactly.
    Match {
        /// The shared word.
        word: String,
    },
    /// Truth word decoded as something else.
    Substitute {
        /// The transcript word.
        truth: String,
        /// What the decoder emitted for it.
        decoded: String,
    },
    /// Truth word missing from the decoding.
    Delete {
        /// The transcript word that was dropped.
        truth: String,
    },
    /// Decoded word with no transcript counterpart.
    Insert {
        /// The spurious decoded word.
        decoded: String,
    },
}

impl AlignedPair {
    /// Unit edit cost: zero for a match, one otherwise.
    pub fn cost(&self) -> usize {
        match self {
            AlignedPair::Match { .. } => 0,
            _ => 1,
        }
    }
}

/// A minimum-edit-distance alignment at word granularity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordAlignment {
    pairs: Vec<AlignedPair>,
}

impl WordAlignment {
    /// The aligned pairs in transcript order.
    pub fn pairs(&self) -> &[AlignedPair] {
        &self.pairs
    }

    /// Total edit cost (the Levenshtein distance).
    pub fn edit_cost(&self) -> usize {
        self.pairs.iter().map(AlignedPair::cost).sum()
    }
}

/// Aligns a truth word sequence against a decoded word sequence with unit
/// edit costs.
///
/// The backtrace breaks ties by preferring substitute (or match) over
/// delete over insert, so the alignment is deterministic.
pub fn align_words<S1: AsRef<str>, S2: AsRef<str>>(
    truth: &[S1],
    decoded: &[S2],
) -> WordAlignment {
    let n = truth.len();
    let m = decoded.len();

    // dist[i][j]: edit distance between truth[..i] and decoded[..j].
    let mut dist = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in dist.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in dist[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub_cost = usize::from(truth[i - 1].as_ref() != decoded[j - 1].as_ref());
            let diag = dist[i - 1][j - 1] + sub_cost;
            let del = dist[i - 1][j] + 1;
            let ins = dist[i][j - 1] + 1;
            dist[i][j] = diag.min(del).min(ins);
        }
    }

    let mut pairs = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dist[i][j];
        if i > 0 && j > 0 {
            let same = truth[i - 1].as_ref() == decoded[j - 1].as_ref();
            if here == dist[i - 1][j - 1] + usize::from(!same) {
                pairs.push(if same {
                    AlignedPair::Match {
                        word: truth[i - 1].as_ref().to_string(),
                    }
                } else {
                    AlignedPair::Substitute {
                        truth: truth[i - 1].as_ref().to_string(),
                        decoded: decoded[j - 1].as_ref().to_string(),
                    }
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == dist[i - 1][j] + 1 {
            pairs.push(AlignedPair::Delete {
                truth: truth[i - 1].as_ref().to_string(),
            });
            i -= 1;
            continue;
        }
        pairs.push(AlignedPair::Insert {
            decoded: decoded[j - 1].as_ref().to_string(),
        });
        j -= 1;
    }
    pairs.reverse();
    WordAlignment { pairs }
}
