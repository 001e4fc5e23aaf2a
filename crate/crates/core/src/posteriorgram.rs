//! Per-frame symbol posteriors and the label sequences scored against them.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Alphabet, CoreError};

/// Row-sum tolerance for posteriorgram validation.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// A T×V matrix of per-frame symbol probabilities for one utterance.
///
/// V counts the alphabet graphemes plus the blank. Every entry lies in
/// `[0, 1]` and every row sums to 1 within [`ROW_SUM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct Posteriorgram {
    utterance_id: String,
    n_symbols: usize,
    frames: Vec<f64>,
}

impl Posteriorgram {
    /// Validates and wraps a row-major T×V probability grid.
    pub fn new(
        utterance_id: impl Into<String>,
        n_symbols: usize,
        frames: Vec<f64>,
    ) -> Result<Self, CoreError> {
        let utterance_id = utterance_id.into();
        let invalid = |reason: String| CoreError::InvalidPosteriorgram {
            utterance_id: utterance_id.clone(),
            reason,
        };
        if n_symbols < 2 {
            return Err(invalid("symbol count must be at least 2".to_string()));
        }
        if frames.is_empty() || !frames.len().is_multiple_of(n_symbols) {
            return Err(invalid(alloc::format!(
                "frame buffer of {} values is not a positive multiple of {}",
                frames.len(),
                n_symbols
            )));
        }
        for (t, row) in frames.chunks_exact(n_symbols).enumerate() {
            let mut sum = 0.0;
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(alloc::format!(
                        "probability {p} out of [0,1] in frame {t}"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(invalid(alloc::format!("frame {t} sums to {sum}")));
            }
        }
        Ok(Self {
            utterance_id,
            n_symbols,
            frames,
        })
    }

    /// Opaque utterance identifier.
    pub fn utterance_id(&self) -> &str {
        &self.utterance_id
    }

    /// Number of frames T.
    pub fn num_frames(&self) -> usize {
        self.frames.len() / self.n_symbols
    }

    /// Number of symbols V (graphemes plus blank).
    pub fn num_symbols(&self) -> usize {
        self.n_symbols
    }

    /// The probability row for frame `t`.
    pub fn frame(&self, t: usize) -> &[f64] {
        &self.frames[t * self.n_symbols..(t + 1) * self.n_symbols]
    }

    /// The full row-major grid.
    pub fn frames(&self) -> &[f64] {
        &self.frames
    }
}

/// A non-empty grapheme string, validated against an alphabet.
///
/// Label sequences never contain blanks; an empty squash result is
/// represented as `None` by the decoding operations rather than as an
/// empty `LabelSequence`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelSequence {
    text: String,
}

impl LabelSequence {
    /// Validates `text` against `alphabet` and wraps it.
    pub fn new(text: impl Into<String>, alphabet: &Alphabet) -> Result<Self, CoreError> {
        let text = text.into();
        if text.is_empty() {
            return Err(CoreError::EmptyLabelSequence);
        }
        alphabet.validate_text(&text)?;
        Ok(Self { text })
    }

    /// The grapheme string.
    pub fn text(&self) -> &str {
        &self.text
    }

    /// Number of graphemes.
    pub fn len(&self) -> usize {
        self.text.chars().count()
    }

    /// Always false; label sequences are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Symbol indices of the graphemes under `alphabet`.
    pub fn indices(&self, alphabet: &Alphabet) -> Result<Vec<usize>, CoreError> {
        self.text
            .chars()
            .map(|ch| {
                alphabet
                    .index_of(ch)
                    .ok_or(CoreError::CharNotInAlphabet(ch))
            })
            .collect()
    }
}

impl core::fmt::Display for LabelSequence {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.text)
    }
}
