//! Seeded synthetic acoustic model stand-in.
//!
//! Renders transcripts into posteriorgrams with configurable word-level
//! confusions and frame noise. Confusions apply at the word level before
//! frame synthesis, so the output exhibits the consistent error patterns
//! the pronunciation dictionary is designed to capture — without any real
//! audio or neural model.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::math::exp;
use crate::{Alphabet, CoreError, Posteriorgram};

/// How each word renders: a distribution over emitted strings.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionTable {
    /// word → list of (rendered string, probability); probabilities per
    /// word sum to 1.
    entries: BTreeMap<String, Vec<(String, f64)>>,
}

impl ConfusionTable {
    /// An empty table: every word renders as itself.
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds and validates a table.
    pub fn new(
        entries: impl IntoIterator<Item = (String, Vec<(String, f64)>)>,
    ) -> Result<Self, CoreError> {
        let entries: BTreeMap<String, Vec<(String, f64)>> = entries.into_iter().collect();
        for (word, renderings) in &entries {
            if renderings.is_empty() {
                return Err(CoreError::InvalidConfusionTable(alloc::format!(
                    "word {word:?} has no renderings"
                )));
            }
            let mut total = 0.0;
            for (rendered, prob) in renderings {
                if rendered.is_empty() {
                    return Err(CoreError::InvalidConfusionTable(alloc::format!(
                        "word {word:?} has an empty rendering"
                    )));
                }
                if !(0.0..=1.0).contains(prob) {
                    return Err(CoreError::InvalidConfusionTable(alloc::format!(
                        "word {word:?} rendering {rendered:?} has probability {prob}"
                    )));
                }
                total += prob;
            }
            if (total - 1.0).abs() > 1e-9 {
                return Err(CoreError::InvalidConfusionTable(alloc::format!(
                    "word {word:?} renderings sum to {total}"
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Checks every rendered string against an alphabet.
    pub fn validate_against(&self, alphabet: &Alphabet) -> Result<(), CoreError> {
        for renderings in self.entries.values() {
            for (rendered, _) in renderings {
                alphabet
                    .validate_text(rendered)
                    .map_err(|_| CoreError::InvalidWord(rendered.clone()))?;
            }
        }
        Ok(())
    }

    /// The rendering distribution for a word, if one is configured.
    pub fn renderings(&self, word: &str) -> Option<&[(String, f64)]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    /// Iterates all configured words.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn sample(&self, word: &str, rng: &mut impl Rng) -> String {
        match self.entries.get(word) {
            None => word.to_string(),
            Some(renderings) => {
                let roll: f64 = rng.random();
                let mut cumulative = 0.0;
                for (rendered, prob) in renderings {
                    cumulative += prob;
                    if roll < cumulative {
                        return rendered.clone();
                    }
                }
                renderings
                    .last()
                    .map(|(rendered, _)| rendered.clone())
                    .unwrap_or_else(|| word.to_string())
            }
        }
    }
}

/// Frame-synthesis parameters for the simulator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    /// Frames emitted per rendered character.
    pub frames_per_char: usize,
    /// Probability of an optional blank frame at word-internal character
    /// boundaries (repeated characters always get one).
    pub blank_insert_prob: f64,
    /// Probability mass placed on the intended symbol per frame; must
    /// exceed the uniform share `1/V`.
    pub peak_prob: f64,
    /// Spread of the leftover mass: 0 spreads it uniformly, larger values
    /// concentrate it on random off-target symbols.
    pub noise_temperature: f64,
    /// Seed for rendering choices and noise.
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            frames_per_char: 3,
            blank_insert_prob: 0.2,
            peak_prob: 0.85,
            noise_temperature: 1.0,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    /// Checks parameter ranges against an alphabet size.
    pub fn validate(&self, alphabet: &Alphabet) -> Result<(), CoreError> {
        let fail = |msg: String| Err(CoreError::InvalidSimConfig(msg));
        if self.frames_per_char < 1 {
            return fail("frames_per_char must be at least 1".to_string());
        }
        if !(0.0..=1.0).contains(&self.blank_insert_prob) {
            return fail(alloc::format!(
                "blank_insert_prob {} out of [0, 1]",
                self.blank_insert_prob
            ));
        }
        let uniform = 1.0 / alphabet.size() as f64;
        if !(self.peak_prob > uniform && self.peak_prob <= 1.0) {
            return fail(alloc::format!(
                "peak_prob {} must be in (1/{}, 1]",
                self.peak_prob,
                alphabet.size()
            ));
        }
        if self.noise_temperature < 0.0 {
            return fail("noise_temperature must be non-negative".to_string());
        }
        Ok(())
    }

    /// A copy with a different seed; benchmark generation derives one
    /// seed per utterance this way.
    pub fn with_seed(&self, rng_seed: u64) -> Self {
        Self { rng_seed, ..self.clone() }
    }
}

/// Renders a transcript into a posteriorgram.
///
/// Per word, a rendered string is sampled from the confusion table (words
/// without an entry render as themselves); rendered words are joined with
/// single spaces. Every character emits `frames_per_char` frames peaked on
/// it; a blank frame always separates repeated characters and appears with
/// `blank_insert_prob` at other boundaries. Deterministic given the
/// config's seed.
pub fn render_utterance(
    utterance_id: &str,
    transcript: &str,
    table: &ConfusionTable,
    cfg: &SimConfig,
    alphabet: &Alphabet,
) -> Result<Posteriorgram, CoreError> {
    cfg.validate(alphabet)?;
    let words: Vec<&str> = transcript.split_whitespace().collect();
    if words.is_empty() {
        return Err(CoreError::InvalidWord(transcript.to_string()));
    }
    for word in &words {
        alphabet
            .validate_text(word)
            .map_err(|_| CoreError::InvalidWord((*word).to_string()))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let rendered: Vec<String> = words.iter().map(|w| table.sample(w, &mut rng)).collect();
    let rendered_text = rendered.join(" ");
    alphabet
        .validate_text(&rendered_text)
        .map_err(|_| CoreError::InvalidWord(rendered_text.clone()))?;

    let size = alphabet.size();
    let blank = alphabet.blank_index();
    let mut frames: Vec<f64> = Vec::new();
    let mut emit = |symbol: usize, count: usize, rng: &mut ChaCha8Rng| {
        for _ in 0..count {
            frames.extend(peaked_row(size, symbol, cfg, rng));
        }
    };

    let mut prev: Option<usize> = None;
    for ch in rendered_text.chars() {
        let symbol = alphabet
            .index_of(ch)
            .expect("rendered text validated above");
        // Repeats need a separating blank; elsewhere blanks are optional.
        // Short-circuit keeps the RNG untouched on the mandatory path.
        if prev == Some(symbol) || rng.random::<f64>() < cfg.blank_insert_prob {
            emit(blank, 1, &mut rng);
        }
        emit(symbol, cfg.frames_per_char, &mut rng);
        prev = Some(symbol);
    }
    if rng.random::<f64>() < cfg.blank_insert_prob {
        emit(blank, 1, &mut rng);
    }

    Posteriorgram::new(utterance_id, size, frames)
}

/// One probability row with `peak_prob` on `symbol` and the remainder
/// spread over the other symbols, shaped by the noise temperature.
fn peaked_row(size: usize, symbol: usize, cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut row = vec![0.0; size];
    row[symbol] = cfg.peak_prob;
    let remainder = 1.0 - cfg.peak_prob;
    if remainder <= 0.0 {
        return row;
    }
    let mut weights = vec![0.0; size];
    let mut total = 0.0;
    for (i, w) in weights.iter_mut().enumerate() {
        if i == symbol {
            continue;
        }
        let z: f64 = rng.sample(StandardNormal);
        *w = exp(cfg.noise_temperature * z);
        total += *w;
    }
    for (i, value) in row.iter_mut().enumerate() {
        if i != symbol {
            *value = remainder * weights[i] / total;
        }
    }
    row
}
