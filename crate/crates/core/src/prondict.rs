//! The statistical pronunciation dictionary: per-word frequency tables of
//! the acoustic model's greedy decodings.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::align::{align_words, AlignedPair, WordAlignment};
use crate::{ctc, Alphabet, CoreError, Posteriorgram};

/// One observed decoding variant of a word.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantEntry {
    /// The squashed decoding emitted for the word.
    pub variant: String,
    /// How many times it was observed.
    pub count: u64,
    /// `count / total_count` of the word, in `[0, 1]`.
    pub frequency: f64,
}

/// All observed variants of one word, sorted by descending frequency
/// (ties broken lexicographically).
#[derive(Debug, Clone, PartialEq)]
pub struct WordEntry {
    /// Variant rows in sort order.
    pub variants: Vec<VariantEntry>,
    /// Total observations of the word, including decodings dropped by the
    /// minimum-count floor and word-deleted events.
    pub total_count: u64,
}

/// Map from word to its decoding variant statistics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PronDictionary {
    entries: BTreeMap<String, WordEntry>,
}

impl PronDictionary {
    /// Reassembles a dictionary from raw per-word counts, recomputing
    /// frequencies and sort order.
    pub fn from_counts(
        words: impl IntoIterator<Item = (String, u64, Vec<(String, u64)>)>,
    ) -> Result<Self, CoreError> {
        let mut entries = BTreeMap::new();
        for (word, total_count, variants) in words {
            if total_count == 0 {
                return Err(CoreError::InvalidWord(word));
            }
            let mut seen = BTreeMap::new();
            for (variant, count) in variants {
                if variant.is_empty() || count == 0 {
                    return Err(CoreError::InvalidWord(word));
                }
                if seen.insert(variant, count).is_some() {
                    return Err(CoreError::InvalidWord(word));
                }
            }
            let counted: u64 = seen.values().sum();
            if counted > total_count {
                return Err(CoreError::InvalidWord(word));
            }
            let entry = WordEntry {
                variants: sorted_variants(seen, total_count),
                total_count,
            };
            entries.insert(word, entry);
        }
        Ok(Self { entries })
    }

    /// The entry for a word, if the word was ever observed.
    pub fn entry(&self, word: &str) -> Option<&WordEntry> {
        self.entries.get(word)
    }

    /// Iterates entries in word order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &WordEntry)> {
        self.entries.iter().map(|(w, e)| (w.as_str(), e))
    }

    /// Number of words with entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when no words have entries.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The first `k` variants of `word` by sort order.
    ///
    /// A word with no usable entry falls back to a list containing only
    /// the word itself, so downstream variant lists are never empty.
    pub fn top_k_variants(&self, word: &str, k: usize) -> Vec<String> {
        let variants: Vec<String> = self
            .entries
            .get(word)
            .map(|e| {
                e.variants
                    .iter()
                    .take(k)
                    .map(|v| v.variant.clone())
                    .collect()
            })
            .unwrap_or_default();
        if variants.is_empty() {
            return alloc::vec![word.to_string()];
        }
        variants
    }

    /// Smallest `k` whose top-`k` variants cover at least `target` of the
    /// word's observed frequency mass; the full list length if the target
    /// is unreachable. Words without entries report 1 (the fallback list).
    pub fn coverage_k(&self, word: &str, target: f64) -> usize {
        let Some(entry) = self.entries.get(word) else {
            return 1;
        };
        let mut cumulative = 0.0;
        for (i, v) in entry.variants.iter().enumerate() {
            cumulative += v.frequency;
            if cumulative >= target {
                return i + 1;
            }
        }
        entry.variants.len().max(1)
    }

    /// The recorded frequency of `variant` under `word`, if present.
    pub fn variant_frequency(&self, word: &str, variant: &str) -> Option<f64> {
        self.entries
            .get(word)?
            .variants
            .iter()
            .find(|v| v.variant == variant)
            .map(|v| v.frequency)
    }
}

fn sorted_variants(counts: BTreeMap<String, u64>, total: u64) -> Vec<VariantEntry> {
    let mut variants: Vec<VariantEntry> = counts
        .into_iter()
        .map(|(variant, count)| VariantEntry {
            variant,
            count,
            frequency: count as f64 / total as f64,
        })
        .collect();
    // Integer count comparison avoids float tie surprises; the BTreeMap
    // source already yields lexicographic order within equal counts.
    variants.sort_by(|a, b| b.count.cmp(&a.count).then(a.variant.cmp(&b.variant)));
    variants
}

/// Lowercases and strips everything but letters and apostrophes.
///
/// Returns an empty string for words with no usable characters; callers
/// drop those.
pub fn normalize_word(word: &str) -> String {
    word.chars()
        .filter_map(|ch| {
            if ch.is_alphabetic() {
                Some(ch.to_lowercase().next().unwrap_or(ch))
            } else if ch == '\'' {
                Some(ch)
            } else {
                None
            }
        })
        .collect()
}

/// Splits a transcript into normalized words.
pub fn normalize_transcript(transcript: &str) -> Vec<String> {
    transcript
        .split_whitespace()
        .map(normalize_word)
        .filter(|w| !w.is_empty())
        .collect()
}

/// Accumulates (word → decoded variant) counts from decoded utterances.
///
/// Match and substitute alignment pairs feed variant counts; word-deleted
/// events raise the word's total without emitting a variant; inserted
/// decoded words are ignored. Count merging is commutative, so shards
/// built in parallel merge into the same dictionary.
#[derive(Debug, Clone)]
pub struct DictionaryBuilder {
    alphabet: Alphabet,
    counts: BTreeMap<String, BTreeMap<String, u64>>,
    totals: BTreeMap<String, u64>,
}

/// Greedy-decodes an utterance and aligns the decoding against its
/// normalized transcript.
pub fn decode_and_align(
    posteriorgram: &Posteriorgram,
    transcript: &str,
    alphabet: &Alphabet,
) -> Result<WordAlignment, CoreError> {
    let truth = normalize_transcript(transcript);
    if truth.is_empty() {
        return Err(CoreError::InvalidWord(transcript.to_string()));
    }
    let decoded = ctc::greedy_decode(posteriorgram, alphabet)?;
    let decoded_words: Vec<&str> = decoded
        .as_ref()
        .map(|g| g.text().split_whitespace().collect())
        .unwrap_or_default();
    Ok(align_words(&truth, &decoded_words))
}

impl DictionaryBuilder {
    /// A builder for utterances over `alphabet`.
    pub fn new(alphabet: &Alphabet) -> Self {
        Self {
            alphabet: alphabet.clone(),
            counts: BTreeMap::new(),
            totals: BTreeMap::new(),
        }
    }

    /// Decodes one utterance, aligns it against its transcript, and
    /// accumulates the per-word events.
    pub fn add_utterance(
        &mut self,
        posteriorgram: &Posteriorgram,
        transcript: &str,
    ) -> Result<(), CoreError> {
        let alignment = decode_and_align(posteriorgram, transcript, &self.alphabet)?;
        self.add_alignment(&alignment);
        Ok(())
    }

    /// Accumulates the per-word events of one alignment: match and
    /// substitute pairs count variants, deletes raise totals only,
    /// inserts are ignored.
    pub fn add_alignment(&mut self, alignment: &WordAlignment) {
        for pair in alignment.pairs() {
            match pair {
                AlignedPair::Match { word } => self.record(word, Some(word)),
                AlignedPair::Substitute { truth, decoded } => self.record(truth, Some(decoded)),
                AlignedPair::Delete { truth } => self.record(truth, None),
                AlignedPair::Insert { .. } => {}
            }
        }
    }

    fn record(&mut self, word: &str, variant: Option<&str>) {
        *self.totals.entry(word.to_string()).or_insert(0) += 1;
        if let Some(variant) = variant {
            *self
                .counts
                .entry(word.to_string())
                .or_default()
                .entry(variant.to_string())
                .or_insert(0) += 1;
        }
    }

    /// Merges another shard's counts into this builder.
    pub fn merge(&mut self, other: DictionaryBuilder) {
        for (word, total) in other.totals {
            *self.totals.entry(word).or_insert(0) += total;
        }
        for (word, variants) in other.counts {
            let slot = self.counts.entry(word).or_default();
            for (variant, count) in variants {
                *slot.entry(variant).or_insert(0) += count;
            }
        }
    }

    /// Finalizes the dictionary, dropping variants observed fewer than
    /// `min_count` times. Dropped variants still count toward totals, so
    /// surviving frequencies stay honest.
    pub fn build(self, min_count: u64) -> PronDictionary {
        let mut entries = BTreeMap::new();
        for (word, total) in self.totals {
            let variants = self
                .counts
                .get(&word)
                .map(|counts| {
                    counts
                        .iter()
                        .filter(|(_, &c)| c >= min_count.max(1))
                        .map(|(v, &c)| (v.clone(), c))
                        .collect::<BTreeMap<_, _>>()
                })
                .unwrap_or_default();
            entries.insert(
                word,
                WordEntry {
                    variants: sorted_variants(variants, total),
                    total_count: total,
                },
            );
        }
        PronDictionary { entries }
    }
}

/// Builds a dictionary over a corpus, skipping utterances that fail
/// validation and reporting each skip as `(utterance_id, error)`.
pub fn build_dictionary(
    alphabet: &Alphabet,
    corpus: impl IntoIterator<Item = (Posteriorgram, String)>,
    min_count: u64,
) -> (PronDictionary, Vec<(String, CoreError)>) {
    let mut builder = DictionaryBuilder::new(alphabet);
    let mut skipped = Vec::new();
    for (posteriorgram, transcript) in corpus {
        if let Err(err) = builder.add_utterance(&posteriorgram, &transcript) {
            skipped.push((posteriorgram.utterance_id().to_string(), err));
        }
    }
    (builder.build(min_count), skipped)
}
