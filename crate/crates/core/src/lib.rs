//! Grammar augmentation for small-footprint CTC voice command recognition.
//!
//! A fixed-command voice UI scores every grammar string `g` of a grammar set
//! `G` against the acoustic model's per-frame grapheme posteriors for an
//! utterance `u`, picks the command whose best-scoring string wins, and
//! rejects the utterance when no score clears a confidence threshold
//! calibrated for a target false-alarm rate. Small acoustic models decode
//! words with consistent, learnable error patterns ("pause" → "pose"), so
//! recognition accuracy improves when the grammar is augmented with the
//! variants the model actually emits.
//!
//! This crate implements that augmentation pipeline end to end:
//!
//! - [`ctc`] — greedy decoding, the squashing function, and exact forward
//!   scoring of a label sequence against a [`Posteriorgram`];
//! - [`align`] — word-level Levenshtein alignment of transcripts to
//!   decodings;
//! - [`prondict`] — the statistical pronunciation dictionary built from
//!   decoding errors;
//! - [`candgen`] — candidate grammar sets as cartesian products of per-word
//!   variant lists;
//! - [`eval`] — precomputed score matrices, false-alarm threshold
//!   calibration, and misdetection/misclassification rates;
//! - [`search`] — greedy, refined-greedy, beam, cross-entropy-method, and
//!   exhaustive subset search over the candidate set;
//! - [`sim`] — a seeded synthetic acoustic model for desk-scale experiments.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature for embedded decode-side use. File formats, manifests, and
//! the command-line pipeline live in the companion `gramaug-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod align;
pub mod alphabet;
pub mod candgen;
pub mod ctc;
pub mod eval;
mod math;
pub mod posteriorgram;
pub mod prondict;
pub mod search;
pub mod sim;

mod error;

pub use alphabet::Alphabet;
pub use candgen::{Candidate, CandidateSet, Command, CommandId, CommandSet, VariantPolicy};
pub use error::CoreError;
pub use eval::{EvalResult, GrammarSelection, ScoreMatrix, UtteranceInfo};
pub use posteriorgram::{LabelSequence, Posteriorgram};
pub use prondict::{DictionaryBuilder, PronDictionary};
pub use search::{SearchConfig, SearchTrace};
pub use sim::{ConfusionTable, SimConfig};
