use alloc::string::String;

/// Errors produced by the core pipeline operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum CoreError {
    /// An alphabet failed its construction invariants.
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    /// A symbol index is outside the alphabet table.
    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolIndexOutOfRange {
        /// The offending index.
        index: usize,
        /// Alphabet size including the blank.
        size: usize,
    },

    /// A character does not belong to the alphabet's graphemes.
    #[error("character {0:?} is not in the alphabet")]
    CharNotInAlphabet(char),

    /// A label sequence must contain at least one grapheme.
    #[error("label sequence is empty")]
    EmptyLabelSequence,

    /// A posteriorgram failed validation.
    #[error("invalid posteriorgram for utterance {utterance_id:?}: {reason}")]
    InvalidPosteriorgram {
        /// Utterance the frames belong to.
        utterance_id: String,
        /// What went wrong.
        reason: String,
    },

    /// A posteriorgram's symbol count does not match the alphabet.
    #[error("posteriorgram has {found} symbols but the alphabet has {expected}")]
    AlphabetSizeMismatch {
        /// Alphabet size including the blank.
        expected: usize,
        /// Symbol count found in the posteriorgram.
        found: usize,
    },

    /// A word contains characters outside the alphabet.
    #[error("word {0:?} contains characters outside the alphabet")]
    InvalidWord(String),

    /// A command set failed validation.
    #[error("invalid command set: {0}")]
    InvalidCommandSet(String),

    /// Two commands generated the same candidate grammar text.
    #[error(
        "grammar text {text:?} is generated by both command {first_command:?} \
         and command {second_command:?}"
    )]
    AmbiguousCandidate {
        /// The duplicated grammar text.
        text: String,
        /// First command producing it.
        first_command: String,
        /// Second command producing it.
        second_command: String,
    },

    /// The candidate cap cannot hold all original commands.
    #[error("candidate cap {cap} is smaller than the {originals} original commands")]
    CapTooSmall {
        /// Requested cap.
        cap: usize,
        /// Number of original commands.
        originals: usize,
    },

    /// A candidate set failed validation.
    #[error("invalid candidate set: {0}")]
    InvalidCandidateSet(String),

    /// A score matrix failed validation.
    #[error("invalid score matrix: {0}")]
    InvalidScoreMatrix(String),

    /// A grammar selection is inconsistent with its score matrix.
    #[error("invalid grammar selection: {0}")]
    InvalidSelection(String),

    /// Threshold calibration requires at least one out-of-domain utterance.
    #[error("out-of-domain corpus is empty")]
    EmptyOodCorpus,

    /// Evaluation requires at least one in-domain utterance.
    #[error("in-domain corpus is empty")]
    EmptyInDomainCorpus,

    /// A search configuration failed validation.
    #[error("invalid search config: {0}")]
    InvalidSearchConfig(String),

    /// Exhaustive search refuses candidate sets beyond its size limit.
    #[error("exhaustive search over {free} non-original candidates exceeds the limit of {limit}")]
    SearchSpaceTooLarge {
        /// Non-original candidate count.
        free: usize,
        /// Maximum supported count.
        limit: usize,
    },

    /// A confusion table failed validation.
    #[error("invalid confusion table: {0}")]
    InvalidConfusionTable(String),

    /// A simulator configuration failed validation.
    #[error("invalid simulator config: {0}")]
    InvalidSimConfig(String),
}
