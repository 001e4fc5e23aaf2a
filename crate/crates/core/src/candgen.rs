//! Candidate grammar sets built from per-word variant lists.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::prondict::normalize_transcript;
use crate::{CoreError, PronDictionary};

/// Identifier of a command; dense from zero within a [`CommandSet`].
pub type CommandId = usize;

/// One voice command with its canonical grammar text.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Command {
    /// Dense identifier.
    pub id: CommandId,
    /// The command's original grammar text.
    pub text: String,
}

/// The ordered set of commands a grammar maps into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandSet {
    commands: Vec<Command>,
}

impl CommandSet {
    /// Builds a command set from texts, assigning ids in order.
    ///
    /// Texts are whitespace-normalized; they must be unique and contain at
    /// least one word each.
    pub fn new(texts: impl IntoIterator<Item = String>) -> Result<Self, CoreError> {
        let mut commands = Vec::new();
        let mut seen = BTreeSet::new();
        for text in texts {
            let words = normalize_transcript(&text);
            if words.is_empty() {
                return Err(CoreError::InvalidCommandSet(alloc::format!(
                    "command {text:?} has no words"
                )));
            }
            let text = words.join(" ");
            if !seen.insert(text.clone()) {
                return Err(CoreError::InvalidCommandSet(alloc::format!(
                    "duplicate command {text:?}"
                )));
            }
            commands.push(Command {
                id: commands.len(),
                text,
            });
        }
        if commands.is_empty() {
            return Err(CoreError::InvalidCommandSet(
                "at least one command is required".to_string(),
            ));
        }
        Ok(Self { commands })
    }

    /// Revalidates an explicit command list (ids must already be dense).
    pub fn from_commands(commands: Vec<Command>) -> Result<Self, CoreError> {
        for (i, c) in commands.iter().enumerate() {
            if c.id != i {
                return Err(CoreError::InvalidCommandSet(alloc::format!(
                    "command ids must be dense from 0, found {} at position {}",
                    c.id,
                    i
                )));
            }
        }
        Self::new(commands.into_iter().map(|c| c.text))
    }

    /// The commands in id order.
    pub fn commands(&self) -> &[Command] {
        &self.commands
    }

    /// Number of commands.
    pub fn len(&self) -> usize {
        self.commands.len()
    }

    /// True when the set holds no commands (never, post-construction).
    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }
}

/// One grammar string eligible for inclusion in an augmented grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Candidate {
    /// Frozen index; downstream bit vectors refer to it.
    pub index: usize,
    /// The grammar text.
    pub text: String,
    /// The command this text decodes to (the mapping `f`).
    pub command_id: CommandId,
    /// True for the command's own original text.
    pub is_original: bool,
}

/// The candidate set: indexed grammar texts with their command mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    candidates: Vec<Candidate>,
    n_commands: usize,
}

/// How many variants to take per word when expanding a command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariantPolicy {
    /// A fixed top-`k` list for every word.
    TopK(usize),
    /// Per-word `k` chosen to cover at least this fraction of the word's
    /// observed variant mass.
    Coverage(f64),
}

impl CandidateSet {
    /// Revalidates an explicit candidate list (a deserialized set).
    pub fn from_candidates(
        candidates: Vec<Candidate>,
        n_commands: usize,
    ) -> Result<Self, CoreError> {
        let mut texts = BTreeSet::new();
        let mut originals = alloc::vec![0usize; n_commands];
        for (i, c) in candidates.iter().enumerate() {
            if c.index != i {
                return Err(CoreError::InvalidCandidateSet(alloc::format!(
                    "candidate indices must be dense from 0, found {} at position {}",
                    c.index,
                    i
                )));
            }
            if c.command_id >= n_commands {
                return Err(CoreError::InvalidCandidateSet(alloc::format!(
                    "candidate {:?} maps to unknown command {}",
                    c.text,
                    c.command_id
                )));
            }
            if c.text.is_empty() {
                return Err(CoreError::InvalidCandidateSet(
                    "empty grammar text".to_string(),
                ));
            }
            if !texts.insert(c.text.clone()) {
                return Err(CoreError::InvalidCandidateSet(alloc::format!(
                    "duplicate grammar text {:?}",
                    c.text
                )));
            }
            if c.is_original {
                originals[c.command_id] += 1;
            }
        }
        if let Some(cmd) = originals.iter().position(|&n| n != 1) {
            return Err(CoreError::InvalidCandidateSet(alloc::format!(
                "command {cmd} must have exactly one original candidate"
            )));
        }
        Ok(Self {
            candidates,
            n_commands,
        })
    }

    /// The candidates in index order.
    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// The candidate at `index`.
    pub fn get(&self, index: usize) -> Option<&Candidate> {
        self.candidates.get(index)
    }

    /// Number of candidates (`|G|`).
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    /// True when empty (never, post-construction).
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Number of commands the mapping covers.
    pub fn num_commands(&self) -> usize {
        self.n_commands
    }

    /// Indices of the original command texts.
    pub fn original_indices(&self) -> Vec<usize> {
        self.candidates
            .iter()
            .filter(|c| c.is_original)
            .map(|c| c.index)
            .collect()
    }
}

/// Expands every command into the cartesian product of its per-word
/// variant lists.
///
/// Each word's list comes from the dictionary under `policy` and always
/// includes the original word. Originals are listed first (in command
/// order); augmentation candidates follow, ranked by descending product of
/// their variant frequencies. `cap`, when given, bounds the total
/// candidate count; originals are never capped away.
pub fn generate_candidates(
    commands: &CommandSet,
    dict: &PronDictionary,
    policy: VariantPolicy,
    cap: Option<usize>,
) -> Result<CandidateSet, CoreError> {
    if let VariantPolicy::Coverage(target) = policy {
        if !(target > 0.0 && target <= 1.0) {
            return Err(CoreError::InvalidCandidateSet(alloc::format!(
                "coverage target {target} must be in (0, 1]"
            )));
        }
    }
    if let VariantPolicy::TopK(0) = policy {
        return Err(CoreError::InvalidCandidateSet(
            "top-k policy requires k >= 1".to_string(),
        ));
    }

    struct Expansion {
        text: String,
        command_id: CommandId,
        weight: f64,
    }

    let mut originals = Vec::new();
    let mut expansions: Vec<Expansion> = Vec::new();
    // text → first command that generated it, for ambiguity reporting.
    let mut owners: BTreeMap<String, CommandId> = BTreeMap::new();

    for command in commands.commands() {
        let words: Vec<&str> = command.text.split_whitespace().collect();
        let mut lists: Vec<Vec<(String, f64)>> = Vec::with_capacity(words.len());
        for &word in &words {
            let k = match policy {
                VariantPolicy::TopK(k) => k,
                VariantPolicy::Coverage(target) => dict.coverage_k(word, target),
            };
            let mut list: Vec<(String, f64)> = dict
                .top_k_variants(word, k)
                .into_iter()
                .map(|variant| {
                    let freq = dict.variant_frequency(word, &variant).unwrap_or(1.0);
                    (variant, freq)
                })
                .collect();
            if !list.iter().any(|(v, _)| v == word) {
                // The original word rides along even when it is not among
                // the top variants; absent words weigh 1.0.
                let freq = dict.variant_frequency(word, word).unwrap_or(1.0);
                list.push((word.to_string(), freq));
            }
            lists.push(list);
        }

        let mut products: Vec<(String, f64)> = alloc::vec![(String::new(), 1.0)];
        for list in &lists {
            let mut next = Vec::with_capacity(products.len() * list.len());
            for (prefix, weight) in &products {
                for (variant, freq) in list {
                    let text = if prefix.is_empty() {
                        variant.clone()
                    } else {
                        alloc::format!("{prefix} {variant}")
                    };
                    next.push((text, weight * freq));
                }
            }
            products = next;
        }

        for (text, weight) in products {
            if let Some(&owner) = owners.get(&text) {
                if owner != command.id {
                    return Err(CoreError::AmbiguousCandidate {
                        text,
                        first_command: commands.commands()[owner].text.clone(),
                        second_command: command.text.clone(),
                    });
                }
                continue;
            }
            owners.insert(text.clone(), command.id);
            if text == command.text {
                originals.push(Expansion {
                    text,
                    command_id: command.id,
                    weight,
                });
            } else {
                expansions.push(Expansion {
                    text,
                    command_id: command.id,
                    weight,
                });
            }
        }
    }

    expansions.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then(a.command_id.cmp(&b.command_id))
            .then(a.text.cmp(&b.text))
    });

    if let Some(cap) = cap {
        if cap < originals.len() {
            return Err(CoreError::CapTooSmall {
                cap,
                originals: originals.len(),
            });
        }
        expansions.truncate(cap - originals.len());
    }

    let candidates = originals
        .into_iter()
        .map(|e| (e, true))
        .chain(expansions.into_iter().map(|e| (e, false)))
        .enumerate()
        .map(|(index, (e, is_original))| Candidate {
            index,
            text: e.text,
            command_id: e.command_id,
            is_original,
        })
        .collect();

    CandidateSet::from_candidates(candidates, commands.len())
}
