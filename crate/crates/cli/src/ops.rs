//! The pipeline stage operations behind the CLI subcommands.
//!
//! Each operation reads its inputs from disk, runs the core algorithms,
//! and writes its outputs, so every stage can be rerun in isolation from
//! persisted artifacts.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gramaug_core::eval::{evaluate, precompute_scores, GrammarSelection};
use gramaug_core::prondict::{normalize_transcript, DictionaryBuilder};
use gramaug_core::search::{
    beam_search, cem_search, exhaustive_search, greedy_search, greedy_search_refined, EarlyStop,
    SearchConfig, SearchTrace,
};
use gramaug_core::{
    candgen, Alphabet, CandidateSet, CommandSet, EvalResult, ScoreMatrix, UtteranceInfo,
    VariantPolicy,
};
use serde::{Deserialize, Serialize};

use crate::formats::{candidates, dict_tsv, manifest, mask, scmx};

/// Builds the pronunciation dictionary from a corpus manifest.
///
/// Invalid utterances are skipped and logged, never silently dropped.
/// With `dump_alignments` set, every aligned word pair is also written as
/// a `truth  decoded  op` TSV row for inspection.
pub fn build_dict(
    manifest_path: &Path,
    out: &Path,
    min_count: u64,
    alphabet: &Alphabet,
    dump_alignments: Option<&Path>,
) -> Result<DictStats> {
    use gramaug_core::align::AlignedPair;
    use gramaug_core::prondict::decode_and_align;

    let records = manifest::read_manifest(manifest_path)?;
    let mut builder = DictionaryBuilder::new(alphabet);
    let mut dump = match dump_alignments {
        Some(path) => {
            let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_path(path)?;
            w.write_record(["truth", "decoded", "op"])?;
            Some(w)
        }
        None => None,
    };
    let mut skipped = 0usize;
    let total = records.len();
    for record in records {
        let pgrm_path = manifest::resolve_pgrm_path(manifest_path, &record);
        let aligned = crate::formats::pgrm::read_pgrm(&pgrm_path, &record.utterance_id)
            .and_then(|p| {
                decode_and_align(&p, &record.transcript, alphabet).map_err(anyhow::Error::from)
            });
        let alignment = match aligned {
            Ok(alignment) => alignment,
            Err(err) => {
                skipped += 1;
                log::warn!("skipping utterance {:?}: {err:#}", record.utterance_id);
                continue;
            }
        };
        if let Some(w) = dump.as_mut() {
            for pair in alignment.pairs() {
                let (truth, decoded, op) = match pair {
                    AlignedPair::Match { word } => (word.as_str(), word.as_str(), "match"),
                    AlignedPair::Substitute { truth, decoded } => {
                        (truth.as_str(), decoded.as_str(), "substitute")
                    }
                    AlignedPair::Delete { truth } => (truth.as_str(), "", "delete"),
                    AlignedPair::Insert { decoded } => ("", decoded.as_str(), "insert"),
                };
                w.write_record([truth, decoded, op])?;
            }
        }
        builder.add_alignment(&alignment);
    }
    if let Some(mut w) = dump {
        w.flush()?;
    }
    let dict = builder.build(min_count);
    dict_tsv::write_dict(out, &dict)?;
    Ok(DictStats {
        utterances: total,
        skipped,
        words: dict.len(),
    })
}

/// What the dictionary stage processed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DictStats {
    /// Manifest records seen.
    pub utterances: usize,
    /// Records skipped (and logged) as invalid.
    pub skipped: usize,
    /// Distinct words in the dictionary.
    pub words: usize,
}

/// Expands commands against the dictionary into a candidate set file.
pub fn gen_candidates(
    commands_path: &Path,
    dict_path: &Path,
    policy: VariantPolicy,
    cap: Option<usize>,
    out: &Path,
) -> Result<usize> {
    let commands = crate::formats::commands::read_commands(commands_path)?;
    let dict = dict_tsv::read_dict(dict_path)?;
    let set = candgen::generate_candidates(&commands, &dict, policy, cap)?;
    candidates::write_candidates(out, &commands, &set)?;
    Ok(set.len())
}

/// Scores every candidate against every utterance of the given manifests.
///
/// In-domain manifests map each transcript to the command with that text;
/// an unknown transcript is an error. The OOD manifest contributes
/// target-less columns.
pub fn score(
    candidates_path: &Path,
    in_domain_manifests: &[PathBuf],
    ood_manifest: &Path,
    out: &Path,
    alphabet: &Alphabet,
) -> Result<(usize, usize)> {
    let (commands, set) = candidates::read_candidates(candidates_path)?;
    let mut utterances: Vec<(UtteranceInfo, gramaug_core::Posteriorgram)> = Vec::new();

    for manifest_path in in_domain_manifests {
        for (record, posteriorgram) in manifest::load_utterances(manifest_path)? {
            let text = normalize_transcript(&record.transcript).join(" ");
            let command = commands
                .commands()
                .iter()
                .find(|c| c.text == text)
                .with_context(|| {
                    format!(
                        "transcript {:?} of utterance {:?} is not a command",
                        record.transcript, record.utterance_id
                    )
                })?;
            utterances.push((
                UtteranceInfo::in_domain(record.utterance_id, command.id),
                posteriorgram,
            ));
        }
    }
    for (record, posteriorgram) in manifest::load_utterances(ood_manifest)? {
        utterances.push((
            UtteranceInfo::out_of_domain(record.utterance_id),
            posteriorgram,
        ));
    }

    let matrix = precompute_scores(&set, &utterances, alphabet)?;
    scmx::write_score_matrix(out, &matrix)?;
    Ok((matrix.num_candidates(), matrix.num_utterances()))
}

/// Keeps the OOD columns plus the in-domain columns whose utterance id
/// starts with `prefix` (all of them when `prefix` is `None`).
pub fn split_view(m: &ScoreMatrix, prefix: Option<&str>) -> Result<ScoreMatrix> {
    match prefix {
        None => Ok(m.clone()),
        Some(prefix) => Ok(m.retain_columns(|c| {
            c.target.is_none() || c.utterance_id.starts_with(prefix)
        })?),
    }
}

/// The search algorithms exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Naive greedy additions.
    Greedy,
    /// Greedy with subsequence refinement of the pool.
    Refined,
    /// Beam search over additions.
    Beam,
    /// Cross-entropy method.
    Cem,
    /// Exhaustive enumeration (small candidate sets only).
    Exhaustive,
}

impl Algorithm {
    /// Parses the CLI name.
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "greedy" => Self::Greedy,
            "refined" => Self::Refined,
            "beam" => Self::Beam,
            "cem" => Self::Cem,
            "exhaustive" => Self::Exhaustive,
            other => bail!("unknown algorithm {other:?} (expected greedy|refined|beam|cem|exhaustive)"),
        })
    }

    /// The CLI name.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Greedy => "greedy",
            Self::Refined => "refined",
            Self::Beam => "beam",
            Self::Cem => "cem",
            Self::Exhaustive => "exhaustive",
        }
    }

    /// Runs the algorithm on a matrix.
    pub fn run(&self, m: &ScoreMatrix, cfg: &SearchConfig) -> Result<SearchTrace> {
        Ok(match self {
            Self::Greedy => greedy_search(m, cfg)?,
            Self::Refined => greedy_search_refined(m, cfg)?,
            Self::Beam => beam_search(m, cfg)?,
            Self::Cem => cem_search(m, cfg)?,
            Self::Exhaustive => exhaustive_search(m, cfg)?,
        })
    }
}

/// Search outcome persisted as `<prefix>.result.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSummary {
    /// Which algorithm ran.
    pub algorithm: Algorithm,
    /// Objective evaluations consumed.
    pub evaluations: u64,
    /// Early-stop reason, if any.
    pub early_stop: Option<EarlyStop>,
    /// Evaluation of the final grammar on the searched split.
    pub result: EvalResult,
    /// Final grammar as a bitstring over candidate indices.
    pub mask_bitstring: String,
    /// The same mask in compact hex.
    pub mask_hex: String,
    /// Number of selected candidates.
    pub selected_count: usize,
}

/// Runs one search over a persisted score matrix and writes the mask,
/// summary JSON, and trace CSV under `out_prefix`.
pub fn search(
    scores_path: &Path,
    algorithm: Algorithm,
    cfg: &SearchConfig,
    split_prefix: Option<&str>,
    out_prefix: &Path,
) -> Result<SearchSummary> {
    let full = scmx::read_score_matrix(scores_path)?;
    let view = split_view(&full, split_prefix)?;
    let trace = algorithm.run(&view, cfg)?;
    let summary = SearchSummary {
        algorithm,
        evaluations: trace.evaluations,
        early_stop: trace.early_stop,
        result: trace.final_result.clone(),
        mask_bitstring: trace.final_selection.to_bitstring(),
        mask_hex: mask::to_hex(trace.final_selection.bits()),
        selected_count: trace.final_selection.count_selected(),
    };
    write_search_outputs(out_prefix, &summary, &trace)?;
    Ok(summary)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    prefix.with_file_name(name)
}

/// The `<prefix>.mask.txt` path of a search run.
pub fn mask_path(prefix: &Path) -> PathBuf {
    with_suffix(prefix, ".mask.txt")
}

/// The `<prefix>.result.json` path of a search run.
pub fn result_path(prefix: &Path) -> PathBuf {
    with_suffix(prefix, ".result.json")
}

/// The `<prefix>.trace.csv` path of a search run.
pub fn trace_path(prefix: &Path) -> PathBuf {
    with_suffix(prefix, ".trace.csv")
}

fn write_search_outputs(prefix: &Path, summary: &SearchSummary, trace: &SearchTrace) -> Result<()> {
    if let Some(parent) = prefix.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(mask_path(prefix), format!("{}\n", summary.mask_bitstring))?;
    std::fs::write(
        result_path(prefix),
        serde_json::to_string_pretty(summary)?,
    )?;
    let mut w = csv::Writer::from_path(trace_path(prefix))?;
    w.write_record(["evaluations", "best_objective"])?;
    for step in &trace.steps {
        w.write_record([step.evaluations.to_string(), step.best_objective.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Evaluates an explicit mask against a persisted score matrix.
pub fn evaluate_mask(
    scores_path: &Path,
    mask_text: &str,
    alpha: f64,
    beta: f64,
    split_prefix: Option<&str>,
) -> Result<EvalResult> {
    let full = scmx::read_score_matrix(scores_path)?;
    let view = split_view(&full, split_prefix)?;
    let bits = mask::parse_mask(mask_text, view.num_candidates())?;
    let sel = GrammarSelection::from_bits(bits, &view)?;
    Ok(evaluate(&view, &sel, alpha, beta)?)
}

/// Evaluates a ready selection on one split view of a matrix.
pub fn evaluate_selection(
    m: &ScoreMatrix,
    sel: &GrammarSelection,
    alpha: f64,
    beta: f64,
    split_prefix: Option<&str>,
) -> Result<EvalResult> {
    let view = split_view(m, split_prefix)?;
    let sel = GrammarSelection::from_bits(sel.bits().to_vec(), &view)?;
    Ok(evaluate(&view, &sel, alpha, beta)?)
}

/// Loads the candidate set belonging to a score matrix file.
pub fn load_matrix_and_selection(
    scores_path: &Path,
    mask_text: &str,
) -> Result<(ScoreMatrix, GrammarSelection)> {
    let m = scmx::read_score_matrix(scores_path)?;
    let bits = mask::parse_mask(mask_text, m.num_candidates())?;
    let sel = GrammarSelection::from_bits(bits, &m)?;
    Ok((m, sel))
}

/// Reads commands plus candidate metadata for reporting.
pub fn read_candidate_texts(path: &Path) -> Result<(CommandSet, CandidateSet)> {
    candidates::read_candidates(path)
}
