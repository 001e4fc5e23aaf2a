//! Precomputed score matrices and grammar-set evaluation.
//!
//! Every candidate grammar string is scored against every utterance once;
//! afterwards any grammar subset can be evaluated — threshold, false-alarm
//! rate, misdetection and misclassification — without touching a
//! posteriorgram again. That caching is what makes the search algorithms
//! affordable.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::candgen::{Candidate, CandidateSet, CommandId};
use crate::{ctc, Alphabet, CoreError, LabelSequence, Posteriorgram};

/// Column metadata: one scored utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UtteranceInfo {
    /// Opaque utterance identifier.
    pub utterance_id: String,
    /// Target command for in-domain utterances; `None` marks
    /// out-of-domain.
    pub target: Option<CommandId>,
}

impl UtteranceInfo {
    /// An in-domain utterance with its target command.
    pub fn in_domain(utterance_id: impl Into<String>, target: CommandId) -> Self {
        Self {
            utterance_id: utterance_id.into(),
            target: Some(target),
        }
    }

    /// An out-of-domain utterance.
    pub fn out_of_domain(utterance_id: impl Into<String>) -> Self {
        Self {
            utterance_id: utterance_id.into(),
            target: None,
        }
    }
}

/// Log probability scores for all candidates × all utterances, with the
/// row and column metadata needed to evaluate any grammar selection.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    rows: Vec<Candidate>,
    columns: Vec<UtteranceInfo>,
    /// Row-major |G| × (|D| + |D_ood|), entries ≤ 0 or -inf.
    scores: Vec<f64>,
    n_commands: usize,
    in_domain_cols: Vec<usize>,
    ood_cols: Vec<usize>,
}

impl ScoreMatrix {
    /// Assembles and validates a matrix from its parts.
    pub fn from_parts(
        rows: Vec<Candidate>,
        n_commands: usize,
        columns: Vec<UtteranceInfo>,
        scores: Vec<f64>,
    ) -> Result<Self, CoreError> {
        // Row metadata carries the same invariants as a candidate set.
        CandidateSet::from_candidates(rows.clone(), n_commands)?;
        if columns.is_empty() {
            return Err(CoreError::InvalidScoreMatrix("no columns".to_string()));
        }
        if scores.len() != rows.len() * columns.len() {
            return Err(CoreError::InvalidScoreMatrix(alloc::format!(
                "{} scores for a {}x{} matrix",
                scores.len(),
                rows.len(),
                columns.len()
            )));
        }
        for &s in &scores {
            if s.is_nan() || s > 0.0 {
                return Err(CoreError::InvalidScoreMatrix(alloc::format!(
                    "score {s} is not a log probability"
                )));
            }
        }
        let mut ids = alloc::collections::BTreeSet::new();
        let mut in_domain_cols = Vec::new();
        let mut ood_cols = Vec::new();
        for (c, col) in columns.iter().enumerate() {
            if !ids.insert(col.utterance_id.as_str()) {
                return Err(CoreError::InvalidScoreMatrix(alloc::format!(
                    "duplicate utterance id {:?}",
                    col.utterance_id
                )));
            }
            match col.target {
                Some(t) if t >= n_commands => {
                    return Err(CoreError::InvalidScoreMatrix(alloc::format!(
                        "utterance {:?} targets unknown command {t}",
                        col.utterance_id
                    )));
                }
                Some(_) => in_domain_cols.push(c),
                None => ood_cols.push(c),
            }
        }
        Ok(Self {
            rows,
            columns,
            scores,
            n_commands,
            in_domain_cols,
            ood_cols,
        })
    }

    /// Number of candidate rows (`|G|`).
    pub fn num_candidates(&self) -> usize {
        self.rows.len()
    }

    /// Number of utterance columns (`|D| + |D_ood|`).
    pub fn num_utterances(&self) -> usize {
        self.columns.len()
    }

    /// Number of commands in the mapping.
    pub fn num_commands(&self) -> usize {
        self.n_commands
    }

    /// Candidate metadata for row `i`.
    pub fn candidate(&self, i: usize) -> &Candidate {
        &self.rows[i]
    }

    /// All candidate rows in index order.
    pub fn candidates(&self) -> &[Candidate] {
        &self.rows
    }

    /// Column metadata in order.
    pub fn columns(&self) -> &[UtteranceInfo] {
        &self.columns
    }

    /// Column indices of in-domain utterances.
    pub fn in_domain_columns(&self) -> &[usize] {
        &self.in_domain_cols
    }

    /// Column indices of out-of-domain utterances.
    pub fn ood_columns(&self) -> &[usize] {
        &self.ood_cols
    }

    /// The log score of candidate `row` against utterance column `col`.
    pub fn score(&self, row: usize, col: usize) -> f64 {
        self.scores[row * self.columns.len() + col]
    }

    /// The raw row-major score grid.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// A copy keeping only the columns accepted by `keep`.
    ///
    /// Used to restrict evaluation to one corpus split while sharing the
    /// one precomputed grid.
    pub fn retain_columns(
        &self,
        mut keep: impl FnMut(&UtteranceInfo) -> bool,
    ) -> Result<Self, CoreError> {
        let kept: Vec<usize> = (0..self.columns.len())
            .filter(|&c| keep(&self.columns[c]))
            .collect();
        let columns: Vec<UtteranceInfo> = kept.iter().map(|&c| self.columns[c].clone()).collect();
        let mut scores = Vec::with_capacity(self.rows.len() * kept.len());
        for r in 0..self.rows.len() {
            let base = r * self.columns.len();
            scores.extend(kept.iter().map(|&c| self.scores[base + c]));
        }
        Self::from_parts(self.rows.clone(), self.n_commands, columns, scores)
    }
}

/// Scores every candidate against every utterance.
///
/// The returned matrix is the only thing the search algorithms consume;
/// [`ctc::forward_logprob`] is never called again after this step.
pub fn precompute_scores(
    candidates: &CandidateSet,
    utterances: &[(UtteranceInfo, Posteriorgram)],
    alphabet: &Alphabet,
) -> Result<ScoreMatrix, CoreError> {
    let labels: Vec<LabelSequence> = candidates
        .candidates()
        .iter()
        .map(|c| LabelSequence::new(c.text.clone(), alphabet))
        .collect::<Result<_, _>>()?;

    let n_cols = utterances.len();
    let mut scores = vec![f64::NEG_INFINITY; candidates.len() * n_cols];
    for (col, (_, posteriorgram)) in utterances.iter().enumerate() {
        for (row, label) in labels.iter().enumerate() {
            let lp = ctc::forward_logprob(posteriorgram, label, alphabet)?;
            // Row sums may carry float slack; scores stay log probabilities.
            scores[row * n_cols + col] = lp.min(0.0);
        }
    }

    ScoreMatrix::from_parts(
        candidates.candidates().to_vec(),
        candidates.num_commands(),
        utterances.iter().map(|(info, _)| info.clone()).collect(),
        scores,
    )
}

/// A grammar subset as a bit vector over candidate indices.
///
/// Original command texts are always selected; constructors enforce it, so
/// every command stays expressible under any selection.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrammarSelection {
    bits: Vec<bool>,
}

impl GrammarSelection {
    /// The originals-only selection for a matrix.
    pub fn originals(m: &ScoreMatrix) -> Self {
        Self {
            bits: m.rows.iter().map(|c| c.is_original).collect(),
        }
    }

    /// The all-candidates selection for a matrix.
    pub fn all(m: &ScoreMatrix) -> Self {
        Self {
            bits: vec![true; m.num_candidates()],
        }
    }

    /// Validates an explicit bit vector against a matrix.
    pub fn from_bits(bits: Vec<bool>, m: &ScoreMatrix) -> Result<Self, CoreError> {
        if bits.len() != m.num_candidates() {
            return Err(CoreError::InvalidSelection(alloc::format!(
                "{} bits for {} candidates",
                bits.len(),
                m.num_candidates()
            )));
        }
        if let Some(c) = m.rows.iter().find(|c| c.is_original && !bits[c.index]) {
            return Err(CoreError::InvalidSelection(alloc::format!(
                "original candidate {} ({:?}) must stay selected",
                c.index,
                c.text
            )));
        }
        Ok(Self { bits })
    }

    /// Whether candidate `index` is selected.
    pub fn is_selected(&self, index: usize) -> bool {
        self.bits[index]
    }

    /// Number of candidate slots.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// True when no slots exist (never for a real matrix).
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of selected candidates.
    pub fn count_selected(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Selected candidate indices, ascending.
    pub fn selected_indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// The raw bits.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Selects candidate `index` in place.
    pub fn add(&mut self, index: usize) {
        self.bits[index] = true;
    }

    /// A copy with candidate `index` selected.
    pub fn with_candidate(&self, index: usize) -> Self {
        let mut next = self.clone();
        next.add(index);
        next
    }

    /// True when every bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| !a || b)
    }

    /// `"0"`/`"1"` characters in index order.
    pub fn to_bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Evaluation of one grammar selection at one operating point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalResult {
    /// Calibrated log-score confidence threshold.
    pub tau: f64,
    /// Fraction of out-of-domain utterances decoded as a command;
    /// strictly below the target by construction.
    pub far: f64,
    /// Fraction of in-domain utterances rejected as out-of-domain.
    pub mdr: f64,
    /// Fraction of in-domain utterances decoded to a wrong command.
    pub mcr: f64,
    /// `mcr + beta * mdr`, the search objective.
    pub objective: f64,
}

fn validate_alpha(alpha: f64) -> Result<(), CoreError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CoreError::InvalidSearchConfig(alloc::format!(
            "false-alarm target {alpha} must be in (0, 1)"
        )));
    }
    Ok(())
}

fn check_selection(m: &ScoreMatrix, sel: &GrammarSelection) -> Result<(), CoreError> {
    if sel.len() != m.num_candidates() {
        return Err(CoreError::InvalidSelection(alloc::format!(
            "selection over {} candidates used with a {}-candidate matrix",
            sel.len(),
            m.num_candidates()
        )));
    }
    Ok(())
}

/// Per-column best score over the selected rows.
fn column_maxima(m: &ScoreMatrix, selected: &[usize]) -> Vec<f64> {
    let n_cols = m.columns.len();
    let mut maxima = vec![f64::NEG_INFINITY; n_cols];
    for &row in selected {
        let base = row * n_cols;
        for (c, best) in maxima.iter_mut().enumerate() {
            let s = m.scores[base + c];
            if s > *best {
                *best = s;
            }
        }
    }
    maxima
}

/// Smallest threshold drawn from the out-of-domain max scores (plus a
/// negative-infinity sentinel) with a strict-exceedance fraction below
/// `alpha`.
fn threshold_from_ood_maxima(ood_maxima: &[f64], alpha: f64) -> Result<f64, CoreError> {
    let total = ood_maxima.len();
    if total == 0 {
        return Err(CoreError::EmptyOodCorpus);
    }
    if (alpha * total as f64) < 1.0 {
        log::warn!(
            "false-alarm target {alpha} over {total} out-of-domain utterances \
             admits zero false alarms; threshold degenerates to the maximum score"
        );
    }
    let mut sorted = ood_maxima.to_vec();
    sorted.sort_by(f64::total_cmp);

    let fraction_exceeding = |tau: f64| -> f64 {
        // First index with value > tau, via binary search on the sorted
        // maxima.
        let exceeding = sorted.partition_point(|&v| v <= tau);
        (total - exceeding) as f64 / total as f64
    };

    if fraction_exceeding(f64::NEG_INFINITY) < alpha {
        return Ok(f64::NEG_INFINITY);
    }
    for (i, &tau) in sorted.iter().enumerate() {
        if i + 1 < sorted.len() && sorted[i + 1] == tau {
            continue; // skip duplicate threshold values
        }
        if fraction_exceeding(tau) < alpha {
            return Ok(tau);
        }
    }
    unreachable!("the maximum out-of-domain score always satisfies the target")
}

/// Calibrates the confidence threshold `τ(G, α)` for a selection.
///
/// The threshold is the smallest value, drawn from the per-utterance best
/// out-of-domain scores (or a sentinel below all of them), such that the
/// fraction of out-of-domain utterances scoring strictly above it stays
/// below `alpha`.
pub fn calibrate_threshold(
    m: &ScoreMatrix,
    sel: &GrammarSelection,
    alpha: f64,
) -> Result<f64, CoreError> {
    validate_alpha(alpha)?;
    check_selection(m, sel)?;
    let maxima = column_maxima(m, &sel.selected_indices());
    let ood: Vec<f64> = m.ood_cols.iter().map(|&c| maxima[c]).collect();
    threshold_from_ood_maxima(&ood, alpha)
}

/// Decodes one utterance column under a selection and threshold.
///
/// Returns `None` (the out-of-domain outcome φ) when the best selected
/// score does not exceed `tau`; otherwise the command with the highest
/// per-command best score, ties broken toward the lowest command id.
///
/// Rejection uses `≤ tau`: the threshold is itself an attained score
/// value, and the false-alarm definition counts strict exceedances only,
/// so equality must reject for the two formulas to stay consistent.
pub fn decode(
    m: &ScoreMatrix,
    sel: &GrammarSelection,
    tau: f64,
    column: usize,
) -> Option<CommandId> {
    let n_cols = m.columns.len();
    let mut best = f64::NEG_INFINITY;
    let mut per_command = vec![f64::NEG_INFINITY; m.n_commands];
    for (row, candidate) in m.rows.iter().enumerate() {
        if !sel.bits[row] {
            continue;
        }
        let s = m.scores[row * n_cols + column];
        if s > best {
            best = s;
        }
        if s > per_command[candidate.command_id] {
            per_command[candidate.command_id] = s;
        }
    }
    if best <= tau {
        return None;
    }
    let mut winner = 0;
    for (cmd, &score) in per_command.iter().enumerate() {
        if score > per_command[winner] {
            winner = cmd;
        }
    }
    Some(winner)
}

/// Evaluates a selection: calibrates the threshold, decodes every
/// utterance from the precomputed scores, and reports FAR, MDR, MCR and
/// the weighted objective `MCR + beta·MDR`.
pub fn evaluate(
    m: &ScoreMatrix,
    sel: &GrammarSelection,
    alpha: f64,
    beta: f64,
) -> Result<EvalResult, CoreError> {
    validate_alpha(alpha)?;
    check_selection(m, sel)?;
    if m.in_domain_cols.is_empty() {
        return Err(CoreError::EmptyInDomainCorpus);
    }

    let selected = sel.selected_indices();
    let n_cols = m.columns.len();
    let mut col_max = vec![f64::NEG_INFINITY; n_cols];
    let mut cmd_best = vec![f64::NEG_INFINITY; n_cols * m.n_commands];
    for &row in &selected {
        let command = m.rows[row].command_id;
        let base = row * n_cols;
        for (c, best) in col_max.iter_mut().enumerate() {
            let s = m.scores[base + c];
            if s > *best {
                *best = s;
            }
            let slot = c * m.n_commands + command;
            if s > cmd_best[slot] {
                cmd_best[slot] = s;
            }
        }
    }

    let ood: Vec<f64> = m.ood_cols.iter().map(|&c| col_max[c]).collect();
    let tau = threshold_from_ood_maxima(&ood, alpha)?;

    let mut misdetected = 0usize;
    let mut misclassified = 0usize;
    for &c in &m.in_domain_cols {
        if col_max[c] <= tau {
            misdetected += 1;
            continue;
        }
        let bests = &cmd_best[c * m.n_commands..(c + 1) * m.n_commands];
        let mut winner = 0;
        for (cmd, &score) in bests.iter().enumerate() {
            if score > bests[winner] {
                winner = cmd;
            }
        }
        if Some(winner) != m.columns[c].target {
            misclassified += 1;
        }
    }

    let false_alarms = ood.iter().filter(|&&s| s > tau).count();
    let n_in = m.in_domain_cols.len() as f64;
    let mdr = misdetected as f64 / n_in;
    let mcr = misclassified as f64 / n_in;
    Ok(EvalResult {
        tau,
        far: false_alarms as f64 / m.ood_cols.len() as f64,
        mdr,
        mcr,
        objective: mcr + beta * mdr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A matrix with explicit scores: `rows[r]` holds `(command_id,
    /// is_original)`, columns are in-domain targets then OOD count.
    pub(crate) fn matrix(
        rows: &[(CommandId, bool)],
        targets: &[CommandId],
        ood: usize,
        scores: Vec<f64>,
    ) -> ScoreMatrix {
        let n_commands = rows.iter().map(|&(c, _)| c + 1).max().unwrap_or(1);
        let rows: Vec<Candidate> = rows
            .iter()
            .enumerate()
            .map(|(i, &(command_id, is_original))| Candidate {
                index: i,
                text: alloc::format!("g{i}"),
                command_id,
                is_original,
            })
            .collect();
        let mut columns: Vec<UtteranceInfo> = targets
            .iter()
            .enumerate()
            .map(|(i, &t)| UtteranceInfo::in_domain(alloc::format!("in{i}"), t))
            .collect();
        columns.extend((0..ood).map(|i| UtteranceInfo::out_of_domain(alloc::format!("ood{i}"))));
        ScoreMatrix::from_parts(rows, n_commands, columns, scores).unwrap()
    }

    #[test]
    fn threshold_hand_enumerated_order_statistics() {
        // OOD maxima -1..-10, α = 0.25: exactly 2/10 = 0.2 may exceed, so
        // τ = -3.
        let maxima: Vec<f64> = (1..=10).map(|i| -(i as f64)).collect();
        let tau = threshold_from_ood_maxima(&maxima, 0.25).unwrap();
        assert_eq!(tau, -3.0);
    }

    #[test]
    fn threshold_alpha_smaller_than_one_event_takes_max() {
        let maxima: Vec<f64> = (1..=1000).map(|i| -(i as f64)).collect();
        let tau = threshold_from_ood_maxima(&maxima, 0.001).unwrap();
        assert_eq!(tau, -1.0);
    }

    #[test]
    fn threshold_all_unalignable_is_sentinel() {
        let maxima = vec![f64::NEG_INFINITY; 8];
        let tau = threshold_from_ood_maxima(&maxima, 0.1).unwrap();
        assert_eq!(tau, f64::NEG_INFINITY);
    }

    #[test]
    fn threshold_minimality_against_brute_force() {
        // Brute force: scan the sentinel plus every attained value and
        // keep the smallest satisfying the target.
        let cases: &[(&[f64], f64)] = &[
            (&[-1.0, -1.0, -2.0, -3.0, -3.0, -5.0], 0.34),
            (&[-1.0, -1.0, -1.0], 0.5),
            (&[-4.0, f64::NEG_INFINITY, -2.0, f64::NEG_INFINITY], 0.6),
            (&[-7.5], 0.9),
        ];
        for &(maxima, alpha) in cases {
            let total = maxima.len() as f64;
            let mut candidates = vec![f64::NEG_INFINITY];
            candidates.extend_from_slice(maxima);
            candidates.sort_by(f64::total_cmp);
            let expected = candidates
                .iter()
                .copied()
                .find(|&tau| {
                    let exceeding = maxima.iter().filter(|&&v| v > tau).count();
                    (exceeding as f64 / total) < alpha
                })
                .unwrap();
            let got = threshold_from_ood_maxima(maxima, alpha).unwrap();
            assert_eq!(got, expected, "maxima {maxima:?} alpha {alpha}");
        }
    }

    #[test]
    fn threshold_requires_ood_and_valid_alpha() {
        assert_eq!(
            threshold_from_ood_maxima(&[], 0.1),
            Err(CoreError::EmptyOodCorpus)
        );
        let m = matrix(
            &[(0, true)],
            &[0],
            1,
            vec![-1.0, -2.0],
        );
        let sel = GrammarSelection::originals(&m);
        assert!(calibrate_threshold(&m, &sel, 0.0).is_err());
        assert!(calibrate_threshold(&m, &sel, 1.0).is_err());
    }

    #[test]
    fn decode_rejects_on_equality_with_tau() {
        let m = matrix(
            &[(0, true), (1, true)],
            &[0, 1],
            1,
            vec![
                -2.0, -9.0, -4.0, // candidate of command 0
                -8.0, -3.0, -4.0, // candidate of command 1
            ],
        );
        let sel = GrammarSelection::originals(&m);
        // OOD max is -4.0; α small forces τ = -4.0.
        let tau = calibrate_threshold(&m, &sel, 0.5).unwrap();
        assert_eq!(tau, -4.0);
        assert_eq!(decode(&m, &sel, tau, 0), Some(0));
        assert_eq!(decode(&m, &sel, tau, 1), Some(1));
        // Column 2 scores exactly τ for both commands: rejected.
        assert_eq!(decode(&m, &sel, tau, 2), None);
    }

    #[test]
    fn decode_all_neg_infinity_is_rejected() {
        let m = matrix(
            &[(0, true)],
            &[0],
            2,
            vec![f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
        );
        let sel = GrammarSelection::originals(&m);
        let tau = calibrate_threshold(&m, &sel, 0.4).unwrap();
        assert_eq!(tau, f64::NEG_INFINITY);
        assert_eq!(decode(&m, &sel, tau, 0), None);
    }

    #[test]
    fn decode_ties_break_to_lowest_command_id() {
        let m = matrix(
            &[(0, true), (1, true)],
            &[1],
            1,
            vec![-2.0, -9.0, -2.0, -9.0],
        );
        let sel = GrammarSelection::originals(&m);
        assert_eq!(decode(&m, &sel, -5.0, 0), Some(0));
    }

    #[test]
    fn evaluate_perfect_grammar_is_zero_objective() {
        let m = matrix(
            &[(0, true), (1, true)],
            &[0, 1],
            2,
            vec![
                -1.0, -20.0, f64::NEG_INFINITY, f64::NEG_INFINITY,
                -20.0, -1.0, f64::NEG_INFINITY, f64::NEG_INFINITY,
            ],
        );
        let sel = GrammarSelection::originals(&m);
        let r = evaluate(&m, &sel, 0.01, 1.0).unwrap();
        assert_eq!(r.mdr, 0.0);
        assert_eq!(r.mcr, 0.0);
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.far, 0.0);
    }

    #[test]
    fn evaluate_counts_misdetection_and_misclassification() {
        // in0 decodes correctly, in1 sinks below τ (misdetection), in2
        // is won by the wrong command (misclassification), in3 is fine.
        let m = matrix(
            &[(0, true), (1, true)],
            &[0, 0, 1, 1],
            2,
            vec![
                -1.0, -20.0, -2.0, -20.0, -6.0, -20.0,
                -15.0, -20.0, -3.0, -1.5, -20.0, -6.0,
            ],
        );
        let sel = GrammarSelection::originals(&m);
        let r = evaluate(&m, &sel, 0.49, 1.0).unwrap();
        // τ = -6 (both OOD maxima are -6; 0/2 < 0.49 exceed).
        assert_eq!(r.tau, -6.0);
        assert_eq!(r.far, 0.0);
        assert!((r.mdr - 0.25).abs() < 1e-12);
        assert!((r.mcr - 0.25).abs() < 1e-12);
        assert!((r.objective - 0.5).abs() < 1e-12);
        // decode agrees with the batched path column by column
        assert_eq!(decode(&m, &sel, r.tau, 0), Some(0));
        assert_eq!(decode(&m, &sel, r.tau, 1), None);
        assert_eq!(decode(&m, &sel, r.tau, 2), Some(0));
        assert_eq!(decode(&m, &sel, r.tau, 3), Some(1));
    }

    #[test]
    fn evaluate_objective_weights_mdr_by_beta() {
        let m = matrix(
            &[(0, true)],
            &[0, 0],
            1,
            vec![-1.0, -9.0, -5.0],
        );
        let sel = GrammarSelection::originals(&m);
        let r = evaluate(&m, &sel, 0.9, 2.5).unwrap();
        assert!((r.mdr - 0.5).abs() < 1e-12);
        assert_eq!(r.mcr, 0.0);
        assert!((r.objective - 1.25).abs() < 1e-12);
    }

    #[test]
    fn evaluate_is_pure_and_repeatable() {
        let m = matrix(
            &[(0, true), (0, false), (1, true)],
            &[0, 1, 1],
            3,
            vec![
                -3.0, -8.0, -7.0, -6.0, -9.0, -2.0,
                -2.0, -7.5, -6.5, -5.0, -8.0, -3.0,
                -9.0, -1.0, -1.5, -7.0, -2.0, -8.0,
            ],
        );
        let mut sel = GrammarSelection::originals(&m);
        sel.add(1);
        let first = evaluate(&m, &sel, 0.3, 1.0).unwrap();
        for _ in 0..5 {
            assert_eq!(evaluate(&m, &sel, 0.3, 1.0).unwrap(), first);
        }
    }

    #[test]
    fn threshold_monotone_in_selection_growth() {
        let m = matrix(
            &[(0, true), (0, false), (0, false)],
            &[0],
            4,
            vec![
                -1.0, -9.0, -8.0, -7.0, -6.0,
                -1.0, -5.0, -4.0, -3.0, -2.0,
                -1.0, -2.5, -1.5, -9.5, -0.5,
            ],
        );
        let small = GrammarSelection::originals(&m);
        let mid = small.with_candidate(1);
        let large = mid.with_candidate(2);
        let alpha = 0.3;
        let t_small = calibrate_threshold(&m, &small, alpha).unwrap();
        let t_mid = calibrate_threshold(&m, &mid, alpha).unwrap();
        let t_large = calibrate_threshold(&m, &large, alpha).unwrap();
        assert!(t_mid >= t_small);
        assert!(t_large >= t_mid);
    }

    #[test]
    fn selection_construction_enforces_originals() {
        let m = matrix(
            &[(0, true), (0, false)],
            &[0],
            1,
            vec![-1.0, -2.0, -3.0, -4.0],
        );
        assert!(GrammarSelection::from_bits(vec![true, false], &m).is_ok());
        assert!(GrammarSelection::from_bits(vec![false, true], &m).is_err());
        assert!(GrammarSelection::from_bits(vec![true], &m).is_err());
        assert_eq!(GrammarSelection::originals(&m).to_bitstring(), "10");
        assert_eq!(GrammarSelection::all(&m).count_selected(), 2);
    }

    #[test]
    fn retain_columns_keeps_scores_aligned() {
        let m = matrix(
            &[(0, true)],
            &[0, 0],
            2,
            vec![-1.0, -2.0, -3.0, -4.0],
        );
        let kept = m
            .retain_columns(|c| c.target.is_none() || c.utterance_id == "in1")
            .unwrap();
        assert_eq!(kept.num_utterances(), 3);
        assert_eq!(kept.score(0, 0), -2.0);
        assert_eq!(kept.score(0, 1), -3.0);
        assert_eq!(kept.in_domain_columns().len(), 1);
        assert_eq!(kept.ood_columns().len(), 2);
    }

    #[test]
    fn matrix_validation_rejects_bad_scores() {
        let rows = vec![Candidate {
            index: 0,
            text: "g0".into(),
            command_id: 0,
            is_original: true,
        }];
        let cols = vec![UtteranceInfo::in_domain("u", 0)];
        assert!(ScoreMatrix::from_parts(rows.clone(), 1, cols.clone(), vec![0.5]).is_err());
        assert!(ScoreMatrix::from_parts(rows.clone(), 1, cols.clone(), vec![f64::NAN]).is_err());
        assert!(ScoreMatrix::from_parts(rows, 1, cols, vec![-1.0, -2.0]).is_err());
    }
}
