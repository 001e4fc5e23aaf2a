//! Subset search over the candidate set: greedy, greedy with refinement,
//! beam, cross-entropy method, and an exhaustive oracle.
//!
//! All algorithms consume only the precomputed [`ScoreMatrix`] through
//! [`evaluate`]; none of them touch a posteriorgram. Original command
//! texts are frozen into every explored selection, since a grammar missing
//! a command's only expression makes that command undecodable.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eval::{evaluate, EvalResult, GrammarSelection, ScoreMatrix};
use crate::math;
use crate::CoreError;

/// Exhaustive search refuses more than this many non-original candidates.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Parameters shared by the search algorithms.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchConfig {
    /// False-alarm rate target α.
    pub alpha: f64,
    /// Misdetection weight β in the objective `MCR + β·MDR`.
    pub beta: f64,
    /// Beam width `l`; width 1 degenerates to naive greedy.
    pub beam_width: usize,
    /// CEM population size `s` per iteration.
    pub cem_population: usize,
    /// CEM elite fraction γ; the best `⌈γ·s⌉` samples refit the
    /// distribution.
    pub cem_elite_fraction: f64,
    /// Maximum CEM iterations.
    pub cem_iterations: usize,
    /// Initial per-dimension Gaussian mean.
    pub cem_initial_mean: f64,
    /// Initial per-dimension Gaussian standard deviation.
    pub cem_initial_stddev: f64,
    /// Weight of the new elite statistics when refitting, in `[0, 1]`.
    pub cem_smoothing: f64,
    /// Seed for the CEM sampler.
    pub rng_seed: u64,
    /// Optional cap on objective evaluations; searches stop early once
    /// reached, committing nothing from an incomplete round.
    pub eval_budget: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            alpha: 0.001,
            beta: 1.0,
            beam_width: 5,
            cem_population: 100,
            cem_elite_fraction: 0.1,
            cem_iterations: 50,
            cem_initial_mean: 0.0,
            cem_initial_stddev: 1.0,
            cem_smoothing: 0.7,
            rng_seed: 0,
            eval_budget: None,
        }
    }
}

impl SearchConfig {
    /// Checks the structural invariants of the configuration.
    pub fn validate(&self) -> Result<(), CoreError> {
        let fail = |msg: String| Err(CoreError::InvalidSearchConfig(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(alloc::format!("alpha {} must be in (0, 1)", self.alpha));
        }
        if self.beam_width < 1 {
            return fail("beam width must be at least 1".to_string());
        }
        if self.cem_population < 2 {
            return fail("CEM population must be at least 2".to_string());
        }
        if !(self.cem_elite_fraction > 0.0 && self.cem_elite_fraction < 1.0) {
            return fail(alloc::format!(
                "CEM elite fraction {} must be in (0, 1)",
                self.cem_elite_fraction
            ));
        }
        if self.cem_elite_fraction * (self.cem_population as f64) < 1.0 - 1e-9 {
            return fail("CEM elite fraction times population must be at least 1".to_string());
        }
        if self.cem_iterations < 1 {
            return fail("CEM needs at least one iteration".to_string());
        }
        if self.cem_initial_stddev <= 0.0 || self.cem_initial_stddev.is_nan() {
            return fail("CEM initial stddev must be positive".to_string());
        }
        if !(0.0..=1.0).contains(&self.cem_smoothing) {
            return fail("CEM smoothing must be in [0, 1]".to_string());
        }
        if self.eval_budget == Some(0) {
            return fail("evaluation budget must be at least 1".to_string());
        }
        Ok(())
    }
}

/// Why a search ended before its natural stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EarlyStop {
    /// The evaluation budget ran out.
    EvaluationBudget,
    /// Every CEM dimension's variance collapsed below 1e-12.
    VarianceCollapse,
}

/// One recorded objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// Running evaluation count (1-based).
    pub evaluations: u64,
    /// Best objective seen so far, non-increasing along the trace.
    pub best_objective: f64,
    /// The selection attaining that best objective.
    pub best_mask: GrammarSelection,
}

/// The full history and outcome of one search run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    /// One step per objective evaluation.
    pub steps: Vec<TraceStep>,
    /// The selection the algorithm settled on.
    pub final_selection: GrammarSelection,
    /// Its evaluation.
    pub final_result: EvalResult,
    /// Total objective evaluations (equals `steps.len()`).
    pub evaluations: u64,
    /// Set when the run stopped before its natural rule.
    pub early_stop: Option<EarlyStop>,
}

/// Counts evaluations, tracks the running best, and enforces the budget.
struct Recorder<'a> {
    m: &'a ScoreMatrix,
    alpha: f64,
    beta: f64,
    steps: Vec<TraceStep>,
    best: Option<(GrammarSelection, EvalResult)>,
    budget: Option<u64>,
    early_stop: Option<EarlyStop>,
}

impl<'a> Recorder<'a> {
    fn new(m: &'a ScoreMatrix, cfg: &SearchConfig) -> Self {
        Self {
            m,
            alpha: cfg.alpha,
            beta: cfg.beta,
            steps: Vec::new(),
            best: None,
            budget: cfg.eval_budget,
            early_stop: None,
        }
    }

    /// Seeds the running best with an uncounted reference evaluation (the
    /// originals-only baseline the greedy family starts from).
    fn seed_best(&mut self, sel: GrammarSelection, result: EvalResult) {
        self.best = Some((sel, result));
    }

    fn evaluate(&mut self, sel: GrammarSelection) -> Result<EvalResult, CoreError> {
        let result = evaluate(self.m, &sel, self.alpha, self.beta)?;
        let improves = self
            .best
            .as_ref()
            .is_none_or(|(_, best)| result.objective < best.objective);
        if improves {
            self.best = Some((sel, result.clone()));
        }
        let (best_sel, best_res) = self.best.as_ref().expect("best is set");
        self.steps.push(TraceStep {
            evaluations: self.steps.len() as u64 + 1,
            best_objective: best_res.objective,
            best_mask: best_sel.clone(),
        });
        Ok(result)
    }

    fn budget_exhausted(&mut self) -> bool {
        let exhausted = self
            .budget
            .is_some_and(|b| self.steps.len() as u64 >= b);
        if exhausted {
            self.early_stop = Some(EarlyStop::EvaluationBudget);
        }
        exhausted
    }

    fn best(&self) -> Option<(GrammarSelection, EvalResult)> {
        self.best.clone()
    }

    fn into_trace(self, final_selection: GrammarSelection, final_result: EvalResult) -> SearchTrace {
        SearchTrace {
            evaluations: self.steps.len() as u64,
            steps: self.steps,
            final_selection,
            final_result,
            early_stop: self.early_stop,
        }
    }
}

fn non_original_indices(m: &ScoreMatrix) -> Vec<usize> {
    m.candidates()
        .iter()
        .filter(|c| !c.is_original)
        .map(|c| c.index)
        .collect()
}

/// True when `needle`'s characters appear in `hay` in order (not
/// necessarily contiguously). Spaces count like any other character.
fn is_subsequence(needle: &str, hay: &str) -> bool {
    let mut want = needle.chars();
    let mut next = want.next();
    for ch in hay.chars() {
        if next == Some(ch) {
            next = want.next();
        }
        if next.is_none() {
            return true;
        }
    }
    next.is_none()
}

fn greedy_core(m: &ScoreMatrix, cfg: &SearchConfig, refine: bool) -> Result<SearchTrace, CoreError> {
    cfg.validate()?;
    let baseline_sel = GrammarSelection::originals(m);
    let baseline = evaluate(m, &baseline_sel, cfg.alpha, cfg.beta)?;
    let mut rec = Recorder::new(m, cfg);
    rec.seed_best(baseline_sel.clone(), baseline.clone());

    let mut current = baseline_sel;
    let mut current_result = baseline;
    let mut pool = non_original_indices(m);

    'rounds: while !pool.is_empty() {
        let mut best_add: Option<(usize, usize, EvalResult)> = None;
        for (pos, &index) in pool.iter().enumerate() {
            if rec.budget_exhausted() {
                break 'rounds;
            }
            let result = rec.evaluate(current.with_candidate(index))?;
            // Strict improvement only; ties keep the incumbent grammar,
            // and among improvers the lowest candidate index wins.
            if result.objective < current_result.objective
                && best_add
                    .as_ref()
                    .is_none_or(|(_, _, b)| result.objective < b.objective)
            {
                best_add = Some((pos, index, result));
            }
        }
        let Some((pos, index, result)) = best_add else {
            break;
        };
        current.add(index);
        current_result = result;
        pool.remove(pos);
        if refine {
            let added = m.candidate(index).text.clone();
            pool.retain(|&i| !is_subsequence(&added, &m.candidate(i).text));
        }
    }

    Ok(rec.into_trace(current, current_result))
}

/// Naive greedy search: starting from the originals, repeatedly add the
/// single candidate that best improves the objective, recalibrating the
/// threshold each time, until no addition strictly improves.
pub fn greedy_search(m: &ScoreMatrix, cfg: &SearchConfig) -> Result<SearchTrace, CoreError> {
    greedy_core(m, cfg, false)
}

/// Greedy search with refinement: after each addition, candidates that
/// contain the added grammar text as a subsequence are dropped from the
/// pool, pushing later additions toward more diverse variants.
pub fn greedy_search_refined(
    m: &ScoreMatrix,
    cfg: &SearchConfig,
) -> Result<SearchTrace, CoreError> {
    greedy_core(m, cfg, true)
}

fn cmp_set_first(a: &GrammarSelection, b: &GrammarSelection) -> Ordering {
    for (x, y) in a.bits().iter().zip(b.bits()) {
        match (x, y) {
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
    }
    Ordering::Equal
}

/// Beam search over single-candidate additions, keeping the `l` best
/// distinct grammars seen so far. With `l = 1` the final grammar is
/// exactly the naive greedy one.
pub fn beam_search(m: &ScoreMatrix, cfg: &SearchConfig) -> Result<SearchTrace, CoreError> {
    cfg.validate()?;
    struct Entry {
        sel: GrammarSelection,
        result: EvalResult,
        incumbent: bool,
    }

    let baseline_sel = GrammarSelection::originals(m);
    let baseline = evaluate(m, &baseline_sel, cfg.alpha, cfg.beta)?;
    let mut rec = Recorder::new(m, cfg);
    rec.seed_best(baseline_sel.clone(), baseline.clone());

    let mut beam = alloc::vec![Entry {
        sel: baseline_sel,
        result: baseline,
        incumbent: true,
    }];

    'iterations: loop {
        let mut pool: Vec<Entry> = Vec::new();
        let mut seen: BTreeSet<Vec<bool>> = beam.iter().map(|e| e.sel.bits().to_vec()).collect();

        for member in &beam {
            for index in 0..m.num_candidates() {
                if member.sel.is_selected(index) {
                    continue;
                }
                let sel = member.sel.with_candidate(index);
                if !seen.insert(sel.bits().to_vec()) {
                    continue;
                }
                if rec.budget_exhausted() {
                    break 'iterations;
                }
                let result = rec.evaluate(sel.clone())?;
                pool.push(Entry {
                    sel,
                    result,
                    incumbent: false,
                });
            }
        }

        pool.append(&mut beam);
        // Rank by objective; incumbents win exact ties so the search
        // terminates, and among new entries the mask whose earliest
        // candidate index is set sorts first (lowest added index).
        pool.sort_by(|a, b| {
            a.result
                .objective
                .total_cmp(&b.result.objective)
                .then_with(|| b.incumbent.cmp(&a.incumbent))
                .then_with(|| cmp_set_first(&a.sel, &b.sel))
        });
        pool.truncate(cfg.beam_width);

        // No new mask made the cut: the iteration improved nothing.
        let unchanged = pool.iter().all(|e| e.incumbent);
        beam = pool;
        for entry in &mut beam {
            entry.incumbent = true;
        }
        if unchanged {
            break;
        }
    }

    let best = &beam[0];
    Ok(rec.into_trace(best.sel.clone(), best.result.clone()))
}

/// Cross-entropy method over `{0,1}^|G|`.
///
/// Selections are the signs of a per-dimension independent Gaussian
/// (originals forced on). Each iteration draws `s` samples, keeps the best
/// `⌈γ·s⌉`, and refits the mean and variance toward the elite statistics
/// with the configured smoothing. Returns the best selection ever
/// evaluated. Sampling is seeded per (iteration, sample) index, so results
/// do not depend on evaluation parallelism.
pub fn cem_search(m: &ScoreMatrix, cfg: &SearchConfig) -> Result<SearchTrace, CoreError> {
    cfg.validate()?;
    let dims = m.num_candidates();
    let forced: Vec<bool> = m.candidates().iter().map(|c| c.is_original).collect();
    let has_free_dims = forced.iter().any(|&f| !f);

    let population = cfg.cem_population;
    let elite_count = {
        let raw = cfg.cem_elite_fraction * population as f64;
        (math::ceil(raw - 1e-9) as usize).clamp(1, population)
    };

    let mut mean = alloc::vec![cfg.cem_initial_mean; dims];
    let mut var = alloc::vec![cfg.cem_initial_stddev * cfg.cem_initial_stddev; dims];
    let mut rec = Recorder::new(m, cfg);

    'iterations: for iteration in 0..cfg.cem_iterations {
        let mut samples: Vec<(Vec<f64>, f64)> = Vec::with_capacity(population);
        for j in 0..population {
            if rec.budget_exhausted() {
                break 'iterations;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream((iteration * population + j) as u64);
            let mut xs = Vec::with_capacity(dims);
            let mut bits = Vec::with_capacity(dims);
            for d in 0..dims {
                let z: f64 = rng.sample(StandardNormal);
                let x = mean[d] + math::sqrt(var[d]) * z;
                xs.push(x);
                bits.push(forced[d] || x > 0.0);
            }
            let sel = GrammarSelection::from_bits(bits, m)?;
            let result = rec.evaluate(sel)?;
            samples.push((xs, result.objective));
        }

        // Elite refit: best γ fraction by objective, stable on ties.
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by(|&a, &b| samples[a].1.total_cmp(&samples[b].1));
        let elite = &order[..elite_count];

        let n = elite.len() as f64;
        for d in 0..dims {
            let sum: f64 = elite.iter().map(|&j| samples[j].0[d]).sum();
            let elite_mean = sum / n;
            let sq: f64 = elite
                .iter()
                .map(|&j| {
                    let delta = samples[j].0[d] - elite_mean;
                    delta * delta
                })
                .sum();
            let elite_var = sq / n;
            mean[d] = cfg.cem_smoothing * elite_mean + (1.0 - cfg.cem_smoothing) * mean[d];
            var[d] = cfg.cem_smoothing * elite_var + (1.0 - cfg.cem_smoothing) * var[d];
        }

        if var.iter().all(|&v| v < 1e-12) {
            rec.early_stop = Some(EarlyStop::VarianceCollapse);
            break;
        }
        if !has_free_dims {
            break;
        }
    }

    let (sel, result) = rec.best().ok_or_else(|| {
        CoreError::InvalidSearchConfig("CEM made no evaluations".to_string())
    })?;
    Ok(rec.into_trace(sel, result))
}

/// Exhaustive enumeration of every selection containing the originals.
///
/// A test oracle: refuses more than [`EXHAUSTIVE_LIMIT`] non-original
/// candidates. Ties resolve to the lowest enumeration mask.
pub fn exhaustive_search(m: &ScoreMatrix, cfg: &SearchConfig) -> Result<SearchTrace, CoreError> {
    cfg.validate()?;
    let free = non_original_indices(m);
    if free.len() > EXHAUSTIVE_LIMIT {
        return Err(CoreError::SearchSpaceTooLarge {
            free: free.len(),
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let mut rec = Recorder::new(m, cfg);
    let originals = GrammarSelection::originals(m);
    'enumeration: for mask in 0u64..(1u64 << free.len()) {
        if rec.budget_exhausted() {
            break 'enumeration;
        }
        let mut sel = originals.clone();
        for (bit, &index) in free.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                sel.add(index);
            }
        }
        rec.evaluate(sel)?;
    }
    let (sel, result) = rec
        .best()
        .ok_or_else(|| CoreError::InvalidSearchConfig("no evaluations made".to_string()))?;
    Ok(rec.into_trace(sel, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candgen::Candidate;
    use crate::eval::UtteranceInfo;
    use alloc::vec;
    use rand::RngCore;

    /// Builds a matrix from per-row `(command_id, is_original)` plus
    /// explicit scores; columns are `targets` then `ood` OOD utterances.
    fn matrix(
        rows: &[(usize, bool)],
        targets: &[usize],
        ood: usize,
        scores: Vec<f64>,
    ) -> ScoreMatrix {
        let n_commands = rows.iter().map(|&(c, _)| c + 1).max().unwrap();
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

    /// A seeded random matrix: `free` non-original candidates spread over
    /// `commands` commands, one original each.
    fn random_matrix(
        seed: u64,
        commands: usize,
        free: usize,
        in_domain: usize,
        ood: usize,
    ) -> ScoreMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<(usize, bool)> = (0..commands).map(|c| (c, true)).collect();
        rows.extend((0..free).map(|i| (i % commands, false)));
        let targets: Vec<usize> = (0..in_domain)
            .map(|_| (rng.next_u64() % commands as u64) as usize)
            .collect();
        let n_rows = rows.len();
        let n_cols = in_domain + ood;
        let scores: Vec<f64> = (0..n_rows * n_cols)
            .map(|_| -((rng.next_u64() % 1000) as f64) / 40.0 - 0.5)
            .collect();
        matrix(&rows, &targets, ood, scores)
    }

    fn cfg() -> SearchConfig {
        SearchConfig {
            alpha: 0.2,
            beta: 1.0,
            ..SearchConfig::default()
        }
    }

    fn assert_trace_invariants(trace: &SearchTrace, m: &ScoreMatrix) {
        assert_eq!(trace.evaluations, trace.steps.len() as u64);
        let mut last = f64::INFINITY;
        for (i, step) in trace.steps.iter().enumerate() {
            assert_eq!(step.evaluations, i as u64 + 1);
            assert!(step.best_objective <= last);
            last = step.best_objective;
        }
        for c in m.candidates() {
            if c.is_original {
                assert!(trace.final_selection.is_selected(c.index));
            }
        }
    }

    #[test]
    fn greedy_stops_immediately_when_nothing_helps() {
        // The lone variant only hurts: it drags an OOD utterance above
        // the in-domain scores, raising the threshold.
        let m = matrix(
            &[(0, true), (0, false)],
            &[0, 0],
            2,
            vec![
                -1.0, -2.0, -30.0, -30.0,
                -20.0, -20.0, -1.5, -1.5,
            ],
        );
        let trace = greedy_search(&m, &cfg()).unwrap();
        assert_eq!(trace.evaluations, 1); // |G| - |originals|
        assert_eq!(
            trace.final_selection,
            GrammarSelection::originals(&m)
        );
        assert_trace_invariants(&trace, &m);
    }

    #[test]
    fn greedy_adds_the_fixing_variant_first() {
        // Command 0's utterances are misclassified under the originals;
        // candidate 2 fixes both of them, candidate 3 fixes nothing.
        let m = matrix(
            &[(0, true), (1, true), (0, false), (0, false)],
            &[0, 0, 1],
            2,
            vec![
                -25.0, -25.0, -2.0, -30.0, -30.0,
                -24.0, -24.0, -1.0, -30.0, -30.0,
                -0.5, -0.6, -20.0, -30.0, -30.0,
                -26.0, -27.0, -21.0, -30.0, -30.0,
            ],
        );
        let trace = greedy_search(&m, &cfg()).unwrap();
        assert!(trace.final_selection.is_selected(2));
        assert!(!trace.final_selection.is_selected(3));
        assert_eq!(trace.steps[0].evaluations, 1);
        assert_trace_invariants(&trace, &m);
    }

    #[test]
    fn refinement_drops_supersequences_of_added_text() {
        let rows = vec![
            Candidate {
                index: 0,
                text: "pause music".into(),
                command_id: 0,
                is_original: true,
            },
            Candidate {
                index: 1,
                text: "pose music".into(),
                command_id: 0,
                is_original: false,
            },
            Candidate {
                index: 2,
                text: "porse music".into(),
                command_id: 0,
                is_original: false,
            },
        ];
        let columns = vec![
            UtteranceInfo::in_domain("in0", 0),
            UtteranceInfo::in_domain("in1", 0),
            UtteranceInfo::out_of_domain("ood0"),
        ];
        // "pose music" fixes in0 and "porse music" fixes in1, a tie that
        // greedy breaks toward the lower index. Refinement then drops the
        // supersequence, so it never recovers in1.
        let scores = vec![
            -25.0, -26.0, -20.0,
            -1.0, -30.0, -21.0,
            -30.0, -1.5, -22.0,
        ];
        let m = ScoreMatrix::from_parts(rows, 1, columns, scores).unwrap();
        let naive = greedy_search(&m, &cfg()).unwrap();
        let refined = greedy_search_refined(&m, &cfg()).unwrap();
        assert!(naive.final_selection.is_selected(1));
        assert!(naive.final_selection.is_selected(2));
        assert!(refined.final_selection.is_selected(1));
        assert!(!refined.final_selection.is_selected(2));
        assert!(refined.evaluations < naive.evaluations);
        assert_trace_invariants(&refined, &m);
    }

    #[test]
    fn subsequence_check_spans_spaces() {
        assert!(is_subsequence("pose music", "porse music"));
        assert!(!is_subsequence("porse music", "pose music"));
        assert!(is_subsequence("abc", "abc"));
        assert!(!is_subsequence("ab c", "abc"));
    }

    #[test]
    fn beam_width_one_equals_greedy() {
        for seed in 0..8 {
            let m = random_matrix(seed, 2, 6, 20, 10);
            let config = SearchConfig {
                beam_width: 1,
                ..cfg()
            };
            let greedy = greedy_search(&m, &config).unwrap();
            let beam = beam_search(&m, &config).unwrap();
            assert_eq!(
                beam.final_selection, greedy.final_selection,
                "seed {seed}"
            );
            assert_eq!(beam.evaluations, greedy.evaluations, "seed {seed}");
        }
    }

    #[test]
    fn huge_beam_finds_the_exhaustive_optimum() {
        let m = random_matrix(7, 2, 5, 16, 8);
        let config = SearchConfig {
            beam_width: 1 << 5,
            ..cfg()
        };
        let beam = beam_search(&m, &config).unwrap();
        let exhaustive = exhaustive_search(&m, &config).unwrap();
        assert_eq!(
            beam.final_result.objective,
            exhaustive.final_result.objective
        );
        assert_trace_invariants(&beam, &m);
    }

    #[test]
    fn exhaustive_dominates_heuristics() {
        for seed in 20..26 {
            let m = random_matrix(seed, 3, 7, 24, 12);
            let config = cfg();
            let best = exhaustive_search(&m, &config).unwrap();
            for trace in [
                greedy_search(&m, &config).unwrap(),
                greedy_search_refined(&m, &config).unwrap(),
                beam_search(&m, &config).unwrap(),
            ] {
                assert!(
                    best.final_result.objective <= trace.final_result.objective + 1e-12,
                    "seed {seed}"
                );
            }
        }
    }

    #[test]
    fn exhaustive_counts_and_limits() {
        let m = matrix(&[(0, true)], &[0], 1, vec![-1.0, -5.0]);
        let trace = exhaustive_search(&m, &cfg()).unwrap();
        assert_eq!(trace.evaluations, 1);

        let m = random_matrix(3, 1, EXHAUSTIVE_LIMIT + 1, 4, 4);
        assert!(matches!(
            exhaustive_search(&m, &cfg()),
            Err(CoreError::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn cem_is_bit_reproducible() {
        let m = random_matrix(11, 2, 8, 24, 12);
        let config = SearchConfig {
            cem_population: 20,
            cem_elite_fraction: 0.25,
            cem_iterations: 10,
            rng_seed: 42,
            ..cfg()
        };
        let a = cem_search(&m, &config).unwrap();
        let b = cem_search(&m, &config).unwrap();
        assert_eq!(a, b);
        assert_trace_invariants(&a, &m);
    }

    #[test]
    fn cem_originals_only_stops_after_one_iteration() {
        let m = matrix(
            &[(0, true), (1, true)],
            &[0, 1],
            2,
            vec![
                -1.0, -9.0, -8.0, -9.0,
                -9.0, -1.0, -9.0, -8.0,
            ],
        );
        let config = SearchConfig {
            cem_population: 10,
            cem_elite_fraction: 0.2,
            cem_iterations: 50,
            ..cfg()
        };
        let trace = cem_search(&m, &config).unwrap();
        assert_eq!(trace.evaluations, 10); // one iteration's population
        assert_eq!(trace.final_selection, GrammarSelection::originals(&m));
    }

    #[test]
    fn cem_respects_eval_budget() {
        let m = random_matrix(13, 2, 6, 16, 8);
        let config = SearchConfig {
            cem_population: 10,
            cem_elite_fraction: 0.2,
            cem_iterations: 50,
            eval_budget: Some(25),
            ..cfg()
        };
        let trace = cem_search(&m, &config).unwrap();
        assert_eq!(trace.evaluations, 25);
        assert_eq!(trace.early_stop, Some(EarlyStop::EvaluationBudget));
    }

    #[test]
    fn greedy_respects_eval_budget() {
        let m = random_matrix(17, 2, 10, 16, 8);
        let config = SearchConfig {
            eval_budget: Some(4),
            ..cfg()
        };
        let trace = greedy_search(&m, &config).unwrap();
        assert_eq!(trace.evaluations, 4);
        assert_eq!(trace.early_stop, Some(EarlyStop::EvaluationBudget));
    }

    #[test]
    fn searches_never_call_the_scorer() {
        let m = random_matrix(19, 2, 6, 16, 8);
        let before = crate::ctc::forward_call_count();
        let config = cfg();
        greedy_search(&m, &config).unwrap();
        greedy_search_refined(&m, &config).unwrap();
        beam_search(&m, &config).unwrap();
        cem_search(&m, &config).unwrap();
        exhaustive_search(&m, &config).unwrap();
        assert_eq!(crate::ctc::forward_call_count(), before);
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let bad = [
            SearchConfig {
                beam_width: 0,
                ..SearchConfig::default()
            },
            SearchConfig {
                cem_elite_fraction: 0.0,
                ..SearchConfig::default()
            },
            SearchConfig {
                cem_population: 1,
                ..SearchConfig::default()
            },
            SearchConfig {
                cem_elite_fraction: 0.001,
                cem_population: 10,
                ..SearchConfig::default()
            },
            SearchConfig {
                alpha: 0.0,
                ..SearchConfig::default()
            },
            SearchConfig {
                eval_budget: Some(0),
                ..SearchConfig::default()
            },
        ];
        for (i, config) in bad.iter().enumerate() {
            assert!(config.validate().is_err(), "config {i} accepted");
        }
        assert!(SearchConfig::default().validate().is_ok());
    }
}
