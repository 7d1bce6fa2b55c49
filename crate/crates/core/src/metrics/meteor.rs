//! METEOR-lite: staged unigram alignment (exact, then Porter stem) with the
//! classic harmonic F-mean and fragmentation penalty. There is no synonym or
//! paraphrase stage.
//!
//! Alignment picks, among alignments with the largest number of matches per
//! stage (earlier stages first), one with the fewest chunks. Small problems are
//! solved exactly by branch and bound; larger ones use a positional greedy pass.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::porter::porter_stem;
use crate::text::TokenSeq;

/// Above this many matched tokens `AlignStrategy::Auto` goes greedy.
pub const EXHAUSTIVE_MATCH_LIMIT: usize = 20;

/// Search-node budget for `Auto`; the greedy alignment seeds the search, so
/// running out of budget still returns something at least as good as greedy.
const AUTO_NODE_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchStage {
    Exact,
    Stem,
}

impl MatchStage {
    fn key(self, token: &str) -> String {
        match self {
            MatchStage::Exact => token.to_owned(),
            MatchStage::Stem => porter_stem(token),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeteorConfig {
    /// Precision weight in the F-mean.
    pub alpha: f64,
    /// Maximum fragmentation penalty.
    pub gamma: f64,
    /// Exponent of the fragmentation ratio.
    pub beta: f64,
    pub stages: Vec<MatchStage>,
}

impl Default for MeteorConfig {
    fn default() -> Self {
        MeteorConfig {
            alpha: 0.9,
            gamma: 0.5,
            beta: 3.0,
            stages: vec![MatchStage::Exact, MatchStage::Stem],
        }
    }
}

impl MeteorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(EvalError::InvalidConfig(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("METEOR alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("METEOR gamma must be >= 0, got {}", self.gamma));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("METEOR beta must be positive, got {}", self.beta));
        }
        if self.stages.is_empty() {
            return bad("METEOR needs at least one matching stage".into());
        }
        for (i, s) in self.stages.iter().enumerate() {
            if self.stages[..i].contains(s) {
                return bad(format!("duplicate METEOR stage {s:?}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlignStrategy {
    /// Exhaustive up to `EXHAUSTIVE_MATCH_LIMIT` matches, greedy beyond.
    #[default]
    Auto,
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignedPair {
    pub candidate: usize,
    pub reference: usize,
    /// Index into `MeteorConfig::stages` of the stage that licensed the match.
    pub stage: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// Sorted by candidate position.
    pub pairs: Vec<AlignedPair>,
    pub chunks: usize,
}

impl Alignment {
    pub fn matches(&self) -> usize {
        self.pairs.len()
    }

    pub fn stage_counts(&self, stages: usize) -> Vec<usize> {
        let mut counts = vec![0; stages];
        for p in &self.pairs {
            counts[p.stage] += 1;
        }
        counts
    }
}

/// Counts maximal runs that are contiguous and in order on both sides.
pub fn count_chunks(pairs: &[AlignedPair]) -> usize {
    let mut chunks = 0;
    let mut prev: Option<&AlignedPair> = None;
    for p in pairs {
        let continues = prev.is_some_and(|q| q.candidate + 1 == p.candidate && q.reference + 1 == p.reference);
        if !continues {
            chunks += 1;
        }
        prev = Some(p);
    }
    chunks
}

/// Per-stage equivalence classes of every token on both sides.
struct Problem {
    n_cand: usize,
    n_ref: usize,
    n_stages: usize,
    cand_class: Vec<Vec<usize>>,
    ref_class: Vec<Vec<usize>>,
    n_classes: Vec<usize>,
    /// `label[i * n_ref + j]` is the first stage matching (i, j).
    label: Vec<Option<usize>>,
}

impl Problem {
    fn new(candidate: &TokenSeq, reference: &TokenSeq, stages: &[MatchStage]) -> Self {
        let mut cand_class = Vec::with_capacity(stages.len());
        let mut ref_class = Vec::with_capacity(stages.len());
        let mut n_classes = Vec::with_capacity(stages.len());
        for stage in stages {
            let mut ids: HashMap<String, usize> = HashMap::new();
            let mut id_of = |tok: &String| {
                let next = ids.len();
                *ids.entry(stage.key(tok)).or_insert(next)
            };
            cand_class.push(candidate.iter().map(&mut id_of).collect::<Vec<_>>());
            ref_class.push(reference.iter().map(&mut id_of).collect::<Vec<_>>());
            n_classes.push(ids.len());
        }
        let (n_cand, n_ref) = (candidate.len(), reference.len());
        let mut label = vec![None; n_cand * n_ref];
        for i in 0..n_cand {
            for j in 0..n_ref {
                label[i * n_ref + j] = (0..stages.len()).find(|&s| cand_class[s][i] == ref_class[s][j]);
            }
        }
        Problem {
            n_cand,
            n_ref,
            n_stages: stages.len(),
            cand_class,
            ref_class,
            n_classes,
            label,
        }
    }

    fn label(&self, i: usize, j: usize) -> Option<usize> {
        self.label[i * self.n_ref + j]
    }

    fn greedy(&self) -> Vec<AlignedPair> {
        let mut cand_to_ref: Vec<Option<(usize, usize)>> = vec![None; self.n_cand];
        let mut used = vec![false; self.n_ref];
        for s in 0..self.n_stages {
            for i in 0..self.n_cand {
                if cand_to_ref[i].is_some() {
                    continue;
                }
                let class = self.cand_class[s][i];
                let ok = |j: usize| !used[j] && self.ref_class[s][j] == class;
                let follow = i
                    .checked_sub(1)
                    .and_then(|p| cand_to_ref[p])
                    .map(|(pj, _)| pj + 1)
                    .filter(|&j| j < self.n_ref && ok(j));
                if let Some(j) = follow.or_else(|| (0..self.n_ref).find(|&j| ok(j))) {
                    used[j] = true;
                    cand_to_ref[i] = Some((j, s));
                }
            }
        }
        cand_to_ref
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|(j, s)| AlignedPair { candidate: i, reference: j, stage: s }))
            .collect()
    }
}

struct Search<'a> {
    prob: &'a Problem,
    target: Vec<usize>,
    /// Candidates at positions >= the current one, per stage and class.
    cand_left: Vec<Vec<usize>>,
    /// Unused references per stage and class.
    ref_left: Vec<Vec<usize>>,
    used: Vec<bool>,
    counts: Vec<usize>,
    path: Vec<AlignedPair>,
    best: Vec<AlignedPair>,
    best_chunks: usize,
    nodes: u64,
    budget: Option<u64>,
}

impl<'a> Search<'a> {
    fn new(prob: &'a Problem, seed: Vec<AlignedPair>, budget: Option<u64>) -> Self {
        let target = {
            let mut t = vec![0; prob.n_stages];
            for p in &seed {
                t[p.stage] += 1;
            }
            t
        };
        let mut cand_left: Vec<Vec<usize>> = prob.n_classes.iter().map(|&n| vec![0; n]).collect();
        let mut ref_left = cand_left.clone();
        for s in 0..prob.n_stages {
            for &c in &prob.cand_class[s] {
                cand_left[s][c] += 1;
            }
            for &c in &prob.ref_class[s] {
                ref_left[s][c] += 1;
            }
        }
        let best_chunks = count_chunks(&seed);
        Search {
            prob,
            target,
            cand_left,
            ref_left,
            used: vec![false; prob.n_ref],
            counts: vec![0; prob.n_stages],
            path: Vec::new(),
            best: seed,
            best_chunks,
            nodes: 0,
            budget,
        }
    }

    fn feasible(&self) -> bool {
        (0..self.prob.n_stages).all(|s| {
            let reachable: usize = self.cand_left[s]
                .iter()
                .zip(&self.ref_left[s])
                .map(|(a, b)| (*a).min(*b))
                .sum();
            self.counts[s] + reachable >= self.target[s]
        })
    }

    fn set_ref(&mut self, j: usize, used: bool) {
        self.used[j] = used;
        for s in 0..self.prob.n_stages {
            let c = self.prob.ref_class[s][j];
            if used {
                self.ref_left[s][c] -= 1;
            } else {
                self.ref_left[s][c] += 1;
            }
        }
    }

    fn run(&mut self, i: usize, prev_ref: Option<usize>, chunks: usize) {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            return;
        }
        if chunks >= self.best_chunks {
            return;
        }
        if self.counts == self.target {
            // nothing else may be matched, so no further chunks can open
            self.best = self.path.clone();
            self.best_chunks = chunks;
            return;
        }
        if i == self.prob.n_cand || !self.feasible() {
            return;
        }
        for s in 0..self.prob.n_stages {
            self.cand_left[s][self.prob.cand_class[s][i]] -= 1;
        }

        let cont = prev_ref.map(|p| p + 1).filter(|&j| j < self.prob.n_ref);
        let order = cont.into_iter().chain((0..self.prob.n_ref).filter(|&j| Some(j) != cont));
        for j in order {
            if self.used[j] {
                continue;
            }
            let Some(stage) = self.prob.label(i, j) else {
                continue;
            };
            if self.counts[stage] == self.target[stage] {
                continue;
            }
            let opens = usize::from(Some(j) != cont);
            self.set_ref(j, true);
            self.counts[stage] += 1;
            self.path.push(AlignedPair { candidate: i, reference: j, stage });
            self.run(i + 1, Some(j), chunks + opens);
            self.path.pop();
            self.counts[stage] -= 1;
            self.set_ref(j, false);
        }
        self.run(i + 1, None, chunks);

        for s in 0..self.prob.n_stages {
            self.cand_left[s][self.prob.cand_class[s][i]] += 1;
        }
    }
}

/// Aligns `candidate` to `reference` under `cfg.stages`.
pub fn align(candidate: &TokenSeq, reference: &TokenSeq, cfg: &MeteorConfig, strategy: AlignStrategy) -> Alignment {
    let prob = Problem::new(candidate, reference, &cfg.stages);
    let greedy = prob.greedy();
    let budget = match strategy {
        AlignStrategy::Greedy => {
            let chunks = count_chunks(&greedy);
            return Alignment { pairs: greedy, chunks };
        }
        AlignStrategy::Auto if greedy.len() > EXHAUSTIVE_MATCH_LIMIT => {
            let chunks = count_chunks(&greedy);
            return Alignment { pairs: greedy, chunks };
        }
        AlignStrategy::Auto => Some(AUTO_NODE_BUDGET),
        AlignStrategy::Exhaustive => None,
    };
    if greedy.len() <= 1 {
        let chunks = count_chunks(&greedy);
        return Alignment { pairs: greedy, chunks };
    }
    let mut search = Search::new(&prob, greedy, budget);
    search.run(0, None, 0);
    Alignment {
        chunks: search.best_chunks,
        pairs: search.best,
    }
}

/// Score from alignment statistics.
pub fn meteor_from_counts(matches: usize, chunks: usize, cand_len: usize, ref_len: usize, cfg: &MeteorConfig) -> f64 {
    if matches == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let p = m / cand_len as f64;
    let r = m / ref_len as f64;
    let fmean = p * r / (cfg.alpha * p + (1.0 - cfg.alpha) * r);
    let penalty = cfg.gamma * (chunks as f64 / m).powf(cfg.beta);
    fmean * (1.0 - penalty)
}

pub fn meteor_lite(candidate: &TokenSeq, reference: &TokenSeq, cfg: &MeteorConfig) -> Result<f64> {
    meteor_lite_with(candidate, reference, cfg, AlignStrategy::Auto)
}

pub fn meteor_lite_with(
    candidate: &TokenSeq,
    reference: &TokenSeq,
    cfg: &MeteorConfig,
    strategy: AlignStrategy,
) -> Result<f64> {
    cfg.validate()?;
    candidate.require_non_empty("candidate")?;
    reference.require_non_empty("reference")?;
    let a = align(candidate, reference, cfg, strategy);
    Ok(meteor_from_counts(a.matches(), a.chunks, candidate.len(), reference.len(), cfg))
}

/// Multi-reference METEOR-lite keeps the best single-reference score.
pub fn meteor_lite_multi(candidate: &TokenSeq, references: &[TokenSeq], cfg: &MeteorConfig) -> Result<f64> {
    if references.is_empty() {
        return Err(EvalError::EmptyInput("reference set"));
    }
    references
        .iter()
        .map(|r| meteor_lite(candidate, r, cfg))
        .try_fold(0.0f64, |best, s| s.map(|s| best.max(s)))
}
