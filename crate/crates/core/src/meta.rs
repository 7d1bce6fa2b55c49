//! Set-to-set meta-metrics.
//!
//! For a prediction set `P`, a reference set `R` and a sentence scorer `s`:
//!
//! * `u` (generalized precision) averages, over predictions, the best score
//!   each prediction reaches against any reference;
//! * `v` (generalized recall) averages, over references, the best score any
//!   prediction reaches against that reference;
//! * `F` is the harmonic mean of `u` and `v`.
//!
//! `s` is always called as `s(prediction, reference)`, in both directions. With
//! a binary exact-match scorer, `u`, `v` and `F` are exactly precision, recall
//! and F1 over the two sets.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::metrics::{PairScorer, ScorerConfig};
use crate::text::TokenSeq;

/// One context with its reference questions and a system's predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalInstance {
    pub context_id: String,
    pub context: String,
    pub references: Vec<TokenSeq>,
    pub predictions: Vec<TokenSeq>,
}

impl EvalInstance {
    pub fn new(
        context_id: impl Into<String>,
        context: impl Into<String>,
        references: Vec<TokenSeq>,
        predictions: Vec<TokenSeq>,
    ) -> Result<Self> {
        let inst = EvalInstance {
            context_id: context_id.into(),
            context: context.into(),
            references,
            predictions,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let check = || -> Result<()> {
            if self.references.is_empty() {
                return Err(EvalError::EmptyInput("reference set"));
            }
            if self.predictions.is_empty() {
                return Err(EvalError::EmptyInput("prediction set"));
            }
            for r in &self.references {
                r.require_non_empty("reference")?;
            }
            for p in &self.predictions {
                p.require_non_empty("prediction")?;
            }
            Ok(())
        };
        check().map_err(|e| e.in_context(&self.context_id))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaScore {
    pub u: f64,
    pub v: f64,
    pub f: f64,
}

impl MetaScore {
    pub fn from_uv(u: f64, v: f64) -> Self {
        MetaScore { u, v, f: harmonic_mean(u, v) }
    }
}

/// `2uv / (u + v)`, taken as 0 when both are 0.
pub fn harmonic_mean(u: f64, v: f64) -> f64 {
    if u + v == 0.0 {
        0.0
    } else {
        2.0 * u * v / (u + v)
    }
}

/// All `s(p, r)` values for one instance, rows indexed by prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n_pred: usize,
    n_ref: usize,
    values: Vec<f64>,
}

impl ScoreMatrix {
    pub fn compute<S: PairScorer + ?Sized>(predictions: &[TokenSeq], references: &[TokenSeq], scorer: &S) -> Result<Self> {
        if predictions.is_empty() {
            return Err(EvalError::EmptyInput("prediction set"));
        }
        if references.is_empty() {
            return Err(EvalError::EmptyInput("reference set"));
        }
        let mut values = Vec::with_capacity(predictions.len() * references.len());
        for p in predictions {
            for r in references {
                values.push(scorer.score(p, r)?);
            }
        }
        Ok(ScoreMatrix {
            n_pred: predictions.len(),
            n_ref: references.len(),
            values,
        })
    }

    pub fn get(&self, pred: usize, reference: usize) -> f64 {
        self.values[pred * self.n_ref + reference]
    }

    /// Best score of each prediction over the references.
    pub fn row_max(&self) -> Vec<f64> {
        self.values
            .chunks(self.n_ref)
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    /// Best score for each reference over the predictions.
    pub fn col_max(&self) -> Vec<f64> {
        (0..self.n_ref)
            .map(|j| (0..self.n_pred).map(|i| self.get(i, j)).fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    pub fn u(&self) -> f64 {
        mean(&self.row_max())
    }

    pub fn v(&self) -> f64 {
        mean(&self.col_max())
    }

    pub fn meta(&self) -> MetaScore {
        MetaScore::from_uv(self.u(), self.v())
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn u_score<S: PairScorer + ?Sized>(predictions: &[TokenSeq], references: &[TokenSeq], scorer: &S) -> Result<f64> {
    Ok(ScoreMatrix::compute(predictions, references, scorer)?.u())
}

pub fn v_score<S: PairScorer + ?Sized>(predictions: &[TokenSeq], references: &[TokenSeq], scorer: &S) -> Result<f64> {
    Ok(ScoreMatrix::compute(predictions, references, scorer)?.v())
}

pub fn f_score<S: PairScorer + ?Sized>(predictions: &[TokenSeq], references: &[TokenSeq], scorer: &S) -> Result<MetaScore> {
    Ok(ScoreMatrix::compute(predictions, references, scorer)?.meta())
}

/// How predictions are paired with references for the conventional column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Prediction `i` is scored against reference `i` alone; requires |P| = |R|.
    PerReference,
    /// Every prediction is scored against the whole reference set.
    MultiReference,
}

/// Conventional score of one context: a mean over its predictions.
pub fn conventional_instance(inst: &EvalInstance, scorer: &ScorerConfig, pairing: Pairing) -> Result<f64> {
    let scores = match pairing {
        Pairing::PerReference => {
            if inst.predictions.len() != inst.references.len() {
                return Err(EvalError::PairingMismatch {
                    predictions: inst.predictions.len(),
                    references: inst.references.len(),
                });
            }
            inst.predictions
                .iter()
                .zip(&inst.references)
                .map(|(p, r)| scorer.score(p, r))
                .collect::<Result<Vec<_>>>()?
        }
        Pairing::MultiReference => inst
            .predictions
            .iter()
            .map(|p| scorer.score_multi(p, &inst.references))
            .collect::<Result<Vec<_>>>()?,
    };
    if scores.is_empty() {
        return Err(EvalError::EmptyInput("prediction set"));
    }
    Ok(mean(&scores))
}

/// Macro average of the conventional per-context scores: every context
/// weighs the same regardless of how many references it has.
pub fn conventional_corpus(corpus: &[EvalInstance], scorer: &ScorerConfig, pairing: Pairing) -> Result<f64> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyInput("corpus"));
    }
    scorer.validate()?;
    let per: Vec<f64> = corpus
        .par_iter()
        .map(|inst| conventional_instance(inst, scorer, pairing).map_err(|e| e.in_context(&inst.context_id)))
        .collect::<Result<_>>()?;
    Ok(mean(&per))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextScores {
    pub conventional: f64,
    pub meta: MetaScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroScores {
    pub conventional: f64,
    pub u: f64,
    pub v: f64,
    /// Mean of the per-context F values (headline).
    pub f_macro: f64,
    /// Harmonic mean of the macro `u` and `v`.
    pub f_of_means: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub scorer: String,
    pub metric: String,
    pub pairing: Pairing,
    pub per_context: BTreeMap<String, ContextScores>,
    #[serde(rename = "macro")]
    pub macro_scores: MacroScores,
}

impl CorpusReport {
    fn from_contexts(scorer: &ScorerConfig, pairing: Pairing, per_context: BTreeMap<String, ContextScores>) -> Self {
        let n = per_context.len() as f64;
        let sum = |f: &dyn Fn(&ContextScores) -> f64| per_context.values().map(f).sum::<f64>() / n;
        let u = sum(&|c| c.meta.u);
        let v = sum(&|c| c.meta.v);
        let macro_scores = MacroScores {
            conventional: sum(&|c| c.conventional),
            u,
            v,
            f_macro: sum(&|c| c.meta.f),
            f_of_means: harmonic_mean(u, v),
        };
        CorpusReport {
            scorer: scorer.to_string(),
            metric: scorer.label().to_owned(),
            pairing,
            per_context,
            macro_scores,
        }
    }
}

/// Scores every context conventionally and with the meta-metrics, then
/// macro-averages. Per-context work runs on the current rayon pool; the result
/// does not depend on how many workers it has.
pub fn meta_corpus(corpus: &[EvalInstance], scorer: &ScorerConfig, pairing: Pairing) -> Result<CorpusReport> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyInput("corpus"));
    }
    scorer.validate()?;
    let mut seen = HashSet::new();
    for inst in corpus {
        if !seen.insert(inst.context_id.as_str()) {
            return Err(EvalError::Mismatch(format!("duplicate context_id {:?}", inst.context_id)));
        }
    }
    let scored: Vec<(String, ContextScores)> = corpus
        .par_iter()
        .map(|inst| {
            let run = || -> Result<ContextScores> {
                inst.validate()?;
                let conventional = conventional_instance(inst, scorer, pairing)?;
                let meta = ScoreMatrix::compute(&inst.predictions, &inst.references, scorer)?.meta();
                Ok(ContextScores { conventional, meta })
            };
            run()
                .map(|c| (inst.context_id.clone(), c))
                .map_err(|e| match e {
                    e @ EvalError::Context { .. } => e,
                    e => e.in_context(&inst.context_id),
                })
        })
        .collect::<Result<_>>()?;
    Ok(CorpusReport::from_contexts(scorer, pairing, scored.into_iter().collect()))
}
