//! Conventional sentence scorers, usable as the base scorer of the
//! set-level metrics.

pub mod bleu;
pub mod meteor;
pub mod rouge;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::text::TokenSeq;

pub use bleu::{corpus_bleu, sentence_bleu, BleuConfig, Smoothing};
pub use meteor::{meteor_lite, AlignStrategy, MatchStage, MeteorConfig};
pub use rouge::{rouge_l, RougeConfig};

/// 1 if the two sequences are identical, else 0.
pub fn exact_match(candidate: &TokenSeq, reference: &TokenSeq) -> f64 {
    if candidate == reference {
        1.0
    } else {
        0.0
    }
}

/// A sentence-pair scorer `s(prediction, reference)`. Argument order matters:
/// scorers are not assumed symmetric.
pub trait PairScorer: Sync {
    fn score(&self, prediction: &TokenSeq, reference: &TokenSeq) -> Result<f64>;
}

impl<F> PairScorer for F
where
    F: Fn(&TokenSeq, &TokenSeq) -> Result<f64> + Sync,
{
    fn score(&self, prediction: &TokenSeq, reference: &TokenSeq) -> Result<f64> {
        self(prediction, reference)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScorerConfig {
    Bleu(BleuConfig),
    RougeL(RougeConfig),
    MeteorLite(MeteorConfig),
    ExactMatch,
}

impl ScorerConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScorerConfig::Bleu(c) => c.validate(),
            ScorerConfig::RougeL(c) => c.validate(),
            ScorerConfig::MeteorLite(c) => c.validate(),
            ScorerConfig::ExactMatch => Ok(()),
        }
    }

    /// Short column name, as used in report headers (`BLEU`, `P-BLEU`, ...).
    pub fn label(&self) -> &'static str {
        match self {
            ScorerConfig::Bleu(_) => "BLEU",
            ScorerConfig::RougeL(_) => "ROUGE",
            ScorerConfig::MeteorLite(_) => "METEOR",
            ScorerConfig::ExactMatch => "EXACT",
        }
    }

    /// Conventional multi-reference score of one prediction. BLEU clips
    /// against all references jointly; the other metrics keep the best
    /// single-reference score.
    pub fn score_multi(&self, prediction: &TokenSeq, references: &[TokenSeq]) -> Result<f64> {
        if references.is_empty() {
            return Err(EvalError::EmptyInput("reference set"));
        }
        match self {
            ScorerConfig::Bleu(c) => sentence_bleu(prediction, references, c),
            ScorerConfig::RougeL(c) => rouge::rouge_l_multi(prediction, references, c),
            ScorerConfig::MeteorLite(c) => meteor::meteor_lite_multi(prediction, references, c),
            ScorerConfig::ExactMatch => Ok(references
                .iter()
                .map(|r| exact_match(prediction, r))
                .fold(0.0, f64::max)),
        }
    }
}

impl PairScorer for ScorerConfig {
    fn score(&self, prediction: &TokenSeq, reference: &TokenSeq) -> Result<f64> {
        match self {
            ScorerConfig::Bleu(c) => sentence_bleu(prediction, std::slice::from_ref(reference), c),
            ScorerConfig::RougeL(c) => rouge_l(prediction, reference, c),
            ScorerConfig::MeteorLite(c) => meteor_lite(prediction, reference, c),
            ScorerConfig::ExactMatch => Ok(exact_match(prediction, reference)),
        }
    }
}

impl fmt::Display for ScorerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScorerConfig::Bleu(c) => {
                write!(f, "bleu(max_order={}, smoothing=", c.max_order)?;
                match c.smoothing {
                    Smoothing::None => write!(f, "none)"),
                    Smoothing::Epsilon(e) => write!(f, "epsilon={e})"),
                    Smoothing::AddK(k) => write!(f, "addk={k})"),
                }
            }
            ScorerConfig::RougeL(c) => write!(f, "rouge-l(beta={})", c.beta),
            ScorerConfig::MeteorLite(c) => {
                let stages: Vec<&str> = c
                    .stages
                    .iter()
                    .map(|s| match s {
                        MatchStage::Exact => "exact",
                        MatchStage::Stem => "stem",
                    })
                    .collect();
                write!(
                    f,
                    "meteor-lite(alpha={}, gamma={}, beta={}, stages={})",
                    c.alpha,
                    c.gamma,
                    c.beta,
                    stages.join("+")
                )
            }
            ScorerConfig::ExactMatch => write!(f, "exact"),
        }
    }
}
