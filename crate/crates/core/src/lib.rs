//! Diversity-aware evaluation of generated question sets.
//!
//! Conventional sentence metrics (BLEU, ROUGE-L, METEOR-lite, exact match)
//! assume every reference is a paraphrase of the same target. When a context
//! has several genuinely different reference questions, a system that keeps
//! producing one of them scores as well as one that covers them all. The
//! [`meta`] module lifts any sentence scorer to set-level precision (`u`),
//! recall (`v`) and their harmonic mean (`F`), which separates the two.

pub mod corpus;
pub mod error;
pub mod meta;
pub mod metrics;
pub mod porter;
pub mod report;
pub mod synth;
pub mod text;

pub use error::{CorpusError, EvalError, Result};
pub use meta::{f_score, u_score, v_score, CorpusReport, EvalInstance, MetaScore, Pairing};
pub use metrics::{PairScorer, ScorerConfig};
pub use text::{pretokenized, tokenize, TokenSeq};
