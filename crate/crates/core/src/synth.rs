//! Deterministic stand-in "systems" that produce predictions directly from a
//! context's references. They reproduce the failure modes of conventional
//! scoring (collapse onto one reference, spliced in-between questions) with no
//! trained model involved.

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::meta::{meta_corpus, EvalInstance, MetaScore, Pairing};
use crate::metrics::ScorerConfig;
use crate::text::TokenSeq;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemKind {
    /// Always answers with the first reference.
    CopyFirst,
    /// Cycles through the references starting at `seed_offset`.
    RoundRobin { seed_offset: usize },
    /// Head of one reference glued to the tail of another.
    Splice { cut_a: f64, cut_b: f64 },
    /// The first reference, `n` times.
    DuplicateN { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    #[serde(flatten)]
    pub kind: SystemKind,
    /// Outputs per context (ignored by `DuplicateN`, which emits `n`).
    pub outputs: usize,
}

impl SystemSpec {
    pub fn new(kind: SystemKind, outputs: usize) -> Self {
        SystemSpec { kind, outputs }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            SystemKind::CopyFirst => "copy_first".into(),
            SystemKind::RoundRobin { seed_offset } => format!("round_robin(offset={seed_offset})"),
            SystemKind::Splice { cut_a, cut_b } => format!("splice({cut_a},{cut_b})"),
            SystemKind::DuplicateN { n } => format!("duplicate_n({n})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.outputs == 0 {
            return Err(EvalError::InvalidConfig("outputs per context must be >= 1".into()));
        }
        match self.kind {
            SystemKind::Splice { cut_a, cut_b } => {
                for c in [cut_a, cut_b] {
                    if !(c > 0.0 && c < 1.0) {
                        return Err(EvalError::InvalidConfig(format!("splice cut {c} must lie in (0, 1)")));
                    }
                }
                Ok(())
            }
            SystemKind::DuplicateN { n: 0 } => Err(EvalError::InvalidConfig("duplicate_n needs n >= 1".into())),
            _ => Ok(()),
        }
    }
}

/// Token index `floor(len * frac)`, tolerant of representation error in
/// fractions such as 1/3.
fn cut_index(len: usize, frac: f64) -> usize {
    ((len as f64 * frac) + 1e-9).floor() as usize
}

/// Prefix of `head` up to `cut_a` followed by the suffix of `tail` from `cut_b`.
pub fn splice(head: &TokenSeq, tail: &TokenSeq, cut_a: f64, cut_b: f64) -> TokenSeq {
    let a = cut_index(head.len(), cut_a).min(head.len());
    let b = cut_index(tail.len(), cut_b).min(tail.len());
    TokenSeq::from_tokens(head.tokens()[..a].iter().chain(&tail.tokens()[b..]))
}

pub fn generate(spec: &SystemSpec, references: &[TokenSeq]) -> Result<Vec<TokenSeq>> {
    spec.validate()?;
    if references.is_empty() {
        return Err(EvalError::EmptyInput("reference set"));
    }
    let n = references.len();
    let k = spec.outputs;
    Ok(match spec.kind {
        SystemKind::CopyFirst => vec![references[0].clone(); k],
        SystemKind::RoundRobin { seed_offset } => (0..k).map(|t| references[(seed_offset + t) % n].clone()).collect(),
        SystemKind::Splice { cut_a, cut_b } => {
            if n < 2 {
                return Err(EvalError::InvalidConfig("splice needs at least 2 references".into()));
            }
            // output t: head of reference t+1, tail of reference t
            (0..k)
                .map(|t| splice(&references[(t + 1) % n], &references[t % n], cut_a, cut_b))
                .collect()
        }
        SystemKind::DuplicateN { n: copies } => vec![references[0].clone(); copies],
    })
}

/// Replaces every instance's predictions with the output of `spec`.
pub fn synthesize(corpus: &[EvalInstance], spec: &SystemSpec) -> Result<Vec<EvalInstance>> {
    corpus
        .iter()
        .map(|inst| {
            let predictions = generate(spec, &inst.references).map_err(|e| e.in_context(&inst.context_id))?;
            Ok(EvalInstance {
                predictions,
                ..inst.clone()
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathologyRow {
    pub system: String,
    /// Macro multi-reference conventional score.
    pub conventional: f64,
    /// Macro u, v and mean per-context F.
    pub meta: MetaScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathologyCheck {
    pub conventional_gap: f64,
    pub v_gap: f64,
    pub f_gap: f64,
    /// Conventional scores tie while round robin strictly wins on v and F.
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathologyReport {
    pub scorer: String,
    pub rows: Vec<PathologyRow>,
    /// Present when both a copy_first and a round_robin system were run.
    pub check: Option<PathologyCheck>,
}

/// Tolerance for the conventional tie between copy_first and round_robin.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub fn pathology_report(corpus: &[EvalInstance], specs: &[SystemSpec], scorer: &ScorerConfig) -> Result<PathologyReport> {
    for inst in corpus {
        if inst.references.len() < 2 {
            return Err(EvalError::InvalidConfig(format!(
                "context {} has fewer than 2 references",
                inst.context_id
            )));
        }
    }
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let system = synthesize(corpus, spec)?;
        let rep = meta_corpus(&system, scorer, Pairing::MultiReference)?;
        let m = &rep.macro_scores;
        rows.push(PathologyRow {
            system: spec.name(),
            conventional: m.conventional,
            meta: MetaScore { u: m.u, v: m.v, f: m.f_macro },
        });
    }
    let find = |pred: fn(&SystemKind) -> bool| specs.iter().position(|s| pred(&s.kind)).map(|i| &rows[i]);
    let copy = find(|k| matches!(k, SystemKind::CopyFirst));
    let rr = find(|k| matches!(k, SystemKind::RoundRobin { .. }));
    let check = copy.zip(rr).map(|(c, r)| {
        let conventional_gap = r.conventional - c.conventional;
        let v_gap = r.meta.v - c.meta.v;
        let f_gap = r.meta.f - c.meta.f;
        PathologyCheck {
            conventional_gap,
            v_gap,
            f_gap,
            separated: conventional_gap.abs() < TIE_TOLERANCE && v_gap > 0.0 && f_gap > 0.0,
        }
    });
    Ok(PathologyReport {
        scorer: scorer.to_string(),
        rows,
        check,
    })
}
