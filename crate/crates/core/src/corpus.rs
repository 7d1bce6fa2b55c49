//! Line-delimited JSON corpus files.
//!
//! Each non-blank line holds one context:
//!
//! ```text
//! {"context_id": "q1", "context": "...", "references": ["..."], "predictions": ["..."]}
//! ```
//!
//! Lines are read one at a time. Validation problems are collected (up to
//! [`MAX_REPORTED_ERRORS`]) and reported together with their line numbers.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CorpusError, LineError};
use crate::meta::EvalInstance;
use crate::text::{pretokenized, tokenize, TokenSeq};

pub const MAX_REPORTED_ERRORS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Split on whitespace only instead of isolating punctuation.
    pub pretokenized: bool,
    /// When false, a missing `predictions` field is allowed and yields an
    /// empty prediction list (reference-only files for `synth`).
    pub require_predictions: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            pretokenized: true,
            require_predictions: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub context_id: String,
    #[serde(default)]
    pub context: String,
    pub references: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictions: Option<Vec<String>>,
}

impl From<&EvalInstance> for CorpusRecord {
    fn from(inst: &EvalInstance) -> Self {
        CorpusRecord {
            context_id: inst.context_id.clone(),
            context: inst.context.clone(),
            references: inst.references.iter().map(TokenSeq::detokenize).collect(),
            predictions: Some(inst.predictions.iter().map(TokenSeq::detokenize).collect()),
        }
    }
}

struct Collector {
    errors: Vec<LineError>,
    truncated: bool,
}

impl Collector {
    fn push(&mut self, line: Option<usize>, message: impl Into<String>) {
        if self.errors.len() < MAX_REPORTED_ERRORS {
            self.errors.push(LineError {
                line,
                message: message.into(),
            });
        } else {
            self.truncated = true;
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Vec<EvalInstance>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_corpus(BufReader::new(file), opts).map_err(|e| match e {
        CorpusError::Io { message, .. } => CorpusError::Io {
            path: path.display().to_string(),
            message,
        },
        e => e,
    })
}

pub fn read_corpus<R: BufRead>(reader: R, opts: LoadOptions) -> Result<Vec<EvalInstance>, CorpusError> {
    let tok = |s: &str| if opts.pretokenized { pretokenized(s) } else { tokenize(s) };
    let mut out = Vec::new();
    let mut first_seen: HashMap<String, usize> = HashMap::new();
    let mut bad = Collector {
        errors: Vec::new(),
        truncated: false,
    };
    let mut records = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| CorpusError::Io {
            path: "<input>".into(),
            message: format!("line {lineno}: {e}"),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        records += 1;
        let rec: CorpusRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                bad.push(Some(lineno), format!("parse error: {e}"));
                continue;
            }
        };
        let mut ok = true;
        if let Some(prev) = first_seen.get(&rec.context_id) {
            bad.push(Some(lineno), format!("duplicate context_id {:?} (first on line {prev})", rec.context_id));
            ok = false;
        } else {
            first_seen.insert(rec.context_id.clone(), lineno);
        }

        let tokenize_field = |name: &str, texts: &[String], bad: &mut Collector| -> (Vec<TokenSeq>, bool) {
            let mut clean = true;
            if texts.is_empty() {
                bad.push(Some(lineno), format!("context {:?}: {name} is empty", rec.context_id));
                clean = false;
            }
            let seqs = texts
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let seq = tok(t);
                    if seq.is_empty() {
                        bad.push(Some(lineno), format!("context {:?}: {name}[{i}] has no tokens", rec.context_id));
                        clean = false;
                    }
                    seq
                })
                .collect();
            (seqs, clean)
        };
        let (references, refs_ok) = tokenize_field("references", &rec.references, &mut bad);
        let (predictions, preds_ok) = match &rec.predictions {
            Some(p) => tokenize_field("predictions", p, &mut bad),
            None if opts.require_predictions => {
                bad.push(Some(lineno), format!("context {:?}: missing predictions", rec.context_id));
                (Vec::new(), false)
            }
            None => (Vec::new(), true),
        };
        ok &= refs_ok && preds_ok;
        if ok {
            out.push(EvalInstance {
                context_id: rec.context_id,
                context: rec.context,
                references,
                predictions,
            });
        }
    }

    if !bad.errors.is_empty() {
        return Err(CorpusError::Invalid {
            errors: bad.errors,
            truncated: bad.truncated,
        });
    }
    if records == 0 {
        return Err(CorpusError::Empty);
    }
    Ok(out)
}

pub fn write_corpus<W: Write>(mut writer: W, corpus: &[EvalInstance]) -> std::io::Result<()> {
    for inst in corpus {
        serde_json::to_writer(&mut writer, &CorpusRecord::from(inst))?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
