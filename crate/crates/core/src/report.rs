//! Running an evaluation over a loaded corpus and rendering the result.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};
use crate::meta::{meta_corpus, CorpusReport, EvalInstance, Pairing};
use crate::metrics::ScorerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Tsv,
    Json,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregation {
    /// Mean of per-context F.
    pub f_macro: bool,
    /// Harmonic mean of the macro P and R columns.
    pub f_of_means: bool,
}

impl Default for Aggregation {
    fn default() -> Self {
        Aggregation {
            f_macro: true,
            f_of_means: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scorer: ScorerConfig,
    pub pairing: Pairing,
    pub aggregation: Aggregation,
    pub pretokenized: bool,
    pub format: OutputFormat,
    /// Render table cells as percentages with two decimals.
    pub percent: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(scorer: ScorerConfig) -> Self {
        RunConfig {
            scorer,
            pairing: Pairing::MultiReference,
            aggregation: Aggregation::default(),
            pretokenized: true,
            format: OutputFormat::Tsv,
            percent: false,
            threads: None,
        }
    }

    fn in_pool<T: Send>(&self, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
        match self.threads {
            None => f(),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| EvalError::InvalidConfig(format!("thread pool: {e}")))?
                .install(f),
        }
    }
}

pub fn run_eval(corpus: &[EvalInstance], cfg: &RunConfig) -> Result<CorpusReport> {
    cfg.in_pool(|| meta_corpus(corpus, &cfg.scorer, cfg.pairing))
}

fn cell(x: f64, percent: bool) -> String {
    if percent {
        format!("{:.2}", x * 100.0)
    } else {
        format!("{x:.4}")
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn tsv(&self) -> String {
        let mut out = self.header.join("\t");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }

    fn markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", self.header.join(" | "));
        let _ = writeln!(
            out,
            "|{}",
            self.header
                .iter()
                .enumerate()
                .map(|(i, _)| if i == 0 { "---|" } else { "---:|" })
                .collect::<String>()
        );
        for row in &self.rows {
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
        out
    }
}

fn report_table(report: &CorpusReport, cfg: &RunConfig) -> Table {
    let m = &report.metric;
    let agg = cfg.aggregation;
    let mut header = vec!["context_id".to_owned(), m.clone(), format!("P-{m}"), format!("R-{m}")];
    if agg.f_macro {
        header.push(format!("F-{m}"));
    }
    if agg.f_of_means {
        header.push(format!("F-{m}(of-means)"));
    }
    let row = |id: &str, conv: f64, u: f64, v: f64, f_macro: f64, f_of_means: f64| {
        let mut r = vec![id.to_owned()];
        for x in [conv, u, v] {
            r.push(cell(x, cfg.percent));
        }
        if agg.f_macro {
            r.push(cell(f_macro, cfg.percent));
        }
        if agg.f_of_means {
            r.push(cell(f_of_means, cfg.percent));
        }
        r
    };
    let mut rows: Vec<Vec<String>> = report
        .per_context
        .iter()
        .map(|(id, c)| row(id, c.conventional, c.meta.u, c.meta.v, c.meta.f, c.meta.f))
        .collect();
    let mac = &report.macro_scores;
    rows.push(row("macro", mac.conventional, mac.u, mac.v, mac.f_macro, mac.f_of_means));
    Table { header, rows }
}

/// Renders a report. TSV and Markdown use 4 fixed decimals (or percentages
/// with 2 decimals); JSON always carries full precision.
pub fn render_report(report: &CorpusReport, cfg: &RunConfig) -> String {
    match cfg.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Tsv => report_table(report, cfg).tsv(),
        OutputFormat::Markdown => report_table(report, cfg).markdown(),
    }
}

pub fn parse_report_json(text: &str) -> Result<CorpusReport> {
    serde_json::from_str(text).map_err(|e| EvalError::Mismatch(format!("bad report JSON: {e}")))
}

/// Conventional, P, R and F values of one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Columns {
    pub conventional: f64,
    pub u: f64,
    pub v: f64,
    pub f: f64,
}

impl Columns {
    fn delta(&self, base: &Columns) -> Columns {
        Columns {
            conventional: self.conventional - base.conventional,
            u: self.u - base.u,
            v: self.v - base.v,
            f: self.f - base.f,
        }
    }

    fn values(&self) -> [f64; 4] {
        [self.conventional, self.u, self.v, self.f]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparedRow {
    pub a: Columns,
    pub b: Columns,
    /// `b - a`
    pub delta: Columns,
}

impl ComparedRow {
    fn new(a: Columns, b: Columns) -> Self {
        ComparedRow { delta: b.delta(&a), a, b }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub scorer: String,
    pub metric: String,
    pub per_context: BTreeMap<String, ComparedRow>,
    /// Macro row; F is the mean of per-context F.
    #[serde(rename = "macro")]
    pub macro_row: ComparedRow,
}

/// Scores two systems on the same contexts and reports paired deltas.
/// Both corpora must cover the same context ids with identical references.
pub fn compare_systems(a: &[EvalInstance], b: &[EvalInstance], cfg: &RunConfig) -> Result<Comparison> {
    let refs = |c: &[EvalInstance]| -> BTreeMap<String, Vec<crate::text::TokenSeq>> {
        c.iter().map(|i| (i.context_id.clone(), i.references.clone())).collect()
    };
    let (ra, rb) = (refs(a), refs(b));
    let ids_a: BTreeSet<&String> = ra.keys().collect();
    let ids_b: BTreeSet<&String> = rb.keys().collect();
    if ids_a != ids_b {
        let only_a: Vec<_> = ids_a.difference(&ids_b).take(5).collect();
        let only_b: Vec<_> = ids_b.difference(&ids_a).take(5).collect();
        return Err(EvalError::Mismatch(format!(
            "context_id sets differ (only in A: {only_a:?}, only in B: {only_b:?})"
        )));
    }
    for (id, refs_a) in &ra {
        if rb[id] != *refs_a {
            return Err(EvalError::Mismatch(format!("context {id:?}: references differ between systems")));
        }
    }

    let rep_a = run_eval(a, cfg)?;
    let rep_b = run_eval(b, cfg)?;
    let cols = |c: &crate::meta::ContextScores| Columns {
        conventional: c.conventional,
        u: c.meta.u,
        v: c.meta.v,
        f: c.meta.f,
    };
    let per_context = rep_a
        .per_context
        .iter()
        .map(|(id, ca)| (id.clone(), ComparedRow::new(cols(ca), cols(&rep_b.per_context[id]))))
        .collect();
    let mac = |r: &CorpusReport| Columns {
        conventional: r.macro_scores.conventional,
        u: r.macro_scores.u,
        v: r.macro_scores.v,
        f: r.macro_scores.f_macro,
    };
    Ok(Comparison {
        scorer: rep_a.scorer.clone(),
        metric: rep_a.metric.clone(),
        per_context,
        macro_row: ComparedRow::new(mac(&rep_a), mac(&rep_b)),
    })
}

pub fn render_comparison(cmp: &Comparison, cfg: &RunConfig) -> String {
    if cfg.format == OutputFormat::Json {
        let mut s = serde_json::to_string_pretty(cmp).expect("comparison serializes");
        s.push('\n');
        return s;
    }
    let m = &cmp.metric;
    let mut header = vec!["context_id".to_owned()];
    for col in [m.clone(), format!("P-{m}"), format!("R-{m}"), format!("F-{m}")] {
        header.push(format!("{col}[A]"));
        header.push(format!("{col}[B]"));
        header.push(format!("{col}[delta]"));
    }
    let row = |id: &str, r: &ComparedRow| {
        let mut out = vec![id.to_owned()];
        let (a, b, d) = (r.a.values(), r.b.values(), r.delta.values());
        for i in 0..4 {
            out.push(cell(a[i], cfg.percent));
            out.push(cell(b[i], cfg.percent));
            out.push(cell(d[i], cfg.percent));
        }
        out
    };
    let mut rows: Vec<_> = cmp.per_context.iter().map(|(id, r)| row(id, r)).collect();
    rows.push(row("macro", &cmp.macro_row));
    let table = Table { header, rows };
    match cfg.format {
        OutputFormat::Markdown => table.markdown(),
        _ => table.tsv(),
    }
}
