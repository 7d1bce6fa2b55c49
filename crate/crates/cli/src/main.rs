use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgeval::corpus::{load_corpus, write_corpus, LoadOptions};
use qgeval::metrics::bleu::{BleuConfig, Smoothing};
use qgeval::metrics::meteor::MeteorConfig;
use qgeval::metrics::rouge::RougeConfig;
use qgeval::report::{compare_systems, render_comparison, render_report, run_eval, Aggregation, OutputFormat, RunConfig};
use qgeval::synth::{synthesize, SystemKind, SystemSpec};
use qgeval::{EvalInstance, Pairing, ScorerConfig};

/// Diversity-aware evaluation of question generation output.
#[derive(Parser)]
#[command(name = "qgeval", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a corpus and print per-context and macro scores.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        opts: ScoreOpts,
    },
    /// Score two systems on the same references and print both with deltas (B - A).
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        opts: ScoreOpts,
    },
    /// Fill in predictions from references with a synthetic system; writes JSONL.
    Synth {
        /// JSONL corpus; its predictions, if any, are replaced.
        #[arg(long)]
        refs: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Outputs per context.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// First reference used by round-robin.
        #[arg(long, default_value_t = 0)]
        offset: usize,
        /// Splice: fraction of the head reference kept.
        #[arg(long, default_value_t = 0.5)]
        cut_a: f64,
        /// Splice: fraction of the tail reference dropped.
        #[arg(long, default_value_t = 0.5)]
        cut_b: f64,
        /// Copies emitted by duplicate.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Tokenize raw text instead of splitting on whitespace.
        #[arg(long)]
        tokenize: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    CopyFirst,
    RoundRobin,
    Splice,
    Duplicate,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Bleu,
    RougeL,
    MeteorLite,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    PerRef,
    MultiRef,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum FAggregate {
    Macro,
    OfMeans,
    Both,
}

#[derive(Args)]
struct ScoreOpts {
    #[arg(long, value_enum)]
    metric: Metric,
    /// BLEU smoothing: none, epsilon=E or addk=K.
    #[arg(long, default_value = "none", value_parser = parse_smoothing)]
    smoothing: Smoothing,
    #[arg(long, default_value_t = 1.2)]
    rouge_beta: f64,
    #[arg(long, value_enum, default_value_t = PairingArg::MultiRef)]
    pairing: PairingArg,
    /// Tokenize raw text instead of splitting on whitespace.
    #[arg(long)]
    tokenize: bool,
    /// Print table cells as percentages.
    #[arg(long)]
    percent: bool,
    #[arg(long, value_enum, default_value_t = FAggregate::Both)]
    f_aggregate: FAggregate,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    out: Format,
}

fn parse_smoothing(s: &str) -> Result<Smoothing, String> {
    let value = |v: &str| v.parse::<f64>().map_err(|e| format!("bad number {v:?}: {e}"));
    match s.split_once('=') {
        None if s == "none" => Ok(Smoothing::None),
        Some(("epsilon", v)) => Ok(Smoothing::Epsilon(value(v)?)),
        Some(("addk", v)) => Ok(Smoothing::AddK(value(v)?)),
        _ => Err(format!("expected none, epsilon=E or addk=K, got {s:?}")),
    }
}

impl ScoreOpts {
    fn run_config(&self) -> RunConfig {
        let scorer = match self.metric {
            Metric::Bleu => ScorerConfig::Bleu(BleuConfig::with_smoothing(self.smoothing)),
            Metric::RougeL => ScorerConfig::RougeL(RougeConfig { beta: self.rouge_beta }),
            Metric::MeteorLite => ScorerConfig::MeteorLite(MeteorConfig::default()),
            Metric::Exact => ScorerConfig::ExactMatch,
        };
        let mut cfg = RunConfig::new(scorer);
        cfg.pairing = match self.pairing {
            PairingArg::PerRef => Pairing::PerReference,
            PairingArg::MultiRef => Pairing::MultiReference,
        };
        cfg.aggregation = match self.f_aggregate {
            FAggregate::Macro => Aggregation { f_macro: true, f_of_means: false },
            FAggregate::OfMeans => Aggregation { f_macro: false, f_of_means: true },
            FAggregate::Both => Aggregation::default(),
        };
        cfg.pretokenized = !self.tokenize;
        cfg.percent = self.percent;
        cfg.threads = self.threads;
        cfg.format = match self.out {
            Format::Tsv => OutputFormat::Tsv,
            Format::Json => OutputFormat::Json,
            Format::Markdown => OutputFormat::Markdown,
        };
        cfg
    }
}

fn load(path: &PathBuf, pretokenized: bool, require_predictions: bool) -> Result<Vec<EvalInstance>, String> {
    load_corpus(path, LoadOptions { pretokenized, require_predictions })
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<String, String> {
    match cli.command {
        Command::Eval { corpus, opts } => {
            let cfg = opts.run_config();
            cfg.scorer.validate().map_err(|e| e.to_string())?;
            let corpus = load(&corpus, cfg.pretokenized, true)?;
            let report = run_eval(&corpus, &cfg).map_err(|e| e.to_string())?;
            Ok(render_report(&report, &cfg))
        }
        Command::Compare { a, b, opts } => {
            let cfg = opts.run_config();
            cfg.scorer.validate().map_err(|e| e.to_string())?;
            let a = load(&a, cfg.pretokenized, true)?;
            let b = load(&b, cfg.pretokenized, true)?;
            let cmp = compare_systems(&a, &b, &cfg).map_err(|e| e.to_string())?;
            Ok(render_comparison(&cmp, &cfg))
        }
        Command::Synth { refs, kind, k, offset, cut_a, cut_b, n, tokenize } => {
            let kind = match kind {
                Kind::CopyFirst => SystemKind::CopyFirst,
                Kind::RoundRobin => SystemKind::RoundRobin { seed_offset: offset },
                Kind::Splice => SystemKind::Splice { cut_a, cut_b },
                Kind::Duplicate => SystemKind::DuplicateN { n },
            };
            let spec = SystemSpec::new(kind, k);
            spec.validate().map_err(|e| e.to_string())?;
            let base = load(&refs, !tokenize, false)?;
            let corpus = synthesize(&base, &spec).map_err(|e| e.to_string())?;
            let mut buf = Vec::new();
            write_corpus(&mut buf, &corpus).map_err(|e| e.to_string())?;
            String::from_utf8(buf).map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
