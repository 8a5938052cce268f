//! Command-line entry: generate / select / pipeline / recognize / classify /
//! bench / stats / thalamo, wired over the library.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation error (bad config,
//! invalid grammar, missing credentials, precondition failures), 3 runtime
//! error.

use crate::bench::{self, RunOptions, TrialStore};
use crate::config::RunConfig;
use crate::generator::{self, GenConfig, Sentence, SentenceRecord};
use crate::grammar::{Grammar, Lexicon, Tier};
use crate::recognizer::{self, SearchBudget, Verdict};
use crate::selector;
use crate::stats;
use crate::thalamo;
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser)]
#[command(
    name = "tiergram",
    version,
    about = "Grammar-tier toolkit: generate, select, recognize, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate sentences from a bundled grammar.
    Generate(GenerateArgs),
    /// Filter sentences with the selection criteria.
    Select(SelectArgs),
    /// Generate, select, and verify until N kept sentences are collected.
    Pipeline(PipelineArgs),
    /// Decide membership of sentences under one or all grammars.
    Recognize(RecognizeArgs),
    /// Report which grammars accept each sentence.
    Classify(ClassifyArgs),
    /// Benchmark harness (run, resume, export-questionnaire).
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Statistics over a trial store.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Competitive-learning demos.
    #[command(subcommand)]
    Thalamo(ThalamoCommand),
}

#[derive(Args)]
struct GenerateArgs {
    /// cfg | ixg | csg
    #[arg(long)]
    grammar: String,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-symbol expansion cap (default: 10; csg default: 20).
    #[arg(long)]
    max_expansion: Option<u32>,
    /// Recursion depth cap (default: 100000; csg default: 10).
    #[arg(long)]
    max_depth: Option<u32>,
    /// plain (one sentence per line) or jsonl (with provenance).
    #[arg(long, default_value = "plain")]
    format: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    grammar: String,
    /// Input sentences (jsonl with provenance, or plain text to be parsed).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    grammar: String,
    #[arg(long)]
    want: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_expansion: Option<u32>,
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long, default_value = "plain")]
    format: String,
    #[arg(long)]
    out: PathBuf,
    /// Attempt budget (default: want x 20000).
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct RecognizeArgs {
    /// cfg | ixg | csg | all
    #[arg(long)]
    grammar: String,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// CSV report: sentence_id, grammar, verdict, nodes, millis.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 5_000_000)]
    max_nodes: u64,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 5_000_000)]
    max_nodes: u64,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Run every (model, sentence, trial) not yet in the store.
    Run(BenchRunArgs),
    /// Alias of run: the store makes every run resumable.
    Resume(BenchRunArgs),
    /// Emit the human questionnaire (75 sentences, 25 per grammar).
    ExportQuestionnaire(QuestionnaireArgs),
}

#[derive(Args)]
struct BenchRunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Stop after N new records (exercises resumability).
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct QuestionnaireArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_form: Option<PathBuf>,
    #[arg(long)]
    out_key: Option<PathBuf>,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Aggregate a store into stats.csv, stats_per_question.csv, report.md.
    Emit(StatsEmitArgs),
}

#[derive(Args)]
struct StatsEmitArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ThalamoCommand {
    /// Categorize a token stream and learn its category transitions.
    Demo(ThalamoDemoArgs),
}

#[derive(Args)]
struct ThalamoDemoArgs {
    /// Whitespace-separated token stream file.
    #[arg(long)]
    tokens: PathBuf,
    #[arg(long, default_value_t = 4)]
    prototypes: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Errors mapped to exit codes; the message names the failing stage.
enum CliError {
    Usage(String),
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

fn tier_of(name: &str) -> Result<Tier, CliError> {
    Tier::parse(name)
        .ok_or_else(|| CliError::Usage(format!("generate: unknown grammar `{name}` (cfg|ixg|csg)")))
}

fn io_runtime<T>(stage: &str, r: std::io::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Runtime(format!("{stage}: {e}")))
}

/// Run with explicit argv (testable); returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version as "errors" with success codes.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Select(a) => cmd_select(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Recognize(a) => cmd_recognize(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Bench(BenchCommand::Run(a)) | Command::Bench(BenchCommand::Resume(a)) => {
            cmd_bench_run(a)
        }
        Command::Bench(BenchCommand::ExportQuestionnaire(a)) => cmd_questionnaire(a),
        Command::Stats(StatsCommand::Emit(a)) => cmd_stats_emit(a),
        Command::Thalamo(ThalamoCommand::Demo(a)) => cmd_thalamo_demo(a),
    }
}

fn gen_config(tier: Tier, seed: u64, max_expansion: Option<u32>, max_depth: Option<u32>) -> GenConfig {
    let mut cfg = GenConfig::for_tier(tier, seed);
    if let Some(m) = max_expansion {
        cfg.max_expansion_per_symbol = m;
    }
    if let Some(d) = max_depth {
        cfg.max_recursion_depth = d;
    }
    cfg
}

fn write_sentences(
    g: &Grammar,
    sentences: &[Sentence],
    format: &str,
    out: &Path,
) -> Result<(), CliError> {
    let mut body = String::new();
    match format {
        "plain" => {
            for s in sentences {
                let _ = writeln!(body, "{}", s.text());
            }
        }
        "jsonl" => {
            for s in sentences {
                let rec = SentenceRecord::from_sentence(g, s);
                let _ = writeln!(
                    body,
                    "{}",
                    serde_json::to_string(&rec).expect("sentence serializes")
                );
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown format `{other}` (plain|jsonl)"
            )))
        }
    }
    io_runtime("write output", std::fs::write(out, body))
}

fn cmd_generate(a: GenerateArgs) -> Result<(), CliError> {
    let tier = tier_of(&a.grammar)?;
    let g = Grammar::load_bundled(tier);
    let mut sentences = Vec::with_capacity(a.count);
    for i in 0..a.count {
        let cfg = gen_config(tier, a.seed.wrapping_add(i as u64), a.max_expansion, a.max_depth);
        let s = generator::generate(&g, &cfg)
            .map_err(|e| CliError::Runtime(format!("generate: {e}")))?;
        sentences.push(s);
    }
    write_sentences(&g, &sentences, &a.format, &a.out)
}

fn read_sentences(g: &Grammar, path: &Path) -> Result<Vec<Sentence>, CliError> {
    let text = io_runtime("read input", std::fs::read_to_string(path))?;
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        if line.trim_start().starts_with('{') {
            let rec: SentenceRecord = serde_json::from_str(line)
                .map_err(|e| CliError::Validation(format!("parse jsonl sentence: {e}")))?;
            let s = rec
                .into_sentence(g)
                .ok_or_else(|| CliError::Validation("jsonl sentence references unknown symbols".into()))?;
            out.push(s);
        } else {
            let tokens = recognizer::tokenize(line);
            match selector::sentence_from_recognition(g, tokens, SearchBudget::default()) {
                Some(s) => out.push(s),
                None => out.push(Sentence {
                    tokens: recognizer::tokenize(line),
                    provenance: generator::Provenance {
                        grammar_id: g.id.clone(),
                        seed: 0,
                        trace: Default::default(),
                    },
                }),
            }
        }
    }
    Ok(out)
}

fn cmd_select(a: SelectArgs) -> Result<(), CliError> {
    let tier = tier_of(&a.grammar)?;
    let g = Grammar::load_bundled(tier);
    let sentences = read_sentences(&g, &a.input)?;
    let mut kept_body = String::new();
    let mut report_body = String::new();
    for s in &sentences {
        let (out, report) = selector::select(&g, s, tier);
        let _ = writeln!(
            report_body,
            "{}",
            serde_json::json!({
                "sentence": out.text(),
                "kept": report.kept,
                "reasons": report.reasons,
                "repaired": report.repaired,
            })
        );
        if report.kept {
            let _ = writeln!(kept_body, "{}", out.text());
        }
    }
    io_runtime("write kept sentences", std::fs::write(&a.out, kept_body))?;
    io_runtime("write report", std::fs::write(&a.report, report_body))
}

fn cmd_pipeline(a: PipelineArgs) -> Result<(), CliError> {
    let tier = tier_of(&a.grammar)?;
    let g = Grammar::load_bundled(tier);
    if a.want == 0 {
        return Err(CliError::Validation("pipeline: --want must be >= 1".into()));
    }
    let cfg = gen_config(tier, a.seed, a.max_expansion, a.max_depth);
    let budget = a.budget.unwrap_or(a.want as u64 * 20_000);
    let outcome = selector::batch_select(&g, &cfg, a.want, budget)
        .map_err(|e| CliError::Runtime(format!("pipeline: {e}")))?;
    // Verify every kept sentence against the recognizer before writing.
    for s in &outcome.sentences {
        let r = recognizer::recognize(&g, &s.tokens, SearchBudget::default());
        if r.verdict != Verdict::Accept {
            return Err(CliError::Runtime(format!(
                "pipeline: verification failed for `{}`",
                s.text()
            )));
        }
    }
    eprintln!(
        "pipeline: kept {} sentences in {} attempts",
        outcome.sentences.len(),
        outcome.attempts
    );
    write_sentences(&g, &outcome.sentences, &a.format, &a.out)
}

fn cmd_recognize(a: RecognizeArgs) -> Result<(), CliError> {
    let grammars: Vec<Grammar> = if a.grammar == "all" {
        Grammar::bundled_all()
    } else {
        vec![Grammar::load_bundled(tier_of(&a.grammar)?)]
    };
    let text = io_runtime("read input", std::fs::read_to_string(&a.input))?;
    let budget = SearchBudget {
        max_nodes: a.max_nodes,
        ..SearchBudget::default()
    };
    let mut body = String::from("sentence_id,grammar,verdict,nodes,millis\n");
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let tokens = recognizer::tokenize(line);
        for g in &grammars {
            let r = recognizer::recognize(g, &tokens, budget);
            let _ = writeln!(
                body,
                "{},{},{},{},{}",
                i,
                g.id,
                r.verdict,
                r.cost.nodes_explored,
                r.cost.elapsed.as_millis()
            );
        }
    }
    io_runtime("write report", std::fs::write(&a.out, body))
}

fn cmd_classify(a: ClassifyArgs) -> Result<(), CliError> {
    let grammars = Grammar::bundled_all();
    let text = io_runtime("read input", std::fs::read_to_string(&a.input))?;
    let budget = SearchBudget {
        max_nodes: a.max_nodes,
        ..SearchBudget::default()
    };
    let mut body = String::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let tokens = recognizer::tokenize(line);
        let c = recognizer::classify(&grammars, &tokens, budget);
        let _ = writeln!(
            body,
            "{}",
            serde_json::json!({
                "sentence": line,
                "accepted": c.accepted,
                "unknown": c.unknown,
            })
        );
    }
    match &a.out {
        Some(path) => io_runtime("write output", std::fs::write(path, body)),
        None => {
            print!("{body}");
            let _ = std::io::stdout().flush();
            Ok(())
        }
    }
}

fn load_config_sentences(cfg: &RunConfig) -> Result<Vec<Sentence>, CliError> {
    let grammars = Grammar::bundled_all();
    let mut out = Vec::new();
    for path in &cfg.sentences {
        // Grammar inferred from jsonl records; plain files are classified.
        let text = io_runtime("read sentences", std::fs::read_to_string(path))?;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            if line.trim_start().starts_with('{') {
                let rec: SentenceRecord = serde_json::from_str(line)
                    .map_err(|e| CliError::Validation(format!("parse jsonl sentence: {e}")))?;
                let g = grammars
                    .iter()
                    .find(|g| g.id == rec.grammar_id)
                    .ok_or_else(|| {
                        CliError::Validation(format!("unknown grammar id `{}`", rec.grammar_id))
                    })?;
                let s = rec.into_sentence(g).ok_or_else(|| {
                    CliError::Validation("jsonl sentence references unknown symbols".into())
                })?;
                out.push(s);
            } else {
                let tokens = recognizer::tokenize(line);
                let c = recognizer::classify(&grammars, &tokens, SearchBudget::default());
                let gid = c
                    .accepted
                    .iter()
                    .next()
                    .cloned()
                    .unwrap_or_else(|| "unknown".to_string());
                out.push(Sentence {
                    tokens,
                    provenance: generator::Provenance {
                        grammar_id: gid,
                        seed: 0,
                        trace: Default::default(),
                    },
                });
            }
        }
    }
    Ok(out)
}

fn cmd_bench_run(a: BenchRunArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&a.config)
        .map_err(|e| CliError::Validation(format!("bench config: {e}")))?;
    cfg.validate_for_bench()
        .map_err(|e| CliError::Validation(format!("bench config: {e}")))?;
    let sentences = load_config_sentences(&cfg)?;
    if sentences.is_empty() {
        return Err(CliError::Validation(
            "bench: no sentences configured".into(),
        ));
    }
    let mut models = Vec::new();
    for spec in &cfg.models {
        let provider = spec
            .build_provider()
            .map_err(|e| CliError::Validation(format!("bench provider: {e}")))?;
        // Pre-flight before any store mutation or network call.
        provider
            .check_credentials()
            .map_err(|e| CliError::Validation(format!("bench credentials: {e}")))?;
        models.push((spec.clone(), provider));
    }
    let mut store = TrialStore::open(&cfg.store_dir)
        .map_err(|e| CliError::Runtime(format!("bench store: {e}")))?;
    let opts = RunOptions {
        record_limit: a.limit,
        ..RunOptions::default()
    };
    let summary = bench::run_bench(&models, &sentences, &mut store, &opts)
        .map_err(|e| CliError::Runtime(format!("bench run: {e}")))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );
    Ok(())
}

fn cmd_questionnaire(a: QuestionnaireArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&a.config)
        .map_err(|e| CliError::Validation(format!("questionnaire config: {e}")))?;
    let sentences = load_config_sentences(&cfg)?;
    let (form, key) = bench::export_questionnaire(&sentences, a.seed)
        .map_err(|e| CliError::Validation(format!("questionnaire: {e}")))?;
    let form_path = a
        .out_form
        .unwrap_or_else(|| cfg.out_dir.join("questionnaire.txt"));
    let key_path = a
        .out_key
        .unwrap_or_else(|| cfg.out_dir.join("questionnaire_key.csv"));
    if let Some(dir) = form_path.parent() {
        io_runtime("create out dir", std::fs::create_dir_all(dir))?;
    }
    io_runtime("write form", std::fs::write(&form_path, form))?;
    io_runtime("write key", std::fs::write(&key_path, key))
}

fn cmd_stats_emit(a: StatsEmitArgs) -> Result<(), CliError> {
    let records = TrialStore::read_all(&a.store)
        .map_err(|e| CliError::Runtime(format!("stats store: {e}")))?;
    stats::emit_tables(&records, &a.out).map_err(|e| match e {
        stats::StatsError::EmptyStore => CliError::Validation("stats: store is empty".into()),
        other => CliError::Runtime(format!("stats: {other}")),
    })
}

fn cmd_thalamo_demo(a: ThalamoDemoArgs) -> Result<(), CliError> {
    let text = io_runtime("read tokens", std::fs::read_to_string(&a.tokens))?;
    let tokens: Vec<String> = text.split_whitespace().map(|s| s.to_string()).collect();
    let opts = thalamo::DemoOptions {
        prototypes: a.prototypes,
        learning_rate: a.lr,
        epochs: a.epochs,
        seed: a.seed,
        embedding_dim: 16,
    };
    let embeddings = thalamo::random_embeddings(&tokens, opts.embedding_dim, a.seed);
    let demo = thalamo::nested_demo(&tokens, &embeddings, &opts)
        .map_err(|e| CliError::Validation(format!("thalamo demo: {e}")))?;
    io_runtime(
        "write report",
        std::fs::write(&a.out, thalamo::render_demo_report(&demo)),
    )
}

/// Load a grammar for callers overriding the bundled documents.
#[allow(dead_code)]
fn load_grammar_override(path: &Path, lexicon: Arc<Lexicon>) -> Result<Grammar, CliError> {
    let text = io_runtime("read grammar", std::fs::read_to_string(path))?;
    Grammar::load(&text, lexicon).map_err(|e| CliError::Validation(format!("grammar: {e}")))
}
