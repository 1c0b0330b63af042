use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nyaya_cli::{
    corpus_stats, dedup, evaluate, exit, load_entries, load_examples, split_corpus, to_jsonl, write_jsonl, CorpusError,
    LoadError, ReportDocument, ReportError,
};
use nyaya_core::logic::{
    emit_smtlib, find_solver, parse_assignment, verify_answer, LogicProblem, SolverError, Verdict,
};
use nyaya_core::model::FallacySelector;
use nyaya_core::validator::{validate_text, RuleMode, ValidationConfig};
use nyaya_harness::{
    cross_check, emit_grammar, ClientError, EvalConfig, HttpClient, JudgeClient, ModelClient, ModelJudge, ReplayClient,
    Tier,
};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "nyaya", version, about = "Validate, score and manage six-phase Nyaya reasoning traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check trace files against the schema; exits 0 only if every file is valid.
    Validate(ValidateArgs),
    /// Generate (or replay) outputs for a problem directory and write a JSON report.
    Evaluate(EvaluateArgs),
    /// Corpus conversion and housekeeping.
    #[command(subcommand)]
    Data(DataCommand),
    /// Write the GBNF grammar for constrained decoding.
    Grammar(GrammarArgs),
    /// Check an answer against a logic problem.
    Verify(VerifyArgs),
    /// Print a saved report as a table.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FallacyArg {
    Canonical,
    Alternate,
    Either,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Args, Clone)]
struct ValidationArgs {
    /// Require "Wherever X, there Y" rather than any "wherever" clause.
    #[arg(long)]
    strict_udaharana: bool,
    #[arg(long, value_enum, default_value = "either")]
    fallacy_set: FallacyArg,
    /// Reject text before the first phase header.
    #[arg(long)]
    require_leading_samshaya: bool,
}

impl ValidationArgs {
    fn config(&self, corpus_mode: bool) -> ValidationConfig {
        ValidationConfig {
            fallacy_selector: match self.fallacy_set {
                FallacyArg::Canonical => FallacySelector::Canonical,
                FallacyArg::Alternate => FallacySelector::Alternate,
                FallacyArg::Either => FallacySelector::Either,
            },
            universal_rule: if self.strict_udaharana { RuleMode::Strict } else { RuleMode::Lenient },
            require_leading_samshaya: self.require_leading_samshaya,
            corpus_mode,
        }
    }
}

#[derive(Args)]
struct ValidateArgs {
    /// Files or directories of `.md` files.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[command(flatten)]
    validation: ValidationArgs,
    /// Also require id, problem_type and ground_truth frontmatter.
    #[arg(long)]
    corpus: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Problem documents, with optional `<id>.logic.json` beside them.
    #[arg(long)]
    corpus: PathBuf,
    /// Directory of stored outputs keyed by id.
    #[arg(long, conflicts_with = "endpoint", required_unless_present = "endpoint")]
    replay: Option<PathBuf>,
    /// Generation endpoint; falls back to MODEL_ENDPOINT.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,3")]
    tiers: Vec<u8>,
    /// A token count, or `full` for no limit.
    #[arg(long, default_value = "256")]
    max_new_tokens: String,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    #[arg(long)]
    no_format_prompt: bool,
    #[arg(long, default_value_t = 5)]
    samples: u32,
    #[arg(long, default_value_t = nyaya_core::scoring::DEFAULT_THRESHOLD)]
    threshold: f64,
    /// SMT-LIB solver for the Tier 4 cross-check.
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Directory of stored judge replies (```judge blocks) keyed by id, for Tier 2.
    #[arg(long)]
    judge_replay: Option<PathBuf>,
    /// Seconds per request or solver call.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    #[command(flatten)]
    validation: ValidationArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum DataCommand {
    /// Corpus directory to JSONL.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Deterministic train/validation split; writes train.jsonl and val.jsonl.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.8)]
        ratio: f64,
    },
    /// Drop content duplicates, keeping the first id.
    Dedup {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Counts by problem type, difficulty and flags.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
}

#[derive(Args)]
struct GrammarArgs {
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    validation: ValidationArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Logic problem JSON.
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    answer: String,
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Write the SMT-LIB scripts here.
    #[arg(long)]
    emit_smt: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    timeout: u64,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(nyaya_cli::corpus::markdown_files(p)?);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct FileVerdict {
    path: String,
    valid: bool,
    violations: Vec<ViolationOut>,
    phases: [bool; 6],
    syllogisms: usize,
    quality_score: u8,
}

#[derive(Serialize)]
struct ViolationOut {
    code: &'static str,
    message: String,
}

fn cmd_validate(args: ValidateArgs) -> Result<u8> {
    let cfg = args.validation.config(args.corpus);
    let files = expand(&args.paths)?;
    let verdicts: Vec<FileVerdict> = files
        .par_iter()
        .map(|path| {
            let text = read(path)?;
            let (_, report) = validate_text(&text, &cfg);
            Ok(FileVerdict {
                path: path.display().to_string(),
                valid: report.valid,
                violations: report
                    .violations
                    .iter()
                    .map(|v| ViolationOut { code: v.code.key(), message: v.message.clone() })
                    .collect(),
                phases: report.phase_bitmap,
                syllogisms: report.syllogism_count,
                quality_score: report.quality_score,
            })
        })
        .collect::<Result<_>>()?;
    match args.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&verdicts)?),
        OutputFormat::Text => {
            for v in &verdicts {
                if v.valid {
                    println!("{}: valid", v.path);
                } else {
                    println!("{}: invalid", v.path);
                    for x in &v.violations {
                        println!("  {}: {}", x.code, x.message);
                    }
                }
            }
        }
    }
    Ok(if verdicts.iter().all(|v| v.valid) { exit::OK } else { exit::NEGATIVE })
}

fn eval_config(args: &EvaluateArgs) -> Result<EvalConfig> {
    let tiers = args
        .tiers
        .iter()
        .map(|n| Tier::from_number(*n).with_context(|| format!("unknown tier {n}")))
        .collect::<Result<Vec<_>>>()
        .map_err(Usage)?;
    let max_new_tokens = match args.max_new_tokens.as_str() {
        "full" => None,
        n => Some(n.parse().map_err(|_| Usage(anyhow::anyhow!("--max-new-tokens takes a number or `full`")))?),
    };
    let config = EvalConfig {
        tiers,
        max_new_tokens,
        temperature: args.temperature,
        format_prompting: !args.no_format_prompt,
        samples: args.samples,
        threshold: args.threshold,
        validation: args.validation.config(false),
        solver: args.solver.clone(),
        solver_timeout: Duration::from_secs(args.timeout),
    };
    config.validate().map_err(|e| Usage(e.into()))?;
    Ok(config)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<u8> {
    let config = eval_config(&args)?;
    let examples = load_examples(&args.corpus)?;
    let timeout = Duration::from_secs(args.timeout);
    let client: Box<dyn ModelClient> = match (&args.replay, &args.endpoint) {
        (Some(dir), _) => {
            if !dir.is_dir() {
                bail!(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("{} is not a directory", dir.display())
                ));
            }
            Box::new(ReplayClient::new(dir))
        }
        (None, Some(url)) => {
            let key = std::env::var(nyaya_harness::client::API_KEY_VAR).ok().filter(|k| !k.is_empty());
            Box::new(HttpClient::new(url.clone(), key, timeout))
        }
        (None, None) => {
            Box::new(HttpClient::from_env(timeout).context("no --replay, --endpoint or MODEL_ENDPOINT").map_err(Usage)?)
        }
    };
    let judge = args.judge_replay.as_ref().map(|dir| ModelJudge { client: ReplayClient::new(dir) });
    let results = evaluate(&examples, client.as_ref(), &config, judge.as_ref().map(|j| j as &dyn JudgeClient));
    let report = ReportDocument::build(&config, &results)?;
    write(&args.out, &report.to_json())?;
    print!("{}", report.render());
    let failed = results.iter().filter(|r| r.attempts > 0 && r.errors.len() as u32 == r.attempts).count();
    if failed > 0 {
        eprintln!("{failed} example(s) produced no output; see `errors` in the report");
        return Ok(exit::EXTERNAL);
    }
    Ok(exit::OK)
}

fn cmd_data(cmd: DataCommand) -> Result<u8> {
    match cmd {
        DataCommand::Convert { input, out } => {
            let entries = to_jsonl(&input)?;
            write(&out, &write_jsonl(&entries))?;
            println!("wrote {} instance(s) to {}", entries.len(), out.display());
        }
        DataCommand::Split { input, out, seed, ratio } => {
            let entries = load_entries(&input)?;
            let (train, val) = split_corpus(&entries, ratio, seed)?;
            write(&out.join("train.jsonl"), &write_jsonl(&train))?;
            write(&out.join("val.jsonl"), &write_jsonl(&val))?;
            println!("train {} / val {} (seed {seed}, ratio {ratio})", train.len(), val.len());
        }
        DataCommand::Dedup { input, out } => {
            let entries = load_entries(&input)?;
            let (kept, dropped) = dedup(&entries);
            write(&out, &write_jsonl(&kept))?;
            for d in &dropped {
                println!("dropped {d}");
            }
            println!("kept {} / dropped {}", kept.len(), dropped.len());
        }
        DataCommand::Stats { input, format } => {
            let stats = corpus_stats(&load_entries(&input)?);
            match format {
                OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&stats)?),
                OutputFormat::Text => {
                    println!("total {}", stats.total);
                    for (k, v) in &stats.by_problem_type {
                        println!("problem_type {k} {v}");
                    }
                    for (k, v) in &stats.by_difficulty {
                        println!("difficulty {k} {v}");
                    }
                    println!("negative_example {}", stats.negative_examples);
                    println!("z3_verifiable {}", stats.z3_verifiable);
                }
            }
        }
    }
    Ok(exit::OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let problem = LogicProblem::from_json(&read(&args.problem)?)
        .with_context(|| format!("loading {}", args.problem.display()))?;
    let answer = parse_assignment(&problem, &args.answer);
    println!("answer: {answer}");
    let verdict = verify_answer(&problem, &answer)?;
    println!("verdict: {verdict}");
    if let Some(dir) = &args.emit_smt {
        let scripts = emit_smtlib(&problem, Some(&answer));
        write(&dir.join("base.smt2"), &scripts.base)?;
        for (name, s) in [("satisfies.smt2", &scripts.satisfies), ("uniqueness.smt2", &scripts.uniqueness)] {
            if let Some(s) = s {
                write(&dir.join(name), s)?;
            }
        }
    }
    if let Some(explicit) = &args.solver {
        let solver = find_solver(Some(explicit)).ok_or_else(|| SolverError::NotFound(explicit.clone()))?;
        let check = cross_check(&problem, &answer, &solver, Duration::from_secs(args.timeout));
        if let Some(e) = check.error {
            bail!(External(e));
        }
        let word = |v: Option<nyaya_core::logic::SolverVerdict>| {
            v.map_or("-".to_string(), |v| format!("{v:?}").to_lowercase())
        };
        println!("solver: satisfies {}, uniqueness {}", word(check.satisfies), word(check.uniqueness));
        if !check.agrees {
            eprintln!("solver disagrees with the oracle");
            return Ok(exit::EXTERNAL);
        }
    }
    Ok(if verdict == Verdict::UniqueAndMatches { exit::OK } else { exit::NEGATIVE })
}

/// Marks a bad flag combination found after clap has parsed.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(anyhow::Error);

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct External(String);

fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return exit::USAGE;
        }
        if cause.is::<SolverError>() || cause.is::<ClientError>() || cause.is::<External>() {
            return exit::EXTERNAL;
        }
        if let Some(CorpusError::Io { .. }) = cause.downcast_ref::<CorpusError>() {
            return exit::IO;
        }
        if let Some(LoadError::Io { .. }) = cause.downcast_ref::<LoadError>() {
            return exit::IO;
        }
        if cause.is::<CorpusError>() || cause.is::<LoadError>() || cause.is::<ReportError>() {
            return exit::INVALID_DATA;
        }
        if cause.is::<std::io::Error>() {
            return exit::IO;
        }
    }
    exit::INVALID_DATA
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(a) => cmd_validate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Data(c) => cmd_data(c),
        Command::Grammar(a) => {
            let grammar = emit_grammar(&a.validation.config(false));
            write(&a.out, &grammar).map(|_| exit::OK)
        }
        Command::Verify(a) => cmd_verify(a),
        Command::Report { input } => read(&input).and_then(|text| {
            let doc = ReportDocument::load(&text).with_context(|| format!("loading {}", input.display()))?;
            print!("{}", doc.render());
            Ok(exit::OK)
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}
