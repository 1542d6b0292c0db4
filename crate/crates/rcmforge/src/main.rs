//! Batch front end: validate requirement files, compile them to temporal
//! logic, and evaluate template-approach coverage.
//!
//! Exit codes: 0 success, 1 validation/transformation failures, 2 usage or
//! I/O errors. Partial transformation results are valid outputs and exit 0.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rcm::canon::load_canonical;
use rcm::coverage::{builtin_approaches, coverage_matrix, parse_registry, Approach};
use rcm::frames::{FrameDatabase, SemanticTemplate};
use rcm::model::{PrimitiveRequirement, Requirement};
use rcm::parser::parse_requirements;
use rcm::tl::{render_top, RenderOptions};
use rcm::transform::{transform_with, Completeness, Target, TransformOptions};
use rcm::validate::{validate_primitive, Severity};

/// Environment variable overriding the default frame database.
const FRAMES_ENV: &str = "RCMFORGE_FRAMES";

#[derive(Parser)]
#[command(
    name = "rcmforge",
    version,
    about = "Requirement validation, temporal-logic transformation and coverage analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Mtl,
    Ctl,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Target {
        match t {
            TargetArg::Mtl => Target::Mtl,
            TargetArg::Ctl => Target::Ctl,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate requirement files.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Compile requirements into temporal-logic formulas.
    Transform {
        /// Target logics, comma separated.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "mtl,ctl")]
        to: Vec<TargetArg>,
        /// Render the existential glyph as `exists`.
        #[arg(long)]
        ascii: bool,
        /// Wrap factual rules in G / AG.
        #[arg(long)]
        wrap_factual: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Evaluate which template approaches can represent each requirement.
    Coverage {
        /// Approach registry file replacing the built-in table.
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Inspect the verb-frame database.
    Frames {
        /// Frame database file (defaults to RCMFORGE_FRAMES or the built-in
        /// set).
        #[arg(long)]
        db: Option<PathBuf>,
        #[command(subcommand)]
        action: FramesAction,
    },
}

#[derive(Subcommand)]
enum FramesAction {
    /// Print every frame as lemma/arity, format and template.
    List,
    /// Parse the database and report its size.
    Check,
}

/// Outcome accumulator mapping onto the exit codes.
#[derive(Default)]
struct Outcome {
    failures: bool,
    io_errors: bool,
}

impl Outcome {
    fn code(&self) -> ExitCode {
        if self.io_errors {
            ExitCode::from(2)
        } else if self.failures {
            ExitCode::from(1)
        } else {
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => outcome.code(),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, String> {
    match cli.command {
        Command::Validate { files } => Ok(cmd_validate(&files)),
        Command::Transform {
            to,
            ascii,
            wrap_factual,
            files,
        } => {
            let targets: Vec<Target> = to.into_iter().map(Target::from).collect();
            Ok(cmd_transform(&files, &targets, ascii, wrap_factual))
        }
        Command::Coverage {
            registry,
            format,
            files,
        } => cmd_coverage(&files, registry.as_deref(), format),
        Command::Frames { db, action } => cmd_frames(db.as_deref(), action),
    }
}

/// Resolves the frame database: explicit flag, then environment override,
/// then the built-in seed.
fn frame_db(flag: Option<&Path>) -> Result<FrameDatabase, String> {
    let path = flag
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(FRAMES_ENV).map(PathBuf::from));
    match path {
        None => Ok(FrameDatabase::builtin()),
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| format!("cannot read frame database {}: {e}", path.display()))?;
            FrameDatabase::parse(&text, &path.display().to_string()).map_err(|e| e.to_string())
        }
    }
}

/// Loads one input file: canonical JSON for `.json`, the requirement DSL
/// otherwise.
fn load_file(path: &Path, db: &FrameDatabase) -> Result<Vec<Requirement>, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(e.to_string()))?;
    if path.extension().is_some_and(|e| e == "json") {
        load_canonical(&text)
            .map(|r| vec![r])
            .map_err(|e| LoadError::Data(e.to_string()))
    } else {
        parse_requirements(&text, db).map_err(|e| LoadError::Data(e.to_string()))
    }
}

enum LoadError {
    Io(String),
    Data(String),
}

fn cmd_validate(files: &[PathBuf]) -> Outcome {
    let mut outcome = Outcome::default();
    let db = match frame_db(None) {
        Ok(db) => db,
        Err(e) => {
            eprintln!("error: {e}");
            outcome.io_errors = true;
            return outcome;
        }
    };

    for path in files {
        let reqs = match load_file(path, &db) {
            Ok(reqs) => reqs,
            Err(LoadError::Io(e)) => {
                println!("{}: error: {e}", path.display());
                outcome.io_errors = true;
                continue;
            }
            Err(LoadError::Data(e)) => {
                println!("{}: error: {e}", path.display());
                outcome.failures = true;
                continue;
            }
        };
        for req in &reqs {
            for (i, pr) in req.primitives.iter().enumerate() {
                let report = validate_primitive(pr);
                let verdict = if report.passed() { "Pass" } else { "Fail" };
                println!("{}: {}[{i}]: {verdict}", path.display(), req.id);
                for issue in &report.issues {
                    let tag = match issue.severity {
                        Severity::Fail => "fail",
                        Severity::Note => "note",
                    };
                    println!("  [{tag}] {} at {}: {}", issue.code, issue.path, issue.message);
                }
                if !report.passed() {
                    outcome.failures = true;
                }
            }
        }
    }
    outcome
}

fn cmd_transform(files: &[PathBuf], targets: &[Target], ascii: bool, wrap_factual: bool) -> Outcome {
    let mut outcome = Outcome::default();
    let db = match frame_db(None) {
        Ok(db) => db,
        Err(e) => {
            eprintln!("error: {e}");
            outcome.io_errors = true;
            return outcome;
        }
    };
    let render_opts = RenderOptions { ascii };
    let transform_opts = TransformOptions { wrap_factual };

    for path in files {
        let reqs = match load_file(path, &db) {
            Ok(reqs) => reqs,
            Err(LoadError::Io(e)) => {
                println!("{}: error: {e}", path.display());
                outcome.io_errors = true;
                continue;
            }
            Err(LoadError::Data(e)) => {
                println!("{}: error: {e}", path.display());
                outcome.failures = true;
                continue;
            }
        };
        for req in &reqs {
            for (i, pr) in req.primitives.iter().enumerate() {
                for &target in targets {
                    println!("== {}[{i}] :: {target}", req.id);
                    match transform_with(pr, target, transform_opts) {
                        Ok(result) => {
                            let completeness = match result.completeness {
                                Completeness::Full => "Full",
                                Completeness::Partial => "Partial",
                            };
                            println!("completeness: {completeness}");
                            if result.dropped.is_empty() {
                                println!("dropped: -");
                            } else {
                                let entries: Vec<String> = result
                                    .dropped
                                    .iter()
                                    .map(|d| {
                                        format!("{} (rule {}): {}", d.property, d.rule, d.reason)
                                    })
                                    .collect();
                                println!("dropped: {}", entries.join("; "));
                            }
                            println!("formula: {}", render_top(&result.formula, render_opts));
                        }
                        Err(e) => {
                            println!("error: {e}");
                            outcome.failures = true;
                        }
                    }
                    println!();
                }
            }
        }
    }
    outcome
}

fn cmd_coverage(
    files: &[PathBuf],
    registry: Option<&Path>,
    format: OutputFormat,
) -> Result<Outcome, String> {
    let mut outcome = Outcome::default();
    let db = frame_db(None)?;

    let approaches: Vec<Approach> = match registry {
        None => builtin_approaches(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read registry {}: {e}", path.display()))?;
            parse_registry(&text, &path.display().to_string()).map_err(|e| e.to_string())?
        }
    };

    let mut corpus: Vec<(String, PrimitiveRequirement)> = Vec::new();
    for path in files {
        match load_file(path, &db) {
            Ok(reqs) => {
                for req in reqs {
                    for (i, pr) in req.primitives.into_iter().enumerate() {
                        corpus.push((format!("{}[{i}]", req.id), pr));
                    }
                }
            }
            Err(LoadError::Io(e)) => {
                println!("{}: error: {e}", path.display());
                outcome.io_errors = true;
            }
            Err(LoadError::Data(e)) => {
                println!("{}: error: {e}", path.display());
                outcome.failures = true;
            }
        }
    }
    if corpus.is_empty() {
        return Err("empty corpus".to_string());
    }

    let stats = coverage_matrix(&corpus, &approaches).map_err(|e| e.to_string())?;

    match format {
        OutputFormat::Text => print_text_report(&stats),
        OutputFormat::Csv => print_csv_matrix(&stats),
    }
    Ok(outcome)
}

fn print_text_report(stats: &rcm::coverage::CoverageStats) {
    let total = stats.total();
    println!(
        "Coverage report: {} requirements ({} excluded)",
        total,
        stats.excluded.len()
    );
    println!();
    println!(
        "{:<6} {:<32} {:>9} {:>11}",
        "code", "approach", "covered", "percentage"
    );
    for row in &stats.coverage {
        println!(
            "{:<6} {:<32} {:>5}/{:<3} {:>10.1}%",
            row.code,
            row.name,
            row.covered,
            total,
            row.percentage(total)
        );
    }
    println!();
    println!(
        "Uncovered by any approach ({}):",
        stats.uncovered_by_all.len()
    );
    for id in &stats.uncovered_by_all {
        println!("  {id}");
    }
    println!();
    println!("Property frequencies:");
    for (code, count) in &stats.property_frequency {
        println!(
            "  {:<7} {:>4}  {:>5.1}%",
            code.to_string(),
            count,
            *count as f64 * 100.0 / total as f64
        );
    }
    println!();
    println!("Properties-count histogram:");
    for (size, count) in &stats.histogram {
        println!(
            "  {size}: {count} ({:.1}%)",
            *count as f64 * 100.0 / total as f64
        );
    }
    if !stats.excluded.is_empty() {
        println!();
        println!("Excluded (validation failures):");
        for (id, reason) in &stats.excluded {
            println!("  {id}: {reason}");
        }
    }
}

fn print_csv_matrix(stats: &rcm::coverage::CoverageStats) {
    let total = stats.total();
    let header: Vec<String> = std::iter::once("id".to_string())
        .chain(stats.coverage.iter().map(|c| c.code.clone()))
        .collect();
    println!("{}", header.join(","));
    for (i, (id, _)) in stats.items.iter().enumerate() {
        let row: Vec<String> = std::iter::once(id.clone())
            .chain(
                stats
                    .coverage
                    .iter()
                    .map(|c| if c.flags[i] { "1" } else { "0" }.to_string()),
            )
            .collect();
        println!("{}", row.join(","));
    }
    let covered: Vec<String> = std::iter::once("covered".to_string())
        .chain(stats.coverage.iter().map(|c| c.covered.to_string()))
        .collect();
    println!("{}", covered.join(","));
    let pct: Vec<String> = std::iter::once("percentage".to_string())
        .chain(
            stats
                .coverage
                .iter()
                .map(|c| format!("{:.1}", c.percentage(total))),
        )
        .collect();
    println!("{}", pct.join(","));
}

fn cmd_frames(db_path: Option<&Path>, action: FramesAction) -> Result<Outcome, String> {
    let db = frame_db(db_path)?;
    match action {
        FramesAction::List => {
            for frame in db.frames() {
                let (format, template) = describe_template(&frame.template);
                println!("{}\t{format}\t{template}", frame.signature);
            }
        }
        FramesAction::Check => {
            println!("{} frames ok", db.len());
        }
    }
    Ok(Outcome::default())
}

fn describe_template(template: &SemanticTemplate) -> (&'static str, String) {
    match template {
        SemanticTemplate::Process { name, args } => {
            let placeholders: Vec<String> = args.iter().map(|n| format!("${n}")).collect();
            ("process", format!("{name}({})", placeholders.join(", ")))
        }
        SemanticTemplate::Relational { lhs, op, rhs } => {
            ("relational", format!("${lhs} {} ${rhs}", op.symbol()))
        }
    }
}
