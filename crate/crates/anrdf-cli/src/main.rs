use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use anrdf::anql::results::{sort_rows, to_json, to_tsv};
use anrdf::compound::checks::compound_suite;
use anrdf::domain::axioms::axiom_suite;
use anrdf::graph::DEFAULT_MAX_FIRINGS;
use anrdf::syntax::{declared_domain, parse_document, serialize_dataset, Document};
use anrdf::{evaluate_dataset, parse_query, DefaultMode, DefaultRewrite, Domain, DomainError, GraphError};

#[derive(Parser)]
#[command(name = "anrdf", version, about = "Annotated RDF closure, AnQL queries and domain checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Annotation domain id, e.g. temporal, fuzzy:product, compound(temporal,provenance).
    /// Overrides the @domain header of the input.
    #[arg(long, global = true)]
    domain: Option<String>,
    /// How plain statements are annotated.
    #[arg(long, global = true, value_enum, default_value_t = DefaultArg::Top)]
    default_annotation: DefaultArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Seed for the property suites of check-domain.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Maximum number of rule firings during closure.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_FIRINGS)]
    max_iterations: usize,
    /// Labels given to unannotated query triple patterns.
    #[arg(long, global = true, value_enum, default_value_t = RewriteArg::FreshVars)]
    rewrite_defaults: RewriteArg,
    /// Input document (standard input when absent or `-`).
    #[arg(short, long, global = true)]
    input: Option<PathBuf>,
    /// Output file (standard output when absent or `-`).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Writes the closure of the input document.
    Infer,
    /// Closes the input document and evaluates a query over it.
    Query {
        /// Path of the .anql query.
        query: PathBuf,
    },
    /// Checks the domain axioms (and, for compound domains, the normal-form properties).
    CheckDomain {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Prints the canonical form of an annotation literal.
    NormalizeAnnotation { literal: String },
    /// Rewrites the input document in canonical form.
    Convert,
}

#[derive(Clone, Copy, ValueEnum)]
enum DefaultArg {
    Top,
    /// Same as segregate: a ⊥ default never combines with annotated data.
    Bottom,
    Segregate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RewriteArg {
    SharedVar,
    FreshVars,
    Top,
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn parse(context: &str, e: impl std::fmt::Display) -> Failure {
        Failure::new(2, format!("{context}:{e}"))
    }
}

impl From<DomainError> for Failure {
    fn from(e: DomainError) -> Failure {
        let code = match e {
            DomainError::NonLattice(_) => 4,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Failure {
        match e {
            GraphError::IterationCap(_) => Failure::new(3, e.to_string()),
            GraphError::Domain(d) => d.into(),
            GraphError::Predicate(_) => Failure::new(2, e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::new(1, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("anrdf: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Infer => {
            let (doc, _) = load(cli)?;
            let prefixes = doc.prefixes.clone();
            let closed = doc.into_dataset(mode(cli))?.closure(cli.max_iterations)?;
            write_output(cli, &serialize_dataset(&closed, &prefixes))?;
        }
        Command::Query { query } => {
            let (doc, _) = load(cli)?;
            let domain = doc.domain.clone();
            let text = fs::read_to_string(query)
                .map_err(|e| Failure::new(1, format!("{}: {e}", query.display())))?;
            let q = parse_query(&text, &domain, rewrite(cli))
                .map_err(|e| Failure::parse(&query.display().to_string(), e))?;
            let closed = doc.into_dataset(mode(cli))?.closure(cli.max_iterations)?;
            let mut answers = evaluate_dataset(&closed, &q);
            for d in &answers.diagnostics {
                eprintln!("warning: {d}");
            }
            if !q.has_order() {
                sort_rows(&mut answers);
            }
            let out = match cli.format {
                Format::Tsv => to_tsv(&answers),
                Format::Json => to_json(&answers, &domain),
            };
            write_output(cli, &out)?;
        }
        Command::CheckDomain { samples } => {
            let id = cli
                .domain
                .as_deref()
                .ok_or_else(|| Failure::new(2, "check-domain needs --domain"))?;
            let domain = Domain::from_id(id)?;
            let mut out = format!("domain {}\n", domain.id());
            let report = axiom_suite(&domain, *samples, cli.seed);
            let mut passed = report.all_passed();
            out.push_str(&report.to_string());
            if let Domain::Compound(c) = &domain {
                let report = compound_suite(c.as_ref(), cli.seed);
                passed &= report.all_passed();
                out.push_str(&report.to_string());
            }
            out.push_str(if passed { "result: pass\n" } else { "result: FAIL\n" });
            write_output(cli, &out)?;
            return Ok(if passed { 0 } else { 1 });
        }
        Command::NormalizeAnnotation { literal } => {
            let domain = match &cli.domain {
                Some(id) => Domain::from_id(id)?,
                None => Domain::Boolean,
            };
            let value = domain
                .parse_literal(literal)
                .map_err(|e| Failure::parse("annotation", e))?;
            write_output(cli, &format!("{value}\n"))?;
        }
        Command::Convert => {
            let (doc, _) = load(cli)?;
            let prefixes = doc.prefixes.clone();
            let ds = doc.into_dataset(mode(cli))?;
            write_output(cli, &serialize_dataset(&ds, &prefixes))?;
        }
    }
    Ok(0)
}

fn mode(cli: &Cli) -> DefaultMode {
    match cli.default_annotation {
        DefaultArg::Top => DefaultMode::Top,
        DefaultArg::Bottom | DefaultArg::Segregate => DefaultMode::Segregate,
    }
}

fn rewrite(cli: &Cli) -> DefaultRewrite {
    match cli.rewrite_defaults {
        RewriteArg::SharedVar => DefaultRewrite::SharedVar,
        RewriteArg::FreshVars => DefaultRewrite::FreshVars,
        RewriteArg::Top => DefaultRewrite::Top,
    }
}

/// Reads and parses the input document, resolving the domain first so that a
/// bad domain id gets its own exit code.
fn load(cli: &Cli) -> Result<(Document, String), Failure> {
    let (text, name) = match cli.input.as_deref() {
        Some(p) if p.as_os_str() != "-" => (
            fs::read_to_string(p).map_err(|e| Failure::new(1, format!("{}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            (s, "<stdin>".to_string())
        }
    };
    let id = cli.domain.clone().or_else(|| declared_domain(&text));
    let domain = id.as_deref().map(Domain::from_id).transpose()?;
    let doc = parse_document(&text, domain.as_ref(), &graph_id(&name))
        .map_err(|e| Failure::parse(&name, e))?;
    Ok((doc, name))
}

/// Skolem scope for blank nodes: the input file stem.
fn graph_id(name: &str) -> String {
    let stem = std::path::Path::new(name)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("g");
    let clean: String = stem
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '-')
        .collect();
    if clean.is_empty() { "g".into() } else { clean }
}

fn write_output(cli: &Cli, text: &str) -> Result<(), Failure> {
    match cli.output.as_deref() {
        Some(p) if p.as_os_str() != "-" => fs::write(p, text)?,
        _ => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
