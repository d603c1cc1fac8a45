mod config;
mod convert;
mod inputs;
mod link;
mod serve;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Settings;

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    /// Validation errors, lint findings or merge conflicts were reported.
    Findings,
}

impl Status {
    pub fn from_findings(found: bool) -> Self {
        if found {
            Status::Findings
        } else {
            Status::Ok
        }
    }
}

/// Usage or I/O failure; exits with status 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub type CmdResult = Result<Status, CliError>;

#[derive(Debug, Parser)]
#[command(name = "syriaca", version, about = "Validate, convert, link and serve TEI work records")]
struct Cli {
    /// TOML configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Namespace bindings file (`prefix = iri` per line).
    #[arg(long, global = true)]
    namespaces: Option<PathBuf>,
    /// Machine-readable JSON-lines output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check records against the data model.
    Validate {
        /// Record files or directories (searched for *.xml).
        paths: Vec<PathBuf>,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Serialize records as N-Triples, Turtle or JSON.
    Convert {
        paths: Vec<PathBuf>,
        #[arg(long, value_enum)]
        to: convert::Format,
        /// Output directory, or output file with --merge. Defaults to stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write a single combined document.
        #[arg(long)]
        merge: bool,
    },
    /// Report relationships stored on the wrong side across a corpus.
    LintCorpus { paths: Vec<PathBuf> },
    /// Score catalogue entries against each other and an existing corpus.
    Link {
        #[arg(long = "catalogue", required = true)]
        catalogues: Vec<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster candidates under editor decisions and merge each cluster.
    ApplyDecisions {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        decisions: PathBuf,
        /// Defaults to stubs.jsonl next to the candidates file.
        #[arg(long)]
        stubs: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// First work id for new records; defaults to the corpus's next free id.
        #[arg(long)]
        first_id: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge chosen stubs into a new or existing record.
    Merge {
        #[arg(long)]
        stubs: PathBuf,
        /// Comma-separated stub ids.
        #[arg(long, value_delimiter = ',', required = true)]
        members: Vec<String>,
        /// Existing record to merge into.
        #[arg(long, conflicts_with = "uri")]
        into: Option<PathBuf>,
        /// URI for a new record.
        #[arg(long)]
        uri: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Allocate new URIs from a registry.
    Mint {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value = "work")]
        kind: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Serve the HTTP API over a registry directory.
    Serve {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Review data directory; defaults to DATA/review.
        #[arg(long)]
        review: Option<PathBuf>,
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        read_only: bool,
    },
}

fn init_logging(default: &str) {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();
}

fn run(cli: Cli) -> CmdResult {
    let settings = Settings::load(cli.config.as_deref(), cli.namespaces.as_deref())?;
    let out = inputs::Printer { json: cli.json };
    match cli.command {
        Command::Validate { paths, strict } => validate::run(&paths, strict || settings.strict, &settings, &out),
        Command::Convert { paths, to, out: dest, merge } => {
            convert::run(&paths, to, dest.as_deref(), merge, &settings, &out)
        }
        Command::LintCorpus { paths } => validate::lint(&paths, &settings, &out),
        Command::Link { catalogues, corpus, out: dest } => {
            link::link(&catalogues, corpus.as_deref(), &dest, &settings, &out)
        }
        Command::ApplyDecisions { candidates, decisions, stubs, corpus, first_id, out: dest } => link::apply(
            link::ApplyArgs {
                candidates: &candidates,
                decisions: &decisions,
                stubs: stubs.as_deref(),
                corpus: corpus.as_deref(),
                first_id,
                out: &dest,
            },
            &out,
        ),
        Command::Merge { stubs, members, into, uri, out: dest } => {
            link::merge(&stubs, &members, into.as_deref(), uri.as_deref(), dest.as_deref())
        }
        Command::Mint { data, kind, count } => serve::mint(data.or(settings.serve.data.clone()), &kind, count, &out),
        Command::Serve { data, review, host, port, read_only } => serve::serve(
            serve::ServeArgs {
                data: data.or(settings.serve.data.clone()),
                review: review.or(settings.serve.review.clone()),
                host: host.or(settings.serve.host.clone()).unwrap_or_else(|| "127.0.0.1".into()),
                port: port.or(settings.serve.port).unwrap_or(8080),
                read_only: read_only || settings.serve.read_only,
            },
            &settings,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(if matches!(cli.command, Command::Serve { .. }) { "info" } else { "warn" });
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Findings) => ExitCode::from(1),
        Err(CliError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
