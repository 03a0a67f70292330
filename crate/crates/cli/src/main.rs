use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use excat_cli::instance::InstanceDocument;
use excat_cli::report::Report;
use excat_cli::{oracle, run};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "excat",
    about = "Exact-category toolkit: acyclic complexes, truncations, heart covers, \
             Fitting decompositions and idempotent splitting over vector spaces, dual \
             numbers, and bundles on rational and nodal curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "text"])]
    format: String,
    /// Expected field, e.g. `7` or `rational`; documents over a
    /// different field are rejected.
    #[arg(long, global = true)]
    field: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify acyclicity of a complex, or report the obstruction.
    CheckAcyclic { path: PathBuf },
    /// Truncation triangle of an acyclic complex at a degree.
    Truncate {
        path: PathBuf,
        /// Truncation degree; overrides the request argument if given.
        #[arg(long)]
        n: Option<i64>,
    },
    /// Heart cover of a bounded acyclic complex vanishing above zero.
    HeartCover { path: PathBuf },
    /// Invertible/nilpotent decomposition of an endomorphism.
    Fitting { path: PathBuf },
    /// Split a homotopy idempotent.
    SplitIdempotent { path: PathBuf },
    /// Derived hom dimension between two objects.
    Ext {
        path: PathBuf,
        #[arg(long)]
        n: Option<i64>,
    },
    /// Line bundle classes of a fixed degree on the document's curve.
    Pic {
        path: PathBuf,
        #[arg(long)]
        degree: Option<i64>,
    },
    /// Global sections of a bundle.
    Sections { path: PathBuf },
    /// Run a registered oracle suite.
    Oracle {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (exit, report) = match dispatch(&cli) {
        Ok(pair) => pair,
        Err(e) => (1, Report::invalid("cli", format!("{e:#}"))),
    };
    let rendered = match cli.format.as_str() {
        "text" => report.to_text(),
        _ => report.to_json(),
    };
    match &cli.out {
        Some(path) => {
            if std::fs::write(path, rendered.as_bytes()).is_err() {
                eprintln!("could not write report to {}", path.display());
                return ExitCode::from(1);
            }
        }
        None => println!("{rendered}"),
    }
    ExitCode::from(exit as u8)
}

fn load(cli: &Cli, path: &PathBuf) -> Result<InstanceDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow!("could not read {}: {e}", path.display()))?;
    let doc = InstanceDocument::parse(&text)?;
    if let Some(expected) = &cli.field {
        let field = doc.field()?;
        let matches = match (expected.as_str(), field) {
            ("rational", excat_core::field::Field::Rat) => true,
            (s, excat_core::field::Field::Fp(q)) => s.parse::<u64>() == Ok(q),
            _ => false,
        };
        if !matches {
            return Err(anyhow!("document field does not match --field {expected}"));
        }
    }
    Ok(doc)
}

fn with_arg(mut doc: InstanceDocument, key: &str, value: Option<i64>) -> InstanceDocument {
    if let Some(v) = value {
        doc.request.args.insert(key.into(), json!(v));
    }
    doc
}

fn dispatch(cli: &Cli) -> Result<(i32, Report)> {
    let outcome = match &cli.command {
        Command::CheckAcyclic { path } => run::execute("check-acyclic", &load(cli, path)?),
        Command::Truncate { path, n } => {
            let doc = with_arg(load(cli, path)?, "n", *n);
            run::execute("truncate", &doc)
        }
        Command::HeartCover { path } => run::execute("heart-cover", &load(cli, path)?),
        Command::Fitting { path } => run::execute("fitting", &load(cli, path)?),
        Command::SplitIdempotent { path } => run::execute("split-idempotent", &load(cli, path)?),
        Command::Ext { path, n } => {
            let doc = with_arg(load(cli, path)?, "n", *n);
            run::execute("ext", &doc)
        }
        Command::Pic { path, degree } => {
            let doc = with_arg(load(cli, path)?, "degree", *degree);
            run::execute("pic", &doc)
        }
        Command::Sections { path } => run::execute("sections", &load(cli, path)?),
        Command::Oracle { suite, seed } => {
            let outcome = oracle::run_suite(suite, *seed)
                .ok_or_else(|| anyhow!("unknown suite {suite:?}; known: {}", oracle::SUITES.join(", ")))?;
            let passed = outcome.passed();
            let report = Report::ok(
                "oracle",
                serde_json::to_value(&outcome).expect("suite outcome serializes"),
            );
            let exit = if passed { 0 } else { 2 };
            return Ok((exit, report));
        }
    };
    Ok((outcome.exit, outcome.report))
}
