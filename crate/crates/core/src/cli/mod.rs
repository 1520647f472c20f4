//! Command-line front end.

mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::annot::{parse_corpus, CdaDocument, ParseOptions, Warning};
use crate::segment::{segment_document, SegmentedDiscourse};

pub use render::Format;

#[derive(Debug, Parser)]
#[command(name = "centering", version, about = "Clause-based centering over CDA annotation files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print one line per third-person pronoun with its chosen referent.
    Resolve(RunArgs),
    /// Print the per-unit centering trace.
    Trace(RunArgs),
    /// Compare the salience model with the BFP baseline.
    Compare(RunArgs),
    /// Antecedent-locality histograms and chi-square summary.
    Stats(RunArgs),
    /// Check annotation files and report diagnostics only.
    Validate(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Salience,
    Bfp,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// CDA input files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Model::Salience)]
    model: Model,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Reject unknown keys instead of warning.
    #[arg(long)]
    strict: bool,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Action {
    Resolve,
    Trace,
    Compare,
    Stats,
    Validate,
}

/// A parsed and segmented input document.
pub struct Loaded {
    pub doc: CdaDocument,
    pub seg: SegmentedDiscourse,
}

struct FileResult {
    docs: Vec<Loaded>,
    warnings: Vec<Warning>,
}

fn load(path: &Path, strict: bool) -> Result<FileResult, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: cannot read: {e}", path.display()))?;
    let corpus = parse_corpus(&text, ParseOptions { strict })
        .map_err(|e| format!("{}:{}: {}", path.display(), e.line, e.kind))?;
    let mut docs = Vec::with_capacity(corpus.documents.len());
    for doc in corpus.documents {
        let seg = segment_document(&doc).map_err(|e| format!("{}: {}: {e}", path.display(), doc.id))?;
        docs.push(Loaded { doc, seg });
    }
    Ok(FileResult {
        docs,
        warnings: corpus.warnings,
    })
}

/// Runs the CLI and returns the process exit status: 0 on success, 1 on
/// usage or input errors, 2 on internal errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (action, args) = match cli.command {
        Command::Resolve(a) => (Action::Resolve, a),
        Command::Trace(a) => (Action::Trace, a),
        Command::Compare(a) => (Action::Compare, a),
        Command::Stats(a) => (Action::Stats, a),
        Command::Validate(a) => (Action::Validate, a),
    };

    let results: Vec<Result<FileResult, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = args
            .inputs
            .iter()
            .map(|path| scope.spawn(move || load(path, args.strict)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err("internal error while loading".into())))
            .collect()
    });

    let mut failed = false;
    let mut diagnostics = String::new();
    let mut loaded: Vec<(&Path, FileResult)> = Vec::new();
    for (path, result) in args.inputs.iter().zip(results) {
        match result {
            Ok(file) => {
                for w in &file.warnings {
                    diagnostics.push_str(&format!("{}:{}: warning: {}\n", path.display(), w.line, w.message));
                }
                loaded.push((path, file));
            }
            Err(msg) => {
                failed = true;
                diagnostics.push_str(&format!("error: {msg}\n"));
            }
        }
    }

    let output = match action {
        Action::Validate => render::validate(&loaded.iter().map(|(p, f)| (*p, &f.docs[..])).collect::<Vec<_>>()),
        _ => {
            let docs: Vec<&Loaded> = loaded.iter().flat_map(|(_, f)| f.docs.iter()).collect();
            let blocks: Vec<String> = std::thread::scope(|scope| {
                let handles: Vec<_> = docs
                    .iter()
                    .map(|d| {
                        scope.spawn(move || match action {
                            Action::Resolve => render::resolve(d, args.model, args.format),
                            Action::Trace => render::trace(d, args.model, args.format),
                            Action::Compare => render::compare(d, args.format),
                            _ => String::new(),
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap_or_default()).collect()
            });
            let mut out = render::header(action_name(action), args.model, args.format);
            if action == Action::Stats {
                out.push_str(&render::stats(&docs, args.format));
            } else {
                for b in blocks {
                    out.push_str(&b);
                }
            }
            out
        }
    };

    eprint!("{diagnostics}");
    let written = match &args.out {
        Some(path) => fs::write(path, output.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.as_bytes()).and_then(|_| stdout.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 2;
    }
    if failed {
        1
    } else {
        0
    }
}

fn action_name(action: Action) -> &'static str {
    match action {
        Action::Resolve => "resolve",
        Action::Trace => "trace",
        Action::Compare => "compare",
        Action::Stats => "stats",
        Action::Validate => "validate",
    }
}
