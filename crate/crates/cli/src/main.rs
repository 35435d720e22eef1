//! `nesy`: check pattern libraries, compute combinations, infer refinements.
//!
//! Results go to standard output, diagnostics to standard error as
//! `file:line:col: severity: message`. Exit status is 0 on success, 1 for
//! errors in the document, 2 for I/O and catalog failures.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use nesy_core::catalog::{load_catalog, Catalog, CatalogError, Fetcher};
use nesy_core::colimit::{combine_named, materialize, CombineError};
use nesy_core::diagnostics::{Diagnostic, Position};
use nesy_core::dsl::{emit_dsl, parse, resolve, DeclKind, Library};
use nesy_core::emit::{emit_abox, emit_dot, emit_json};
use nesy_core::refinement::infer_refinement;

#[derive(Parser)]
#[command(name = "nesy", version, about = "Checker and combiner for neural-symbolic design pattern libraries")]
struct Cli {
    /// Catalog JSON mapping prefixes and ontology IRIs to local files.
    #[arg(long, global = true, env = "NESY_CATALOG")]
    catalog: Option<PathBuf>,
    /// Fetch ontologies missing from the catalog over HTTP(S).
    #[arg(long, global = true)]
    allow_fetch: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check documents: syntax, names, refinements, networks and combinations.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print a pattern, computing it first when it is defined by `combine`.
    Combine {
        file: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long, value_enum, default_value_t = Format::Dsl)]
        format: Format,
    },
    /// Infer the unique refinement between two patterns.
    Infer {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
    Dsl,
    Abox,
}

const OK: u8 = 0;
const DOCUMENT_ERROR: u8 = 1;
const ENVIRONMENT_ERROR: u8 = 2;

/// What one command produced for one file.
#[derive(Default)]
struct Report {
    stdout: String,
    stderr: Vec<String>,
    code: u8,
}

impl Report {
    fn diag(&mut self, file: &str, d: &Diagnostic) {
        self.stderr.push(d.render(file));
        if d.is_error() {
            self.fail(DOCUMENT_ERROR);
        }
    }

    fn error(&mut self, file: &str, pos: Position, message: impl Into<String>) {
        self.diag(file, &Diagnostic::error(pos, message));
    }

    fn fail(&mut self, code: u8) {
        self.code = self.code.max(code);
    }
}

fn http_fetcher() -> Fetcher {
    Arc::new(|iri: &str| {
        let mut response = ureq::get(iri).call().map_err(|e| e.to_string())?;
        response.body_mut().read_to_string().map_err(|e| e.to_string())
    })
}

fn catalog(cli: &Cli) -> Result<Catalog, CatalogError> {
    let mut catalog = match &cli.catalog {
        Some(path) => load_catalog(path)?,
        None => Catalog::builtin(),
    };
    catalog.allow_fetch |= cli.allow_fetch;
    Ok(catalog.with_fetcher(http_fetcher()))
}

/// Reads, parses and resolves `path`; reports everything that goes wrong.
fn load(path: &Path, catalog: &Catalog, report: &mut Report) -> Option<Library> {
    let file = path.display().to_string();
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            report.stderr.push(format!("{file}: error: cannot read file: {e}"));
            report.fail(ENVIRONMENT_ERROR);
            return None;
        }
    };
    let doc = match parse(&text) {
        Ok(doc) => doc,
        Err(e) => {
            report.error(&file, e.pos, e.to_string());
            return None;
        }
    };
    match resolve(&doc, catalog) {
        Ok(resolved) => {
            for w in &resolved.warnings {
                report.diag(&file, w);
            }
            Some(resolved.library)
        }
        Err(errors) => {
            for e in &errors {
                report.diag(&file, &e.to_diagnostic());
                if e.is_environmental() {
                    report.fail(ENVIRONMENT_ERROR);
                }
            }
            None
        }
    }
}

fn check(path: &Path, catalog: &Catalog) -> Report {
    let mut report = Report::default();
    let file = path.display().to_string();
    let Some(mut lib) = load(path, catalog, &mut report) else {
        return report;
    };
    let combines: Vec<String> = lib
        .order
        .iter()
        .filter(|(kind, _)| *kind == DeclKind::Combine)
        .map(|(_, name)| name.clone())
        .collect();
    for name in combines {
        if let Err(e) = materialize(&mut lib, &name) {
            report.error(&file, lib.position(&name), e.to_string());
        }
    }
    report
}

fn check_all(files: &[PathBuf], catalog: &Catalog) -> Vec<Report> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        files.par_iter().map(|f| check(f, catalog)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        files.iter().map(|f| check(f, catalog)).collect()
    }
}

/// Data clause under which the pattern `name` is written; for combinations
/// the clause of the first member pattern.
fn ontology_key(lib: &Library, name: &str) -> Option<String> {
    let mut name = name.to_string();
    for _ in 0..=lib.combine_defs.len() {
        if let Some(key) = lib.pattern_ontology.get(&name) {
            return Some(key.clone());
        }
        let net = lib.networks.get(lib.combine_defs.get(&name)?)?;
        name = net.patterns().first()?.name().to_string();
    }
    None
}

fn combine(path: &Path, pattern: &str, format: Format, catalog: &Catalog) -> Report {
    let mut report = Report::default();
    let file = path.display().to_string();
    let Some(lib) = load(path, catalog, &mut report) else {
        return report;
    };
    let pos = lib.position(pattern);
    let (value, result) = if lib.combine_defs.contains_key(pattern) {
        match combine_named(&lib, pattern) {
            Ok(result) => (Arc::new(result.pattern.clone()), Some(result)),
            Err(e) => {
                let e = match e {
                    CombineError::InPattern { source, .. } => *source,
                    e => e,
                };
                report.error(&file, pos, format!("cannot combine `{pattern}`: {e}"));
                return report;
            }
        }
    } else if let Some(p) = lib.patterns.get(pattern) {
        (p.clone(), None)
    } else {
        report.error(&file, Position::START, format!("no pattern named `{pattern}`"));
        return report;
    };

    report.stdout = match format {
        Format::Dot => emit_dot(&value),
        Format::Json => match &result {
            Some(r) => emit_json(r),
            None => emit_json(&*value),
        },
        Format::Dsl => {
            let mut single = Library::default();
            single.patterns.insert(pattern.to_string(), value.clone());
            if let Some(key) = ontology_key(&lib, pattern) {
                single.pattern_ontology.insert(pattern.to_string(), key);
            }
            single.order.push((DeclKind::Pattern, pattern.to_string()));
            emit_dsl(&single)
        }
        Format::Abox => {
            let abox = emit_abox(&value);
            for w in &abox.warnings {
                report.diag(&file, &Diagnostic::warning(pos, w.message.clone()));
            }
            abox.to_text()
        }
    };
    report
}

fn infer(path: &Path, from: &str, to: &str, catalog: &Catalog) -> Report {
    let mut report = Report::default();
    let file = path.display().to_string();
    let Some(mut lib) = load(path, catalog, &mut report) else {
        return report;
    };
    let mut get = |name: &str, report: &mut Report| {
        if lib.patterns.contains_key(name) || lib.combine_defs.contains_key(name) {
            match materialize(&mut lib, name) {
                Ok(p) => Some(p),
                Err(e) => {
                    let pos = lib.position(name);
                    report.error(&file, pos, e.to_string());
                    None
                }
            }
        } else {
            report.error(&file, Position::START, format!("no pattern named `{name}`"));
            None
        }
    };
    let (Some(src), Some(tgt)) = (get(from, &mut report), get(to, &mut report)) else {
        return report;
    };
    let pos = lib.position(from);
    match infer_refinement(format!("{from}->{to}"), src.clone(), tgt) {
        Ok(r) => {
            for n in src.nodes() {
                report.stdout.push_str(&format!("{} |-> {}\n", n.id, r.node_map()[&n.id]));
            }
        }
        Err(e) => report.error(&file, pos, e.to_string()),
    }
    report
}

fn emit(reports: &[Report]) -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    for r in reports {
        let _ = out.write_all(r.stdout.as_bytes());
        for line in &r.stderr {
            let _ = writeln!(err, "{line}");
        }
    }
    let _ = out.flush();
    ExitCode::from(reports.iter().map(|r| r.code).max().unwrap_or(OK))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let catalog = match catalog(&cli) {
        Ok(c) => c,
        Err(e) => {
            let shown = cli.catalog.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
            eprintln!("{shown}: error: {e}");
            return ExitCode::from(ENVIRONMENT_ERROR);
        }
    };
    let reports = match &cli.command {
        Command::Check { files } => check_all(files, &catalog),
        Command::Combine { file, pattern, format } => vec![combine(file, pattern, *format, &catalog)],
        Command::Infer { file, from, to } => vec![infer(file, from, to, &catalog)],
    };
    emit(&reports)
}
