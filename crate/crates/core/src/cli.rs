//! The `ashacl` command line.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use oxiri::Iri;

use crate::engine::{build_report, Limits, Validator};
use crate::error::Failure;
use crate::graph::Graph;
use crate::shapes::ShapesGraph;
use crate::term::Term;
use crate::turtle::{parse, serialize, Format};
use crate::vocab::{owl, sh};

pub const EXIT_CONFORMS: i32 = 0;
pub const EXIT_NOT_CONFORMS: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Validate an RDF data graph against an ASHACL shapes graph.
#[derive(Debug, Parser)]
#[command(name = "ashacl", version)]
pub struct Args {
    /// Data graph (Turtle, or N-Triples for `.nt`).
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Shapes graph. May be omitted with --shapes-from-data.
    #[arg(long, value_name = "PATH")]
    pub shapes: Option<PathBuf>,

    /// Print `true` or `false` instead of a validation report.
    #[arg(long)]
    pub conforms: bool,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Report syntax.
    #[arg(long, value_name = "FORMAT", default_value = "turtle")]
    pub format: Format,

    /// Validate only against this shape.
    #[arg(long, value_name = "IRI")]
    pub shape: Option<String>,

    /// Validate only this term (N-Triples IRI or literal syntax); needs --shape.
    #[arg(long, value_name = "TERM", requires = "shape")]
    pub node: Option<String>,

    /// Merge graphs named by owl:imports into the data and shapes graphs.
    #[arg(long)]
    pub imports: bool,

    /// Merge graphs named by sh:shapesGraph in the data graph into the shapes graph.
    #[arg(long)]
    pub shapes_from_data: bool,

    /// Directory that imported IRIs are resolved under.
    #[arg(long, value_name = "DIR", env = "ASHACL_IMPORT_ROOT", default_value = ".")]
    pub import_root: PathBuf,

    /// IRI prefix stripped from imported IRIs before resolving under --import-root.
    #[arg(long, value_name = "IRI")]
    pub import_prefix: Option<String>,

    /// Fail when the report would hold more results than this.
    #[arg(long, value_name = "N", default_value_t = Limits::default().max_results)]
    pub max_results: usize,

    /// Fail when shape checks nest deeper than this.
    #[arg(long, value_name = "N", default_value_t = Limits::default().max_depth)]
    pub max_depth: usize,
}

enum Outcome {
    Usage(String),
    Failed(Failure),
}

impl From<Failure> for Outcome {
    fn from(f: Failure) -> Self {
        Outcome::Failed(f)
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let rendered = e.render().to_string();
            if informational {
                let _ = write!(stdout, "{rendered}");
                return EXIT_CONFORMS;
            }
            let _ = write!(stderr, "{rendered}");
            return EXIT_USAGE;
        }
    };
    match try_execute(&args, stdout) {
        Ok(code) => code,
        Err(Outcome::Usage(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            EXIT_USAGE
        }
        Err(Outcome::Failed(failure)) => {
            let _ = writeln!(stderr, "failure: {failure}");
            for line in &failure.diagnostics {
                let _ = writeln!(stderr, "  {line}");
            }
            EXIT_FAILURE
        }
    }
}

fn try_execute(args: &Args, stdout: &mut dyn Write) -> Result<i32, Outcome> {
    if args.shapes.is_none() && !args.shapes_from_data {
        return Err(Outcome::Usage("either --shapes or --shapes-from-data is required".into()));
    }
    let resolver = Resolver { root: &args.import_root, prefix: args.import_prefix.as_deref() };

    let mut data_files = BTreeSet::new();
    let mut data = load(&args.data, &mut data_files)?;
    if args.imports {
        resolve_imports(&mut data, &resolver, &mut data_files)?;
    }

    let mut shape_files = BTreeSet::new();
    let mut shapes = match &args.shapes {
        Some(path) => load(path, &mut shape_files)?,
        None => Graph::new(),
    };
    if args.shapes_from_data {
        let locations: BTreeSet<Term> =
            data.with_predicate(&Term::iri(sh::SHAPES_GRAPH)).map(|(_, o)| o.clone()).collect();
        for location in locations {
            let path = resolver.resolve(&location)?;
            if !shape_files.contains(&canonical(&path)) {
                let g = load(&path, &mut shape_files)?;
                shapes.merge(&g);
            }
        }
    }
    if args.imports {
        resolve_imports(&mut shapes, &resolver, &mut shape_files)?;
    }
    let inputs: BTreeSet<PathBuf> = data_files.union(&shape_files).cloned().collect();
    // files are parsed independently, so their blank ids overlap
    let shapes = shapes.renamed_apart_from(&data);

    if let Some(out) = &args.out {
        if is_input(out, &inputs) {
            return Err(Outcome::Usage(format!("refusing to overwrite input file {}", out.display())));
        }
    }

    let focus_shape = args.shape.as_deref().map(parse_shape_iri).transpose().map_err(Outcome::Usage)?;
    let focus_node = args.node.as_deref().map(parse_node).transpose().map_err(Outcome::Usage)?;

    let sg = ShapesGraph::new(shapes)?;
    if let Some(s) = &focus_shape {
        if sg.shape(s).is_none() {
            return Err(Outcome::Usage(format!("{s} is not a shape of the shapes graph")));
        }
    }
    let limits = Limits { max_results: args.max_results, max_depth: args.max_depth };
    let validator = Validator::new(&data, &sg, limits);

    if args.conforms && focus_shape.is_none() {
        let ok = validator.conforms()?;
        return emit(stdout, args.out.as_deref(), if ok { "true\n" } else { "false\n" }, ok);
    }
    let results = match &focus_shape {
        Some(s) => validator.validate_focus(s, focus_node.as_ref())?,
        None => validator.validate()?,
    };
    let ok = results.conforms();
    if args.conforms {
        return emit(stdout, args.out.as_deref(), if ok { "true\n" } else { "false\n" }, ok);
    }
    let report = build_report(&results);
    emit(stdout, args.out.as_deref(), &serialize(&report, args.format), ok)
}

fn emit(stdout: &mut dyn Write, out: Option<&Path>, text: &str, ok: bool) -> Result<i32, Outcome> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Outcome::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Outcome::Usage(format!("cannot write output: {e}")))?,
    }
    Ok(if ok { EXIT_CONFORMS } else { EXIT_NOT_CONFORMS })
}

fn is_input(path: &Path, inputs: &BTreeSet<PathBuf>) -> bool {
    fs::canonicalize(path).is_ok_and(|p| inputs.contains(&p))
}

fn canonical(path: &Path) -> PathBuf {
    fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf())
}

/// Reads and parses `path`, recording it in `loaded`.
fn load(path: &Path, loaded: &mut BTreeSet<PathBuf>) -> Result<Graph, Outcome> {
    let text =
        fs::read_to_string(path).map_err(|e| Outcome::Usage(format!("cannot read {}: {e}", path.display())))?;
    let canonical = canonical(path);
    let base = format!("file://{}", canonical.display());
    loaded.insert(canonical);
    parse(&text, Format::from_path(path), Some(&base))
        .map_err(|d| Outcome::Usage(format!("{}:{d}", path.display())))
}

/// Maps import IRIs to local files.
struct Resolver<'a> {
    root: &'a Path,
    prefix: Option<&'a str>,
}

impl Resolver<'_> {
    fn resolve(&self, location: &Term) -> Result<PathBuf, Outcome> {
        let iri = location
            .as_iri()
            .ok_or_else(|| Outcome::Usage(format!("import location {location} is not an IRI")))?;
        if let Some(rest) = self.prefix.and_then(|p| iri.strip_prefix(p)) {
            return Ok(self.root.join(rest.trim_start_matches('/')));
        }
        let parsed = Iri::parse(iri).map_err(|e| Outcome::Usage(format!("bad import IRI <{iri}>: {e}")))?;
        let path = parsed.path();
        if parsed.scheme() == "file" {
            return Ok(PathBuf::from(path));
        }
        Ok(self.root.join(path.trim_start_matches('/')))
    }
}

/// Merges every graph reachable through `owl:imports`, each file once.
/// `loaded` holds the files already in `g`.
fn resolve_imports(g: &mut Graph, resolver: &Resolver<'_>, loaded: &mut BTreeSet<PathBuf>) -> Result<(), Outcome> {
    let mut seen: BTreeSet<Term> = BTreeSet::new();
    loop {
        let pending: Vec<Term> = g
            .with_predicate(&Term::iri(owl::IMPORTS))
            .map(|(_, o)| o.clone())
            .filter(|o| !seen.contains(o))
            .collect();
        if pending.is_empty() {
            return Ok(());
        }
        for location in pending {
            seen.insert(location.clone());
            let path = resolver.resolve(&location)?;
            if loaded.contains(&canonical(&path)) {
                continue;
            }
            let imported = load(&path, loaded)?;
            g.merge(&imported);
        }
    }
}

fn parse_shape_iri(s: &str) -> Result<Term, String> {
    let inner = s.strip_prefix('<').and_then(|s| s.strip_suffix('>')).unwrap_or(s);
    Iri::parse(inner).map_err(|e| format!("--shape: `{s}` is not an absolute IRI: {e}"))?;
    Ok(Term::iri(inner))
}

/// Parses an N-Triples IRI or literal. A bare absolute IRI is accepted too.
fn parse_node(s: &str) -> Result<Term, String> {
    let s = s.trim();
    let term = if s.starts_with('<') || s.starts_with('"') { s.to_owned() } else { format!("<{s}>") };
    let g = parse(&format!("<urn:ashacl:s> <urn:ashacl:p> {term} ."), Format::NTriples, None)
        .map_err(|d| format!("--node: `{s}` is not an IRI or literal: {}", d.message))?;
    let t = g.iter().next().map(|t| t.object().clone()).ok_or_else(|| format!("--node: `{s}` is empty"))?;
    Ok(t)
}
