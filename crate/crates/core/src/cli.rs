//! The `drgkit` command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::clausal_form::{parse_clf_documents, serialize_clf, validate, ClausalDrs, Inventory};
use crate::encoder::{assign_kinds, decode, encode, EncodingSpec};
use crate::graph::{null_record, read_record, to_interchange, GraphRecord};
use crate::lattice::ConceptLattice;
use crate::matcher::{clause_match, score_corpus, CorpusScore, MatchOptions, ScoreConfig, SearchBudget};

const CLAUSE_RESTARTS: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "drgkit", version, about = "Convert, validate and score DRSs and their graph encodings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clausal form to JSON-lines graphs
    Convert {
        #[arg(long, value_parser = parse_encoding)]
        encoding: EncodingSpec,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        lattice: LatticeArgs,
    },
    /// JSON-lines graphs back to clausal form
    Decode {
        /// Defaults to the encoding named in each record
        #[arg(long, value_parser = parse_encoding)]
        encoding: Option<EncodingSpec>,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Graph-level scores of system graphs against gold graphs
    Score {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Clause-level scores of system DRSs against gold DRSs
    ScoreClf {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Well-formedness report for clausal-form documents
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Node and edge counts per encoding, and edge reductions between them
    Stats {
        #[arg(long)]
        input: PathBuf,
        /// Restrict the table to one encoding
        #[arg(long, value_parser = parse_encoding)]
        encoding: Option<EncodingSpec>,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The encodings and their axes
    ListEncodings {
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Machine-readable output
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    /// Hypernym pairs (TSV); the bundled lattice otherwise
    #[arg(long, env = "DRGKIT_HYPERNYMS")]
    hypernyms: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Documents scored in parallel; all cores by default
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    #[arg(long, default_value_t = 500_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_expansions: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_pairs: u64,
    /// Credit anchor spans
    #[arg(long)]
    anchors: bool,
}

fn parse_encoding(s: &str) -> Result<EncodingSpec, String> {
    EncodingSpec::from_name(s).map_err(|_| format!("unknown encoding `{s}`; one of: {}", EncodingSpec::names().join(", ")))
}

enum Failure {
    Usage(String),
    Data(String),
}

type Outcome = Result<(), Failure>;

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, out: &OutArgs, text: &str) -> Outcome {
        match &out.output {
            Some(path) => std::fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display()))),
            None => self.stdout.write_all(text.as_bytes()).map_err(|e| Failure::Data(format!("stdout: {e}"))),
        }
    }

    fn note(&mut self, line: &str) {
        let _ = writeln!(self.stderr, "{line}");
    }
}

/// Runs one command line and returns its exit code: 0 on success, 1 on a
/// usage error, 2 on a data error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let mut io = Io { stdout, stderr };
    let result = match cli.command {
        Command::Convert { encoding, input, out, lattice } => convert(&mut io, &encoding, &input, &out, &lattice),
        Command::Decode { encoding, input, out } => decode_cmd(&mut io, encoding, &input, &out),
        Command::Score { gold, system, search, out } => score(&mut io, &gold, &system, &search, &out),
        Command::ScoreClf { gold, system, seed, out } => score_clf(&mut io, &gold, &system, seed, &out),
        Command::Validate { input, out } => validate_cmd(&mut io, &input, &out),
        Command::Stats { input, encoding, lattice, out } => stats(&mut io, &input, encoding, &lattice, &out),
        Command::ListEncodings { out } => list_encodings(&mut io, &out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            io.note(&format!("error: {m}"));
            1
        }
        Err(Failure::Data(m)) => {
            io.note(&format!("error: {m}"));
            2
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn lattice(args: &LatticeArgs) -> Result<ConceptLattice, Failure> {
    match &args.hypernyms {
        Some(p) => ConceptLattice::load(p).map_err(|e| Failure::Data(e.to_string())),
        None => Ok(ConceptLattice::bundled()),
    }
}

/// Parsed documents of a clausal-form file, with the line each starts on.
/// Documents that fail to parse come back as errors naming id and line.
fn documents(path: &Path) -> Result<Vec<(String, usize, Result<ClausalDrs, String>)>, Failure> {
    let text = read(path)?;
    Ok(parse_clf_documents(&text, &Inventory::bundled())
        .into_iter()
        .map(|d| {
            let result = d.result.map_err(|e| e.to_string());
            (d.doc_id, d.first_line, result)
        })
        .collect())
}

fn records(path: &Path) -> Result<Vec<GraphRecord>, Failure> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r = read_record(line).map_err(|e| Failure::Data(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(r);
    }
    Ok(out)
}

fn convert(io: &mut Io, spec: &EncodingSpec, input: &Path, out: &OutArgs, lattice_args: &LatticeArgs) -> Outcome {
    let lat = lattice(lattice_args)?;
    let mut text = String::new();
    let mut nulls = 0;
    for (id, line, doc) in documents(input)? {
        let graph = doc.and_then(|d| encode(&d, spec, &lat).map_err(|e| e.to_string()));
        match graph {
            Ok(g) => text.push_str(&to_interchange(&g)),
            Err(reason) => {
                nulls += 1;
                io.note(&format!("null graph {id} (line {line}): {reason}"));
                text.push_str(&null_record(&id, spec.name(), &reason));
            }
        }
        text.push('\n');
    }
    io.emit(out, &text)?;
    io.note(&format!("{nulls} null graphs"));
    Ok(())
}

fn decode_cmd(io: &mut Io, encoding: Option<EncodingSpec>, input: &Path, out: &OutArgs) -> Outcome {
    let mut docs = Vec::new();
    let mut failed = Vec::new();
    let text = read(input)?;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let where_ = format!("{}:{}", input.display(), i + 1);
        let r = read_record(line).map_err(|e| Failure::Data(format!("{where_}: {e}")))?;
        let Some(g) = r.graph else {
            io.note(&format!("skipping null graph {} ({where_})", r.id));
            continue;
        };
        let spec = match encoding {
            Some(s) => s,
            None => EncodingSpec::from_name(&r.encoding).map_err(|e| Failure::Data(format!("{} ({where_}): {e}", r.id)))?,
        };
        match decode(&g, &spec) {
            Ok(d) => docs.push(d),
            Err(e) => {
                io.note(&format!("{} ({where_}): {e}", r.id));
                failed.push(r.id);
            }
        }
    }
    io.emit(out, &serialize_clf(&docs))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Data(format!("{} graphs could not be decoded: {}", failed.len(), failed.join(", "))))
    }
}

fn score(io: &mut Io, gold: &Path, system: &Path, args: &SearchArgs, out: &OutArgs) -> Outcome {
    let budget = SearchBudget::new(args.max_pairs as usize, args.max_expansions, None).map_err(|e| Failure::Usage(e.to_string()))?;
    let config = ScoreConfig {
        budget,
        seed: args.seed,
        options: MatchOptions { tops: true, anchors: args.anchors },
        workers: args.workers.map(|w| w as usize),
    };
    let mut gold = records(gold)?;
    let mut system = records(system)?;
    for r in gold.iter_mut().chain(system.iter_mut()) {
        if let Some(g) = r.graph.as_mut() {
            match EncodingSpec::from_name(&r.encoding) {
                Ok(spec) => assign_kinds(g, &spec),
                Err(_) => g.guess_kinds(),
            }
        }
    }
    let report = score_corpus(&system, &gold, &config).map_err(|e| Failure::Data(e.to_string()))?;
    let text = if out.json { to_json(&report)? } else { score_table(&report) };
    io.emit(out, &text)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Failure::Data(e.to_string()))
}

fn score_table(r: &CorpusScore) -> String {
    let width = r.docs.iter().map(|d| d.id.len()).max().unwrap_or(2).max(8);
    let mut s = String::new();
    let _ = writeln!(s, "{:<width$}  {:>7}  {:>7}  {:>7}  exact", "document", "P", "R", "F1");
    for d in &r.docs {
        let exact = if d.note.is_some() { "-" } else if d.exact { "yes" } else { "no" };
        let _ = writeln!(s, "{:<width$}  {:>7.4}  {:>7.4}  {:>7.4}  {exact}", d.id, d.p, d.r, d.f1);
    }
    let _ = writeln!(s, "macro F1 {:.4} over {} documents; approximate matches {:.1}%", r.macro_f1, r.docs.len(), r.approx_rate * 100.0);
    s
}

#[derive(Serialize)]
struct ClauseDoc {
    id: String,
    p: f64,
    r: f64,
    f1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn score_clf(io: &mut Io, gold: &Path, system: &Path, seed: u64, out: &OutArgs) -> Outcome {
    let gold = documents(gold)?;
    let system = documents(system)?;
    let mut sys_by_id: BTreeMap<&str, &Result<ClausalDrs, String>> = BTreeMap::new();
    for (id, _, d) in &system {
        if sys_by_id.insert(id, d).is_some() {
            return Err(Failure::Data(format!("duplicate document id `{id}` in system file")));
        }
    }
    let gold_ids: std::collections::BTreeSet<&str> = gold.iter().map(|(id, _, _)| id.as_str()).collect();
    let stray: Vec<&str> = sys_by_id.keys().copied().filter(|id| !gold_ids.contains(id)).collect();
    if !stray.is_empty() {
        return Err(Failure::Data(format!("DocIdMismatch: system documents without gold counterpart: {}", stray.join(", "))));
    }
    let mut docs = Vec::new();
    for (id, line, g) in &gold {
        let Ok(g) = g else {
            io.note(&format!("skipping gold document {id} (line {line}): {}", g.as_ref().unwrap_err()));
            continue;
        };
        let doc = match sys_by_id.get(id.as_str()) {
            Some(Ok(s)) => {
                let m = clause_match(s, g, CLAUSE_RESTARTS, seed);
                ClauseDoc { id: id.clone(), p: m.precision, r: m.recall, f1: m.f1, note: None }
            }
            Some(Err(e)) => ClauseDoc { id: id.clone(), p: 0.0, r: 0.0, f1: 0.0, note: Some(format!("unreadable system document: {e}")) },
            None => ClauseDoc { id: id.clone(), p: 0.0, r: 0.0, f1: 0.0, note: Some("missing system document".into()) },
        };
        docs.push(doc);
    }
    let mut f1s: Vec<(&str, f64)> = docs.iter().map(|d| (d.id.as_str(), d.f1)).collect();
    f1s.sort_by(|a, b| a.0.cmp(b.0));
    let macro_f1 = if f1s.is_empty() { 0.0 } else { f1s.iter().map(|x| x.1).sum::<f64>() / f1s.len() as f64 };
    let text = if out.json {
        to_json(&json!({ "macro_f1": macro_f1, "docs": docs, "restarts": CLAUSE_RESTARTS, "seed": seed }))?
    } else {
        let width = docs.iter().map(|d| d.id.len()).max().unwrap_or(2).max(8);
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:>7}  {:>7}  {:>7}", "document", "P", "R", "F1");
        for d in &docs {
            let _ = writeln!(s, "{:<width$}  {:>7.4}  {:>7.4}  {:>7.4}", d.id, d.p, d.r, d.f1);
        }
        let _ = writeln!(s, "macro F1 {macro_f1:.4} over {} documents", docs.len());
        s
    };
    io.emit(out, &text)
}

fn validate_cmd(io: &mut Io, input: &Path, out: &OutArgs) -> Outcome {
    let mut report = Vec::new();
    for (id, line, doc) in documents(input)? {
        let issues: Vec<String> = match doc {
            Ok(d) => validate(&d).iter().map(|i| i.to_string()).collect(),
            Err(e) => vec![e],
        };
        report.push((id, line, issues));
    }
    let bad = report.iter().filter(|r| !r.2.is_empty()).count();
    let text = if out.json {
        let docs: Vec<_> = report.iter().map(|(id, line, issues)| json!({ "id": id, "line": line, "issues": issues })).collect();
        to_json(&json!({ "documents": report.len(), "ill_formed": bad, "docs": docs }))?
    } else {
        let mut s = String::new();
        for (id, line, issues) in &report {
            if issues.is_empty() {
                let _ = writeln!(s, "{id}: ok");
            }
            for i in issues {
                let _ = writeln!(s, "{id} (line {line}): {i}");
            }
        }
        let _ = writeln!(s, "{} documents, {bad} ill-formed", report.len());
        s
    };
    io.emit(out, &text)?;
    if bad > 0 {
        Err(Failure::Data(format!("{bad} ill-formed documents")))
    } else {
        Ok(())
    }
}

/// Pairs whose corpus-level edge reduction `stats` reports.
const REDUCTIONS: [(&str, &str); 6] = [
    ("fork-breif-creif", "fork-breif-cedge"),
    ("fork-breif-cedge", "fork-breif-cref"),
    ("fork-breif-creif", "fork-breif-cref"),
    ("fork-bnode-cedge", "fork-bnode-cref"),
    ("chain-bnode-cref", "chain-bnode-cref-implicit"),
    ("chainlab-bnode-cref", "chainlab-bnode-cref-implicit"),
];

#[derive(Serialize)]
struct EncodingStats {
    encoding: &'static str,
    graphs: usize,
    nulls: usize,
    nodes: usize,
    edges: usize,
}

#[derive(Serialize)]
struct Reduction {
    from: &'static str,
    to: &'static str,
    documents: usize,
    edges_from: usize,
    edges_to: usize,
    reduction: f64,
}

fn stats(io: &mut Io, input: &Path, only: Option<EncodingSpec>, lattice_args: &LatticeArgs, out: &OutArgs) -> Outcome {
    let lat = lattice(lattice_args)?;
    let docs: Vec<ClausalDrs> = documents(input)?
        .into_iter()
        .filter_map(|(id, line, d)| match d {
            Ok(d) => Some(d),
            Err(e) => {
                io.note(&format!("skipping {id} (line {line}): {e}"));
                None
            }
        })
        .collect();
    let specs = match only {
        Some(s) => vec![s],
        None => EncodingSpec::all(),
    };
    // per encoding, per document: edge count or None
    let mut edges: BTreeMap<&'static str, Vec<Option<usize>>> = BTreeMap::new();
    let mut table = Vec::new();
    for spec in &specs {
        let mut row = EncodingStats { encoding: spec.name(), graphs: 0, nulls: 0, nodes: 0, edges: 0 };
        let mut per_doc = Vec::new();
        for d in &docs {
            match encode(d, spec, &lat) {
                Ok(g) => {
                    let st = g.stats();
                    row.graphs += 1;
                    row.nodes += st.node_count;
                    row.edges += st.edge_count;
                    per_doc.push(Some(st.edge_count));
                }
                Err(_) => {
                    row.nulls += 1;
                    per_doc.push(None);
                }
            }
        }
        edges.insert(spec.name(), per_doc);
        table.push(row);
    }
    let mut reductions = Vec::new();
    for (from, to) in REDUCTIONS {
        let (Some(a), Some(b)) = (edges.get(from), edges.get(to)) else { continue };
        let both: Vec<(usize, usize)> = a.iter().zip(b).filter_map(|(x, y)| Some(((*x)?, (*y)?))).collect();
        let ea: usize = both.iter().map(|p| p.0).sum();
        let eb: usize = both.iter().map(|p| p.1).sum();
        let reduction = if ea == 0 { 0.0 } else { (ea as f64 - eb as f64) / ea as f64 };
        reductions.push(Reduction { from, to, documents: both.len(), edges_from: ea, edges_to: eb, reduction });
    }
    let text = if out.json {
        to_json(&json!({ "documents": docs.len(), "encodings": table, "reductions": reductions }))?
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "{:<30} {:>7} {:>6} {:>8} {:>8}", "encoding", "graphs", "nulls", "nodes", "edges");
        for r in &table {
            let _ = writeln!(s, "{:<30} {:>7} {:>6} {:>8} {:>8}", r.encoding, r.graphs, r.nulls, r.nodes, r.edges);
        }
        if !reductions.is_empty() {
            let _ = writeln!(s);
        }
        for r in &reductions {
            let _ = writeln!(s, "{} -> {}: {:.1}% fewer edges over {} documents", r.from, r.to, r.reduction * 100.0, r.documents);
        }
        s
    };
    io.emit(out, &text)
}

fn list_encodings(io: &mut Io, out: &OutArgs) -> Outcome {
    let specs = EncodingSpec::all();
    let text = if out.json {
        let rows: Vec<_> = specs
            .iter()
            .map(|s| {
                json!({
                    "name": s.name(),
                    "args": format!("{:?}", s.args()),
                    "binary": format!("{:?}", s.binary()),
                    "concept": format!("{:?}", s.concept()),
                    "membership": format!("{:?}", s.membership()),
                    "typed_membership": s.bb_star(),
                    "lossless": s.is_lossless(),
                })
            })
            .collect();
        to_json(&rows)?
    } else {
        specs.iter().map(|s| format!("{:<30} {}\n", s.name(), s.axes())).collect()
    };
    io.emit(out, &text)
}
