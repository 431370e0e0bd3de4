//! Project corpora: MiniJ sources, tests, bug reports and ground-truth faults.
//!
//! Layout of a project directory:
//!
//! ```text
//! src/**/*.mj          production code
//! tests/**/*.mj        test functions named test_*
//! bugreports/*.json    {id, title, description, status, linked_fault_id}
//! faults/*.json        {fault_id, bug_report_id, fixed_statements: [{path, index}], failing_tests}
//! ```
//!
//! A suite directory holds several projects as immediate subdirectories.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::minij::locate::{statements, StmtLoc};
use crate::minij::{self, Program, SourceUnit, Span, Symbols, Unit};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: malformed bug report: {reason}")]
    MalformedReport { path: String, reason: String },
    #[error("{path}: malformed fault: {reason}")]
    MalformedFault { path: String, reason: String },
    #[error("{path}:{line}:{col}: parse error: {message}")]
    Parse { path: String, line: usize, col: usize, message: String },
    #[error("type error: {0}")]
    Type(#[from] minij::TypeError),
    #[error("bug report '{report}' links to missing fault '{fault}'")]
    DanglingLink { report: String, fault: String },
    #[error("{0}: not a corpus directory (expected src/, tests/ and bugreports/)")]
    NotACorpus(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Resolved,
    Fixed,
    Closed,
    #[serde(other)]
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BugReport {
    pub id: String,
    pub title: String,
    pub description: String,
    pub status: ReportStatus,
    #[serde(default)]
    pub linked_fault_id: Option<String>,
}

impl BugReport {
    pub fn text(&self) -> String {
        format!("{}\n{}", self.title, self.description)
    }
}

/// Stable statement identity: file path plus pre-order ordinal in the file.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StatementId {
    pub path: String,
    pub index: usize,
}

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.path, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatementRef {
    pub file_path: String,
    pub index: usize,
    /// (start_line, start_col, end_line, end_col); end column exclusive.
    pub span: (usize, usize, usize, usize),
    pub byte_range: (usize, usize),
}

impl StatementRef {
    pub fn id(&self) -> StatementId {
        StatementId { path: self.file_path.clone(), index: self.index }
    }
}

#[derive(Clone, Debug)]
pub struct SourceFile {
    pub path: String,
    pub raw_text: String,
    pub statements: Vec<StatementRef>,
    pub locations: Vec<StmtLoc>,
}

impl SourceFile {
    pub fn statement_text(&self, index: usize) -> Option<&str> {
        let s = self.statements.get(index)?;
        self.raw_text.get(s.byte_range.0..s.byte_range.1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedStatement {
    pub path: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthFault {
    pub fault_id: String,
    pub bug_report_id: String,
    pub fixed_statements: Vec<FixedStatement>,
    pub failing_tests: Vec<String>,
}

impl GroundTruthFault {
    pub fn fixed_files(&self) -> BTreeSet<String> {
        self.fixed_statements.iter().map(|s| s.path.clone()).collect()
    }
}

/// An immutable, fully checked project.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub name: String,
    pub root: PathBuf,
    /// Production files, sorted by path.
    pub sources: Vec<SourceFile>,
    /// Test files, sorted by path.
    pub tests: Vec<SourceFile>,
    /// Sorted by id in natural order.
    pub reports: Vec<BugReport>,
    pub faults: Vec<GroundTruthFault>,
    /// All units, type checked and annotated.
    pub program: Program,
    pub symbols: Symbols,
}

impl Corpus {
    pub fn source(&self, path: &str) -> Option<&SourceFile> {
        self.sources.iter().find(|f| f.path == path)
    }

    pub fn unit(&self, path: &str) -> Option<&Unit> {
        self.program.unit(path)
    }

    pub fn report(&self, id: &str) -> Option<&BugReport> {
        self.reports.iter().find(|r| r.id == id)
    }

    pub fn fault(&self, id: &str) -> Option<&GroundTruthFault> {
        self.faults.iter().find(|f| f.fault_id == id)
    }

    pub fn fault_for_report(&self, report: &BugReport) -> Option<&GroundTruthFault> {
        report.linked_fault_id.as_deref().and_then(|id| self.fault(id))
    }

    pub fn statement(&self, id: &StatementId) -> Option<&StatementRef> {
        self.source(&id.path)?.statements.get(id.index)
    }

    pub fn test_names(&self) -> Vec<String> {
        self.program.test_names()
    }

    pub fn statement_count(&self) -> usize {
        self.sources.iter().map(|f| f.statements.len()).sum()
    }
}

/// Reports whose status is in `statuses`, in id order.
pub fn filter_reports<'a>(corpus: &'a Corpus, statuses: &BTreeSet<ReportStatus>) -> Vec<&'a BugReport> {
    corpus.reports.iter().filter(|r| statuses.contains(&r.status)).collect()
}

/// Orders ids so that embedded numbers compare numerically (`R2` < `R10`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut ai = a.chars().peekable();
    let mut bi = b.chars().peekable();
    loop {
        match (ai.peek().copied(), bi.peek().copied()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let take = |it: &mut std::iter::Peekable<std::str::Chars<'_>>| {
                    let mut s = String::new();
                    while let Some(c) = it.peek().copied().filter(char::is_ascii_digit) {
                        s.push(c);
                        it.next();
                    }
                    s
                };
                let (na, nb) = (take(&mut ai), take(&mut bi));
                let (ta, tb) = (na.trim_start_matches('0'), nb.trim_start_matches('0'));
                let ord = ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(&y);
                }
                ai.next();
                bi.next();
            }
        }
    }
}

pub fn is_corpus_dir(root: &Path) -> bool {
    root.join("src").is_dir() && root.join("bugreports").is_dir()
}

pub fn load_corpus(root: &Path) -> Result<Corpus, CorpusError> {
    if !is_corpus_dir(root) || !root.join("tests").is_dir() {
        return Err(CorpusError::NotACorpus(root.display().to_string()));
    }
    let name = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| root.display().to_string());

    let sources = load_sources(root, "src")?;
    let tests = load_sources(root, "tests")?;

    let mut units = Vec::new();
    for f in sources.iter().chain(&tests) {
        units.push(SourceUnit { path: f.path.clone(), unit: parse_file(&f.path, &f.raw_text)? });
    }
    let mut program = Program { units };
    let symbols = program.check()?;

    let sources = index_statements(sources, &program);
    let tests = index_statements(tests, &program);

    let mut reports: Vec<BugReport> = Vec::new();
    for path in json_files(root, "bugreports")? {
        let rel = relative(root, &path);
        let text = read(&path)?;
        let report: BugReport = serde_json::from_str(&text)
            .map_err(|e| CorpusError::MalformedReport { path: rel.clone(), reason: e.to_string() })?;
        if report.id.trim().is_empty() {
            return Err(CorpusError::MalformedReport { path: rel, reason: "empty id".into() });
        }
        if report.title.trim().is_empty() && report.description.trim().is_empty() {
            return Err(CorpusError::MalformedReport { path: rel, reason: "empty title and description".into() });
        }
        if reports.iter().any(|r| r.id == report.id) {
            return Err(CorpusError::MalformedReport { path: rel, reason: format!("duplicate id '{}'", report.id) });
        }
        reports.push(report);
    }
    reports.sort_by(|a, b| natural_cmp(&a.id, &b.id));

    let test_names: HashSet<String> = program.test_names().into_iter().collect();
    let mut faults: Vec<GroundTruthFault> = Vec::new();
    if root.join("faults").is_dir() {
        for path in json_files(root, "faults")? {
            let rel = relative(root, &path);
            let text = read(&path)?;
            let fault: GroundTruthFault = serde_json::from_str(&text)
                .map_err(|e| CorpusError::MalformedFault { path: rel.clone(), reason: e.to_string() })?;
            let bad = |reason: String| CorpusError::MalformedFault { path: rel.clone(), reason };
            if fault.failing_tests.is_empty() {
                return Err(bad("failing_tests is empty".into()));
            }
            if let Some(t) = fault.failing_tests.iter().find(|t| !test_names.contains(*t)) {
                return Err(bad(format!("unknown failing test '{t}'")));
            }
            for s in &fault.fixed_statements {
                let exists = sources.iter().any(|f| f.path == s.path && s.index < f.statements.len());
                if !exists {
                    return Err(bad(format!("fixed statement {}#{} does not exist", s.path, s.index)));
                }
            }
            if faults.iter().any(|f| f.fault_id == fault.fault_id) {
                return Err(bad(format!("duplicate fault id '{}'", fault.fault_id)));
            }
            faults.push(fault);
        }
    }
    faults.sort_by(|a, b| natural_cmp(&a.fault_id, &b.fault_id));

    for r in &reports {
        if let Some(fid) = &r.linked_fault_id {
            if !faults.iter().any(|f| &f.fault_id == fid) {
                return Err(CorpusError::DanglingLink { report: r.id.clone(), fault: fid.clone() });
            }
        }
    }

    Ok(Corpus { name, root: root.to_path_buf(), sources, tests, reports, faults, program, symbols })
}

/// Several projects loaded from the subdirectories of one directory, or a
/// single project when the directory itself is a corpus.
#[derive(Clone, Debug)]
pub struct Suite {
    pub projects: Vec<Corpus>,
}

impl Suite {
    pub fn find_report(&self, id: &str) -> Option<(&Corpus, &BugReport)> {
        self.projects.iter().find_map(|c| c.report(id).map(|r| (c, r)))
    }

    pub fn project(&self, name: &str) -> Option<&Corpus> {
        self.projects.iter().find(|c| c.name == name)
    }

    pub fn reports(&self) -> impl Iterator<Item = (&Corpus, &BugReport)> {
        self.projects.iter().flat_map(|c| c.reports.iter().map(move |r| (c, r)))
    }
}

pub fn load_suite(root: &Path) -> Result<Suite, CorpusError> {
    if is_corpus_dir(root) {
        return Ok(Suite { projects: vec![load_corpus(root)?] });
    }
    let entries = fs::read_dir(root).map_err(|e| io_err(root, e))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_corpus_dir(p))
        .collect();
    if dirs.is_empty() {
        return Err(CorpusError::NotACorpus(root.display().to_string()));
    }
    dirs.sort_by(|a, b| natural_cmp(&a.to_string_lossy(), &b.to_string_lossy()));
    let projects = dirs.iter().map(|d| load_corpus(d)).collect::<Result<Vec<_>, _>>()?;
    let mut seen = HashSet::new();
    for (_, r) in projects.iter().flat_map(|c| c.reports.iter().map(move |r| (c, r))) {
        if !seen.insert(r.id.clone()) {
            return Err(CorpusError::MalformedReport {
                path: root.display().to_string(),
                reason: format!("report id '{}' appears in more than one project", r.id),
            });
        }
    }
    Ok(Suite { projects })
}

fn parse_file(path: &str, text: &str) -> Result<Unit, CorpusError> {
    minij::parse(text).map_err(|e| CorpusError::Parse {
        path: path.to_string(),
        line: e.line,
        col: e.col,
        message: e.message,
    })
}

fn load_sources(root: &Path, dir: &str) -> Result<Vec<SourceFile>, CorpusError> {
    let base = root.join(dir);
    let mut files = Vec::new();
    for entry in WalkDir::new(&base).sort_by_file_name() {
        let entry = entry.map_err(|e| CorpusError::Io {
            path: base.display().to_string(),
            source: e.into(),
        })?;
        let p = entry.path();
        if entry.file_type().is_file() && p.extension().is_some_and(|x| x == "mj") {
            files.push(SourceFile {
                path: relative(root, p),
                raw_text: read(p)?,
                statements: Vec::new(),
                locations: Vec::new(),
            });
        }
    }
    files.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(files)
}

fn index_statements(files: Vec<SourceFile>, program: &Program) -> Vec<SourceFile> {
    files
        .into_iter()
        .map(|mut f| {
            let unit = program.unit(&f.path).expect("unit loaded for every file");
            let (locs, refs): (Vec<StmtLoc>, Vec<StatementRef>) = statements(unit)
                .into_iter()
                .enumerate()
                .map(|(index, (loc, stmt))| (loc, statement_ref(&f.path, index, stmt.span)))
                .unzip();
            f.locations = locs;
            f.statements = refs;
            f
        })
        .collect()
}

fn statement_ref(path: &str, index: usize, span: Span) -> StatementRef {
    StatementRef {
        file_path: path.to_string(),
        index,
        span: (span.start_line, span.start_col, span.end_line, span.end_col),
        byte_range: (span.start, span.end),
    }
}

fn json_files(root: &Path, dir: &str) -> Result<Vec<PathBuf>, CorpusError> {
    let base = root.join(dir);
    let entries = fs::read_dir(&base).map_err(|e| io_err(&base, e))?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    Ok(out)
}

fn read(p: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(p).map_err(|e| io_err(p, e))
}

fn io_err(p: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io { path: p.display().to_string(), source }
}

fn relative(root: &Path, p: &Path) -> String {
    let rel = p.strip_prefix(root).unwrap_or(p);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}
