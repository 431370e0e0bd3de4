//! The `faultinject` command line: `localize`, `inject`, `evaluate`,
//! `report`, and `run` for the whole pipeline.
//!
//! Exit codes: 0 success, 1 pipeline or data error, 2 usage error.

mod figures;
mod render;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use figures::{bar_chart, box_plot, quantile, Group};
pub use render::{parse_report, render, summary, RenderError};

use crate::corpus::{load_suite, Corpus, Suite};
use crate::evaluator::{build_report, evaluate_target};
use crate::experiment::{all_mutants, group_mutants, run_suite, targets, ExperimentConfig, ScopeMode};
use crate::injector::{inject, inject_baseline, read_mutants, write_mutants, Mutant};
use crate::irloc::{locations_csv, Localizer};

#[derive(Debug, Parser)]
#[command(name = "faultinject", version, about = "Bug-report-driven fault injection for MiniJ projects")]
struct Cli {
    /// Project directory, or a directory of projects.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 uses every core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Experiment settings in TOML; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank statements by similarity to a bug report (CSV on stdout).
    Localize(LocalizeArgs),
    /// Inject mutants for a report, or baseline mutants.
    Inject(InjectArgs),
    /// Run tests against injected mutants and write an evaluation report.
    Evaluate(EvaluateArgs),
    /// Draw figures and a summary table from an evaluation report.
    Report(ReportArgs),
    /// Inject, evaluate and report for every linked report in the corpus.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct LocalizeArgs {
    #[arg(long)]
    report: String,
    /// Statements to emit.
    #[arg(long, default_value_t = 50)]
    top: usize,
    #[arg(long, default_value_t = 20)]
    top_files: usize,
    /// Only rank statements in these files.
    #[arg(long)]
    scope_file: Vec<String>,
}

#[derive(Debug, Args)]
struct InjectArgs {
    /// Report driving injection; optional with --baseline.
    #[arg(long)]
    report: Option<String>,
    #[arg(long)]
    n: usize,
    /// Sample classical mutants at random instead.
    #[arg(long)]
    baseline: bool,
    /// Only mutate these files.
    #[arg(long)]
    scope_file: Vec<String>,
    #[arg(long)]
    top_files: Option<usize>,
    #[arg(long)]
    top_statements: Option<usize>,
    /// Pattern catalog overriding the bundled one.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, default_value = "mutants")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Directory searched recursively for injected mutants.
    #[arg(long, default_value = "mutants")]
    mutants: PathBuf,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one kill-matrix CSV per fault.
    #[arg(long)]
    emit_matrix: Option<PathBuf>,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Evaluation report JSON.
    #[arg(long)]
    input: PathBuf,
    /// Directory for the SVG figures and summary.md.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Output directory: mutants/, matrices/, report.json, figures/.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<usize>>,
}

/// A failed command: message for stderr and exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn fail(message: impl ToString) -> Failure {
    Failure { code: 1, message: message.to_string() }
}

type CmdResult = Result<(), Failure>;

/// Runs the command line `args` (program name first) and returns the exit
/// code. Output goes to the given writers rather than the process streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn experiment_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut config = match &cli.config {
        Some(p) => ExperimentConfig::load(p).map_err(fail)?,
        None => ExperimentConfig::default(),
    };
    if let Some(c) = &cli.corpus {
        config.corpus_root = c.clone();
    }
    if config.corpus_root.as_os_str().is_empty() {
        config.corpus_root = PathBuf::from(".");
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(j) = cli.jobs {
        config.jobs = j;
    }
    Ok(config)
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let config = experiment_config(&cli)?;
    match cli.command {
        Command::Localize(a) => localize(&config, a, stdout),
        Command::Inject(a) => inject_cmd(config, a, stdout),
        Command::Evaluate(a) => evaluate(config, a, stdout, stderr),
        Command::Report(a) => report(a),
        Command::Run(a) => run_all(config, a, stderr),
    }
}

fn load(config: &ExperimentConfig) -> Result<Suite, Failure> {
    load_suite(&config.corpus_root).map_err(fail)
}

fn find_report<'a>(suite: &'a Suite, id: &str) -> Result<(&'a Corpus, &'a crate::corpus::BugReport), Failure> {
    suite.find_report(id).ok_or_else(|| fail(format!("no bug report with id '{id}'")))
}

fn localize(config: &ExperimentConfig, a: LocalizeArgs, stdout: &mut dyn Write) -> CmdResult {
    if a.top == 0 || a.top_files == 0 {
        return Err(usage("--top and --top-files must be at least 1"));
    }
    let suite = load(config)?;
    let (corpus, report) = find_report(&suite, &a.report)?;
    let scope: Option<BTreeSet<String>> = (!a.scope_file.is_empty()).then(|| a.scope_file.iter().cloned().collect());
    let ranked = Localizer::new(corpus)
        .and_then(|l| l.localize(report, a.top_files, a.top, scope.as_ref()))
        .map_err(fail)?;
    stdout.write_all(locations_csv(&ranked).as_bytes()).map_err(fail)
}

/// Removes earlier output for the same mutant ids so reruns leave no stale files.
fn write_fresh(out: &Path, mutants: &[Mutant], requested: usize) -> CmdResult {
    for m in mutants {
        let dir = out.join(&m.mutant_id);
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| fail(format!("{}: {e}", dir.display())))?;
        }
    }
    write_mutants(out, mutants, requested).map_err(fail)
}

fn inject_cmd(mut config: ExperimentConfig, a: InjectArgs, stdout: &mut dyn Write) -> CmdResult {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if !a.baseline && a.report.is_none() {
        return Err(usage("--report is required unless --baseline is given"));
    }
    if let Some(t) = a.top_files {
        config.top_files = t;
    }
    if let Some(t) = a.top_statements {
        config.top_statements = t;
    }
    if a.catalog.is_some() {
        config.catalog = a.catalog.clone();
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    let suite = load(&config)?;
    let catalog = config.catalog().map_err(fail)?;
    let target = match &a.report {
        Some(id) => Some(find_report(&suite, id)?),
        None => None,
    };
    let corpus = match target {
        Some((c, _)) => c,
        None if suite.projects.len() == 1 => &suite.projects[0],
        None => return Err(usage("--baseline over several projects needs --report or a single-project --corpus")),
    };
    let fault = target.and_then(|(c, r)| c.fault_for_report(r));
    let mut cfg = config.injection(&catalog, fault, a.n);
    if !a.scope_file.is_empty() {
        cfg.scope = Some(a.scope_file.iter().cloned().collect());
    } else if config.scope_mode == ScopeMode::TargetFile && fault.is_none() {
        return Err(usage("scope_mode target_file needs a report linked to a fault"));
    }
    let mutants = if a.baseline {
        let mut ms = inject_baseline(corpus, &cfg).map_err(fail)?;
        if let Some((_, r)) = target {
            for m in &mut ms {
                m.report_id = Some(r.id.clone());
            }
        }
        ms
    } else {
        let (_, report) = target.expect("checked above");
        inject(corpus, report, &cfg).map_err(fail)?
    };
    write_fresh(&a.out, &mutants, a.n)?;
    writeln!(stdout, "emitted={} requested={}", mutants.len(), a.n).map_err(fail)
}

fn evaluate(mut config: ExperimentConfig, a: EvaluateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    if let Some(b) = a.budgets {
        config.budgets = b;
    }
    if let Some(s) = a.samples {
        config.n_suite_samples = s;
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    let suite = load(&config)?;
    let loaded = read_mutants(&a.mutants).map_err(fail)?;
    if loaded.is_empty() {
        return Err(fail(format!("no mutants found under {}", a.mutants.display())));
    }
    let eval = config.evaluation();
    let mut evaluations = Vec::new();
    for (target, sets) in group_mutants(&suite, &loaded).map_err(fail)? {
        let e = evaluate_target(target.corpus, target.fault, &sets, &eval)
            .map_err(|e| fail(format!("{}: {e}", target.fault.fault_id)))?;
        for (source, budget) in &e.omitted {
            let _ = writeln!(stderr, "warning: {} {source}: budget {budget} omitted, too few mutants requested", e.fault_id);
        }
        evaluations.push(e);
    }
    if evaluations.is_empty() {
        return Err(fail("no mutants belong to a report with a linked fault"));
    }
    if let Some(dir) = &a.emit_matrix {
        fs::create_dir_all(dir).map_err(|e| fail(format!("{}: {e}", dir.display())))?;
        for e in &evaluations {
            let path = dir.join(format!("{}.csv", e.fault_id));
            fs::write(&path, e.matrix.to_csv()).map_err(|e| fail(format!("{}: {e}", path.display())))?;
        }
    }
    let json = build_report(&evaluations, &eval).to_json();
    match &a.out {
        Some(p) => fs::write(p, json).map_err(|e| fail(format!("{}: {e}", p.display()))),
        None => stdout.write_all(json.as_bytes()).map_err(fail),
    }
}

fn write_figures(report: &crate::evaluator::EvaluationReport, out: &Path) -> CmdResult {
    let files = render(report).map_err(fail)?;
    fs::create_dir_all(out).map_err(|e| fail(format!("{}: {e}", out.display())))?;
    for (name, text) in files {
        let path = out.join(name);
        fs::write(&path, text).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn report(a: ReportArgs) -> CmdResult {
    let text = fs::read_to_string(&a.input).map_err(|e| fail(format!("{}: {e}", a.input.display())))?;
    let report = parse_report(&text).map_err(fail)?;
    write_figures(&report, &a.out)
}

fn run_all(mut config: ExperimentConfig, a: RunArgs, stderr: &mut dyn Write) -> CmdResult {
    if let Some(b) = a.budgets {
        config.budgets = b;
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    let suite = load(&config)?;
    if targets(&suite).is_empty() {
        return Err(fail("no bug report links to a ground-truth fault"));
    }
    let outcome = run_suite(&suite, &config).map_err(fail)?;
    let mutant_root = a.out.join("mutants");
    for (report_id, sets) in &outcome.mutants {
        for set in sets {
            let dir = mutant_root.join(report_id).join(set.source.as_str());
            if dir.exists() {
                fs::remove_dir_all(&dir).map_err(|e| fail(format!("{}: {e}", dir.display())))?;
            }
            write_mutants(&dir, &all_mutants(std::slice::from_ref(set)), set.requested).map_err(fail)?;
        }
    }
    let matrices = a.out.join("matrices");
    fs::create_dir_all(&matrices).map_err(|e| fail(format!("{}: {e}", matrices.display())))?;
    for t in &outcome.targets {
        for (source, budget) in &t.omitted {
            let _ = writeln!(stderr, "warning: {} {source}: budget {budget} omitted", t.fault_id);
        }
        let path = matrices.join(format!("{}.csv", t.fault_id));
        fs::write(&path, t.matrix.to_csv()).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    }
    let path = a.out.join("report.json");
    fs::write(&path, outcome.report.to_json()).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    write_figures(&outcome.report, &a.out.join("figures"))
}
