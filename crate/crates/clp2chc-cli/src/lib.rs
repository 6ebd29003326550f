//! Driver behind the `clp2chc` binary: read a Prolog file, translate it,
//! and optionally run the bounded oracle and/or an external CHC solver.
//!
//! Exit codes: 0 for a completed translation or any definite answer
//! (including a diff verdict of agree or an inconclusive diff), 1 for
//! parse/translation/oracle errors, 2 when the solver fails to launch,
//! times out, or gives no definite answer, 3 for a diff disagreement.

pub mod solver;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clp2chc::diagnostics::{Diagnostic, Severity, Span};
use clp2chc::oracle::{self, Bounds, QueryAnswer};
use clp2chc::smtlib::{emit, Style};
use clp2chc::syntax::{self, ClauseKind, Database, Term};
use clp2chc::translator::{translate_program_with, TranslateOptions};

pub use solver::{run_solver, SolverAnswer, SolverConfig, SolverError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Translate,
    Oracle,
    Solve,
    Diff,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Output path for the emitted script; stdout when absent.
    pub output: Option<PathBuf>,
    pub style: Style,
    pub peephole: bool,
    pub force_features: bool,
    pub mode: Mode,
    pub bounds: Bounds,
    pub solver: Option<SolverConfig>,
    pub dump_ast: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Translated,
    Sat,
    Unsat,
    Unknown,
    Agree,
    Disagree,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Status::Translated => "translated",
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Unknown => "unknown",
            Status::Agree => "agree",
            Status::Disagree => "disagree",
            Status::Error => "error",
        };
        f.write_str(text)
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub status: Status,
    pub diagnostics: Vec<Diagnostic>,
    pub timings: Vec<(&'static str, Duration)>,
}

/// Exit codes as documented in the CLI manual.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const INPUT_ERROR: i32 = 1;
    pub const SOLVER_FAILURE: i32 = 2;
    pub const DISAGREE: i32 = 3;
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    input_name: String,
    report: RunReport,
    started: Instant,
}

impl<'a> Runner<'a> {
    fn emit_diagnostic(&mut self, diagnostic: Diagnostic) {
        eprintln!("{}", diagnostic.render(&self.input_name));
        self.report.diagnostics.push(diagnostic);
    }

    fn error(&mut self, span: Option<Span>, message: String) -> i32 {
        let diagnostic = Diagnostic {
            severity: Severity::Error,
            span: span.unwrap_or_else(Span::dummy),
            message,
        };
        self.emit_diagnostic(diagnostic);
        self.report.status = Status::Error;
        exit_code::INPUT_ERROR
    }

    fn phase_done(&mut self, name: &'static str) {
        let elapsed = self.started.elapsed();
        self.started = Instant::now();
        self.report.timings.push((name, elapsed));
    }
}

/// Execute one run and return the report with the process exit code.
/// Answer lines go to stdout and diagnostics to stderr.
pub fn run(cfg: &RunConfig) -> (RunReport, i32) {
    let mut runner = Runner {
        cfg,
        input_name: cfg.input.display().to_string(),
        report: RunReport {
            status: Status::Error,
            diagnostics: Vec::new(),
            timings: Vec::new(),
        },
        started: Instant::now(),
    };
    let code = run_inner(&mut runner);
    let timings: Vec<String> = runner
        .report
        .timings
        .iter()
        .map(|(name, d)| format!("{name} {d:.1?}"))
        .collect();
    if !timings.is_empty() {
        eprintln!("timings: {}", timings.join(", "));
    }
    (runner.report, code)
}

fn run_inner(runner: &mut Runner) -> i32 {
    let cfg = runner.cfg;
    let text = match std::fs::read_to_string(&cfg.input) {
        Ok(text) => text,
        Err(e) => return runner.error(None, format!("cannot read input: {e}")),
    };

    let parsed = match syntax::parse_program(&text) {
        Ok(parsed) => parsed,
        Err(e) => return runner.error(Some(e.span()), strip_span_prefix(&e.to_string())),
    };
    for warning in &parsed.warnings {
        runner.emit_diagnostic(warning.clone());
    }
    let db = parsed.database;
    runner.phase_done("parse");

    if cfg.dump_ast {
        eprintln!("{db:#?}");
    }

    let options = TranslateOptions {
        peephole: cfg.peephole,
        force_features: cfg.force_features,
    };
    let translation = match translate_program_with(&db, options) {
        Ok(translation) => translation,
        Err(e) => return runner.error(e.span(), e.to_string()),
    };
    for note in &translation.notes {
        runner.emit_diagnostic(note.clone());
    }
    runner.phase_done("translate");

    let script_text = emit(&translation.script, cfg.style);

    match cfg.mode {
        Mode::Translate => {
            if let Some(path) = &cfg.output {
                if let Err(e) = std::fs::write(path, &script_text) {
                    return runner.error(None, format!("cannot write output: {e}"));
                }
            } else {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(script_text.as_bytes());
            }
            runner.report.status = Status::Translated;
            exit_code::OK
        }
        Mode::Oracle => {
            let outcome = match run_oracle(runner, &db) {
                Ok(outcome) => outcome,
                Err(e) => return runner.error(None, e.to_string()),
            };
            runner.phase_done("oracle");
            runner.report.status = outcome.status();
            println!("{}", runner.report.status);
            exit_code::OK
        }
        Mode::Solve => {
            let answer = match solve(runner, &script_text) {
                Ok(answer) => answer,
                Err(code) => return code,
            };
            runner.phase_done("solve");
            runner.report.status = match answer {
                SolverAnswer::Sat => Status::Sat,
                SolverAnswer::Unsat => Status::Unsat,
                SolverAnswer::Unknown => Status::Unknown,
            };
            println!("{}", runner.report.status);
            if answer == SolverAnswer::Unknown {
                exit_code::SOLVER_FAILURE
            } else {
                exit_code::OK
            }
        }
        Mode::Diff => {
            if db.queries().next().is_none() {
                return runner.error(None, "diff mode needs at least one query".to_string());
            }
            let oracle_outcome = match run_oracle(runner, &db) {
                Ok(outcome) => outcome,
                Err(e) => return runner.error(None, e.to_string()),
            };
            runner.phase_done("oracle");
            let answer = match solve(runner, &script_text) {
                Ok(answer) => answer,
                Err(code) => return code,
            };
            runner.phase_done("solve");
            let (status, code) = match (oracle_outcome, answer) {
                (OracleOutcome::Derivable, SolverAnswer::Unsat) => (Status::Agree, exit_code::OK),
                (OracleOutcome::NotDerivable, SolverAnswer::Sat) => (Status::Agree, exit_code::OK),
                (OracleOutcome::Derivable, SolverAnswer::Sat)
                | (OracleOutcome::NotDerivable, SolverAnswer::Unsat) => {
                    (Status::Disagree, exit_code::DISAGREE)
                }
                (OracleOutcome::Unsaturated, _) | (_, SolverAnswer::Unknown) => {
                    (Status::Unknown, exit_code::OK)
                }
            };
            runner.report.status = status;
            println!("{status}");
            code
        }
    }
}

/// Aggregate oracle verdict over all queries: derivable when some query
/// has a witness; conclusively underivable only at saturation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OracleOutcome {
    Derivable,
    NotDerivable,
    Unsaturated,
}

impl OracleOutcome {
    fn status(self) -> Status {
        // Read through the CHC lens: a derivable query makes the clause
        // set contradictory.
        match self {
            OracleOutcome::Derivable => Status::Unsat,
            OracleOutcome::NotDerivable => Status::Sat,
            OracleOutcome::Unsaturated => Status::Unknown,
        }
    }
}

fn run_oracle(runner: &mut Runner, db: &Database) -> Result<OracleOutcome, oracle::OracleError> {
    let cfg = runner.cfg;
    let feats = if cfg.force_features {
        clp2chc::signatures::FeatureSet::all()
    } else {
        clp2chc::signatures::detect_features(db)
    };
    let facts = oracle::fixpoint_with(db, &cfg.bounds, feats)?;
    let mut derivable_any = false;
    let mut unknown_any = false;
    let queries: Vec<_> = db
        .clauses
        .iter()
        .filter(|c| c.kind() == ClauseKind::Query)
        .collect();
    if queries.is_empty() {
        println!(
            "no query; {} ground facts derived ({})",
            facts.len(),
            if facts.is_saturated() {
                "saturated"
            } else {
                "iteration limit reached"
            }
        );
    }
    for (index, query) in queries.iter().enumerate() {
        let answer = oracle::query_on(&facts, query)?;
        print_query_answer(index, queries.len(), &answer);
        if answer.derivable {
            derivable_any = true;
        } else if !answer.saturated {
            unknown_any = true;
        }
    }
    Ok(if derivable_any {
        OracleOutcome::Derivable
    } else if unknown_any || !facts.is_saturated() {
        OracleOutcome::Unsaturated
    } else {
        OracleOutcome::NotDerivable
    })
}

fn print_query_answer(index: usize, total: usize, answer: &QueryAnswer) {
    let label = if total > 1 {
        format!("query {}: ", index + 1)
    } else {
        String::new()
    };
    if answer.derivable {
        let witness = answer.witness.as_ref().unwrap();
        if witness.is_empty() {
            println!("{label}derivable");
        } else {
            let bindings: Vec<String> = witness
                .iter()
                .map(|(name, term)| format!("{name} = {}", show_term(term)))
                .collect();
            println!("{label}derivable: {}", bindings.join(", "));
        }
    } else if answer.saturated {
        println!("{label}not derivable (saturated)");
    } else {
        println!("{label}unknown at these bounds");
    }
}

fn show_term(term: &Term) -> String {
    let mut out = String::new();
    syntax::print_term(&mut out, term);
    out
}

/// Write the script (to `-o` or a temp file) and run the external solver.
fn solve(runner: &mut Runner, script_text: &str) -> Result<SolverAnswer, i32> {
    let cfg = runner.cfg;
    let Some(solver_cfg) = &cfg.solver else {
        return Err(runner.error(None, "no solver configured (use --solver)".to_string()));
    };
    let mut _temp = None;
    let script_path = match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, script_text) {
                return Err(runner.error(None, format!("cannot write output: {e}")));
            }
            path.clone()
        }
        None => {
            let file = tempfile::Builder::new()
                .prefix("clp2chc")
                .suffix(".smt2")
                .tempfile()
                .and_then(|mut f| {
                    f.write_all(script_text.as_bytes())?;
                    Ok(f)
                });
            match file {
                Ok(file) => {
                    let path = file.path().to_path_buf();
                    _temp = Some(file);
                    path
                }
                Err(e) => return Err(runner.error(None, format!("cannot write script: {e}"))),
            }
        }
    };
    match run_solver(solver_cfg, &script_path) {
        Ok(answer) => Ok(answer),
        Err(e) => {
            let diagnostic = Diagnostic {
                severity: Severity::Error,
                span: Span::dummy(),
                message: e.to_string(),
            };
            eprintln!("{}", diagnostic.render(&runner.input_name));
            runner.report.diagnostics.push(diagnostic);
            runner.report.status = match e {
                SolverError::Timeout(_) => Status::Unknown,
                _ => Status::Error,
            };
            Err(exit_code::SOLVER_FAILURE)
        }
    }
}

/// Syntax errors already carry `line:col: ` in their Display form; the
/// diagnostic renderer adds its own prefix.
fn strip_span_prefix(message: &str) -> String {
    match message.split_once(": ") {
        Some((prefix, rest)) if prefix.chars().all(|c| c.is_ascii_digit() || c == ':') => {
            rest.to_string()
        }
        _ => message.to_string(),
    }
}
