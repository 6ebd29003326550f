use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, ValueEnum};

use clp2chc::oracle::Bounds;
use clp2chc::smtlib::Style;
use clp2chc_cli::{run, Mode, RunConfig, SolverConfig};

/// Translate Prolog/CLP(Z) programs into SMT-LIB constrained Horn clauses
/// over algebraic data types.
///
/// With several queries in one program, each becomes its own false-headed
/// clause before a single check-sat, so `unsat` means "at least one query
/// is derivable".
#[derive(Parser, Debug)]
#[command(name = "clp2chc", version, about)]
struct Args {
    /// Input Prolog file (UTF-8 `.pl`).
    input: PathBuf,

    /// Write the emitted script here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Datatype declaration style of the emitted script.
    #[arg(long, value_enum, default_value_t = StyleArg::Modern)]
    style: StyleArg,

    /// Keep the mechanical rule-by-rule output: no `(theInt (anInt t))`
    /// unwrapping and no dropping of tautological side conditions.
    #[arg(long)]
    no_peephole: bool,

    /// Emit the anInt/aList constructors and sort L even when unused.
    #[arg(long)]
    force_features: bool,

    /// What to do after parsing.
    #[arg(long, value_enum, default_value_t = ModeArg::Translate)]
    mode: ModeArg,

    /// Oracle: maximum term depth.
    #[arg(long, default_value_t = 4)]
    depth: u32,

    /// Oracle: integer interval as LO:HI.
    #[arg(long, value_parser = parse_int_range, default_value = "0:64", allow_hyphen_values = true)]
    int_range: (i64, i64),

    /// Oracle: maximum list length.
    #[arg(long, default_value_t = 6)]
    max_list_len: usize,

    /// Oracle: fixpoint iteration limit.
    #[arg(long, default_value_t = 500)]
    max_iter: usize,

    /// CHC solver executable (defaults to $CLP2CHC_SOLVER).
    #[arg(long)]
    solver: Option<PathBuf>,

    /// Extra argument passed to the solver before the script path
    /// (repeatable).
    #[arg(long = "solver-arg")]
    solver_args: Vec<String>,

    /// Solver wall-clock timeout in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,

    /// Print the parsed clause database to standard error.
    #[arg(long)]
    dump_ast: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StyleArg {
    Modern,
    Legacy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Translate,
    Oracle,
    Solve,
    Diff,
}

fn parse_int_range(text: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| "expected LO:HI".to_string())?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn main() {
    let args = Args::parse();

    let solver_path = args
        .solver
        .or_else(|| std::env::var_os("CLP2CHC_SOLVER").map(PathBuf::from));
    let mode = match args.mode {
        ModeArg::Translate => Mode::Translate,
        ModeArg::Oracle => Mode::Oracle,
        ModeArg::Solve => Mode::Solve,
        ModeArg::Diff => Mode::Diff,
    };
    if matches!(mode, Mode::Solve | Mode::Diff) && solver_path.is_none() {
        eprintln!(
            "error: --mode {} requires --solver or $CLP2CHC_SOLVER",
            match mode {
                Mode::Solve => "solve",
                _ => "diff",
            }
        );
        std::process::exit(clp2chc_cli::exit_code::SOLVER_FAILURE);
    }

    let cfg = RunConfig {
        input: args.input,
        output: args.output,
        style: match args.style {
            StyleArg::Modern => Style::Modern,
            StyleArg::Legacy => Style::Legacy,
        },
        peephole: !args.no_peephole,
        force_features: args.force_features,
        mode,
        bounds: Bounds::new(
            args.depth,
            args.int_range.0,
            args.int_range.1,
            args.max_list_len,
            args.max_iter,
        ),
        solver: solver_path.map(|path| SolverConfig {
            path,
            extra_args: args.solver_args,
            timeout: Duration::from_secs(args.timeout),
        }),
        dump_ast: args.dump_ast,
    };

    let (_report, code) = run(&cfg);
    std::process::exit(code);
}
