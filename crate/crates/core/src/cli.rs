//! The `gsip` command line.
//!
//! Exit codes: 0 on a completed command, 2 on usage or input errors, 3 when
//! a solve fails (node budget, evaluation error). `verify` also exits 1 when
//! a cross-check fails.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algorithms::{self, AlgorithmConfig, TieBreak, Variant};
use crate::error::{Error, Result};
use crate::gsip::{builtin, builtin_problems, GsipProblem};
use crate::algorithms::DEFAULT_LOWER_LEVEL_TOL_OPT;
use crate::opt::{DEFAULT_NODE_BUDGET, DEFAULT_TOL_FEAS, DEFAULT_TOL_OPT};
use crate::trace;
use crate::verify::{verify_problem, SUBPROBLEMS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gsip", version, about = "Discretization lower bounding for GSIPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one lower-bounding variant and write its trace.
    Run(RunArgs),
    /// Cross-check every subproblem of all variants against a grid oracle.
    Verify(VerifyArgs),
    /// List the built-in problems.
    List,
    /// Print a .gsip file in canonical form.
    Fmt(FmtArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in problem name (see `gsip list`).
    #[arg(long)]
    problem: Option<String>,
    /// Path to a .gsip file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_FEAS)]
    tol_feas: f64,
    /// Optimality tolerance of the lower-bounding problem.
    #[arg(long, default_value_t = DEFAULT_TOL_OPT)]
    tol_opt: f64,
    /// Optimality tolerance of the lower-level programs.
    #[arg(long, default_value_t = DEFAULT_LOWER_LEVEL_TOL_OPT)]
    llp_tol_opt: f64,
    /// Initial discretization point, comma separated; repeatable.
    #[arg(long = "init-y", value_name = "Y")]
    init_y: Vec<String>,
    #[arg(long, value_enum, default_value_t = TieBreakArg::SolverDefault)]
    tie_break: TieBreakArg,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum)]
    variant: VariantArg,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Keep iterating after a repeated cut at an unchanged iterate.
    #[arg(long)]
    no_stall_stop: bool,
    #[command(flatten)]
    solver: SolverArgs,
    /// Trace file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Grid points per axis.
    #[arg(long, default_value_t = 401)]
    grid: usize,
    #[arg(long, default_value_t = 20)]
    max_iter: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct FmtArgs {
    file: PathBuf,
    /// Rewrite the file instead of printing.
    #[arg(long)]
    in_place: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    LlpOnly,
    Aux,
    SipLlp,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::LlpOnly => Variant::LlpOnly,
            VariantArg::Aux => Variant::AuxLlp,
            VariantArg::SipLlp => Variant::SipLlp,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TieBreakArg {
    SolverDefault,
    Min,
    Max,
    Center,
}

impl From<TieBreakArg> for TieBreak {
    fn from(t: TieBreakArg) -> Self {
        match t {
            TieBreakArg::SolverDefault => TieBreak::SolverDefault,
            TieBreakArg::Min => TieBreak::MinFirst,
            TieBreakArg::Max => TieBreak::MaxFirst,
            TieBreakArg::Center => TieBreak::Center,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name) and executes the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::List => cmd_list(out),
        Command::Fmt(a) => cmd_fmt(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    }
}

fn solver(e: Error) -> Failure {
    Failure {
        code: EXIT_SOLVER,
        message: e.to_string(),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: format!("i/o error: {e}"),
    }
}

fn load_problem(src: &Source) -> Result<GsipProblem, Failure> {
    match (&src.problem, &src.file) {
        (Some(name), None) => builtin(name).ok_or_else(|| {
            let known: Vec<String> = builtin_problems().into_iter().map(|p| p.name).collect();
            usage(format!("unknown built-in problem `{name}` (known: {})", known.join(", ")))
        }),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            GsipProblem::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        _ => Err(usage("give exactly one of --problem and --file")),
    }
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>, Failure> {
    let point = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| usage(format!("bad --init-y `{text}`: {e}")))?;
    if point.len() != dim {
        return Err(usage(format!("--init-y `{text}` has {} coordinates, expected {dim}", point.len())));
    }
    Ok(point)
}

fn build_config(p: &GsipProblem, variant: Variant, max_iter: usize, s: &SolverArgs) -> Result<AlgorithmConfig, Failure> {
    let initial_yset = s
        .init_y
        .iter()
        .map(|t| parse_point(t, p.y.dim()))
        .collect::<Result<Vec<_>, _>>()?;
    for y in &initial_yset {
        p.y.check_contains(y, "--init-y point").map_err(usage)?;
    }
    let cfg = AlgorithmConfig {
        variant,
        alpha: s.alpha,
        tol_feas: s.tol_feas,
        tol_opt: s.tol_opt,
        lower_level_tol_opt: s.llp_tol_opt,
        max_iter,
        initial_yset,
        aux_tie_break: s.tie_break.into(),
        stop_on_stall: true,
        node_budget: s.node_budget,
    };
    cfg.validate().map_err(usage)?;
    cfg.minimize_options().validate().map_err(usage)?;
    cfg.lower_level_options().validate().map_err(usage)?;
    Ok(cfg)
}

fn cmd_run(a: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let p = load_problem(&a.source)?;
    let variant = Variant::from(a.variant);
    let mut cfg = build_config(&p, variant, a.max_iter, &a.solver)?;
    cfg.stop_on_stall = !a.no_stall_stop;
    let res = algorithms::run(&p, &cfg).map_err(solver)?;

    let text = match a.format {
        FormatArg::Csv => trace::to_csv_string(&p, &res),
        FormatArg::Json => trace::to_json_string(&p, variant, &res),
    }
    .map_err(usage)?;
    let summary = format!(
        "{} {}: status {}, final lower bound {}, {} iterations",
        p.name,
        variant,
        res.status,
        trace::fmt_real(res.final_lower_bound),
        res.trace.len()
    );
    match &a.output {
        Some(path) => {
            fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            writeln!(out, "{summary}").map_err(io_failure)?;
        }
        None => {
            out.write_all(text.as_bytes()).map_err(io_failure)?;
            writeln!(err, "{summary}").map_err(io_failure)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = load_problem(&a.source)?;
    if a.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    let cfg = build_config(&p, Variant::SipLlp, a.max_iter, &a.solver)?;
    let report = verify_problem(&p, a.grid, a.max_iter, &cfg).map_err(solver)?;
    writeln!(out, "{report}").map_err(io_failure)?;
    let max = SUBPROBLEMS
        .into_iter()
        .filter_map(|k| report.max_discrepancy(k))
        .fold(0.0, f64::max);
    writeln!(out, "max discrepancy {max:e}").map_err(io_failure)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_list(out: &mut dyn Write) -> Result<i32, Failure> {
    for p in builtin_problems() {
        let refs = match (p.f_star, p.f_l) {
            (Some(s), Some(l)) => format!("  f_star = {s:?}, f_L = {l:?}"),
            _ => String::new(),
        };
        writeln!(out, "{}{refs}", p.name).map_err(io_failure)?;
    }
    Ok(EXIT_OK)
}

fn cmd_fmt(a: FmtArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = fs::read_to_string(&a.file)
        .map_err(|e| usage(format!("cannot read {}: {e}", a.file.display())))?;
    let doc = crate::format::parse_problem(&text).map_err(|e| usage(format!("{}: {e}", a.file.display())))?;
    let canonical = crate::format::serialize_problem(&doc);
    if a.in_place {
        fs::write(&a.file, canonical).map_err(|e| usage(format!("cannot write {}: {e}", a.file.display())))?;
    } else {
        out.write_all(canonical.as_bytes()).map_err(io_failure)?;
    }
    Ok(EXIT_OK)
}
