//! The `psifrac` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bvp::{
    condition_report, picard_solve, residual_report, ConditionReport, ConstantSet, GridFunction,
    Omega0Convention, ResidualReport, SolutionPair,
};
use crate::collocation::{collocation_solve, cross_validate, DiffReport};
use crate::config::{load_config, ProblemConfig};
use crate::reproduce::{reproduce_all, Reproduction};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONDITION_FAILS: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

/// Residuals below this count as zero in `verify`, unless the solver
/// tolerance is looser.
const VERIFY_RESIDUAL_TOL: f64 = 1e-8;
/// Allowed disagreement between Picard and Newton in `verify`.
const VERIFY_AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "psifrac", version, about = "Coupled fractional boundary value problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the condition constants and verdicts for a problem file.
    Check {
        config: PathBuf,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Solve by Picard iteration and write `t,x,y` as CSV.
    Solve {
        config: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Check a CSV solution: residuals and agreement with a Newton solve.
    Verify {
        config: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Recompute both bundled examples and compare with published constants.
    Reproduce {
        #[command(flatten)]
        flags: SolverFlags,
    },
}

#[derive(Debug, Args, Clone, Default)]
struct SolverFlags {
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    quad_n: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// `corrected` or `paper-literal`.
    #[arg(long)]
    omega0_convention: Option<String>,
}

impl SolverFlags {
    fn apply(&self, config: &mut ProblemConfig) -> Result<()> {
        let o = &mut config.options;
        o.grid_n = self.grid_n.unwrap_or(o.grid_n);
        o.quad_n = self.quad_n.unwrap_or(o.quad_n);
        o.tol = self.tol.unwrap_or(o.tol);
        o.max_iter = self.max_iter.unwrap_or(o.max_iter);
        o.validate()?;
        if let Some(c) = &self.omega0_convention {
            config.convention = c.parse::<Omega0Convention>()?;
        }
        Ok(())
    }
}

/// Stable machine-readable prefix for an error.
pub fn error_code(err: &Error) -> (&'static str, i32) {
    match err {
        Error::Io(_) => ("E_IO", EXIT_CONFIG),
        Error::Lex { .. } | Error::Syntax { .. } | Error::UnknownIdentifier { .. } => {
            ("E_PARSE", EXIT_CONFIG)
        }
        Error::Config { .. } | Error::Validation(_) | Error::Input(_) => ("E_CONFIG", EXIT_CONFIG),
        Error::Singular(_) => ("E_SINGULAR", EXIT_NUMERICAL),
        Error::NonConvergence(_) => ("E_NONCONVERGENCE", EXIT_NOT_CONVERGED),
        Error::Eval(_)
        | Error::Unsupported(_)
        | Error::Numerical(_)
        | Error::QuadratureConvergence { .. } => ("E_NUMERICAL", EXIT_NUMERICAL),
    }
}

/// Runs the command line; standard output and error receive the report and
/// diagnostics. Returns the process exit code.
pub fn run_command<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("psifrac: E_USAGE: {first}");
            return EXIT_CONFIG;
        }
    };
    let outcome = match cli.command {
        Command::Check { config, flags } => check(&config, &flags),
        Command::Solve { config, output, flags } => solve(&config, output.as_deref(), &flags),
        Command::Verify { config, solution, flags } => verify(&config, &solution, &flags),
        Command::Reproduce { flags } => reproduce(&flags),
    };
    match outcome {
        Ok(Outcome::Success(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Ok(Outcome::Failure { text, code, message, exit }) => {
            print!("{text}");
            eprintln!("psifrac: {code}: {message}");
            exit
        }
        Err(err) => {
            let (code, exit) = error_code(&err);
            let message = err.to_string().replace('\n', " ");
            eprintln!("psifrac: {code}: {message}");
            exit
        }
    }
}

enum Outcome {
    Success(String),
    Failure {
        text: String,
        code: &'static str,
        message: String,
        exit: i32,
    },
}

fn load(path: &Path, flags: &SolverFlags) -> Result<ProblemConfig> {
    let mut config = load_config(path)?;
    flags.apply(&mut config)?;
    Ok(config)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |v| format!("{v:.10}"))
}

pub fn format_condition_report(constants: &ConstantSet, r: &ConditionReport) -> String {
    let mut s = String::new();
    let [k0, k1, k2] = constants.growth_f;
    let [l0, l1, l2] = constants.growth_g;
    let _ = writeln!(s, "constants ({})", constants.provenance);
    let _ = writeln!(s, "  L1 = {:.10}  L2 = {:.10}", constants.lipschitz_f, constants.lipschitz_g);
    let _ = writeln!(s, "  k0 = {k0:.10}  k1 = {k1:.10}  k2 = {k2:.10}");
    let _ = writeln!(s, "  l0 = {l0:.10}  l1 = {l1:.10}  l2 = {l2:.10}");
    let _ = writeln!(s, "  M1 = {:.10}  M2 = {:.10}", constants.bound_f0, constants.bound_g0);
    for w in &constants.warnings {
        let _ = writeln!(s, "  warning: {w}");
    }
    let _ = writeln!(s, "delta1 = {:.10}", r.delta1);
    let _ = writeln!(s, "delta2 = {:.10}", r.delta2);
    for (name, v) in [
        ("gamma1", r.gamma1),
        ("gamma2", r.gamma2),
        ("gamma3", r.gamma3),
        ("gamma4", r.gamma4),
        ("omega0", r.omega0),
        ("omega1", r.omega1),
        ("omega2", r.omega2),
        ("omega*", r.omega_star),
    ] {
        let _ = writeln!(s, "{name} = {v:.10}");
    }
    let _ = writeln!(s, "omega0 convention: {}", r.convention);
    let _ = writeln!(s, "r bound = {}", opt(r.r_bound()));
    let _ = writeln!(s, "solution bound = {}", opt(r.solution_bound()));
    let _ = writeln!(
        s,
        "uniqueness (gamma3 + gamma4 = {:.10} < 1): {}",
        r.contraction(),
        verdict(r.uniqueness_verdict())
    );
    let _ = writeln!(
        s,
        "existence (omega* = {:.10} < 1): {}",
        r.omega_star,
        verdict(r.existence_verdict())
    );
    s
}

fn check(path: &Path, flags: &SolverFlags) -> Result<Outcome> {
    let config = load(path, flags)?;
    let constants = config.resolve_constants()?;
    let report = condition_report(&config.problem, &constants, config.convention)?;
    let text = format_condition_report(&constants, &report);
    if report.uniqueness_verdict() && report.existence_verdict() {
        Ok(Outcome::Success(text))
    } else {
        let failed: Vec<&str> = [
            (!report.uniqueness_verdict()).then_some("gamma3 + gamma4 < 1"),
            (!report.existence_verdict()).then_some("omega* < 1"),
        ]
        .into_iter()
        .flatten()
        .collect();
        Ok(Outcome::Failure {
            text,
            code: "E_CONDITION",
            message: format!("condition fails: {}", failed.join(", ")),
            exit: EXIT_CONDITION_FAILS,
        })
    }
}

/// CSV with header `t,x,y` and 17 significant digits.
pub fn solution_csv(pair: &SolutionPair) -> String {
    let mut s = String::from("t,x,y\n");
    for ((t, x), y) in pair.x.nodes().iter().zip(pair.x.values()).zip(pair.y.values()) {
        let _ = writeln!(s, "{t:.16e},{x:.16e},{y:.16e}");
    }
    s
}

/// Reads a `t,x,y` CSV written by `solve`. Nodes must form a uniform grid.
pub fn read_solution_csv(text: &str) -> Result<(GridFunction, GridFunction)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == "t,x,y" => {}
        _ => return Err(Error::Config { line: 1, msg: "expected header `t,x,y`".into() }),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse = |f: &str| {
            f.parse::<f64>().map_err(|_| Error::Config {
                line: i + 1,
                msg: format!("invalid number `{f}`"),
            })
        };
        if fields.len() != 3 {
            return Err(Error::Config { line: i + 1, msg: "expected three columns".into() });
        }
        rows.push((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
    }
    if rows.len() < 2 {
        return Err(Error::input("solution file has no data rows"));
    }
    let n = rows.len() - 1;
    let nodes = crate::bvp::nodes(n);
    for (k, ((t, _, _), node)) in rows.iter().zip(&nodes).enumerate() {
        if (t - node).abs() > 1e-12 {
            return Err(Error::Config {
                line: k + 2,
                msg: format!("t = {t} is not grid node {node}"),
            });
        }
    }
    let x = GridFunction::new(rows.iter().map(|r| r.1).collect())?;
    let y = GridFunction::new(rows.iter().map(|r| r.2).collect())?;
    Ok((x, y))
}

fn solve(path: &Path, output: Option<&Path>, flags: &SolverFlags) -> Result<Outcome> {
    let config = load(path, flags)?;
    let pair = picard_solve(&config.problem, &config.options)?;
    let csv = solution_csv(&pair);
    let summary = format!(
        "converged in {} iterations (final increment {:.3e}, contraction estimate {})\n",
        pair.iterations,
        pair.final_increment,
        pair.contraction_estimate().map_or("n/a".into(), |c| format!("{c:.4}"))
    );
    match output {
        Some(out) => {
            std::fs::write(out, csv)?;
            Ok(Outcome::Success(format!("{summary}wrote {}\n", out.display())))
        }
        None => {
            eprint!("{summary}");
            Ok(Outcome::Success(csv))
        }
    }
}

pub struct Verification {
    pub residuals: ResidualReport,
    pub newton: SolutionPair,
    pub diff: DiffReport,
    pub residual_tol: f64,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.residuals.max_fixed_point() <= self.residual_tol
            && self.residuals.max_boundary() <= self.residual_tol
            && self.diff.passed()
    }
}

/// Residuals of `pair` and its distance to an independent Newton solve on
/// the same grid.
pub fn verify_solution(config: &ProblemConfig, pair: &SolutionPair) -> Result<Verification> {
    let mut options = config.options;
    options.grid_n = pair.x.intervals();
    let residuals = residual_report(&config.problem, pair, options.quad_n)?;
    let newton = collocation_solve(&config.problem, &options)?;
    let diff = cross_validate(pair, &newton, VERIFY_AGREEMENT_TOL.max(10.0 * options.tol))?;
    Ok(Verification {
        residuals,
        newton,
        diff,
        residual_tol: VERIFY_RESIDUAL_TOL.max(10.0 * options.tol),
    })
}

pub fn format_verification(v: &Verification) -> String {
    let r = &v.residuals;
    let mut s = String::new();
    let _ = writeln!(s, "fixed-point residual: x {:.3e}, y {:.3e}", r.fixed_point_x, r.fixed_point_y);
    let _ = writeln!(
        s,
        "boundary residuals: |x(0)| {:.3e}, |x(1)-lambda x(eta)| {:.3e}, |y(0)| {:.3e}, |y(1)-mu y(xi)| {:.3e}",
        r.x_at_zero, r.x_boundary, r.y_at_zero, r.y_boundary
    );
    for o in &r.ode {
        let _ = writeln!(s, "equation residual at t = {:.3}: x {:.3e}, y {:.3e}", o.t, o.x, o.y);
    }
    let _ = writeln!(
        s,
        "newton: {} steps, residual {:.3e}",
        v.newton.iterations, v.newton.final_increment
    );
    let d = &v.diff;
    let _ = writeln!(
        s,
        "agreement with newton: sup x {:.3e}, sup y {:.3e}, L2 x {:.3e}, L2 y {:.3e} (tolerance {:.1e})",
        d.sup_x, d.sup_y, d.l2_x, d.l2_y, d.tol
    );
    let _ = writeln!(s, "verdict: {}", verdict(v.passed()));
    s
}

fn verify(path: &Path, solution: &Path, flags: &SolverFlags) -> Result<Outcome> {
    let config = load(path, flags)?;
    let (x, y) = read_solution_csv(&std::fs::read_to_string(solution)?)?;
    let pair = SolutionPair {
        x,
        y,
        iterations: 0,
        final_increment: f64::NAN,
        history: Vec::new(),
        fixed_point_residual: f64::NAN,
    };
    let v = verify_solution(&config, &pair)?;
    let text = format_verification(&v);
    if v.passed() {
        Ok(Outcome::Success(text))
    } else {
        Ok(Outcome::Failure {
            text,
            code: "E_VERIFY",
            message: "solution failed verification".into(),
            exit: EXIT_NOT_CONVERGED,
        })
    }
}

pub fn format_reproduction(r: &Reproduction) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<16}{:>16}{:>16}  status", "quantity", "published", "recomputed");
    for c in &r.comparisons {
        let status = if c.reproduces() { "reproduces" } else { "does not reproduce" };
        let _ = writeln!(s, "{:<16}{:>16.10}{:>16.10}  {status}", c.quantity, c.published, c.recomputed);
    }
    let _ = writeln!(
        s,
        "{}: {} with published values, {} with recomputed values",
        r.condition,
        verdict(r.holds_published),
        verdict(r.holds_recomputed)
    );
    s
}

fn reproduce(flags: &SolverFlags) -> Result<Outcome> {
    let mut s = String::new();
    for mut rep in reproduce_all()? {
        flags.apply(&mut rep.config)?;
        let _ = writeln!(s, "== {} ==", rep.name);
        s.push_str(&format_reproduction(&rep));
        let picard = picard_solve(&rep.config.problem, &rep.config.options)?;
        let v = verify_solution(&rep.config, &picard)?;
        let _ = writeln!(
            s,
            "picard: {} iterations, largest increment ratio {}",
            picard.iterations,
            picard.contraction_estimate().map_or("n/a".into(), |c| format!("{c:.4}"))
        );
        s.push_str(&format_verification(&v));
        if let Some(bound) = rep.report.solution_bound() {
            let _ = writeln!(
                s,
                "|x| + |y| = {:.10} (a-priori bound {:.10})",
                picard.norm(),
                bound
            );
        }
        s.push('\n');
    }
    Ok(Outcome::Success(s))
}
