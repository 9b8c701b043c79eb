//! Command-line front end.
//!
//! Exit codes: 0 success, 1 asserted-false (`classify` on a matrix that is
//! not free-like, `converge` below threshold), 2 usage or validation error,
//! 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::approx::build_approximation;
use crate::coupling::{ft_scattering, ks_scattering, CouplingSt, ScatteringMatrix};
use crate::error::Error;
use crate::freelike::{
    classify_freelike, enumerate_time_reversal, is_freelike, realize_smatrix, FreeLikeCase,
    FREELIKE_TOL,
};
use crate::io::{self, ApproxGraphFile, CouplingWithScattering, MatrixInput, ScatteringFile};
use crate::linalg::CMatrix;
use crate::solver::{convergence_study, halving_grid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Convergence thresholds for a passing `converge` run.
pub const MIN_ORDER: f64 = 0.8;
pub const MAX_FINAL_ERROR: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(name = "ftvertex", version, about = "Scale-invariant vertex couplings on star graphs")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    Minus,
    Plus,
    Balanced,
}

impl From<CaseArg> for FreeLikeCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Minus => FreeLikeCase::MinusJ,
            CaseArg::Plus => FreeLikeCase::PlusJ,
            CaseArg::Balanced => FreeLikeCase::Balanced,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the scattering matrix of a coupling file.
    Scatter {
        coupling: PathBuf,
        /// Evaluate S(k) through the (A, B) form at this momentum.
        #[arg(long, requires = "general_ab", allow_negative_numbers = true)]
        k: Option<f64>,
        /// Convert to (A, B) form before solving; needs --k.
        #[arg(long, requires = "k")]
        general_ab: bool,
        /// Also write the matrix as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a scattering-matrix or coupling file as free-like.
    Classify {
        input: PathBuf,
        #[arg(long, default_value_t = FREELIKE_TOL)]
        tol: f64,
    },
    /// Build the approximating graph of a coupling.
    Approximate {
        coupling: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence study on the grid d_start * 2^-j, j = 0..d_steps.
    Converge {
        coupling: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
        d_start: f64,
        #[arg(long, default_value_t = 6)]
        d_steps: usize,
        /// CSV destination; printed to stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// List free-like couplings with real T.
    EnumerateFreelike {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        time_reversal: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERICAL, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularSystem { .. } | Error::InsufficientRows { .. } => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Scatter { coupling, k, general_ab, out: path } => {
            cmd_scatter(&coupling, k.filter(|_| general_ab), path.as_deref(), out)
        }
        Command::Classify { input, tol } => cmd_classify(&input, tol, out),
        Command::Approximate { coupling, d, out: path } => {
            cmd_approximate(&coupling, d, path.as_deref(), out)
        }
        Command::Converge { coupling, k, d_start, d_steps, csv } => {
            cmd_converge(&coupling, k, d_start, d_steps, csv.as_deref(), out)
        }
        Command::EnumerateFreelike { n, case, time_reversal, out: path } => {
            cmd_enumerate(n, case.into(), time_reversal, path.as_deref(), out)
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_coupling(path: &Path) -> std::result::Result<CouplingSt, Failure> {
    io::parse_coupling(&read(path)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => writeln!(out, "{text}").map_err(Failure::from),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

/// Rows of `re imi` pairs with 6 decimals, right-aligned.
pub fn format_matrix(m: &CMatrix) -> String {
    let clean = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x };
    let mut s = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row
            .iter()
            .map(|z| format!("{:>10.6}{:>+10.6}i", clean(z.re), clean(z.im)))
            .collect();
        s.push_str(&cells.join("  "));
        s.push('\n');
    }
    s
}

fn cmd_scatter(path: &Path, k: Option<f64>, json: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let coupling = read_coupling(path)?;
    let s = match k {
        None => ft_scattering(&coupling),
        Some(k) => ks_scattering(&coupling.to_ab(), k)?,
    };
    write!(out, "{}", format_matrix(s.matrix()))?;
    if let Some(p) = json {
        emit(&to_json(&ScatteringFile::from_matrix(&s)), Some(p), out)?;
    }
    Ok(EXIT_OK)
}

fn cmd_classify(path: &Path, tol: f64, out: &mut dyn Write) -> Outcome {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::usage(format!("tolerance {tol} must be positive")));
    }
    let text = read(path)?;
    let s: ScatteringMatrix = match io::parse_matrix_input(&text)? {
        MatrixInput::Coupling(file) => ft_scattering(&file.to_coupling()?),
        MatrixInput::Scattering(file) => file.to_matrix(tol)?,
    };
    if !is_freelike(&s, tol) {
        writeln!(out, "not free-like")?;
        return Ok(EXIT_FALSE);
    }
    let form = classify_freelike(&s, tol)?;
    let residual = realize_smatrix(&form).distance(&s);
    let phases: Vec<String> = form.phases().iter().map(|x| format!("{x:.6}")).collect();
    let perm: Vec<String> = form.permutation().as_slice().iter().map(|p| (p + 1).to_string()).collect();
    writeln!(out, "{}, p={}, phases [{}]", form.case(), form.p(), phases.join(", "))?;
    writeln!(out, "permutation [{}]", perm.join(", "))?;
    writeln!(out, "reconstruction error: {residual:.3e}")?;
    Ok(EXIT_OK)
}

fn cmd_approximate(path: &Path, d: f64, json: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let coupling = read_coupling(path)?;
    let graph = build_approximation(&coupling, d)?;
    let mut file = ApproxGraphFile::from_graph(&graph);
    file.reconstruction_residual = Some(graph.reconstruction_residual(&coupling));
    emit(&to_json(&file), json, out)?;
    Ok(EXIT_OK)
}

fn cmd_converge(
    path: &Path,
    k: f64,
    d_start: f64,
    steps: usize,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    if steps < 3 {
        return Err(Failure::usage(format!("--d-steps must be at least 3, got {steps}")));
    }
    let coupling = read_coupling(path)?;
    let report = convergence_study(&coupling, k, &halving_grid(d_start, steps))?;
    if let Some((d, e)) = report.failures().next() {
        return Err(Failure::numerical(format!(
            "solver failed at d = {d}, k = {k}: {e}; retry with k = {:.6} or {:.6}",
            k - 1e-3,
            k + 1e-3
        )));
    }
    match csv {
        Some(p) => fs::write(p, report.to_csv()).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        None => write!(out, "{}", report.to_csv())?,
    }
    let final_error = report.final_error().unwrap_or(f64::NAN);
    writeln!(out, "fitted order: {:.4}", report.fitted_order)?;
    writeln!(out, "final error: {final_error:.4e}")?;
    let pass = report.fitted_order >= MIN_ORDER && final_error < MAX_FINAL_ERROR;
    writeln!(out, "{}", if pass { "PASS" } else { "FAIL" })?;
    Ok(if pass { EXIT_OK } else { EXIT_FALSE })
}

fn cmd_enumerate(
    n: usize,
    case: FreeLikeCase,
    time_reversal: bool,
    json: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    if !time_reversal {
        return Err(Failure::usage(
            "continuous family; use --time-reversal for the finite subfamily",
        ));
    }
    let entries: Vec<CouplingWithScattering> = enumerate_time_reversal(n, case)?
        .iter()
        .map(|(c, s)| CouplingWithScattering::new(c, s))
        .collect();
    emit(&to_json(&entries), json, out)?;
    Ok(EXIT_OK)
}
