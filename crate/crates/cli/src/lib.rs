//! Command-line front end for `expfix-core`.
//!
//! Exit codes: 0 success, 1 valid run with a negative verdict, 2 usage or
//! input errors, 3 numerical failures.

pub mod complex;
pub mod matrix_file;

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use expfix_core::matfun::expm;
use expfix_core::quantum::{gate_catalog, gate_identity_check, is_closed, is_closed_under_generators, pauli_group};
use expfix_core::solver::{construct_normal_solution, solve_z, verify, BranchRange, SolutionKind, SolveOptions};
use expfix_core::specfun::lambert_w;
use expfix_core::{BranchIndex, Complex64};
use thiserror::Error;

use crate::complex::{format_complex, parse_complex};
use crate::matrix_file::{read_matrix, serialize_matrix, write_matrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{file}: {position}: {message}")]
    Parse {
        file: String,
        position: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Core(#[from] expfix_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use expfix_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => EXIT_USAGE,
            CliError::Core(E::Shape(_) | E::Size(_) | E::NonFinite { .. } | E::UnknownGate(_)) => EXIT_USAGE,
            CliError::Core(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

fn parse_branch_range(s: &str) -> Result<BranchRange, CliError> {
    let bad = || CliError::Usage(format!("branch range '{s}' is not MIN:MAX"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: i32 = lo.parse().map_err(|_| bad())?;
    let hi: i32 = hi.parse().map_err(|_| bad())?;
    BranchRange::new(lo, hi).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_branch(s: &str) -> Result<BranchIndex, CliError> {
    let k: i32 = s
        .parse()
        .map_err(|_| CliError::Usage(format!("branch index '{s}' is not an integer")))?;
    BranchIndex::new(k).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_tol(s: &str) -> Result<f64, CliError> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(CliError::Usage(format!("tolerance '{s}' must be a positive number"))),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "expfix",
    version,
    about = "Solve, verify and construct solutions of exp(z(A - I)) = A"
)]
pub struct Cli {
    /// Verification tolerance (relative to max(1, ||A||_F)).
    #[arg(long, global = true, default_value = "1e-9", value_parser = parse_tol)]
    pub tol: f64,
    /// Seed for random eigenbases.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Output file for commands that produce a matrix.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether exp(z(A - I)) = A.
    Verify {
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        z: Complex64,
    },
    /// Enumerate the z solving the equation for a matrix.
    Solve {
        matrix: PathBuf,
        /// Anchor branch range MIN:MAX.
        #[arg(long, default_value = "-8:8", allow_hyphen_values = true, value_parser = parse_branch_range)]
        branches: BranchRange,
    },
    /// Build a normal matrix solving the equation for z.
    Construct {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        z: Complex64,
        /// Lambert W branch per non-unit eigenvalue, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_branch)]
        branches: Vec<BranchIndex>,
        /// Number of eigenvalues equal to 1.
        #[arg(long, default_value_t = 0)]
        units: usize,
    },
    /// Check the gate catalog against the equation at z = -i pi/2 and i pi/2.
    Gates,
    /// Order and closure of the n-qubit Pauli group.
    Pauli { n: usize },
    /// Evaluate the Lambert W function on branch k.
    Lambertw {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        x: Complex64,
        #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_branch)]
        k: BranchIndex,
    },
    /// Evaluate exp(zA).
    Expm {
        matrix: PathBuf,
        #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = parse_complex)]
        z: Complex64,
    },
}

struct Report<'a> {
    out: &'a mut dyn Write,
    format: Format,
}

impl Report<'_> {
    fn field(&mut self, key: &str, value: impl std::fmt::Display) -> io::Result<()> {
        match self.format {
            Format::Human => writeln!(self.out, "{key}: {value}"),
            Format::Machine => writeln!(self.out, "{key}={value}"),
        }
    }
}

fn join_branches(bs: &[BranchIndex]) -> String {
    bs.iter().map(|b| b.get().to_string()).collect::<Vec<_>>().join(",")
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Io {
        path: "<output>".into(),
        source: e,
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let options = |branches: BranchRange| SolveOptions {
        tol: cli.tol,
        branches,
        ..SolveOptions::default()
    };
    match &cli.command {
        Command::Verify { matrix, z } => {
            let a = read_matrix(matrix)?;
            let v = verify(&a, *z, cli.tol)?;
            let mut r = Report {
                out,
                format: cli.format,
            };
            r.field("z", format_complex(*z)).map_err(io_err)?;
            r.field("residual", format!("{:e}", v.residual)).map_err(io_err)?;
            r.field("verified", v.verified).map_err(io_err)?;
            Ok(if v.verified { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Solve { matrix, branches } => {
            let a = read_matrix(matrix)?;
            let set = solve_z(&a, &options(*branches))?;
            let mut r = Report {
                out,
                format: cli.format,
            };
            r.field("kind", set.kind).map_err(io_err)?;
            r.field("classification", set.classification).map_err(io_err)?;
            r.field("branches", set.branch_range).map_err(io_err)?;
            if let Some(anchor) = set.anchor {
                r.field("anchor", format_complex(anchor)).map_err(io_err)?;
            }
            r.field("count", set.solutions.len()).map_err(io_err)?;
            for (i, s) in set.solutions.iter().enumerate() {
                let line = match cli.format {
                    Format::Human => format!(
                        "  z = {}  anchor_branch = {}  branches = [{}]  residual = {:e}",
                        format_complex(s.z),
                        s.anchor_branch,
                        join_branches(&s.per_eigenvalue_branches),
                        s.residual
                    ),
                    Format::Machine => format!(
                        "solution={i} z={} anchor_branch={} branches={} residual={:e}",
                        format_complex(s.z),
                        s.anchor_branch,
                        join_branches(&s.per_eigenvalue_branches),
                        s.residual
                    ),
                };
                writeln!(r.out, "{line}").map_err(io_err)?;
            }
            Ok(if set.kind == SolutionKind::Empty {
                EXIT_NEGATIVE
            } else {
                EXIT_OK
            })
        }
        Command::Construct { z, branches, units } => {
            let a = construct_normal_solution(*z, branches, *units, cli.seed)?;
            let v = verify(&a, *z, cli.tol)?;
            // without --out the matrix goes to stdout and the report to stderr
            let report_to: &mut dyn Write = match &cli.out {
                Some(path) => {
                    write_matrix(path, &a)?;
                    out
                }
                None => {
                    out.write_all(serialize_matrix(&a).as_bytes()).map_err(io_err)?;
                    err
                }
            };
            let mut r = Report {
                out: report_to,
                format: cli.format,
            };
            r.field("n", a.nrows()).map_err(io_err)?;
            r.field("residual", format!("{:e}", v.residual)).map_err(io_err)?;
            r.field("verified", v.verified).map_err(io_err)?;
            Ok(if v.verified { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Gates => {
            let mut all = true;
            for g in gate_catalog() {
                let rep = gate_identity_check(&g.matrix, cli.tol)?;
                all &= rep.passed;
                let status = if rep.passed { "pass" } else { "fail" };
                let line = match cli.format {
                    Format::Human => format!(
                        "{:<5} qubits={} involutory={} residual(-i pi/2)={:.3e} residual(+i pi/2)={:.3e} k={},{} {status}",
                        g.name, g.qubits, rep.involutory, rep.residual_minus, rep.residual_plus, rep.branch_minus, rep.branch_plus
                    ),
                    Format::Machine => format!(
                        "gate={} qubits={} involutory={} residual_minus={:e} residual_plus={:e} branch_minus={} branch_plus={} passed={}",
                        g.name, g.qubits, rep.involutory, rep.residual_minus, rep.residual_plus, rep.branch_minus, rep.branch_plus, rep.passed
                    ),
                };
                writeln!(out, "{line}").map_err(io_err)?;
            }
            Ok(if all { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Pauli { n } => {
            let group = pauli_group(*n)?;
            let closed = if *n <= 3 {
                is_closed(&group)?
            } else {
                is_closed_under_generators(&group)?
            };
            match cli.format {
                Format::Human => writeln!(
                    out,
                    "order {}, {}",
                    group.len(),
                    if closed { "closed" } else { "not closed" }
                ),
                Format::Machine => writeln!(out, "order={}\nclosed={closed}", group.len()),
            }
            .map_err(io_err)?;
            Ok(if closed { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Lambertw { x, k } => {
            let w = lambert_w(*x, *k)?;
            let residual = (w * w.exp() - x).norm();
            let mut r = Report {
                out,
                format: cli.format,
            };
            match cli.format {
                Format::Human => writeln!(r.out, "W_{}({}) = {}", k, format_complex(*x), format_complex(w)),
                Format::Machine => writeln!(r.out, "value={}", format_complex(w)),
            }
            .map_err(io_err)?;
            r.field("residual", format!("{residual:e}")).map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Expm { matrix, z } => {
            let a = read_matrix(matrix)?;
            let e = expm(&a.scale(*z))?;
            match &cli.out {
                Some(path) => write_matrix(path, &e)?,
                None => out.write_all(serialize_matrix(&e).as_bytes()).map_err(io_err)?,
            }
            Ok(EXIT_OK)
        }
    }
}
