//! `sqjacobi`: solve, compare, generate, and trace workflows over the
//! sqjacobi-core eigensolver.
//!
//! Exit codes are a stable contract: 0 success, 1 input/IO error,
//! 2 non-convergence, 3 method disagreement.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sqjacobi_core::io::{
    generate_symmetric, read_matrix_market, write_matrix_market, write_report, MatrixSpec,
    ReportFormat, RunReport,
};
use sqjacobi_core::matrix::{RotationMethod, SolverConfig, SymmetricMatrix};
use sqjacobi_core::solver::{
    check_quadratic_estimate, first_sweep_pivot_log, min_eigenvalue_gap, solve, SolveOutcome,
};

const EXIT_INPUT: u8 = 1;
const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_METHOD_DISAGREEMENT: u8 = 3;

/// Eigenvalue multiset agreement threshold for `compare`, relative to the
/// input's Frobenius norm.
const COMPARE_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "sqjacobi", about = "Jacobi eigensolver with a square-root rotation variant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolveFlags {
    /// Relative stopping tolerance: iterate until psi <= tol * ||A||_F.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Maximum number of cyclic sweeps.
    #[arg(long, default_value_t = 50)]
    max_sweeps: usize,
    /// Rotation variant: sqrt or givens.
    #[arg(long, default_value = "sqrt", value_parser = RotationMethod::from_str)]
    method: RotationMethod,
}

#[derive(Subcommand)]
enum Command {
    /// Diagonalize a Matrix Market file and print the spectrum.
    Solve {
        /// Input matrix in Matrix Market format.
        input: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        /// Report file; format chosen by --format.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json", value_parser = ReportFormat::from_str)]
        format: ReportFormat,
    },
    /// Run both rotation variants on the same input and compare them.
    Compare {
        input: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
    },
    /// Write a seeded random symmetric matrix in Matrix Market format.
    Gen {
        /// Dimension; ignored when --spectrum fixes it.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated eigenvalues; the matrix is built with exactly this
        /// spectrum.
        #[arg(long)]
        spectrum: Option<String>,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve while recording the off-norm after every rotation; write the
    /// per-rotation CSV plus a quadratic-estimate footer.
    Trace {
        input: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            input,
            flags,
            out,
            format,
        } => cmd_solve(&input, &flags, out.as_deref(), format),
        Command::Compare { input, flags } => cmd_compare(&input, &flags),
        Command::Gen {
            n,
            seed,
            spectrum,
            out,
        } => cmd_gen(n, seed, spectrum.as_deref(), &out),
        Command::Trace { input, flags, out } => cmd_trace(&input, &flags, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("sqjacobi: {message}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn config_from(flags: &SolveFlags) -> SolverConfig {
    SolverConfig {
        tol: flags.tol,
        max_sweeps: flags.max_sweeps,
        method: flags.method,
        ..SolverConfig::default()
    }
}

fn load(input: &std::path::Path) -> Result<SymmetricMatrix, String> {
    read_matrix_market(input).map_err(|e| format!("{}: {e}", input.display()))
}

fn run_solver(a: &SymmetricMatrix, config: &SolverConfig) -> Result<(SolveOutcome, f64), String> {
    let start = Instant::now();
    let outcome = solve(a, config).map_err(|e| e.to_string())?;
    Ok((outcome, start.elapsed().as_secs_f64() * 1e3))
}

fn report_from(outcome: &SolveOutcome, method: RotationMethod, wall_time_ms: f64) -> RunReport {
    RunReport {
        method: method.to_string(),
        n: outcome.decomposition.n(),
        sweeps: outcome.report.sweeps,
        rotations: outcome.report.rotations_applied,
        psi_history: outcome.report.sweep_psi.clone(),
        eigenvalues: outcome.decomposition.eigenvalues.clone(),
        wall_time_ms,
        converged: outcome.converged,
    }
}

/// 12 significant digits; full precision lives in the JSON report.
fn print_eigenvalues(eigenvalues: &[f64]) {
    println!("eigenvalues:");
    for v in eigenvalues {
        println!("  {v:.11e}");
    }
}

fn cmd_solve(
    input: &std::path::Path,
    flags: &SolveFlags,
    out: Option<&std::path::Path>,
    format: ReportFormat,
) -> Result<u8, String> {
    let a = load(input)?;
    let config = config_from(flags);
    let (outcome, wall_time_ms) = run_solver(&a, &config)?;

    print_eigenvalues(&outcome.decomposition.eigenvalues);
    println!("sweeps: {}", outcome.report.sweeps);
    println!("rotations: {}", outcome.report.rotations_applied);
    println!("psi: {:.6e}", outcome.report.psi);
    println!("converged: {}", outcome.converged);

    if let Some(path) = out {
        let report = report_from(&outcome, config.method, wall_time_ms);
        write_report(&report, path, format).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if outcome.converged {
        Ok(0)
    } else {
        eprintln!(
            "sqjacobi: no convergence after {} sweeps (psi = {:.6e})",
            outcome.report.sweeps, outcome.report.psi
        );
        Ok(EXIT_NO_CONVERGENCE)
    }
}

fn cmd_compare(input: &std::path::Path, flags: &SolveFlags) -> Result<u8, String> {
    let a = load(input)?;
    let methods = [RotationMethod::SqrtRotation, RotationMethod::GivensRotation];
    let mut outcomes = Vec::new();
    println!("method  sweeps  rotations  psi           converged");
    for method in methods {
        let config = SolverConfig {
            method,
            ..config_from(flags)
        };
        let (outcome, _) = run_solver(&a, &config)?;
        println!(
            "{:<7} {:<7} {:<10} {:<13.6e} {}",
            method.to_string(),
            outcome.report.sweeps,
            outcome.report.rotations_applied,
            outcome.report.psi,
            outcome.converged
        );
        outcomes.push(outcome);
    }

    let gap = outcomes[0]
        .decomposition
        .eigenvalues
        .iter()
        .zip(&outcomes[1].decomposition.eigenvalues)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0_f64, f64::max);
    println!("max eigenvalue gap: {gap:.6e}");

    println!("pivot log (first sweep):");
    println!("p  q  theta           x               cos(2*theta)/2  quadrant");
    for entry in first_sweep_pivot_log(&a) {
        println!(
            "{}  {}  {:<15.8e} {:<15.8e} {:<15.8e} {}",
            entry.p + 1,
            entry.q + 1,
            entry.theta,
            entry.x,
            entry.cos_two_theta_half,
            if entry.quadrant_match { "match" } else { "mirrored" }
        );
    }

    let both_converged = outcomes.iter().all(|o| o.converged);
    if !both_converged {
        eprintln!("sqjacobi: at least one method did not converge");
        return Ok(EXIT_NO_CONVERGENCE);
    }
    if gap > COMPARE_TOL * a.frobenius_norm().max(1.0) {
        eprintln!("sqjacobi: methods disagree by {gap:.6e}");
        return Ok(EXIT_METHOD_DISAGREEMENT);
    }
    Ok(0)
}

fn cmd_gen(
    n: Option<usize>,
    seed: u64,
    spectrum: Option<&str>,
    out: &std::path::Path,
) -> Result<u8, String> {
    let spec = match spectrum {
        Some(text) => {
            let values: Vec<f64> = text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| format!("bad spectrum entry '{s}': {e}"))
                })
                .collect::<Result<_, _>>()?;
            if let Some(n) = n {
                if n != values.len() {
                    return Err(format!(
                        "--n {n} conflicts with a spectrum of {} entries",
                        values.len()
                    ));
                }
            }
            MatrixSpec::with_spectrum(values, seed)
        }
        None => {
            let n = n.ok_or("gen needs --n or --spectrum")?;
            MatrixSpec::random(n, seed)
        }
    };
    let a = generate_symmetric(&spec).map_err(|e| e.to_string())?;
    write_matrix_market(&a, out).map_err(|e| format!("{}: {e}", out.display()))?;
    if let Some(spectrum) = &spec.spectrum {
        let mut sorted = spectrum.clone();
        sorted.sort_by(|x, y| y.partial_cmp(x).unwrap());
        print_eigenvalues(&sorted);
    }
    println!("wrote {}x{} matrix to {}", a.n(), a.n(), out.display());
    Ok(0)
}

fn cmd_trace(
    input: &std::path::Path,
    flags: &SolveFlags,
    out: &std::path::Path,
) -> Result<u8, String> {
    let a = load(input)?;
    let config = config_from(flags);
    let (outcome, _) = run_solver(&a, &config)?;

    let history = &outcome.report.psi_history;
    let mut csv = String::from("k,psi\n");
    for (k, psi) in history.iter().enumerate() {
        let _ = writeln!(csv, "{k},{psi:.16e}");
    }

    let gap = min_eigenvalue_gap(&outcome.decomposition.eigenvalues).unwrap_or(0.0);
    if gap > 0.0 {
        match check_quadratic_estimate(history, a.n(), gap) {
            Ok(estimate) => {
                let _ = writeln!(
                    csv,
                    "# quadratic estimate: gap_delta={gap:.6e} N={}",
                    estimate.rotations_per_sweep
                );
                for (k, (before, after)) in estimate.pairs.iter().enumerate() {
                    let _ = writeln!(
                        csv,
                        "# k={k} psi={before:.6e} psi_next_sweep={after:.6e} bound={}",
                        if estimate.bound_satisfied[k] { "satisfied" } else { "violated" }
                    );
                }
                match estimate.onset {
                    Some(onset) => {
                        let _ = writeln!(csv, "# onset={onset}");
                        println!("quadratic bound holds from k = {onset} on");
                    }
                    None => {
                        let _ = writeln!(csv, "# onset=none");
                        println!("quadratic bound violated at the end of the history");
                    }
                }
            }
            Err(e) => {
                let _ = writeln!(csv, "# quadratic estimate unavailable: {e}");
            }
        }
    } else {
        let _ = writeln!(csv, "# quadratic estimate unavailable: zero eigenvalue gap");
    }

    std::fs::write(out, csv).map_err(|e| format!("{}: {e}", out.display()))?;
    println!(
        "traced {} psi samples over {} sweeps to {}",
        history.len(),
        outcome.report.sweeps,
        out.display()
    );
    if outcome.converged {
        Ok(0)
    } else {
        eprintln!(
            "sqjacobi: no convergence after {} sweeps (psi = {:.6e})",
            outcome.report.sweeps, outcome.report.psi
        );
        Ok(EXIT_NO_CONVERGENCE)
    }
}
