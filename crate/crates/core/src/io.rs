//! Matrix Market input/output, convergence-report emission, and seeded
//! generation of symmetric test matrices with controlled spectra.
//!
//! The generator's PRNG is part of the on-disk reproducibility contract: it
//! is splitmix64 (state advanced by 0x9E3779B97F4A7C15, finalized with the
//! 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB mix), uniform doubles taken from
//! the top 53 bits, and standard normals drawn by the Box-Muller transform.
//! Identical specs therefore produce identical bytes on any port.

use crate::matrix::{Matrix, MatrixError, SymmetricMatrix, DEFAULT_SYM_TOL};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported matrix market qualifier: {0}")]
    UnsupportedField(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("bad matrix spec: {0}")]
    BadSpec(String),
}

// ---------------------------------------------------------------------------
// Matrix Market

/// Reads a real Matrix Market file (array or coordinate, general or
/// symmetric) into a validated symmetric matrix.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SymmetricMatrix, IoError> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix_market(&text)
}

pub fn parse_matrix_market(text: &str) -> Result<SymmetricMatrix, IoError> {
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 5 || tokens[0] != "%%MatrixMarket" || tokens[1] != "matrix" {
        return Err(parse_err(
            1,
            "header must be '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    let format = tokens[2].to_ascii_lowercase();
    let field = tokens[3].to_ascii_lowercase();
    let symmetry = tokens[4].to_ascii_lowercase();
    if format != "coordinate" && format != "array" {
        return Err(parse_err(1, &format!("unknown format '{format}'")));
    }
    match field.as_str() {
        "real" | "integer" => {}
        other => return Err(IoError::UnsupportedField(other.to_string())),
    }
    let symmetric = match symmetry.as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(IoError::UnsupportedField(other.to_string())),
    };

    // Skip comments and blank lines up to the size line.
    let mut size_line = None;
    for (idx, line) in lines.by_ref() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some((idx + 1, trimmed.to_string()));
        break;
    }
    let (size_lineno, size_text) =
        size_line.ok_or_else(|| parse_err(1, "missing size line"))?;
    let dims: Vec<&str> = size_text.split_whitespace().collect();

    let mut data_lines = lines.filter_map(|(idx, line)| {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            None
        } else {
            Some((idx + 1, trimmed.to_string()))
        }
    });

    let raw = if format == "coordinate" {
        if dims.len() != 3 {
            return Err(parse_err(size_lineno, "expected 'rows cols nnz'"));
        }
        let rows = parse_dim(dims[0], size_lineno)?;
        let cols = parse_dim(dims[1], size_lineno)?;
        let nnz = parse_dim(dims[2], size_lineno)?;
        if rows != cols {
            return Err(IoError::Matrix(MatrixError::NonSquare { rows, cols }));
        }
        let mut m = Matrix::zeros(rows);
        for _ in 0..nnz {
            let (lineno, line) = data_lines
                .next()
                .ok_or_else(|| parse_err(size_lineno, "fewer entries than declared"))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(parse_err(lineno, "expected 'i j value'"));
            }
            let i = parse_dim(parts[0], lineno)?;
            let j = parse_dim(parts[1], lineno)?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(parse_err(lineno, "index out of range"));
            }
            let v = parse_value(parts[2], lineno)?;
            m.set(i - 1, j - 1, v);
            if symmetric && i != j {
                m.set(j - 1, i - 1, v);
            }
        }
        m
    } else {
        if dims.len() != 2 {
            return Err(parse_err(size_lineno, "expected 'rows cols'"));
        }
        let rows = parse_dim(dims[0], size_lineno)?;
        let cols = parse_dim(dims[1], size_lineno)?;
        if rows != cols {
            return Err(IoError::Matrix(MatrixError::NonSquare { rows, cols }));
        }
        let mut m = Matrix::zeros(rows);
        // Array data is column-major; symmetric files carry the lower
        // triangle only.
        let mut coords = Vec::new();
        for j in 0..cols {
            let start = if symmetric { j } else { 0 };
            for i in start..rows {
                coords.push((i, j));
            }
        }
        for (i, j) in coords {
            let (lineno, line) = data_lines
                .next()
                .ok_or_else(|| parse_err(size_lineno, "fewer entries than declared"))?;
            let v = parse_value(line.split_whitespace().next().unwrap_or(""), lineno)?;
            m.set(i, j, v);
            if symmetric && i != j {
                m.set(j, i, v);
            }
        }
        m
    };

    Ok(SymmetricMatrix::validate(&raw, DEFAULT_SYM_TOL)?)
}

fn parse_err(line: usize, msg: &str) -> IoError {
    IoError::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn parse_dim(token: &str, line: usize) -> Result<usize, IoError> {
    token
        .parse()
        .map_err(|_| parse_err(line, &format!("invalid integer '{token}'")))
}

fn parse_value(token: &str, line: usize) -> Result<f64, IoError> {
    token
        .parse()
        .map_err(|_| parse_err(line, &format!("invalid number '{token}'")))
}

/// Writes the lower triangle in coordinate symmetric format with 17
/// significant digits, enough for a bit-exact round trip.
pub fn write_matrix_market(m: &SymmetricMatrix, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, matrix_market_string(m))?;
    Ok(())
}

pub fn matrix_market_string(m: &SymmetricMatrix) -> String {
    let n = m.n();
    let nnz = n * (n + 1) / 2;
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(out, "{n} {n} {nnz}");
    for i in 0..n {
        for j in 0..=i {
            let _ = writeln!(out, "{} {} {:.16e}", i + 1, j + 1, m.get(i, j));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Seeded generation

/// Recipe for a reproducible symmetric test matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSpec {
    pub n: usize,
    /// When given, the matrix is Q diag(spectrum) Q^T for a seeded random
    /// orthogonal Q, so the eigenvalues are known by construction.
    pub spectrum: Option<Vec<f64>>,
    pub seed: u64,
    /// Uniform entry range for the unstructured case.
    pub entry_scale: f64,
}

impl MatrixSpec {
    pub fn random(n: usize, seed: u64) -> Self {
        MatrixSpec {
            n,
            spectrum: None,
            seed,
            entry_scale: 1.0,
        }
    }

    pub fn with_spectrum(spectrum: Vec<f64>, seed: u64) -> Self {
        MatrixSpec {
            n: spectrum.len(),
            spectrum: Some(spectrum),
            seed,
            entry_scale: 1.0,
        }
    }
}

/// splitmix64; the fixed constants are part of the reproducibility contract.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Standard normal via Box-Muller.
    pub fn next_normal(&mut self) -> f64 {
        let mut u1 = self.next_f64();
        if u1 == 0.0 {
            u1 = f64::MIN_POSITIVE;
        }
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Builds the seeded symmetric matrix described by `spec`.
pub fn generate_symmetric(spec: &MatrixSpec) -> Result<SymmetricMatrix, IoError> {
    if spec.n == 0 {
        return Err(IoError::BadSpec("dimension must be >= 1".into()));
    }
    if spec.entry_scale <= 0.0 || spec.entry_scale.is_nan() {
        return Err(IoError::BadSpec(format!(
            "entry_scale must be positive, got {}",
            spec.entry_scale
        )));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let n = spec.n;
    match &spec.spectrum {
        Some(spectrum) => {
            if spectrum.len() != n {
                return Err(IoError::BadSpec(format!(
                    "spectrum has {} entries for dimension {}",
                    spectrum.len(),
                    n
                )));
            }
            if spectrum.iter().any(|v| !v.is_finite()) {
                return Err(IoError::BadSpec("spectrum entries must be finite".into()));
            }
            let q = random_orthogonal(n, &mut rng);
            // A = Q diag(spectrum) Q^T, assembled symmetrically.
            let mut a = Matrix::zeros(n);
            for i in 0..n {
                for j in 0..=i {
                    let mut sum = 0.0;
                    for (k, &lambda) in spectrum.iter().enumerate() {
                        sum += q.get(i, k) * lambda * q.get(j, k);
                    }
                    a.set(i, j, sum);
                    a.set(j, i, sum);
                }
            }
            Ok(SymmetricMatrix::from_symmetric_parts(a)?)
        }
        None => {
            let mut a = Matrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let v = (2.0 * rng.next_f64() - 1.0) * spec.entry_scale;
                    a.set(i, j, v);
                }
            }
            let mut sym = Matrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    sym.set(i, j, 0.5 * (a.get(i, j) + a.get(j, i)));
                }
            }
            Ok(SymmetricMatrix::from_symmetric_parts(sym)?)
        }
    }
}

/// Orthogonal factor of a random normal matrix by modified Gram-Schmidt.
fn random_orthogonal(n: usize, rng: &mut SplitMix64) -> Matrix {
    let mut q = Matrix::zeros(n);
    for col in 0..n {
        loop {
            let mut v: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
            for prev in 0..col {
                let dot: f64 = (0..n).map(|i| v[i] * q.get(i, prev)).sum();
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi -= dot * q.get(i, prev);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for (i, &vi) in v.iter().enumerate() {
                    q.set(i, col, vi / norm);
                }
                break;
            }
        }
    }
    q
}

// ---------------------------------------------------------------------------
// Run reports

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub method: String,
    pub n: usize,
    pub sweeps: usize,
    pub rotations: usize,
    /// Off-norm after each sweep.
    pub psi_history: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub wall_time_ms: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format '{other}' (expected 'json' or 'csv')")),
        }
    }
}

pub fn report_json_string(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// CSV history: header 'sweep,psi' plus one row per sweep.
pub fn report_csv_string(report: &RunReport) -> String {
    let mut out = String::from("sweep,psi\n");
    for (i, psi) in report.psi_history.iter().enumerate() {
        let _ = writeln!(out, "{},{:.16e}", i + 1, psi);
    }
    out
}

/// Writes the report; the CSV form also drops the full JSON summary next to
/// it at `<path>.summary.json`.
pub fn write_report(
    report: &RunReport,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<(), IoError> {
    let path = path.as_ref();
    match format {
        ReportFormat::Json => std::fs::write(path, report_json_string(report))?,
        ReportFormat::Csv => {
            std::fs::write(path, report_csv_string(report))?;
            let mut summary = path.as_os_str().to_os_string();
            summary.push(".summary.json");
            std::fs::write(summary, report_json_string(report))?;
        }
    }
    Ok(())
}
