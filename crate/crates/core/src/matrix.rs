//! Validated matrix types and solver configuration shared by all modules.
//!
//! Indices are 0-based throughout the crate.

use thiserror::Error;

/// Default relative tolerance used when validating symmetry of parsed input.
pub const DEFAULT_SYM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix must have dimension >= 1")]
    Empty,
    #[error("asymmetry at ({i},{j}): |{upper} - {lower}| = {drift:e} exceeds tolerance {tol:e}")]
    AsymmetryExceeded {
        i: usize,
        j: usize,
        upper: f64,
        lower: f64,
        drift: f64,
        tol: f64,
    },
    #[error("non-finite entry at ({i},{j})")]
    NonFinite { i: usize, j: usize },
    #[error("invalid pivot indices (p={p}, q={q}) for dimension {n}")]
    BadPivot { p: usize, q: usize, n: usize },
    #[error("ragged rows: row {row} has {len} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        len: usize,
        expected: usize,
    },
}

/// Dense square matrix of f64, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from row slices, checking squareness.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                if rows.iter().all(|r| r.len() == rows[0].len()) {
                    return Err(MatrixError::NonSquare {
                        rows: n,
                        cols: rows[0].len(),
                    });
                }
                return Err(MatrixError::RaggedRows {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Dense symmetric matrix, validated and symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: Matrix,
}

impl SymmetricMatrix {
    /// Validates a raw square grid and symmetrizes it by averaging mirrored
    /// entries. Asymmetry beyond `sym_tol * max(1, ||raw||_F)` is an error,
    /// as is any NaN or infinity.
    pub fn validate(raw: &Matrix, sym_tol: f64) -> Result<Self, MatrixError> {
        let n = raw.n();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        for i in 0..n {
            for j in 0..n {
                if !raw.get(i, j).is_finite() {
                    return Err(MatrixError::NonFinite { i, j });
                }
            }
        }
        let scale = sym_tol * raw.frobenius_norm().max(1.0);
        let mut m = raw.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let a = raw.get(i, j);
                let b = raw.get(j, i);
                let drift = (a - b).abs();
                if drift > scale {
                    return Err(MatrixError::AsymmetryExceeded {
                        i,
                        j,
                        upper: a,
                        lower: b,
                        drift,
                        tol: scale,
                    });
                }
                let avg = 0.5 * (a + b);
                m.set(i, j, avg);
                m.set(j, i, avg);
            }
        }
        Ok(SymmetricMatrix { inner: m })
    }

    pub fn from_rows(rows: &[Vec<f64>], sym_tol: f64) -> Result<Self, MatrixError> {
        Self::validate(&Matrix::from_rows(rows)?, sym_tol)
    }

    /// Wraps a matrix that is symmetric by construction (e.g. mirrored while
    /// assembling). Finiteness is still checked.
    pub(crate) fn from_symmetric_parts(m: Matrix) -> Result<Self, MatrixError> {
        Self::validate(&m, DEFAULT_SYM_TOL)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn to_matrix(&self) -> Matrix {
        self.inner.clone()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn pivot_block(&self, p: usize, q: usize) -> Result<PivotBlock, MatrixError> {
        PivotBlock::from_matrix(&self.inner, p, q)
    }
}

/// The 2x2 symmetric sub-block at pivot (p, q), p < q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotBlock {
    pub a_pp: f64,
    pub a_pq: f64,
    pub a_qq: f64,
    pub p: usize,
    pub q: usize,
}

impl PivotBlock {
    pub fn new(a_pp: f64, a_pq: f64, a_qq: f64, p: usize, q: usize) -> Result<Self, MatrixError> {
        if p >= q {
            return Err(MatrixError::BadPivot { p, q, n: 0 });
        }
        Ok(PivotBlock {
            a_pp,
            a_pq,
            a_qq,
            p,
            q,
        })
    }

    pub fn from_matrix(m: &Matrix, p: usize, q: usize) -> Result<Self, MatrixError> {
        if p >= q || q >= m.n() {
            return Err(MatrixError::BadPivot { p, q, n: m.n() });
        }
        Ok(PivotBlock {
            a_pp: m.get(p, p),
            a_pq: m.get(p, q),
            a_qq: m.get(q, q),
            p,
            q,
        })
    }
}

/// Which 2x2 rotation is built at each pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationMethod {
    /// Square-root-parameterized rotation with entries sqrt(x+1/2), sqrt(1/2-x).
    SqrtRotation,
    /// Classical angle-parameterized Jacobi rotation.
    GivensRotation,
}

impl std::str::FromStr for RotationMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sqrt" => Ok(RotationMethod::SqrtRotation),
            "givens" => Ok(RotationMethod::GivensRotation),
            other => Err(format!("unknown method '{other}' (expected 'sqrt' or 'givens')")),
        }
    }
}

impl std::fmt::Display for RotationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RotationMethod::SqrtRotation => write!(f, "sqrt"),
            RotationMethod::GivensRotation => write!(f, "givens"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative stopping tolerance: iterate until psi <= tol * ||A||_F.
    pub tol: f64,
    /// Maximum number of cyclic sweeps before giving up.
    pub max_sweeps: usize,
    pub method: RotationMethod,
    /// Interval shift of the rotation parameterization. Only 1/2 has
    /// implemented code paths.
    pub shift_delta: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-12,
            max_sweeps: 50,
            method: RotationMethod::SqrtRotation,
            shift_delta: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.shift_delta > 0.0 && self.shift_delta < 1.0) {
            return Err(format!(
                "shift_delta must lie in (0, 1), got {}",
                self.shift_delta
            ));
        }
        Ok(())
    }
}

/// Eigenvalues sorted descending with the matching orthogonal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Frobenius norm of V^T V - I.
    pub fn orthogonality_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        let n = v.n();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut dot = 0.0;
                for k in 0..n {
                    dot += v.get(k, i) * v.get(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                sum += (dot - target) * (dot - target);
            }
        }
        sum.sqrt()
    }
}
