//! Independent eigenvalue verification used by the test suites: closed-form
//! 2x2 solutions and, for n <= 8, root isolation on the characteristic
//! polynomial. Deliberately separate from the rotation-based solve path.

use crate::matrix::{EigenDecomposition, Matrix, PivotBlock, SymmetricMatrix};
use thiserror::Error;

/// Largest dimension the characteristic-polynomial route accepts; float64
/// coefficients lose too much accuracy beyond this.
pub const MAX_CHARPOLY_DIM: usize = 8;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("dimension {0} exceeds the characteristic-polynomial cap of {MAX_CHARPOLY_DIM}")]
    DimensionTooLarge(usize),
    #[error("root isolation found {found} of {expected} eigenvalues")]
    RootIsolationFailed { found: usize, expected: usize },
    #[error("dimension mismatch: matrix is {matrix}, decomposition is {decomp}")]
    DimensionMismatch { matrix: usize, decomp: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Closed2x2,
    CharPolyBisection,
    ByConstruction,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    pub method: OracleMethod,
    pub certified_tol: f64,
}

/// Quadratic-formula eigenvalues of the 2x2 block, sorted descending.
pub fn eigenvalues_2x2(block: &PivotBlock) -> OracleResult {
    let d = block.a_pp - block.a_qq;
    let spread = (d * d + 4.0 * block.a_pq * block.a_pq).sqrt();
    let mid = 0.5 * (block.a_pp + block.a_qq);
    OracleResult {
        eigenvalues: vec![mid + 0.5 * spread, mid - 0.5 * spread],
        method: OracleMethod::Closed2x2,
        certified_tol: 1e-14 * (1.0 + block.a_pp.abs() + block.a_qq.abs() + block.a_pq.abs()),
    }
}

/// Eigenvalues via characteristic-polynomial root isolation for n <= 8.
///
/// Coefficients come from the trace recursion M_1 = A, c_1 = -tr(A),
/// M_{k+1} = A (M_k + c_k I), c_{k+1} = -tr(M_{k+1}) / (k+1); roots are
/// isolated by sign-change bisection between the critical points of the
/// polynomial on [-||A||_F, ||A||_F], refined to 1e-10 absolute, with one
/// deflation per found root so repeated eigenvalues are reported with their
/// multiplicity.
pub fn eigenvalues_charpoly(a: &SymmetricMatrix) -> Result<OracleResult, OracleError> {
    let n = a.n();
    if n > MAX_CHARPOLY_DIM {
        return Err(OracleError::DimensionTooLarge(n));
    }
    let coeffs = char_poly_coefficients(a.matrix());
    let fro = a.frobenius_norm();
    let bound = fro + 1e-6 * (1.0 + fro);
    let roots = real_roots(&coeffs, -bound, bound)?;
    let mut eigenvalues = roots;
    // Bisection ran on deflated polynomials; polish against the original to
    // undo deflation drift.
    for r in eigenvalues.iter_mut() {
        *r = newton_polish(&coeffs, *r, -bound, bound);
    }
    eigenvalues.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let certified_tol = certified_root_error(&coeffs, &eigenvalues).max(REFINE_TOL);
    Ok(OracleResult {
        eigenvalues,
        method: OracleMethod::CharPolyBisection,
        certified_tol,
    })
}

fn newton_polish(coeffs: &[f64], mut x: f64, lo: f64, hi: f64) -> f64 {
    let deriv = poly_derivative(coeffs);
    for _ in 0..3 {
        let p = poly_eval(coeffs, x);
        let dp = poly_eval(&deriv, x);
        if dp == 0.0 {
            break;
        }
        let next = x - p / dp;
        if !next.is_finite() || next < lo || next > hi {
            break;
        }
        x = next;
    }
    x
}

/// First-order a-posteriori root error: (|p(r)| + evaluation noise) / |p'(r)|,
/// maximized over the roots. Blows up near multiple roots, where the
/// characteristic-polynomial route genuinely loses half the digits; callers
/// needing tighter certification must fall back to constructed spectra.
fn certified_root_error(coeffs: &[f64], roots: &[f64]) -> f64 {
    let deriv = poly_derivative(coeffs);
    let mut worst = 0.0_f64;
    for &r in roots {
        let mut noise = 0.0;
        let mut power = 1.0;
        for &c in coeffs.iter().rev() {
            noise += c.abs() * power;
            power *= r.abs();
        }
        let p = poly_eval(coeffs, r).abs();
        let dp = poly_eval(&deriv, r).abs();
        let numer = p + coeffs.len() as f64 * f64::EPSILON * noise;
        worst = worst.max(numer / dp.max(f64::MIN_POSITIVE));
    }
    worst
}

/// Monic characteristic polynomial coefficients [1, c1, ..., cn] via the
/// trace recursion.
fn char_poly_coefficients(a: &Matrix) -> Vec<f64> {
    let n = a.n();
    let mut coeffs = vec![1.0];
    let mut m = a.clone();
    for k in 1..=n {
        let c = -m.trace() / k as f64;
        coeffs.push(c);
        if k == n {
            break;
        }
        // M <- A (M + c I)
        for i in 0..n {
            let v = m.get(i, i) + c;
            m.set(i, i, v);
        }
        let mut next = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut sum = 0.0;
                for l in 0..n {
                    sum += a.get(i, l) * m.get(l, j);
                }
                next.set(i, j, sum);
            }
        }
        m = next;
    }
    coeffs
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    let degree = coeffs.len() - 1;
    coeffs[..degree]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (degree - i) as f64)
        .collect()
}

/// Synthetic division of a monic-leading polynomial by (x - root).
fn deflate(coeffs: &[f64], root: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(coeffs.len() - 1);
    let mut acc = 0.0;
    for &c in &coeffs[..coeffs.len() - 1] {
        acc = acc * root + c;
        out.push(acc);
    }
    out
}

const REFINE_TOL: f64 = 1e-10;
const MIN_WIDTH: f64 = 1e-12;

fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = poly_eval(coeffs, lo);
    while hi - lo > REFINE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = poly_eval(coeffs, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_lo < 0.0) == (f_mid < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All real roots of a polynomial known to have only real roots in [lo, hi],
/// with multiplicity, via critical-point isolation plus deflation.
fn real_roots(coeffs: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>, OracleError> {
    let expected = coeffs.len() - 1;
    let mut remaining = coeffs.to_vec();
    let mut roots = Vec::with_capacity(expected);
    while remaining.len() > 1 {
        match find_one_root(&remaining, lo, hi) {
            Some(r) => {
                roots.push(r);
                remaining = deflate(&remaining, r);
            }
            None => {
                return Err(OracleError::RootIsolationFailed {
                    found: roots.len(),
                    expected,
                })
            }
        }
    }
    Ok(roots)
}

fn find_one_root(coeffs: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return None;
    }
    if degree == 1 {
        return Some((-coeffs[1] / coeffs[0]).clamp(lo, hi));
    }
    // Breakpoints: interval ends plus the critical points of the polynomial.
    let deriv = poly_derivative(coeffs);
    let mut breakpoints = vec![lo, hi];
    if let Ok(crit) = real_roots(&deriv, lo, hi) {
        breakpoints.extend(crit);
    }
    breakpoints.retain(|t| t.is_finite());
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());

    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < MIN_WIDTH {
            continue;
        }
        let fa = poly_eval(coeffs, a);
        let fb = poly_eval(coeffs, b);
        if fa == 0.0 {
            return Some(a);
        }
        if fb == 0.0 {
            return Some(b);
        }
        if (fa < 0.0) != (fb < 0.0) {
            return Some(bisect(coeffs, a, b));
        }
    }
    // No sign change: a multiple root sits at the breakpoint where |p| is
    // smallest, provided the value there is negligible at this scale.
    let scale = coeffs.iter().map(|c| c.abs()).fold(0.0_f64, f64::max);
    let width = (hi - lo).max(1.0);
    let zero_tol = 1e-7 * scale * width;
    breakpoints
        .iter()
        .copied()
        .min_by(|&a, &b| {
            poly_eval(coeffs, a)
                .abs()
                .partial_cmp(&poly_eval(coeffs, b).abs())
                .unwrap()
        })
        .filter(|&t| poly_eval(coeffs, t).abs() <= zero_tol)
}

/// max_i ||A v_i - lambda_i v_i||_2 over the decomposition's columns.
pub fn residual_check(
    a: &SymmetricMatrix,
    decomp: &EigenDecomposition,
) -> Result<f64, OracleError> {
    let n = a.n();
    if decomp.eigenvalues.len() != n || decomp.eigenvectors.n() != n {
        return Err(OracleError::DimensionMismatch {
            matrix: n,
            decomp: decomp.eigenvalues.len(),
        });
    }
    let mut worst = 0.0_f64;
    for col in 0..n {
        let mut norm_sq = 0.0;
        for i in 0..n {
            let mut av = 0.0;
            for j in 0..n {
                av += a.get(i, j) * decomp.eigenvectors.get(j, col);
            }
            let r = av - decomp.eigenvalues[col] * decomp.eigenvectors.get(i, col);
            norm_sq += r * r;
        }
        worst = worst.max(norm_sq.sqrt());
    }
    Ok(worst)
}

/// Determinant by Gaussian elimination with partial pivoting; used to
/// cross-check the product of oracle eigenvalues.
pub fn determinant(m: &Matrix) -> f64 {
    let n = m.n();
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if a.get(row, col).abs() > a.get(pivot, col).abs() {
                pivot = row;
            }
        }
        let pv = a.get(pivot, col);
        if pv == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a.get(col, j);
                a.set(col, j, a.get(pivot, j));
                a.set(pivot, j, tmp);
            }
            det = -det;
        }
        det *= a.get(col, col);
        for row in (col + 1)..n {
            let factor = a.get(row, col) / a.get(col, col);
            for j in col..n {
                a.set(row, j, a.get(row, j) - factor * a.get(col, j));
            }
        }
    }
    det
}
