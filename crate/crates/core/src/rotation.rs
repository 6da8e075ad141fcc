//! 2x2 pivot mathematics.
//!
//! A plane rotation acting on rows/columns (p, q) is written here as the pair
//! (c, s) applied as
//!
//! ```text
//! row_p <- c*row_p + s*row_q          col_p <- c*col_p + s*col_q
//! row_q <- -s*row_p + c*row_q         col_q <- -s*col_p + c*col_q
//! ```
//!
//! (old values on the right-hand sides). The square-root variant takes
//! c = sqrt(x + 1/2), s = sqrt(1/2 - x) for a parameter x in [-1/2, 1/2]; the
//! off-diagonal entry of the transformed block is
//! f(x) = (a_qq - a_pp)*sqrt(1/4 - x^2) + 2*a_pq*x, and the pivot is
//! annihilated at the unique root x0 of f.

use crate::matrix::{Matrix, PivotBlock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RotationError {
    #[error("pivot entry a_pq is zero; use the identity rotation")]
    ZeroOffDiagonal,
    #[error("rotation parameter {0} outside [-1/2, 1/2]")]
    ParameterOutOfRange(f64),
    #[error("index out of range: rows ({i},{k}), cols [{j1},{j2}] for dimension {n}")]
    IndexOutOfRange {
        i: usize,
        k: usize,
        j1: usize,
        j2: usize,
        n: usize,
    },
}

/// A raw (c, s) pair applied through the row/column kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneRotation {
    pub c: f64,
    pub s: f64,
}

impl PlaneRotation {
    pub const IDENTITY: PlaneRotation = PlaneRotation { c: 1.0, s: 0.0 };
}

/// Square-root rotation parameters: c = sqrt(x+1/2), s = sqrt(1/2-x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationParams {
    pub x: f64,
    pub c: f64,
    pub s: f64,
}

impl RotationParams {
    pub fn plane(&self) -> PlaneRotation {
        PlaneRotation {
            c: self.c,
            s: self.s,
        }
    }
}

/// Which open sub-interval of [-1/2, 1/2] holds the annihilating root x0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootInterval {
    /// x0 in ]-1/2, 0[
    NegativeHalf,
    /// x0 = 0 (equal diagonal entries, a_pq != 0)
    Zero,
    /// x0 in ]0, 1/2[
    PositiveHalf,
    /// a_pq = 0: nothing to annihilate, identity rotation applies
    Boundary,
}

/// The two diagonal values produced at (p,p) and (q,q) by the annihilating
/// rotation; as an unordered pair they are the eigenvalues of the 2x2 block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedPair {
    pub lambda_star: f64,
    pub lambda_dstar: f64,
}

/// Solves f(x) = (a_qq - a_pp)*sqrt(1/4 - x^2) + 2*a_pq*x = 0 in closed form.
///
/// The result is clamped into [-1/2, 1/2].
pub fn solve_pivot_parameter(block: &PivotBlock) -> Result<f64, RotationError> {
    if block.a_pq == 0.0 {
        return Err(RotationError::ZeroOffDiagonal);
    }
    let d = block.a_qq - block.a_pp;
    let denom = 2.0 * (d * d + 4.0 * block.a_pq * block.a_pq).sqrt();
    let x0 = if block.a_pq > 0.0 { -d / denom } else { d / denom };
    Ok(x0.clamp(-0.5, 0.5))
}

/// Builds (c, s) = (sqrt(x+1/2), sqrt(1/2-x)); square-root arguments are
/// clamped at 0 against rounding.
pub fn rotation_from_parameter(x: f64) -> Result<RotationParams, RotationError> {
    const EPS: f64 = 1e-12;
    if !(-0.5 - EPS..=0.5 + EPS).contains(&x) {
        return Err(RotationError::ParameterOutOfRange(x));
    }
    let x = x.clamp(-0.5, 0.5);
    let c = (x + 0.5).max(0.0).sqrt();
    let s = (0.5 - x).max(0.0).sqrt();
    Ok(RotationParams { x, c, s })
}

/// Builds the annihilating rotation for a block directly, without forming x0
/// first. Algebraically identical to
/// `rotation_from_parameter(solve_pivot_parameter(block))`, but the smaller of
/// c^2 = 1/2 + x0 and s^2 = 1/2 - x0 is computed as 4*a_pq^2 / (2S*(S+|d|))
/// with S = sqrt(d^2 + 4*a_pq^2), d = a_qq - a_pp. The naive square roots
/// round the smaller entry to exactly 0 once a_pq^2/d^2 drops below machine
/// epsilon, turning the rotation into a pure swap that no longer shrinks the
/// pivot; this form keeps full relative accuracy in both entries.
pub fn rotation_from_block(block: &PivotBlock) -> Result<RotationParams, RotationError> {
    if block.a_pq == 0.0 {
        return Err(RotationError::ZeroOffDiagonal);
    }
    let d = block.a_qq - block.a_pp;
    let spread = (d * d + 4.0 * block.a_pq * block.a_pq).sqrt();
    let large = spread + d.abs();
    let small = 4.0 * block.a_pq * block.a_pq / large;
    // (S - d, S + d) without cancellation.
    let (s_minus_d, s_plus_d) = if d >= 0.0 { (small, large) } else { (large, small) };
    // For a_pq > 0: x0 = -d/(2S), so c^2 = (S-d)/(2S); mirrored for a_pq < 0.
    let (c_sq, s_sq) = if block.a_pq > 0.0 {
        (s_minus_d / (2.0 * spread), s_plus_d / (2.0 * spread))
    } else {
        (s_plus_d / (2.0 * spread), s_minus_d / (2.0 * spread))
    };
    let c = c_sq.min(1.0).sqrt();
    let s = s_sq.min(1.0).sqrt();
    Ok(RotationParams {
        x: (c_sq - 0.5).clamp(-0.5, 0.5),
        c,
        s,
    })
}

/// The rotation used when a_pq = 0: (x, c, s) = (1/2, 1, 0).
pub fn identity_rotation() -> RotationParams {
    RotationParams {
        x: 0.5,
        c: 1.0,
        s: 0.0,
    }
}

/// Classifies the sub-interval holding x0 from the signs of a_pq and
/// a_qq - a_pp, without solving.
pub fn classify_root_interval(block: &PivotBlock) -> RootInterval {
    if block.a_pq == 0.0 {
        return RootInterval::Boundary;
    }
    let d = block.a_qq - block.a_pp;
    if d == 0.0 {
        return RootInterval::Zero;
    }
    let same_sign = (block.a_pq > 0.0) == (d > 0.0);
    if same_sign {
        RootInterval::NegativeHalf
    } else {
        RootInterval::PositiveHalf
    }
}

/// Predicts the diagonal values produced by the annihilating rotation, with
/// the sign-case assignment: for a_pq > 0 the larger value lands at (p,p),
/// for a_pq < 0 the smaller one does.
pub fn predicted_eigenvalues(block: &PivotBlock) -> PredictedPair {
    if block.a_pq == 0.0 {
        // Already diagonal: the identity rotation leaves a_pp at (p,p).
        return PredictedPair {
            lambda_star: block.a_pp,
            lambda_dstar: block.a_qq,
        };
    }
    let d = block.a_qq - block.a_pp;
    let spread = (d * d + 4.0 * block.a_pq * block.a_pq).sqrt();
    let mid = 0.5 * (block.a_pp + block.a_qq);
    if block.a_pq > 0.0 {
        PredictedPair {
            lambda_star: mid + 0.5 * spread,
            lambda_dstar: mid - 0.5 * spread,
        }
    } else {
        PredictedPair {
            lambda_star: mid - 0.5 * spread,
            lambda_dstar: mid + 0.5 * spread,
        }
    }
}

fn check_indices(
    n: usize,
    i: usize,
    k: usize,
    j1: usize,
    j2: usize,
) -> Result<(), RotationError> {
    if i >= k || k >= n || j1 > j2 || j2 >= n {
        return Err(RotationError::IndexOutOfRange { i, k, j1, j2, n });
    }
    Ok(())
}

/// Left-multiplies rows (i, k) of M by the rotation, columns j1..=j2.
/// Both new values are computed from saved old values.
pub fn apply_left(
    m: &mut Matrix,
    rot: &PlaneRotation,
    i: usize,
    k: usize,
    j1: usize,
    j2: usize,
) -> Result<(), RotationError> {
    check_indices(m.n(), i, k, j1, j2)?;
    for j in j1..=j2 {
        let t1 = m.get(i, j);
        let t2 = m.get(k, j);
        m.set(i, j, rot.c * t1 + rot.s * t2);
        m.set(k, j, -rot.s * t1 + rot.c * t2);
    }
    Ok(())
}

/// Right-multiplies columns (i, k) of M by the transposed rotation, rows
/// j1..=j2. Column-side mirror of [`apply_left`].
pub fn apply_right(
    m: &mut Matrix,
    rot: &PlaneRotation,
    j1: usize,
    j2: usize,
    i: usize,
    k: usize,
) -> Result<(), RotationError> {
    check_indices(m.n(), i, k, j1, j2)?;
    for j in j1..=j2 {
        let t1 = m.get(j, i);
        let t2 = m.get(j, k);
        m.set(j, i, rot.c * t1 + rot.s * t2);
        m.set(j, k, -rot.s * t1 + rot.c * t2);
    }
    Ok(())
}

/// Classical Jacobi rotation for the block, returned in this module's (c, s)
/// convention so that the two-sided kernels annihilate the pivot. The inner
/// rotation (|s| <= c) is selected, so atan2(s, c) lies in [-pi/4, pi/4].
pub fn givens_schur(block: &PivotBlock) -> PlaneRotation {
    if block.a_pq == 0.0 {
        return PlaneRotation::IDENTITY;
    }
    let tau = (block.a_qq - block.a_pp) / (2.0 * block.a_pq);
    let t = if tau == 0.0 {
        1.0
    } else {
        -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    PlaneRotation { c, s: t * c }
}

/// Left side of the annihilation equation; zero at the solved parameter.
pub fn annihilation_residual(block: &PivotBlock, x: f64) -> f64 {
    (block.a_qq - block.a_pp) * (0.25 - x * x).max(0.0).sqrt() + 2.0 * block.a_pq * x
}
