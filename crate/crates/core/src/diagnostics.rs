//! Matrix analytics feeding the trace: empirical condition number (no
//! a-priori bound exists for this dense family, so it is measured), norms,
//! and the error-threshold diagnostic that motivates the restoration
//! procedure.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Spectral statistics of a dense matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixStats {
    /// `sigma_max / sigma_min`, `+inf` when singular to working precision.
    pub kappa: f64,
    pub frobenius: f64,
    /// Largest singular value.
    pub spectral: f64,
    pub dims: (usize, usize),
}

/// All singular values, descending, by one-sided Jacobi orthogonalization.
///
/// Adequate at desk scale; cyclic sweeps run until every column pair is
/// numerically orthogonal.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    // work on the taller orientation so columns outnumber-free
    let a = if m.rows() >= m.cols() { m.clone() } else { m.transpose() };
    let rows = a.rows();
    let cols = a.cols();
    let mut col_data: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[(i, j)]).collect())
        .collect();
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&col_data[p], &col_data[q]);
                    (math::dot(cp, cp), math::dot(cq, cq), math::dot(cp, cq))
                };
                if gamma.abs() <= 1e-14 * math::sqrt(alpha * beta) || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + math::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + math::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..rows {
                    let vp = col_data[p][i];
                    let vq = col_data[q][i];
                    col_data[p][i] = c * vp - s * vq;
                    col_data[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = col_data.iter().map(|c| math::norm2(c)).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Empirical condition number `sigma_max / sigma_min` of a square matrix
/// via full SVD. Singular-to-working-precision matrices report `+inf`.
pub fn condition_number(m: &Matrix) -> Result<f64> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch(
            "condition number needs a square matrix".into(),
        ));
    }
    let sv = singular_values(m);
    let smax = sv[0];
    let smin = *sv.last().expect("at least one singular value");
    if smax == 0.0 || smin <= smax * (m.rows() as f64) * f64::EPSILON {
        return Ok(f64::INFINITY);
    }
    Ok(smax / smin)
}

/// Entrywise square-sum root.
pub fn frobenius_norm(m: &Matrix) -> f64 {
    m.frobenius()
}

/// Full spectral statistics in one pass.
pub fn matrix_stats(m: &Matrix) -> Result<MatrixStats> {
    let sv = singular_values(m);
    let smax = sv[0];
    let smin = *sv.last().expect("at least one singular value");
    let kappa = if m.rows() == m.cols() {
        if smax == 0.0 || smin <= smax * (m.rows() as f64) * f64::EPSILON {
            f64::INFINITY
        } else {
            smax / smin
        }
    } else {
        f64::NAN
    };
    Ok(MatrixStats {
        kappa,
        frobenius: m.frobenius(),
        spectral: smax,
        dims: (m.rows(), m.cols()),
    })
}

/// Error threshold of the corrector step: the largest per-coordinate error
/// that provably keeps the (exactly in the inner neighbourhood) corrector
/// output inside it, for given error directions `x1`, `s1`.
///
/// Numerator: `((2 - sqrt 2)/8) x0's0 / (n+1)`. Denominator:
/// `sqrt(||X1 s0||^2 - (x1's0)^2/(n+1)) + sqrt(||X0 s1||^2 - (x0's1)^2/(n+1))
///  - (x1's0 + x0's1) / (4(n+1))`. A nonpositive denominator means the
/// error directions impose no constraint; `+inf` is returned.
pub fn epsilon_prime_threshold(
    x0: &[f64],
    s0: &[f64],
    x1: &[f64],
    s1: &[f64],
) -> Result<f64> {
    let len = x0.len();
    if s0.len() != len || x1.len() != len || s1.len() != len {
        return Err(Error::DimensionMismatch(
            "threshold needs four equal-length vectors".into(),
        ));
    }
    let np1 = len as f64;
    let numerator = (2.0 - math::sqrt(2.0)) / 8.0 * math::dot(x0, s0) / np1;

    // ||diag(a) b||^2 - (a'b)^2/(n+1); Cauchy-Schwarz keeps it >= 0,
    // clamp the rounding tail
    let centered_norm = |a: &[f64], b: &[f64]| -> f64 {
        let mut prod_sq = 0.0;
        let mut cross = 0.0;
        for (&x, &s) in a.iter().zip(b) {
            let p = x * s;
            prod_sq += p * p;
            cross += p;
        }
        (prod_sq - cross * cross / np1).max(0.0)
    };
    let term1 = math::sqrt(centered_norm(x1, s0));
    let term2 = math::sqrt(centered_norm(x0, s1));
    let denominator = term1 + term2 - (math::dot(x1, s0) + math::dot(x0, s1)) / (4.0 * np1);
    if denominator <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(numerator / denominator)
}
