//! Independent test oracles for the solver crates.
//!
//! Everything here is deliberately written from scratch (own elimination,
//! own combinatorics) so the oracles share no code path with the library
//! they check.

use itertools::Itertools;

/// Gaussian elimination with partial pivoting on a dense square system.
/// Returns `None` when the matrix is singular to working precision.
///
/// Independent of the solver crate's LU code by construction.
pub fn gauss_solve(a: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) || rhs.len() != n {
        return None;
    }
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            let mut r = row.clone();
            r.push(b);
            r
        })
        .collect();
    let scale = aug
        .iter()
        .flat_map(|r| r.iter().take(n))
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            aug[i][col]
                .abs()
                .partial_cmp(&aug[j][col].abs())
                .unwrap()
        })?;
        if aug[pivot][col].abs() < 1e-12 * scale {
            return None;
        }
        aug.swap(col, pivot);
        for row in col + 1..n {
            let f = aug[row][col] / aug[col][col];
            for k in col..=n {
                let v = aug[col][k];
                aug[row][k] -= f * v;
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = aug[i][n];
        for j in i + 1..n {
            acc -= aug[i][j] * x[j];
        }
        x[i] = acc / aug[i][i];
    }
    Some(x)
}

/// Optimal value of `min c'x  s.t.  Ax = b, x >= 0` by brute-force vertex
/// enumeration over all column bases. Returns `None` when no basic feasible
/// solution exists (infeasible, or feasible only off the vertices, which
/// cannot happen for bounded LPs with full-row-rank `A`).
///
/// Only sensible at desk scale (`n choose m` bases).
pub fn vertex_enum_optimum(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<f64> {
    let m = a.len();
    let n = a[0].len();
    assert!(m <= n, "equality form needs at least as many columns as rows");
    let mut best: Option<f64> = None;
    for basis in (0..n).combinations(m) {
        let sub: Vec<Vec<f64>> = (0..m)
            .map(|i| basis.iter().map(|&j| a[i][j]).collect())
            .collect();
        let Some(xb) = gauss_solve(&sub, b) else {
            continue;
        };
        if xb.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let value: f64 = basis.iter().zip(&xb).map(|(&j, &v)| c[j] * v).sum();
        best = Some(match best {
            Some(cur) if cur <= value => cur,
            _ => value,
        });
    }
    best
}

/// Full vertex solution alongside the optimum, for checks that need the
/// minimizer itself.
pub fn vertex_enum_solution(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<(f64, Vec<f64>)> {
    let m = a.len();
    let n = a[0].len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for basis in (0..n).combinations(m) {
        let sub: Vec<Vec<f64>> = (0..m)
            .map(|i| basis.iter().map(|&j| a[i][j]).collect())
            .collect();
        let Some(xb) = gauss_solve(&sub, b) else {
            continue;
        };
        if xb.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let value: f64 = basis.iter().zip(&xb).map(|(&j, &v)| c[j] * v).sum();
        if best.as_ref().map_or(true, |(cur, _)| value < *cur) {
            let mut x = vec![0.0; n];
            for (&j, &v) in basis.iter().zip(&xb) {
                x[j] = v;
            }
            best = Some((value, x));
        }
    }
    best
}

/// 99th-percentile chi-square critical value via the Wilson-Hilferty cube
/// approximation; accurate to well under a percent for the degrees of
/// freedom used in the test suite.
pub fn chi_square_critical_99(df: usize) -> f64 {
    const Z_99: f64 = 2.3263478740408408;
    let k = df as f64;
    let t = 1.0 - 2.0 / (9.0 * k) + Z_99 * (2.0 / (9.0 * k)).sqrt();
    k * t * t * t
}

/// Pearson chi-square statistic for observed counts against expected
/// probabilities (which must sum to 1). Bins with zero expectation must
/// carry zero observations.
pub fn chi_square_statistic(observed: &[usize], probabilities: &[f64]) -> f64 {
    assert_eq!(observed.len(), probabilities.len());
    let total: usize = observed.iter().sum();
    let mut chi = 0.0;
    for (&o, &p) in observed.iter().zip(probabilities) {
        let e = p * total as f64;
        if e > 0.0 {
            let d = o as f64 - e;
            chi += d * d / e;
        } else {
            assert_eq!(o, 0, "observation in a zero-probability bin");
        }
    }
    chi
}
