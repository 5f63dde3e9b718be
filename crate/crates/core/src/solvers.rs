//! Pluggable linear-system backends behind one contract: given `(M, f)`
//! and backend-specific precision knobs, return a direction estimate and
//! solve metadata.

use alloc::vec::Vec;

use crate::diagnostics;
use crate::error::{Error, Result};
use crate::linalg::{lu_solve, Matrix};
use crate::math;
use crate::qlsa_sim;
use crate::seeding::{self, Stream};

/// Backend selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Exact,
    ConjugateGradient,
    QlsaSim,
}

/// Metadata returned with every solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveMeta {
    pub backend_id: BackendKind,
    /// Recomputed `||M d - f||`.
    pub residual_norm: f64,
    /// Empirical condition number, when the backend measured one.
    pub kappa_estimate: Option<f64>,
    /// Frobenius norm of the matrix as passed in.
    pub frobenius_norm: f64,
    /// Backend-specific work proxy: `n'^3` for the dense factorization,
    /// `matvecs * n'^2` for CG, accumulated oracle cost units for the
    /// simulated quantum solver.
    pub cost_units: f64,
    pub retries: usize,
}

fn residual_norm(m: &Matrix, d: &[f64], f: &[f64]) -> f64 {
    let md = m.mul_vec(d);
    math::sqrt(
        md.iter()
            .zip(f)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>(),
    )
}

/// Dense factorization with partial pivoting.
pub fn solve_exact(m: &Matrix, f: &[f64]) -> Result<(Vec<f64>, SolveMeta)> {
    let d = lu_solve(m, f)?;
    let n = m.rows() as f64;
    let meta = SolveMeta {
        backend_id: BackendKind::Exact,
        residual_norm: residual_norm(m, &d, f),
        kappa_estimate: None,
        frobenius_norm: m.frobenius(),
        cost_units: n * n * n,
        retries: 0,
    };
    Ok((d, meta))
}

/// Conjugate gradient on the normal equations `M'M d = M'f` (the Newton
/// matrix is not symmetric), matrix-free. Stops when the true residual
/// satisfies `||M d - f|| <= tol ||f||` or after `max_iters` iterations;
/// non-convergence is reported through `meta.residual_norm`, not an error,
/// so the caller can fall back.
pub fn solve_cg(
    m: &Matrix,
    f: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, SolveMeta)> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch("CG needs a square matrix".into()));
    }
    let n = m.rows();
    let f_norm = math::norm2(f);
    let mut matvecs = 0usize;

    let mut x = vec![0.0; n];
    let mut r = m.tr_mul_vec(f); // M'f - M'M x0 with x0 = 0
    matvecs += 1;
    let mut p = r.clone();
    let mut rs = math::hypot_sq(&r);

    for _ in 0..max_iters {
        let mp = m.mul_vec(&p);
        let amp = m.tr_mul_vec(&mp);
        matvecs += 2;
        let denom = math::dot(&p, &amp);
        if denom <= 0.0 {
            break; // numerical breakdown; return the best iterate so far
        }
        let alpha = rs / denom;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * amp[i];
        }
        matvecs += 1; // residual check below
        if residual_norm(m, &x, f) <= tol * f_norm {
            break;
        }
        let rs_new = math::hypot_sq(&r);
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }

    let meta = SolveMeta {
        backend_id: BackendKind::ConjugateGradient,
        residual_norm: residual_norm(m, &x, f),
        kappa_estimate: None,
        frobenius_norm: m.frobenius(),
        cost_units: matvecs as f64 * (n * n) as f64,
        retries: 0,
    };
    Ok((x, meta))
}

/// Embeds `M` into the Hermitian form `[[0, M], [M', 0]]`.
///
/// The solve path only needs two of its properties — the doubled dimension
/// and `||.||_F = sqrt(2) ||M||_F` — which it uses analytically; the full
/// matrix is materialized in tests to validate those shortcuts.
#[cfg_attr(not(test), allow(dead_code))]
fn symmetrize(m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut s = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            s[(i, n + j)] = m[(i, j)];
            s[(n + j, i)] = m[(i, j)];
        }
    }
    s
}

/// Classically simulated quantum linear-system solve.
///
/// Pipeline: symmetrize; compute the exact normalized solution internally
/// (the stand-in for the unobservable quantum state); read it out by
/// tomography at precision `epsilon`; verify with the swap-test stand-in,
/// retrying up to `retry_c` times; rescale by the multiplicative norm
/// estimate; fix the global sign against the largest right-hand-side row.
pub fn solve_qlsa_sim(
    m: &Matrix,
    f: &[f64],
    epsilon: f64,
    rng_seed: u64,
) -> Result<(Vec<f64>, SolveMeta)> {
    solve_qlsa_sim_with_retries(m, f, epsilon, rng_seed, 4)
}

/// [`solve_qlsa_sim`] with an explicit retry budget `c`.
pub fn solve_qlsa_sim_with_retries(
    m: &Matrix,
    f: &[f64],
    epsilon: f64,
    rng_seed: u64,
    retry_c: usize,
) -> Result<(Vec<f64>, SolveMeta)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::NonFinite("epsilon must lie in (0, 1)".into()));
    }
    let n = m.rows();

    // internal exact solve: the quantum state is unobservable except
    // through sampling, so its classical stand-in is the exact solution
    let exact = lu_solve(m, f)?;
    let exact_norm = math::norm2(&exact);
    if exact_norm == 0.0 {
        return Err(Error::ZeroVector);
    }

    // state vector of the symmetrized system [[0, M], [M', 0]] z = (f; 0):
    // z = (0; d), so tomography sees dimension 2n
    let dim = 2 * n;
    let mut state = vec![0.0; dim];
    for i in 0..n {
        state[n + i] = exact[i] / exact_norm;
    }

    let kappa = diagnostics::condition_number(m)?;
    let frob_sym = math::sqrt(2.0) * m.frobenius();
    let cost = qlsa_sim::qlsa_cost(frob_sym, kappa, epsilon, dim);
    let copies = qlsa_sim::copies_needed(dim, epsilon);

    let mut total_cost = 0.0;
    let mut accepted: Option<Vec<f64>> = None;
    let mut attempts = 0usize;
    while attempts < retry_c {
        let (tomo_seed, _) = qlsa_sim::solve_streams(rng_seed, attempts as u64);
        let outcome = qlsa_sim::tomography(&state, epsilon, tomo_seed)?;
        total_cost += qlsa_sim::attempt_cost(&cost, copies);
        attempts += 1;
        if qlsa_sim::fidelity_check(&outcome.estimate, &state, epsilon)? {
            accepted = Some(outcome.estimate);
            break;
        }
    }
    let Some(estimate) = accepted else {
        return Err(Error::RetriesExhausted { attempts });
    };

    // rescale by the epsilon-multiplicative norm estimate
    let (_, norm_seed) = qlsa_sim::solve_streams(rng_seed, (attempts - 1) as u64);
    let norm_est = qlsa_sim::norm_estimate(exact_norm, epsilon, norm_seed)?;
    let mut d: Vec<f64> = estimate[n..].iter().map(|&v| v * norm_est).collect();

    // fix the global sign by multiplying the row with the largest |f|
    // entry and comparing against that entry
    let pivot_row = f
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let row_product = math::dot(m.row(pivot_row), &d);
    if row_product * f[pivot_row] < 0.0 {
        for v in &mut d {
            *v = -*v;
        }
    }

    let meta = SolveMeta {
        backend_id: BackendKind::QlsaSim,
        residual_norm: residual_norm(m, &d, f),
        kappa_estimate: Some(kappa),
        frobenius_norm: m.frobenius(),
        cost_units: total_cost,
        retries: attempts - 1,
    };
    Ok((d, meta))
}

/// Per-step seed for a solve at iteration `t` under a run-level seed.
pub fn step_seed(run_seed: u64, t: usize) -> u64 {
    seeding::derive(run_seed, Stream::Solve, t as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        // diagonally dominated, hence well-conditioned and nonsingular
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rng.gen_range(-1.0..1.0);
            }
            m[(i, i)] += n as f64;
        }
        m
    }

    #[test]
    fn exact_identity_returns_rhs() {
        let m = Matrix::identity(5);
        let f = vec![1.0, 2.0, -3.0, 0.0, 0.5];
        let (d, meta) = solve_exact(&m, &f).unwrap();
        assert_eq!(d, f);
        assert_eq!(meta.backend_id, BackendKind::Exact);
        assert_eq!(meta.residual_norm, 0.0);
    }

    #[test]
    fn exact_diagonal() {
        let mut m = Matrix::zeros(2, 2);
        m[(0, 0)] = 2.0;
        m[(1, 1)] = 4.0;
        let (d, _) = solve_exact(&m, &[2.0, 4.0]).unwrap();
        assert_eq!(d, vec![1.0, 1.0]);
    }

    #[test]
    fn exact_residual_contract_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 20);
            let f: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (d, meta) = solve_exact(&m, &f).unwrap();
            let fnorm = math::norm2(&f);
            assert!(meta.residual_norm <= 1e-10 * fnorm);
            // meta matches a recomputation
            assert!((meta.residual_norm - residual_norm(&m, &d, &f)).abs() <= 1e-12);
        }
    }

    #[test]
    fn exact_rejects_singular() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(solve_exact(&m, &[1.0, 1.0]), Err(Error::SingularMatrix)));
    }

    #[test]
    fn cg_identity_converges_immediately() {
        let m = Matrix::identity(6);
        let f = vec![1.0, -1.0, 2.0, 0.0, 3.0, -2.0];
        let (d, meta) = solve_cg(&m, &f, 1e-12, 50).unwrap();
        for (a, b) in d.iter().zip(&f) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(meta.residual_norm <= 1e-12 * math::norm2(&f));
    }

    #[test]
    fn cg_matches_exact_on_spd_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let mut m = Matrix::zeros(10, 10);
        for i in 0..10 {
            for j in 0..=i {
                let v = rng.gen_range(-0.5..0.5);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
            m[(i, i)] += 10.0;
        }
        let f: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (d_cg, _) = solve_cg(&m, &f, 1e-8, 500).unwrap();
        let (d_ex, _) = solve_exact(&m, &f).unwrap();
        let scale = math::norm2(&d_ex);
        for (a, b) in d_cg.iter().zip(&d_ex) {
            assert!((a - b).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn cg_starved_iterations_signal_nonconvergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        // ill-conditioned: nearly dependent rows
        let mut m = Matrix::zeros(6, 6);
        for i in 0..6 {
            for j in 0..6 {
                m[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        for j in 0..6 {
            let v = m[(0, j)];
            m[(1, j)] = v + 1e-8 * m[(1, j)];
        }
        let f: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, meta) = solve_cg(&m, &f, 1e-10, 1).unwrap();
        assert!(meta.residual_norm > 1e-10 * math::norm2(&f));
    }

    #[test]
    fn cg_agrees_with_exact_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        for n in [12usize, 30, 60] {
            let m = random_matrix(&mut rng, n);
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (d_cg, meta) = solve_cg(&m, &f, 1e-9, 10 * n).unwrap();
            assert!(meta.residual_norm <= 1e-9 * math::norm2(&f));
            let (d_ex, _) = solve_exact(&m, &f).unwrap();
            let scale = math::norm2(&d_ex).max(1.0);
            for (a, b) in d_cg.iter().zip(&d_ex) {
                assert!((a - b).abs() <= 1e-6 * scale);
            }
        }
    }

    #[test]
    fn qlsa_deviation_shrinks_with_epsilon() {
        let mut rng = ChaCha8Rng::seed_from_u64(58);
        let m = random_matrix(&mut rng, 8);
        let f: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (d_ex, _) = solve_exact(&m, &f).unwrap();
        let scale = math::norm2(&d_ex);
        let mut devs = Vec::new();
        for &eps in &[0.3, 0.1, 0.03] {
            let (d, _) = solve_qlsa_sim(&m, &f, eps, 900).unwrap();
            let dev: f64 = math::norm2(
                &d.iter().zip(&d_ex).map(|(&a, &b)| a - b).collect::<Vec<_>>(),
            ) / scale;
            devs.push(dev);
        }
        assert!(devs[1] < devs[0], "devs = {devs:?}");
        assert!(devs[2] < devs[0], "devs = {devs:?}");
        assert!(devs[2] < 0.1, "devs = {devs:?}");
    }

    #[test]
    fn qlsa_recovers_unit_vector_with_positive_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let m = random_matrix(&mut rng, 6);
        // f = third column of M, so d = e_3
        let f: Vec<f64> = (0..6).map(|i| m[(i, 2)]).collect();
        let (d, _) = solve_qlsa_sim(&m, &f, 0.05, 7).unwrap();
        assert!(d[2] > 0.8, "d = {d:?}");
        for (i, &v) in d.iter().enumerate() {
            if i != 2 {
                assert!(v.abs() < 0.2);
            }
        }
    }

    #[test]
    fn qlsa_is_bit_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let m = random_matrix(&mut rng, 7);
        let f: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (d1, meta1) = solve_qlsa_sim(&m, &f, 0.1, 1234).unwrap();
        let (d2, meta2) = solve_qlsa_sim(&m, &f, 0.1, 1234).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(meta1, meta2);
    }

    #[test]
    fn qlsa_error_bound_holds_statistically() {
        // over 200 seeded trials on a random 16x16 system at eps = 0.1, the
        // fraction with ||d - d_exact|| > sqrt(7) eps ||d_exact|| stays under
        // the tomography failure bound plus binomial slack
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let m = random_matrix(&mut rng, 16);
        let f: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (d_ex, _) = solve_exact(&m, &f).unwrap();
        let scale = math::norm2(&d_ex);
        let eps = 0.1;
        let trials = 200;
        let mut failures = 0;
        for t in 0..trials {
            let (d, _) = solve_qlsa_sim(&m, &f, eps, 40_000 + t).unwrap();
            let dev = math::norm2(
                &d.iter().zip(&d_ex).map(|(&a, &b)| a - b).collect::<Vec<_>>(),
            );
            if dev > 7.0f64.sqrt() * eps * scale {
                failures += 1;
            }
        }
        let dim = 32.0f64; // symmetrized dimension
        let p_bound = 1.0 / dim.powf(0.83);
        let sigma = (p_bound * (1.0 - p_bound) / trials as f64).sqrt();
        assert!((failures as f64 / trials as f64) <= p_bound + 3.0 * sigma);
    }

    #[test]
    fn symmetrization_shortcuts_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let m = random_matrix(&mut rng, 9);
        let sym = symmetrize(&m);
        assert_eq!(sym.rows(), 18);
        assert!((sym.frobenius() - math::sqrt(2.0) * m.frobenius()).abs() < 1e-12);
        let k_m = crate::diagnostics::condition_number(&m).unwrap();
        let k_sym = crate::diagnostics::condition_number(&sym).unwrap();
        assert!((k_m - k_sym).abs() <= 1e-6 * k_m);
    }

    #[test]
    fn qlsa_meta_residual_matches_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let m = random_matrix(&mut rng, 5);
        let f: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (d, meta) = solve_qlsa_sim(&m, &f, 0.2, 5).unwrap();
        let recomputed = residual_norm(&m, &d, &f);
        assert!((meta.residual_norm - recomputed).abs() <= 1e-12 * recomputed.max(1.0));
    }
}
