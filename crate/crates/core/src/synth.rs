//! Synthetic dense LP generation by primal-dual construction.
//!
//! A complementary pair `(x*, s*)` and a free `y*` are drawn first, then
//! `b = A x*` and `c = A'y* + s*` are derived, so the instance is feasible
//! and bounded with known optimal value `c'x* = b'y*` by strong duality.
//! No rejection sampling anywhere.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::lp_model::{LpProblem, ProblemForm};
use crate::seeding::{self, Stream};

/// A generated instance with its certified optimal pair.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub problem: LpProblem,
    pub x_star: Vec<f64>,
    pub y_star: Vec<f64>,
    pub s_star: Vec<f64>,
    pub optimal_value: f64,
}

/// Generates a feasible, bounded equality-form instance of size `m x n`
/// (`m <= n`), deterministically from the seed.
pub fn feasible_instance(n: usize, m: usize, seed: u64) -> GeneratedInstance {
    assert!(m >= 1 && n >= m, "need 1 <= m <= n");
    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(seed, Stream::InstanceGen, 0));

    // support of size m: x* positive there, s* positive on the complement
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    let support: Vec<usize> = indices[..m].to_vec();

    let mut x_star = vec![0.0; n];
    let mut s_star = vec![0.0; n];
    for j in 0..n {
        if support.contains(&j) {
            x_star[j] = rng.gen_range(0.5..2.0);
        } else {
            s_star[j] = rng.gen_range(0.5..2.0);
        }
    }
    let y_star: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let mut a = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = rng.gen_range(-1.0..1.0);
        }
    }
    let b = a.mul_vec(&x_star);
    let aty = a.tr_mul_vec(&y_star);
    let c: Vec<f64> = aty.iter().zip(&s_star).map(|(&v, &s)| v + s).collect();
    let optimal_value = crate::math::dot(&c, &x_star);

    let problem =
        LpProblem::new(a, b, c, ProblemForm::StandardEquality).expect("generated dims are valid");
    GeneratedInstance {
        problem,
        x_star,
        y_star,
        s_star,
        optimal_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;

    #[test]
    fn generation_is_deterministic() {
        let a = feasible_instance(6, 3, 42);
        let b = feasible_instance(6, 3, 42);
        assert_eq!(a.problem, b.problem);
        assert_eq!(a.x_star, b.x_star);
    }

    #[test]
    fn construction_certifies_optimality() {
        for seed in 0..20 {
            let inst = feasible_instance(8, 4, seed);
            let p = &inst.problem;
            // primal feasibility
            let ax = p.a().mul_vec(&inst.x_star);
            for (got, want) in ax.iter().zip(p.b()) {
                assert!((got - want).abs() < 1e-12);
            }
            // dual feasibility with the complementary slack
            let aty = p.a().tr_mul_vec(&inst.y_star);
            for ((got, want), s) in aty.iter().zip(p.c()).zip(&inst.s_star) {
                assert!((got + s - want).abs() < 1e-12);
            }
            // complementarity and matching objectives
            for (x, s) in inst.x_star.iter().zip(&inst.s_star) {
                assert_eq!(x * s, 0.0);
            }
            let dual_value = math::dot(p.b(), &inst.y_star);
            assert!((inst.optimal_value - dual_value).abs() < 1e-10);
        }
    }

    #[test]
    fn optimum_matches_vertex_enumeration() {
        for seed in [1u64, 7, 13] {
            let inst = feasible_instance(6, 3, seed);
            let p = &inst.problem;
            let a_rows: std::vec::Vec<std::vec::Vec<f64>> =
                (0..p.num_constraints()).map(|i| p.a().row(i).to_vec()).collect();
            let oracle = hsdpc_testkit::vertex_enum_optimum(&a_rows, p.b(), p.c()).unwrap();
            assert!(
                (oracle - inst.optimal_value).abs() < 1e-8,
                "oracle {oracle} vs constructed {}",
                inst.optimal_value
            );
        }
    }
}
