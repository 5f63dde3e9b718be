//! LP instances, standard-form conversion, the homogeneous self-dual
//! embedding, and feasibility residuals.
//!
//! The solver core operates on equality form `min c'x s.t. Ax = b, x >= 0`;
//! inequality input (`Ax >= b`) is converted by [`standardize`] with surplus
//! columns. The embedding augments the problem with the scalars
//! `b_bar = b - A x0`, `c_bar = c - A' y0 - s0`, `z_bar = c'x0 + 1 - b'y0`
//! so that the all-ones start point is feasible by construction.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Whether the constraint rows are equalities or `>=` inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemForm {
    StandardEquality,
    Inequality,
}

/// Dense LP data `min c'x` subject to the rows of `A` against `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    a: Matrix,
    b: Vec<f64>,
    c: Vec<f64>,
    form: ProblemForm,
}

impl LpProblem {
    /// Validates shapes and finiteness.
    pub fn new(a: Matrix, b: Vec<f64>, c: Vec<f64>, form: ProblemForm) -> Result<Self> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::DimensionMismatch("A must be at least 1x1".into()));
        }
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "b has {} entries but A has {} rows",
                b.len(),
                a.rows()
            )));
        }
        if c.len() != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "c has {} entries but A has {} columns",
                c.len(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("A".into()));
        }
        if !b.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("b".into()));
        }
        if !c.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("c".into()));
        }
        Ok(LpProblem { a, b, c, form })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn form(&self) -> ProblemForm {
        self.form
    }

    /// Number of constraint rows.
    pub fn num_constraints(&self) -> usize {
        self.a.rows()
    }

    /// Number of variables.
    pub fn num_vars(&self) -> usize {
        self.a.cols()
    }
}

/// Converts `Ax >= b` into equality form by appending surplus columns:
/// `A' = [A | -I]`, `c' = (c, 0)`. Equality input is returned unchanged.
pub fn standardize(problem: &LpProblem) -> LpProblem {
    if problem.form == ProblemForm::StandardEquality {
        return problem.clone();
    }
    let m = problem.num_constraints();
    let n = problem.num_vars();
    let mut a = Matrix::zeros(m, n + m);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = problem.a[(i, j)];
        }
        a[(i, n + i)] = -1.0;
    }
    let mut c = problem.c.clone();
    c.extend(core::iter::repeat(0.0).take(m));
    LpProblem {
        a,
        b: problem.b.clone(),
        c,
        form: ProblemForm::StandardEquality,
    }
}

/// The homogeneous self-dual embedding of an equality-form problem.
///
/// Stores the augmentation data together with the start point that makes
/// the embedded problem feasible: the fourth (normalization) residual needs
/// `x0` and `s0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HsdInstance {
    problem: LpProblem,
    b_bar: Vec<f64>,
    c_bar: Vec<f64>,
    z_bar: f64,
    x0: Vec<f64>,
    s0: Vec<f64>,
    y0: Vec<f64>,
    n_prime: usize,
}

impl HsdInstance {
    pub fn problem(&self) -> &LpProblem {
        &self.problem
    }

    pub fn b_bar(&self) -> &[f64] {
        &self.b_bar
    }

    pub fn c_bar(&self) -> &[f64] {
        &self.c_bar
    }

    pub fn z_bar(&self) -> f64 {
        self.z_bar
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn s0(&self) -> &[f64] {
        &self.s0
    }

    /// Newton-system dimension `m + 2n + 3` (before symmetrization).
    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    /// `||(b_bar', c_bar')||`, the infeasibility norm used by the
    /// termination test.
    pub fn infeasibility_norm(&self) -> f64 {
        math::sqrt(math::hypot_sq(&self.b_bar) + math::hypot_sq(&self.c_bar))
    }
}

/// Interior iterate of the embedded problem.
#[derive(Debug, Clone, PartialEq)]
pub struct HsdState {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub tau: f64,
    pub theta: f64,
    pub s: Vec<f64>,
    pub k: f64,
}

impl HsdState {
    /// Strict positivity of `x`, `s`, `tau`, `k`.
    pub fn is_interior(&self) -> bool {
        self.tau > 0.0
            && self.k > 0.0
            && self.x.iter().all(|&v| v > 0.0)
            && self.s.iter().all(|&v| v > 0.0)
    }

    /// Concatenation `(x, tau)`, length `n + 1`.
    pub fn x_bar(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.push(self.tau);
        v
    }

    /// Concatenation `(s, k)`, length `n + 1`.
    pub fn s_bar(&self) -> Vec<f64> {
        let mut v = self.s.clone();
        v.push(self.k);
        v
    }

    /// Rebuilds a state from concatenated `(x, tau)` / `(s, k)` vectors,
    /// keeping `y` and `theta`.
    pub fn with_bars(&self, x_bar: &[f64], s_bar: &[f64]) -> HsdState {
        let n = x_bar.len() - 1;
        HsdState {
            y: self.y.clone(),
            x: x_bar[..n].to_vec(),
            tau: x_bar[n],
            theta: self.theta,
            s: s_bar[..n].to_vec(),
            k: s_bar[n],
        }
    }
}

/// Builds the embedding from an explicit start point `x0 > 0`, `s0 > 0`,
/// `y0` free. The returned state is `(y0, x0, tau=1, theta=1, s0, k=1)`.
pub fn embed(
    problem: &LpProblem,
    x0: &[f64],
    s0: &[f64],
    y0: &[f64],
) -> Result<(HsdInstance, HsdState)> {
    if problem.form != ProblemForm::StandardEquality {
        return Err(Error::DimensionMismatch(
            "embed requires an equality-form problem; call standardize first".into(),
        ));
    }
    let problem = problem.clone();
    let m = problem.num_constraints();
    let n = problem.num_vars();
    if x0.len() != n || s0.len() != n || y0.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "start point dims ({}, {}, {}) do not match problem ({n}, {n}, {m})",
            x0.len(),
            s0.len(),
            y0.len()
        )));
    }
    if let Some(i) = x0.iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositiveEntry { what: "x0", index: i });
    }
    if let Some(i) = s0.iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositiveEntry { what: "s0", index: i });
    }

    let ax0 = problem.a.mul_vec(x0);
    let b_bar: Vec<f64> = problem.b.iter().zip(&ax0).map(|(&b, &v)| b - v).collect();
    let aty0 = problem.a.tr_mul_vec(y0);
    let c_bar: Vec<f64> = problem
        .c
        .iter()
        .zip(&aty0)
        .zip(s0)
        .map(|((&c, &v), &s)| c - v - s)
        .collect();
    let z_bar = math::dot(&problem.c, x0) + 1.0 - math::dot(&problem.b, y0);

    let n_prime = m + 2 * n + 3;
    let state = HsdState {
        y: y0.to_vec(),
        x: x0.to_vec(),
        tau: 1.0,
        theta: 1.0,
        s: s0.to_vec(),
        k: 1.0,
    };
    let instance = HsdInstance {
        problem,
        b_bar,
        c_bar,
        z_bar,
        x0: x0.to_vec(),
        s0: s0.to_vec(),
        y0: y0.to_vec(),
        n_prime,
    };
    Ok((instance, state))
}

/// [`embed`] from the default start point: `x0 = s0 = 1`, `y0 = 0`.
pub fn embed_default(problem: &LpProblem) -> Result<(HsdInstance, HsdState)> {
    let std_problem = standardize(problem);
    let n = std_problem.num_vars();
    let m = std_problem.num_constraints();
    embed(&std_problem, &vec![1.0; n], &vec![1.0; n], &vec![0.0; m])
}

/// Feasibility residuals of the embedded constraint rows at `state`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualBundle {
    /// `A x - b tau + b_bar theta`, length m.
    pub r1: Vec<f64>,
    /// `-A' y + c tau - c_bar theta - s`, length n.
    pub r2: Vec<f64>,
    /// `b'y - c'x + z_bar theta - k`.
    pub r3: f64,
    /// Normalization row: `s0'x + x0's + tau + k - (x0's0 + 1) theta - (x0's0 + 1)`.
    pub r4: f64,
}

impl ResidualBundle {
    /// Euclidean norm of all residual entries stacked.
    pub fn norm(&self) -> f64 {
        math::sqrt(
            math::hypot_sq(&self.r1) + math::hypot_sq(&self.r2) + self.r3 * self.r3
                + self.r4 * self.r4,
        )
    }
}

/// Evaluates the residuals of the four embedded constraint blocks.
pub fn residuals(instance: &HsdInstance, state: &HsdState) -> ResidualBundle {
    let problem = &instance.problem;
    let ax = problem.a.mul_vec(&state.x);
    let r1: Vec<f64> = ax
        .iter()
        .zip(&problem.b)
        .zip(&instance.b_bar)
        .map(|((&ax, &b), &bb)| ax - b * state.tau + bb * state.theta)
        .collect();
    let aty = problem.a.tr_mul_vec(&state.y);
    let r2: Vec<f64> = aty
        .iter()
        .zip(&problem.c)
        .zip(&instance.c_bar)
        .zip(&state.s)
        .map(|(((&aty, &c), &cb), &s)| -aty + c * state.tau - cb * state.theta - s)
        .collect();
    let r3 = math::dot(&problem.b, &state.y) - math::dot(&problem.c, &state.x)
        + instance.z_bar * state.theta
        - state.k;
    let gap0 = math::dot(&instance.x0, &instance.s0) + 1.0;
    let r4 = math::dot(&instance.s0, &state.x) + math::dot(&instance.x0, &state.s) + state.tau
        + state.k
        - gap0 * state.theta
        - gap0;
    ResidualBundle { r1, r2, r3, r4 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy_problem() -> LpProblem {
        LpProblem::new(
            Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(),
            vec![1.0],
            vec![1.0, 2.0],
            ProblemForm::StandardEquality,
        )
        .unwrap()
    }

    #[test]
    fn standardize_appends_surplus_columns() {
        let p = LpProblem::new(
            Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(),
            vec![1.0],
            vec![1.0, 2.0],
            ProblemForm::Inequality,
        )
        .unwrap();
        let std = standardize(&p);
        assert_eq!(std.form(), ProblemForm::StandardEquality);
        assert_eq!(std.num_vars(), 3);
        assert_eq!(std.a().row(0), &[1.0, 1.0, -1.0]);
        assert_eq!(std.c(), &[1.0, 2.0, 0.0]);
        assert_eq!(std.b(), &[1.0]);
    }

    #[test]
    fn standardize_is_identity_on_equality_form() {
        let p = toy_problem();
        assert_eq!(standardize(&p), p);
    }

    #[test]
    fn malformed_dimensions_rejected() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let err = LpProblem::new(a, vec![1.0, 2.0, 3.0], vec![1.0, 1.0], ProblemForm::Inequality);
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn embed_defaults_match_hand_values() {
        // b_bar = b - A*1 = 1 - 2 = -1; c_bar = c - 1 = (0, 1); z_bar = c'1 + 1 = 4
        let (inst, state) = embed_default(&toy_problem()).unwrap();
        assert_eq!(inst.b_bar(), &[-1.0]);
        assert_eq!(inst.c_bar(), &[0.0, 1.0]);
        assert_eq!(inst.z_bar(), 4.0);
        assert_eq!(inst.n_prime(), 1 + 4 + 3);
        assert_eq!(state.tau, 1.0);
        assert_eq!(state.theta, 1.0);
        assert_eq!(state.k, 1.0);
    }

    #[test]
    fn embed_zero_problem_hand_values() {
        let p = LpProblem::new(
            Matrix::zeros(2, 3),
            vec![0.0; 2],
            vec![0.0; 3],
            ProblemForm::StandardEquality,
        )
        .unwrap();
        let (inst, _) = embed_default(&p).unwrap();
        assert_eq!(inst.b_bar(), &[0.0, 0.0]);
        assert_eq!(inst.c_bar(), &[-1.0, -1.0, -1.0]);
        assert_eq!(inst.z_bar(), 1.0);
    }

    #[test]
    fn embed_rejects_nonpositive_start() {
        let p = toy_problem();
        let err = embed(&p, &[0.0, 1.0], &[1.0, 1.0], &[0.0]);
        assert_eq!(err.unwrap_err(), Error::NonPositiveEntry { what: "x0", index: 0 });
    }

    #[test]
    fn embedded_start_point_is_feasible() {
        let (inst, state) = embed_default(&toy_problem()).unwrap();
        assert!(residuals(&inst, &state).norm() < 1e-12);
    }

    #[test]
    fn b_bar_reconstructs_b_exactly() {
        let (inst, _) = embed_default(&toy_problem()).unwrap();
        let ax0 = inst.problem().a().mul_vec(inst.x0());
        for ((&ax, &bb), &b) in ax0.iter().zip(inst.b_bar()).zip(inst.problem().b()) {
            assert_eq!(ax + bb, b);
        }
    }

    #[test]
    fn residual_r1_is_linear_in_x() {
        let (inst, state) = embed_default(&toy_problem()).unwrap();
        let base = residuals(&inst, &state);
        let mut bumped = state.clone();
        bumped.x[0] += 1.0;
        let after = residuals(&inst, &bumped);
        let a = inst.problem().a();
        for i in 0..a.rows() {
            assert!((after.r1[i] - base.r1[i] - a[(i, 0)]).abs() < 1e-14);
        }
    }

    #[test]
    fn residuals_match_direct_recomputation_on_random_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Matrix::from_rows(&[
            (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>(),
            (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        ])
        .unwrap();
        let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = LpProblem::new(a, b, c, ProblemForm::StandardEquality).unwrap();
        let (inst, _) = embed_default(&p).unwrap();
        let state = HsdState {
            y: (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            x: (0..4).map(|_| rng.gen_range(0.1..2.0)).collect(),
            tau: rng.gen_range(0.1..2.0),
            theta: rng.gen_range(-1.0..1.0),
            s: (0..4).map(|_| rng.gen_range(0.1..2.0)).collect(),
            k: rng.gen_range(0.1..2.0),
        };
        let got = residuals(&inst, &state);

        // independent elementwise recomputation
        let a = inst.problem().a();
        let (m, n) = (a.rows(), a.cols());
        for i in 0..m {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[(i, j)] * state.x[j];
            }
            acc += -inst.problem().b()[i] * state.tau + inst.b_bar()[i] * state.theta;
            assert!((got.r1[i] - acc).abs() < 1e-13);
        }
        for j in 0..n {
            let mut acc = 0.0;
            for i in 0..m {
                acc -= a[(i, j)] * state.y[i];
            }
            acc += inst.problem().c()[j] * state.tau - inst.c_bar()[j] * state.theta - state.s[j];
            assert!((got.r2[j] - acc).abs() < 1e-13);
        }
    }
}
