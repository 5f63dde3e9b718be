//! Optimal-face projection and solution recovery.
//!
//! When the gap criterion fires, the iterate is projected onto the
//! optimal-face constraints determined by the support split
//! `zeta = { j : x_j >= s_j }` (an equality-constrained least-squares
//! problem solved through the stationarity system), and the LP solution is
//! read off the projected point. A tau-collapse exit instead classifies
//! infeasibility from the terminal iterate.

use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::{lu_solve, Matrix};
use crate::lp_model::{HsdInstance, HsdState};
use crate::math;

/// Support split of the `x`/`s` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSplit {
    /// Indices with `x_j >= s_j` (ties included).
    pub zeta: Vec<usize>,
    /// The complement of `zeta`.
    pub complement: Vec<usize>,
    /// Columns of `A` indexed by `zeta` (`m x |zeta|`).
    pub b_cols: Matrix,
    /// Columns of `A` indexed by the complement.
    pub c_cols: Matrix,
}

/// Componentwise comparison `x_j >= s_j`, ties assigned to `zeta`.
pub fn support_set(instance: &HsdInstance, state: &HsdState) -> SupportSplit {
    let n = state.x.len();
    let mut zeta = Vec::new();
    let mut complement = Vec::new();
    for j in 0..n {
        if state.x[j] >= state.s[j] {
            zeta.push(j);
        } else {
            complement.push(j);
        }
    }
    let a = instance.problem().a();
    SupportSplit {
        b_cols: a.select_columns(&zeta),
        c_cols: a.select_columns(&complement),
        zeta,
        complement,
    }
}

/// Which least-squares system the projection solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionCase {
    /// `tau >= k`: solve for `(y, x_B, tau)`, forcing `k = 0`.
    TauDominant,
    /// `tau < k`: solve for `(y, x_B, k)`, forcing `tau = 0`.
    KDominant,
}

/// Projection of the terminal iterate onto the optimal-face constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPoint {
    pub y: Vec<f64>,
    pub x_b: Vec<f64>,
    pub tau: f64,
    pub k: f64,
    pub case: ProjectionCase,
    /// `||G z||` of the projected point against the case's constraints.
    pub constraint_residual: f64,
}

/// Builds the constraint matrix of the active case. Unknowns are stacked
/// as `(y, x_B, w)` where `w` is `tau` (case 1) or `k` (case 2).
fn constraint_matrix(
    instance: &HsdInstance,
    split: &SupportSplit,
    case: ProjectionCase,
) -> Matrix {
    let m = instance.problem().num_constraints();
    let nb = split.zeta.len();
    let b = instance.problem().b();
    let c = instance.problem().c();
    let dim = m + nb + 1;
    let mut g = Matrix::zeros(dim, dim);
    match case {
        ProjectionCase::TauDominant => {
            // B x_B - b tau = 0
            for i in 0..m {
                for jj in 0..nb {
                    g[(i, m + jj)] = split.b_cols[(i, jj)];
                }
                g[(i, m + nb)] = -b[i];
            }
            // -B' y + c_B tau = 0
            for (jj, &j) in split.zeta.iter().enumerate() {
                for i in 0..m {
                    g[(m + jj, i)] = -split.b_cols[(i, jj)];
                }
                g[(m + jj, m + nb)] = c[j];
            }
            // b' y - c_B' x_B = 0
            for i in 0..m {
                g[(m + nb, i)] = b[i];
            }
            for (jj, &j) in split.zeta.iter().enumerate() {
                g[(m + nb, m + jj)] = -c[j];
            }
        }
        ProjectionCase::KDominant => {
            // B x_B = 0
            for i in 0..m {
                for jj in 0..nb {
                    g[(i, m + jj)] = split.b_cols[(i, jj)];
                }
            }
            // -B' y = 0
            for jj in 0..nb {
                for i in 0..m {
                    g[(m + jj, i)] = -split.b_cols[(i, jj)];
                }
            }
            // b' y - c_B' x_B - k = 0
            for i in 0..m {
                g[(m + nb, i)] = b[i];
            }
            for (jj, &j) in split.zeta.iter().enumerate() {
                g[(m + nb, m + jj)] = -c[j];
            }
            g[(m + nb, m + nb)] = -1.0;
        }
    }
    g
}

/// Euclidean projection of `(y^t, x_B^t, w^t)` onto `{ z : G z = 0 }` via
/// the stationarity system of the Lagrangian,
/// `[[I, G'], [G, -rho I]] (z; lambda) = (z^t; 0)` with `rho = 1e-12`
/// regularizing the (always rank-deficient, `G` is skew) multiplier block.
pub fn project(
    instance: &HsdInstance,
    state: &HsdState,
    split: &SupportSplit,
) -> Result<ProjectedPoint> {
    let case = if state.tau >= state.k {
        ProjectionCase::TauDominant
    } else {
        ProjectionCase::KDominant
    };
    let g = constraint_matrix(instance, split, case);
    let dim = g.rows();
    let m = instance.problem().num_constraints();
    let nb = split.zeta.len();

    // target point in the unknown ordering (y, x_B, w)
    let mut target = Vec::with_capacity(dim);
    target.extend_from_slice(&state.y);
    for &j in &split.zeta {
        target.push(state.x[j]);
    }
    target.push(match case {
        ProjectionCase::TauDominant => state.tau,
        ProjectionCase::KDominant => state.k,
    });

    // KKT system with multiplier regularization
    let kkt_dim = 2 * dim;
    let mut kkt = Matrix::zeros(kkt_dim, kkt_dim);
    for i in 0..dim {
        kkt[(i, i)] = 1.0;
        for j in 0..dim {
            kkt[(i, dim + j)] = g[(j, i)]; // G'
            kkt[(dim + i, j)] = g[(i, j)]; // G
        }
        kkt[(dim + i, dim + i)] = -1e-12;
    }
    let mut rhs = vec![0.0; kkt_dim];
    rhs[..dim].copy_from_slice(&target);
    let sol = lu_solve(&kkt, &rhs)?;
    let z = &sol[..dim];

    let gz = g.mul_vec(z);
    let constraint_residual = math::norm2(&gz);

    let (tau, k) = match case {
        ProjectionCase::TauDominant => (z[m + nb], 0.0),
        ProjectionCase::KDominant => (0.0, z[m + nb]),
    };
    Ok(ProjectedPoint {
        y: z[..m].to_vec(),
        x_b: z[m..m + nb].to_vec(),
        tau,
        k,
        case,
        constraint_residual,
    })
}

/// Terminal status of the LP pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionStatus {
    Optimal,
    /// The primal has no feasible point (`-b'y* < 0` certificate).
    PrimalInfeasible,
    /// The dual has no feasible point (`c'x* < 0` certificate).
    DualInfeasible,
    /// Tau collapsed but neither certificate test fired.
    InfeasibleOrUnbounded,
}

/// Recovered solution of the original LP pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x_star: Vec<f64>,
    pub y_star: Vec<f64>,
    pub s_star: Vec<f64>,
    pub objective_primal: f64,
    pub objective_dual: f64,
    pub status: SolutionStatus,
}

/// Reads the LP solution off a projected point.
///
/// With `tau* > eps3` the optimal pair is `x*/tau*` (support entries from
/// the projection, complement zero) and `(y*/tau*, s*/tau*)` (support
/// entries zero, complement from the iterate). With `tau* <= eps3` the
/// strictly-complementary classification applies: `c'x* < 0` certifies the
/// dual infeasible, `-b'y* < 0` certifies the primal infeasible.
pub fn recover(
    instance: &HsdInstance,
    projected: &ProjectedPoint,
    split: &SupportSplit,
    state: &HsdState,
    eps3: f64,
) -> LpSolution {
    let problem = instance.problem();
    let n = problem.num_vars();
    let c = problem.c();
    let b = problem.b();

    let mut x = vec![0.0; n];
    for (jj, &j) in split.zeta.iter().enumerate() {
        x[j] = projected.x_b[jj];
    }
    let mut s = vec![0.0; n];
    for &j in &split.complement {
        s[j] = state.s[j];
    }

    if projected.tau > eps3 {
        let tau = projected.tau;
        let x_star: Vec<f64> = x.iter().map(|&v| v / tau).collect();
        let y_star: Vec<f64> = projected.y.iter().map(|&v| v / tau).collect();
        let s_star: Vec<f64> = s.iter().map(|&v| v / tau).collect();
        LpSolution {
            objective_primal: math::dot(c, &x_star),
            objective_dual: math::dot(b, &y_star),
            x_star,
            y_star,
            s_star,
            status: SolutionStatus::Optimal,
        }
    } else {
        let ctx = math::dot(c, &x);
        let bty = math::dot(b, &projected.y);
        let status = if ctx < 0.0 {
            SolutionStatus::DualInfeasible
        } else if -bty < 0.0 {
            SolutionStatus::PrimalInfeasible
        } else {
            SolutionStatus::InfeasibleOrUnbounded
        };
        LpSolution {
            x_star: x,
            y_star: projected.y.clone(),
            s_star: s,
            objective_primal: ctx,
            objective_dual: bty,
            status,
        }
    }
}

/// Classification applied on a tau-collapse exit: no least-squares, the
/// terminal iterate itself supplies the certificate values.
pub fn classify_collapse(instance: &HsdInstance, state: &HsdState, eps3: f64) -> LpSolution {
    let split = support_set(instance, state);
    let projected = ProjectedPoint {
        y: state.y.clone(),
        x_b: split.zeta.iter().map(|&j| state.x[j]).collect(),
        tau: state.tau.min(eps3),
        k: state.k,
        case: ProjectionCase::KDominant,
        constraint_residual: 0.0,
    };
    recover(instance, &projected, &split, state, eps3)
}
