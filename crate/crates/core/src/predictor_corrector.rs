//! The main predictor-corrector iteration: alternating affine and
//! centering solves, step-length search, neighbourhood restoration,
//! termination checks, and trace capture.
//!
//! Each iteration refreshes the sampling-tree store with the `2(n + 1)`
//! state-dependent matrix entries and the last `n + 1` right-hand-side
//! entries before solving, realizing the access pattern a quantum state
//! preparation store would see.

use alloc::vec::Vec;

use crate::central_path::{self, restore};
use crate::diagnostics;
use crate::error::{Error, Result};
use crate::kp_tree::{MatrixStore, SamplingTree};
use crate::lp_model::{embed_default, residuals, standardize, HsdInstance, HsdState, LpProblem};
use crate::math;
use crate::newton::{assemble, complementarity_shift, rhs, state_entries, Direction, NewtonTarget};
use crate::solvers::{
    solve_cg, solve_exact, solve_qlsa_sim_with_retries, step_seed, BackendKind, SolveMeta,
};
use crate::terminate::{classify_collapse, project, recover, support_set, SolutionStatus};
use crate::LpSolution;

/// Run-level configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub backend: BackendKind,
    /// Per-solve precision: CG relative-residual tolerance, or the
    /// simulated quantum solver's epsilon.
    pub epsilon: f64,
    /// Gap threshold of the optimality test.
    pub eps1: f64,
    /// Infeasibility-norm threshold of the optimality test.
    pub eps2: f64,
    /// Tau-collapse threshold.
    pub eps3: f64,
    /// Iteration cap; `None` picks the default bound from the problem size.
    pub max_iterations: Option<usize>,
    /// Inner neighbourhood radius (corrector target), 1/4.
    pub beta_inner: f64,
    /// Outer neighbourhood radius (predictor target), 1/2.
    pub beta_outer: f64,
    pub seed: u64,
    /// Fidelity-check retry budget of the simulated solver.
    pub retry_c: usize,
    /// Gradient-descent restoration step cap.
    pub max_restoration_steps: usize,
}

impl SolverConfig {
    pub fn new(backend: BackendKind) -> Self {
        let epsilon = 1e-6;
        SolverConfig {
            backend,
            epsilon,
            eps1: epsilon,
            eps2: epsilon,
            eps3: 1e-8,
            max_iterations: None,
            beta_inner: 0.25,
            beta_outer: 0.5,
            seed: 0,
            retry_c: 4,
            max_restoration_steps: 20,
        }
    }

    /// Sets the per-solve precision and re-derives the default
    /// `eps1 = eps2 = epsilon`.
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self.eps1 = epsilon;
        self.eps2 = epsilon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Constant-factor cap over the theoretical iteration bound:
    /// `ceil(20 sqrt(n+1) ln((n+1) / min(eps1 eps3^2, eps2 eps3)))`.
    pub fn default_max_iterations(&self, n: usize) -> usize {
        let np1 = (n + 1) as f64;
        let floor = (self.eps1 * self.eps3 * self.eps3).min(self.eps2 * self.eps3);
        let bound = 20.0 * math::sqrt(np1) * math::ln(np1 / floor);
        math::ceil(bound.max(1.0)) as usize
    }
}

/// One row of the per-step trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    /// Centering weight of the step: 0 predictor, 1 corrector.
    pub gamma: u8,
    /// Gap measure of the post-step state.
    pub mu: f64,
    pub tau: f64,
    pub theta: f64,
    /// Step length; predictor steps only.
    pub delta: Option<f64>,
    /// Central-path distance of the post-step state.
    pub proximity: f64,
    /// Empirical condition number of the step's Newton matrix.
    pub kappa: f64,
    /// Frobenius norm of the step's Newton matrix.
    pub frobenius: f64,
    /// Backend work units spent on the step's solve.
    pub cost_units: f64,
    pub restoration_steps: usize,
    /// Norm of the embedded-constraint residuals of the post-step state.
    pub residual_norm: f64,
}

/// Store-refresh counts of one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefreshCounts {
    /// Matrix-store leaves submitted (the state-dependent entries).
    pub matrix_leaves: usize,
    /// Right-hand-side tree leaves submitted.
    pub rhs_leaves: usize,
}

/// Terminal status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    InfeasibleOrUnbounded,
    NonConverged,
}

impl From<SolutionStatus> for SolveStatus {
    fn from(s: SolutionStatus) -> Self {
        match s {
            SolutionStatus::Optimal => SolveStatus::Optimal,
            SolutionStatus::PrimalInfeasible => SolveStatus::PrimalInfeasible,
            SolutionStatus::DualInfeasible => SolveStatus::DualInfeasible,
            SolutionStatus::InfeasibleOrUnbounded => SolveStatus::InfeasibleOrUnbounded,
        }
    }
}

/// Result of a completed run (converged, classified, or capped).
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Recovered solution; absent when the run hit the iteration cap.
    pub solution: Option<LpSolution>,
    /// Steps taken (= trace length).
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
    /// Per-step store-refresh counts.
    pub refreshes: Vec<RefreshCounts>,
    /// The embedded instance the run operated on (standardized problem).
    pub instance: HsdInstance,
    pub final_state: HsdState,
}

/// A failed run: the error plus everything observed before it.
#[derive(Debug, Clone)]
pub struct SolveFailure {
    pub error: Error,
    pub trace: Vec<TraceRow>,
}

/// Outcome of one predictor or corrector step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: HsdState,
    pub delta: Option<f64>,
    pub trace: TraceRow,
}

fn advance(state: &HsdState, dir: &Direction, delta: f64) -> HsdState {
    HsdState {
        y: state.y.iter().zip(&dir.dy).map(|(&v, &d)| v + delta * d).collect(),
        x: state.x.iter().zip(&dir.dx).map(|(&v, &d)| v + delta * d).collect(),
        tau: state.tau + delta * dir.dtau,
        theta: state.theta + delta * dir.dtheta,
        s: state.s.iter().zip(&dir.ds).map(|(&v, &d)| v + delta * d).collect(),
        k: state.k + delta * dir.dk,
    }
}

/// Largest step keeping the positive coordinates strictly positive, with a
/// 0.995 backoff from the boundary.
fn fraction_to_boundary(state: &HsdState, dir: &Direction) -> f64 {
    let mut alpha = 1.0f64;
    let mut clip = |v: f64, d: f64| {
        if d < 0.0 {
            alpha = alpha.min(-v / d);
        }
    };
    for (&v, &d) in state.x.iter().zip(&dir.dx) {
        clip(v, d);
    }
    for (&v, &d) in state.s.iter().zip(&dir.ds) {
        clip(v, d);
    }
    clip(state.tau, dir.dtau);
    clip(state.k, dir.dk);
    (0.995 * alpha).min(1.0)
}

/// The provably safe predictor bracket
/// `min(1/2, sqrt(mu / (8 ||Dx ds||)))` on concatenated direction vectors;
/// a full-length bracket when the product vector vanishes.
pub fn guaranteed_bracket(state: &HsdState, dir: &Direction) -> f64 {
    let mu = central_path::mu(state);
    let dx = dir.dx_bar();
    let ds = dir.ds_bar();
    let prod_sq: f64 = dx.iter().zip(&ds).map(|(&a, &b)| (a * b) * (a * b)).sum();
    let prod_norm = math::sqrt(prod_sq);
    if prod_norm > 0.0 {
        math::sqrt(mu / (8.0 * prod_norm)).min(0.5)
    } else {
        0.5
    }
}

/// Largest step length in `(0, 1]` keeping `state + delta * dir` interior
/// and inside the outer neighbourhood, by bisection to 1e-4 seeded from
/// the guaranteed bracket.
pub fn find_step_length(state: &HsdState, dir: &Direction, beta_outer: f64) -> Result<f64> {
    let admissible = |delta: f64| -> bool {
        let cand = advance(state, dir, delta);
        cand.is_interior() && central_path::proximity(&cand, beta_outer).inside
    };
    if admissible(1.0) {
        return Ok(1.0);
    }
    let mut lo = guaranteed_bracket(state, dir);
    while !admissible(lo) {
        lo *= 0.5;
        if lo < 1e-12 {
            return Err(Error::NoFeasibleStep);
        }
    }
    let mut hi = 1.0;
    while hi - lo > 1e-4 {
        let mid = 0.5 * (hi + lo);
        if admissible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn solve_backend(
    m: &crate::Matrix,
    f: &[f64],
    config: &SolverConfig,
    t: usize,
) -> Result<(Vec<f64>, SolveMeta)> {
    match config.backend {
        BackendKind::Exact => solve_exact(m, f),
        BackendKind::ConjugateGradient => {
            let dim = m.rows();
            let (d, meta) = solve_cg(m, f, config.epsilon, 10 * dim)?;
            let f_norm = math::norm2(f);
            if meta.residual_norm <= config.epsilon * f_norm {
                Ok((d, meta))
            } else {
                // non-convergence is not fatal: fall back to the dense
                // factorization, keeping the spent CG work on the books
                let (d2, mut meta2) = solve_exact(m, f)?;
                meta2.cost_units += meta.cost_units;
                meta2.backend_id = BackendKind::ConjugateGradient;
                Ok((d2, meta2))
            }
        }
        BackendKind::QlsaSim => solve_qlsa_sim_with_retries(
            m,
            f,
            config.epsilon,
            step_seed(config.seed, t),
            config.retry_c,
        ),
    }
}

fn trace_row(
    instance: &HsdInstance,
    new_state: &HsdState,
    meta: &SolveMeta,
    kappa: f64,
    t: usize,
    target: NewtonTarget,
    delta: Option<f64>,
    restoration_steps: usize,
) -> TraceRow {
    let chk = central_path::proximity(new_state, 0.0);
    TraceRow {
        t,
        gamma: target.gamma() as u8,
        mu: chk.mu,
        tau: new_state.tau,
        theta: new_state.theta,
        delta,
        proximity: chk.proximity,
        kappa,
        frobenius: meta.frobenius_norm,
        cost_units: meta.cost_units,
        restoration_steps,
        residual_norm: residuals(instance, new_state).norm(),
    }
}

/// One predictor step: affine solve, complementarity shift, step-length
/// search into the outer neighbourhood.
pub fn predictor_step(
    instance: &HsdInstance,
    state: &HsdState,
    config: &SolverConfig,
    t: usize,
) -> Result<StepOutcome> {
    let sys = assemble(instance, state, NewtonTarget::Predictor);
    let (d_raw, meta) = solve_backend(&sys.m, &sys.f, config, t)?;
    let mu_t = central_path::mu(state);
    let dir = Direction::from_vec(&d_raw, sys.layout);
    let dir = complementarity_shift(state, &dir, NewtonTarget::Predictor, mu_t);
    let delta = find_step_length(state, &dir, config.beta_outer)?;
    let new_state = advance(state, &dir, delta);
    let kappa = match meta.kappa_estimate {
        Some(k) => k,
        None => diagnostics::condition_number(&sys.m).unwrap_or(f64::INFINITY),
    };
    let trace = trace_row(
        instance,
        &new_state,
        &meta,
        kappa,
        t,
        NewtonTarget::Predictor,
        Some(delta),
        0,
    );
    Ok(StepOutcome {
        state: new_state,
        delta: Some(delta),
        trace,
    })
}

/// One corrector step: centering solve, complementarity shift, full step
/// (damped only if a noisy direction would exit the positive orthant), and
/// gradient-descent restoration when the result leaves the inner
/// neighbourhood.
pub fn corrector_step(
    instance: &HsdInstance,
    state: &HsdState,
    config: &SolverConfig,
    t: usize,
) -> Result<StepOutcome> {
    let sys = assemble(instance, state, NewtonTarget::Corrector);
    let (d_raw, meta) = solve_backend(&sys.m, &sys.f, config, t)?;
    let mu_t = central_path::mu(state);
    let dir = Direction::from_vec(&d_raw, sys.layout);
    let dir = complementarity_shift(state, &dir, NewtonTarget::Corrector, mu_t);
    let mut cand = advance(state, &dir, 1.0);
    if !cand.is_interior() {
        let alpha = fraction_to_boundary(state, &dir);
        cand = advance(state, &dir, alpha);
        if !cand.is_interior() {
            return Err(Error::NonInteriorState);
        }
    }
    let mut restoration_steps = 0;
    if !central_path::proximity(&cand, config.beta_inner).inside {
        let outcome = restore(&cand, config.beta_inner, config.max_restoration_steps)?;
        restoration_steps = outcome.steps_taken;
        cand = outcome.state;
    }
    let kappa = match meta.kappa_estimate {
        Some(k) => k,
        None => diagnostics::condition_number(&sys.m).unwrap_or(f64::INFINITY),
    };
    let trace = trace_row(
        instance,
        &cand,
        &meta,
        kappa,
        t,
        NewtonTarget::Corrector,
        None,
        restoration_steps,
    );
    Ok(StepOutcome {
        state: cand,
        delta: None,
        trace,
    })
}

/// Outcome of the per-iterate termination test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Continue,
    Optimal,
    TauCollapse,
}

/// Gap and infeasibility tests; the tau-collapse test wins when both fire
/// (the gap ratios are meaningless at collapsed tau).
pub fn check_termination(
    instance: &HsdInstance,
    state: &HsdState,
    config: &SolverConfig,
) -> Termination {
    if state.tau <= config.eps3 {
        return Termination::TauCollapse;
    }
    let gap = math::dot(&state.x, &state.s) / (state.tau * state.tau);
    let infeas = state.theta / state.tau * instance.infeasibility_norm();
    if gap <= config.eps1 && infeas <= config.eps2 {
        Termination::Optimal
    } else {
        Termination::Continue
    }
}

/// Full solve: standardize, embed, alternate predictor/corrector steps
/// with store refreshes and trace capture, then classify or project out.
pub fn run(problem: &LpProblem, config: &SolverConfig) -> core::result::Result<SolveReport, SolveFailure> {
    let std_problem = standardize(problem);
    let fail_early = |error: Error| SolveFailure { error, trace: Vec::new() };
    let (instance, mut state) = embed_default(&std_problem).map_err(fail_early)?;
    let n = instance.problem().num_vars();
    let max_iterations = config
        .max_iterations
        .unwrap_or_else(|| config.default_max_iterations(n));

    // initial store build; each step refreshes only the state-dependent part
    let sys0 = assemble(&instance, &state, NewtonTarget::Predictor);
    let layout = sys0.layout;
    let mut store = MatrixStore::build(&sys0.m);
    let mut rhs_tree = SamplingTree::build(&sys0.f);

    let mut trace: Vec<TraceRow> = Vec::new();
    let mut refreshes: Vec<RefreshCounts> = Vec::new();
    let mut t = 0usize;

    loop {
        match check_termination(&instance, &state, config) {
            Termination::TauCollapse => {
                let solution = classify_collapse(&instance, &state, config.eps3);
                let status = SolveStatus::from(solution.status);
                return Ok(SolveReport {
                    status,
                    solution: Some(solution),
                    iterations: t,
                    trace,
                    refreshes,
                    instance,
                    final_state: state,
                });
            }
            Termination::Optimal => {
                let split = support_set(&instance, &state);
                let projected = project(&instance, &state, &split)
                    .map_err(|error| SolveFailure { error, trace: trace.clone() })?;
                let solution = recover(&instance, &projected, &split, &state, config.eps3);
                let status = SolveStatus::from(solution.status);
                return Ok(SolveReport {
                    status,
                    solution: Some(solution),
                    iterations: t,
                    trace,
                    refreshes,
                    instance,
                    final_state: state,
                });
            }
            Termination::Continue => {}
        }
        if t >= max_iterations {
            return Ok(SolveReport {
                status: SolveStatus::NonConverged,
                solution: None,
                iterations: t,
                trace,
                refreshes,
                instance,
                final_state: state,
            });
        }

        let target = if t % 2 == 0 {
            NewtonTarget::Predictor
        } else {
            NewtonTarget::Corrector
        };

        // refresh the sampling store: 2(n+1) matrix leaves + n+1 RHS leaves
        let entries = state_entries(layout, &state);
        let stats = store
            .bulk_update(&entries)
            .map_err(|error| SolveFailure { error, trace: trace.clone() })?;
        let f_now = rhs(layout, &state, target);
        let mut rhs_leaves = 0usize;
        for i in layout.s()..layout.dim() {
            rhs_tree
                .update(i, f_now[i])
                .map_err(|error| SolveFailure { error, trace: trace.clone() })?;
            rhs_leaves += 1;
        }
        refreshes.push(RefreshCounts {
            matrix_leaves: stats.leaves_touched,
            rhs_leaves,
        });

        let outcome = match target {
            NewtonTarget::Predictor => predictor_step(&instance, &state, config, t),
            NewtonTarget::Corrector => corrector_step(&instance, &state, config, t),
        }
        .map_err(|error| SolveFailure { error, trace: trace.clone() })?;
        state = outcome.state;
        trace.push(outcome.trace);
        t += 1;
    }
}
