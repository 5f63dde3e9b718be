//! Dense linear-programming solver built on the homogeneous self-dual
//! embedding and Mizuno-Todd-Ye predictor-corrector path following, with
//! pluggable linear-system backends.
//!
//! Three backends satisfy a single solve contract:
//!
//! - `Exact` — dense LU with partial pivoting,
//! - `ConjugateGradient` — CG on the normal equations,
//! - `QlsaSim` — a classical simulation of a quantum linear-system solver:
//!   the observable behaviour (tomography sampling noise, multiplicative
//!   norm estimation, swap-test verification with retries, and the oracle
//!   cost model) is reproduced exactly; the unobservable quantum state is
//!   stood in for by an internal exact solve.
//!
//! The noisy backend is made viable by two corrections: a per-coordinate
//! complementarity shift that re-imposes the linearized complementarity
//! rows exactly after every solve ([`newton::complementarity_shift`]), and
//! a gradient-descent restoration that returns corrector outputs to the
//! inner central-path neighbourhood ([`central_path::restore`]).
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live
//! in the companion `hsdpc-cli` crate.

#![no_std]
#![warn(clippy::all)]
#![allow(clippy::too_many_arguments)] // IPM plumbing carries many parameters

#[macro_use]
extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod central_path;
pub mod diagnostics;
pub mod error;
pub mod kp_tree;
pub mod linalg;
pub mod lp_model;
pub mod newton;
pub mod predictor_corrector;
pub mod qlsa_sim;
pub mod seeding;
pub mod solvers;
pub mod synth;
pub mod terminate;

pub(crate) mod math;

pub use error::Error;
pub use linalg::Matrix;
pub use lp_model::{HsdInstance, HsdState, LpProblem, ProblemForm};
pub use predictor_corrector::{SolveReport, SolveStatus, SolverConfig, TraceRow};
pub use solvers::{BackendKind, SolveMeta};
pub use terminate::{LpSolution, SolutionStatus};
