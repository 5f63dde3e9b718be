//! Central-path quantities: the duality-gap measure `mu`, neighbourhood
//! membership, and the gradient-descent restoration that pulls noisy
//! corrector outputs back into the neighbourhood.
//!
//! The restoration functional on concatenated vectors `x = (x, tau)`,
//! `s = (s, k)` is
//!
//! ```text
//! g(x, s) = ||Xs - mu 1||^2 - beta^2 mu^2
//!         = sum_i x_i^2 s_i^2 - B (sum_i x_i s_i)^2,   B = (beta^2 + (n+1)) / (n+1)^2
//! ```
//!
//! so `g <= 0` is exactly membership in the neighbourhood of radius `beta`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lp_model::HsdState;
use crate::math;

/// Duality-gap measure `mu = (x's + tau k) / (n + 1)`.
pub fn mu(state: &HsdState) -> f64 {
    let n = state.x.len();
    (math::dot(&state.x, &state.s) + state.tau * state.k) / (n as f64 + 1.0)
}

/// Result of a neighbourhood membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodCheck {
    pub mu: f64,
    /// l2 distance of the complementarity vector `(Xs; tau k)` from `mu 1`.
    pub proximity: f64,
    pub beta: f64,
    /// `proximity <= beta * mu` (non-strict).
    pub inside: bool,
}

/// Distance of `(Xs; tau k)` from the central point `mu 1` against the
/// radius `beta * mu`.
pub fn proximity(state: &HsdState, beta: f64) -> NeighborhoodCheck {
    let mu = mu(state);
    let mut dist_sq = 0.0;
    for (&x, &s) in state.x.iter().zip(&state.s) {
        let d = x * s - mu;
        dist_sq += d * d;
    }
    let d = state.tau * state.k - mu;
    dist_sq += d * d;
    let proximity = math::sqrt(dist_sq);
    NeighborhoodCheck {
        mu,
        proximity,
        beta,
        inside: proximity <= beta * mu,
    }
}

/// Evaluates the restoration functional and its gradient on concatenated
/// `(x, tau)` / `(s, k)` vectors of length `n + 1`.
///
/// Returns `(g, dg/dx, dg/ds)` with
/// `dg/dx_k = 2 x_k s_k^2 - 2 B P s_k`, `dg/ds_k = 2 s_k x_k^2 - 2 B P x_k`
/// where `P = sum_i x_i s_i`.
pub fn g_eval(x_bar: &[f64], s_bar: &[f64], beta: f64) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    if x_bar.len() != s_bar.len() {
        return Err(Error::DimensionMismatch(
            "x_bar and s_bar must have equal length".into(),
        ));
    }
    let len = x_bar.len() as f64;
    let b_coef = (beta * beta + len) / (len * len);
    let p: f64 = x_bar.iter().zip(s_bar).map(|(&x, &s)| x * s).sum();
    let sum_sq: f64 = x_bar.iter().zip(s_bar).map(|(&x, &s)| (x * s) * (x * s)).sum();
    let g = sum_sq - b_coef * p * p;
    let grad_x: Vec<f64> = x_bar
        .iter()
        .zip(s_bar)
        .map(|(&x, &s)| 2.0 * x * s * s - 2.0 * b_coef * p * s)
        .collect();
    let grad_s: Vec<f64> = x_bar
        .iter()
        .zip(s_bar)
        .map(|(&x, &s)| 2.0 * s * x * x - 2.0 * b_coef * p * x)
        .collect();
    Ok((g, grad_x, grad_s))
}

/// First-order decrease bracket of the gradient step,
/// `D = sum_i (x_i^2 + s_i^2) (x_i s_i - B P)^2`; equals `||grad g||^2 / 4`.
fn decrease_bracket(x_bar: &[f64], s_bar: &[f64], beta: f64) -> f64 {
    let len = x_bar.len() as f64;
    let b_coef = (beta * beta + len) / (len * len);
    let p: f64 = x_bar.iter().zip(s_bar).map(|(&x, &s)| x * s).sum();
    x_bar
        .iter()
        .zip(s_bar)
        .map(|(&x, &s)| {
            let dev = x * s - b_coef * p;
            (x * x + s * s) * dev * dev
        })
        .sum()
}

/// Result of [`restore`].
#[derive(Debug, Clone, PartialEq)]
pub struct RestorationOutcome {
    pub state: HsdState,
    pub steps_taken: usize,
    pub final_g: f64,
    /// Step size of the last gradient step (0 when no step was needed).
    pub epsilon_double_prime_used: f64,
}

/// Gradient-descent shift of `(x, tau)` and `(s, k)` until `g <= 0`,
/// i.e. until the state is inside the neighbourhood of radius `beta`.
///
/// Each step uses the exact first-order zero-crossing size `g / (4 D)`
/// (`D` the decrease bracket), halved as needed to keep every coordinate
/// strictly positive. `y` and `theta` are untouched; the equality rows
/// drift by `O(step^2)`, which the caller records rather than re-projects.
pub fn restore(state: &HsdState, beta: f64, max_steps: usize) -> Result<RestorationOutcome> {
    if !state.is_interior() {
        return Err(Error::NonInteriorState);
    }
    let mut x_bar = state.x_bar();
    let mut s_bar = state.s_bar();
    let mut steps = 0usize;
    let mut last_eps = 0.0f64;

    loop {
        let (g, grad_x, grad_s) = g_eval(&x_bar, &s_bar, beta)?;
        if g <= 0.0 {
            return Ok(RestorationOutcome {
                state: state.with_bars(&x_bar, &s_bar),
                steps_taken: steps,
                final_g: g,
                epsilon_double_prime_used: last_eps,
            });
        }
        if steps >= max_steps {
            return Err(Error::RestorationFailed { steps, final_g: g });
        }
        let bracket = decrease_bracket(&x_bar, &s_bar, beta);
        if bracket <= f64::MIN_POSITIVE {
            // stationary points satisfy g <= 0, so this cannot happen on
            // exact arithmetic; treat as failure
            return Err(Error::RestorationFailed { steps, final_g: g });
        }
        let mut eps = g / (4.0 * bracket);
        // halve until positivity is preserved
        let mut guard = 0;
        while x_bar
            .iter()
            .zip(&grad_x)
            .chain(s_bar.iter().zip(&grad_s))
            .any(|(&v, &dg)| v - eps * dg <= 0.0)
        {
            eps *= 0.5;
            guard += 1;
            if guard > 200 {
                return Err(Error::RestorationFailed { steps, final_g: g });
            }
        }
        for (v, &dg) in x_bar.iter_mut().zip(&grad_x) {
            *v -= eps * dg;
        }
        for (v, &dg) in s_bar.iter_mut().zip(&grad_s) {
            *v -= eps * dg;
        }
        last_eps = eps;
        steps += 1;
    }
}
