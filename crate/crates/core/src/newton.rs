//! Per-iteration Newton system assembly and the exact-complementarity
//! shift applied to (possibly noisy) directions.
//!
//! The system matrix has six row/column blocks of sizes `(m, n, 1, 1, n, 1)`
//! for the unknowns `(dy, dx, dtau, dtheta, ds, dk)`:
//!
//! ```text
//! [  0    A   -b    bb    0    0  ]        [ 0              ]
//! [ -A'   0    c   -cb   -I    0  ]        [ 0              ]
//! [  b'  -c'   0    zb    0   -1  ]  d  =  [ 0              ]
//! [ -bb'  cb' -zb   0     0    0  ]        [ 0              ]
//! [  0    S    0    0     X    0  ]        [ gm 1 - Xs      ]
//! [  0    0    k    0     0   tau ]        [ gm - tau k     ]
//! ```
//!
//! Only the last `n + 1` rows depend on the iterate: `2(n + 1)` matrix
//! entries and the last `n + 1` right-hand-side entries.

use alloc::vec::Vec;

use crate::central_path;
use crate::linalg::Matrix;
use crate::lp_model::{HsdInstance, HsdState};

/// Centering weight of a Newton solve: the predictor aims at the optimum
/// (`gamma = 0`), the corrector re-centres at constant gap (`gamma = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonTarget {
    Predictor,
    Corrector,
}

impl NewtonTarget {
    #[inline]
    pub fn gamma(self) -> f64 {
        match self {
            NewtonTarget::Predictor => 0.0,
            NewtonTarget::Corrector => 1.0,
        }
    }
}

/// Row/column offsets of the six blocks `(y, x, tau, theta, s, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    pub m: usize,
    pub n: usize,
}

impl BlockLayout {
    pub fn y(&self) -> usize {
        0
    }
    pub fn x(&self) -> usize {
        self.m
    }
    pub fn tau(&self) -> usize {
        self.m + self.n
    }
    pub fn theta(&self) -> usize {
        self.m + self.n + 1
    }
    pub fn s(&self) -> usize {
        self.m + self.n + 2
    }
    pub fn k(&self) -> usize {
        self.m + 2 * self.n + 2
    }
    pub fn dim(&self) -> usize {
        self.m + 2 * self.n + 3
    }
    /// Offsets of all six blocks in order.
    pub fn offsets(&self) -> [usize; 6] {
        [self.y(), self.x(), self.tau(), self.theta(), self.s(), self.k()]
    }
    /// Sizes of all six blocks in order.
    pub fn sizes(&self) -> [usize; 6] {
        [self.m, self.n, 1, 1, self.n, 1]
    }
}

/// Assembled Newton system `M d = f` for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSystem {
    pub m: Matrix,
    pub f: Vec<f64>,
    pub target: NewtonTarget,
    pub layout: BlockLayout,
}

/// Search direction in the six blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub dy: Vec<f64>,
    pub dx: Vec<f64>,
    pub dtau: f64,
    pub dtheta: f64,
    pub ds: Vec<f64>,
    pub dk: f64,
}

impl Direction {
    /// Flattens into the block order used by the system matrix.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dy.len() + 2 * self.dx.len() + 3);
        v.extend_from_slice(&self.dy);
        v.extend_from_slice(&self.dx);
        v.push(self.dtau);
        v.push(self.dtheta);
        v.extend_from_slice(&self.ds);
        v.push(self.dk);
        v
    }

    /// Splits a flat solution vector into blocks.
    pub fn from_vec(d: &[f64], layout: BlockLayout) -> Direction {
        let (m, n) = (layout.m, layout.n);
        Direction {
            dy: d[..m].to_vec(),
            dx: d[m..m + n].to_vec(),
            dtau: d[layout.tau()],
            dtheta: d[layout.theta()],
            ds: d[layout.s()..layout.s() + n].to_vec(),
            dk: d[layout.k()],
        }
    }

    /// Concatenation `(dx, dtau)`.
    pub fn dx_bar(&self) -> Vec<f64> {
        let mut v = self.dx.clone();
        v.push(self.dtau);
        v
    }

    /// Concatenation `(ds, dk)`.
    pub fn ds_bar(&self) -> Vec<f64> {
        let mut v = self.ds.clone();
        v.push(self.dk);
        v
    }
}

/// Builds the full Newton system at `state` for the given centering weight.
pub fn assemble(instance: &HsdInstance, state: &HsdState, target: NewtonTarget) -> NewtonSystem {
    let problem = instance.problem();
    let a = problem.a();
    let (m, n) = (a.rows(), a.cols());
    let layout = BlockLayout { m, n };
    let dim = layout.dim();
    let mut mat = Matrix::zeros(dim, dim);
    let b = problem.b();
    let c = problem.c();
    let b_bar = instance.b_bar();
    let c_bar = instance.c_bar();
    let z_bar = instance.z_bar();

    // block row 1: [0  A  -b  bb  0  0]
    for i in 0..m {
        for j in 0..n {
            mat[(i, layout.x() + j)] = a[(i, j)];
        }
        mat[(i, layout.tau())] = -b[i];
        mat[(i, layout.theta())] = b_bar[i];
    }
    // block row 2: [-A' 0  c  -cb  -I  0]
    for i in 0..n {
        let r = layout.x() + i;
        for j in 0..m {
            mat[(r, layout.y() + j)] = -a[(j, i)];
        }
        mat[(r, layout.tau())] = c[i];
        mat[(r, layout.theta())] = -c_bar[i];
        mat[(r, layout.s() + i)] = -1.0;
    }
    // row 3: [b' -c' 0 zb 0 -1]
    {
        let r = layout.tau();
        for j in 0..m {
            mat[(r, layout.y() + j)] = b[j];
        }
        for j in 0..n {
            mat[(r, layout.x() + j)] = -c[j];
        }
        mat[(r, layout.theta())] = z_bar;
        mat[(r, layout.k())] = -1.0;
    }
    // row 4: [-bb' cb' -zb 0 0 0]
    {
        let r = layout.theta();
        for j in 0..m {
            mat[(r, layout.y() + j)] = -b_bar[j];
        }
        for j in 0..n {
            mat[(r, layout.x() + j)] = c_bar[j];
        }
        mat[(r, layout.tau())] = -z_bar;
    }
    // state-dependent rows 5 and 6
    for (row, col, v) in state_entries(layout, state) {
        mat[(row, col)] = v;
    }

    NewtonSystem {
        m: mat,
        f: rhs(layout, state, target),
        target,
        layout,
    }
}

/// The `2(n + 1)` matrix entries that change with the iterate: the `S` and
/// `X` diagonals of block row 5 and the `(k, tau)` pair of row 6.
pub fn state_entries(layout: BlockLayout, state: &HsdState) -> Vec<(usize, usize, f64)> {
    let n = layout.n;
    let mut entries = Vec::with_capacity(2 * (n + 1));
    for i in 0..n {
        let r = layout.s() + i;
        entries.push((r, layout.x() + i, state.s[i]));
        entries.push((r, layout.s() + i, state.x[i]));
    }
    let r = layout.k();
    entries.push((r, layout.tau(), state.k));
    entries.push((r, layout.k(), state.tau));
    entries
}

/// Right-hand side: zeros followed by `gamma mu 1 - Xs` and `gamma mu - tau k`.
pub fn rhs(layout: BlockLayout, state: &HsdState, target: NewtonTarget) -> Vec<f64> {
    let mu = central_path::mu(state);
    let gamma = target.gamma();
    let mut f = vec![0.0; layout.dim()];
    for i in 0..layout.n {
        f[layout.s() + i] = gamma * mu - state.x[i] * state.s[i];
    }
    f[layout.k()] = gamma * mu - state.tau * state.k;
    f
}

/// Re-imposes the linearized complementarity rows exactly on a direction
/// computed by any (possibly noisy) backend.
///
/// For each pair `(x_i, s_i)` the row `x_i ds_i + s_i dx_i = gamma mu - x_i s_i`
/// is solved for the component whose coefficient has the larger modulus
/// (ties shift the x-branch component `ds_i`), so the division is always by
/// `max(|x_i|, |s_i|)`. The `(tau, k)` pair is treated the same way through
/// its row `k dtau + tau dk = gamma mu - tau k`. Afterwards the rows hold to
/// roundoff, which keeps the gap identities of the exact analysis intact.
pub fn complementarity_shift(
    state: &HsdState,
    dir: &Direction,
    target: NewtonTarget,
    mu: f64,
) -> Direction {
    let gamma = target.gamma();
    let mut out = dir.clone();
    for i in 0..state.x.len() {
        let (x, s) = (state.x[i], state.s[i]);
        let rhs = gamma * mu - x * s;
        if x.abs() >= s.abs() {
            out.ds[i] = (rhs - s * out.dx[i]) / x;
        } else {
            out.dx[i] = (rhs - x * out.ds[i]) / s;
        }
    }
    let (tau, k) = (state.tau, state.k);
    let rhs = gamma * mu - tau * k;
    if tau.abs() >= k.abs() {
        out.dk = (rhs - k * out.dtau) / tau;
    } else {
        out.dtau = (rhs - tau * out.dk) / k;
    }
    out
}

/// Max-norm residual of the linearized complementarity rows
/// `X ds + S dx - (gamma mu 1 - Xs)` and its `(tau, k)` analogue.
pub fn complementarity_residual(
    state: &HsdState,
    dir: &Direction,
    target: NewtonTarget,
    mu: f64,
) -> f64 {
    let gamma = target.gamma();
    let mut worst = 0.0f64;
    for i in 0..state.x.len() {
        let r = state.x[i] * dir.ds[i] + state.s[i] * dir.dx[i]
            - (gamma * mu - state.x[i] * state.s[i]);
        worst = worst.max(r.abs());
    }
    let r = state.k * dir.dtau + state.tau * dir.dk - (gamma * mu - state.tau * state.k);
    worst.max(r.abs())
}
