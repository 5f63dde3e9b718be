//! Classical realization of the quantum-accessible data structure used for
//! state preparation: per-row binary trees of squared magnitudes with
//! signs, supporting logarithmic single-entry updates and exact
//! L2-proportional sampling.
//!
//! Trees are flat-array heaps padded to the next power of two; padding
//! leaves hold zero. Internal nodes are always recomputed as the sum of
//! their two children, so the sum invariant holds bitwise after any update
//! sequence.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Binary sampling tree over one vector: leaf `i` stores
/// `(value_i^2, sign(value_i))`, internal nodes store subtree sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingTree {
    len: usize,
    base: usize,
    /// Heap storage: root at index 1, leaves at `base..base + len`.
    sums: Vec<f64>,
    signs: Vec<i8>,
}

impl SamplingTree {
    /// Builds a tree over `v` in one bottom-up pass.
    pub fn build(v: &[f64]) -> SamplingTree {
        let len = v.len();
        let base = len.next_power_of_two().max(1);
        let mut sums = vec![0.0; 2 * base];
        let mut signs = vec![1i8; len];
        for (i, &val) in v.iter().enumerate() {
            sums[base + i] = val * val;
            signs[i] = if val < 0.0 { -1 } else { 1 };
        }
        for i in (1..base).rev() {
            sums[i] = sums[2 * i] + sums[2 * i + 1];
        }
        SamplingTree { len, base, sums, signs }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Total mass: the root equals `||v||^2`.
    pub fn root(&self) -> f64 {
        if self.base >= 1 && self.sums.len() > 1 {
            self.sums[1]
        } else {
            0.0
        }
    }

    /// Number of levels below the root (`ceil(log2 len)`).
    pub fn depth(&self) -> usize {
        self.base.trailing_zeros() as usize
    }

    /// Squared magnitude stored at leaf `i`.
    pub fn leaf_square(&self, i: usize) -> f64 {
        self.sums[self.base + i]
    }

    /// Sign stored at leaf `i`.
    pub fn leaf_sign(&self, i: usize) -> i8 {
        self.signs[i]
    }

    /// Signed value reconstructed from leaf `i`.
    pub fn leaf_value(&self, i: usize) -> f64 {
        self.signs[i] as f64 * libm::sqrt(self.sums[self.base + i])
    }

    /// Stores `value` at leaf `i` and refreshes the ancestor path.
    ///
    /// Returns the number of nodes written: `0` when the stored tuple is
    /// unchanged, otherwise `1 + depth` (the leaf plus every ancestor).
    pub fn update(&mut self, i: usize, value: f64) -> Result<usize> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange { index: i, len: self.len });
        }
        let sq = value * value;
        let sign = if value < 0.0 { -1 } else { 1 };
        if self.sums[self.base + i] == sq && self.signs[i] == sign {
            return Ok(0);
        }
        self.sums[self.base + i] = sq;
        self.signs[i] = sign;
        let mut node = (self.base + i) / 2;
        let mut written = 1;
        while node >= 1 {
            self.sums[node] = self.sums[2 * node] + self.sums[2 * node + 1];
            written += 1;
            if node == 1 {
                break;
            }
            node /= 2;
        }
        Ok(written)
    }

    /// Stores an already-squared magnitude with an explicit sign; used by
    /// [`MatrixStore`] to keep the norm tree's leaves bitwise equal to the
    /// row roots.
    fn update_square(&mut self, i: usize, square: f64, sign: i8) -> Result<usize> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange { index: i, len: self.len });
        }
        if self.sums[self.base + i] == square && self.signs[i] == sign {
            return Ok(0);
        }
        self.sums[self.base + i] = square;
        self.signs[i] = sign;
        let mut node = (self.base + i) / 2;
        let mut written = 1;
        while node >= 1 {
            self.sums[node] = self.sums[2 * node] + self.sums[2 * node + 1];
            written += 1;
            if node == 1 {
                break;
            }
            node /= 2;
        }
        Ok(written)
    }

    /// Draws a leaf index with probability `value_i^2 / root` by branching
    /// top-down on the partial sums.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let total = self.root();
        if total <= 0.0 {
            return Err(Error::ZeroMassTree);
        }
        let mut u = rng.gen::<f64>() * total;
        let mut node = 1usize;
        while node < self.base {
            let left = self.sums[2 * node];
            let right = self.sums[2 * node + 1];
            // zero-mass guards keep float boundary cases out of dead subtrees
            if right <= 0.0 || (u < left && left > 0.0) {
                node = 2 * node;
            } else {
                u -= left;
                node = 2 * node + 1;
            }
        }
        Ok((node - self.base).min(self.len - 1))
    }

    /// Verifies the child-sum identity on every internal node.
    pub fn check_sums(&self, tol: f64) -> bool {
        (1..self.base).all(|i| (self.sums[i] - (self.sums[2 * i] + self.sums[2 * i + 1])).abs() <= tol)
    }
}

/// Counts reported by a bulk refresh of a [`MatrixStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UpdateStats {
    /// Leaves submitted for update.
    pub leaves_touched: usize,
    /// Tree nodes actually rewritten (leaves plus ancestor paths).
    pub nodes_written: usize,
}

/// Row trees plus the norm tree over row norms; the classical analogue of
/// the two state-preparation maps.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixStore {
    rows: usize,
    cols: usize,
    row_trees: Vec<SamplingTree>,
    norm_tree: SamplingTree,
}

impl MatrixStore {
    pub fn build(m: &Matrix) -> MatrixStore {
        let row_trees: Vec<SamplingTree> = (0..m.rows()).map(|i| SamplingTree::build(m.row(i))).collect();
        let mut norm_tree = SamplingTree::build(&vec![0.0; m.rows()]);
        for (i, t) in row_trees.iter().enumerate() {
            norm_tree.update_square(i, t.root(), 1).expect("index in range");
        }
        MatrixStore {
            rows: m.rows(),
            cols: m.cols(),
            row_trees,
            norm_tree,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_tree(&self, i: usize) -> &SamplingTree {
        &self.row_trees[i]
    }

    pub fn norm_tree(&self) -> &SamplingTree {
        &self.norm_tree
    }

    /// Squared Frobenius norm (root of the norm tree).
    pub fn frobenius_sq(&self) -> f64 {
        self.norm_tree.root()
    }

    /// Updates one entry, refreshing the row tree and the norm-tree leaf.
    pub fn update(&mut self, row: usize, col: usize, value: f64) -> Result<usize> {
        if row >= self.rows {
            return Err(Error::IndexOutOfRange { index: row, len: self.rows });
        }
        let written = self.row_trees[row].update(col, value)?;
        if written > 0 {
            self.norm_tree
                .update_square(row, self.row_trees[row].root(), 1)
                .expect("row index in range");
        }
        Ok(written)
    }

    /// Applies a batch of entry updates, counting touched leaves and
    /// written nodes. This is the access path the iteration loop uses for
    /// the state-dependent Newton entries.
    pub fn bulk_update(&mut self, entries: &[(usize, usize, f64)]) -> Result<UpdateStats> {
        let mut stats = UpdateStats {
            leaves_touched: entries.len(),
            nodes_written: 0,
        };
        for &(r, c, v) in entries {
            stats.nodes_written += self.update(r, c, v)?;
        }
        Ok(stats)
    }

    /// Samples `(row, col)` with probability `M_rc^2 / ||M||_F^2`: a row by
    /// its squared norm, then a column within the row.
    pub fn row_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, usize)> {
        let row = self.norm_tree.sample(rng).map_err(|_| Error::ZeroMassTree)?;
        let col = self.row_trees[row].sample(rng)?;
        Ok((row, col))
    }
}
