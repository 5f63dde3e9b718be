//! Classical simulation of the externally visible behaviour of a quantum
//! linear-system solver: tomography readout of the solution state,
//! multiplicative norm estimation, swap-test style verification, and the
//! oracle cost model.
//!
//! Nothing here simulates quantum dynamics. The solution state is stood in
//! for by its exact classical vector; what is reproduced faithfully is the
//! *statistics* of reading that state out (two batches of `N` measurement
//! samples) and the cost formula a real device would be charged.

use alloc::vec::Vec;

use rand::distributions::Uniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::math;
use crate::seeding::{self, Stream};

/// Result of one tomography readout.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyOutcome {
    /// Reconstructed vector `sigma_i * sqrt(p_i)`; unit norm by
    /// construction from the measurement counts.
    pub estimate: Vec<f64>,
    /// Copies prepared per measurement batch.
    pub copies_used: u64,
    /// Coordinates whose recovered sign disagrees with the input vector
    /// (diagnostic only).
    pub sign_flips_vs_truth: usize,
    pub seed: u64,
}

/// Number of copies per batch: `ceil(36 n ln n / eps^2)`, floored at 1.
pub fn copies_needed(dim: usize, epsilon: f64) -> u64 {
    let n = dim as f64;
    let raw = 36.0 * n * math::ln(n) / (epsilon * epsilon);
    math::ceil(raw).max(1.0) as u64
}

/// Draws multinomial counts over `probs` (renormalized internally) by
/// conditional binomial decomposition; exact in distribution and O(bins)
/// regardless of `n`.
fn multinomial<R: Rng + ?Sized>(rng: &mut R, n: u64, probs: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return counts;
    }
    let mut remaining_n = n;
    let mut remaining_p = total;
    for (i, &p) in probs.iter().enumerate() {
        if remaining_n == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining_n;
            break;
        }
        let ratio = if remaining_p > 0.0 { (p / remaining_p).clamp(0.0, 1.0) } else { 1.0 };
        let draw = if ratio >= 1.0 {
            remaining_n
        } else if ratio <= 0.0 {
            0
        } else {
            Binomial::new(remaining_n, ratio)
                .expect("ratio clamped to [0,1]")
                .sample(rng)
        };
        counts[i] = draw;
        remaining_n -= draw;
        remaining_p -= p;
    }
    counts
}

/// Tomography of a real unit vector at precision `epsilon`.
///
/// Amplitude batch: `N` basis-state measurements give counts `n_i` and
/// amplitude estimates `sqrt(p_i) = sqrt(n_i / N)`. Sign batch: `N` fresh
/// samples from the interference distribution
/// `Pr(0, i) ∝ (d_i + sqrt(p_i))^2 / 4`, `Pr(1, i) ∝ (d_i - sqrt(p_i))^2 / 4`
/// (renormalized); the sign is `+1` exactly when `n(0, i) > 0.4 p_i N`.
pub fn tomography(d_true: &[f64], epsilon: f64, rng_seed: u64) -> Result<TomographyOutcome> {
    let dim = d_true.len();
    if dim == 0 {
        return Err(Error::ZeroVector);
    }
    let norm = math::norm2(d_true);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonFinite("tomography input must be a unit vector".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::NonFinite("epsilon must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n_copies = copies_needed(dim, epsilon);

    // amplitude batch
    let amp_probs: Vec<f64> = d_true.iter().map(|&v| v * v).collect();
    let counts = multinomial(&mut rng, n_copies, &amp_probs);
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / n_copies as f64).collect();

    // sign batch over (b, i) outcomes, fresh randomness
    let mut sign_probs = vec![0.0; 2 * dim];
    for i in 0..dim {
        let root_p = math::sqrt(p[i]);
        sign_probs[i] = (d_true[i] + root_p) * (d_true[i] + root_p) / 4.0;
        sign_probs[dim + i] = (d_true[i] - root_p) * (d_true[i] - root_p) / 4.0;
    }
    let sign_counts = multinomial(&mut rng, n_copies, &sign_probs);

    let mut estimate = vec![0.0; dim];
    let mut flips = 0usize;
    for i in 0..dim {
        let sigma = if (sign_counts[i] as f64) > 0.4 * p[i] * n_copies as f64 {
            1.0
        } else {
            -1.0
        };
        estimate[i] = sigma * math::sqrt(p[i]);
        if p[i] > 0.0 && sigma * d_true[i] < 0.0 {
            flips += 1;
        }
    }
    Ok(TomographyOutcome {
        estimate,
        copies_used: n_copies,
        sign_flips_vs_truth: flips,
        seed: rng_seed,
    })
}

/// Multiplicative norm estimate: `true_norm * (1 + u)` with
/// `u ~ Uniform[-epsilon, +epsilon]`.
pub fn norm_estimate(true_norm: f64, epsilon: f64, rng_seed: u64) -> Result<f64> {
    if !(true_norm > 0.0) {
        return Err(Error::NonPositiveEntry { what: "true_norm", index: 0 });
    }
    if epsilon == 0.0 {
        return Ok(true_norm);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let u = rng.sample(Uniform::new_inclusive(-epsilon, epsilon));
    Ok(true_norm * (1.0 + u))
}

/// Swap-test stand-in: accepts when the normalized candidate is within
/// `sqrt(7) * epsilon` of the normalized reference (non-strict).
pub fn fidelity_check(candidate: &[f64], exact: &[f64], epsilon: f64) -> Result<bool> {
    let cn = math::norm2(candidate);
    let en = math::norm2(exact);
    if cn == 0.0 || en == 0.0 {
        return Err(Error::ZeroVector);
    }
    if candidate.len() != exact.len() {
        return Err(Error::DimensionMismatch(
            "fidelity check needs equal-length vectors".into(),
        ));
    }
    let dist_sq: f64 = candidate
        .iter()
        .zip(exact)
        .map(|(&c, &e)| {
            let d = c / cn - e / en;
            d * d
        })
        .sum();
    Ok(math::sqrt(dist_sq) <= math::sqrt(7.0) * epsilon)
}

/// Cost-model output for one solve, in abstract oracle-cost units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QlsaCost {
    pub frobenius: f64,
    pub kappa: f64,
    pub epsilon: f64,
    pub n_prime: usize,
    /// Cost of preparing one copy of the solution state:
    /// `(||M||_F + log2 n') * kappa * log2(n'/eps)`.
    pub prepare_cost: f64,
    /// Cost of the multiplicative norm estimate: `prepare_cost / eps`.
    pub norm_cost: f64,
}

/// Evaluates the cost model. The polylog convention is `log2` to the first
/// power, and the state-preparation oracle is charged `log2 n'`; any fixed
/// convention supports the relative comparisons the trace is for.
pub fn qlsa_cost(frobenius: f64, kappa: f64, epsilon: f64, n_prime: usize) -> QlsaCost {
    let logn = math::log2(n_prime as f64);
    let prepare_cost = (frobenius + logn) * kappa * math::log2(n_prime as f64 / epsilon);
    QlsaCost {
        frobenius,
        kappa,
        epsilon,
        n_prime,
        prepare_cost,
        norm_cost: prepare_cost / epsilon,
    }
}

/// Total accounted cost of one solve attempt: two measurement batches of
/// `copies` state preparations plus one norm estimation.
pub fn attempt_cost(cost: &QlsaCost, copies: u64) -> f64 {
    2.0 * copies as f64 * cost.prepare_cost + cost.norm_cost
}

/// Seeds for the substreams of one solve.
pub(crate) fn solve_streams(rng_seed: u64, attempt: u64) -> (u64, u64) {
    (
        seeding::derive(rng_seed, Stream::Tomography, attempt),
        seeding::derive(rng_seed, Stream::NormEstimate, attempt),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use hsdpc_testkit::chi_square_critical_99;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = math::norm2(&v);
            if n > 1e-3 {
                return v.iter().map(|&x| x / n).collect();
            }
        }
    }

    #[test]
    fn basis_vector_reconstructed_exactly() {
        let mut e1 = vec![0.0; 8];
        e1[0] = 1.0;
        let out = tomography(&e1, 0.2, 3).unwrap();
        assert_eq!(out.estimate, e1);
        assert_eq!(out.sign_flips_vs_truth, 0);
    }

    #[test]
    fn two_point_vector_recovers_signs_and_masses() {
        let d = [1.0 / 2.0f64.sqrt(), -1.0 / 2.0f64.sqrt()];
        let out = tomography(&d, 0.1, 99).unwrap();
        let n = out.copies_used as f64;
        assert!(out.estimate[0] > 0.0);
        assert!(out.estimate[1] < 0.0);
        for i in 0..2 {
            let p = out.estimate[i] * out.estimate[i];
            assert!((p - 0.5).abs() <= 3.0 * (0.25 / n).sqrt());
        }
    }

    #[test]
    fn estimate_has_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for dim in [2usize, 5, 16, 33] {
            let d = random_unit(&mut rng, dim);
            let out = tomography(&d, 0.25, rng.gen()).unwrap();
            let norm_sq: f64 = out.estimate.iter().map(|&v| v * v).sum();
            assert!((norm_sq - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn failure_rate_within_theorem_bound() {
        // >= 200 seeded trials on random 16-dim unit vectors at eps = 0.1;
        // failures are ||est - d|| > sqrt(7) * eps
        let mut rng = ChaCha8Rng::seed_from_u64(161616);
        let trials = 200;
        let eps = 0.1;
        let mut failures = 0;
        for t in 0..trials {
            let d = random_unit(&mut rng, 16);
            let out = tomography(&d, eps, 1000 + t as u64).unwrap();
            let dist: f64 = math::norm2(
                &out.estimate
                    .iter()
                    .zip(&d)
                    .map(|(&a, &b)| a - b)
                    .collect::<Vec<_>>(),
            );
            if dist > 7.0f64.sqrt() * eps {
                failures += 1;
            }
        }
        let p_bound = 1.0 / 16.0f64.powf(0.83);
        let sigma = (p_bound * (1.0 - p_bound) / trials as f64).sqrt();
        assert!(
            (failures as f64 / trials as f64) <= p_bound + 3.0 * sigma,
            "failure rate {} over bound",
            failures as f64 / trials as f64
        );
    }

    #[test]
    fn well_resolved_signs_rarely_wrong() {
        // coordinates with |d_i| sqrt(N) >= 10 should essentially never flip
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        let mut resolved = 0usize;
        let mut wrong = 0usize;
        for t in 0..100 {
            let d = random_unit(&mut rng, 8);
            let out = tomography(&d, 0.3, 5000 + t).unwrap();
            let root_n = (out.copies_used as f64).sqrt();
            for i in 0..8 {
                if d[i].abs() * root_n >= 10.0 {
                    resolved += 1;
                    if out.estimate[i] * d[i] < 0.0 {
                        wrong += 1;
                    }
                }
            }
        }
        assert!(resolved > 100);
        assert!((wrong as f64) < 0.01 * resolved as f64, "{wrong}/{resolved}");
    }

    #[test]
    fn norm_estimate_exact_at_zero_epsilon() {
        assert_eq!(norm_estimate(2.5, 0.0, 1).unwrap(), 2.5);
    }

    #[test]
    fn norm_estimate_always_in_interval() {
        for seed in 0..1000 {
            let v = norm_estimate(2.0, 0.1, seed).unwrap();
            assert!((1.8..=2.2).contains(&v));
        }
    }

    #[test]
    fn norm_estimate_mean_unbiased() {
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|s| norm_estimate(1.0, 0.2, s).unwrap())
            .sum::<f64>()
            / n as f64;
        // u ~ U[-0.2, 0.2]: sd of the mean = 0.2 / sqrt(3 n)
        let sigma = 0.2 / (3.0f64 * n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn fidelity_accepts_identical_and_boundary() {
        let v = [3.0, 4.0];
        assert!(fidelity_check(&v, &v, 0.01).unwrap());
        // candidate at distance exactly sqrt(7) eps from the unit reference
        let eps = 0.1;
        let d = 7.0f64.sqrt() * eps;
        let exact = [1.0, 0.0];
        // rotate by the angle whose chord is d
        let half = (d / 2.0).asin();
        let ang = 2.0 * half;
        let cand = [ang.cos(), ang.sin()];
        assert!(fidelity_check(&cand, &exact, eps * (1.0 + 1e-12)).unwrap());
    }

    #[test]
    fn fidelity_rejects_antipodal() {
        let v = [1.0, 2.0, -1.0];
        let neg: Vec<f64> = v.iter().map(|&x| -x).collect();
        assert!(!fidelity_check(&neg, &v, 0.1).unwrap());
    }

    #[test]
    fn fidelity_rejects_zero_vector() {
        assert!(matches!(fidelity_check(&[0.0], &[1.0], 0.1), Err(Error::ZeroVector)));
    }

    #[test]
    fn cost_hand_value() {
        let c = qlsa_cost(1.0, 1.0, 0.5, 2);
        assert_eq!(c.prepare_cost, 4.0);
        assert_eq!(c.norm_cost, 8.0);
    }

    #[test]
    fn cost_linear_in_kappa() {
        let a = qlsa_cost(2.0, 1.0, 0.25, 8);
        let b = qlsa_cost(2.0, 2.0, 0.25, 8);
        assert!((b.prepare_cost - 2.0 * a.prepare_cost).abs() < 1e-12);
        assert!((b.norm_cost - 2.0 * a.norm_cost).abs() < 1e-12);
    }

    #[test]
    fn halving_epsilon_doubles_norm_ratio() {
        let a = qlsa_cost(2.0, 3.0, 0.2, 8);
        let b = qlsa_cost(2.0, 3.0, 0.1, 8);
        let ra = a.norm_cost / a.prepare_cost;
        let rb = b.norm_cost / b.prepare_cost;
        assert!((rb / ra - 2.0).abs() < 1e-12);
    }

    #[test]
    fn multinomial_counts_follow_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let probs = [0.5, 0.3, 0.2];
        let n = 50_000u64;
        let counts = multinomial(&mut rng, n, &probs);
        assert_eq!(counts.iter().sum::<u64>(), n);
        let obs: Vec<usize> = counts.iter().map(|&c| c as usize).collect();
        let chi = hsdpc_testkit::chi_square_statistic(&obs, &probs);
        assert!(chi < chi_square_critical_99(2), "chi = {chi}");
    }
}
