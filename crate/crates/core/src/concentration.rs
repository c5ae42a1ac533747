//! Finite-horizon log-MGF estimates and tail probabilities for the reward sum
//! `S_n = f(X_1) + ... + f(X_n)` along a family member chain.
//!
//! The centerpiece is the Chernoff-style bound
//!
//! ```text
//! Pr(S_n >= n mu) <= C^2 exp(-n KL(mu || mu(theta)))
//! ```
//!
//! for `mu` above the running chain's stationary mean, with the symmetric
//! statement below it. `C` is the family's eigenvector-ratio constant. The
//! module also ships two oracles used to validate the bound at desk scale: an
//! exact dynamic program over a rational reward lattice and a seeded
//! Monte-Carlo estimator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::ExpFamily;
use crate::rng::stream_rng;
use crate::scalar::Scalar;

/// Finite-`n` log-MGF estimate `A_n(eta)` of the member chain at
/// `theta_member`, started from `q`:
///
/// ```text
/// A_n(eta) = (1/n) log E_q exp(eta S_n)
/// ```
///
/// computed exactly by `n` vector-matrix products against the entrywise
/// `eta`-tilted member kernel, rescaled once per step so no horizon or tilt
/// magnitude can overflow. `A_n` approximates the regenerated family's log
/// Perron root at `eta` within `log C(P_theta, f) / n`.
pub fn log_mgf_n<F: Scalar>(
    family: &ExpFamily<F>,
    theta_member: F,
    eta: F,
    n: usize,
    q: &[F],
) -> Result<F> {
    if n == 0 {
        return Err(Error::Validation {
            field: "n".into(),
            reason: "horizon must be at least 1".into(),
        });
    }
    crate::markov::validate_distribution(q, family.n(), false)?;
    let member = family.member(theta_member)?;
    let k = member.kernel.entries();
    let d = family.n();
    let shift = if eta >= F::zero() { family.rewards().max() } else { family.rewards().min() };
    let mut tilt = vec![F::zero(); d * d];
    for x in 0..d {
        for y in 0..d {
            tilt[x * d + y] = k[x * d + y] * (eta * (family.rewards().get(y) - shift)).exp();
        }
    }
    let mut w = q.to_vec();
    let mut log_acc = F::zero();
    let mut next = vec![F::zero(); d];
    for _ in 0..n {
        for y in 0..d {
            next[y] = (0..d).map(|x| w[x] * tilt[x * d + y]).sum();
        }
        let total: F = next.iter().copied().sum();
        log_acc += total.ln();
        for y in 0..d {
            w[y] = next[y] / total;
        }
    }
    Ok(eta * shift + log_acc / F::of_usize(n))
}

/// Upper-tail Chernoff bound `Pr(S_n >= n mu) <= C^2 exp(-n KL(mu || mu(theta)))`
/// for the member chain at `theta`.
///
/// Requires `mu(theta) <= mu <= M`. The raw bound is returned even when it
/// exceeds one; clamping is left to reporting code.
pub fn tail_bound<F: Scalar>(family: &ExpFamily<F>, theta: F, n: usize, mu: F) -> Result<F> {
    let mean = family.mean(theta)?;
    if !(mu >= mean && mu <= family.rewards().max()) {
        return Err(Error::MeanOutOfRange {
            value: mu.as_f64(),
            min: mean.as_f64(),
            max: family.rewards().max().as_f64(),
        });
    }
    let c = family.ratio_constant().value;
    let rate = family.kl_rate_mean(mu, mean)?;
    Ok(c * c * (-F::of_usize(n) * rate).exp())
}

/// Lower-tail counterpart `Pr(S_n <= n mu) <= C^2 exp(-n KL(mu || mu(theta)))`
/// for `m <= mu <= mu(theta)`.
pub fn tail_bound_lower<F: Scalar>(family: &ExpFamily<F>, theta: F, n: usize, mu: F) -> Result<F> {
    let mean = family.mean(theta)?;
    if !(mu >= family.rewards().min() && mu <= mean) {
        return Err(Error::MeanOutOfRange {
            value: mu.as_f64(),
            min: family.rewards().min().as_f64(),
            max: mean.as_f64(),
        });
    }
    let c = family.ratio_constant().value;
    let rate = family.kl_rate_mean(mu, mean)?;
    Ok(c * c * (-F::of_usize(n) * rate).exp())
}

/// Rewards as integers on a common rational grid: `f(y) = k[y] / denom`.
struct Lattice {
    k: Vec<i64>,
    denom: i64,
}

/// Largest admissible reward denominator.
const MAX_DENOM: u64 = 10_000;
/// Cap on dynamic-programming cells (lattice width times state count).
const MAX_CELLS: usize = 10_000_000;
/// Absolute tolerance for accepting a rational reconstruction of a reward.
const LATTICE_TOL: f64 = 1e-9;

/// Best rational approximation `p/q` with `q <= max_denom` by continued
/// fractions; `None` when even the best one misses `v` by more than
/// [`LATTICE_TOL`] (scaled by the magnitude of `v`).
fn rationalize(v: f64, max_denom: u64) -> Option<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, v.floor() as i128, 1i128);
    let mut frac = v - v.floor();
    for _ in 0..64 {
        if q1 as u64 > max_denom {
            break;
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let p2 = a as i128 * p1 + p0;
        let q2 = a as i128 * q1 + q0;
        if q2 as u64 > max_denom {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let (p, q) = (p1 as i64, q1 as i64);
    let err = (v - p as f64 / q as f64).abs();
    if err <= LATTICE_TOL * v.abs().max(1.0) {
        Some((p, q))
    } else {
        None
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn build_lattice<F: Scalar>(family: &ExpFamily<F>) -> Result<Lattice> {
    let mut fracs = Vec::new();
    for &v in family.rewards().values() {
        let (p, q) = rationalize(v.as_f64(), MAX_DENOM)
            .ok_or(Error::RewardsNotLatticed { max_denom: MAX_DENOM })?;
        fracs.push((p, q));
    }
    let mut denom = 1i64;
    for &(_, q) in &fracs {
        denom = denom / gcd(denom, q) * q;
        if denom as u64 > MAX_DENOM {
            return Err(Error::RewardsNotLatticed { max_denom: MAX_DENOM });
        }
    }
    let k = fracs.iter().map(|&(p, q)| p * (denom / q)).collect();
    Ok(Lattice { k, denom })
}

/// Exact rational threshold `n * mu * denom` on the integer-sum lattice.
///
/// `mu` is first snapped to the bounded-denominator rational grid when one
/// fits (so a level written as `0.8` means `4/5` and the comparison at lattice
/// boundaries is the intended one); otherwise the float's own exact rational
/// value is used.
fn lattice_threshold(mu: f64, n: usize, denom: i64) -> BigRational {
    let mu_rat = match rationalize(mu, MAX_DENOM) {
        Some((p, q)) => BigRational::new(BigInt::from(p), BigInt::from(q)),
        None => BigRational::from_float(mu).expect("finite mean level"),
    };
    mu_rat * BigRational::from_integer(BigInt::from(n as i64 * denom))
}

/// Terminal distribution of the integer reward sum after `n` steps of the
/// member chain at `theta`, started from `q` with the sum beginning at `X_1`.
/// Returns the flat table `dist[sum_index]` with `sum = sum_index + n*k_min`.
fn sum_distribution<F: Scalar>(
    family: &ExpFamily<F>,
    theta: F,
    n: usize,
    q: &[F],
) -> Result<(Vec<F>, Lattice, i64)> {
    if n == 0 || n > 20 {
        return Err(Error::Validation {
            field: "n".into(),
            reason: "horizon must be in 1..=20 for the exact oracle".into(),
        });
    }
    crate::markov::validate_distribution(q, family.n(), false)?;
    let lattice = build_lattice(family)?;
    let kmin = *lattice.k.iter().min().expect("nonempty rewards");
    let kmax = *lattice.k.iter().max().expect("nonempty rewards");
    let width = (n as i64 * (kmax - kmin) + 1) as usize;
    let states = family.n();
    let cells = width.saturating_mul(states);
    if cells > MAX_CELLS {
        return Err(Error::StateSpaceTooLarge { cells, limit: MAX_CELLS });
    }
    let member = family.member(theta)?;
    let kernel = member.kernel.entries();
    let offset = |k: i64, step: i64| (k - step * kmin) as usize;
    // table[x * width + s] = Pr(X_step = x, sum so far = s + step*kmin).
    let mut table = vec![F::zero(); cells];
    for x0 in 0..states {
        for y in 0..states {
            table[y * width + offset(lattice.k[y], 1)] += q[x0] * kernel[x0 * states + y];
        }
    }
    let mut reach = (kmax - kmin) as usize + 1;
    for step in 2..=n {
        let mut next = vec![F::zero(); cells];
        for x in 0..states {
            for s in 0..reach {
                let p = table[x * width + s];
                if p == F::zero() {
                    continue;
                }
                for y in 0..states {
                    // One more transition adds k[y] and shifts the floor by kmin.
                    let idx = s as i64 + lattice.k[y] - kmin;
                    next[y * width + idx as usize] += p * kernel[x * states + y];
                }
            }
        }
        table = next;
        reach = (step as i64 * (kmax - kmin)) as usize + 1;
    }
    let mut dist = vec![F::zero(); width];
    for x in 0..states {
        for s in 0..width {
            dist[s] += table[x * width + s];
        }
    }
    Ok((dist, lattice, n as i64 * kmin))
}

/// Exact `Pr(S_n >= n mu)` for the member chain at `theta` started from `q`,
/// by dynamic programming over `(state, integer reward sum)`.
///
/// Requires rewards on a common rational grid with denominator at most `10^4`
/// and a sum lattice of at most `10^7` cells; the sum excludes `X_0`. The
/// threshold comparison is exact rational, see [`lattice_threshold`].
pub fn exact_tail<F: Scalar>(
    family: &ExpFamily<F>,
    theta: F,
    n: usize,
    mu: F,
    q: &[F],
) -> Result<F> {
    let (dist, lattice, base) = sum_distribution(family, theta, n, q)?;
    let threshold = lattice_threshold(mu.as_f64(), n, lattice.denom);
    let first = threshold.ceil().to_integer().to_i64().unwrap_or(i64::MAX);
    let mut tail = F::zero();
    for (s, &p) in dist.iter().enumerate() {
        if base + s as i64 >= first {
            tail += p;
        }
    }
    Ok(tail)
}

/// Exact `Pr(S_n <= n mu)`, the lower-tail companion of [`exact_tail`].
pub fn exact_tail_lower<F: Scalar>(
    family: &ExpFamily<F>,
    theta: F,
    n: usize,
    mu: F,
    q: &[F],
) -> Result<F> {
    let (dist, lattice, base) = sum_distribution(family, theta, n, q)?;
    let threshold = lattice_threshold(mu.as_f64(), n, lattice.denom);
    let last = threshold.floor().to_integer().to_i64().unwrap_or(i64::MIN);
    let mut tail = F::zero();
    for (s, &p) in dist.iter().enumerate() {
        if base + s as i64 <= last {
            tail += p;
        }
    }
    Ok(tail)
}

/// Monte-Carlo estimate of `Pr(S_n >= n mu)` with its binomial standard
/// error, over `reps` trajectories of the member chain at `theta` started
/// from the family's initial law.
///
/// When the rewards sit on a rational lattice the tail event is decided by
/// the same exact integer comparison as [`exact_tail`]; otherwise by a plain
/// float comparison. Replication blocks run concurrently on independent RNG
/// streams and are reduced in index order, so results depend only on `seed`.
pub fn mc_tail<F: Scalar>(
    family: &ExpFamily<F>,
    theta: F,
    n: usize,
    mu: F,
    reps: usize,
    seed: u64,
) -> Result<(F, F)> {
    if reps == 0 {
        return Err(Error::Validation {
            field: "reps".into(),
            reason: "at least one replication is required".into(),
        });
    }
    let member = family.member(theta)?;
    let q = family.initial();
    let lattice = build_lattice(family).ok();
    let first = lattice.as_ref().map(|l| {
        lattice_threshold(mu.as_f64(), n, l.denom).ceil().to_integer().to_i64().unwrap_or(i64::MAX)
    });
    const BLOCK: usize = 1024;
    let blocks = reps.div_ceil(BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let in_block = BLOCK.min(reps - b * BLOCK);
            let mut count = 0u64;
            for _ in 0..in_block {
                let traj = member.kernel.simulate(q, n, &mut rng).expect("validated inputs");
                let hit = match (&lattice, first) {
                    (Some(l), Some(t)) => {
                        let sum: i64 =
                            traj.states().iter().skip(1).map(|&x| l.k[x as usize]).sum();
                        sum >= t
                    }
                    _ => traj.reward_sum(family.rewards()) >= F::of_usize(n) * mu,
                };
                if hit {
                    count += 1;
                }
            }
            count
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .sum();
    let estimate = F::c(hits as f64) / F::of_usize(reps);
    let stderr = (estimate * (F::one() - estimate) / F::of_usize(reps)).sqrt();
    Ok((estimate, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{RewardFunction, StochasticMatrix};

    fn two_state() -> ExpFamily<f64> {
        let p = StochasticMatrix::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let f = RewardFunction::new(vec![0.0, 1.0]).unwrap();
        ExpFamily::new(p, f).unwrap()
    }

    fn rank_one() -> ExpFamily<f64> {
        let p = StochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let f = RewardFunction::new(vec![0.0, 1.0]).unwrap();
        ExpFamily::new(p, f).unwrap()
    }

    #[test]
    fn log_mgf_vanishes_at_zero_tilt() {
        let fam = two_state();
        let q = fam.initial().to_vec();
        for n in [1, 3, 10, 47] {
            assert!(log_mgf_n(&fam, 0.0, 0.0, n, &q).unwrap().abs() < 1e-13);
        }
        assert!(log_mgf_n(&fam, 0.0, 1.0, 0, &q).is_err());
    }

    #[test]
    fn log_mgf_collapses_for_iid_generators() {
        // Rank-one rows make S_n a sum of IID rewards, so A_n(eta) equals
        // A(eta) = log E exp(eta Y) exactly at every horizon.
        let fam = rank_one();
        let q = fam.initial().to_vec();
        for &eta in &[-2.0, -0.5, 0.5, 1.0, 2.0] {
            let a = fam.member(eta).unwrap().log_pf;
            for n in [1, 2, 5, 17, 50] {
                let an = log_mgf_n(&fam, 0.0, eta, n, &q).unwrap();
                assert!((an - a).abs() <= 1e-12, "iid gap at eta {eta}, n {n}");
            }
        }
    }

    #[test]
    fn log_mgf_sandwich_within_log_c_over_n() {
        let fam = two_state();
        let q = fam.initial().to_vec();
        let logc = fam.ratio_constant().value.ln();
        for &eta in &[-2.0, -1.0, 0.5, 1.0, 2.0] {
            let a = fam.member(eta).unwrap().log_pf;
            for n in 1..=50 {
                let an = log_mgf_n(&fam, 0.0, eta, n, &q).unwrap();
                assert!(
                    (an - a).abs() <= logc / n as f64 + 1e-12,
                    "sandwich violated at eta {eta}, n {n}"
                );
            }
        }
    }

    #[test]
    fn log_mgf_under_member_tracks_shifted_log_pf() {
        // Running the estimate on the member chain at theta approximates the
        // regenerated family's log Perron root A(theta + eta) - A(theta),
        // within the squared-constant allowance log(C^2)/n.
        let fam = two_state();
        let q = fam.initial().to_vec();
        let theta = 1.0;
        let a_theta = fam.member(theta).unwrap().log_pf;
        let c2 = fam.ratio_constant().value.powi(2);
        for &eta in &[-1.0, 0.5, 1.5] {
            let target = fam.member(theta + eta).unwrap().log_pf - a_theta;
            for n in [1, 5, 20, 50] {
                let an = log_mgf_n(&fam, theta, eta, n, &q).unwrap();
                assert!(
                    (an - target).abs() <= c2.ln() / n as f64 + 1e-12,
                    "member sandwich at eta {eta}, n {n}"
                );
            }
        }
    }

    #[test]
    fn tail_bounds_match_hand_values() {
        let fam = two_state();
        // Vacuous at the running mean: C^2 on both sides.
        let mu0 = fam.mean(0.0).unwrap();
        assert!((tail_bound(&fam, 0.0, 5, mu0).unwrap() - 64.0).abs() < 1e-9);
        assert!((tail_bound_lower(&fam, 0.0, 5, mu0).unwrap() - 64.0).abs() < 1e-9);
        // Boundary levels pick up the limit-matrix Perron roots.
        assert!((tail_bound(&fam, 0.0, 1, 1.0).unwrap() - 51.2).abs() < 1e-9);
        assert!((tail_bound_lower(&fam, 0.0, 1, 0.0).unwrap() - 57.6).abs() < 1e-9);
        // Out-of-branch levels are rejected.
        assert!(tail_bound(&fam, 0.0, 1, 0.2).is_err());
        assert!(tail_bound_lower(&fam, 0.0, 1, 0.5).is_err());
    }

    #[test]
    fn rank_one_bound_is_classic_chernoff() {
        // C = 1 for rank-one generators, so the bound reduces to
        // exp(-n KL_Bernoulli(mu || 1/2)) with prefactor one.
        let fam = rank_one();
        let bound = tail_bound(&fam, 0.0, 10, 0.75).unwrap();
        let kl = 0.75 * (0.75f64 / 0.5).ln() + 0.25 * (0.25f64 / 0.5).ln();
        assert!((bound - (-10.0 * kl).exp()).abs() < 1e-9);
    }

    #[test]
    fn exact_tail_matches_one_step_enumeration() {
        let fam = two_state();
        let pi = vec![2.0 / 3.0, 1.0 / 3.0];
        let v = exact_tail(&fam, 0.0, 1, 1.0, &pi).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-13);
        // The sum is always at least n*m.
        let q = fam.initial().to_vec();
        assert!((exact_tail(&fam, 0.0, 1, 0.0, &q).unwrap() - 1.0).abs() < 1e-13);
        // Complementary halves meet at an off-lattice threshold.
        let up = exact_tail(&fam, 0.0, 4, 0.6, &q).unwrap();
        let down = exact_tail_lower(&fam, 0.0, 4, 0.6, &q).unwrap();
        assert!((up + down - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_tail_thresholds_snap_to_the_reward_lattice() {
        // At n = 10 and level 0.8 the threshold must be the lattice point 8,
        // not the float 0.8's exact rational 0.8000...0444 times 10.
        let fam = two_state();
        let q = fam.initial().to_vec();
        let at = exact_tail(&fam, 0.0, 10, 0.8, &q).unwrap();
        let above = exact_tail(&fam, 0.0, 10, 0.75, &q).unwrap();
        // 0.75 also rounds up to threshold 8, so the two must agree exactly.
        assert_eq!(at, above);
    }

    #[test]
    fn exact_tail_dominated_by_chernoff_bound() {
        let fam = two_state();
        let q = fam.initial().to_vec();
        for n in 1..=14 {
            for mu in [0.5, 0.7, 0.9] {
                let ex = exact_tail(&fam, 0.0, n, mu, &q).unwrap();
                let bd = tail_bound(&fam, 0.0, n, mu).unwrap();
                assert!(ex <= bd + 1e-12, "upper domination at n {n}, mu {mu}");
            }
            for mu in [0.0, 0.1, 0.3] {
                let ex = exact_tail_lower(&fam, 0.0, n, mu, &q).unwrap();
                let bd = tail_bound_lower(&fam, 0.0, n, mu).unwrap();
                assert!(ex <= bd + 1e-12, "lower domination at n {n}, mu {mu}");
            }
        }
    }

    #[test]
    fn exact_tail_rate_approaches_kl_within_allowance() {
        // The empirical decay rate -(1/n) log Pr(S_n >= n mu) exceeds the KL
        // rate, converges toward it from above, and at every probed horizon
        // stays within the log(C^2)/n allowance plus a 25% margin; the gap to
        // the allowance-corrected rate shrinks monotonically.
        let fam = two_state();
        let q = fam.initial().to_vec();
        let kl = fam.kl_rate_mean(0.8, fam.mean(0.0).unwrap()).unwrap();
        assert!((kl - 0.07873118710978382).abs() < 1e-9);
        let allowance = |n: f64| (64.0f64).ln() / n;
        let mut prev_gap = f64::INFINITY;
        for n in [6usize, 10, 14] {
            let ex = exact_tail(&fam, 0.0, n, 0.8, &q).unwrap();
            let rate = -ex.ln() / n as f64;
            assert!(rate >= kl - allowance(n as f64) - 1e-12);
            let gap = rate - (kl - allowance(n as f64));
            assert!(gap < prev_gap, "gap not shrinking at n {n}");
            prev_gap = gap;
            if n == 14 {
                assert!((rate - kl).abs() <= allowance(14.0) + 0.25 * kl);
            }
        }
    }

    #[test]
    fn lower_tail_reflects_to_upper_tail_under_negated_rewards() {
        let fam = two_state();
        let p = StochasticMatrix::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let neg = RewardFunction::new(vec![0.0, -1.0]).unwrap();
        let reflected = ExpFamily::new(p, neg).unwrap();
        for n in [1, 5, 9] {
            for mu in [0.05, 0.2, 0.33] {
                let a = tail_bound_lower(&fam, 0.0, n, mu).unwrap();
                let b = tail_bound(&reflected, 0.0, n, -mu).unwrap();
                assert!((a - b).abs() < 1e-9, "reflection at n {n}, mu {mu}");
            }
        }
    }

    #[test]
    fn irrational_rewards_are_rejected() {
        let p = StochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let f = RewardFunction::new(vec![0.0, (-1.0f64).exp()]).unwrap();
        let fam = ExpFamily::new(p, f).unwrap();
        let q = fam.initial().to_vec();
        assert!(matches!(
            exact_tail(&fam, 0.0, 3, 0.2, &q),
            Err(Error::RewardsNotLatticed { .. })
        ));
    }

    #[test]
    fn oversized_sum_lattices_are_rejected() {
        // Denominator 100 but a wide reward range: the n = 20 lattice needs
        // about 2*10^7 cells, over the cap.
        let p = StochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let f = RewardFunction::new(vec![0.0, 5000.33]).unwrap();
        let fam = ExpFamily::new(p, f).unwrap();
        let q = fam.initial().to_vec();
        assert!(matches!(
            exact_tail(&fam, 0.0, 20, 1.0, &q),
            Err(Error::StateSpaceTooLarge { .. })
        ));
        assert!(exact_tail(&fam, 0.0, 21, 1.0, &q).is_err());
    }

    #[test]
    fn mc_tail_agrees_with_exact_tail() {
        let fam = two_state();
        let q = fam.initial().to_vec();
        let exact = exact_tail(&fam, 0.0, 8, 0.6, &q).unwrap();
        let (est, se) = mc_tail(&fam, 0.0, 8, 0.6, 100_000, 41).unwrap();
        assert!((est - exact).abs() <= 4.0 * se, "mc {est} vs exact {exact} (se {se})");
        // Impossible events estimate zero.
        let (zero, _) = mc_tail(&fam, 0.0, 8, 1.5, 1000, 7).unwrap();
        assert_eq!(zero, 0.0);
        // Same seed, same estimate.
        let again = mc_tail(&fam, 0.0, 8, 0.6, 100_000, 41).unwrap();
        assert_eq!(again.0, est);
    }

    #[test]
    fn mc_tail_is_unbiased_across_seeds() {
        let fam = two_state();
        let q = fam.initial().to_vec();
        let exact = exact_tail(&fam, 0.0, 6, 0.5, &q).unwrap();
        let mut inside = 0;
        for seed in 0..20u64 {
            let (est, se) = mc_tail(&fam, 0.0, 6, 0.5, 20_000, 1000 + seed).unwrap();
            if (est - exact).abs() <= 3.0 * se {
                inside += 1;
            }
        }
        assert!(inside >= 18, "exact value inside 3 SE only {inside}/20 times");
    }
}
