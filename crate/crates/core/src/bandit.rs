//! Best-Markovian-arm identification by Track-and-Stop.
//!
//! All `K` arms live in one exponential family: arm `a` runs the member chain
//! at `theta_a` and the goal is to identify the arm with the highest
//! stationary mean, with error probability at most `delta`, in as few samples
//! as possible. The strategy samples by tracking the optimal allocation
//! weights `w*` of the characteristic-time game (with forced exploration),
//! stops by Chernoff's rule when one arm's pairwise `Z` statistics clear the
//! threshold `beta(t)` against every rival, and decides by the best sample
//! mean.
//!
//! The characteristic time `T*` is the inverse of
//!
//! ```text
//! G(w) = min_{b != a*} (w_{a*} + w_b) I_alpha(mu_{a*}, mu_b),
//!        alpha = w_{a*} / (w_{a*} + w_b)
//! ```
//!
//! maximized over the simplex; `I_alpha` is the generalized Jensen-Shannon
//! divergence in the family's KL rate. The pairwise closed form comes from
//! collapsing the alternative-instance infimum: only the challenger pair
//! moves, and the binding crossing point is the weighted mean of the two
//! means (the KL derivative in its second argument vanishes there), which is
//! also validated numerically in the tests.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::family::{ExpFamily, FamilyMember, MeanInverter};
use crate::markov::{sample_index, validate_distribution, Trajectory};
use crate::rng::stream_rng;
use crate::scalar::Scalar;

/// Hard cap on total samples per run; hitting it is an error, never silent.
pub const MAX_SAMPLES: u64 = 10_000_000;

/// A `K`-armed instance: one family, one tilt parameter per arm.
#[derive(Debug, Clone)]
pub struct BanditInstance<F: Scalar> {
    family: ExpFamily<F>,
    thetas: Vec<F>,
    means: Vec<F>,
    best: usize,
}

impl<F: Scalar> BanditInstance<F> {
    /// Builds an instance from tilt parameters. Exactly one arm must attain
    /// the maximal mean.
    pub fn new(family: ExpFamily<F>, thetas: Vec<F>) -> Result<Self> {
        if thetas.len() < 2 {
            return Err(Error::Validation {
                field: "thetas".into(),
                reason: "an instance needs at least two arms".into(),
            });
        }
        let mut means = Vec::with_capacity(thetas.len());
        for &t in &thetas {
            means.push(family.mean(t)?);
        }
        let best = unique_argmax(&means).ok_or(Error::NoUniqueBest)?;
        Ok(Self { family, thetas, means, best })
    }

    /// Builds an instance from target stationary means, inverting the mean
    /// map per arm.
    pub fn from_means(family: ExpFamily<F>, means: &[F]) -> Result<Self> {
        let mut thetas = Vec::with_capacity(means.len());
        for &m in means {
            thetas.push(family.theta_from_mean(m)?);
        }
        Self::new(family, thetas)
    }

    /// The shared family.
    pub fn family(&self) -> &ExpFamily<F> {
        &self.family
    }

    /// Tilt parameters per arm.
    pub fn thetas(&self) -> &[F] {
        &self.thetas
    }

    /// Stationary means per arm.
    pub fn means(&self) -> &[F] {
        &self.means
    }

    /// Index of the unique best arm.
    pub fn best_arm(&self) -> usize {
        self.best
    }

    /// Number of arms.
    pub fn k(&self) -> usize {
        self.thetas.len()
    }
}

/// Strategy parameters: confidence `delta`, threshold exponent `alpha`, and
/// the derived constant `D = 2 alpha K C^2 / (alpha - 1)` of the stopping
/// threshold `beta(t) = 2 log(D t^alpha / delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyParams<F: Scalar> {
    /// Threshold exponent, required `> 1`.
    pub alpha: F,
    /// Confidence level in `(0, 1)`.
    pub delta: F,
    /// Number of arms.
    pub k: usize,
    /// Ratio constant of the family (any upper bound is admissible; the
    /// grid-approximated constant is already inflated and thus conservative).
    pub c: F,
    /// Derived threshold constant `D`.
    pub d: F,
}

impl<F: Scalar> StrategyParams<F> {
    /// Validates and derives `D`. Only `alpha > 1` is enforced; see
    /// [`StrategyParams::warnings`] for the advisory range.
    pub fn new(alpha: F, delta: F, k: usize, c: F) -> Result<Self> {
        if !(alpha > F::one()) || !alpha.is_finite() {
            return Err(Error::Validation {
                field: "alpha".into(),
                reason: "threshold exponent must be finite and exceed 1".into(),
            });
        }
        if !(delta > F::zero() && delta < F::one()) {
            return Err(Error::Validation {
                field: "delta".into(),
                reason: "confidence level must lie in (0, 1)".into(),
            });
        }
        if k < 2 {
            return Err(Error::Validation {
                field: "k".into(),
                reason: "at least two arms are required".into(),
            });
        }
        if !(c >= F::one()) {
            return Err(Error::Validation {
                field: "c".into(),
                reason: "ratio constant must be at least 1".into(),
            });
        }
        let d = F::c(2.0) * alpha * F::of_usize(k) * c * c / (alpha - F::one());
        Ok(Self { alpha, delta, k, c, d })
    }

    /// Convenience constructor pulling `K` and `C` from an instance.
    pub fn for_instance(instance: &BanditInstance<F>, alpha: F, delta: F) -> Result<Self> {
        Self::new(alpha, delta, instance.k(), instance.family().ratio_constant().value)
    }

    /// The stopping threshold `beta(t) = 2 log(D t^alpha / delta)`. The
    /// stopping comparison guards it with `max(0, beta)`.
    pub fn threshold(&self, t: u64) -> F {
        F::c(2.0) * (self.d.ln() + self.alpha * F::c(t as f64).ln() - self.delta.ln())
    }

    /// Advisory notes: the threshold's correctness proof is stated for small
    /// `alpha`, so large values deserve a caveat even though any `alpha > 1`
    /// is accepted.
    pub fn warnings(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.alpha > F::c(2.0) {
            notes.push(format!(
                "alpha = {} is unusually large; the delta-PC guarantee is calibrated for small alpha (default 1.2)",
                self.alpha
            ));
        }
        notes
    }
}

/// Per-arm running state.
#[derive(Debug, Clone)]
pub struct ArmState<F: Scalar> {
    /// Transition count `N_a` (samples drawn minus one).
    n: u64,
    /// Sum of rewards over transition samples (the first sample is excluded).
    sum: F,
    /// Current chain state.
    current: usize,
    /// Observed transition pair counts, row-major over `(from, to)`.
    pairs: Vec<u64>,
    /// Full visited state sequence, kept for diagnostics and likelihood
    /// ratios.
    states: Vec<u32>,
}

impl<F: Scalar> ArmState<F> {
    fn start(x0: usize, states: usize) -> Self {
        Self {
            n: 0,
            sum: F::zero(),
            current: x0,
            pairs: vec![0; states * states],
            states: vec![x0 as u32],
        }
    }

    fn advance(&mut self, y: usize, reward: F, n_states: usize) {
        self.pairs[self.current * n_states + y] += 1;
        self.current = y;
        self.states.push(y as u32);
        self.sum += reward;
        self.n += 1;
    }
}

/// Full run state: total sample count plus one [`ArmState`] per arm.
#[derive(Debug, Clone)]
pub struct RunState<F: Scalar> {
    t: u64,
    arms: Vec<ArmState<F>>,
}

impl<F: Scalar> RunState<F> {
    /// Total samples drawn so far (`sum_a (N_a + 1)` after initialization).
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Transition count of arm `a`.
    pub fn transitions(&self, a: usize) -> u64 {
        self.arms[a].n
    }

    /// Sample mean of arm `a` over its transition samples.
    pub fn mean(&self, a: usize) -> Result<F> {
        let arm = &self.arms[a];
        if arm.n == 0 {
            return Err(Error::InsufficientSamples);
        }
        Ok(arm.sum / F::c(arm.n as f64))
    }

    /// Sample means of all arms.
    pub fn means(&self) -> Result<Vec<F>> {
        (0..self.arms.len()).map(|a| self.mean(a)).collect()
    }

    /// Observed transition pair counts of arm `a`.
    pub fn pair_counts(&self, a: usize) -> &[u64] {
        &self.arms[a].pairs
    }

    /// Visited state sequence of arm `a` (starting with its initial state).
    pub fn visited(&self, a: usize) -> &[u32] {
        &self.arms[a].states
    }

    fn k(&self) -> usize {
        self.arms.len()
    }
}

/// One per-step trace record: the sample count after the step, the arm
/// sampled, the stopping statistic `min_b Z_{best,b}`, and the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<F: Scalar> {
    pub t: u64,
    pub arm: usize,
    pub z_min: F,
    pub beta: F,
}

/// Outcome of one strategy run.
#[derive(Debug, Clone)]
pub struct RunResult<F: Scalar> {
    /// Stopping time in samples (at least `2K`).
    pub tau: u64,
    /// The decided arm.
    pub decision: usize,
    /// Whether the decision matches the instance's best arm.
    pub correct: bool,
    /// Final per-arm transition counts `N_a(tau)`, for tracking diagnostics.
    pub counts: Vec<u64>,
    /// Per-step log, populated only when tracing was requested.
    pub trace: Option<Vec<TraceRow<F>>>,
}

/// Count-weighted average of two sample means.
pub fn weighted_mean<F: Scalar>(na: u64, mean_a: F, nb: u64, mean_b: F) -> F {
    let (wa, wb) = (F::c(na as f64), F::c(nb as f64));
    (wa * mean_a + wb * mean_b) / (wa + wb)
}

/// Generalized Jensen-Shannon divergence
/// `I_alpha(mu1, mu2) = alpha KL(mu1 || m) + (1 - alpha) KL(mu2 || m)` at the
/// weighted mean `m = alpha mu1 + (1 - alpha) mu2`, in the family's KL rate.
///
/// Both means must be interior; the degenerate weights `0` and `1` give `0`.
pub fn jensen_shannon<F: Scalar>(family: &ExpFamily<F>, alpha_w: F, mu1: F, mu2: F) -> Result<F> {
    if !(alpha_w >= F::zero() && alpha_w <= F::one()) {
        return Err(Error::Validation {
            field: "alpha_w".into(),
            reason: "mixture weight must lie in [0, 1]".into(),
        });
    }
    for mu in [mu1, mu2] {
        if !(mu > family.rewards().min() && mu < family.rewards().max()) {
            return Err(Error::MeanOutOfRange {
                value: mu.as_f64(),
                min: family.rewards().min().as_f64(),
                max: family.rewards().max().as_f64(),
            });
        }
    }
    if alpha_w == F::zero() || alpha_w == F::one() || mu1 == mu2 {
        return Ok(F::zero());
    }
    let mid = alpha_w * mu1 + (F::one() - alpha_w) * mu2;
    Ok(alpha_w * family.kl_rate_mean(mu1, mid)?
        + (F::one() - alpha_w) * family.kl_rate_mean(mu2, mid)?)
}

/// The pairwise stopping statistic
/// `Z_{a,b}(t) = N_a KL(mean_a || m) + N_b KL(mean_b || m)` at the
/// count-weighted mean `m`, positive when `mean_a > mean_b` and antisymmetric
/// by definition. Boundary sample means are admitted via the family's limit
/// branches.
pub fn z_statistic<F: Scalar>(
    family: &ExpFamily<F>,
    state: &RunState<F>,
    a: usize,
    b: usize,
) -> Result<F> {
    let mut inv = MeanInverter::new(family);
    z_with(&mut inv, state.arms[a].n, state.mean(a)?, state.arms[b].n, state.mean(b)?)
}

/// Inverter-backed core of [`z_statistic`], reused by the run loop.
fn z_with<F: Scalar>(inv: &mut MeanInverter<F>, na: u64, ma: F, nb: u64, mb: F) -> Result<F> {
    if na == 0 || nb == 0 {
        return Err(Error::InsufficientSamples);
    }
    if ma == mb {
        return Ok(F::zero());
    }
    if ma < mb {
        return Ok(-z_with(inv, nb, mb, na, ma)?);
    }
    let mid = weighted_mean(na, ma, nb, mb);
    Ok(F::c(na as f64) * inv.kl_mean(ma, mid)? + F::c(nb as f64) * inv.kl_mean(mb, mid)?)
}

/// Binary KL divergence `p log(p/q) + (1-p) log((1-p)/(1-q))`.
pub fn binary_kl<F: Scalar>(p: F, q: F) -> F {
    let mut acc = F::zero();
    if p > F::zero() {
        acc += p * (p / q).ln();
    }
    if p < F::one() {
        acc += (F::one() - p) * ((F::one() - p) / (F::one() - q)).ln();
    }
    acc
}

/// The forced-exploration set `U_t = {a : N_a(t) < sqrt(t) - K/2}`.
pub fn forced_exploration_set<F: Scalar>(state: &RunState<F>, k: usize) -> Vec<usize> {
    let cutoff = (state.t as f64).sqrt() - k as f64 / 2.0;
    (0..state.k()).filter(|&a| (state.arms[a].n as f64) < cutoff).collect()
}

/// The sampling rule: any under-explored arm first (fewest transitions,
/// lowest index on ties), otherwise the arm whose empirical frequency lags
/// its optimal weight the most (direct tracking, lowest index on ties).
pub fn choose_arm<F: Scalar>(state: &RunState<F>, weights: &[F]) -> usize {
    let forced = forced_exploration_set(state, state.k());
    if let Some(&first) = forced.first() {
        let mut pick = first;
        for &a in &forced[1..] {
            if state.arms[a].n < state.arms[pick].n {
                pick = a;
            }
        }
        return pick;
    }
    let t = F::c(state.t as f64);
    let mut pick = 0;
    let mut best_gap = weights[0] - F::c(state.arms[0].n as f64) / t;
    for a in 1..state.k() {
        let gap = weights[a] - F::c(state.arms[a].n as f64) / t;
        if gap > best_gap {
            best_gap = gap;
            pick = a;
        }
    }
    pick
}

/// Chernoff's stopping rule: returns the winning arm if its `Z` statistic
/// against every rival exceeds `max(0, beta(t))`. Only the arm with the
/// strictly largest sample mean can qualify; a tied maximum never stops
/// (its `Z` is zero).
pub fn should_stop<F: Scalar>(
    family: &ExpFamily<F>,
    state: &RunState<F>,
    params: &StrategyParams<F>,
) -> Result<Option<usize>> {
    let mut inv = MeanInverter::new(family);
    Ok(stopping_statistic(&mut inv, state)?
        .filter(|&(_, z_min)| z_min > params.threshold(state.t).max(F::zero()))
        .map(|(best, _)| best))
}

/// The stopping statistic: the empirical-best arm and its minimal `Z` over
/// rivals, or `None` while the maximal sample mean is tied.
fn stopping_statistic<F: Scalar>(
    inv: &mut MeanInverter<F>,
    state: &RunState<F>,
) -> Result<Option<(usize, F)>> {
    let means = state.means()?;
    let best = match unique_argmax(&means) {
        Some(best) => best,
        None => return Ok(None),
    };
    let mut z_min = F::infinity();
    for b in 0..state.k() {
        if b != best {
            let z = z_with(inv, state.arms[best].n, means[best], state.arms[b].n, means[b])?;
            z_min = z_min.min(z);
        }
    }
    Ok(Some((best, z_min)))
}

/// The decision rule: the arm with the best sample mean (lowest index if
/// called, against the rules, at a tie).
pub fn decide<F: Scalar>(state: &RunState<F>) -> Result<usize> {
    let means = state.means()?;
    let mut pick = 0;
    for a in 1..means.len() {
        if means[a] > means[pick] {
            pick = a;
        }
    }
    Ok(pick)
}

fn unique_argmax<F: Scalar>(values: &[F]) -> Option<usize> {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    for (i, &v) in values.iter().enumerate() {
        if i != best && v == values[best] {
            return None;
        }
    }
    Some(best)
}

/// The game objective `G(w) = min_{b != best} g_b(w)` with
/// `g_b = w_best KL(mu_best || m) + w_b KL(mu_b || m)` at the weight-weighted
/// mean `m`, plus the binding rival and the supergradient pair.
struct GameEval<F> {
    value: F,
    binding: usize,
    grad_best: F,
    grad_rival: F,
}

fn game_eval<F: Scalar>(
    inv: &mut MeanInverter<F>,
    means: &[F],
    best: usize,
    w: &[F],
) -> Result<GameEval<F>> {
    let mut out = GameEval {
        value: F::infinity(),
        binding: usize::MAX,
        grad_best: F::zero(),
        grad_rival: F::zero(),
    };
    for b in 0..means.len() {
        if b == best {
            continue;
        }
        let total = w[best] + w[b];
        let (value, g_best, g_rival) = if total == F::zero() || means[best] == means[b] {
            // Degenerate pair: zero value; ascend along the even mixture.
            let mid = (means[best] + means[b]) * F::c(0.5);
            if means[best] == means[b] {
                (F::zero(), F::zero(), F::zero())
            } else {
                (F::zero(), inv.kl_mean(means[best], mid)?, inv.kl_mean(means[b], mid)?)
            }
        } else {
            let alpha = w[best] / total;
            let mid = alpha * means[best] + (F::one() - alpha) * means[b];
            let (ka, kb) = if mid == means[best] || mid == means[b] {
                // Weights so extreme the mixture collapses onto one mean.
                (F::zero(), F::zero())
            } else {
                (inv.kl_mean(means[best], mid)?, inv.kl_mean(means[b], mid)?)
            };
            (w[best] * ka + w[b] * kb, ka, kb)
        };
        if value < out.value {
            out = GameEval { value, binding: b, grad_best: g_best, grad_rival: g_rival };
        }
    }
    Ok(out)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex<F: Scalar>(w: &mut [F]) {
    let mut sorted: Vec<F> = w.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
    let mut cumsum = F::zero();
    let mut tau = F::zero();
    for (j, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let candidate = (cumsum - F::one()) / F::of_usize(j + 1);
        if x - candidate > F::zero() {
            tau = candidate;
        }
    }
    for x in w.iter_mut() {
        *x = (*x - tau).max(F::zero());
    }
}

/// Projected supergradient ascent on `G` from `w0`; returns the best iterate
/// seen (also comparing the running average, which smooths oscillation
/// between binding rivals).
fn ascend<F: Scalar>(
    inv: &mut MeanInverter<F>,
    means: &[F],
    best: usize,
    w0: &[F],
    iters: usize,
    step0: F,
) -> Result<(Vec<F>, F)> {
    let k = means.len();
    let mut w = w0.to_vec();
    let mut avg = vec![F::zero(); k];
    let mut best_w = w.clone();
    let mut best_g = game_eval(inv, means, best, &w)?.value;
    for it in 1..=iters {
        let eval = game_eval(inv, means, best, &w)?;
        if eval.value > best_g {
            best_g = eval.value;
            best_w.copy_from_slice(&w);
        }
        for (acc, &x) in avg.iter_mut().zip(w.iter()) {
            *acc += x;
        }
        let norm = (eval.grad_best * eval.grad_best + eval.grad_rival * eval.grad_rival).sqrt();
        if norm > F::zero() {
            let step = step0 / F::c(it as f64).sqrt() / norm;
            w[best] += step * eval.grad_best;
            w[eval.binding] += step * eval.grad_rival;
            project_simplex(&mut w);
        }
    }
    let scale = F::one() / F::of_usize(iters);
    for x in avg.iter_mut() {
        *x *= scale;
    }
    let avg_g = game_eval(inv, means, best, &avg)?.value;
    if avg_g > best_g {
        Ok((avg, avg_g))
    } else {
        Ok((best_w, best_g))
    }
}

/// Deterministic pattern-search polish: repeatedly move mass between weight
/// pairs at shrinking scales while `G` improves.
fn polish<F: Scalar>(
    inv: &mut MeanInverter<F>,
    means: &[F],
    best: usize,
    mut w: Vec<F>,
    mut g: F,
) -> Result<(Vec<F>, F)> {
    let k = means.len();
    let mut eps = F::c(1e-2);
    while eps >= F::c(1e-8) {
        loop {
            let mut improved = false;
            for i in 0..k {
                for j in 0..k {
                    if i == j || w[j] < eps {
                        continue;
                    }
                    let mut cand = w.clone();
                    cand[i] += eps;
                    cand[j] -= eps;
                    let value = game_eval(inv, means, best, &cand)?.value;
                    if value > g {
                        g = value;
                        w = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        eps *= F::c(0.5);
    }
    Ok((w, g))
}

/// One-dimensional exact solve for two arms: `G` restricted to
/// `w = (x, 1 - x)` is concave, so golden-section search suffices.
fn two_arm_weights<F: Scalar>(
    inv: &mut MeanInverter<F>,
    means: &[F],
    best: usize,
    tol: F,
) -> Result<(Vec<F>, F)> {
    let golden = F::c(0.618_033_988_749_894_9);
    let eval = |inv: &mut MeanInverter<F>, x: F| -> Result<F> {
        let mut w = vec![F::zero(); 2];
        w[best] = x;
        w[1 - best] = F::one() - x;
        Ok(game_eval(inv, means, best, &w)?.value)
    };
    let (mut lo, mut hi) = (F::c(1e-9), F::one() - F::c(1e-9));
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = eval(inv, x1)?;
    let mut f2 = eval(inv, x2)?;
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = eval(inv, x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = eval(inv, x1)?;
        }
    }
    let x = (lo + hi) * F::c(0.5);
    let g = eval(inv, x)?;
    let mut w = vec![F::zero(); 2];
    w[best] = x;
    w[1 - best] = F::one() - x;
    Ok((w, g))
}

/// The characteristic-time game: returns the optimal sampling weights `w*`
/// and `T* = 1 / G(w*)`.
///
/// Means are clamped slightly inside the reward range first; the unique-best
/// requirement applies to the clamped values. Two arms are solved by
/// golden-section search; more arms by projected supergradient ascent
/// (averaged iterates, `5 * 10^4` steps) plus a deterministic pattern-search
/// polish, a combination validated against simplex grid search in the tests.
pub fn optimal_weights<F: Scalar>(family: &ExpFamily<F>, means: &[F]) -> Result<(Vec<F>, F)> {
    if means.len() < 2 {
        return Err(Error::Validation {
            field: "means".into(),
            reason: "the game needs at least two arms".into(),
        });
    }
    let clamped: Vec<F> = means.iter().map(|&m| family.clamp_interior(m)).collect();
    let best = unique_argmax(&clamped).ok_or(Error::NoUniqueBest)?;
    let mut inv = MeanInverter::new(family);
    let (w, g) = if clamped.len() == 2 {
        two_arm_weights(&mut inv, &clamped, best, F::c(1e-12))?
    } else {
        let uniform = vec![F::one() / F::of_usize(clamped.len()); clamped.len()];
        let (w, g) = ascend(&mut inv, &clamped, best, &uniform, 50_000, F::c(0.5))?;
        polish(&mut inv, &clamped, best, w, g)?
    };
    Ok((w, F::one() / g))
}

/// The nonasymptotic expected-sample lower bound
/// `kl(delta, 1 - delta) T* - sum_a R_a`, floored at zero, where `R_a` is the
/// expected return time of arm `a`'s chain to its (random) initial state.
/// All arms must start from the family's common initial law, which makes the
/// initial-distribution likelihood terms cancel.
pub fn nonasymptotic_lower_bound<F: Scalar>(
    instance: &BanditInstance<F>,
    params: &StrategyParams<F>,
) -> Result<F> {
    let (_, t_star) = optimal_weights(instance.family(), instance.means())?;
    let confidence = binary_kl(params.delta, F::one() - params.delta);
    let mut returns = F::zero();
    for &theta in instance.thetas() {
        let member = instance.family().member(theta)?;
        returns += member.kernel.mean_return_time(instance.family().initial())?;
    }
    Ok((confidence * t_star - returns).max(F::zero()))
}

/// Log-likelihood ratio of the observed arm trajectories between two
/// parameter vectors, including the initial-state terms:
///
/// ```text
/// sum_a [ log(q_theta(x0_a) / q_lambda(x0_a))
///         + sum_{x,y} N_a(x,y) log(P_theta_a(x,y) / P_lambda_a(x,y)) ]
/// ```
pub fn log_likelihood_ratio<F: Scalar>(
    family: &ExpFamily<F>,
    trajectories: &[Trajectory],
    thetas: &[F],
    lambdas: &[F],
    q_theta: &[F],
    q_lambda: &[F],
) -> Result<F> {
    if thetas.len() != trajectories.len() || lambdas.len() != trajectories.len() {
        return Err(Error::DimensionMismatch {
            expected: trajectories.len(),
            found: thetas.len().min(lambdas.len()),
        });
    }
    let n = family.n();
    validate_distribution(q_theta, n, false)?;
    validate_distribution(q_lambda, n, false)?;
    let mut acc = F::zero();
    for (a, traj) in trajectories.iter().enumerate() {
        let x0 = traj.initial();
        if !(q_theta[x0] > F::zero()) || !(q_lambda[x0] > F::zero()) {
            return Err(Error::SupportMismatch { from: x0, to: x0 });
        }
        acc += (q_theta[x0] / q_lambda[x0]).ln();
        let kt = family.member(thetas[a])?;
        let kl = family.member(lambdas[a])?;
        for (pair, &count) in traj.pair_counts().iter().enumerate() {
            if count == 0 {
                continue;
            }
            let (x, y) = (pair / n, pair % n);
            let (pt, pl) = (kt.kernel.get(x, y), kl.kernel.get(x, y));
            if !(pt > F::zero()) || !(pl > F::zero()) {
                return Err(Error::SupportMismatch { from: x, to: y });
            }
            acc += F::c(count as f64) * (pt / pl).ln();
        }
    }
    Ok(acc)
}

/// In-loop weight tracker: recomputes `w*(clamped sample means)` each step at
/// reduced budget, which the tracking rule tolerates because consecutive
/// mean vectors differ by `O(1/t)`. Two arms use a coarse golden-section
/// solve; more arms use a short warm-started ascent from the previous step's
/// weights.
struct WeightTracker<F: Scalar> {
    w: Vec<F>,
}

impl<F: Scalar> WeightTracker<F> {
    fn new(k: usize) -> Self {
        Self { w: vec![F::one() / F::of_usize(k); k] }
    }

    fn update(&mut self, inv: &mut MeanInverter<F>, clamped: &[F], best: usize) -> Result<&[F]> {
        if clamped.len() == 2 {
            let (w, _) = two_arm_weights(inv, clamped, best, F::c(1e-5))?;
            self.w = w;
        } else {
            let (w, _) = ascend(inv, clamped, best, &self.w.clone(), 25, F::c(0.2))?;
            self.w = w;
        }
        Ok(&self.w)
    }
}

/// Runs the Track-and-Stop strategy once with the default sample cap.
pub fn run<F: Scalar>(
    instance: &BanditInstance<F>,
    params: &StrategyParams<F>,
    seed: u64,
    trace: bool,
) -> Result<RunResult<F>> {
    run_capped(instance, params, seed, trace, MAX_SAMPLES)
}

/// Runs the strategy with an explicit sample cap (at most [`MAX_SAMPLES`]).
///
/// Initialization draws two samples from every arm (one transition each);
/// each loop step recomputes the tracking weights at the clamped sample
/// means (equal split over the tied group while the empirical best is tied),
/// samples the chosen arm's chain once, and then tests the stopping rule.
/// Arms own independent RNG streams derived from `seed`, so results are
/// reproducible bit for bit. Reaching the cap is a [`Error::Timeout`].
pub fn run_capped<F: Scalar>(
    instance: &BanditInstance<F>,
    params: &StrategyParams<F>,
    seed: u64,
    trace: bool,
    cap: u64,
) -> Result<RunResult<F>> {
    let family = instance.family();
    let k = instance.k();
    let n_states = family.n();
    let cap = cap.min(MAX_SAMPLES);
    let members: Vec<Arc<FamilyMember<F>>> =
        instance.thetas().iter().map(|&t| family.member(t)).collect::<Result<_>>()?;
    let mut rngs: Vec<_> = (0..k).map(|a| stream_rng(seed, a as u64)).collect();

    let mut arms = Vec::with_capacity(k);
    for a in 0..k {
        let x0 = sample_index(family.initial(), &mut rngs[a]);
        let mut arm = ArmState::start(x0, n_states);
        let y = sample_index(members[a].kernel.row(x0), &mut rngs[a]);
        arm.advance(y, family.rewards().get(y), n_states);
        arms.push(arm);
    }
    let mut state = RunState { t: 2 * k as u64, arms };

    let mut inv = MeanInverter::new(family);
    let mut tracker = WeightTracker::new(k);
    let mut rows: Option<Vec<TraceRow<F>>> = trace.then(Vec::new);
    let mut tied = vec![F::zero(); k];
    loop {
        if state.t >= cap {
            return Err(Error::Timeout { cap });
        }
        let means = state.means()?;
        let clamped: Vec<F> = means.iter().map(|&m| family.clamp_interior(m)).collect();
        let weights: &[F] = match unique_argmax(&clamped) {
            Some(best) => tracker.update(&mut inv, &clamped, best)?,
            None => {
                // Tied empirical best: spread weight evenly over the tied
                // group for this step.
                let top = clamped.iter().copied().fold(F::neg_infinity(), F::max);
                let count = clamped.iter().filter(|&&m| m == top).count();
                let share = F::one() / F::of_usize(count);
                for (slot, &m) in tied.iter_mut().zip(clamped.iter()) {
                    *slot = if m == top { share } else { F::zero() };
                }
                &tied
            }
        };
        let arm = choose_arm(&state, weights);
        let x = state.arms[arm].current;
        let y = sample_index(members[arm].kernel.row(x), &mut rngs[arm]);
        state.arms[arm].advance(y, family.rewards().get(y), n_states);
        state.t += 1;

        let stat = stopping_statistic(&mut inv, &state)?;
        if let Some(rows) = rows.as_mut() {
            rows.push(TraceRow {
                t: state.t,
                arm,
                z_min: stat.map_or(F::zero(), |(_, z)| z),
                beta: params.threshold(state.t),
            });
        }
        if let Some((best, z_min)) = stat {
            if z_min > params.threshold(state.t).max(F::zero()) {
                let decision = decide(&state)?;
                debug_assert_eq!(decision, best);
                return Ok(RunResult {
                    tau: state.t,
                    decision,
                    correct: decision == instance.best_arm(),
                    counts: state.arms.iter().map(|a| a.n).collect(),
                    trace: rows,
                });
            }
        }
    }
}
