//! The one-parameter exponential family of Markov chains generated by an
//! irreducible stochastic matrix `P` and a reward function `f`.
//!
//! For a tilt parameter `theta` the entrywise-tilted matrix is
//!
//! ```text
//! Pt_theta(x, y) = P(x, y) * exp(theta * f(y))
//! ```
//!
//! with Perron-Frobenius triple `(rho(theta), u_theta, v_theta)`. The family
//! member at `theta` is the stochastic kernel
//!
//! ```text
//! P_theta(x, y) = Pt_theta(x, y) * v_theta(y) / (rho(theta) * v_theta(x))
//! ```
//!
//! with stationary law `u_theta . v_theta`, log Perron root
//! `A(theta) = log rho(theta)`, and mean `mu(theta)`, the derivative of `A`.
//! `mu` is strictly increasing with range the open interval between the
//! extreme rewards `m` and `M`; the endpoints are reached only by the limit
//! members at `theta -> +-infinity`, whose tilted matrices lose the columns
//! outside the extreme reward class.
//!
//! Internally every member is computed from the rescaled matrix
//! `exp(-theta * s) * Pt_theta` with `s = M` for positive and `s = m` for
//! negative tilts. The rescaling only shifts `A` by `theta * s`, keeps the
//! eigenvectors, and keeps every entry in `[0, 1]`, so no tilt magnitude can
//! overflow: far beyond `|theta| ~ 700 / max|f|` the rescaled matrix simply
//! degenerates to the limit matrix, which the eigensolver handles exactly.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use ordered_float::NotNan;

use crate::error::{Error, Result};
use crate::markov::{
    check_generator, perron_frobenius, validate_distribution, RewardFunction, StochasticMatrix,
};
use crate::scalar::Scalar;

/// Which tilting limit a [`LimitMember`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitSign {
    /// `theta -> +infinity`: mass concentrates on the maximal reward class.
    Positive,
    /// `theta -> -infinity`: mass concentrates on the minimal reward class.
    Negative,
}

/// The eigenvector-ratio constant `C(P, f) >= 1`.
///
/// `C` bounds `v_theta(y) / v_theta(x)` uniformly over `theta` (including the
/// limits). For strictly positive `P` the supremum has the closed form
/// `max_{x,y,z} P(y, z) / P(x, z)` and `exact` is true. Otherwise the value is
/// a finite-grid supremum inflated by a 5% safety factor and `exact` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioConstant<F: Scalar> {
    /// The (possibly inflated) constant.
    pub value: F,
    /// Whether `value` is the exact supremum.
    pub exact: bool,
}

/// A family member: all spectral data of the tilted matrix at one `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember<F: Scalar> {
    /// Tilt parameter.
    pub theta: F,
    /// Perron root `rho(theta)`; overflows to infinity only for tilts far
    /// beyond any admissible mean, `log_pf` is always finite.
    pub rho: F,
    /// `A(theta) = log rho(theta)`.
    pub log_pf: F,
    /// Left eigenvector of the tilted matrix, summing to one.
    pub u: Vec<F>,
    /// Right eigenvector, normalized so `sum(u . v) = 1`.
    pub v: Vec<F>,
    /// The member kernel `P_theta`.
    pub kernel: StochasticMatrix<F>,
    /// Stationary law `u . v` of the kernel.
    pub stationary: Vec<F>,
    /// Stationary mean `mu(theta)` of the rewards.
    pub mean: F,
}

/// A limit member at `theta -> +-infinity`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitMember<F: Scalar> {
    /// Which limit this is.
    pub sign: LimitSign,
    /// The limit matrix: `P` with the columns outside the extreme reward
    /// class set to zero (row-major).
    pub bar_matrix: Vec<F>,
    /// Perron root of the limit matrix.
    pub rho: F,
    /// `log rho`; the limit of `theta * extreme - A(theta)` is `-log rho`.
    pub log_rho: F,
    /// Left eigenvector (vanishes off the extreme class), summing to one.
    pub u: Vec<F>,
    /// Right eigenvector, normalized so `sum(u . v) = 1`.
    pub v: Vec<F>,
    /// The limit kernel.
    pub kernel: StochasticMatrix<F>,
    /// Stationary law of the limit kernel (supported on the extreme class).
    pub stationary: Vec<F>,
    /// Limit mean: `M` for the positive, `m` for the negative limit.
    pub mean: F,
}

/// The exponential family generated by `(P, f)` with initial law `q`.
///
/// Construction validates the generator conditions (irreducibility of the
/// extreme reward classes and one-step reachability into them) and
/// precomputes both limit members and the ratio constant. Members are cached
/// per tilt parameter, keyed by its bit pattern; the cache is synchronized
/// and last-write-wins, which is harmless because recomputation is
/// deterministic.
pub struct ExpFamily<F: Scalar> {
    p: StochasticMatrix<F>,
    f: RewardFunction<F>,
    q: Vec<F>,
    ratio: RatioConstant<F>,
    limit_pos: Arc<LimitMember<F>>,
    limit_neg: Arc<LimitMember<F>>,
    members: RwLock<HashMap<u64, Arc<FamilyMember<F>>>>,
}

/// Cap on cached members; beyond it new members are computed but not stored.
const MEMBER_CACHE_CAP: usize = 16_384;

impl<F: Scalar> ExpFamily<F> {
    /// Builds the family with the uniform initial law.
    pub fn new(p: StochasticMatrix<F>, f: RewardFunction<F>) -> Result<Self> {
        let q = vec![F::one() / F::of_usize(p.n()); p.n()];
        Self::with_initial(p, f, q)
    }

    /// Builds the family with an explicit, strictly positive initial law.
    pub fn with_initial(p: StochasticMatrix<F>, f: RewardFunction<F>, q: Vec<F>) -> Result<Self> {
        let report = check_generator(&p, &f)?;
        if !report.pass() {
            return Err(Error::GeneratorConditions { report });
        }
        validate_distribution(&q, p.n(), true)?;
        let limit_pos = Arc::new(compute_limit(&p, &f, LimitSign::Positive)?);
        let limit_neg = Arc::new(compute_limit(&p, &f, LimitSign::Negative)?);
        let mut family = Self {
            p,
            f,
            q,
            ratio: RatioConstant { value: F::one(), exact: false },
            limit_pos,
            limit_neg,
            members: RwLock::new(HashMap::new()),
        };
        family.ratio = family.compute_ratio_constant()?;
        Ok(family)
    }

    /// The generating matrix `P`.
    pub fn generator(&self) -> &StochasticMatrix<F> {
        &self.p
    }

    /// The reward function `f`.
    pub fn rewards(&self) -> &RewardFunction<F> {
        &self.f
    }

    /// The initial law `q`.
    pub fn initial(&self) -> &[F] {
        &self.q
    }

    /// State count.
    pub fn n(&self) -> usize {
        self.p.n()
    }

    /// The eigenvector-ratio constant `C(P, f)`.
    pub fn ratio_constant(&self) -> RatioConstant<F> {
        self.ratio
    }

    /// The entrywise tilted matrix `Pt_theta` (row-major).
    ///
    /// Entries can overflow for `|theta| * max|f|` beyond roughly 700; all
    /// internal member computations use a rescaled form instead, so only this
    /// raw view is affected.
    pub fn tilted(&self, theta: F) -> Vec<F> {
        let n = self.n();
        let mut out = vec![F::zero(); n * n];
        for x in 0..n {
            for y in 0..n {
                out[x * n + y] = self.p.get(x, y) * (theta * self.f.get(y)).exp();
            }
        }
        out
    }

    /// Rescaled tilted matrix and its log scale: the true tilted matrix is
    /// `exp(log_scale) *` the returned one, whose entries stay in `[0, 1]`.
    fn scaled_tilted(&self, theta: F) -> (Vec<F>, F) {
        let n = self.n();
        let shift = if theta >= F::zero() { self.f.max() } else { self.f.min() };
        let mut out = vec![F::zero(); n * n];
        for x in 0..n {
            for y in 0..n {
                out[x * n + y] = self.p.get(x, y) * (theta * (self.f.get(y) - shift)).exp();
            }
        }
        (out, theta * shift)
    }

    /// The family member at a finite tilt `theta`, from cache if available.
    pub fn member(&self, theta: F) -> Result<Arc<FamilyMember<F>>> {
        let key = theta_key(theta)?;
        if let Some(hit) = self.members.read().expect("member cache").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let member = Arc::new(self.member_uncached(theta)?);
        let mut cache = self.members.write().expect("member cache");
        if cache.len() < MEMBER_CACHE_CAP {
            cache.insert(key, Arc::clone(&member));
        }
        Ok(member)
    }

    /// Computes a member without touching the cache. Hot paths with their own
    /// locality (mean inversion, weight optimization) use this to keep the
    /// shared cache small.
    pub(crate) fn member_uncached(&self, theta: F) -> Result<FamilyMember<F>> {
        if !theta.is_finite() {
            return Err(Error::Validation {
                field: "theta".into(),
                reason: "tilt parameter must be finite; use limit_member for the limits".into(),
            });
        }
        let n = self.n();
        let (scaled, log_scale) = self.scaled_tilted(theta);
        let triple = perron_frobenius(&scaled, n)?;
        let log_pf = log_scale + triple.rho.ln();
        let mut kernel = vec![F::zero(); n * n];
        for x in 0..n {
            let row = &mut kernel[x * n..(x + 1) * n];
            let mut sum = F::zero();
            for y in 0..n {
                row[y] = scaled[x * n + y] * triple.v[y] / (triple.rho * triple.v[x]);
                sum += row[y];
            }
            for e in row.iter_mut() {
                *e /= sum;
            }
        }
        let mut stationary: Vec<F> =
            triple.u.iter().zip(triple.v.iter()).map(|(&a, &b)| a * b).collect();
        let total: F = stationary.iter().copied().sum();
        for p in stationary.iter_mut() {
            *p /= total;
        }
        let mean = stationary.iter().zip(self.f.values()).map(|(&p, &r)| p * r).sum();
        Ok(FamilyMember {
            theta,
            rho: log_pf.exp(),
            log_pf,
            u: triple.u,
            v: triple.v,
            kernel: StochasticMatrix::from_flat_unchecked(kernel, n),
            stationary,
            mean,
        })
    }

    /// Stationary mean `mu(theta)` of the member at `theta`.
    pub fn mean(&self, theta: F) -> Result<F> {
        Ok(self.member(theta)?.mean)
    }

    /// Inverts the mean map on the open interval `(m, M)`.
    ///
    /// Bisection on `mu(theta) - mu`: the bracket `[-b, b]` starts at `b = 1`
    /// and doubles until it straddles (capped at `700 / max|f|`, by which
    /// point the mean is at the reward boundary to machine precision), then
    /// bisects until `|mu(theta) - mu| <=` [`Scalar::INV_TOL`] or 200 steps.
    pub fn theta_from_mean(&self, mu: F) -> Result<F> {
        self.check_interior(mu)?;
        let cap = self.theta_cap();
        let mut lo = -F::one();
        let mut hi = F::one();
        while self.mean(hi)? < mu && hi < cap {
            hi = (hi + hi).min(cap);
        }
        while self.mean(lo)? > mu && lo > -cap {
            lo = (lo + lo).max(-cap);
        }
        if self.mean(hi)? < mu {
            return Ok(hi);
        }
        if self.mean(lo)? > mu {
            return Ok(lo);
        }
        let mut mid = (lo + hi) * F::c(0.5);
        for _ in 0..200 {
            mid = (lo + hi) * F::c(0.5);
            let gap = self.mean(mid)? - mu;
            if gap.abs() <= F::INV_TOL {
                break;
            }
            if gap < F::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(mid)
    }

    /// Largest useful tilt magnitude.
    pub(crate) fn theta_cap(&self) -> F {
        F::c(700.0) / self.f.max_abs()
    }

    /// Definitional KL rate between the members at two finite tilts:
    /// the stationary-weighted row divergences of the two kernels.
    pub fn kl_rate_def(&self, theta1: F, theta2: F) -> Result<F> {
        let m1 = self.member(theta1)?;
        let m2 = self.member(theta2)?;
        let n = self.n();
        let mut total = F::zero();
        for x in 0..n {
            let mut row = F::zero();
            for y in 0..n {
                let p1 = m1.kernel.get(x, y);
                if p1 > F::zero() {
                    row += p1 * (p1 / m2.kernel.get(x, y)).ln();
                }
            }
            total += m1.stationary[x] * row;
        }
        Ok(total)
    }

    /// KL rate in the tilt parametrization.
    ///
    /// For finite `theta1` this is the Bregman form
    /// `theta1 mu(theta1) - A(theta1) - (theta2 mu(theta1) - A(theta2))`;
    /// `theta1 = +-infinity` is admitted and uses the limit member, where the
    /// mean sits at the reward boundary and the conjugate term becomes
    /// `-log rho` of the limit matrix. `theta2` must be finite.
    pub fn kl_rate_theta(&self, theta1: F, theta2: F) -> Result<F> {
        if !theta2.is_finite() {
            return Err(Error::Validation {
                field: "theta2".into(),
                reason: "second tilt must be finite".into(),
            });
        }
        let m2 = self.member(theta2)?;
        if theta1.is_infinite() {
            let limit = if theta1 > F::zero() {
                self.limit_member(LimitSign::Positive)
            } else {
                self.limit_member(LimitSign::Negative)
            };
            return Ok(-limit.log_rho - (theta2 * limit.mean - m2.log_pf));
        }
        let m1 = self.member(theta1)?;
        Ok(theta1 * m1.mean - m1.log_pf - (theta2 * m1.mean - m2.log_pf))
    }

    /// KL rate in the mean parametrization.
    ///
    /// `mu1` may sit on the closed interval `[m, M]` (the boundary values use
    /// the limit members); `mu2` must be interior.
    pub fn kl_rate_mean(&self, mu1: F, mu2: F) -> Result<F> {
        if !(mu1 >= self.f.min() && mu1 <= self.f.max()) {
            return Err(self.mean_range_error(mu1));
        }
        self.check_interior(mu2)?;
        let theta2 = self.theta_from_mean(mu2)?;
        let a2 = self.member(theta2)?.log_pf;
        if mu1 == self.f.max() {
            let limit = self.limit_member(LimitSign::Positive);
            return Ok(-limit.log_rho - (theta2 * mu1 - a2));
        }
        if mu1 == self.f.min() {
            let limit = self.limit_member(LimitSign::Negative);
            return Ok(-limit.log_rho - (theta2 * mu1 - a2));
        }
        let theta1 = self.theta_from_mean(mu1)?;
        let a1 = self.member(theta1)?.log_pf;
        Ok(theta1 * mu1 - a1 - (theta2 * mu1 - a2))
    }

    /// Convex conjugate `A*(mu) = sup_theta (theta mu - A(theta))` on
    /// `[m, M]`, which coincides with the KL rate from mean `mu` to the
    /// generator's mean `mu(0)`.
    pub fn conjugate(&self, mu: F) -> Result<F> {
        if !(mu >= self.f.min() && mu <= self.f.max()) {
            return Err(self.mean_range_error(mu));
        }
        if mu == self.f.max() {
            return Ok(-self.limit_pos.log_rho);
        }
        if mu == self.f.min() {
            return Ok(-self.limit_neg.log_rho);
        }
        let theta = self.theta_from_mean(mu)?;
        Ok(theta * mu - self.member(theta)?.log_pf)
    }

    /// The limit member at `theta -> +-infinity`.
    pub fn limit_member(&self, sign: LimitSign) -> Arc<LimitMember<F>> {
        match sign {
            LimitSign::Positive => Arc::clone(&self.limit_pos),
            LimitSign::Negative => Arc::clone(&self.limit_neg),
        }
    }

    /// Clamps a mean into the interior, away from the reward boundary by a
    /// relative margin of `1e-9`; used by strategy code whose empirical means
    /// can sit exactly on the boundary.
    pub fn clamp_interior(&self, mu: F) -> F {
        let margin = F::c(1e-9) * (self.f.max() - self.f.min());
        mu.max(self.f.min() + margin).min(self.f.max() - margin)
    }

    fn check_interior(&self, mu: F) -> Result<()> {
        if !(mu > self.f.min() && mu < self.f.max()) {
            return Err(self.mean_range_error(mu));
        }
        Ok(())
    }

    fn mean_range_error(&self, mu: F) -> Error {
        Error::MeanOutOfRange {
            value: mu.as_f64(),
            min: self.f.min().as_f64(),
            max: self.f.max().as_f64(),
        }
    }

    /// Computes `C(P, f)`: exact for strictly positive `P`, otherwise the
    /// supremum of eigenvector ratios over a two-sided geometric tilt grid
    /// (`|theta|` in `{0, 0.25, 0.5, ..., 64}`) together with both limit
    /// members, inflated by a 5% safety factor.
    fn compute_ratio_constant(&self) -> Result<RatioConstant<F>> {
        let n = self.n();
        if self.p.entries().iter().all(|&e| e > F::zero()) {
            let mut best = F::one();
            for z in 0..n {
                let mut cmax = F::zero();
                let mut cmin = F::infinity();
                for x in 0..n {
                    cmax = cmax.max(self.p.get(x, z));
                    cmin = cmin.min(self.p.get(x, z));
                }
                best = best.max(cmax / cmin);
            }
            return Ok(RatioConstant { value: best, exact: true });
        }
        let spread = |v: &[F]| {
            let mut vmax = F::zero();
            let mut vmin = F::infinity();
            for &x in v {
                vmax = vmax.max(x);
                vmin = vmin.min(x);
            }
            vmax / vmin
        };
        let mut best = spread(&self.limit_pos.v).max(spread(&self.limit_neg.v));
        let mut mags = vec![F::zero()];
        let mut mag = F::c(0.25);
        while mag <= F::c(64.0) {
            mags.push(mag);
            mag = mag + mag;
        }
        for &m in &mags {
            for sign in [F::one(), -F::one()] {
                let member = self.member(sign * m)?;
                best = best.max(spread(&member.v));
                if m == F::zero() {
                    break;
                }
            }
        }
        Ok(RatioConstant { value: best * F::c(1.05), exact: false })
    }
}

impl<F: Scalar> Clone for ExpFamily<F> {
    /// Clones the generator data with a fresh, empty member cache.
    fn clone(&self) -> Self {
        Self {
            p: self.p.clone(),
            f: self.f.clone(),
            q: self.q.clone(),
            ratio: self.ratio,
            limit_pos: Arc::clone(&self.limit_pos),
            limit_neg: Arc::clone(&self.limit_neg),
            members: RwLock::new(HashMap::new()),
        }
    }
}

impl<F: Scalar> std::fmt::Debug for ExpFamily<F> {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("ExpFamily")
            .field("n", &self.n())
            .field("rewards", &self.f.values())
            .field("ratio", &self.ratio)
            .finish_non_exhaustive()
    }
}

fn theta_key<F: Scalar>(theta: F) -> Result<u64> {
    if !theta.is_finite() {
        return Err(Error::Validation {
            field: "theta".into(),
            reason: "tilt parameter must be finite".into(),
        });
    }
    Ok(theta.as_f64().to_bits())
}

fn compute_limit<F: Scalar>(
    p: &StochasticMatrix<F>,
    f: &RewardFunction<F>,
    sign: LimitSign,
) -> Result<LimitMember<F>> {
    let n = p.n();
    let (class, mean) = match sign {
        LimitSign::Positive => (f.max_class(), f.max()),
        LimitSign::Negative => (f.min_class(), f.min()),
    };
    let mut bar = vec![F::zero(); n * n];
    for x in 0..n {
        for &y in class {
            bar[x * n + y] = p.get(x, y);
        }
    }
    let triple = perron_frobenius(&bar, n)?;
    let mut kernel = vec![F::zero(); n * n];
    for x in 0..n {
        let row = &mut kernel[x * n..(x + 1) * n];
        let mut sum = F::zero();
        for y in 0..n {
            if bar[x * n + y] > F::zero() {
                row[y] = bar[x * n + y] * triple.v[y] / (triple.rho * triple.v[x]);
                sum += row[y];
            }
        }
        for e in row.iter_mut() {
            *e /= sum;
        }
    }
    let mut stationary: Vec<F> =
        triple.u.iter().zip(triple.v.iter()).map(|(&a, &b)| a * b).collect();
    let total: F = stationary.iter().copied().sum();
    for s in stationary.iter_mut() {
        *s /= total;
    }
    Ok(LimitMember {
        sign,
        bar_matrix: bar,
        rho: triple.rho,
        log_rho: triple.rho.ln(),
        u: triple.u,
        v: triple.v,
        kernel: StochasticMatrix::from_flat_unchecked(kernel, n),
        stationary,
        mean,
    })
}

/// Memoized inverse of the mean map with KL-rate helpers.
///
/// Strategy loops query divergences at empirical means thousands of times
/// with strong locality. The inverter keeps a sorted map from solved means to
/// their `(theta, A(theta))` anchors; a fresh query brackets between its
/// neighbors (falling back to the cold doubling bracket) and polishes with a
/// bisection-safeguarded secant to the same tolerance as
/// [`ExpFamily::theta_from_mean`], whose agreement is covered by tests.
pub(crate) struct MeanInverter<'a, F: Scalar> {
    family: &'a ExpFamily<F>,
    anchors: BTreeMap<NotNan<f64>, (F, F)>,
}

const INVERTER_CACHE_CAP: usize = 1 << 20;

impl<'a, F: Scalar> MeanInverter<'a, F> {
    pub fn new(family: &'a ExpFamily<F>) -> Self {
        Self { family, anchors: BTreeMap::new() }
    }

    fn mean_at(&self, theta: F) -> Result<F> {
        Ok(self.family.member_uncached(theta)?.mean)
    }

    /// `(theta, A(theta))` at the interior mean `mu`.
    pub fn anchors(&mut self, mu: F) -> Result<(F, F)> {
        self.family.check_interior(mu)?;
        let key = NotNan::new(mu.as_f64()).expect("interior mean is not NaN");
        if let Some(&hit) = self.anchors.get(&key) {
            return Ok(hit);
        }
        let cap = self.family.theta_cap();
        let below = self.anchors.range(..key).next_back().map(|(_, &(t, _))| t);
        let above = self.anchors.range(key..).next().map(|(_, &(t, _))| t);
        let mut lo = below.unwrap_or(-F::one());
        let mut hi = above.unwrap_or(F::one());
        let mut flo = self.mean_at(lo)? - mu;
        let mut fhi = self.mean_at(hi)? - mu;
        while flo > F::zero() && lo > -cap {
            lo = (lo + lo - F::one()).max(-cap);
            flo = self.mean_at(lo)? - mu;
        }
        while fhi < F::zero() && hi < cap {
            hi = (hi + hi + F::one()).min(cap);
            fhi = self.mean_at(hi)? - mu;
        }
        let theta = if flo > F::zero() {
            lo
        } else if fhi < F::zero() {
            hi
        } else {
            let mut x0 = lo;
            let mut f0 = flo;
            let mut x1 = hi;
            let mut f1 = fhi;
            let mut root = (lo + hi) * F::c(0.5);
            for _ in 0..200 {
                let secant_ok = (f1 - f0).abs() > F::zero();
                let mut cand = if secant_ok { x1 - f1 * (x1 - x0) / (f1 - f0) } else { root };
                if !(cand > lo && cand < hi) {
                    cand = (lo + hi) * F::c(0.5);
                }
                let fc = self.mean_at(cand)? - mu;
                root = cand;
                if fc.abs() <= F::INV_TOL {
                    break;
                }
                if fc < F::zero() {
                    lo = cand;
                } else {
                    hi = cand;
                }
                x0 = x1;
                f0 = f1;
                x1 = cand;
                f1 = fc;
            }
            root
        };
        let a = self.family.member_uncached(theta)?.log_pf;
        if self.anchors.len() < INVERTER_CACHE_CAP {
            self.anchors.insert(key, (theta, a));
        }
        Ok((theta, a))
    }

    /// KL rate in the mean parametrization, boundary branches included.
    pub fn kl_mean(&mut self, mu1: F, mu2: F) -> Result<F> {
        let f = self.family;
        if !(mu1 >= f.f.min() && mu1 <= f.f.max()) {
            return Err(f.mean_range_error(mu1));
        }
        let (theta2, a2) = self.anchors(mu2)?;
        if mu1 == f.f.max() {
            return Ok(-f.limit_pos.log_rho - (theta2 * mu1 - a2));
        }
        if mu1 == f.f.min() {
            return Ok(-f.limit_neg.log_rho - (theta2 * mu1 - a2));
        }
        let (theta1, a1) = self.anchors(mu1)?;
        Ok(theta1 * mu1 - a1 - (theta2 * mu1 - a2))
    }
}
