//! Finite-state Markov chains: stochastic matrices, reward functions,
//! Perron-Frobenius eigendata, stationary laws, simulation, and return times.
//!
//! The eigenproblem solver handles two structures:
//!
//! * irreducible nonnegative matrices, and
//! * matrices whose only reducibility comes from all-zero columns: after
//!   deleting the zero columns and their rows the remaining block is
//!   irreducible, and every deleted row keeps an edge into that block. Such
//!   matrices arise as tilting limits, where the columns of the
//!   non-maximal-reward states are driven to zero. The eigenvalue is the
//!   block's, the left eigenvector vanishes off the block, and the right
//!   eigenvector extends by one application of the matrix.
//!
//! Everything else is rejected with [`Error::StructureUnsupported`].

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::scalar::Scalar;
use rand::Rng;

/// A row-stochastic matrix over `n >= 2` states.
///
/// Entries are validated nonnegative and each row must sum to one within
/// [`Scalar::NORM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix<F: Scalar> {
    entries: Vec<F>,
    n: usize,
}

impl<F: Scalar> StochasticMatrix<F> {
    /// Validates and builds a stochastic matrix from dense rows.
    pub fn new(rows: Vec<Vec<F>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: n });
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            let mut sum = F::zero();
            for (j, &p) in row.iter().enumerate() {
                if !(p >= F::zero()) {
                    return Err(Error::NegativeEntry { row: i, col: j, value: p.as_f64() });
                }
                sum += p;
                entries.push(p);
            }
            let dev = sum - F::one();
            if dev.abs() > F::NORM_TOL {
                return Err(Error::RowSumViolation { row: i, deviation: dev.as_f64() });
            }
        }
        Ok(Self { entries, n })
    }

    /// Builds from a row-major slice without re-checking row sums; used for
    /// kernels produced by the family machinery, which are stochastic by
    /// construction up to roundoff.
    pub(crate) fn from_flat_unchecked(entries: Vec<F>, n: usize) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        Self { entries, n }
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `P(x, y)`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> F {
        self.entries[x * self.n + y]
    }

    /// Row `P(x, .)`.
    #[inline]
    pub fn row(&self, x: usize) -> &[F] {
        &self.entries[x * self.n..(x + 1) * self.n]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    /// Whether the support digraph is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        is_strongly_connected(self.n, |x, y| self.get(x, y) > F::zero())
    }

    /// Unique stationary distribution of an irreducible matrix.
    ///
    /// Solved directly from `(P^T - I) pi = 0` with the last equation replaced
    /// by normalization. The residual `max_y |(pi P)(y) - pi(y)|` is verified
    /// against [`Scalar::NORM_TOL`].
    pub fn stationary_distribution(&self) -> Result<Vec<F>> {
        if !self.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        let n = self.n;
        let mut a = vec![F::zero(); n * n];
        let mut b = vec![F::zero(); n];
        for x in 0..n {
            for y in 0..n {
                // Row y of P^T - I, i.e. equation sum_x pi(x) P(x,y) = pi(y).
                a[y * n + x] = self.get(x, y) - if x == y { F::one() } else { F::zero() };
            }
        }
        for x in 0..n {
            a[(n - 1) * n + x] = F::one();
        }
        b[n - 1] = F::one();
        let mut pi = crate::linalg::solve(&mut a, &mut b, n)?;
        let total: F = pi.iter().copied().sum();
        for p in pi.iter_mut() {
            *p /= total;
        }
        let mut residual = F::zero();
        for y in 0..n {
            let mut img = F::zero();
            for x in 0..n {
                img += pi[x] * self.get(x, y);
            }
            residual = residual.max((img - pi[y]).abs());
        }
        if residual > F::NORM_TOL || pi.iter().any(|&p| !(p > F::zero())) {
            return Err(Error::NoConvergence { residual: residual.as_f64() });
        }
        Ok(pi)
    }

    /// Samples a trajectory of `steps` transitions with `x_0 ~ q`.
    ///
    /// `q` may put zero mass on some states but must sum to one. Uniform
    /// variates are drawn as `f64` and converted, so the state sequence is
    /// identical across scalar types for a given stream.
    pub fn simulate(&self, q: &[F], steps: usize, rng: &mut SimRng) -> Result<Trajectory> {
        validate_distribution(q, self.n, false)?;
        let mut states = Vec::with_capacity(steps + 1);
        let mut x = sample_index(q, rng);
        states.push(x as u32);
        for _ in 0..steps {
            x = sample_index(self.row(x), rng);
            states.push(x as u32);
        }
        Ok(Trajectory { states, n: self.n })
    }

    /// Mean return time `sum_x q(x) / pi(x)` for an irreducible matrix.
    ///
    /// With `q` the point mass at `x` this is Kac's formula `1 / pi(x)`.
    pub fn mean_return_time(&self, q: &[F]) -> Result<F> {
        validate_distribution(q, self.n, false)?;
        let pi = self.stationary_distribution()?;
        let mut total = F::zero();
        for x in 0..self.n {
            total += q[x] / pi[x];
        }
        Ok(total)
    }
}

/// A reward function over the state space, with its extreme classes.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardFunction<F: Scalar> {
    values: Vec<F>,
    max: F,
    min: F,
    max_class: Vec<usize>,
    min_class: Vec<usize>,
}

impl<F: Scalar> RewardFunction<F> {
    /// Validates a nonconstant, finite reward vector.
    pub fn new(values: Vec<F>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation {
                field: "rewards".into(),
                reason: "non-finite value".into(),
            });
        }
        if values.is_empty() {
            return Err(Error::DimensionMismatch { expected: 2, found: 0 });
        }
        let max = values.iter().copied().fold(F::neg_infinity(), F::max);
        let min = values.iter().copied().fold(F::infinity(), F::min);
        if !(max > min) {
            return Err(Error::ConstantReward);
        }
        let max_class = (0..values.len()).filter(|&x| values[x] == max).collect();
        let min_class = (0..values.len()).filter(|&x| values[x] == min).collect();
        Ok(Self { values, max, min, max_class, min_class })
    }

    /// Reward of state `x`.
    #[inline]
    pub fn get(&self, x: usize) -> F {
        self.values[x]
    }

    /// All values.
    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Number of states covered.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether the reward vector is empty (never true for a validated value).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Maximal reward `M`.
    pub fn max(&self) -> F {
        self.max
    }

    /// Minimal reward `m`.
    pub fn min(&self) -> F {
        self.min
    }

    /// States attaining the maximum (ties by exact float equality).
    pub fn max_class(&self) -> &[usize] {
        &self.max_class
    }

    /// States attaining the minimum.
    pub fn min_class(&self) -> &[usize] {
        &self.min_class
    }

    /// Largest absolute reward, used for tilt-parameter caps.
    pub fn max_abs(&self) -> F {
        self.values.iter().map(|v| v.abs()).fold(F::zero(), F::max)
    }
}

/// Outcome of the generator admissibility check: sub-chain irreducibility of
/// the extreme reward classes and one-step reachability into them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorReport {
    /// The restriction of `P` to the maximal-reward class is irreducible
    /// (a singleton class requires a positive self-loop).
    pub max_class_irreducible: bool,
    /// Every state outside the maximal-reward class has an edge into it.
    pub max_class_reachable: bool,
    /// Same as `max_class_irreducible` for the minimal-reward class.
    pub min_class_irreducible: bool,
    /// Same as `max_class_reachable` for the minimal-reward class.
    pub min_class_reachable: bool,
}

impl GeneratorReport {
    /// All four conditions hold.
    pub fn pass(&self) -> bool {
        self.max_class_irreducible
            && self.max_class_reachable
            && self.min_class_irreducible
            && self.min_class_reachable
    }
}

impl std::fmt::Display for GeneratorReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut failed = Vec::new();
        if !self.max_class_irreducible {
            failed.push("max class not irreducible");
        }
        if !self.max_class_reachable {
            failed.push("max class not reachable from every state");
        }
        if !self.min_class_irreducible {
            failed.push("min class not irreducible");
        }
        if !self.min_class_reachable {
            failed.push("min class not reachable from every state");
        }
        if failed.is_empty() {
            write!(f, "all conditions hold")
        } else {
            write!(f, "{}", failed.join("; "))
        }
    }
}

/// Checks the four admissibility conditions of the pair `(P, f)`.
///
/// Requires `P` irreducible. Strictly positive matrices always pass.
pub fn check_generator<F: Scalar>(
    p: &StochasticMatrix<F>,
    f: &RewardFunction<F>,
) -> Result<GeneratorReport> {
    if f.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), found: f.len() });
    }
    if !p.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let class_flags = |class: &[usize]| {
        let irreducible = if class.len() == 1 {
            let x = class[0];
            p.get(x, x) > F::zero()
        } else {
            is_strongly_connected(class.len(), |i, j| p.get(class[i], class[j]) > F::zero())
        };
        let reachable = (0..p.n())
            .filter(|x| !class.contains(x))
            .all(|x| class.iter().any(|&y| p.get(x, y) > F::zero()));
        (irreducible, reachable)
    };
    let (max_irr, max_reach) = class_flags(f.max_class());
    let (min_irr, min_reach) = class_flags(f.min_class());
    Ok(GeneratorReport {
        max_class_irreducible: max_irr,
        max_class_reachable: max_reach,
        min_class_irreducible: min_irr,
        min_class_reachable: min_reach,
    })
}

/// A state trajectory `x_0, x_1, ..., x_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    states: Vec<u32>,
    n: usize,
}

impl Trajectory {
    /// Validates a raw state sequence against the support of `p`.
    pub fn new<F: Scalar>(states: Vec<u32>, p: &StochasticMatrix<F>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InsufficientSamples);
        }
        for &x in &states {
            if x as usize >= p.n() {
                return Err(Error::DimensionMismatch { expected: p.n(), found: x as usize + 1 });
            }
        }
        for w in states.windows(2) {
            if !(p.get(w[0] as usize, w[1] as usize) > F::zero()) {
                return Err(Error::SupportMismatch { from: w[0] as usize, to: w[1] as usize });
            }
        }
        let n = p.n();
        Ok(Self { states, n })
    }

    /// The visited states, starting at `x_0`.
    pub fn states(&self) -> &[u32] {
        &self.states
    }

    /// Initial state.
    pub fn initial(&self) -> usize {
        self.states[0] as usize
    }

    /// Final state.
    pub fn last(&self) -> usize {
        *self.states.last().expect("nonempty") as usize
    }

    /// Number of transitions `t`.
    pub fn num_transitions(&self) -> usize {
        self.states.len() - 1
    }

    /// Transition pair counts `N(x, y)`; their total equals `t`.
    pub fn pair_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n * self.n];
        for w in self.states.windows(2) {
            counts[w[0] as usize * self.n + w[1] as usize] += 1;
        }
        counts
    }

    /// Reward sum `f(x_1) + ... + f(x_t)`; the initial state is excluded.
    pub fn reward_sum<F: Scalar>(&self, f: &RewardFunction<F>) -> F {
        self.states[1..].iter().map(|&x| f.get(x as usize)).sum()
    }
}

/// Perron-Frobenius eigendata of a nonnegative matrix.
///
/// Normalized so that `sum(u) = 1` and `sum(u . v) = 1`; `u` is the left and
/// `v` the right eigenvector. For the zero-column block shape `u` vanishes
/// exactly off the irreducible block and `v` stays strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronFrobeniusTriple<F: Scalar> {
    /// Spectral radius.
    pub rho: F,
    /// Left eigenvector, `sum(u) = 1`.
    pub u: Vec<F>,
    /// Right eigenvector, `sum(u. v) = 1`.
    pub v: Vec<F>,
}

/// Computes the Perron-Frobenius triple of a nonnegative row-major matrix.
///
/// Power iteration runs jointly for the left and right eigenvectors on the
/// shifted matrix `M + cI` with `c` the maximal row sum; the shift breaks
/// periodicity without changing eigenvectors. Iteration stops at a relative
/// residual of [`Scalar::PF_TOL`] or `1e5` iterations; a triple whose residual
/// exceeds [`Scalar::PF_GATE`] `* rho` is rejected as [`Error::NoConvergence`].
pub fn perron_frobenius<F: Scalar>(entries: &[F], n: usize) -> Result<PerronFrobeniusTriple<F>> {
    if n == 0 || entries.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: entries.len() });
    }
    for (k, &e) in entries.iter().enumerate() {
        if !(e >= F::zero()) || !e.is_finite() {
            return Err(Error::NegativeEntry { row: k / n, col: k % n, value: e.as_f64() });
        }
    }
    let zero_cols: Vec<usize> =
        (0..n).filter(|&y| (0..n).all(|x| entries[x * n + y] == F::zero())).collect();
    if zero_cols.is_empty() {
        if !is_strongly_connected(n, |x, y| entries[x * n + y] > F::zero()) {
            return Err(Error::StructureUnsupported);
        }
        let (rho, u, v) = power_iteration(entries, n)?;
        return Ok(normalize_triple(rho, u, v));
    }

    // Zero-column block shape: the complement of the zero columns must induce
    // an irreducible block, and every outside row must lead into it.
    let block: Vec<usize> = (0..n).filter(|y| !zero_cols.contains(y)).collect();
    let k = block.len();
    let sub_ok = if k == 1 {
        entries[block[0] * n + block[0]] > F::zero()
    } else {
        is_strongly_connected(k, |i, j| entries[block[i] * n + block[j]] > F::zero())
    };
    if !sub_ok {
        return Err(Error::StructureUnsupported);
    }
    for &x in &zero_cols {
        if !block.iter().any(|&y| entries[x * n + y] > F::zero()) {
            return Err(Error::StructureUnsupported);
        }
    }
    let mut sub = vec![F::zero(); k * k];
    for i in 0..k {
        for j in 0..k {
            sub[i * k + j] = entries[block[i] * n + block[j]];
        }
    }
    let (rho, sub_u, sub_v) = power_iteration(&sub, k)?;
    let mut u = vec![F::zero(); n];
    let mut v = vec![F::zero(); n];
    for i in 0..k {
        u[block[i]] = sub_u[i];
        v[block[i]] = sub_v[i];
    }
    for &x in &zero_cols {
        let mut ext = F::zero();
        for i in 0..k {
            ext += entries[x * n + block[i]] * sub_v[i];
        }
        v[x] = ext / rho;
    }
    Ok(normalize_triple(rho, u, v))
}

fn normalize_triple<F: Scalar>(rho: F, mut u: Vec<F>, mut v: Vec<F>) -> PerronFrobeniusTriple<F> {
    let su: F = u.iter().copied().sum();
    for x in u.iter_mut() {
        *x /= su;
    }
    let uv: F = u.iter().zip(v.iter()).map(|(&a, &b)| a * b).sum();
    for x in v.iter_mut() {
        *x /= uv;
    }
    PerronFrobeniusTriple { rho, u, v }
}

/// Joint power iteration on an irreducible `k x k` block. Returns
/// `(rho, u, v)` unnormalized.
fn power_iteration<F: Scalar>(a: &[F], k: usize) -> Result<(F, Vec<F>, Vec<F>)> {
    if k == 1 {
        let rho = a[0];
        if !(rho > F::zero()) {
            return Err(Error::StructureUnsupported);
        }
        return Ok((rho, vec![F::one()], vec![F::one()]));
    }
    if k == 2 {
        // Closed form via the characteristic polynomial; irreducibility makes
        // both off-diagonal entries positive, so the eigenvector ratios read
        // off the first row and column are positive too.
        let half_tr = (a[0] + a[3]) * F::c(0.5);
        let half_gap = (a[0] - a[3]) * F::c(0.5);
        let cross = a[1] * a[2];
        let disc = (half_gap * half_gap + cross).sqrt();
        let rho = half_tr + disc;
        if !(rho > F::zero()) {
            return Err(Error::NoConvergence { residual: f64::INFINITY });
        }
        // `rho - a[0]` cancels to garbage (or exact zero, and NaN kernels
        // downstream) when the top-left entry dominates and the off-diagonal
        // product is many orders smaller, as happens under extreme tilting.
        // The algebraically equal product form stays accurate there.
        let tail = if half_gap > F::zero() && cross < half_gap * half_gap * F::c(1e-9) {
            cross / (half_gap + disc)
        } else {
            rho - a[0]
        };
        return Ok((rho, vec![a[2], tail], vec![a[1], tail]));
    }
    let mut row_max = F::zero();
    for i in 0..k {
        let s: F = a[i * k..(i + 1) * k].iter().copied().sum();
        row_max = row_max.max(s);
    }
    let c = row_max;
    let uniform = F::one() / F::of_usize(k);
    let mut u = vec![uniform; k];
    let mut v = vec![uniform; k];
    let mut iu = vec![F::zero(); k];
    let mut iv = vec![F::zero(); k];
    let mut residual = F::infinity();
    let mut rho = F::zero();
    const MAX_ITER: usize = 100_000;
    for _ in 0..MAX_ITER {
        // One shifted step for each side: iv = (A + cI) v, iu = (A + cI)^T u.
        for i in 0..k {
            let mut acc = c * v[i];
            for j in 0..k {
                acc += a[i * k + j] * v[j];
            }
            iv[i] = acc;
        }
        for j in 0..k {
            let mut acc = c * u[j];
            for i in 0..k {
                acc += a[i * k + j] * u[i];
            }
            iu[j] = acc;
        }
        let sv: F = iv.iter().copied().sum();
        let su: F = iu.iter().copied().sum();
        let shifted_rho = sv; // v sums to one, so sum((A + cI) v) estimates rho + c
        rho = shifted_rho - c;
        let scale = rho.abs().max(F::min_positive_value());
        let mut r = F::zero();
        let mut vmax = F::zero();
        let mut umax = F::zero();
        for i in 0..k {
            r = r.max((iv[i] - shifted_rho * v[i]).abs());
            r = r.max((iu[i] - shifted_rho * u[i]).abs());
            vmax = vmax.max(v[i].abs());
            umax = umax.max(u[i].abs());
        }
        residual = r / (scale * vmax.max(umax));
        for i in 0..k {
            v[i] = iv[i] / sv;
            u[i] = iu[i] / su;
        }
        if residual <= F::PF_TOL {
            break;
        }
    }
    if !(rho > F::zero()) || residual > F::PF_GATE {
        return Err(Error::NoConvergence { residual: residual.as_f64() });
    }
    Ok((rho, u, v))
}

/// Strong connectivity of the digraph on `k` nodes induced by `edge`.
fn is_strongly_connected(k: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    if k == 0 {
        return false;
    }
    let reaches_all = |forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in 0..k {
                let connected = if forward { edge(x, y) } else { edge(y, x) };
                if connected && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reaches_all(true) && reaches_all(false)
}

/// Validates a probability vector; with `strict` every entry must be positive.
pub(crate) fn validate_distribution<F: Scalar>(q: &[F], n: usize, strict: bool) -> Result<()> {
    if q.len() != n {
        return Err(Error::InvalidDistribution {
            reason: format!("length {} does not match state count {}", q.len(), n),
        });
    }
    let mut sum = F::zero();
    for &p in q {
        if !(p >= F::zero()) || !p.is_finite() {
            return Err(Error::InvalidDistribution { reason: "negative or non-finite mass".into() });
        }
        if strict && !(p > F::zero()) {
            return Err(Error::InvalidDistribution { reason: "zero mass not allowed".into() });
        }
        sum += p;
    }
    if (sum - F::one()).abs() > F::NORM_TOL {
        return Err(Error::InvalidDistribution {
            reason: format!("mass sums to {}", sum.as_f64()),
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn sample_index<F: Scalar>(weights: &[F], rng: &mut SimRng) -> usize {
    let u = F::c(rng.random::<f64>());
    let mut acc = F::zero();
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}
