//! Config-driven experiment batches.
//!
//! One TOML document describes an experiment. The top-level `mode` field
//! selects what runs and which sections are required:
//!
//! * `family`: sweep a theta grid, tabulate `A(theta)`, the mean, and the
//!   divergence rate to the base chain (needs `[family]`);
//! * `concentration`: tabulate exact, Chernoff-bound, and Monte-Carlo tail
//!   probabilities over a horizon range and tail levels (needs
//!   `[concentration]`);
//! * `lower-bound`: report the optimal sampling weights, the characteristic
//!   time, and the nonasymptotic expected-sample lower bound (needs `[arms]`
//!   and `[strategy]`);
//! * `run`: replicate the identification strategy and aggregate stopping
//!   times and error counts (needs `[arms]`, `[strategy]`, and `[run]`).
//!
//! Every mode shares the `[chain]` section (generator matrix, rewards, and an
//! optional initial law) and a top-level master seed. Replication `i` of a
//! batch runs on the stream seed `stream_seed(master, i)`, so batches are
//! reproducible bit for bit regardless of worker scheduling. [`emit`] writes
//! the documented CSV artifacts plus a `summary` key-value file and an echo
//! of the validated config; floats are serialized with 17 significant digits
//! so files round-trip.
//!
//! Unlike the math modules this one is not generic over the scalar type:
//! configs are written in `f64` and the drivers run in `f64`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandit::{
    nonasymptotic_lower_bound, optimal_weights, run_capped, BanditInstance, RunResult,
    StrategyParams, TraceRow, MAX_SAMPLES,
};
use crate::concentration::{exact_tail, mc_tail, tail_bound};
use crate::error::{Error, Result};
use crate::family::ExpFamily;
use crate::markov::{RewardFunction, StochasticMatrix};
use crate::rng::stream_seed;

/// Experiment selector; doubles as the CLI subcommand name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Theta-grid sweep of the family curves.
    Family,
    /// Tail-probability and bound tabulation.
    Concentration,
    /// Optimal weights, characteristic time, and sample-complexity bound.
    LowerBound,
    /// Replicated identification runs.
    Run,
}

impl Mode {
    /// The kebab-case name used in configs and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Mode::Family => "family",
            Mode::Concentration => "concentration",
            Mode::LowerBound => "lower-bound",
            Mode::Run => "run",
        }
    }
}

/// The `[chain]` section: the common generator behind every arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    /// Row-stochastic transition matrix, given as rows.
    pub matrix: Vec<Vec<f64>>,
    /// Per-state rewards.
    pub rewards: Vec<f64>,
    /// Initial law; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

/// The `[arms]` section: exactly one of `thetas` and `means` must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmsConfig {
    /// Canonical parameters, one per arm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    /// Stationary means, one per arm, inverted through the mean map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<f64>>,
}

/// The `[strategy]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyConfig {
    /// Threshold growth exponent; must exceed 1.
    pub alpha: f64,
    /// Target error probability in (0, 1).
    pub delta: f64,
}

/// The `[run]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Number of independent replications.
    pub replications: usize,
    /// Per-replication sample cap; the crate-wide cap when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_samples: Option<u64>,
    /// Record the per-step trace of the first replication.
    #[serde(default)]
    pub trace: bool,
}

/// The `[family]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    /// Grid of canonical parameters to sweep.
    pub thetas: Vec<f64>,
}

/// The `[concentration]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationConfig {
    /// Member chain whose reward sums are studied.
    pub theta: f64,
    /// Smallest horizon.
    pub n_min: usize,
    /// Largest horizon.
    pub n_max: usize,
    /// Tail levels; each must be at least the member mean.
    pub mu_levels: Vec<f64>,
    /// Monte-Carlo replications per row; 0 skips the estimate.
    pub mc_reps: usize,
}

/// A fully parsed experiment description; see the module docs for the layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Which experiment to run.
    pub mode: Mode,
    /// Master seed all stream seeds derive from.
    pub seed: u64,
    /// Common generator chain.
    pub chain: ChainConfig,
    /// Arm specification (lower-bound and run modes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arms: Option<ArmsConfig>,
    /// Strategy parameters (lower-bound and run modes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyConfig>,
    /// Replication controls (run mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunConfig>,
    /// Theta grid (family mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyConfig>,
    /// Tail tabulation controls (concentration mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concentration: Option<ConcentrationConfig>,
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Validation { field: field.into(), reason: reason.into() }
}

fn check_finite(field: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite, got {value}")))
    }
}

impl ExperimentConfig {
    /// Builds the exponential family described by `[chain]`.
    pub fn build_family(&self) -> Result<ExpFamily<f64>> {
        for (i, row) in self.chain.matrix.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                check_finite(&format!("chain.matrix.row[{i}][{j}]"), p)?;
            }
        }
        let p = StochasticMatrix::new(self.chain.matrix.clone()).map_err(|e| match e {
            Error::RowSumViolation { row, deviation } => invalid(
                format!("chain.matrix.row[{row}]"),
                format!("sums to 1{deviation:+e}, outside tolerance"),
            ),
            Error::NegativeEntry { row, col, value } => {
                invalid(format!("chain.matrix.row[{row}][{col}]"), format!("negative entry {value}"))
            }
            Error::DimensionMismatch { expected, found } => invalid(
                "chain.matrix",
                format!("must be square with at least 2 states, expected {expected} got {found}"),
            ),
            other => other,
        })?;
        let f = RewardFunction::new(self.chain.rewards.clone())
            .map_err(|e| invalid("chain.rewards", e.to_string()))?;
        let fam = match &self.chain.initial {
            Some(q) => ExpFamily::with_initial(p, f, q.clone())
                .map_err(|e| invalid("chain", e.to_string()))?,
            None => ExpFamily::new(p, f).map_err(|e| invalid("chain", e.to_string()))?,
        };
        Ok(fam)
    }

    /// Builds the bandit instance described by `[arms]` on top of `family`.
    pub fn build_instance(&self, family: ExpFamily<f64>) -> Result<BanditInstance<f64>> {
        let arms = self.arms.as_ref().ok_or_else(|| {
            invalid("arms", format!("section required in {} mode", self.mode.name()))
        })?;
        let built = match (&arms.thetas, &arms.means) {
            (Some(thetas), None) => BanditInstance::new(family, thetas.clone()),
            (None, Some(means)) => BanditInstance::from_means(family, means),
            _ => unreachable!("validated exclusivity"),
        };
        built.map_err(|e| invalid("arms", e.to_string()))
    }

    /// Builds the strategy parameters described by `[strategy]` for `instance`.
    pub fn build_params(&self, instance: &BanditInstance<f64>) -> Result<StrategyParams<f64>> {
        let s = self.strategy.as_ref().ok_or_else(|| {
            invalid("strategy", format!("section required in {} mode", self.mode.name()))
        })?;
        StrategyParams::for_instance(instance, s.alpha, s.delta)
    }

    /// Checks every field and every cross-field constraint the selected mode
    /// relies on; errors name the offending field. Called by [`load_config`]
    /// and again by the CLI after command-line overrides.
    pub fn validate(&self) -> Result<()> {
        let family = self.build_family()?;
        if let Some(arms) = &self.arms {
            self.validate_arms(arms, &family)?;
        }
        if let Some(s) = &self.strategy {
            check_finite("strategy.alpha", s.alpha)?;
            check_finite("strategy.delta", s.delta)?;
            if s.alpha <= 1.0 {
                return Err(invalid("strategy.alpha", format!("must exceed 1, got {}", s.alpha)));
            }
            if !(s.delta > 0.0 && s.delta < 1.0) {
                return Err(invalid(
                    "strategy.delta",
                    format!("must lie in (0, 1), got {}", s.delta),
                ));
            }
        }
        if let Some(r) = &self.run {
            if r.replications == 0 {
                return Err(invalid("run.replications", "must be at least 1"));
            }
            if r.max_samples == Some(0) {
                return Err(invalid("run.max_samples", "must be at least 1"));
            }
        }
        if let Some(f) = &self.family {
            if f.thetas.is_empty() {
                return Err(invalid("family.thetas", "grid must be nonempty"));
            }
            for (i, &t) in f.thetas.iter().enumerate() {
                check_finite(&format!("family.thetas[{i}]"), t)?;
            }
        }
        if let Some(c) = &self.concentration {
            self.validate_concentration(c, &family)?;
        }
        match self.mode {
            Mode::Family if self.family.is_none() => {
                Err(invalid("family", "section required in family mode"))
            }
            Mode::Concentration if self.concentration.is_none() => {
                Err(invalid("concentration", "section required in concentration mode"))
            }
            Mode::LowerBound | Mode::Run if self.arms.is_none() => {
                Err(invalid("arms", format!("section required in {} mode", self.mode.name())))
            }
            Mode::LowerBound | Mode::Run if self.strategy.is_none() => {
                Err(invalid("strategy", format!("section required in {} mode", self.mode.name())))
            }
            Mode::Run if self.run.is_none() => Err(invalid("run", "section required in run mode")),
            _ => Ok(()),
        }
    }

    fn validate_arms(&self, arms: &ArmsConfig, family: &ExpFamily<f64>) -> Result<()> {
        let values = match (&arms.thetas, &arms.means) {
            (Some(t), None) => {
                for (i, &v) in t.iter().enumerate() {
                    check_finite(&format!("arms.thetas[{i}]"), v)?;
                }
                t
            }
            (None, Some(m)) => {
                let (lo, hi) = (family.rewards().min(), family.rewards().max());
                for (i, &v) in m.iter().enumerate() {
                    check_finite(&format!("arms.means[{i}]"), v)?;
                    if !(v > lo && v < hi) {
                        return Err(invalid(
                            format!("arms.means[{i}]"),
                            format!("must lie strictly between the reward bounds ({lo}, {hi})"),
                        ));
                    }
                }
                m
            }
            (Some(_), Some(_)) => {
                return Err(invalid("arms", "give exactly one of `thetas` and `means`, not both"));
            }
            (None, None) => {
                return Err(invalid("arms", "give exactly one of `thetas` and `means`"));
            }
        };
        if values.len() < 2 {
            return Err(invalid("arms", "at least two arms are required"));
        }
        // The mean map is strictly increasing, so a tie in the configured
        // vector is a tie in the means regardless of which form was given.
        let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if values.iter().filter(|&&v| v == top).count() != 1 {
            return Err(invalid("arms", "no unique best arm: the maximal entry is tied"));
        }
        Ok(())
    }

    fn validate_concentration(&self, c: &ConcentrationConfig, family: &ExpFamily<f64>) -> Result<()> {
        check_finite("concentration.theta", c.theta)?;
        if c.n_min == 0 {
            return Err(invalid("concentration.n_min", "horizons start at 1"));
        }
        if c.n_max < c.n_min {
            return Err(invalid(
                "concentration.n_max",
                format!("must be at least n_min = {}", c.n_min),
            ));
        }
        if c.mu_levels.is_empty() {
            return Err(invalid("concentration.mu_levels", "at least one tail level is required"));
        }
        let mean = family.mean(c.theta)?;
        let hi = family.rewards().max();
        for (i, &mu) in c.mu_levels.iter().enumerate() {
            check_finite(&format!("concentration.mu_levels[{i}]"), mu)?;
            if !(mu >= mean && mu <= hi) {
                return Err(invalid(
                    format!("concentration.mu_levels[{i}]"),
                    format!("must lie in [member mean, max reward] = [{mean}, {hi}], got {mu}"),
                ));
            }
        }
        Ok(())
    }
}

/// Reads, parses, and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let config: ExperimentConfig = toml::from_str(&text)?;
    config.validate()?;
    Ok(config)
}

/// One replication of a batch; `tau`, `decision`, and `correct` are absent
/// when the replication hit its sample cap.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Replication index within the batch.
    pub rep: usize,
    /// The stream seed this replication ran on.
    pub seed: u64,
    /// Stopping time.
    pub tau: Option<u64>,
    /// Recommended arm.
    pub decision: Option<usize>,
    /// Whether the recommendation matched the true best arm.
    pub correct: Option<bool>,
    /// Per-step trace, kept for the first replication when requested.
    pub trace: Option<Vec<TraceRow<f64>>>,
}

/// Batch-level aggregation of a `run` experiment.
///
/// Stopping-time statistics cover completed replications only; timeouts are
/// counted separately and never silently censored. With no completed
/// replication the statistics are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateReport {
    /// Characteristic time of the instance.
    pub t_star: f64,
    /// Optimal sampling weights of the instance.
    pub w_star: Vec<f64>,
    /// Nonasymptotic expected-sample lower bound at the configured delta.
    pub lower_bound: f64,
    /// Replications attempted.
    pub replications: usize,
    /// Completed replications recommending a wrong arm.
    pub errors: usize,
    /// Exactly `errors / replications`.
    pub error_rate: f64,
    /// Replications that hit the sample cap.
    pub timeouts: usize,
    /// Mean stopping time.
    pub tau_mean: f64,
    /// Median stopping time (midpoint convention for even counts).
    pub tau_median: f64,
    /// 95th-percentile stopping time (nearest-rank convention).
    pub tau_p95: f64,
    /// `tau_mean / ln(1 / delta)`, the quantity the asymptotic theory pins.
    pub tau_per_log_inv_delta: f64,
}

/// Mean, median, and nearest-rank 95th percentile of a sample.
fn tau_stats(taus: &[u64]) -> (f64, f64, f64) {
    if taus.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mut sorted = taus.to_vec();
    sorted.sort_unstable();
    let len = sorted.len();
    let mean = sorted.iter().map(|&t| t as f64).sum::<f64>() / len as f64;
    let median = if len % 2 == 1 {
        sorted[len / 2] as f64
    } else {
        (sorted[len / 2 - 1] as f64 + sorted[len / 2] as f64) / 2.0
    };
    let rank = (0.95 * len as f64).ceil() as usize;
    let p95 = sorted[rank.clamp(1, len) - 1] as f64;
    (mean, median, p95)
}

/// Runs `config.run.replications` independent strategy replications and
/// aggregates them.
///
/// Replication `i` runs on `stream_seed(config.seed, i)`; replications fan
/// out across worker threads and are collected back in index order, so the
/// result depends only on the config. A replication that hits its sample cap
/// is recorded as a timeout and excluded from the stopping-time statistics;
/// any other failure aborts the batch.
pub fn run_batch(config: &ExperimentConfig) -> Result<(AggregateReport, Vec<RunRecord>)> {
    if config.mode != Mode::Run {
        return Err(invalid("mode", format!("run_batch needs mode = \"run\", got {:?}", config.mode)));
    }
    let run_cfg = config
        .run
        .as_ref()
        .ok_or_else(|| invalid("run", "section required in run mode"))?;
    let instance = config.build_instance(config.build_family()?)?;
    let params = config.build_params(&instance)?;
    let cap = run_cfg.max_samples.unwrap_or(MAX_SAMPLES);

    let records = (0..run_cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let seed = stream_seed(config.seed, rep as u64);
            let trace = run_cfg.trace && rep == 0;
            match run_capped(&instance, &params, seed, trace, cap) {
                Ok(RunResult { tau, decision, correct, trace, .. }) => Ok(RunRecord {
                    rep,
                    seed,
                    tau: Some(tau),
                    decision: Some(decision),
                    correct: Some(correct),
                    trace,
                }),
                Err(Error::Timeout { .. }) => Ok(RunRecord {
                    rep,
                    seed,
                    tau: None,
                    decision: None,
                    correct: None,
                    trace: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let report = aggregate(&instance, &params, &records)?;
    Ok((report, records))
}

/// Recomputes the batch aggregate from per-replication records.
pub fn aggregate(
    instance: &BanditInstance<f64>,
    params: &StrategyParams<f64>,
    records: &[RunRecord],
) -> Result<AggregateReport> {
    let (w_star, t_star) = optimal_weights(instance.family(), instance.means())?;
    let lower_bound = nonasymptotic_lower_bound(instance, params)?;
    let taus: Vec<u64> = records.iter().filter_map(|r| r.tau).collect();
    let timeouts = records.iter().filter(|r| r.tau.is_none()).count();
    let errors = records.iter().filter(|r| r.correct == Some(false)).count();
    let (tau_mean, tau_median, tau_p95) = tau_stats(&taus);
    Ok(AggregateReport {
        t_star,
        w_star,
        lower_bound,
        replications: records.len(),
        errors,
        error_rate: errors as f64 / records.len() as f64,
        timeouts,
        tau_mean,
        tau_median,
        tau_p95,
        tau_per_log_inv_delta: tau_mean / (1.0 / params.delta).ln(),
    })
}

/// One row of the family sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    /// Canonical parameter.
    pub theta: f64,
    /// Log Perron root `A(theta)`.
    pub a: f64,
    /// Stationary mean reward.
    pub mean: f64,
    /// Divergence rate from the member to the base chain.
    pub kl_to_base: f64,
}

/// One row of the concentration sweep. Columns that cannot be computed (an
/// exact tail beyond the supported horizon or off the reward lattice, or a
/// Monte-Carlo estimate with `mc_reps = 0`) hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationRow {
    /// Horizon.
    pub n: usize,
    /// Tail level.
    pub mu: f64,
    /// Exact tail probability.
    pub exact: f64,
    /// Chernoff-style upper bound.
    pub bound: f64,
    /// Monte-Carlo tail estimate.
    pub mc_estimate: f64,
    /// Binomial standard error of the estimate.
    pub mc_stderr: f64,
    /// Divergence rate in the bound's exponent.
    pub kl_rate: f64,
}

/// Output of a lower-bound experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    /// Optimal sampling weights.
    pub w_star: Vec<f64>,
    /// Characteristic time.
    pub t_star: f64,
    /// Nonasymptotic expected-sample lower bound.
    pub bound: f64,
}

/// Everything an experiment produced, ready for [`emit`].
#[derive(Debug, Clone, PartialEq)]
pub enum Outputs {
    /// Family-sweep rows.
    Family(Vec<FamilyRow>),
    /// Concentration-sweep rows.
    Concentration(Vec<ConcentrationRow>),
    /// Lower-bound report.
    LowerBound(LowerBoundReport),
    /// Batch aggregate and per-replication records.
    Run(AggregateReport, Vec<RunRecord>),
}

/// Sweeps the configured theta grid.
pub fn run_family(config: &ExperimentConfig) -> Result<Vec<FamilyRow>> {
    let grid = config
        .family
        .as_ref()
        .ok_or_else(|| invalid("family", "section required in family mode"))?;
    let family = config.build_family()?;
    grid.thetas
        .iter()
        .map(|&theta| {
            let member = family.member(theta)?;
            Ok(FamilyRow {
                theta,
                a: member.log_pf,
                mean: member.mean,
                kl_to_base: family.kl_rate_theta(theta, 0.0)?,
            })
        })
        .collect()
}

/// Tabulates exact tails, bounds, and Monte-Carlo estimates over the
/// configured horizons and tail levels. Monte-Carlo row `i` (in emission
/// order) runs on `stream_seed(config.seed, i)`.
pub fn run_concentration(config: &ExperimentConfig) -> Result<Vec<ConcentrationRow>> {
    let c = config
        .concentration
        .as_ref()
        .ok_or_else(|| invalid("concentration", "section required in concentration mode"))?;
    let family = config.build_family()?;
    let mean = family.mean(c.theta)?;
    let mut rows = Vec::new();
    for n in c.n_min..=c.n_max {
        for &mu in &c.mu_levels {
            let label = rows.len() as u64;
            let exact = if n <= 20 {
                match exact_tail(&family, c.theta, n, mu, family.initial()) {
                    Ok(p) => p,
                    Err(Error::RewardsNotLatticed { .. } | Error::StateSpaceTooLarge { .. }) => {
                        f64::NAN
                    }
                    Err(e) => return Err(e),
                }
            } else {
                f64::NAN
            };
            let (mc_estimate, mc_stderr) = if c.mc_reps > 0 {
                mc_tail(&family, c.theta, n, mu, c.mc_reps, stream_seed(config.seed, label))?
            } else {
                (f64::NAN, f64::NAN)
            };
            rows.push(ConcentrationRow {
                n,
                mu,
                exact,
                bound: tail_bound(&family, c.theta, n, mu)?,
                mc_estimate,
                mc_stderr,
                kl_rate: family.kl_rate_mean(mu, mean)?,
            });
        }
    }
    Ok(rows)
}

/// Computes the lower-bound report for the configured instance.
pub fn run_lower_bound(config: &ExperimentConfig) -> Result<LowerBoundReport> {
    let instance = config.build_instance(config.build_family()?)?;
    let params = config.build_params(&instance)?;
    let (w_star, t_star) = optimal_weights(instance.family(), instance.means())?;
    let bound = nonasymptotic_lower_bound(&instance, &params)?;
    Ok(LowerBoundReport { w_star, t_star, bound })
}

/// Runs the experiment the config describes.
pub fn execute(config: &ExperimentConfig) -> Result<Outputs> {
    match config.mode {
        Mode::Family => Ok(Outputs::Family(run_family(config)?)),
        Mode::Concentration => Ok(Outputs::Concentration(run_concentration(config)?)),
        Mode::LowerBound => Ok(Outputs::LowerBound(run_lower_bound(config)?)),
        Mode::Run => {
            let (report, records) = run_batch(config)?;
            Ok(Outputs::Run(report, records))
        }
    }
}

/// Floats in emitted files carry 17 significant digits, enough to round-trip
/// `f64` exactly.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    written.push(path);
    Ok(())
}

/// Writes the experiment artifacts into `out_dir` and returns the paths, in
/// a fixed order. Every mode gets `summary` (key=value lines) and
/// `config.toml` (an echo of the validated config, loadable again); the
/// mode-specific CSVs are `family.csv`, `concentration.csv`,
/// `lower_bound.csv`, or `runs.csv` plus `trace.csv` when a trace was
/// recorded. The directory is created if missing.
pub fn emit(config: &ExperimentConfig, outputs: &Outputs, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    let mut summary = String::new();
    let _ = writeln!(summary, "mode={}", config.mode.name());
    let _ = writeln!(summary, "seed={}", config.seed);
    let _ = writeln!(summary, "states={}", config.chain.rewards.len());

    match outputs {
        Outputs::Family(rows) => {
            let mut csv = String::from("theta,a,mean,kl_to_base\n");
            for r in rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    fmt_f64(r.theta),
                    fmt_f64(r.a),
                    fmt_f64(r.mean),
                    fmt_f64(r.kl_to_base)
                );
            }
            write_file(out_dir, "family.csv", &csv, &mut written)?;
            let family = config.build_family()?;
            let ratio = family.ratio_constant();
            let _ = writeln!(summary, "rows={}", rows.len());
            let _ = writeln!(summary, "reward_min={}", fmt_f64(family.rewards().min()));
            let _ = writeln!(summary, "reward_max={}", fmt_f64(family.rewards().max()));
            let _ = writeln!(summary, "ratio_constant={}", fmt_f64(ratio.value));
            let _ = writeln!(summary, "ratio_exact={}", ratio.exact);
        }
        Outputs::Concentration(rows) => {
            let mut csv = String::from("n,mu,exact,bound,mc_estimate,mc_stderr,kl_rate\n");
            for r in rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    r.n,
                    fmt_f64(r.mu),
                    fmt_f64(r.exact),
                    fmt_f64(r.bound),
                    fmt_f64(r.mc_estimate),
                    fmt_f64(r.mc_stderr),
                    fmt_f64(r.kl_rate)
                );
            }
            write_file(out_dir, "concentration.csv", &csv, &mut written)?;
            let c = config.concentration.as_ref().expect("validated section");
            let family = config.build_family()?;
            let _ = writeln!(summary, "rows={}", rows.len());
            let _ = writeln!(summary, "theta={}", fmt_f64(c.theta));
            let _ = writeln!(summary, "member_mean={}", fmt_f64(family.mean(c.theta)?));
            let _ = writeln!(summary, "mc_reps={}", c.mc_reps);
        }
        Outputs::LowerBound(report) => {
            let mut csv = String::from("arm,w_star\n");
            for (a, &w) in report.w_star.iter().enumerate() {
                let _ = writeln!(csv, "{a},{}", fmt_f64(w));
            }
            let _ = writeln!(csv, "T_star,{}", fmt_f64(report.t_star));
            let _ = writeln!(csv, "lower_bound,{}", fmt_f64(report.bound));
            write_file(out_dir, "lower_bound.csv", &csv, &mut written)?;
            let s = config.strategy.as_ref().expect("validated section");
            let _ = writeln!(summary, "alpha={}", fmt_f64(s.alpha));
            let _ = writeln!(summary, "delta={}", fmt_f64(s.delta));
            let _ = writeln!(summary, "t_star={}", fmt_f64(report.t_star));
            let _ = writeln!(summary, "lower_bound={}", fmt_f64(report.bound));
            for (a, &w) in report.w_star.iter().enumerate() {
                let _ = writeln!(summary, "w_star_{a}={}", fmt_f64(w));
            }
        }
        Outputs::Run(report, records) => {
            let mut csv = String::from("rep,seed,tau,decision,correct\n");
            for r in records {
                let tau = r.tau.map(|t| t.to_string()).unwrap_or_default();
                let decision = r.decision.map(|d| d.to_string()).unwrap_or_default();
                let correct = r.correct.map(|c| c.to_string()).unwrap_or_default();
                let _ = writeln!(csv, "{},{},{tau},{decision},{correct}", r.rep, r.seed);
            }
            write_file(out_dir, "runs.csv", &csv, &mut written)?;
            if let Some(trace) = records.iter().find_map(|r| r.trace.as_ref()) {
                let mut tcsv = String::from("t,arm,z_min,beta\n");
                for row in trace {
                    let _ = writeln!(
                        tcsv,
                        "{},{},{},{}",
                        row.t,
                        row.arm,
                        fmt_f64(row.z_min),
                        fmt_f64(row.beta)
                    );
                }
                write_file(out_dir, "trace.csv", &tcsv, &mut written)?;
            }
            let s = config.strategy.as_ref().expect("validated section");
            let _ = writeln!(summary, "alpha={}", fmt_f64(s.alpha));
            let _ = writeln!(summary, "delta={}", fmt_f64(s.delta));
            let _ = writeln!(summary, "replications={}", report.replications);
            let _ = writeln!(summary, "errors={}", report.errors);
            let _ = writeln!(summary, "error_rate={}", fmt_f64(report.error_rate));
            let _ = writeln!(summary, "timeouts={}", report.timeouts);
            let _ = writeln!(summary, "tau_mean={}", fmt_f64(report.tau_mean));
            let _ = writeln!(summary, "tau_median={}", fmt_f64(report.tau_median));
            let _ = writeln!(summary, "tau_p95={}", fmt_f64(report.tau_p95));
            let _ = writeln!(
                summary,
                "tau_per_log_inv_delta={}",
                fmt_f64(report.tau_per_log_inv_delta)
            );
            let _ = writeln!(summary, "t_star={}", fmt_f64(report.t_star));
            let _ = writeln!(summary, "lower_bound={}", fmt_f64(report.lower_bound));
            for (a, &w) in report.w_star.iter().enumerate() {
                let _ = writeln!(summary, "w_star_{a}={}", fmt_f64(w));
            }
        }
    }

    write_file(out_dir, "summary", &summary, &mut written)?;
    let echo = toml::to_string_pretty(config)
        .map_err(|e| Error::Io(format!("config echo: {e}")))?;
    write_file(out_dir, "config.toml", &echo, &mut written)?;
    Ok(written)
}
