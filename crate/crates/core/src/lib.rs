//! Exponential families of Markov chains and best-Markovian-arm identification.
//!
//! The crate is organized in layers:
//!
//! * [`markov`]: stochastic matrices, Perron-Frobenius eigendata, simulation;
//! * [`family`]: the one-parameter exponential family generated by a chain and
//!   a reward function, its members, mean map, divergence rates, and limits;
//! * [`concentration`]: finite-horizon log-MGF estimates, Chernoff-style tail
//!   bounds, and exact/Monte-Carlo tail probabilities;
//! * [`bandit`]: the track-and-stop identification strategy over a family of
//!   Markovian arms, its characteristic time, and sample-complexity bounds;
//! * [`experiment`]: config-driven experiment batches behind the `mblab` CLI.
//!
//! All numerics are generic over [`scalar::Scalar`] (`f64` and `f32` are
//! provided); the aliases below pin the default `f64` working precision.

pub mod bandit;
pub mod concentration;
pub mod error;
pub mod experiment;
pub mod family;
pub(crate) mod linalg;
pub mod markov;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default-precision stochastic matrix.
pub type StochasticMatrix = markov::StochasticMatrix<f64>;
/// Default-precision reward function.
pub type RewardFunction = markov::RewardFunction<f64>;
/// Default-precision Perron-Frobenius triple.
pub type PerronFrobeniusTriple = markov::PerronFrobeniusTriple<f64>;
/// Default-precision exponential family.
pub type ExpFamily = family::ExpFamily<f64>;
/// Default-precision family member.
pub type FamilyMember = family::FamilyMember<f64>;
/// Default-precision limit member.
pub type LimitMember = family::LimitMember<f64>;
/// Default-precision bandit instance.
pub type BanditInstance = bandit::BanditInstance<f64>;
/// Default-precision strategy parameters.
pub type StrategyParams = bandit::StrategyParams<f64>;
/// Default-precision strategy run outcome.
pub type RunResult = bandit::RunResult<f64>;
