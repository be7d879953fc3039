//! Path simulation of both miners with exact ruin detection.
//!
//! Between rewards the surplus falls linearly at rate `c`, so a path is
//! ruined exactly when the gap to the next reward exceeds `R / c`. Nothing
//! is discretised in time.
//!
//! Path `i` of a run with seed `s` draws from the ChaCha8 stream
//! `(s, i)` and partial sums are merged in a fixed chunk order, so
//! estimates are bit-identical for any number of worker threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::honest;
use crate::params::MiningParams;
use crate::selfish::{self, step_chain, SelfishState};

/// Source of the random draws consumed along one path.
pub trait PathDraws {
    /// Exponential variate with the given mean.
    fn exponential(&mut self, mean: f64) -> f64;
    fn bernoulli(&mut self, p: f64) -> bool;
}

/// The per-path keyed stream.
#[derive(Debug, Clone)]
pub struct StreamDraws {
    rng: ChaCha8Rng,
}

impl StreamDraws {
    pub fn new(seed: u64, path: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path);
        Self { rng }
    }
}

impl PathDraws for StreamDraws {
    fn exponential(&mut self, mean: f64) -> f64 {
        let e: f64 = self.rng.sample(Exp1);
        mean * e
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.random_bool(p.clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HorizonKind {
    /// Stop at the fixed time `t`.
    Deterministic,
    /// Stop at an independent exponential time of mean `t`.
    Exponential,
    /// No horizon; paths stop on ruin or once the surplus reaches a level
    /// from which ruin is negligible.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathOutcome {
    pub ruined: bool,
    /// Surplus at the horizon; 0 on ruined paths.
    pub terminal_surplus: f64,
    pub ruin_time: Option<f64>,
    /// Time the path was evaluated at on survival.
    pub horizon: f64,
}

impl PathOutcome {
    /// `T ∧ τ`.
    pub fn stop_time(&self) -> f64 {
        self.ruin_time.unwrap_or(self.horizon)
    }
}

/// Surplus level above `u` after which an infinite-horizon path is
/// declared safe, and the ruin probability it neglects (at most
/// `e^{-θ·margin}` for the protocol-following miner).
pub const SAFETY_EXPONENT: f64 = 30.0;

const MAX_EVENTS: u64 = 500_000_000;

fn horizon_time<D: PathDraws>(kind: HorizonKind, t: f64, draws: &mut D) -> f64 {
    match kind {
        HorizonKind::Deterministic => t,
        HorizonKind::Exponential => draws.exponential(t),
        HorizonKind::Infinite => f64::INFINITY,
    }
}

/// Core loop shared by both miners. `epoch` returns the reward (in units of
/// `b`) collected at each event and advances any internal state.
fn run_path<D, E>(
    u: f64,
    b: f64,
    c: f64,
    event_mean: f64,
    horizon: f64,
    safe_level: f64,
    draws: &mut D,
    mut epoch: E,
) -> PathOutcome
where
    D: PathDraws,
    E: FnMut(&mut D) -> u8,
{
    if u <= 0.0 {
        return PathOutcome {
            ruined: true,
            terminal_surplus: 0.0,
            ruin_time: Some(0.0),
            horizon,
        };
    }
    let mut s = 0.0;
    let mut r = u;
    for _ in 0..MAX_EVENTS {
        let gap = draws.exponential(event_mean);
        let fuel = if c > 0.0 { r / c } else { f64::INFINITY };
        let remaining = horizon - s;
        if fuel < gap.min(remaining) {
            return PathOutcome {
                ruined: true,
                terminal_surplus: 0.0,
                ruin_time: Some(s + fuel),
                horizon,
            };
        }
        if remaining <= gap {
            return PathOutcome {
                ruined: false,
                terminal_surplus: r - c * remaining,
                ruin_time: None,
                horizon,
            };
        }
        s += gap;
        r += b * f64::from(epoch(draws)) - c * gap;
        if r >= safe_level {
            return PathOutcome {
                ruined: false,
                terminal_surplus: r,
                ruin_time: None,
                horizon: s,
            };
        }
    }
    log::warn!("path hit the event cap at time {s}");
    PathOutcome {
        ruined: false,
        terminal_surplus: r,
        ruin_time: None,
        horizon: s,
    }
}

fn safe_level(u: f64, theta: Option<f64>, kind: HorizonKind) -> f64 {
    match (kind, theta) {
        (HorizonKind::Infinite, Some(th)) if th > 0.0 => u + SAFETY_EXPONENT / th,
        _ => f64::INFINITY,
    }
}

/// One path of a protocol-following miner started from `params.u()`.
///
/// Rewards arrive at rate `pλ`; the horizon is `params.t()` (fixed or as an
/// exponential mean).
pub fn simulate_honest<D: PathDraws>(params: &MiningParams<f64>, kind: HorizonKind, draws: &mut D) -> PathOutcome {
    let horizon = horizon_time(kind, params.t(), draws);
    let theta = honest::lundberg_theta(params).ok();
    let level = safe_level(params.u(), theta, kind);
    run_path(
        params.u(),
        params.b(),
        params.c(),
        1.0 / (params.p() * params.lambda()),
        horizon,
        level,
        draws,
        |_| 1,
    )
}

/// One path of the withholding miner started from `params.u()` in state
/// `z0`. Network blocks arrive at rate `λ`.
pub fn simulate_selfish<D: PathDraws>(
    params: &MiningParams<f64>,
    z0: SelfishState,
    kind: HorizonKind,
    draws: &mut D,
) -> PathOutcome {
    let horizon = horizon_time(kind, params.t(), draws);
    let theta = selfish::iid_lundberg_theta(params).ok();
    let level = safe_level(params.u(), theta, kind);
    let (p, q) = (params.p(), params.q());
    let mut z = z0;
    run_path(
        params.u(),
        params.b(),
        params.c(),
        1.0 / params.lambda(),
        horizon,
        level,
        draws,
        |d| {
            let own = d.bernoulli(p);
            let branch = z == SelfishState::Fork && !own && d.bernoulli(q);
            let (next, reward) = step_chain(z, own, branch);
            z = next;
            reward
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Miner {
    Honest,
    Selfish,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Functional {
    /// Indicator of ruin before the horizon.
    Ruin,
    /// Surplus at the horizon, zero on ruin.
    Value,
}

/// What a Monte-Carlo run estimates. The text form is
/// `<miner>-<functional>-<horizon>`, e.g. `honest-ruin-det` or
/// `selfish-value-exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantity {
    pub miner: Miner,
    pub functional: Functional,
    pub horizon: HorizonKind,
}

impl Quantity {
    pub const fn new(miner: Miner, functional: Functional, horizon: HorizonKind) -> Self {
        Self {
            miner,
            functional,
            horizon,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let miner = match self.miner {
            Miner::Honest => "honest",
            Miner::Selfish => "selfish",
        };
        let functional = match self.functional {
            Functional::Ruin => "ruin",
            Functional::Value => "value",
        };
        let horizon = match self.horizon {
            HorizonKind::Deterministic => "det",
            HorizonKind::Exponential => "exp",
            HorizonKind::Infinite => "inf",
        };
        write!(f, "{miner}-{functional}-{horizon}")
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownQuantity(s.to_string());
        let mut parts = s.split('-');
        let miner = match parts.next() {
            Some("honest") => Miner::Honest,
            Some("selfish") => Miner::Selfish,
            _ => return Err(unknown()),
        };
        let functional = match parts.next() {
            Some("ruin") => Functional::Ruin,
            Some("value") => Functional::Value,
            _ => return Err(unknown()),
        };
        let horizon = match parts.next() {
            Some("det") => HorizonKind::Deterministic,
            Some("exp") => HorizonKind::Exponential,
            Some("inf") => HorizonKind::Infinite,
            _ => return Err(unknown()),
        };
        if parts.next().is_some() || (functional == Functional::Value && horizon == HorizonKind::Infinite) {
            return Err(unknown());
        }
        Ok(Self::new(miner, functional, horizon))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub quantity: String,
}

impl McEstimate {
    /// `|x - mean| / stderr`, infinite when the estimate is degenerate and
    /// `x` differs from it.
    pub fn z_score(&self, x: f64) -> f64 {
        let d = (x - self.mean).abs();
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn contains(&self, x: f64, sigmas: f64) -> bool {
        self.z_score(x) <= sigmas
    }
}

/// Count, mean and sum of squared deviations of a block of samples.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * other.n / n,
            m2: self.m2 + other.m2 + d * d * self.n * other.n / n,
        }
    }
}

const CHUNK: u64 = 4096;

/// Mean and standard error of `f` over paths `0..n_paths`, each path fed
/// from its own keyed stream.
pub fn estimate_functional<F>(label: &str, n_paths: u64, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(&mut StreamDraws) -> f64 + Sync,
{
    if n_paths < 2 {
        return Err(invalid("paths", format!("need at least 2 paths, got {n_paths}")));
    }
    let chunks = n_paths.div_ceil(CHUNK);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut m = Moments::default();
            for i in k * CHUNK..((k + 1) * CHUNK).min(n_paths) {
                m.push(f(&mut StreamDraws::new(seed, i)));
            }
            m
        })
        .collect();
    let total = partial.into_iter().fold(Moments::default(), Moments::merge);
    let var = total.m2 / (total.n - 1.0);
    Ok(McEstimate {
        mean: total.mean,
        stderr: (var.max(0.0) / total.n).sqrt(),
        n_paths,
        seed,
        quantity: label.to_string(),
    })
}

fn functional_value(functional: Functional, out: &PathOutcome) -> f64 {
    match functional {
        Functional::Ruin => f64::from(u8::from(out.ruined)),
        Functional::Value => out.terminal_surplus,
    }
}

/// Monte-Carlo estimate of `quantity` from `params.u()` with horizon
/// `params.t()`. `z0` is ignored for the protocol-following miner.
pub fn estimate(
    quantity: Quantity,
    params: &MiningParams<f64>,
    z0: SelfishState,
    n_paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    let label = quantity.to_string();
    match quantity.miner {
        Miner::Honest => estimate_functional(&label, n_paths, seed, |d| {
            functional_value(quantity.functional, &simulate_honest(params, quantity.horizon, d))
        }),
        Miner::Selfish => estimate_functional(&label, n_paths, seed, |d| {
            functional_value(
                quantity.functional,
                &simulate_selfish(params, z0, quantity.horizon, d),
            )
        }),
    }
}

/// [`estimate`] from a text tag such as `honest-value-exp`.
pub fn estimate_tag(
    tag: &str,
    params: &MiningParams<f64>,
    z0: SelfishState,
    n_paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    estimate(tag.parse()?, params, z0, n_paths, seed)
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid("workers", e.to_string()))?;
    Ok(pool.install(f))
}
