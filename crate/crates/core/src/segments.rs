//! Profitability across a difficulty retarget.
//!
//! Withholding blocks wastes part of the network's work, so the first
//! 2016-block segment takes longer than 336 hours. The retarget then lowers
//! the difficulty and the second segment runs faster. Here a miner either
//! follows the protocol for both segments, or withholds on the first and
//! follows the protocol on the second.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::honest;
use crate::montecarlo::{
    estimate_functional, simulate_honest, simulate_selfish, HorizonKind, McEstimate, StreamDraws,
};
use crate::params::{net_profit_frontier_honest, EconomicInputs, MiningParams};
use crate::scalar::Scalar;
use crate::selfish::{self, CharacteristicSolution, SelfishState};

/// Blocks between two retargets.
pub const RETARGET_BLOCKS: f64 = 2016.0;
/// Nominal duration of a segment in hours.
pub const NOMINAL_SEGMENT_HOURS: f64 = 336.0;

/// Intensities, horizons and targets of the two segments. Targets are
/// stored as base-2 logarithms since they sit near `2^256 / H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentPlan<T> {
    pub lambda: T,
    pub lambda1: T,
    pub t1: T,
    pub log2_target: T,
    pub log2_target2: T,
    pub lambda2: T,
    pub t2: T,
    pub hashes_per_hour: T,
}

impl<T: Scalar> SegmentPlan<T> {
    /// `L2 / L`.
    pub fn target_ratio(&self) -> T {
        (self.log2_target2 - self.log2_target).exp2()
    }
}

/// Share of network blocks orphaned under stationarity: the mass of the
/// fork state.
pub fn wasted_fraction<T: Scalar>(p: T) -> T {
    selfish::stationary_distribution(p)[2]
}

pub fn plan_segments<T: Scalar>(params: &MiningParams<T>, hashes_per_hour: T) -> Result<SegmentPlan<T>> {
    if !(hashes_per_hour > T::zero()) || !hashes_per_hour.is_finite() {
        return Err(invalid("hashrate", "must be positive and finite"));
    }
    let lambda = params.lambda();
    let blocks = T::lit(RETARGET_BLOCKS);
    let lambda1 = lambda * (T::one() - wasted_fraction(params.p()));
    let t1 = blocks / lambda1;
    let log2_target = T::lit(256.0) - (hashes_per_hour / lambda).log2();
    let log2_target2 = log2_target + (t1 / T::lit(NOMINAL_SEGMENT_HOURS)).log2();
    // Blocks per hour at target L are H L / 2^256.
    let lambda2 = (hashes_per_hour.log2() + log2_target2 - T::lit(256.0)).exp2();
    Ok(SegmentPlan {
        lambda,
        lambda1,
        t1,
        log2_target,
        log2_target2,
        lambda2,
        t2: blocks / lambda2,
        hashes_per_hour,
    })
}

/// Block intensity fed to the withholding value function on segment 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Stage1Intensity {
    /// The network rate `λ`; the chain itself accounts for wasted blocks.
    #[default]
    Network,
    /// The slowed chain-growth rate `λ1`.
    Adjusted,
}

/// Honest horizon over both segments, in hours.
pub const TWO_SEGMENT_HOURS: f64 = 2.0 * NOMINAL_SEGMENT_HOURS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfishTwoSegments<T> {
    /// Expected surplus at the end of segment 1.
    pub stage1_surplus: T,
    /// Expected surplus at the end of segment 2 minus `u`.
    pub profit: T,
    /// Gain over segment 2 alone, `Ṽ(w, t2) - w`.
    pub segment2_profit: T,
}

/// Large-`u` limits of both two-segment profits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plateaus<T> {
    pub honest: T,
    /// Segment-1 gain of the withholding miner.
    pub selfish_stage1: T,
    /// Segment-2 gain after the retarget, `(pλ2 b - c) t2`.
    pub selfish_stage2: T,
}

impl<T: Scalar> Plateaus<T> {
    pub fn selfish(&self) -> T {
        self.selfish_stage1 + self.selfish_stage2
    }
}

/// Both strategies over two segments, ready for sweeps over `u`.
#[derive(Debug, Clone)]
pub struct TwoSegmentModel<T> {
    pub plan: SegmentPlan<T>,
    pub stage1_intensity: Stage1Intensity,
    honest: MiningParams<T>,
    stage1: CharacteristicSolution<T>,
    stage2: MiningParams<T>,
}

impl<T: Scalar> TwoSegmentModel<T> {
    pub fn new(params: &MiningParams<T>, hashes_per_hour: T, stage1_intensity: Stage1Intensity) -> Result<Self> {
        let plan = plan_segments(params, hashes_per_hour)?;
        let stage1_params = match stage1_intensity {
            Stage1Intensity::Network => params.with_t(plan.t1)?,
            Stage1Intensity::Adjusted => params.with_t(plan.t1)?.with_lambda(plan.lambda1)?,
        };
        Ok(Self {
            plan,
            stage1_intensity,
            honest: params.with_t(T::lit(TWO_SEGMENT_HOURS))?,
            stage1: CharacteristicSolution::solve(&stage1_params)?,
            stage2: params.with_lambda(plan.lambda2)?.with_t(plan.t2)?,
        })
    }

    /// Protocol-following miner over both segments.
    pub fn honest_params(&self) -> &MiningParams<T> {
        &self.honest
    }

    /// Withholding miner on segment 1.
    pub fn stage1_params(&self) -> &MiningParams<T> {
        self.stage1.params()
    }

    /// Protocol-following miner on segment 2.
    pub fn stage2_params(&self) -> &MiningParams<T> {
        &self.stage2
    }

    pub fn honest_profit(&self, u: T) -> Result<T> {
        Ok(honest::value_exp_horizon(&self.honest, u)? - u)
    }

    pub fn selfish(&self, u: T) -> Result<SelfishTwoSegments<T>> {
        let w = self.stage1.value(u).max(T::zero());
        let end = honest::value_exp_horizon(&self.stage2, w)?;
        Ok(SelfishTwoSegments {
            stage1_surplus: w,
            profit: end - u,
            segment2_profit: end - w,
        })
    }

    pub fn plateaus(&self) -> Plateaus<T> {
        Plateaus {
            honest: self.honest.honest_drift() * self.honest.t(),
            selfish_stage1: self.stage1.c_const,
            selfish_stage2: self.stage2.honest_drift() * self.stage2.t(),
        }
    }
}

/// `Ṽ(u, 672) - u` at the unchanged intensity.
pub fn profit_honest_two_segments<T: Scalar>(params: &MiningParams<T>, u: T) -> Result<T> {
    Ok(honest::value_exp_horizon(&params.with_t(T::lit(TWO_SEGMENT_HOURS))?, u)? - u)
}

pub fn profit_selfish_two_segments<T: Scalar>(
    params: &MiningParams<T>,
    u: T,
    hashes_per_hour: T,
    stage1_intensity: Stage1Intensity,
) -> Result<SelfishTwoSegments<T>> {
    TwoSegmentModel::new(params, hashes_per_hour, stage1_intensity)?.selfish(u)
}

/// Largest electricity price at which withholding keeps a positive drift
/// on segment 1.
pub fn frontier_segment1<T: Scalar>(p: T, q: T, lambda: T, econ: &EconomicInputs<T>) -> T {
    selfish::net_profit_frontier_selfish(p, q, lambda, econ.reward(), econ.network_power())
}

/// Largest electricity price at which the protocol-following miner has a
/// positive drift on segment 2, after withholding with share `p` on
/// segment 1. Does not depend on `q`.
pub fn frontier_segment2<T: Scalar>(p: T, lambda: T, econ: &EconomicInputs<T>) -> T {
    let lambda2 = lambda / (T::one() - wasted_fraction(p));
    net_profit_frontier_honest(lambda2, econ.reward(), econ.network_power())
}

/// Simulated two-segment profit of the withholding miner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStageMc {
    /// Segment-1 terminal surplus.
    pub stage1: McEstimate,
    /// Segment-2 terminal surplus from the simulated mean of `stage1`.
    pub stage2: McEstimate,
    /// `stage2 - u`, with the segment-1 uncertainty carried through.
    pub profit: f64,
    pub profit_stderr: f64,
    /// Segment 2 started from each path's own segment-1 surplus, minus `u`.
    /// Its gap to the closed form measures the cost of chaining through
    /// the mean.
    pub pathwise: McEstimate,
}

impl TwoSegmentModel<f64> {
    /// Simulates the withholding miner from `u`: segment 1 from the empty
    /// state, then segment 2 from the segment-1 mean.
    pub fn simulate_selfish(&self, u: f64, n_paths: u64, seed: u64) -> Result<TwoStageMc> {
        let s1 = self.stage1_params().with_u(u)?;
        let stage1 = estimate_functional("two-segment-stage1", n_paths, seed, |d| {
            simulate_selfish(&s1, SelfishState::Empty, HorizonKind::Exponential, d).terminal_surplus
        })?;
        let w = stage1.mean;
        let s2 = self.stage2.with_u(w)?;
        let stage2 = estimate_functional("two-segment-stage2", n_paths, seed ^ STAGE2_SALT, |d| {
            simulate_honest(&s2, HorizonKind::Exponential, d).terminal_surplus
        })?;
        let slope = if w > 0.0 {
            honest::value_exp_horizon_du(&self.stage2, w)?
        } else {
            1.0
        };
        let profit_stderr = stage2.stderr.hypot(slope * stage1.stderr);
        let stage2_template = self.stage2;
        let pathwise = estimate_functional("two-segment-pathwise", n_paths, seed, |d: &mut StreamDraws| {
            let r1 = simulate_selfish(&s1, SelfishState::Empty, HorizonKind::Exponential, d).terminal_surplus;
            if r1 <= 0.0 {
                return -u;
            }
            let p2 = stage2_template.with_u(r1).expect("positive surplus is a valid start");
            simulate_honest(&p2, HorizonKind::Exponential, d).terminal_surplus - u
        })?;
        Ok(TwoStageMc {
            profit: stage2.mean - u,
            profit_stderr,
            stage1,
            stage2,
            pathwise,
        })
    }
}

const STAGE2_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
