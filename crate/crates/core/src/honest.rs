//! Protocol-following miner.
//!
//! The surplus is `R_s = u + b N_s - c s` where `N` is a Poisson process of
//! intensity `pλ` counting the miner's own blocks. Ruin can only happen at
//! the times `(u + b n) / c` when the surplus drifts down to zero between
//! rewards.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::orderstats::{self, Boundary};
use crate::params::{EconomicInputs, MiningParams};
use crate::rootfind::{lambert_w_principal, solve_bracketed};
use crate::scalar::{CompensatedSum, Scalar};

/// `e^{-s} - 1 + s`, accurate for small `s`.
fn exp_neg_remainder<T: Scalar>(s: T) -> T {
    if s.abs() < T::lit(1e-2) {
        // s²/2 - s³/6 + s⁴/24 - s⁵/120 + s⁶/720
        let mut term = s * s / T::lit(2.0);
        let mut acc = term;
        for k in 3..=8 {
            term = -term * s / T::from_count(k);
            acc = acc + term;
        }
        acc
    } else {
        (-s).exp_m1() + s
    }
}

/// Positive root `θ*` of `cθ + pλ(e^{-bθ} - 1) = 0`.
///
/// Infinite when `c = 0` (ruin is impossible once `u > 0`).
pub fn lundberg_theta<T: Scalar>(params: &MiningParams<T>) -> Result<T> {
    if !params.honest_net_profit() {
        return Err(Error::NetProfitViolated {
            drift: params.honest_drift().as_f64(),
        });
    }
    if params.c() == T::zero() {
        return Ok(T::infinity());
    }
    let income = params.honest_income_rate();
    let ratio = params.c() / income;
    let margin = params.honest_drift() / income;
    // In s = bθ: (e^{-s} - 1 + s)/s = 1 - c/(pλb), increasing in s.
    let h = |s: T| exp_neg_remainder(s) / s - margin;
    let lo = margin;
    let hi = T::one() / ratio;
    let tol = T::bracket_tol() * margin.min(T::one()) * T::lit(1e-3);
    let root = solve_bracketed(h, lo, hi, tol)?;
    Ok(root.value / params.b())
}

/// `ψ(u) = e^{-θ* u}`, or 1 without net profit.
pub fn ruin_prob_infinite<T: Scalar>(params: &MiningParams<T>, u: T) -> T {
    if u == T::zero() {
        return T::one();
    }
    match lundberg_theta(params) {
        Ok(theta) => (-theta * u).exp(),
        Err(_) => T::one(),
    }
}

/// `ln n!` for the Poisson weights.
struct LogFactorials<T> {
    table: Vec<T>,
}

impl<T: Scalar> LogFactorials<T> {
    fn new() -> Self {
        Self {
            table: vec![T::zero()],
        }
    }

    fn get(&mut self, n: usize) -> T {
        while self.table.len() <= n {
            let k = self.table.len();
            let last = *self.table.last().expect("nonempty");
            self.table.push(last + T::from_count(k).ln());
        }
        self.table[n]
    }
}

fn poisson_pmf<T: Scalar>(n: usize, mean: T, lf: &mut LogFactorials<T>) -> T {
    if mean == T::zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    (T::from_count(n) * mean.ln() - mean - lf.get(n)).exp()
}

/// Ruin probability before the fixed time `t_det`:
///
/// ```text
/// ψ(u, t) = Σ_{n : (u + bn)/c < t} u/(u + bn) · P[N_{(u+bn)/c} = n]
/// ```
///
/// A function of `u` with a downward jump wherever `(u + bn)/c` crosses
/// `t_det`. For `t_det = ∞` the series runs until its terms are negligible.
pub fn ruin_prob_finite<T: Scalar>(params: &MiningParams<T>, u: T, t_det: T) -> T {
    let (b, c) = (params.b(), params.c());
    let rate = params.p() * params.lambda();
    if u == T::zero() {
        return T::one();
    }
    if c == T::zero() {
        return T::zero();
    }
    let mut lf = LogFactorials::new();
    let mut acc = CompensatedSum::new();
    let tail = T::lit(1e-16);
    let mut previous = T::infinity();
    let mut n = 0usize;
    loop {
        let level = u + T::from_count(n) * b;
        let time = level / c;
        if !(time < t_det) {
            break;
        }
        let term = u / level * poisson_pmf(n, rate * time, &mut lf);
        acc.add(term);
        let mode_passed = T::from_count(n) > rate * time;
        if mode_passed && term < previous && term <= tail * acc.value() {
            break;
        }
        if n > 10_000_000 {
            log::warn!("ruin series truncated at {n} terms without convergence");
            break;
        }
        previous = term;
        n += 1;
    }
    acc.value().min(T::one())
}

/// Negative root `ρ*` of `-cρ + pλ(e^{bρ} - 1) = 1/t` with `t = params.t()`.
///
/// `-∞` when `c = 0`. At `t = ∞` this is `-θ*` (0 without net profit).
pub fn exp_horizon_rho<T: Scalar>(params: &MiningParams<T>) -> Result<T> {
    let t = params.t();
    let b = params.b();
    let c = params.c();
    let rate = params.p() * params.lambda();
    if c == T::zero() {
        return Ok(T::neg_infinity());
    }
    if t.is_infinite() {
        return Ok(match lundberg_theta(params) {
            Ok(theta) => -theta,
            Err(_) => T::zero(),
        });
    }
    // In σ = bρ, scaled by t: -(ct/b)σ + pλt(e^σ - 1) - 1, positive at
    // σ = -(pλt + 1) b/(ct) and -1 at σ = 0.
    let slope = c * t / b;
    let mass = rate * t;
    let h = |s: T| -slope * s + mass * s.exp_m1() - T::one();
    let lo = -(mass + T::one()) / slope;
    let root = solve_bracketed(h, lo, T::zero(), T::bracket_tol() * T::lit(1e-3))?;
    let rho = root.value / b;
    if let Ok(w) = exp_horizon_rho_lambert(params) {
        let gap = (w - rho).abs() / rho.abs();
        if gap > T::lit(1e3) * T::bracket_tol() {
            log::warn!("Lambert-W form of the horizon exponent differs by {gap:e} (relative)");
        }
    }
    Ok(rho)
}

/// The same exponent through the principal branch of Lambert W:
/// `ρ* = -A - W₀(x)/b` with `A = (pλt + 1)/(ct)` and
/// `x = -(pλb/c) e^{-bA}`.
pub fn exp_horizon_rho_lambert<T: Scalar>(params: &MiningParams<T>) -> Result<T> {
    let t = params.t();
    let b = params.b();
    let c = params.c();
    let rate = params.p() * params.lambda();
    if c == T::zero() || t.is_infinite() {
        return Err(invalid("t", "Lambert form needs c > 0 and a finite horizon"));
    }
    let a = (rate * t + T::one()) / (c * t);
    let x = -(rate * b / c) * (-b * a).exp();
    let w = lambert_w_principal(x)?;
    Ok(-a - w / b)
}

/// Probability of ruin before an independent exponential horizon of mean
/// `params.t()`: `ψ̂(u, t) = e^{ρ* u}`.
pub fn ruin_prob_exp_horizon<T: Scalar>(params: &MiningParams<T>, u: T) -> Result<T> {
    if u == T::zero() {
        return Ok(T::one());
    }
    Ok((exp_horizon_rho(params)? * u).exp())
}

/// `∂ψ̂/∂u`.
pub fn ruin_prob_exp_horizon_du<T: Scalar>(params: &MiningParams<T>, u: T) -> Result<T> {
    let rho = exp_horizon_rho(params)?;
    Ok(rho * (rho * u).exp())
}

/// Expected surplus at an exponential horizon, frozen at zero on ruin:
/// `Ṽ(u, t) = u + (pλb - c) t (1 - e^{ρ* u})`.
pub fn value_exp_horizon<T: Scalar>(params: &MiningParams<T>, u: T) -> Result<T> {
    let t = params.t();
    if t.is_infinite() {
        return Err(invalid("t", "expected surplus needs a finite horizon"));
    }
    if u == T::zero() {
        return Ok(T::zero());
    }
    let rho = exp_horizon_rho(params)?;
    Ok(u - params.honest_drift() * t * (rho * u).exp_m1())
}

/// `∂Ṽ/∂u`.
pub fn value_exp_horizon_du<T: Scalar>(params: &MiningParams<T>, u: T) -> Result<T> {
    let rho = exp_horizon_rho(params)?;
    Ok(T::one() - params.honest_drift() * params.t() * rho * (rho * u).exp())
}

/// Largest expected reward count `pλ t_det` accepted by
/// [`value_deterministic`].
pub const DEFAULT_EXPECTED_COUNT_CAP: usize = orderstats::DEFAULT_DEGREE_CAP;

/// Expected surplus at the fixed time `t_det`, frozen at zero on ruin:
///
/// ```text
/// V(u, t) = Σ_n P[N_t = n] (u + bn - ct)₊ P(U_{k:n} <= v_k, k = 1..n)
/// ```
///
/// with `v_k = (u + (k-1)b)/(ct) ∧ 1`.
pub fn value_deterministic<T: Scalar>(params: &MiningParams<T>, u: T, t_det: T) -> Result<T> {
    value_deterministic_capped(params, u, t_det, DEFAULT_EXPECTED_COUNT_CAP)
}

pub fn value_deterministic_capped<T: Scalar>(
    params: &MiningParams<T>,
    u: T,
    t_det: T,
    cap: usize,
) -> Result<T> {
    if !(t_det > T::zero() && t_det.is_finite()) {
        return Err(invalid("t", format!("deterministic horizon must be finite and > 0, got {t_det}")));
    }
    let (b, c) = (params.b(), params.c());
    let mean = params.p() * params.lambda() * t_det;
    if mean > T::from_count(cap) {
        return Err(Error::StabilityCapExceeded {
            degree: mean.ceil().to_usize().unwrap_or(usize::MAX),
            cap,
        });
    }
    if u == T::zero() {
        return Ok(T::zero());
    }
    if c == T::zero() {
        return Ok(u + b * mean);
    }

    // Truncate past the mode once the pmf is below the tail threshold; the
    // tail beyond is then dominated by a geometric series.
    let mut lf = LogFactorials::new();
    let tail = T::poisson_tail() * T::lit(1e-2);
    let mut n_hi = 0usize;
    while T::from_count(n_hi) <= mean || poisson_pmf(n_hi, mean, &mut lf) > tail {
        n_hi += 1;
    }

    let boundary = Boundary::surplus(u, b, c, t_det, n_hi)?;
    let survive = orderstats::joint_orderstat_prefix_probs(&boundary, usize::MAX)?;
    let drain = c * t_det;
    let mut acc = CompensatedSum::new();
    for (n, &a) in survive.iter().enumerate() {
        let terminal = u + T::from_count(n) * b - drain;
        if terminal > T::zero() {
            acc.add(poisson_pmf(n, mean, &mut lf) * terminal * a);
        }
    }
    Ok(acc.value())
}

/// Every honest-miner quantity at one `(u, t_det)`; the exponential
/// horizon mean is `params.t()`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HonestReport<T> {
    /// `None` without net profit.
    pub theta_star: Option<T>,
    pub rho_star: T,
    pub psi_inf: T,
    pub psi_finite: T,
    pub psi_exp: T,
    pub v_det: T,
    pub v_exp: T,
}

impl<T: Scalar> HonestReport<T> {
    pub fn compute(params: &MiningParams<T>, u: T, t_det: T) -> Result<Self> {
        Ok(Self {
            theta_star: lundberg_theta(params).ok(),
            rho_star: exp_horizon_rho(params)?,
            psi_inf: ruin_prob_infinite(params, u),
            psi_finite: ruin_prob_finite(params, u, t_det),
            psi_exp: ruin_prob_exp_horizon(params, u)?,
            v_det: value_deterministic(params, u, t_det)?,
            v_exp: value_exp_horizon(params, u)?,
        })
    }
}

/// A pool of identical members, each bringing `member_share` of the network
/// hashrate and `member_capital` USD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pool<T> {
    pub members: usize,
    pub member_share: T,
    pub member_capital: T,
}

impl<T: Scalar> Pool<T> {
    /// Members with 1% of the hashrate and 10 000 USD each.
    pub fn standard(members: usize) -> Self {
        Self {
            members,
            member_share: T::lit(0.01),
            member_capital: T::lit(10_000.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoolMetrics<T> {
    pub psi_exp: T,
    pub profit_per_member: T,
}

/// Ruin probability of the pool and expected profit per member at an
/// exponential horizon of mean `t`.
pub fn pool_metrics<T: Scalar>(
    econ: &EconomicInputs<T>,
    lambda: T,
    pool: &Pool<T>,
    t: T,
) -> Result<PoolMetrics<T>> {
    if pool.members == 0 {
        return Err(invalid("members", "a pool needs at least one member"));
    }
    let share = T::from_count(pool.members) * pool.member_share;
    if !(share > T::zero() && share < T::one()) {
        return Err(invalid(
            "members",
            format!("combined hashshare {share} must lie in (0, 1)"),
        ));
    }
    let capital = T::from_count(pool.members) * pool.member_capital;
    let pooled = econ.with_hashshare(share)?;
    let params = MiningParams::from_economics(&pooled, lambda, T::one(), capital, t)?;
    Ok(PoolMetrics {
        psi_exp: ruin_prob_exp_horizon(&params, capital)?,
        profit_per_member: (value_exp_horizon(&params, capital)? - capital)
            / T::from_count(pool.members),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{EconomicInputs, BITCOIN_BLOCKS_PER_HOUR, QUOTED_REWARD_2020};

    fn base(electricity: f64, t: f64) -> MiningParams<f64> {
        let econ = EconomicInputs::january_2020()
            .with_electricity_price(electricity)
            .unwrap()
            .with_reward_override(Some(QUOTED_REWARD_2020))
            .unwrap();
        MiningParams::from_economics(&econ, BITCOIN_BLOCKS_PER_HOUR, 1.0, 0.0, t).unwrap()
    }

    /// Grid scan followed by bisection to the last bit.
    fn scan_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
        let h = (hi - lo) / steps as f64;
        let mut a = lo;
        for i in 1..=steps {
            let x = lo + h * i as f64;
            if f(a) * f(x) <= 0.0 {
                let (mut l, mut r) = (a, x);
                for _ in 0..200 {
                    let m = 0.5 * (l + r);
                    if m <= l || m >= r {
                        break;
                    }
                    if f(l) * f(m) <= 0.0 {
                        r = m;
                    } else {
                        l = m;
                    }
                }
                return 0.5 * (l + r);
            }
            a = x;
        }
        panic!("no sign change found");
    }

    #[test]
    fn theta_matches_grid_scan() {
        let p = base(0.06, 6.0);
        let theta = lundberg_theta(&p).unwrap();
        let (b, c, rate) = (p.b(), p.c(), p.p() * p.lambda());
        // Skip the trivial root at 0 by starting the scan above it.
        let oracle = scan_root(|x| c * x + rate * ((-b * x).exp() - 1.0), 1e-9, 1e-4, 100_000);
        assert!((theta - oracle).abs() <= 1e-12 * oracle, "{theta} vs {oracle}");
        assert!(theta > 0.0);
    }

    #[test]
    fn theta_vanishes_at_the_frontier() {
        let p = base(0.06, 6.0);
        let near = p.with_c(p.honest_income_rate() * (1.0 - 1e-8)).unwrap();
        let theta = lundberg_theta(&near).unwrap();
        assert!(theta > 0.0 && theta < 1e-6);
        // Two-term expansion θ ≈ 2(1 - c/(pλb))/b.
        assert!((theta * near.b() / 2e-8 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn theta_errors_without_net_profit() {
        let p = base(0.08, 6.0);
        assert!(matches!(lundberg_theta(&p), Err(Error::NetProfitViolated { .. })));
        assert_eq!(ruin_prob_infinite(&p, 50_000.0), 1.0);
    }

    #[test]
    fn infinite_horizon_limits() {
        let p = base(0.06, 6.0);
        assert_eq!(ruin_prob_infinite(&p, 0.0), 1.0);
        let theta = lundberg_theta(&p).unwrap();
        assert!(ruin_prob_infinite(&p, 26.0 / theta) < 1e-10);
    }

    #[test]
    fn finite_ruin_empty_before_fuel_runs_out() {
        let p = base(0.06, 6.0);
        let u = 1_000_000.0;
        assert!(6.0 < u / p.c());
        assert_eq!(ruin_prob_finite(&p, u, 6.0), 0.0);
    }

    #[test]
    fn finite_ruin_converges_to_infinite_horizon() {
        let p = base(0.06, 6.0);
        for u in [5_000.0, 41_000.0, 200_000.0] {
            let inf = ruin_prob_infinite(&p, u);
            assert!((ruin_prob_finite(&p, u, f64::INFINITY) - inf).abs() < 1e-6);
            assert!((ruin_prob_finite(&p, u, 1e6) - inf).abs() < 1e-6);
        }
    }

    #[test]
    fn finite_ruin_jumps_where_a_candidate_time_crosses_the_horizon() {
        let p = base(0.06, 6.0);
        let t = 6.0;
        let (b, c) = (p.b(), p.c());
        // u = ct - bn is where candidate time n leaves the window.
        let u_jump = c * t - b;
        assert!(u_jump > 0.0);
        let below = ruin_prob_finite(&p, u_jump * (1.0 - 1e-9), t);
        let above = ruin_prob_finite(&p, u_jump * (1.0 + 1e-9), t);
        let level = u_jump + b;
        let rate = p.p() * p.lambda();
        let lost = u_jump / level * (-rate * t).exp() * rate * t;
        assert!((below - above - lost).abs() < 1e-6, "{below} {above} {lost}");
        // Between jumps the function is continuous.
        let a = ruin_prob_finite(&p, 0.5 * u_jump, t);
        let a2 = ruin_prob_finite(&p, 0.5 * u_jump + 1e-3, t);
        assert!((a - a2).abs() < 1e-6);
    }

    #[test]
    fn rho_residual_and_lambert_agree() {
        let p = base(0.06, 6.0);
        let rho = exp_horizon_rho(&p).unwrap();
        assert!(rho < 0.0);
        let (b, c, rate, t) = (p.b(), p.c(), p.p() * p.lambda(), p.t());
        let lhs = -c * rho + rate * (b * rho).exp_m1();
        assert!((lhs - 1.0 / t).abs() <= 1e-12 * (1.0 / t));
        let w = exp_horizon_rho_lambert(&p).unwrap();
        assert!((w - rho).abs() <= 1e-10 * rho.abs(), "{w} vs {rho}");
    }

    #[test]
    fn rho_lambert_agrees_across_horizons_and_prices() {
        for &pi in &[0.02, 0.06, 0.09, 0.2] {
            for &t in &[0.5, 6.0, 24.0, 336.0, 8766.0] {
                let p = base(pi, t);
                let rho = exp_horizon_rho(&p).unwrap();
                let w = exp_horizon_rho_lambert(&p).unwrap();
                assert!((w - rho).abs() <= 1e-9 * rho.abs(), "π={pi} t={t}: {w} vs {rho}");
            }
        }
    }

    #[test]
    fn rho_decreases_as_discounting_grows() {
        let mut last = f64::NEG_INFINITY;
        // Increasing t means decreasing 1/t, so ρ* must increase.
        for &t in &[0.1, 1.0, 6.0, 24.0, 168.0, 336.0, 1e4, 1e6] {
            let rho = exp_horizon_rho(&base(0.06, t)).unwrap();
            assert!(rho > last);
            last = rho;
        }
    }

    #[test]
    fn rho_approaches_minus_theta_at_the_implicit_rate() {
        let p = base(0.06, 1e9);
        let theta = lundberg_theta(&p).unwrap();
        let rho = exp_horizon_rho(&p).unwrap();
        // First order in 1/t: ρ* + θ* ≈ (1/t) / (pλb e^{-bθ*} - c).
        let slope = p.p() * p.lambda() * p.b() * (-p.b() * theta).exp() - p.c();
        let predicted = 1.0 / p.t() / slope;
        assert!(((rho + theta) - predicted).abs() < 1e-3 * predicted.abs());
        assert_eq!(exp_horizon_rho(&p.with_t(f64::INFINITY).unwrap()).unwrap(), -theta);
    }

    #[test]
    fn exp_horizon_ruin_bounds() {
        let p = base(0.06, 6.0);
        assert_eq!(ruin_prob_exp_horizon(&p, 0.0).unwrap(), 1.0);
        for k in 1..300 {
            let u = 1_000.0 * k as f64;
            let hat = ruin_prob_exp_horizon(&p, u).unwrap();
            assert!(hat <= ruin_prob_infinite(&p, u));
            assert!((0.0..=1.0).contains(&hat));
        }
    }

    #[test]
    fn exp_horizon_ruin_solves_homogeneous_equation() {
        let p = base(0.06, 6.0);
        let (b, c, rate, t) = (p.b(), p.c(), p.p() * p.lambda(), p.t());
        for k in 0..50 {
            let u = 20.0 * b * (k as f64 + 0.37) / 50.0;
            let f = ruin_prob_exp_horizon(&p, u).unwrap();
            let df = ruin_prob_exp_horizon_du(&p, u).unwrap();
            let shifted = ruin_prob_exp_horizon(&p, u + b).unwrap();
            let terms = [c * df, (rate + 1.0 / t) * f, -rate * shifted];
            let scale = terms.iter().map(|x| x.abs()).fold(0.0, f64::max);
            assert!(terms.iter().sum::<f64>().abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn exp_horizon_value_solves_advanced_equation() {
        let p = base(0.06, 6.0);
        let (b, c, rate, t) = (p.b(), p.c(), p.p() * p.lambda(), p.t());
        for k in 0..50 {
            let u = 20.0 * b * (k as f64 + 0.61) / 50.0;
            let v = value_exp_horizon(&p, u).unwrap();
            let dv = value_exp_horizon_du(&p, u).unwrap();
            let shifted = value_exp_horizon(&p, u + b).unwrap();
            let terms = [c * dv, (1.0 / t + rate) * v, -rate * shifted, -u / t];
            let scale = terms.iter().map(|x| x.abs()).fold(0.0, f64::max);
            assert!(terms.iter().sum::<f64>().abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn exp_horizon_value_limits() {
        let p = base(0.06, 6.0);
        assert_eq!(value_exp_horizon(&p, 0.0).unwrap(), 0.0);
        let theta = lundberg_theta(&p).unwrap();
        let u = 31.0 / theta;
        let v = value_exp_horizon(&p, u).unwrap();
        let plateau = u + p.honest_drift() * p.t();
        assert!((v - plateau).abs() / plateau < 1e-8);
        let top = u + p.honest_income_rate() * p.t();
        assert!(v >= 0.0 && v <= top);
    }

    #[test]
    fn zero_cost_has_no_ruin() {
        let p = base(0.06, 6.0).with_c(0.0).unwrap();
        let u = 11_000.0;
        assert_eq!(ruin_prob_exp_horizon(&p, u).unwrap(), 0.0);
        assert_eq!(ruin_prob_finite(&p, u, 6.0), 0.0);
        let expect = u + p.b() * p.p() * p.lambda() * 6.0;
        assert!((value_exp_horizon(&p, u).unwrap() - expect).abs() < 1e-9 * expect);
        assert!((value_deterministic(&p, u, 6.0).unwrap() - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn deterministic_value_large_wealth_limit() {
        let p = base(0.06, 6.0);
        let theta = lundberg_theta(&p).unwrap();
        let u = 26.0 / theta;
        let v = value_deterministic(&p, u, 6.0).unwrap();
        let limit = u + p.honest_drift() * 6.0;
        assert!((v - limit).abs() <= 1e-4 * v.abs());
    }

    #[test]
    fn deterministic_value_small_horizon_by_hand() {
        // At most one reward can matter when ct < u + b: V sums n = 0 and the
        // n >= 1 terms whose boundary is all ones except v_1 = u/(ct).
        let p = base(0.06, 6.0);
        let (b, c, rate) = (p.b(), p.c(), p.p() * p.lambda());
        let t = 0.5;
        let u = 0.6 * c * t;
        assert!(u + b > c * t);
        let v1: f64 = u / (c * t);
        let mut oracle = 0.0;
        let mut pmf = (-rate * t).exp();
        for n in 1..60 {
            pmf *= rate * t / n as f64;
            // P(U_{1:n} <= v1) = 1 - (1 - v1)^n
            oracle += pmf * (u + b * n as f64 - c * t) * (1.0 - (1.0 - v1).powi(n));
        }
        let v = value_deterministic(&p, u, t).unwrap();
        assert!((v - oracle).abs() < 1e-9 * oracle, "{v} vs {oracle}");
    }

    #[test]
    fn deterministic_value_orders() {
        let p = base(0.06, 6.0);
        for k in 1..=30 {
            let u = 10_000.0 * k as f64;
            let v = value_deterministic(&p, u, 6.0).unwrap();
            let vt = value_exp_horizon(&p, u).unwrap();
            assert!(vt <= v + 1e-9 * v);
            assert!(v <= u + p.honest_drift() * 6.0 + 1e-9 * v);
        }
    }

    #[test]
    fn deterministic_value_cap() {
        let p = base(0.06, 6.0);
        assert!(matches!(
            value_deterministic(&p, 11_000.0, 400.0),
            Err(Error::StabilityCapExceeded { cap: 200, .. })
        ));
        assert_eq!(value_deterministic(&p, 0.0, 6.0).unwrap(), 0.0);
    }

    #[test]
    fn deterministic_and_exponential_ruin_gap_is_logged() {
        let p = base(0.06, 6.0);
        let gaps: Vec<f64> = (0..=300)
            .map(|k| {
                let u = 1_000.0 * k as f64;
                (ruin_prob_finite(&p, u, 6.0) - ruin_prob_exp_horizon(&p, u).unwrap()).abs()
            })
            .collect();
        let worst = gaps.iter().cloned().fold(0.0, f64::max);
        if worst > 0.05 {
            log::warn!("deterministic vs exponential horizon ruin gap {worst}");
        }
        assert_eq!(gaps[0], 0.0);
        assert!(gaps.iter().all(|g| g.is_finite() && *g < 1.0));
    }

    #[test]
    fn report_bundles_everything() {
        let p = base(0.06, 6.0);
        let r = HonestReport::compute(&p, 11_000.0, 6.0).unwrap();
        assert!(r.theta_star.unwrap() > 0.0);
        assert!(r.rho_star < 0.0);
        for x in [r.psi_inf, r.psi_finite, r.psi_exp] {
            assert!((0.0..=1.0).contains(&x));
        }
        assert!(r.v_exp >= 0.0 && r.v_exp <= 11_000.0 + p.honest_income_rate() * 6.0);
    }

    #[test]
    fn pooling() {
        let econ = EconomicInputs::january_2020()
            .with_reward_override(Some(QUOTED_REWARD_2020))
            .unwrap();
        let solo = pool_metrics(&econ, 6.0, &Pool::standard(1), 336.0).unwrap();
        let single = {
            let e = econ.with_hashshare(0.01).unwrap();
            let p = MiningParams::from_economics(&e, 6.0, 1.0, 10_000.0, 336.0).unwrap();
            value_exp_horizon(&p, 10_000.0).unwrap() - 10_000.0
        };
        assert!((solo.profit_per_member - single).abs() < 1e-9 * single.abs());
        let big = pool_metrics(&econ, 6.0, &Pool::standard(100 - 1), 336.0).unwrap();
        assert!(big.profit_per_member > solo.profit_per_member);
        let day_solo = pool_metrics(&econ, 6.0, &Pool::standard(1), 24.0).unwrap();
        let day_ten = pool_metrics(&econ, 6.0, &Pool::standard(10), 24.0).unwrap();
        assert!(day_ten.psi_exp < day_solo.psi_exp);
        assert!(pool_metrics(&econ, 6.0, &Pool::standard(0), 24.0).is_err());
        assert!(pool_metrics(&econ, 6.0, &Pool::standard(100), 24.0).is_err());
    }

    #[test]
    fn f32_closed_forms() {
        let p: MiningParams<f32> = base(0.06, 6.0).cast();
        let p64 = base(0.06, 6.0);
        let v32 = value_exp_horizon(&p, 11_000.0f32).unwrap() as f64;
        let v64 = value_exp_horizon(&p64, 11_000.0).unwrap();
        assert!((v32 - v64).abs() < 1e-3 * v64);
        let r32 = ruin_prob_exp_horizon(&p, 11_000.0f32).unwrap() as f64;
        assert!((r32 - ruin_prob_exp_horizon(&p64, 11_000.0).unwrap()).abs() < 1e-4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn lundberg_residual(pi in 0.005f64..0.064, p in 0.01f64..0.49) {
                let econ = EconomicInputs::january_2020()
                    .with_electricity_price(pi).unwrap()
                    .with_hashshare(p).unwrap();
                let params = MiningParams::from_economics(&econ, 6.0, 1.0, 0.0, 6.0).unwrap();
                let theta = lundberg_theta(&params).unwrap();
                let (b, c, rate) = (params.b(), params.c(), params.p() * params.lambda());
                let r = c * theta + rate * (-b * theta).exp_m1();
                prop_assert!(r.abs() <= 1e-12 * c * theta);
            }

            #[test]
            fn exp_ruin_below_infinite(pi in 0.005f64..0.064, t in 0.5f64..2000.0, u in 0.0f64..1e6) {
                let params = base(pi, t);
                prop_assert!(ruin_prob_exp_horizon(&params, u).unwrap() <= ruin_prob_infinite(&params, u) + 1e-15);
            }
        }
    }
}
