//! Block withholding with a two-block buffer.
//!
//! The miner keeps a freshly found block private. A second private block is
//! published together with the first (two rewards). If the rest of the
//! network finds a block first, the private block is published and a fork
//! opens; the miner's next block or the network's choice of branch (with
//! probability `q`) settles it.
//!
//! With an exponential horizon of mean `t` the expected surplus from the
//! empty state is
//!
//! ```text
//! V₀(u) = A1 e^{ρ1 u} + e^{ρ2 u} (A2 cos ρ3 u + A3 sin ρ3 u) + u + C
//! ```
//!
//! where `ρ1` and `ρ2 ± iρ3` are the roots with negative real part of
//! `(D1 ρ + D2) e^{2ρb} + D3 e^{ρb} = D4 ρ³ + D5 ρ² + D6 ρ + D7`, and the
//! ruin probability has the same exponential part without `u + C`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::MiningParams;
use crate::rootfind::{solve_bracketed, CharacteristicEquation, RootPair};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfishState {
    /// No private block.
    Empty,
    /// One private block.
    One,
    /// Published private block competing with a network block.
    Fork,
}

impl SelfishState {
    pub const ALL: [SelfishState; 3] = [SelfishState::Empty, SelfishState::One, SelfishState::Fork];
}

impl fmt::Display for SelfishState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelfishState::Empty => "empty",
            SelfishState::One => "one",
            SelfishState::Fork => "fork",
        })
    }
}

impl FromStr for SelfishState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "empty" | "0" => Ok(SelfishState::Empty),
            "one" | "1" => Ok(SelfishState::One),
            "fork" | "0*" => Ok(SelfishState::Fork),
            other => Err(invalid("state", format!("unknown state `{other}`"))),
        }
    }
}

/// One network block epoch. `own_block` is whether the miner found it;
/// `own_branch` whether the network extends the miner's side of a fork
/// (only read in [`SelfishState::Fork`] when `own_block` is false).
///
/// Returns the next state and the number of rewards collected.
pub fn step_chain(z: SelfishState, own_block: bool, own_branch: bool) -> (SelfishState, u8) {
    use SelfishState::*;
    match (z, own_block) {
        (Empty, true) => (One, 0),
        (Empty, false) => (Empty, 0),
        (One, true) => (Empty, 2),
        (One, false) => (Fork, 0),
        (Fork, true) => (Empty, 2),
        (Fork, false) => (Empty, u8::from(own_branch)),
    }
}

/// Stationary law of the chain, ordered as [`SelfishState::ALL`].
pub fn stationary_distribution<T: Scalar>(p: T) -> [T; 3] {
    let norm = T::one() + T::lit(2.0) * p - p * p;
    [T::one() / norm, p / norm, p * (T::one() - p) / norm]
}

/// Distribution of the number of rewards per network block under
/// stationarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RewardPmf<T> {
    pub p0: T,
    pub p1: T,
    pub p2: T,
}

impl<T: Scalar> RewardPmf<T> {
    pub fn mean(&self) -> T {
        self.p1 + T::lit(2.0) * self.p2
    }
}

pub fn reward_pmf<T: Scalar>(p: T, q: T) -> RewardPmf<T> {
    let one = T::one();
    let norm = one + T::lit(2.0) * p - p * p;
    let p1 = p * q * (one - p) * (one - p) / norm;
    let p2 = (p * p + p * p * (one - p)) / norm;
    RewardPmf {
        p0: one - p1 - p2,
        p1,
        p2,
    }
}

/// `γ = bλ(qp(1-p)² + 4p² - 2p³)/(1 + 2p - p²) - c`.
pub fn net_profit_rate_selfish<T: Scalar>(params: &MiningParams<T>) -> T {
    let (p, q) = (params.p(), params.q());
    let one = T::one();
    let norm = one + T::lit(2.0) * p - p * p;
    let blocks = q * p * (one - p) * (one - p) + T::lit(4.0) * p * p - T::lit(2.0) * p * p * p;
    params.b() * params.lambda() * blocks / norm - params.c()
}

/// Electricity price at which `γ = 0`, for a miner holding share `p` of a
/// network drawing `network_power` kW.
pub fn net_profit_frontier_selfish<T: Scalar>(p: T, q: T, lambda: T, b: T, network_power: T) -> T {
    b * lambda * reward_pmf(p, q).mean() / (p * network_power)
}

/// Adjustment coefficient when the per-epoch rewards are treated as iid
/// with law [`reward_pmf`]: the positive root of
/// `cθ + λ(p0 + p1 e^{-bθ} + p2 e^{-2bθ} - 1) = 0`.
pub fn iid_lundberg_theta<T: Scalar>(params: &MiningParams<T>) -> Result<T> {
    let gamma = net_profit_rate_selfish(params);
    if !(gamma > T::zero()) {
        return Err(Error::NetProfitViolated {
            drift: gamma.as_f64(),
        });
    }
    if params.c() == T::zero() {
        return Ok(T::infinity());
    }
    let pmf = reward_pmf(params.p(), params.q());
    let scale = params.lambda() * params.b();
    let k = params.c() / scale;
    let margin = gamma / scale;
    let two = T::lit(2.0);
    let rem = |s: T| {
        if s.abs() < T::lit(1e-2) {
            let mut term = s * s / two;
            let mut acc = term;
            for j in 3..=8 {
                term = -term * s / T::from_count(j);
                acc = acc + term;
            }
            acc
        } else {
            (-s).exp_m1() + s
        }
    };
    // f(s)/s with s = bθ, written so that the linear terms cancel exactly.
    let h = |s: T| -margin + pmf.p1 * rem(s) / s + pmf.p2 * rem(two * s) / s;
    let lo = margin / pmf.mean();
    let hi = lo + two * (pmf.p1 + pmf.p2) / k;
    let tol = T::bracket_tol() * margin.min(T::one()) * T::lit(1e-3);
    Ok(solve_bracketed(h, lo, hi, tol)?.value / params.b())
}

/// `e^{-θ u}` with the iid adjustment coefficient; 1 without net profit.
pub fn ruin_selfish_iid<T: Scalar>(params: &MiningParams<T>, u: T) -> T {
    if u == T::zero() {
        return T::one();
    }
    match iid_lundberg_theta(params) {
        Ok(theta) => (-theta * u).exp(),
        Err(_) => T::one(),
    }
}

/// `C` and `D1..D7` of the characteristic equation, for horizon mean
/// `params.t()`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicConstants<T> {
    pub c_const: T,
    pub d: [T; 7],
}

pub fn characteristic_constants<T: Scalar>(params: &MiningParams<T>) -> Result<CharacteristicConstants<T>> {
    let t = params.t();
    if !t.is_finite() {
        return Err(invalid("t", "the selfish closed forms need a finite horizon"));
    }
    let (lam, p, q, b, c) = (params.lambda(), params.p(), params.q(), params.b(), params.c());
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let np = one - p;
    let lt = lam * t;
    let base = lam * lam * np * p;

    let d1 = p * c / np;
    let d2 = p * (one + t * (two - p) * lam) / (t * np);
    let d3 = np * lam * q;
    let d4 = c * c * c / base;
    let d5 = c * c * (three + lt * (p + two)) / (base * t);
    let d6 = (three + lt * (two * p + one)) * c * (lt + one) / (t * t * base);
    let d7 = (one
        + lt * (p + two)
        + lt * lt * (two * p + one)
        + lt * lt * lt * p * (p * (one - q) * (two - p) + q))
        / (base * t * t * t);

    let den = lt * lt * (p * p - two * p - one) - (p + two) * lt - one;
    let c_const = -(lam * lam * t * t * t
        * (lam * p * b * ((q - two) * p * p + (T::lit(4.0) - two * q) * p + q)
            + c * (p * p - two * p - one)))
        / den
        - (lam * t * t * (two * b * p * p * lam - c * (p + two)) - c * t) / den;

    Ok(CharacteristicConstants {
        c_const,
        d: [d1, d2, d3, d4, d5, d6, d7],
    })
}

/// `Σ Re(w_i e^{z_i u}) + slope·u + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ExpForm<T> {
    terms: [(Complex<T>, Complex<T>); 3],
    slope: T,
    intercept: T,
}

impl<T: Scalar> ExpForm<T> {
    /// `k`-th derivative at `u`.
    fn eval(&self, u: T, k: u32) -> T {
        let ki = k as i32;
        let exp: T = self
            .terms
            .iter()
            .map(|&(w, z)| (w * z.powi(ki) * (z * u).exp()).re)
            .sum();
        let lin = match k {
            0 => self.slope * u + self.intercept,
            1 => self.slope,
            _ => T::zero(),
        };
        exp + lin
    }
}

/// Result of a 3×3 solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearSolution<T> {
    pub x: [T; 3],
    /// ∞-norm condition number of the row-equilibrated matrix.
    pub condition: T,
    /// `max_i |(Mx - y)_i| / max_i |y_i|` after equilibration.
    pub residual: T,
}

/// Gaussian elimination with partial pivoting after scaling each row to
/// unit ∞-norm.
pub fn solve_3x3<T: Scalar>(m: [[T; 3]; 3], y: [T; 3]) -> Result<LinearSolution<T>> {
    let mut a = m;
    let mut rhs = y;
    for i in 0..3 {
        let s = a[i].iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        if s == T::zero() || !s.is_finite() {
            return Err(Error::SingularSystem { pivot: s.as_f64() });
        }
        for v in a[i].iter_mut() {
            *v = *v / s;
        }
        rhs[i] = rhs[i] / s;
    }
    let scaled = a;
    let scaled_rhs = rhs;

    let elim = |a: &[[T; 3]; 3], rhs: [T; 3]| -> Result<[T; 3]> {
        let mut a = *a;
        let mut r = rhs;
        for col in 0..3 {
            let piv = (col..3)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("finite"))
                .expect("nonempty");
            if a[piv][col].abs() <= T::epsilon() * T::lit(16.0) {
                return Err(Error::SingularSystem {
                    pivot: a[piv][col].as_f64(),
                });
            }
            a.swap(col, piv);
            r.swap(col, piv);
            for row in col + 1..3 {
                let f = a[row][col] / a[col][col];
                for k in col..3 {
                    a[row][k] = a[row][k] - f * a[col][k];
                }
                r[row] = r[row] - f * r[col];
            }
        }
        let mut x = [T::zero(); 3];
        for i in (0..3).rev() {
            let mut s = r[i];
            for k in i + 1..3 {
                s = s - a[i][k] * x[k];
            }
            x[i] = s / a[i][i];
        }
        Ok(x)
    };

    let x = elim(&scaled, scaled_rhs)?;
    let mut inv_norm = T::zero();
    let mut inv_rows = [T::zero(); 3];
    for j in 0..3 {
        let mut e = [T::zero(); 3];
        e[j] = T::one();
        let col = elim(&scaled, e)?;
        for i in 0..3 {
            inv_rows[i] = inv_rows[i] + col[i].abs();
        }
    }
    for v in inv_rows {
        inv_norm = inv_norm.max(v);
    }
    let m_norm = scaled
        .iter()
        .map(|row| row.iter().fold(T::zero(), |acc, v| acc + v.abs()))
        .fold(T::zero(), T::max);
    let y_norm = scaled_rhs.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let mut residual = T::zero();
    for i in 0..3 {
        let r = scaled[i][0] * x[0] + scaled[i][1] * x[1] + scaled[i][2] * x[2] - scaled_rhs[i];
        residual = residual.max(r.abs());
    }
    Ok(LinearSolution {
        x,
        condition: m_norm * inv_norm,
        residual: if y_norm > T::zero() { residual / y_norm } else { residual },
    })
}

/// Everything needed to evaluate the selfish value and ruin functions at a
/// fixed parameter set. Immutable and cheap to share across threads.
///
/// Normally the two roots besides `ρ1` form the pair `ρ2 ± iρ3` with
/// `ρ3 > 0`. For a miner holding nearly all of the hashrate they can both be
/// real; then `oscillating` is false and `ρ2`, `ρ3` are those two roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicSolution<T> {
    pub rho1: T,
    pub rho2: T,
    pub rho3: T,
    pub oscillating: bool,
    pub c_const: T,
    pub d: [T; 7],
    pub b_row: [T; 3],
    /// `A1, A2, A3` of the value function.
    pub value_coeffs: LinearSolution<T>,
    /// `C1, C2, C3` of the ruin probability.
    pub ruin_coeffs: LinearSolution<T>,
    /// Larger critical point of the cubic side; `ρ1` lies in `(r2, 0)`.
    pub r2: T,
    #[serde(skip)]
    params: MiningParams<T>,
}

impl<T: Scalar> CharacteristicSolution<T> {
    /// Solves the characteristic equation and both boundary systems.
    ///
    /// Fails with [`Error::RootCountMismatch`] unless exactly three roots
    /// with negative real part are found inside the default contour.
    pub fn solve(params: &MiningParams<T>) -> Result<Self> {
        let consts = characteristic_constants(params)?;
        let eq = CharacteristicEquation::new(consts.d, params.b());
        let found = eq.count_roots_negative_halfplane(eq.default_radius())?;
        if found != 3 {
            return Err(Error::RootCountMismatch { expected: 3, found });
        }
        Self::from_roots(params, consts, &eq)
    }

    /// As [`solve`](Self::solve) without the root count.
    pub fn solve_uncounted(params: &MiningParams<T>) -> Result<Self> {
        let consts = characteristic_constants(params)?;
        let eq = CharacteristicEquation::new(consts.d, params.b());
        Self::from_roots(params, consts, &eq)
    }

    fn from_roots(
        params: &MiningParams<T>,
        consts: CharacteristicConstants<T>,
        eq: &CharacteristicEquation<T>,
    ) -> Result<Self> {
        let roots = eq.solve()?;
        let rho1 = roots.rho1.value;
        let (b, c, t) = (params.b(), params.c(), params.t());
        let lp = params.lambda() * params.p();
        let k = lp * lp / (c * c);
        let two = T::lit(2.0);
        let two_b = two * b;
        // Third boundary row: V''(0) - k V(2b) applied to each basis function.
        let curvature = |r: T| -r * r + k * (two_b * r).exp();
        let (rho2, rho3, oscillating, m) = match roots.pair {
            RootPair::Complex(z) => {
                let (re, im) = (z.re, z.im);
                let decay = (two_b * re).exp();
                let row = [
                    curvature(rho1),
                    -re * re + im * im + k * decay * (two_b * im).cos(),
                    -two * re * im + k * decay * (two_b * im).sin(),
                ];
                (re, im, true, [[T::one(), T::one(), T::zero()], [rho1, re, im], row])
            }
            RootPair::Real(r2, r3) => (
                r2,
                r3,
                false,
                [
                    [T::one(), T::one(), T::one()],
                    [rho1, r2, r3],
                    [curvature(rho1), curvature(r2), curvature(r3)],
                ],
            ),
        };
        let cc = consts.c_const;
        let ct = c * t;
        let value_coeffs = solve_3x3(
            m,
            [-cc, -T::one(), -k * (two_b + cc) - T::one() / ct],
        )?;
        let ruin_coeffs = solve_3x3(m, [T::one(), -T::one() / ct, k - T::one() / (ct * ct)])?;
        Ok(Self {
            rho1,
            rho2,
            rho3,
            oscillating,
            c_const: cc,
            d: consts.d,
            b_row: m[2],
            value_coeffs,
            ruin_coeffs,
            r2: eq.cubic_critical_points().1,
            params: *params,
        })
    }

    pub fn params(&self) -> &MiningParams<T> {
        &self.params
    }

    fn form(&self, coeffs: &[T; 3], affine: bool) -> ExpForm<T> {
        let re = |x: T| Complex::new(x, T::zero());
        let terms = if self.oscillating {
            [
                (re(coeffs[0]), re(self.rho1)),
                (Complex::new(coeffs[1], -coeffs[2]), Complex::new(self.rho2, self.rho3)),
                (re(T::zero()), re(T::zero())),
            ]
        } else {
            [
                (re(coeffs[0]), re(self.rho1)),
                (re(coeffs[1]), re(self.rho2)),
                (re(coeffs[2]), re(self.rho3)),
            ]
        };
        ExpForm {
            terms,
            slope: if affine { T::one() } else { T::zero() },
            intercept: if affine { self.c_const } else { T::zero() },
        }
    }

    /// `k`-th derivative of the value or ruin function in state `z`.
    /// `affine` selects the value function.
    fn state_derivative(&self, z: SelfishState, u: T, k: u32, affine: bool) -> T {
        let coeffs = if affine {
            &self.value_coeffs.x
        } else {
            &self.ruin_coeffs.x
        };
        let base = self.form(coeffs, affine);
        let (lam, p, c, t, b) = (
            self.params.lambda(),
            self.params.p(),
            self.params.c(),
            self.params.t(),
            self.params.b(),
        );
        let lp = lam * p;
        let inv_t = T::one() / t;
        // Derivatives of the killing payoff u/t.
        let payoff = |k: u32| -> T {
            if !affine {
                return T::zero();
            }
            match k {
                0 => u * inv_t,
                1 => inv_t,
                _ => T::zero(),
            }
        };
        // V1^{(k)} = (c V0^{(k+1)} + (λp + 1/t) V0^{(k)} - (u/t)^{(k)}) / (λp)
        let one_state = |k: u32| -> T {
            (c * base.eval(u, k + 1) + (lp + inv_t) * base.eval(u, k) - payoff(k)) / lp
        };
        match z {
            SelfishState::Empty => base.eval(u, k),
            SelfishState::One => one_state(k),
            SelfishState::Fork => {
                // V0*^{(k)} = (c V1^{(k+1)} + (λ + 1/t) V1^{(k)}
                //              - λp V0^{(k)}(u + 2b) - (u/t)^{(k)}) / (λ(1-p))
                let ahead = base.eval(u + T::lit(2.0) * b, k);
                (c * one_state(k + 1) + (lam + inv_t) * one_state(k) - lp * ahead - payoff(k))
                    / (lam * (T::one() - p))
            }
        }
    }

    /// Expected surplus from the empty state, frozen at zero on ruin.
    pub fn value(&self, u: T) -> T {
        self.value_state(SelfishState::Empty, u)
    }

    pub fn value_state(&self, z: SelfishState, u: T) -> T {
        self.state_derivative(z, u, 0, true)
    }

    /// `k`-th `u`-derivative of [`value_state`](Self::value_state).
    pub fn value_state_derivative(&self, z: SelfishState, u: T, k: u32) -> T {
        self.state_derivative(z, u, k, true)
    }

    /// Ruin probability before the exponential horizon, unclamped.
    pub fn ruin(&self, u: T) -> T {
        self.ruin_state(SelfishState::Empty, u)
    }

    pub fn ruin_state(&self, z: SelfishState, u: T) -> T {
        self.state_derivative(z, u, 0, false)
    }

    pub fn ruin_state_derivative(&self, z: SelfishState, u: T, k: u32) -> T {
        self.state_derivative(z, u, k, false)
    }
}

/// `V₀(u, t)` for a single evaluation; prefer [`CharacteristicSolution`]
/// when sweeping `u`.
pub fn value_selfish<T: Scalar>(params: &MiningParams<T>, u: T) -> Result<T> {
    Ok(CharacteristicSolution::solve(params)?.value(u))
}

pub fn value_selfish_state<T: Scalar>(z: SelfishState, params: &MiningParams<T>, u: T) -> Result<T> {
    Ok(CharacteristicSolution::solve(params)?.value_state(z, u))
}

pub fn ruin_selfish<T: Scalar>(params: &MiningParams<T>, u: T) -> Result<T> {
    Ok(CharacteristicSolution::solve(params)?.ruin(u))
}
