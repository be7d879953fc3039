//! Abel-Gontcharov polynomials and one-sided boundary-crossing
//! probabilities of uniform order statistics.
//!
//! For nondecreasing nodes `0 <= v_1 <= ... <= v_n <= 1`,
//!
//! ```text
//! P(U_{k:n} <= v_k for k = 1..n) = (-1)^n G_n(0 | v_1, ..., v_n)
//! ```
//!
//! where `G_0 = 1` and `G_n(x) = x^n - Σ_{k<n} C(n,k) v_{k+1}^{n-k} G_k(x)`.
//! The alternating recursion loses all accuracy in floating point once `n`
//! reaches a few dozen, so [`joint_orderstat_prob`] evaluates it exactly in
//! integer arithmetic on nodes rounded to a `2^-128` grid.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

/// Largest degree evaluated unless a caller raises it.
pub const DEFAULT_DEGREE_CAP: usize = 200;

/// Fixed-point resolution of nodes in the exact recursion.
const NODE_BITS: u32 = 128;

/// Nondecreasing nodes in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary<T> {
    nodes: Vec<T>,
}

impl<T: Scalar> Boundary<T> {
    pub fn new(nodes: Vec<T>) -> Result<Self> {
        for (i, &v) in nodes.iter().enumerate() {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::OutOfRange {
                    index: i,
                    value: v.as_f64(),
                });
            }
            if i > 0 && v < nodes[i - 1] {
                return Err(Error::UnsortedBoundary { index: i });
            }
        }
        Ok(Self { nodes })
    }

    /// Survival boundary of a protocol-following miner over `[0, horizon]`:
    /// `v_k = (u + (k-1) b) / (c horizon) ∧ 1`, `k = 1..n`.
    pub fn surplus(u: T, b: T, c: T, horizon: T, n: usize) -> Result<Self> {
        let scale = c * horizon;
        let nodes = (0..n)
            .map(|k| {
                let v = (u + T::from_count(k) * b) / scale;
                if v.is_nan() {
                    T::one()
                } else {
                    v.min(T::one())
                }
            })
            .collect();
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `G_n(x | nodes)` evaluated in floating point.
///
/// Accurate for small `n` only; see [`ag_stability`].
pub fn ag_polynomial<T: Scalar>(n: usize, x: T, nodes: &Boundary<T>) -> Result<T> {
    if nodes.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: nodes.len(),
        });
    }
    Ok(ag_sequence(x, nodes.nodes()).0[n])
}

/// Values `G_0(x), ..., G_n(x)` and running error bounds in units of
/// machine epsilon, propagated through every earlier degree.
fn ag_sequence<T: Scalar>(x: T, nodes: &[T]) -> (Vec<T>, Vec<T>) {
    let n = nodes.len();
    let mut g = Vec::with_capacity(n + 1);
    let mut err = Vec::with_capacity(n + 1);
    g.push(T::one());
    err.push(T::zero());
    for m in 1..=n {
        let mut acc = CompensatedSum::new();
        acc.add(x.powi(m as i32));
        let mut bound = x.abs().powi(m as i32);
        // C(m, k) built incrementally.
        let mut binom = T::one();
        for k in 0..m {
            let weight = binom * nodes[k].powi((m - k) as i32);
            let term = weight * g[k];
            acc.add(-term);
            bound = bound + term.abs() + weight * err[k];
            binom = binom * T::from_count(m - k) / T::from_count(k + 1);
        }
        g.push(acc.value());
        err.push(bound);
    }
    (g, err)
}

/// Relative error bound of the floating-point recursion at `x = 0`, per
/// degree, in units of machine epsilon. Values near `1 / ε` mean the float
/// result carries no correct digits.
pub fn ag_stability<T: Scalar>(nodes: &Boundary<T>) -> Vec<T> {
    let (g, err) = ag_sequence(T::zero(), nodes.nodes());
    g.iter()
        .zip(err)
        .map(|(&v, e)| if v == T::zero() { T::infinity() } else { e / v.abs() })
        .collect()
}

/// `P(U_{k:n} <= v_k, k = 1..n)` for `n = nodes.len()` iid uniforms.
pub fn joint_orderstat_prob<T: Scalar>(nodes: &Boundary<T>) -> Result<T> {
    joint_orderstat_prob_capped(nodes, DEFAULT_DEGREE_CAP)
}

pub fn joint_orderstat_prob_capped<T: Scalar>(nodes: &Boundary<T>, cap: usize) -> Result<T> {
    Ok(*joint_orderstat_prefix_probs(nodes, cap)?
        .last()
        .expect("prefix sequence always holds n = 0"))
}

/// The joint probability for every prefix of `nodes`: entry `m` uses the
/// first `m` nodes and `m` uniforms. Entry 0 is 1.
pub fn joint_orderstat_prefix_probs<T: Scalar>(nodes: &Boundary<T>, cap: usize) -> Result<Vec<T>> {
    let n = nodes.len();
    if n > cap {
        return Err(Error::StabilityCapExceeded { degree: n, cap });
    }
    let fixed: Vec<BigInt> = nodes.nodes().iter().map(|&v| to_fixed(v)).collect();

    // scaled[m] = (-1)^m G_m(0) * 2^(NODE_BITS * m), an exact integer.
    let mut scaled: Vec<BigInt> = Vec::with_capacity(n + 1);
    scaled.push(BigInt::one());
    // powers[k] = fixed[k]^(m - k) for the current degree m.
    let mut powers: Vec<BigInt> = Vec::with_capacity(n);
    let mut binom: Vec<BigInt> = vec![BigInt::one()];
    for m in 1..=n {
        // Pascal row m.
        let mut next = Vec::with_capacity(m + 1);
        next.push(BigInt::one());
        for k in 1..m {
            next.push(&binom[k - 1] + &binom[k]);
        }
        next.push(BigInt::one());
        binom = next;

        for (k, p) in powers.iter_mut().enumerate() {
            *p *= &fixed[k];
        }
        powers.push(fixed[m - 1].clone());

        let mut acc = BigInt::zero();
        for k in 0..m {
            let term = &binom[k] * &powers[k] * &scaled[k];
            // Sign (-1)^(m-k+1).
            if (m - k) % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        scaled.push(acc);
    }

    Ok(scaled
        .iter()
        .enumerate()
        .map(|(m, a)| T::lit(scaled_to_f64(a, NODE_BITS as u64 * m as u64)))
        .collect())
}

fn to_fixed<T: Scalar>(v: T) -> BigInt {
    let x = v.as_f64();
    if x <= 0.0 {
        return BigInt::zero();
    }
    if x >= 1.0 {
        return BigInt::one() << NODE_BITS;
    }
    // x = mantissa * 2^exp exactly; shift onto the 2^-NODE_BITS grid.
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let (mantissa, exp) = if exp_field == 0 {
        (bits & ((1u64 << 52) - 1), -1074i64)
    } else {
        ((bits & ((1u64 << 52) - 1)) | (1u64 << 52), exp_field - 1075)
    };
    let shift = exp + NODE_BITS as i64;
    let m = BigInt::from(mantissa);
    if shift >= 0 {
        m << shift as usize
    } else {
        let s = (-shift) as usize;
        // Round to nearest.
        let half = BigInt::one() << (s - 1);
        (m + half) >> s
    }
}

/// `a / 2^shift` rounded to f64.
fn scaled_to_f64(a: &BigInt, shift: u64) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let bits = a.bits();
    let sign = if a.sign() == Sign::Minus { -1.0 } else { 1.0 };
    let magnitude = a.abs();
    // Keep the top 64 bits.
    let drop = bits.saturating_sub(64);
    let top = (&magnitude >> drop).to_u64().unwrap_or(u64::MAX) as f64;
    let exponent = drop as i64 - shift as i64;
    sign * ldexp(top, exponent)
}

fn ldexp(x: f64, mut e: i64) -> f64 {
    let mut y = x;
    while e > 1000 {
        y *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        y *= 2f64.powi(-1000);
        e += 1000;
    }
    y * 2f64.powi(e as i32)
}
