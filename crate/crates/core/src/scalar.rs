//! Floating point abstraction shared by every closed-form routine.
//!
//! All analytic code is written against [`Scalar`] so the same formulas can be
//! evaluated in `f64` (the default everywhere) or `f32` (cheap sweeps). The
//! per-type tolerances live here so solvers never hard-code an `f64` epsilon.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for bracketed roots in exponent space (`θ·b`, `ρ·b`).
    const BRACKET_TOL: f64;
    /// Relative tolerance on residuals of the complex characteristic equation.
    const RESIDUAL_TOL: f64;
    /// Tail mass below which Poisson sums are truncated.
    const POISSON_TAIL: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn bracket_tol() -> Self {
        Self::lit(Self::BRACKET_TOL)
    }

    fn residual_tol() -> Self {
        Self::lit(Self::RESIDUAL_TOL)
    }

    fn poisson_tail() -> Self {
        Self::lit(Self::POISSON_TAIL)
    }
}

impl Scalar for f64 {
    const BRACKET_TOL: f64 = 1e-12;
    const RESIDUAL_TOL: f64 = 1e-8;
    const POISSON_TAIL: f64 = 1e-12;
}

impl Scalar for f32 {
    const BRACKET_TOL: f64 = 1e-5;
    const RESIDUAL_TOL: f64 = 1e-4;
    const POISSON_TAIL: f64 = 1e-6;
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Scalar> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
