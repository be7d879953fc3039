//! Root finding for the Lundberg-type equations and the cubic-exponential
//! characteristic equation of the selfish-mining value function.
//!
//! The characteristic equation
//!
//! ```text
//! (D1 ρ + D2) e^{2ρb} + D3 e^{ρb} = D4 ρ³ + D5 ρ² + D6 ρ + D7
//! ```
//!
//! has coefficients spanning many orders of magnitude because `b` is a
//! money amount (~1e5 USD). It is therefore solved in the dimensionless
//! variable `σ = ρ b`, divided through by `D7`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_BRACKET_ITERATIONS: usize = 200;
const MAX_NEWTON_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketedRoot<T> {
    pub value: T,
    pub residual: T,
    pub bracket: (T, T),
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexRoot<T> {
    pub re: T,
    pub im: T,
    /// Residual modulus relative to the dominant term of the equation.
    pub residual_modulus: T,
}

impl<T: Scalar> ComplexRoot<T> {
    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }
}

/// Brent's method on a sign-changing bracket.
///
/// Converges when `|f(x)| <= tol` or the bracket has shrunk below `tol`
/// (floored at a few ulps of `x`).
pub fn solve_bracketed<T, F>(f: F, lo: T, hi: T, tol: T) -> Result<BracketedRoot<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() || f_hi == T::zero() || !(f_lo * f_hi < T::zero()) {
        return Err(Error::NoSignChange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: f_lo.as_f64(),
            f_hi: f_hi.as_f64(),
        });
    }

    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=MAX_BRACKET_ITERATIONS {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let x_tol = two * T::epsilon() * b.abs() + half * tol;
        let m = half * (c - b);
        if fb.abs() <= tol || m.abs() <= x_tol || fb == T::zero() {
            return Ok(BracketedRoot {
                value: b,
                residual: fb,
                bracket: (lo, hi),
                iterations: iter,
            });
        }
        if e.abs() >= x_tol && fa.abs() > fb.abs() {
            // Inverse quadratic / secant step.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            let min1 = T::lit(3.0) * m * q - (x_tol * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > x_tol {
            b + d
        } else if m > T::zero() {
            b + x_tol
        } else {
            b - x_tol
        };
        fb = f(b);
    }
    Err(Error::NoConvergence {
        what: "bracketed root",
        iterations: MAX_BRACKET_ITERATIONS,
        residual: fb.as_f64(),
    })
}

/// Principal branch `W₀` of the Lambert W function on `[-1/e, ∞)`.
pub fn lambert_w_principal<T: Scalar>(x: T) -> Result<T> {
    let branch_point = -T::one() / T::E();
    if x.is_nan() || x < branch_point - T::lit(8.0) * T::epsilon() {
        return Err(Error::OutOfDomain {
            what: "lambert_w_principal",
            x: x.as_f64(),
        });
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x <= branch_point {
        return Ok(-T::one());
    }
    if x.is_infinite() {
        return Ok(x);
    }

    let one = T::one();
    let two = T::lit(2.0);
    // Initial guess: branch-point series, small-x series, or log asymptotics.
    let mut w = if x < T::lit(-0.25) {
        let p = (two * (T::E() * x + one)).sqrt();
        -one + p - p * p / T::lit(3.0) + T::lit(11.0 / 72.0) * p * p * p
    } else if x < T::lit(3.0) {
        let l = (one + x).ln();
        l * (one - (one + l).ln() / (two + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + one;
        if wp1.abs() < T::epsilon() {
            break;
        }
        // Halley step
        let denom = ew * wp1 - (w + two) * f / (two * wp1);
        let step = f / denom;
        w = w - step;
        if step.abs() <= T::lit(4.0) * T::epsilon() * (one + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// Cubic-exponential characteristic equation `g(ρ) = f(ρ)` with
/// `f(ρ) = D4 ρ³ + D5 ρ² + D6 ρ + D7` and
/// `g(ρ) = (D1 ρ + D2) e^{2ρb} + D3 e^{ρb}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicEquation<T> {
    /// `D1..D7` stored at indices `0..7`.
    pub d: [T; 7],
    pub b: T,
}

/// The two roots with negative real part besides `ρ1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootPair<T> {
    /// `ρ2 ± iρ3` with `ρ3 > 0`.
    Complex(ComplexRoot<T>),
    /// Two further real roots, both below the larger cubic critical point.
    Real(T, T),
}

/// Roots of the characteristic equation with negative real part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicRoots<T> {
    pub rho1: BracketedRoot<T>,
    pub pair: RootPair<T>,
}

impl<T: Scalar> CharacteristicEquation<T> {
    pub fn new(d: [T; 7], b: T) -> Self {
        Self { d, b }
    }

    /// Polynomial side in σ = ρb, scaled by `1/D7`.
    fn poly_coeffs_sigma(&self) -> [T; 4] {
        let [_, _, _, d4, d5, d6, d7] = self.d;
        let b = self.b;
        [d4 / (b * b * b * d7), d5 / (b * b * d7), d6 / (b * d7), T::one()]
    }

    /// `(f - g)(σ/b) / D7` for real σ.
    pub fn scaled_real(&self, sigma: T) -> T {
        let [d1, d2, d3, _, _, _, d7] = self.d;
        let [a3, a2, a1, a0] = self.poly_coeffs_sigma();
        let poly = ((a3 * sigma + a2) * sigma + a1) * sigma + a0;
        let e1 = sigma.exp();
        let e2 = e1 * e1;
        let expo = ((d1 * sigma / self.b + d2) * e2 + d3 * e1) / d7;
        poly - expo
    }

    /// `(f - g)(σ/b) / D7` and its σ-derivative at complex σ.
    pub fn scaled_complex(&self, sigma: Complex<T>) -> (Complex<T>, Complex<T>) {
        let [d1, d2, d3, _, _, _, d7] = self.d;
        let [a3, a2, a1, a0] = self.poly_coeffs_sigma();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let poly = ((sigma * a3 + a2) * sigma + a1) * sigma + a0;
        let dpoly = (sigma * (a3 * three) + a2 * two) * sigma + a1;
        let e1 = sigma.exp();
        let e2 = e1 * e1;
        let k1 = d1 / (self.b * d7);
        let k2 = d2 / d7;
        let k3 = d3 / d7;
        let expo = (sigma * k1 + k2) * e2 + e1 * k3;
        let dexpo = e2 * k1 + (sigma * k1 + k2) * e2 * two + e1 * k3;
        (poly - expo, dpoly - dexpo)
    }

    /// `f(ρ) - g(ρ)` at complex ρ, unscaled.
    pub fn residual(&self, rho: Complex<T>) -> Complex<T> {
        let (lhs, rhs) = self.sides(rho);
        rhs - lhs
    }

    /// `(g(ρ), f(ρ))`: exponential side and polynomial side.
    pub fn sides(&self, rho: Complex<T>) -> (Complex<T>, Complex<T>) {
        let [d1, d2, d3, d4, d5, d6, d7] = self.d;
        let e1 = (rho * self.b).exp();
        let e2 = e1 * e1;
        let lhs = (rho * d1 + d2) * e2 + e1 * d3;
        let rhs = ((rho * d4 + d5) * rho + d6) * rho + d7;
        (lhs, rhs)
    }

    /// Largest magnitude among the seven individual terms at ρ.
    pub fn term_scale(&self, rho: Complex<T>) -> T {
        let [d1, d2, d3, d4, d5, d6, d7] = self.d;
        let e1 = (rho * self.b).exp().norm();
        let e2 = e1 * e1;
        let r = rho.norm();
        [
            d4.abs() * r * r * r,
            d5.abs() * r * r,
            d6.abs() * r,
            d7.abs(),
            d1.abs() * r * e2,
            d2.abs() * e2,
            d3.abs() * e1,
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }

    pub fn relative_residual(&self, rho: Complex<T>) -> T {
        self.residual(rho).norm() / self.term_scale(rho)
    }

    /// Critical points `r1 < r2 < 0` of the cubic side.
    pub fn cubic_critical_points(&self) -> (T, T) {
        let [_, _, _, d4, d5, d6, _] = self.d;
        // 3 D4 ρ² + 2 D5 ρ + D6 = 0, stable form of the quadratic formula.
        let a = T::lit(3.0) * d4;
        let bb = T::lit(2.0) * d5;
        let disc = (bb * bb - T::lit(4.0) * a * d6).max(T::zero()).sqrt();
        let q = -T::lit(0.5) * (bb + disc * bb.signum());
        let x1 = q / a;
        let x2 = if q != T::zero() { d6 / q } else { x1 };
        (x1.min(x2), x1.max(x2))
    }

    /// Real root in `(lo, 0)`; `lo` defaults to the larger cubic critical point.
    pub fn solve_real(&self, lo: Option<T>) -> Result<BracketedRoot<T>> {
        let lo = lo.unwrap_or_else(|| self.cubic_critical_points().1);
        let b = self.b;
        let mut sigma_lo = lo * b;
        let sigma_hi = T::zero();
        let h_hi = self.scaled_real(sigma_hi);
        if h_hi == T::zero() {
            return Ok(BracketedRoot {
                value: T::zero(),
                residual: T::zero(),
                bracket: (lo, T::zero()),
                iterations: 0,
            });
        }
        // Widen towards -∞ if the hint does not bracket (f - g → -∞ there).
        let mut widen = 0;
        while self.scaled_real(sigma_lo) * h_hi >= T::zero() && widen < 60 {
            sigma_lo = sigma_lo * T::lit(2.0) - T::one();
            widen += 1;
        }
        let root = solve_bracketed(
            |s| self.scaled_real(s),
            sigma_lo,
            // Keep the bracket open at the origin.
            sigma_hi,
            T::bracket_tol(),
        )?;
        Ok(BracketedRoot {
            value: root.value / b,
            residual: self.residual(Complex::new(root.value / b, T::zero())).re,
            bracket: (sigma_lo / b, sigma_hi),
            iterations: root.iterations,
        })
    }

    /// Damped Newton iteration in σ-space from `seed` (σ units).
    fn newton_sigma(&self, seed: Complex<T>) -> Option<Complex<T>> {
        let mut z = seed;
        let (mut h, mut dh) = self.scaled_complex(z);
        let tol = T::residual_tol() * T::lit(1e-3);
        for _ in 0..MAX_NEWTON_ITERATIONS {
            if !(h.norm().is_finite() && dh.norm() > T::zero()) {
                return None;
            }
            let step = h / dh;
            let mut lambda = T::one();
            let mut accepted = false;
            for _ in 0..40 {
                let cand = z - step * lambda;
                let (hc, dhc) = self.scaled_complex(cand);
                if hc.norm() < h.norm() || hc.norm() == T::zero() {
                    z = cand;
                    h = hc;
                    dh = dhc;
                    accepted = true;
                    break;
                }
                lambda = lambda * T::lit(0.5);
            }
            let rho = z / self.b;
            if self.relative_residual(rho) <= tol {
                return Some(z);
            }
            if !accepted {
                // Stalled at floating-point resolution.
                return (self.relative_residual(rho) <= T::residual_tol()).then_some(z);
            }
        }
        let rho = z / self.b;
        (self.relative_residual(rho) <= T::residual_tol()).then_some(z)
    }

    /// Complex roots of the cubic side in σ units.
    fn cubic_roots_sigma(&self) -> [Complex<T>; 3] {
        let [a3, a2, a1, a0] = self.poly_coeffs_sigma();
        // Monic coefficients.
        let (p2, p1, p0) = (a2 / a3, a1 / a3, a0 / a3);
        // Real root by Newton from the Cauchy bound, falling back to bisection.
        let bound = T::one() + p2.abs().max(p1.abs()).max(p0.abs());
        let cubic = |x: T| ((x + p2) * x + p1) * x + p0;
        let real = solve_bracketed(cubic, -bound, bound, T::epsilon())
            .map(|r| r.value)
            .unwrap_or(T::zero());
        // Deflate: x³ + p2 x² + p1 x + p0 = (x - r)(x² + e1 x + e0).
        let e1 = p2 + real;
        let e0 = p1 + real * e1;
        let disc = Complex::new(e1 * e1 - T::lit(4.0) * e0, T::zero()).sqrt();
        let half = T::lit(0.5);
        [
            Complex::new(real, T::zero()),
            (Complex::new(-e1, T::zero()) + disc) * half,
            (Complex::new(-e1, T::zero()) - disc) * half,
        ]
    }

    /// Accept a Newton limit as the complex member of the root triple.
    fn admissible(&self, z: Complex<T>, rho1: T) -> bool {
        let rho = z / self.b;
        let sep = T::lit(1e-6) * (T::one() + (rho1 * self.b).abs());
        rho.re < T::zero() && z.im.abs() > sep
    }

    /// Real roots of `f - g` on `(σ_lo, σ_hi)` found by sign changes on a
    /// uniform grid (σ units).
    fn real_roots_sigma(&self, sigma_lo: T, sigma_hi: T, steps: usize) -> Vec<T> {
        let h = (sigma_hi - sigma_lo) / T::from_count(steps);
        let mut out = Vec::new();
        let mut a = sigma_lo;
        let mut fa = self.scaled_real(a);
        for i in 1..=steps {
            let x = sigma_lo + h * T::from_count(i);
            let fx = self.scaled_real(x);
            if fa * fx < T::zero() {
                if let Ok(r) = solve_bracketed(|s| self.scaled_real(s), a, x, T::bracket_tol()) {
                    out.push(r.value);
                }
            }
            a = x;
            fa = fx;
        }
        out
    }

    /// Solves for `ρ1` (real, in `(r2, 0)`) and the remaining pair.
    ///
    /// The pair is usually complex. Newton is seeded at the complex roots of
    /// the cubic side; if that fails, real roots left of `r2` are searched,
    /// then a rectangular grid of complex seeds `[2 r1, 0] × [0, 4π/b]`.
    pub fn solve(&self) -> Result<CharacteristicRoots<T>> {
        let (r1, r2) = self.cubic_critical_points();
        let rho1 = self.solve_real(Some(r2))?;
        let radius = self.default_radius() * self.b;

        let seeds: Vec<Complex<T>> = self
            .cubic_roots_sigma()
            .into_iter()
            .filter(|z| z.im != T::zero())
            .map(|z| Complex::new(z.re, z.im.abs()))
            .collect();
        let mut found = seeds
            .iter()
            .filter_map(|&s| self.newton_sigma(s))
            .find(|&z| self.admissible(z, rho1.value) && z.norm() < radius);

        if found.is_none() {
            let hi = r2 * self.b;
            let lo = T::lit(4.0) * r1 * self.b - T::one();
            let reals = self.real_roots_sigma(lo, hi, 4096);
            if reals.len() == 2 {
                return Ok(CharacteristicRoots {
                    rho1,
                    pair: RootPair::Real(reals[1] / self.b, reals[0] / self.b),
                });
            }
        }

        if found.is_none() {
            let nx = 24;
            let ny = 24;
            let re_lo = T::lit(2.0) * r1 * self.b;
            let im_hi = T::lit(4.0) * T::PI();
            'grid: for i in 0..nx {
                for j in 1..=ny {
                    let re = re_lo * (T::one() - T::from_count(i) / T::from_count(nx));
                    let im = im_hi * T::from_count(j) / T::from_count(ny);
                    if let Some(z) = self.newton_sigma(Complex::new(re, im)) {
                        if self.admissible(z, rho1.value) && z.norm() < radius {
                            found = Some(z);
                            break 'grid;
                        }
                    }
                }
            }
        }

        let z = found.ok_or(Error::NoConvergence {
            what: "complex characteristic root",
            iterations: MAX_NEWTON_ITERATIONS,
            residual: f64::NAN,
        })?;
        let rho = Complex::new(z.re, z.im.abs()) / self.b;
        let residual_modulus = self.relative_residual(rho);
        Ok(CharacteristicRoots {
            rho1,
            pair: RootPair::Complex(ComplexRoot {
                re: rho.re,
                im: rho.im,
                residual_modulus,
            }),
        })
    }

    /// Default contour radius `10 |r1|` in ρ units.
    pub fn default_radius(&self) -> T {
        T::lit(10.0) * self.cubic_critical_points().0.abs()
    }

    /// Number of zeros of `f - g` with negative real part inside `|ρ| < radius`.
    ///
    /// The contour's straight side is indented well inside the linearised
    /// distance to the zero nearest the origin, which shrinks like `1/t`.
    pub fn count_roots_negative_halfplane(&self, radius: T) -> Result<i64> {
        let b = self.b;
        let sigma_radius = radius * b;
        let (h0, dh0) = self.scaled_complex(Complex::new(T::zero(), T::zero()));
        let near = if dh0.norm() > T::zero() { h0.norm() / dh0.norm() } else { T::infinity() };
        let indent = (sigma_radius * T::lit(1e-7)).min(near * T::lit(1e-2));
        count_zeros_left_half_disk(|s: Complex<T>| self.scaled_complex(s).0, sigma_radius, Some(indent))
    }
}

/// Winding number of `h` around the boundary of the left half-disk of
/// radius `radius`, i.e. the number of zeros of a holomorphic `h` inside.
///
/// The straight part of the contour runs along `Re z = -indent` (default
/// `1e-7 · radius`), so zeros on the imaginary axis are not counted. Phase
/// is accumulated from unwrapped angle differences; intervals are bisected
/// until every step turns by less than π/4.
pub fn count_zeros_left_half_disk<T, H>(h: H, radius: T, indent: Option<T>) -> Result<i64>
where
    T: Scalar,
    H: Fn(Complex<T>) -> Complex<T>,
{
    let indent = indent.unwrap_or(radius * T::lit(1e-7));
    let y_top = (radius * radius - indent * indent).max(T::zero()).sqrt();
    let arc_start = (y_top / radius).asin();

    // Piece 1: vertical segment from -i y_top to +i y_top at Re = -indent.
    let seg = |s: T| Complex::new(-indent, -y_top + (y_top + y_top) * s);
    // Piece 2: counterclockwise arc from the top end through -radius to the
    // bottom end.
    let theta0 = T::PI() - arc_start;
    let theta1 = T::PI() + arc_start;
    let arc = |s: T| {
        let th = theta0 + (theta1 - theta0) * s;
        Complex::new(radius * th.cos(), radius * th.sin())
    };

    let mut total = T::zero();
    let mut min_mod = T::infinity();
    let mut max_mod = T::zero();
    for piece in 0..2 {
        let path = |s: T| if piece == 0 { seg(s) } else { arc(s) };
        let (phase, lo, hi) = accumulate_phase(&h, &path)?;
        total = total + phase;
        min_mod = min_mod.min(lo);
        max_mod = max_mod.max(hi);
    }
    if !(min_mod > T::lit(1e-13) * max_mod) {
        return Err(Error::ContourTooClose {
            distance: (min_mod / max_mod).as_f64(),
        });
    }
    let turns = total / (T::lit(2.0) * T::PI());
    let n = turns.round();
    if (turns - n).abs() > T::lit(0.05) {
        return Err(Error::ContourTooClose {
            distance: (min_mod / max_mod).as_f64(),
        });
    }
    Ok(n.to_i64().unwrap_or(i64::MAX))
}

fn accumulate_phase<T, H, P>(h: &H, path: &P) -> Result<(T, T, T)>
where
    T: Scalar,
    H: Fn(Complex<T>) -> Complex<T>,
    P: Fn(T) -> Complex<T>,
{
    const INITIAL: usize = 4096;
    const MAX_DEPTH: usize = 40;
    let limit = T::FRAC_PI_4();
    let mut total = T::zero();
    let mut min_mod = T::infinity();
    let mut max_mod = T::zero();

    let mut stack: Vec<(T, T, Complex<T>, Complex<T>, usize)> = Vec::new();
    let mut s_prev = T::zero();
    let mut h_prev = h(path(s_prev));
    for k in 1..=INITIAL {
        let s = T::from_count(k) / T::from_count(INITIAL);
        let h_cur = h(path(s));
        stack.push((s_prev, s, h_prev, h_cur, 0));
        while let Some((a, b, ha, hb, depth)) = stack.pop() {
            let (ma, mb) = (ha.norm(), hb.norm());
            min_mod = min_mod.min(ma).min(mb);
            max_mod = max_mod.max(ma).max(mb);
            if !(ma.is_finite() && mb.is_finite()) {
                return Err(Error::ContourTooClose { distance: f64::NAN });
            }
            let d = (hb / ha).arg();
            if d.abs() <= limit {
                total = total + d;
                continue;
            }
            if depth >= MAX_DEPTH {
                return Err(Error::ContourTooClose {
                    distance: (min_mod / max_mod).as_f64(),
                });
            }
            let m = (a + b) * T::lit(0.5);
            let hm = h(path(m));
            // Push right half first so the left half is processed next.
            stack.push((m, b, hm, hb, depth + 1));
            stack.push((a, m, ha, hm, depth + 1));
        }
        s_prev = s;
        h_prev = h_cur;
    }
    Ok((total, min_mod, max_mod))
}
