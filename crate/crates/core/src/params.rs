//! Model parameters and the market calibration they are derived from.
//!
//! Units: time in hours, money in USD. `lambda` counts blocks per hour for
//! the whole network; `c` is the miner's operating cost per hour.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Hours in a year of 365.25 days.
pub const HOURS_PER_YEAR: f64 = 365.25 * 24.0;

/// Bitcoin block rate: one block every ten minutes.
pub const BITCOIN_BLOCKS_PER_HOUR: f64 = 6.0;

/// Block reward quoted for 1 January 2020. The exact product
/// `12.5 * 7174.74` is 89684.25; this is the rounded figure that is quoted
/// alongside it and is used where results are compared against it.
pub const QUOTED_REWARD_2020: f64 = 89_684.30;

/// The model tuple `(λ, p, b, c, q, u, t)`.
///
/// Fields are validated on construction; every analytic routine relies on
/// the invariants below holding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams<T>", into = "RawParams<T>")]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct MiningParams<T> {
    lambda: T,
    p: T,
    b: T,
    c: T,
    q: T,
    u: T,
    t: T,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawParams<T> {
    lambda: T,
    p: T,
    b: T,
    c: T,
    q: T,
    u: T,
    t: T,
}

impl<T: Scalar> TryFrom<RawParams<T>> for MiningParams<T> {
    type Error = crate::Error;

    fn try_from(r: RawParams<T>) -> Result<Self> {
        MiningParams::new(r.lambda, r.p, r.b, r.c, r.q, r.u, r.t)
    }
}

impl<T: Scalar> From<MiningParams<T>> for RawParams<T> {
    fn from(m: MiningParams<T>) -> Self {
        RawParams {
            lambda: m.lambda,
            p: m.p,
            b: m.b,
            c: m.c,
            q: m.q,
            u: m.u,
            t: m.t,
        }
    }
}

fn finite<T: Scalar>(name: &'static str, x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {x}")))
    }
}

impl<T: Scalar> MiningParams<T> {
    pub fn new(lambda: T, p: T, b: T, c: T, q: T, u: T, t: T) -> Result<Self> {
        let zero = T::zero();
        let one = T::one();
        for (name, x) in [
            ("lambda", lambda),
            ("p", p),
            ("b", b),
            ("c", c),
            ("q", q),
            ("u", u),
        ] {
            finite(name, x)?;
        }
        if lambda <= zero {
            return Err(invalid("lambda", format!("must be > 0, got {lambda}")));
        }
        if !(p > zero && p < one) {
            return Err(invalid("p", format!("must lie in (0, 1), got {p}")));
        }
        if b <= zero {
            return Err(invalid("b", format!("must be > 0, got {b}")));
        }
        if c < zero {
            return Err(invalid("c", format!("must be >= 0, got {c}")));
        }
        if !(q >= zero && q <= one) {
            return Err(invalid("q", format!("must lie in [0, 1], got {q}")));
        }
        if u < zero {
            return Err(invalid("u", format!("must be >= 0, got {u}")));
        }
        // t may be +inf (infinite horizon limit) but not NaN.
        if t.is_nan() || t <= zero {
            return Err(invalid("t", format!("must be > 0, got {t}")));
        }
        Ok(Self {
            lambda,
            p,
            b,
            c,
            q,
            u,
            t,
        })
    }

    /// Parameters built from market data.
    pub fn from_economics(econ: &EconomicInputs<T>, lambda: T, q: T, u: T, t: T) -> Result<Self> {
        Self::new(
            lambda,
            econ.hashshare,
            econ.reward(),
            econ.cost_rate(),
            q,
            u,
            t,
        )
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }
    pub fn p(&self) -> T {
        self.p
    }
    pub fn b(&self) -> T {
        self.b
    }
    pub fn c(&self) -> T {
        self.c
    }
    pub fn q(&self) -> T {
        self.q
    }
    pub fn u(&self) -> T {
        self.u
    }
    pub fn t(&self) -> T {
        self.t
    }

    pub fn with_lambda(self, lambda: T) -> Result<Self> {
        Self::new(lambda, self.p, self.b, self.c, self.q, self.u, self.t)
    }
    pub fn with_p(self, p: T) -> Result<Self> {
        Self::new(self.lambda, p, self.b, self.c, self.q, self.u, self.t)
    }
    pub fn with_b(self, b: T) -> Result<Self> {
        Self::new(self.lambda, self.p, b, self.c, self.q, self.u, self.t)
    }
    pub fn with_c(self, c: T) -> Result<Self> {
        Self::new(self.lambda, self.p, self.b, c, self.q, self.u, self.t)
    }
    pub fn with_q(self, q: T) -> Result<Self> {
        Self::new(self.lambda, self.p, self.b, self.c, q, self.u, self.t)
    }
    pub fn with_u(self, u: T) -> Result<Self> {
        Self::new(self.lambda, self.p, self.b, self.c, self.q, u, self.t)
    }
    pub fn with_t(self, t: T) -> Result<Self> {
        Self::new(self.lambda, self.p, self.b, self.c, self.q, self.u, t)
    }

    /// Expected reward income per hour of a protocol-following miner, `pλb`.
    pub fn honest_income_rate(&self) -> T {
        self.p * self.lambda * self.b
    }

    /// `pλb - c`.
    pub fn honest_drift(&self) -> T {
        self.honest_income_rate() - self.c
    }

    pub fn honest_net_profit(&self) -> bool {
        self.honest_drift() > T::zero()
    }

    /// Conditions that are valid for the model but are outside the regime
    /// the protocol-following analysis is usually quoted for.
    pub fn honest_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.p >= T::lit(0.5) {
            out.push(format!(
                "hashpower share p = {} is not below 1/2; a majority miner is outside the usual honest-mining regime",
                self.p
            ));
        }
        out
    }

    pub fn cast<U: Scalar>(&self) -> MiningParams<U> {
        let f = |x: T| U::lit(x.as_f64());
        MiningParams {
            lambda: f(self.lambda),
            p: f(self.p),
            b: f(self.b),
            c: f(self.c),
            q: f(self.q),
            u: f(self.u),
            t: f(self.t),
        }
    }
}

/// Market data from which the reward `b` and cost rate `c` are derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct EconomicInputs<T> {
    /// Coins awarded per block.
    pub n_btc: T,
    /// Coin price, USD per coin.
    pub price_btc: T,
    /// Network energy use, TWh per year.
    pub network_twh_per_year: T,
    /// Electricity price, USD per kWh.
    pub electricity_price: T,
    /// Miner's share of the network hashrate.
    pub hashshare: T,
    /// Network hashrate, hashes per second.
    pub network_hashrate: T,
    /// Replaces `n_btc * price_btc` when set.
    #[serde(default)]
    pub reward_override: Option<T>,
}

impl<T: Scalar> EconomicInputs<T> {
    pub fn new(
        n_btc: T,
        price_btc: T,
        network_twh_per_year: T,
        electricity_price: T,
        hashshare: T,
        network_hashrate: T,
    ) -> Result<Self> {
        let inputs = Self {
            n_btc,
            price_btc,
            network_twh_per_year,
            electricity_price,
            hashshare,
            network_hashrate,
            reward_override: None,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    /// Market snapshot of 1 January 2020 with a 10% share and 0.06 USD/kWh.
    pub fn january_2020() -> Self {
        Self {
            n_btc: T::lit(12.5),
            price_btc: T::lit(7174.74),
            network_twh_per_year: T::lit(72.1671),
            electricity_price: T::lit(0.06),
            hashshare: T::lit(0.1),
            network_hashrate: T::lit(97.01e18),
            reward_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        for (name, x) in [
            ("n_btc", self.n_btc),
            ("price_btc", self.price_btc),
            ("network_twh_per_year", self.network_twh_per_year),
            ("electricity_price", self.electricity_price),
            ("network_hashrate", self.network_hashrate),
        ] {
            finite(name, x)?;
            if x <= zero {
                return Err(invalid(name, format!("must be > 0, got {x}")));
            }
        }
        if !(self.hashshare > zero && self.hashshare < T::one()) {
            return Err(invalid(
                "hashshare",
                format!("must lie in (0, 1), got {}", self.hashshare),
            ));
        }
        if let Some(b) = self.reward_override {
            if !(b.is_finite() && b > zero) {
                return Err(invalid("reward_override", format!("must be > 0, got {b}")));
            }
        }
        Ok(())
    }

    pub fn with_electricity_price(mut self, price: T) -> Result<Self> {
        self.electricity_price = price;
        self.validate()?;
        Ok(self)
    }

    pub fn with_hashshare(mut self, p: T) -> Result<Self> {
        self.hashshare = p;
        self.validate()?;
        Ok(self)
    }

    pub fn with_reward_override(mut self, b: Option<T>) -> Result<Self> {
        self.reward_override = b;
        self.validate()?;
        Ok(self)
    }

    /// Block reward in USD.
    pub fn reward(&self) -> T {
        self.reward_override
            .unwrap_or_else(|| derive_reward(self.n_btc, self.price_btc))
    }

    /// Network power draw in kWh per hour.
    pub fn network_power(&self) -> T {
        derive_network_power(self.network_twh_per_year)
    }

    /// Miner's operating cost in USD per hour.
    pub fn cost_rate(&self) -> T {
        derive_cost_rate(self.hashshare, self.network_power(), self.electricity_price)
    }

    pub fn hashes_per_hour(&self) -> T {
        self.network_hashrate * T::lit(3600.0)
    }
}

/// `b = n_btc * price_btc`.
pub fn derive_reward<T: Scalar>(n_btc: T, price_btc: T) -> T {
    n_btc * price_btc
}

/// Yearly energy use (TWh) converted to an hourly draw in kWh.
pub fn derive_network_power<T: Scalar>(twh_per_year: T) -> T {
    twh_per_year * T::lit(1e9) / T::lit(HOURS_PER_YEAR)
}

/// `c = p * W * π_W`.
pub fn derive_cost_rate<T: Scalar>(hashshare: T, network_power: T, electricity_price: T) -> T {
    hashshare * network_power * electricity_price
}

/// Largest electricity price for which a protocol-following miner has
/// positive drift: `pλb > pWπ_W  <=>  π_W < λb / W`.
pub fn net_profit_frontier_honest<T: Scalar>(lambda: T, b: T, network_power: T) -> T {
    lambda * b / network_power
}
