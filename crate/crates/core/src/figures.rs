//! Data series behind the sensitivity plots, optionally with simulated
//! bands.
//!
//! Wealth and profit columns are reported in tens of thousands of USD;
//! every other column keeps its natural unit.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::honest::{self, Pool};
use crate::montecarlo::{estimate, Functional, HorizonKind, McEstimate, Miner, Quantity};
use crate::params::{
    net_profit_frontier_honest, EconomicInputs, MiningParams, BITCOIN_BLOCKS_PER_HOUR,
    QUOTED_REWARD_2020,
};
use crate::segments::{frontier_segment1, frontier_segment2, Stage1Intensity, TwoSegmentModel};
use crate::selfish::{self, CharacteristicSolution, SelfishState};

/// Divisor applied to USD columns.
pub const WEALTH_UNIT: f64 = 1e4;

const DAY: f64 = 24.0;
const WEEK: f64 = 168.0;
const TWO_WEEKS: f64 = 336.0;
const HORIZONS: [(f64, &str); 3] = [(DAY, "1d"), (WEEK, "1w"), (TWO_WEEKS, "2w")];
const CONNECTIVITIES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
/// Electricity price of the connectivity comparison; below the withholding
/// frontier even at `q = 0.25`.
const CONNECTIVITY_PRICE: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
    Fig6,
    Fig7a,
    Fig7b,
    Fig8a,
    Fig8b,
    Fig9a,
    Fig9b,
    Fig9c,
    Fig9d,
    Fig9e,
    Fig9f,
    Fig10a,
    Fig10b,
}

impl FigureId {
    pub const ALL: [FigureId; 21] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig5a,
        FigureId::Fig5b,
        FigureId::Fig6,
        FigureId::Fig7a,
        FigureId::Fig7b,
        FigureId::Fig8a,
        FigureId::Fig8b,
        FigureId::Fig9a,
        FigureId::Fig9b,
        FigureId::Fig9c,
        FigureId::Fig9d,
        FigureId::Fig9e,
        FigureId::Fig9f,
        FigureId::Fig10a,
        FigureId::Fig10b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7a => "fig7a",
            FigureId::Fig7b => "fig7b",
            FigureId::Fig8a => "fig8a",
            FigureId::Fig8b => "fig8b",
            FigureId::Fig9a => "fig9a",
            FigureId::Fig9b => "fig9b",
            FigureId::Fig9c => "fig9c",
            FigureId::Fig9d => "fig9d",
            FigureId::Fig9e => "fig9e",
            FigureId::Fig9f => "fig9f",
            FigureId::Fig10a => "fig10a",
            FigureId::Fig10b => "fig10b",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            FigureId::Fig2a => "ruin probabilities against initial wealth, 6h horizon",
            FigureId::Fig2b => "expected profit against initial wealth, 6h horizon",
            FigureId::Fig3a => "ruin probability for exponential horizons of 1d, 1w, 2w",
            FigureId::Fig3b => "expected profit for exponential horizons of 1d, 1w, 2w",
            FigureId::Fig4a => "pool ruin probability against pool size",
            FigureId::Fig4b => "expected profit per pool member against pool size",
            FigureId::Fig5a => "ruin probability, protocol against withholding, 6h",
            FigureId::Fig5b => "expected profit, protocol against withholding, 6h",
            FigureId::Fig6 => "withholding net profit frontier against hashpower",
            FigureId::Fig7a => "withholding expected profit by connectivity, 2w",
            FigureId::Fig7b => "protocol minus withholding expected surplus, 2w",
            FigureId::Fig8a => "segment 1 net profit frontier",
            FigureId::Fig8b => "segment 2 net profit frontier",
            FigureId::Fig9a => "two-segment expected profit at 0.04 USD/kWh",
            FigureId::Fig9b => "two-segment expected profit at 0.05 USD/kWh",
            FigureId::Fig9c => "two-segment expected profit at 0.06 USD/kWh",
            FigureId::Fig9d => "two-segment expected profit at 0.07 USD/kWh",
            FigureId::Fig9e => "two-segment expected profit at 0.08 USD/kWh",
            FigureId::Fig9f => "two-segment expected profit at 0.09 USD/kWh",
            FigureId::Fig10a => "expected surplus against electricity price, 2w",
            FigureId::Fig10b => "expected profit against hashpower, 2w",
        }
    }

    /// Default number of grid points.
    fn default_points(self) -> usize {
        match self {
            FigureId::Fig2a | FigureId::Fig2b => 301,
            FigureId::Fig4a | FigureId::Fig4b => 99,
            FigureId::Fig6 | FigureId::Fig8a | FigureId::Fig8b => 199,
            _ => 201,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| invalid("figure", format!("unknown figure `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Unit {
    Usd,
    Probability,
    UsdPerKwh,
    Share,
    Count,
}

impl Unit {
    /// Divisor from the natural unit to the display unit.
    pub fn scale(self) -> f64 {
        match self {
            Unit::Usd => WEALTH_UNIT,
            _ => 1.0,
        }
    }
}

/// Simulated value at one grid point, in the unit of its column (not yet
/// scaled for display).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McPoint {
    pub mean: f64,
    pub stderr: f64,
}

impl McPoint {
    fn shifted(e: &McEstimate, by: f64) -> Self {
        Self {
            mean: e.mean + by,
            stderr: e.stderr,
        }
    }

    fn difference(a: &McEstimate, b: &McEstimate) -> Self {
        Self {
            mean: a.mean - b.mean,
            stderr: a.stderr.hypot(b.stderr),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: Unit,
    pub values: Vec<f64>,
    pub mc: Option<Vec<McPoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub id: FigureId,
    pub title: String,
    pub x: Column,
    pub series: Vec<Column>,
}

/// Seventeen significant digits, so every value survives a round trip.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.series.iter().find(|c| c.name == name)
    }

    pub fn len(&self) -> usize {
        self.x.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.values.is_empty()
    }

    /// Display-scaled values of a series.
    pub fn scaled(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)
            .map(|c| c.values.iter().map(|v| v / c.unit.scale()).collect())
    }

    /// Header row then one row per grid point; simulated columns are
    /// followed by `<name>_mc` and `<name>_mc_stderr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header = vec![self.x.name.clone()];
        for c in &self.series {
            header.push(c.name.clone());
            if c.mc.is_some() {
                header.push(format!("{}_mc", c.name));
                header.push(format!("{}_mc_stderr", c.name));
            }
        }
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.len() {
            let mut row = vec![format_value(self.x.values[i] / self.x.unit.scale())];
            for c in &self.series {
                let s = c.unit.scale();
                row.push(format_value(c.values[i] / s));
                if let Some(mc) = &c.mc {
                    row.push(format_value(mc[i].mean / s));
                    row.push(format_value(mc[i].stderr / s));
                }
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Share of simulated points whose band `mean ± z·stderr` contains the
    /// closed form, over all simulated columns. `None` without simulation.
    pub fn band_containment(&self, z: f64) -> Option<f64> {
        let mut hits = 0usize;
        let mut total = 0usize;
        for c in &self.series {
            if let Some(mc) = &c.mc {
                for (v, m) in c.values.iter().zip(mc) {
                    total += 1;
                    let d = (v - m.mean).abs();
                    if d <= z * m.stderr || d <= 1e-9 * v.abs().max(1e-12) {
                        hits += 1;
                    }
                }
            }
        }
        (total > 0).then(|| hits as f64 / total as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McOptions {
    pub paths: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureOptions {
    /// Electricity price and hashshare are overridden per figure.
    pub econ: EconomicInputs<f64>,
    pub lambda: f64,
    pub points: Option<usize>,
    pub mc: Option<McOptions>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            econ: EconomicInputs::january_2020()
                .with_reward_override(Some(QUOTED_REWARD_2020))
                .expect("calibration is valid"),
            lambda: BITCOIN_BLOCKS_PER_HOUR,
            points: None,
            mc: None,
        }
    }
}

type Exact<'a> = Box<dyn Fn(f64) -> Result<f64> + Sync + 'a>;
type Simulated<'a> = Box<dyn Fn(f64, McOptions) -> Result<McPoint> + Sync + 'a>;

struct Series<'a> {
    name: String,
    unit: Unit,
    exact: Exact<'a>,
    mc: Option<Simulated<'a>>,
}

impl<'a> Series<'a> {
    fn new(name: impl Into<String>, unit: Unit, exact: impl Fn(f64) -> Result<f64> + Sync + 'a) -> Self {
        Self {
            name: name.into(),
            unit,
            exact: Box::new(exact),
            mc: None,
        }
    }

    fn with_mc(mut self, mc: impl Fn(f64, McOptions) -> Result<McPoint> + Sync + 'a) -> Self {
        self.mc = Some(Box::new(mc));
        self
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn build(
    id: FigureId,
    x: (&str, Unit, Vec<f64>),
    series: Vec<Series<'_>>,
    opts: &FigureOptions,
) -> Result<Table> {
    let (x_name, x_unit, xs) = x;
    let mut columns = Vec::with_capacity(series.len());
    for (j, s) in series.into_iter().enumerate() {
        let values = xs.iter().map(|&v| (s.exact)(v)).collect::<Result<Vec<_>>>()?;
        let mc = match (&s.mc, opts.mc) {
            (Some(sim), Some(mo)) => Some(
                xs.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let seed = splitmix(mo.seed ^ splitmix(((j as u64) << 32) | i as u64));
                        sim(v, McOptions { paths: mo.paths, seed })
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };
        columns.push(Column {
            name: s.name,
            unit: s.unit,
            values,
            mc,
        });
    }
    Ok(Table {
        id,
        title: id.title().to_string(),
        x: Column {
            name: x_name.to_string(),
            unit: x_unit,
            values: xs,
            mc: None,
        },
        series: columns,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

struct Setup<'a> {
    opts: &'a FigureOptions,
}

impl Setup<'_> {
    fn econ(&self, price: f64, share: f64) -> Result<EconomicInputs<f64>> {
        self.opts.econ.with_electricity_price(price)?.with_hashshare(share)
    }

    fn params(&self, price: f64, share: f64, q: f64, t: f64) -> Result<MiningParams<f64>> {
        MiningParams::from_economics(&self.econ(price, share)?, self.opts.lambda, q, 0.0, t)
    }
}

fn mc_at(
    miner: Miner,
    functional: Functional,
    horizon: HorizonKind,
    params: &MiningParams<f64>,
    z: SelfishState,
    u: f64,
    mo: McOptions,
) -> Result<McEstimate> {
    estimate(
        Quantity::new(miner, functional, horizon),
        &params.with_u(u)?,
        z,
        mo.paths,
        mo.seed,
    )
}

fn ruin_point(miner: Miner, horizon: HorizonKind, params: MiningParams<f64>) -> impl Fn(f64, McOptions) -> Result<McPoint> + Sync {
    move |u, mo| {
        let e = mc_at(miner, Functional::Ruin, horizon, &params, SelfishState::Empty, u, mo)?;
        Ok(McPoint::shifted(&e, 0.0))
    }
}

/// Simulated terminal surplus, minus `u` when `net` is set.
fn value_point(
    miner: Miner,
    horizon: HorizonKind,
    params: MiningParams<f64>,
    net: bool,
) -> impl Fn(f64, McOptions) -> Result<McPoint> + Sync {
    move |u, mo| {
        let e = mc_at(miner, Functional::Value, horizon, &params, SelfishState::Empty, u, mo)?;
        Ok(McPoint::shifted(&e, if net { -u } else { 0.0 }))
    }
}

/// Regenerates the data behind figure `id`.
pub fn generate(id: FigureId, opts: &FigureOptions) -> Result<Table> {
    let n = opts.points.unwrap_or(id.default_points());
    if n == 0 {
        return Err(invalid("points", "need at least one grid point"));
    }
    let setup = Setup { opts };
    use FigureId::*;
    match id {
        Fig2a | Fig2b => {
            let t = 6.0;
            let par = setup.params(0.06, 0.1, 1.0, t)?;
            let us = linspace(0.0, 300_000.0, n);
            let series = if id == Fig2a {
                vec![
                    Series::new("psi_det", Unit::Probability, move |u| Ok(honest::ruin_prob_finite(&par, u, t)))
                        .with_mc(ruin_point(Miner::Honest, HorizonKind::Deterministic, par)),
                    Series::new("psi_inf", Unit::Probability, move |u| Ok(honest::ruin_prob_infinite(&par, u)))
                        .with_mc(ruin_point(Miner::Honest, HorizonKind::Infinite, par)),
                    Series::new("psi_exp", Unit::Probability, move |u| honest::ruin_prob_exp_horizon(&par, u))
                        .with_mc(ruin_point(Miner::Honest, HorizonKind::Exponential, par)),
                ]
            } else {
                let target = par.honest_drift() * t;
                vec![
                    Series::new("profit_det", Unit::Usd, move |u| {
                        Ok(honest::value_deterministic(&par, u, t)? - u)
                    })
                    .with_mc(value_point(Miner::Honest, HorizonKind::Deterministic, par, true)),
                    Series::new("profit_exp", Unit::Usd, move |u| Ok(honest::value_exp_horizon(&par, u)? - u))
                        .with_mc(value_point(Miner::Honest, HorizonKind::Exponential, par, true)),
                    Series::new("target", Unit::Usd, move |_| Ok(target)),
                ]
            };
            build(id, ("u", Unit::Usd, us), series, opts)
        }
        Fig3a | Fig3b => {
            let us = linspace(0.0, 2_000_000.0, n);
            let mut series = Vec::new();
            for (t, tag) in HORIZONS {
                let par = setup.params(0.06, 0.1, 1.0, t)?;
                if id == Fig3a {
                    series.push(
                        Series::new(format!("psi_exp_{tag}"), Unit::Probability, move |u| {
                            honest::ruin_prob_exp_horizon(&par, u)
                        })
                        .with_mc(ruin_point(Miner::Honest, HorizonKind::Exponential, par)),
                    );
                } else {
                    series.push(
                        Series::new(format!("profit_exp_{tag}"), Unit::Usd, move |u| {
                            Ok(honest::value_exp_horizon(&par, u)? - u)
                        })
                        .with_mc(value_point(Miner::Honest, HorizonKind::Exponential, par, true)),
                    );
                }
            }
            if id == Fig3a {
                let par = setup.params(0.06, 0.1, 1.0, DAY)?;
                series.push(Series::new("psi_inf", Unit::Probability, move |u| {
                    Ok(honest::ruin_prob_infinite(&par, u))
                }));
            } else {
                for (t, tag) in HORIZONS {
                    let target = setup.params(0.06, 0.1, 1.0, t)?.honest_drift() * t;
                    series.push(Series::new(format!("target_{tag}"), Unit::Usd, move |_| Ok(target)));
                }
            }
            build(id, ("u", Unit::Usd, us), series, opts)
        }
        Fig4a | Fig4b => {
            let sizes: Vec<f64> = (1..=n.min(99)).map(|k| k as f64).collect();
            let econ = setup.econ(0.06, 0.1)?;
            let lambda = opts.lambda;
            let mut series = Vec::new();
            for (t, tag) in HORIZONS {
                let metrics = move |m: f64| honest::pool_metrics(&econ, lambda, &Pool::standard(m as usize), t);
                let pool_params = move |m: f64| -> Result<MiningParams<f64>> {
                    let pool = Pool::<f64>::standard(m as usize);
                    let share = m * pool.member_share;
                    MiningParams::from_economics(&econ.with_hashshare(share)?, lambda, 1.0, m * pool.member_capital, t)
                };
                if id == Fig4a {
                    series.push(
                        Series::new(format!("psi_exp_{tag}"), Unit::Probability, move |m| Ok(metrics(m)?.psi_exp))
                            .with_mc(move |m, mo| {
                                let par = pool_params(m)?;
                                let e = mc_at(Miner::Honest, Functional::Ruin, HorizonKind::Exponential, &par, SelfishState::Empty, par.u(), mo)?;
                                Ok(McPoint::shifted(&e, 0.0))
                            }),
                    );
                } else {
                    series.push(
                        Series::new(format!("profit_per_member_{tag}"), Unit::Usd, move |m| {
                            Ok(metrics(m)?.profit_per_member)
                        })
                        .with_mc(move |m, mo| {
                            let par = pool_params(m)?;
                            let e = mc_at(Miner::Honest, Functional::Value, HorizonKind::Exponential, &par, SelfishState::Empty, par.u(), mo)?;
                            Ok(McPoint {
                                mean: (e.mean - par.u()) / m,
                                stderr: e.stderr / m,
                            })
                        }),
                    );
                }
            }
            build(id, ("members", Unit::Count, sizes), series, opts)
        }
        Fig5a | Fig5b => {
            let t = 6.0;
            let par = setup.params(0.04, 0.1, 0.5, t)?;
            let sol = CharacteristicSolution::solve(&par)?;
            let us = linspace(0.0, 200_000.0, n);
            let series = if id == Fig5a {
                vec![
                    Series::new("psi_exp_honest", Unit::Probability, move |u| honest::ruin_prob_exp_horizon(&par, u))
                        .with_mc(ruin_point(Miner::Honest, HorizonKind::Exponential, par)),
                    Series::new("psi_exp_selfish", Unit::Probability, move |u| Ok(sol.ruin(u)))
                        .with_mc(ruin_point(Miner::Selfish, HorizonKind::Exponential, par)),
                ]
            } else {
                vec![
                    Series::new("profit_exp_honest", Unit::Usd, move |u| Ok(honest::value_exp_horizon(&par, u)? - u))
                        .with_mc(value_point(Miner::Honest, HorizonKind::Exponential, par, true)),
                    Series::new("profit_exp_selfish", Unit::Usd, move |u| Ok(sol.value(u) - u))
                        .with_mc(value_point(Miner::Selfish, HorizonKind::Exponential, par, true)),
                ]
            };
            build(id, ("u", Unit::Usd, us), series, opts)
        }
        Fig6 => {
            let ps = linspace(0.005, 0.995, n);
            let econ = setup.econ(0.06, 0.1)?;
            let (lambda, b, w) = (opts.lambda, econ.reward(), econ.network_power());
            let mut series: Vec<Series> = CONNECTIVITIES
                .into_iter()
                .map(|q| {
                    Series::new(format!("frontier_q{q}"), Unit::UsdPerKwh, move |p| {
                        Ok(selfish::net_profit_frontier_selfish(p, q, lambda, b, w))
                    })
                })
                .collect();
            series.push(Series::new("frontier_honest", Unit::UsdPerKwh, move |_| {
                Ok(net_profit_frontier_honest(lambda, b, w))
            }));
            build(id, ("p", Unit::Share, ps), series, opts)
        }
        Fig7a | Fig7b => {
            let par = setup.params(CONNECTIVITY_PRICE, 0.1, 1.0, TWO_WEEKS)?;
            let us = linspace(0.0, 2_000_000.0, n);
            let mut series = Vec::new();
            if id == Fig7a {
                series.push(
                    Series::new("profit_exp_honest", Unit::Usd, move |u| Ok(honest::value_exp_horizon(&par, u)? - u))
                        .with_mc(value_point(Miner::Honest, HorizonKind::Exponential, par, true)),
                );
            }
            for q in CONNECTIVITIES {
                let pq = par.with_q(q)?;
                let sol = CharacteristicSolution::solve(&pq)?;
                if id == Fig7a {
                    series.push(
                        Series::new(format!("profit_exp_selfish_q{q}"), Unit::Usd, move |u| Ok(sol.value(u) - u))
                            .with_mc(value_point(Miner::Selfish, HorizonKind::Exponential, pq, true)),
                    );
                } else {
                    series.push(
                        Series::new(format!("gap_q{q}"), Unit::Usd, move |u| {
                            Ok(honest::value_exp_horizon(&pq, u)? - sol.value(u))
                        })
                        .with_mc(move |u, mo| {
                            let h = mc_at(Miner::Honest, Functional::Value, HorizonKind::Exponential, &pq, SelfishState::Empty, u, mo)?;
                            let s = mc_at(
                                Miner::Selfish,
                                Functional::Value,
                                HorizonKind::Exponential,
                                &pq,
                                SelfishState::Empty,
                                u,
                                McOptions { seed: splitmix(mo.seed), ..mo },
                            )?;
                            Ok(McPoint::difference(&h, &s))
                        }),
                    );
                }
            }
            build(id, ("u", Unit::Usd, us), series, opts)
        }
        Fig8a | Fig8b => {
            let ps = linspace(0.005, 0.995, n);
            let econ = setup.econ(0.06, 0.1)?;
            let lambda = opts.lambda;
            let honest_frontier = net_profit_frontier_honest(lambda, econ.reward(), econ.network_power());
            let main = if id == Fig8a {
                Series::new("frontier_segment1", Unit::UsdPerKwh, move |p| {
                    Ok(frontier_segment1(p, 0.5, lambda, &econ))
                })
            } else {
                Series::new("frontier_segment2", Unit::UsdPerKwh, move |p| Ok(frontier_segment2(p, lambda, &econ)))
            };
            let series = vec![
                main,
                Series::new("frontier_honest", Unit::UsdPerKwh, move |_| Ok(honest_frontier)),
            ];
            build(id, ("p", Unit::Share, ps), series, opts)
        }
        Fig9a | Fig9b | Fig9c | Fig9d | Fig9e | Fig9f => {
            let price = match id {
                Fig9a => 0.04,
                Fig9b => 0.05,
                Fig9c => 0.06,
                Fig9d => 0.07,
                Fig9e => 0.08,
                _ => 0.09,
            };
            let econ = setup.econ(price, 0.1)?;
            let par = MiningParams::from_economics(&econ, opts.lambda, 0.5, 0.0, TWO_WEEKS)?;
            let model = TwoSegmentModel::new(&par, econ.hashes_per_hour(), Stage1Intensity::Network)?;
            let us = linspace(0.0, 5_000_000.0, n);
            let honest_par = *model.honest_params();
            let (m1, m2, m3, m4) = (model.clone(), model.clone(), model.clone(), model);
            let series = vec![
                Series::new("profit_honest", Unit::Usd, move |u| m1.honest_profit(u))
                    .with_mc(value_point(Miner::Honest, HorizonKind::Exponential, honest_par, true)),
                Series::new("profit_selfish", Unit::Usd, move |u| Ok(m2.selfish(u)?.profit)).with_mc(
                    move |u, mo| {
                        let r = m4.simulate_selfish(u, mo.paths, mo.seed)?;
                        Ok(McPoint {
                            mean: r.profit,
                            stderr: r.profit_stderr,
                        })
                    },
                ),
                Series::new("segment2_profit_selfish", Unit::Usd, move |u| Ok(m3.selfish(u)?.segment2_profit)),
            ];
            build(id, ("u", Unit::Usd, us), series, opts)
        }
        Fig10a => {
            let prices = linspace(0.01, 0.10, n);
            let lambda = opts.lambda;
            let base = opts.econ.with_hashshare(0.1)?;
            let surplus_honest = move |price: f64, u: f64| -> Result<f64> {
                let par = MiningParams::from_economics(&base.with_electricity_price(price)?, lambda, 1.0, u, TWO_WEEKS)?;
                honest::value_exp_horizon(&par, u)
            };
            let mut series = Vec::new();
            for k in [1.0, 5.0, 10.0, 50.0] {
                let u = k * WEALTH_UNIT;
                series.push(Series::new(format!("surplus_honest_u{k}"), Unit::Usd, move |price| {
                    surplus_honest(price, u)
                }));
            }
            let u = 10.0 * WEALTH_UNIT;
            for q in CONNECTIVITIES {
                series.push(Series::new(format!("surplus_selfish_q{q}_u10"), Unit::Usd, move |price| {
                    let par = MiningParams::from_economics(&base.with_electricity_price(price)?, lambda, q, u, TWO_WEEKS)?;
                    Ok(CharacteristicSolution::solve(&par)?.value(u))
                }));
            }
            build(id, ("electricity_price", Unit::UsdPerKwh, prices), series, opts)
        }
        Fig10b => {
            let ps = linspace(0.01, 0.5, n);
            let lambda = opts.lambda;
            let base = opts.econ.with_electricity_price(0.06)?;
            let mut series = Vec::new();
            for k in [1.0, 5.0, 10.0, 50.0] {
                let u = k * WEALTH_UNIT;
                series.push(Series::new(format!("profit_honest_u{k}"), Unit::Usd, move |p| {
                    let par = MiningParams::from_economics(&base.with_hashshare(p)?, lambda, 1.0, u, TWO_WEEKS)?;
                    Ok(honest::value_exp_horizon(&par, u)? - u)
                }));
            }
            let u = 10.0 * WEALTH_UNIT;
            for q in CONNECTIVITIES {
                series.push(Series::new(format!("profit_selfish_q{q}_u10"), Unit::Usd, move |p| {
                    let par = MiningParams::from_economics(&base.with_hashshare(p)?, lambda, q, u, TWO_WEEKS)?;
                    Ok(CharacteristicSolution::solve(&par)?.value(u) - u)
                }));
            }
            build(id, ("p", Unit::Share, ps), series, opts)
        }
    }
}
