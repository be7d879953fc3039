//! Fully resolved run descriptions and their evaluation.

use std::collections::BTreeSet;
use std::str::FromStr;

use log::{info, warn};
use minerisk::figures::{generate, FigureId, FigureOptions, McOptions};
use minerisk::honest::{self, Pool};
use minerisk::montecarlo::{estimate, Functional, HorizonKind, Miner, Quantity};
use minerisk::params::net_profit_frontier_honest;
use minerisk::segments::{Stage1Intensity, TwoSegmentModel, TWO_SEGMENT_HOURS};
use minerisk::selfish::{net_profit_frontier_selfish, ruin_selfish_iid, CharacteristicSolution, SelfishState};
use minerisk::{Economics, Params};
use serde::{Deserialize, Serialize};

use crate::failure::{op, Failure};
use crate::output::{Band, Format, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variable {
    U,
    T,
    P,
    Q,
    Lambda,
    Electricity,
    PriceBtc,
    Members,
}

impl Variable {
    fn name(self) -> &'static str {
        match self {
            Variable::U => "u",
            Variable::T => "t",
            Variable::P => "p",
            Variable::Q => "q",
            Variable::Lambda => "lambda",
            Variable::Electricity => "electricity",
            Variable::PriceBtc => "price_btc",
            Variable::Members => "members",
        }
    }
}

/// Evenly spaced axis `lo..=hi` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub variable: Variable,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn new(variable: Variable, lo: f64, hi: f64, steps: usize) -> Result<Self, Failure> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Failure::invalid("sweep bounds must be finite"));
        }
        if steps == 0 {
            return Err(Failure::invalid("sweep needs at least one step"));
        }
        if lo > hi || (steps == 1 && lo != hi) || (steps > 1 && lo == hi) {
            return Err(Failure::invalid(format!(
                "sweep {lo}..{hi} with {steps} steps is not an increasing axis"
            )));
        }
        Ok(Self { variable, lo, hi, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.hi } else { self.lo + h * i as f64 })
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = Failure;

    /// `variable=lo:hi:steps`, e.g. `u=0:300000:301`.
    fn from_str(s: &str) -> Result<Self, Failure> {
        let bad = || Failure::invalid(format!("sweep `{s}` is not of the form variable=lo:hi:steps"));
        let (var, axis) = s.split_once('=').ok_or_else(bad)?;
        let variable = match var.trim() {
            "u" => Variable::U,
            "t" => Variable::T,
            "p" => Variable::P,
            "q" => Variable::Q,
            "lambda" => Variable::Lambda,
            "electricity" => Variable::Electricity,
            "price-btc" | "price_btc" => Variable::PriceBtc,
            "members" => Variable::Members,
            other => return Err(Failure::invalid(format!("unknown sweep variable `{other}`"))),
        };
        let parts: Vec<&str> = axis.split(':').collect();
        let [lo, hi, steps] = parts[..] else { return Err(bad()) };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        let steps = steps.trim().parse::<usize>().map_err(|_| bad())?;
        Sweep::new(variable, num(lo)?, num(hi)?, steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub paths: u64,
    pub seed: u64,
}

impl Simulation {
    /// Seed of grid point `i`.
    fn seed_at(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    HonestRuin,
    HonestValue,
    SelfishRuin { state: SelfishState },
    SelfishValue { state: SelfishState },
    Frontier { qs: Vec<f64> },
    Pool { member_share: f64, member_capital: f64 },
    Segments,
    Simulate { quantity: String, state: SelfishState },
    Figure { id: String, points: Option<usize> },
}

impl Command {
    fn default_sweep(&self, u: f64) -> Sweep {
        let (variable, lo, hi, steps) = match self {
            Command::Frontier { .. } => (Variable::P, 0.01, 0.99, 99),
            Command::Pool { .. } => (Variable::Members, 1.0, 99.0, 99),
            _ => (Variable::U, u, u, 1),
        };
        Sweep { variable, lo, hi, steps }
    }
}

/// Everything a run depends on. A manifest stores one of these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub command: Command,
    pub economics: Economics,
    pub lambda: f64,
    pub q: f64,
    pub u: f64,
    pub t: f64,
    pub sweep: Option<Sweep>,
    pub mc: Option<Simulation>,
    pub format: Format,
}

/// Parameters at one grid point.
struct Point {
    econ: Economics,
    lambda: f64,
    q: f64,
    u: f64,
    t: f64,
    members: usize,
}

impl Point {
    fn describe(&self) -> String {
        format!("electricity {} USD/kWh, p = {}, lambda = {}", self.econ.electricity_price, self.econ.hashshare, self.lambda)
    }

    fn params(&self) -> Result<Params, Failure> {
        op(
            "MiningParams::from_economics",
            Params::from_economics(&self.econ, self.lambda, self.q, self.u, self.t),
        )
    }
}

impl Scenario {
    pub fn sweep(&self) -> Sweep {
        self.sweep.unwrap_or_else(|| self.command.default_sweep(self.u))
    }

    /// Checks the scenario without running it.
    pub fn validate(&self) -> Result<(), Failure> {
        let sweep = self.sweep();
        let allowed: &[Variable] = match &self.command {
            Command::Frontier { .. } => &[Variable::P, Variable::Lambda, Variable::PriceBtc],
            Command::Pool { .. } => &[Variable::Members, Variable::T, Variable::Electricity, Variable::PriceBtc],
            Command::Figure { .. } => &[],
            _ => &[
                Variable::U,
                Variable::T,
                Variable::P,
                Variable::Q,
                Variable::Lambda,
                Variable::Electricity,
                Variable::PriceBtc,
            ],
        };
        if self.sweep.is_some() && !allowed.contains(&sweep.variable) {
            return Err(Failure::invalid(format!(
                "`{}` cannot be swept for this command",
                sweep.variable.name()
            )));
        }
        if let Some(mc) = self.mc {
            if mc.paths < 2 {
                return Err(Failure::invalid(format!("--paths must be at least 2, got {}", mc.paths)));
            }
        }
        match &self.command {
            Command::Frontier { qs } => {
                if qs.is_empty() {
                    return Err(Failure::invalid("--q needs at least one value"));
                }
                if let Some(q) = qs.iter().find(|q| !(0.0..=1.0).contains(*q)) {
                    return Err(Failure::invalid(format!("q must lie in [0, 1], got {q}")));
                }
            }
            Command::Simulate { quantity, .. } => {
                op("quantity", quantity.parse::<Quantity>())?;
                if self.mc.is_none() {
                    return Err(Failure::invalid("simulate needs --paths and --seed"));
                }
            }
            Command::Figure { id, .. } => {
                op("figure", id.parse::<FigureId>())?;
            }
            _ => {}
        }
        for x in sweep.points() {
            let point = self.point(x)?;
            if !matches!(self.command, Command::Frontier { .. } | Command::Figure { .. } | Command::Pool { .. }) {
                point.params()?;
            }
        }
        Ok(())
    }

    fn point(&self, x: f64) -> Result<Point, Failure> {
        let mut p = Point {
            econ: self.economics,
            lambda: self.lambda,
            q: self.q,
            u: self.u,
            t: self.t,
            members: 1,
        };
        let sweep = self.sweep();
        match sweep.variable {
            Variable::U => p.u = x,
            Variable::T => p.t = x,
            Variable::Q => p.q = x,
            Variable::Lambda => p.lambda = x,
            Variable::P => p.econ = op("hashshare", p.econ.with_hashshare(x))?,
            Variable::Electricity => p.econ = op("electricity", p.econ.with_electricity_price(x))?,
            Variable::PriceBtc => {
                p.econ.price_btc = x;
                op("price_btc", p.econ.validate())?;
            }
            Variable::Members => {
                if x < 1.0 || x.fract() != 0.0 {
                    return Err(Failure::invalid(format!("pool size must be a positive integer, got {x}")));
                }
                p.members = x as usize;
            }
        }
        Ok(p)
    }

    pub fn run(&self) -> Result<Output, Failure> {
        self.validate()?;
        if let Command::Figure { id, points } = &self.command {
            return self.figure(id, *points);
        }
        let sweep = self.sweep();
        let xs = sweep.points();
        let points: Vec<Point> = xs.iter().map(|&x| self.point(x)).collect::<Result<_, _>>()?;
        info!("{} grid points over {}", xs.len(), sweep.variable.name());
        if !matches!(self.command, Command::Frontier { .. } | Command::Pool { .. }) {
            warn_once(&points)?;
        }
        let mut out = Output::new(sweep.variable.name(), xs);
        match &self.command {
            Command::HonestRuin => {
                out.push("psi_det", self.exact(&points, |par, pt| Ok(honest::ruin_prob_finite(par, pt.u, pt.t)))?, self.band(&points, "honest-ruin-det", SelfishState::Empty)?);
                out.push("psi_inf", self.exact(&points, |par, pt| Ok(honest::ruin_prob_infinite(par, pt.u)))?, None);
                out.push("psi_exp", self.exact(&points, |par, pt| op("ruin_prob_exp_horizon", honest::ruin_prob_exp_horizon(par, pt.u)))?, self.band(&points, "honest-ruin-exp", SelfishState::Empty)?);
            }
            Command::HonestValue => {
                out.push("value_det", self.exact(&points, |par, pt| op("value_deterministic", honest::value_deterministic(par, pt.u, pt.t)))?, self.band(&points, "honest-value-det", SelfishState::Empty)?);
                out.push("value_exp", self.exact(&points, |par, pt| op("value_exp_horizon", honest::value_exp_horizon(par, pt.u)))?, self.band(&points, "honest-value-exp", SelfishState::Empty)?);
            }
            Command::SelfishRuin { state } => {
                let z = *state;
                out.push("psi_exp", self.exact(&points, |par, pt| Ok(solve(par)?.ruin_state(z, pt.u)))?, self.band(&points, "selfish-ruin-exp", z)?);
                out.push("psi_iid", self.exact(&points, |par, pt| Ok(ruin_selfish_iid(par, pt.u)))?, None);
            }
            Command::SelfishValue { state } => {
                let z = *state;
                out.push("value_exp", self.exact(&points, |par, pt| Ok(solve(par)?.value_state(z, pt.u)))?, self.band(&points, "selfish-value-exp", z)?);
            }
            Command::Frontier { qs } => {
                let honest_f = points.iter().map(|pt| net_profit_frontier_honest(pt.lambda, pt.econ.reward(), pt.econ.network_power())).collect();
                out.push("frontier_honest", honest_f, None);
                for &q in qs {
                    let values = points
                        .iter()
                        .map(|pt| net_profit_frontier_selfish(pt.econ.hashshare, q, pt.lambda, pt.econ.reward(), pt.econ.network_power()))
                        .collect();
                    out.push(format!("frontier_q{q}"), values, None);
                }
            }
            Command::Pool { member_share, member_capital } => {
                let mut psi = Vec::new();
                let mut profit = Vec::new();
                for pt in &points {
                    let pool = Pool {
                        members: pt.members,
                        member_share: *member_share,
                        member_capital: *member_capital,
                    };
                    let m = op("pool_metrics", honest::pool_metrics(&pt.econ, pt.lambda, &pool, pt.t))?;
                    psi.push(m.psi_exp);
                    profit.push(m.profit_per_member);
                }
                out.push("psi_exp", psi, None);
                out.push("profit_per_member", profit, None);
            }
            Command::Segments => self.segments(&points, &mut out)?,
            Command::Simulate { quantity, state } => {
                let q: Quantity = op("quantity", quantity.parse())?;
                let bands = self.band(&points, &q.to_string(), *state)?.expect("validated");
                out.push(format!("{q}_mc"), bands.iter().map(|b| b.mean).collect(), None);
                out.push(format!("{q}_mc_stderr"), bands.iter().map(|b| b.stderr).collect(), None);
            }
            Command::Figure { .. } => unreachable!(),
        }
        Ok(out)
    }

    fn exact(&self, points: &[Point], f: impl Fn(&Params, &Point) -> Result<f64, Failure>) -> Result<Vec<f64>, Failure> {
        points
            .iter()
            .map(|pt| f(&pt.params()?, pt))
            .collect()
    }

    fn band(&self, points: &[Point], tag: &str, z: SelfishState) -> Result<Option<Vec<Band>>, Failure> {
        let Some(mc) = self.mc else { return Ok(None) };
        let q: Quantity = op("quantity", tag.parse())?;
        points
            .iter()
            .enumerate()
            .map(|(i, pt)| {
                let e = op("estimate", estimate(q, &pt.params()?, z, mc.paths, mc.seed_at(i)))?;
                Ok(Band {
                    mean: e.mean,
                    stderr: e.stderr,
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn segments(&self, points: &[Point], out: &mut Output) -> Result<(), Failure> {
        let mut honest_p = Vec::new();
        let mut selfish_p = Vec::new();
        let mut segment2 = Vec::new();
        let mut honest_mc = Vec::new();
        let mut selfish_mc = Vec::new();
        for (i, pt) in points.iter().enumerate() {
            let par = pt.params()?;
            let model = op(
                "TwoSegmentModel::new",
                TwoSegmentModel::new(&par, pt.econ.hashes_per_hour(), Stage1Intensity::Network),
            )?;
            honest_p.push(op("honest_profit", model.honest_profit(pt.u))?);
            let s = op("selfish two-segment profit", model.selfish(pt.u))?;
            selfish_p.push(s.profit);
            segment2.push(s.segment2_profit);
            if let Some(mc) = self.mc {
                let q = Quantity::new(Miner::Honest, Functional::Value, HorizonKind::Exponential);
                let hp = op("MiningParams::with_t", par.with_t(TWO_SEGMENT_HOURS))?;
                let e = op("estimate", estimate(q, &hp, SelfishState::Empty, mc.paths, mc.seed_at(i)))?;
                honest_mc.push(Band {
                    mean: e.mean - pt.u,
                    stderr: e.stderr,
                });
                let two = op("simulate_selfish", model.simulate_selfish(pt.u, mc.paths, mc.seed_at(i)))?;
                selfish_mc.push(Band {
                    mean: two.profit,
                    stderr: two.profit_stderr,
                });
            }
        }
        let some = |v: Vec<Band>| self.mc.map(|_| v);
        out.push("profit_honest", honest_p, some(honest_mc));
        out.push("profit_selfish", selfish_p, some(selfish_mc));
        out.push("segment2_profit_selfish", segment2, None);
        Ok(())
    }

    fn figure(&self, id: &str, points: Option<usize>) -> Result<Output, Failure> {
        let id: FigureId = op("figure", id.parse())?;
        let opts = FigureOptions {
            econ: self.economics,
            lambda: self.lambda,
            points,
            mc: self.mc.map(|m| McOptions {
                paths: m.paths,
                seed: m.seed,
            }),
        };
        let table = op(&format!("figure {id}"), generate(id, &opts))?;
        Ok(Output::from_table(&table))
    }
}

fn warn_once(points: &[Point]) -> Result<(), Failure> {
    let mut seen = BTreeSet::new();
    for pt in points {
        let par = pt.params()?;
        let mut notes = par.honest_warnings();
        if !par.honest_net_profit() {
            notes.push(format!("no net profit at {}: pλb − c = {:.6e}", pt.describe(), par.honest_drift()));
        }
        for w in notes {
            if seen.insert(w.clone()) {
                warn!("{w}");
            }
        }
    }
    Ok(())
}

fn solve(par: &Params) -> Result<CharacteristicSolution<f64>, Failure> {
    op("CharacteristicSolution::solve", CharacteristicSolution::solve(par))
}
