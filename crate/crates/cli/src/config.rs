//! Flags, the config file, and their merge. Flags win over the file, the
//! file wins over the built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use log::warn;
use minerisk::params::QUOTED_REWARD_2020;
use minerisk::selfish::SelfishState;
use minerisk::Economics;
use serde::Deserialize;

use crate::failure::{op, Failure};
use crate::output::Format;
use crate::scenario::{Command, Scenario, Simulation, Sweep};

const DEFAULT_U: f64 = 41_000.0;
const DEFAULT_T: f64 = 6.0;
const DEFAULT_Q: f64 = 0.5;
const DEFAULT_PATHS: u64 = 250_000;
const DEFAULT_SEED: u64 = 1;
const FRONTIER_QS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// TOML file whose keys are the long flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Network block rate, blocks per hour.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Hashshare of the miner.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Connectivity during a fork; a comma-separated list for `frontier`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// Coin price, USD.
    #[arg(long, global = true)]
    pub price_btc: Option<f64>,
    /// Coins per block.
    #[arg(long, global = true)]
    pub n_btc: Option<f64>,
    /// Block reward in USD, replacing n-btc × price-btc.
    #[arg(long, global = true)]
    pub reward: Option<f64>,
    /// Electricity price, USD per kWh.
    #[arg(long, global = true)]
    pub electricity: Option<f64>,
    /// Network energy use, TWh per year.
    #[arg(long, global = true)]
    pub twh_year: Option<f64>,
    /// Network hashrate, hashes per second.
    #[arg(long, global = true)]
    pub hashrate: Option<f64>,
    /// Initial wealth, USD.
    #[arg(long, global = true)]
    pub u: Option<f64>,
    /// Horizon in hours (mean of the exponential horizon).
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Starting state of the withholding chain: empty, one or fork.
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Axis `variable=lo:hi:steps`.
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    /// Add Monte-Carlo columns.
    #[arg(long, global = true)]
    pub mc: bool,
    /// Monte-Carlo paths per grid point.
    #[arg(long, global = true)]
    pub paths: Option<u64>,
    /// Monte-Carlo seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write a JSON run manifest for `replay`.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    #[default]
    None,
    One(f64),
    Many(Vec<f64>),
}

/// Config file contents; the same keys as the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    lambda: Option<f64>,
    p: Option<f64>,
    #[serde(default)]
    q: OneOrMany,
    price_btc: Option<f64>,
    n_btc: Option<f64>,
    reward: Option<f64>,
    electricity: Option<f64>,
    twh_year: Option<f64>,
    hashrate: Option<f64>,
    u: Option<f64>,
    t: Option<f64>,
    state: Option<String>,
    sweep: Option<String>,
    mc: Option<bool>,
    paths: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    manifest: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(|e| Failure::invalid(format!("{e:#}")))?;
    toml::from_str(&text).map_err(|e| Failure::invalid(format!("config {}: {e}", path.display())))
}

/// Merged settings, before a command is attached.
#[derive(Debug)]
pub struct Settings {
    pub economics: Economics,
    pub lambda: f64,
    pub qs: Vec<f64>,
    pub q_given: bool,
    pub u: f64,
    pub t: f64,
    pub state: SelfishState,
    pub sweep: Option<Sweep>,
    pub mc: bool,
    pub paths: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub manifest: Option<PathBuf>,
}

impl Flags {
    pub fn resolve(&self) -> Result<Settings, Failure> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let file_q = match file.q {
            OneOrMany::None => None,
            OneOrMany::One(q) => Some(vec![q]),
            OneOrMany::Many(qs) => Some(qs),
        };

        let mut econ = Economics::january_2020();
        let set = |slot: &mut f64, flag: Option<f64>, file: Option<f64>| {
            if let Some(v) = flag.or(file) {
                *slot = v;
            }
        };
        set(&mut econ.n_btc, self.n_btc, file.n_btc);
        set(&mut econ.price_btc, self.price_btc, file.price_btc);
        set(&mut econ.network_twh_per_year, self.twh_year, file.twh_year);
        set(&mut econ.electricity_price, self.electricity, file.electricity);
        set(&mut econ.hashshare, self.p, file.p);
        set(&mut econ.network_hashrate, self.hashrate, file.hashrate);
        // The quoted January 2020 reward unless the coin inputs are given.
        let coins_given = [self.n_btc, file.n_btc, self.price_btc, file.price_btc].iter().any(Option::is_some);
        econ.reward_override = match self.reward.or(file.reward) {
            Some(b) => Some(b),
            None if coins_given => None,
            None => Some(QUOTED_REWARD_2020),
        };
        op("economic inputs", econ.validate())?;

        let sweep = self.sweep.as_ref().or(file.sweep.as_ref()).map(|s| s.parse()).transpose()?;
        let state = match self.state.as_ref().or(file.state.as_ref()) {
            Some(s) => op("state", s.parse())?,
            None => SelfishState::Empty,
        };
        let qs = self.q.clone().or(file_q);
        Ok(Settings {
            economics: econ,
            lambda: self.lambda.or(file.lambda).unwrap_or(minerisk::params::BITCOIN_BLOCKS_PER_HOUR),
            q_given: qs.is_some(),
            qs: qs.unwrap_or_else(|| FRONTIER_QS.to_vec()),
            u: self.u.or(file.u).unwrap_or(DEFAULT_U),
            t: self.t.or(file.t).unwrap_or(DEFAULT_T),
            state,
            sweep,
            mc: self.mc || file.mc.unwrap_or(false),
            paths: self.paths.or(file.paths).unwrap_or(DEFAULT_PATHS),
            seed: self.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: self.out.clone().or(file.out),
            format: self.format.or(file.format).unwrap_or_default(),
            manifest: self.manifest.clone().or(file.manifest),
        })
    }
}

impl Settings {
    pub fn scenario(&self, command: Command) -> Result<Scenario, Failure> {
        let frontier = matches!(command, Command::Frontier { .. });
        let q = if frontier || !self.q_given {
            DEFAULT_Q
        } else {
            match self.qs[..] {
                [q] => q,
                _ => return Err(Failure::invalid("--q takes a list only for `frontier`")),
            }
        };
        let simulate = matches!(command, Command::Simulate { .. });
        let mc = (self.mc || simulate).then_some(Simulation {
            paths: self.paths,
            seed: self.seed,
        });
        if mc.is_none() && self.paths != DEFAULT_PATHS {
            warn!("--paths has no effect without --mc");
        }
        let scenario = Scenario {
            command,
            economics: self.economics,
            lambda: self.lambda,
            q,
            u: self.u,
            t: self.t,
            sweep: self.sweep,
            mc,
            format: self.format,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_keys_mirror_flags() {
        let cfg: FileConfig = toml::from_str(
            "lambda = 6.0\np = 0.2\nq = [0.25, 1.0]\nprice-btc = 8000.0\ntwh-year = 70.0\nsweep = \"u=0:10:11\"\nformat = \"json\"\n",
        )
        .unwrap();
        assert_eq!(cfg.price_btc, Some(8000.0));
        assert!(matches!(cfg.q, OneOrMany::Many(ref v) if v == &[0.25, 1.0]));
        assert_eq!(cfg.format, Some(Format::Json));
        assert!(toml::from_str::<FileConfig>("price_btc = 1.0\n").is_err());
        assert!(toml::from_str::<FileConfig>("bogus = 1\n").is_err());
    }

    #[test]
    fn flags_override_file_and_reward_defaults_to_quote() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "electricity = 0.04\nu = 5000.0\n").unwrap();
        let flags = Flags {
            config: Some(path),
            u: Some(7000.0),
            ..Flags::default()
        };
        let s = flags.resolve().unwrap();
        assert_eq!(s.economics.electricity_price, 0.04);
        assert_eq!(s.u, 7000.0);
        assert_eq!(s.economics.reward(), QUOTED_REWARD_2020);

        let flags = Flags {
            price_btc: Some(7174.74),
            ..Flags::default()
        };
        let b = flags.resolve().unwrap().economics.reward();
        assert!((b - 12.5 * 7174.74).abs() < 1e-9);
    }
}
