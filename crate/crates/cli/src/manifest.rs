//! Run manifests: the resolved scenario plus enough context to re-run it.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;
use crate::scenario::Scenario;

const TOOL: &str = "minerisk";
const VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON keys: `tool`, `version`, `scenario`, `params`, `output`.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: Scenario,
    /// Model parameters at the base point, for reference only.
    #[serde(default)]
    pub params: Option<minerisk::Params>,
    pub output: Option<PathBuf>,
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing standard output")?,
    }
    Ok(())
}

/// Runs `scenario`, writes its output, then the manifest if requested.
pub fn execute(scenario: &Scenario, out: Option<&Path>, manifest: Option<&Path>) -> Result<(), Failure> {
    let output = scenario.run()?;
    write_output(&output.render(scenario.format), out)?;
    if let Some(path) = manifest {
        let params = minerisk::Params::from_economics(
            &scenario.economics,
            scenario.lambda,
            scenario.q,
            scenario.u,
            scenario.t,
        )
        .ok();
        let m = Manifest {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            scenario: scenario.clone(),
            params,
            output: out.map(Path::to_path_buf),
        };
        let mut text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing manifest {}", path.display()))?;
        info!("manifest written to {}", path.display());
    }
    Ok(())
}

/// Re-runs a manifest, writing to `out` or else to the recorded output.
pub fn replay(path: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading manifest {}", path.display()))
        .map_err(|e| Failure::invalid(format!("{e:#}")))?;
    let m: Manifest =
        serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("manifest {}: {e}", path.display())))?;
    if m.tool != TOOL {
        return Err(Failure::invalid(format!("manifest is for `{}`", m.tool)));
    }
    if m.version != VERSION {
        warn!("manifest written by version {}, running {VERSION}", m.version);
    }
    execute(&m.scenario, out.or(m.output.as_deref()), None)
}
