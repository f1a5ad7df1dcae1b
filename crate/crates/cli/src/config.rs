use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use bperc_core::Constants;

use crate::args::{Command, Format, Global};
use crate::error::{CliError, Result};

/// Everything a run depends on. Embedded in every output, and sufficient to
/// replay the run with `bperc rerun`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: String,
    pub command: Command,
    pub seed: u64,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub constants: Constants,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

impl RunConfig {
    pub fn from_cli(global: &Global, command: Command) -> Result<RunConfig> {
        let mut constants = match &global.constants {
            Some(path) => load_constants(path)?,
            None => Constants::default(),
        };
        for (name, value) in &global.overrides {
            constants.set(name, *value)?;
        }
        if let Some(p) = global.p {
            constants.set("p", p)?;
        }
        if let Some(q) = global.q {
            constants.set("q", q)?;
        }
        constants.validate()?;
        let format = global.format.unwrap_or(default_format(&command));
        Ok(RunConfig {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            seed: global.seed,
            trials: global.trials,
            workers: global.workers,
            constants,
            format,
            out: global.out.clone(),
            timing: global.timing,
        })
    }

    pub fn trials_or(&self, default: u64) -> u64 {
        self.trials.unwrap_or(default)
    }

    /// Reads the configuration embedded in an earlier output: the
    /// `run_config` field of a JSON document, or the `# run_config:` header
    /// line of a CSV file.
    pub fn from_output(path: &Path) -> Result<RunConfig> {
        let text = read(path)?;
        if let Some(line) = text.lines().find_map(|l| l.strip_prefix(CSV_HEADER_PREFIX)) {
            return Ok(serde_json::from_str(line)?);
        }
        let doc: serde_json::Value = serde_json::from_str(&text)?;
        let cfg = doc
            .get("run_config")
            .ok_or_else(|| CliError::Usage(format!("{} carries no run_config", path.display())))?;
        Ok(serde_json::from_value(cfg.clone())?)
    }
}

pub const CSV_HEADER_PREFIX: &str = "# run_config: ";

fn default_format(command: &Command) -> Format {
    match command {
        Command::Pc(_) | Command::EventProb(_) | Command::GTable(_) | Command::Validate(_) => Format::Csv,
        _ => Format::Json,
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Constants from TOML, or JSON when the file name ends in `.json`.
/// Missing fields take the defaults.
pub fn load_constants(path: &Path) -> Result<Constants> {
    let text = read(path)?;
    let k: Constants = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text)?
    } else {
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    };
    k.validate()?;
    Ok(k)
}
