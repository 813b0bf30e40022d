use std::path::PathBuf;

use crate::config::{RawConfig, Scenario};
use crate::error::CliError;

pub const USAGE: &str = "usage: ramsey-tg <scenario> [--config FILE] [--key value ...] [--out PATH] [--dump-config PATH]
scenarios: fringe | timedomain | noise | tg-density | collision | wellimit";

#[derive(Debug, Clone)]
pub struct Invocation {
    pub scenario: Scenario,
    pub config_file: Option<PathBuf>,
    /// Overrides given as `--key value`; these win over the file.
    pub overrides: RawConfig,
    pub out: Option<PathBuf>,
    pub dump_config: Option<PathBuf>,
}

impl Invocation {
    /// File contents merged with the command-line overrides.
    pub fn raw_config(&self) -> Result<RawConfig, CliError> {
        let mut raw = match &self.config_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                RawConfig::parse_text(&text)?
            }
            None => RawConfig::default(),
        };
        raw.merge(&self.overrides);
        Ok(raw)
    }
}

/// Parses the arguments after the program name.
pub fn parse_args<S: AsRef<str>>(args: &[S]) -> Result<Invocation, CliError> {
    let mut iter = args.iter().map(AsRef::as_ref);
    let scenario = match iter.next() {
        None | Some("-h") | Some("--help") => return Err(CliError::Usage(USAGE.to_string())),
        Some(s) => Scenario::parse(s)?,
    };
    let mut inv = Invocation {
        scenario,
        config_file: None,
        overrides: RawConfig::default(),
        out: None,
        dump_config: None,
    };
    while let Some(arg) = iter.next() {
        let flag = arg
            .strip_prefix("--")
            .ok_or_else(|| CliError::Usage(format!("unexpected argument `{arg}`\n{USAGE}")))?;
        let (name, inline) = match flag.split_once('=') {
            Some((n, v)) => (n, Some(v.to_string())),
            None => (flag, None),
        };
        let value = match inline {
            Some(v) => v,
            None => iter
                .next()
                .ok_or_else(|| CliError::Usage(format!("`--{name}` needs a value")))?
                .to_string(),
        };
        match name {
            "config" => inv.config_file = Some(value.into()),
            "out" => inv.out = Some(value.into()),
            "dump-config" => inv.dump_config = Some(value.into()),
            key => inv.overrides.set(key, &value)?,
        }
    }
    Ok(inv)
}
