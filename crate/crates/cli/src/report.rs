use std::io::Write;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::Cli;

pub const TOOL: &str = "voter-blotto";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub constructions: Vec<String>,
    pub config: &'a Cli,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub result: T,
}

impl<'a, T: Serialize> Report<'a, T> {
    pub fn new(cli: &'a Cli, command: &'static str, constructions: Vec<String>, checks: Vec<Check>, result: T) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Report {
            tool: TOOL,
            version: VERSION,
            command,
            seed: cli.global.seed,
            constructions,
            config: cli,
            checks,
            passed,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Comment lines that open every CSV rendering.
    pub fn csv_preamble(&self) -> String {
        let mut s = format!("# {} {} {}\n# seed: {}\n", self.tool, self.version, self.command, self.seed);
        if !self.constructions.is_empty() {
            s += &format!("# construction: {}\n", self.constructions.join(","));
        }
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            s += &format!("# check {}: {mark} ({})\n", c.name, c.detail);
        }
        s
    }
}

pub fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.global.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
