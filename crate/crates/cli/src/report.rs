//! Report envelopes and output plumbing.

use std::io::Write;

use serde::Serialize;

use crate::config::{OutputConfig, OutputFormat, RunConfig, SCHEMA_VERSION};

/// Every JSON report embeds the resolved config, so a run can be reproduced
/// from its own output.
#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub results: T,
}

impl<'a, T: Serialize> Report<'a, T> {
    pub fn new(command: &'a str, config: &'a RunConfig, results: T) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            config,
            results,
        }
    }
}

/// 12 significant digits, per the CSV contract.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000e0".into();
    }
    format!("{x:.11e}")
}

pub fn write_out(output: &Option<OutputConfig>, body: &str) -> std::io::Result<()> {
    match output.as_ref().and_then(|o| o.path.as_ref()) {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                f.write_all(b"\n")?;
            }
            Ok(())
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

pub fn format_of(output: &Option<OutputConfig>, default: OutputFormat) -> OutputFormat {
    output.as_ref().map(|o| o.format).unwrap_or(default)
}

pub fn to_json<T: Serialize>(report: &Report<T>) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}
