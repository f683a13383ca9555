//! Versioned JSON report envelope shared by all subcommands. Reports
//! carry the inputs in canonical text form so they re-parse and
//! re-verify bit-identically.

use serde::Serialize;
use serde_json::Value;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub version: u32,
    pub tool_version: String,
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub checks: Value,
    pub timings_ms: u128,
}

impl RunReport {
    pub fn new(command: &str, inputs: Value, outputs: Value, checks: Value, timings_ms: u128) -> RunReport {
        RunReport {
            version: REPORT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs,
            outputs,
            checks,
            timings_ms,
        }
    }

    pub fn print(&self) {
        println!("{}", serde_json::to_string_pretty(self).expect("serializable report"));
    }
}

/// Machine-readable error object on stdout; the caller picks the exit code.
pub fn print_error(kind: &str, message: &str) {
    let obj = serde_json::json!({
        "error": { "kind": kind, "message": message }
    });
    println!("{}", serde_json::to_string_pretty(&obj).unwrap());
}
