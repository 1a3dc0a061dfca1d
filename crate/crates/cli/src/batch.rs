//! Newline-delimited batch requests, run in parallel with output in input order.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::request::{execute, CliError, Request};

fn run_line(line: &str, seed: u64) -> Result<Value, CliError> {
    let value: Value = serde_json::from_str(line).map_err(|e| CliError::Malformed(e.to_string()))?;
    let req: Request = serde_json::from_value(value).map_err(|e| CliError::Schema(format!("request: {e}")))?;
    execute(&req.command, req.payload, seed)
}

/// One output line per non-blank input line; `seq` is the 1-based input line number.
pub fn run(text: &str, seed: u64) -> Vec<String> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(i, l)| (i + 1, l)).collect();
    lines
        .par_iter()
        .map(|&(seq, line)| {
            let v = match run_line(line, seed) {
                Ok(result) => json!({ "seq": seq, "ok": true, "result": result }),
                Err(e) => json!({ "seq": seq, "ok": false, "error": e.to_json() }),
            };
            serde_json::to_string(&v).expect("JSON values serialize")
        })
        .collect()
}
