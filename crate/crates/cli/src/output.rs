use eala_core::report::{Check, Report};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Serialize)]
pub struct Output {
    pub command: String,
    pub args: Value,
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u32>,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub result: Value,
}

pub struct Outcome {
    pub output: Output,
    pub passed: bool,
}

/// SHA-256 over the echoed arguments followed by every input file's bytes.
pub fn digest(args: &Value, inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    h.update(args.to_string().as_bytes());
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl Output {
    pub fn new(command: &str, args: Value, inputs: &[&[u8]], window: Option<u32>, report: Report, result: Value) -> Self {
        let inputs_digest = digest(&args, inputs);
        Output { command: command.into(), args, inputs_digest, window, passed: report.passed(), checks: report.checks, result }
    }

    pub fn into_outcome(self) -> Outcome {
        let passed = self.passed;
        Outcome { output: self, passed }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("output serializes"),
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut lines = vec![format!("command: {}", self.command)];
        if let Some(w) = self.window {
            lines.push(format!("window: {w}"));
        }
        lines.push(format!("inputs digest: {}", self.inputs_digest));
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            lines.push(format!("[{tag}] {}: {}", c.name, c.detail));
            if let Some(w) = &c.witness {
                lines.push(format!("       witness: {w}"));
            }
        }
        if !self.result.is_null() {
            lines.push("result:".into());
            if let Value::Object(map) = &self.result {
                for (k, v) in map {
                    lines.push(format!("  {k}: {v}"));
                }
            } else {
                lines.push(format!("  {}", self.result));
            }
        }
        lines.push(format!("overall: {}", if self.passed { "PASS" } else { "FAIL" }));
        lines.join("\n")
    }
}
