//! The structured result of one command.
//!
//! Line format, one `key: value` per line in this order:
//!
//! ```text
//! command: <name>
//! input: sha256:<hex>
//! verdict: sat | unsat | inconclusive | done
//! bound: <n>                  (optional)
//! witness <variable>: <word>  (zero or more, only with verdict sat)
//! <field>: <value>            (command specific; a multi-line value repeats its key)
//! trace: <path>               (optional)
//! time_ms: <n>
//! ```
//!
//! `--json` emits the same report as one JSON object.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Sat,
    Unsat,
    /// A bound or budget ran out before a decision.
    Inconclusive,
    /// The command computes something rather than deciding a question.
    Done,
}

impl Outcome {
    fn as_str(self) -> &'static str {
        match self {
            Outcome::Sat => "sat",
            Outcome::Unsat => "unsat",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Done => "done",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "sat" => Outcome::Sat,
            "unsat" => Outcome::Unsat,
            "inconclusive" => Outcome::Inconclusive,
            "done" => Outcome::Done,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub input_digest: String,
    pub verdict: Outcome,
    pub bound: Option<u64>,
    /// Variable name and value, in variable order.
    pub witness: Vec<(String, String)>,
    pub fields: Vec<(String, String)>,
    pub trace_path: Option<String>,
    pub time_ms: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing '{0}' line")]
    Missing(&'static str),
    #[error("a witness requires verdict sat")]
    WitnessWithoutSat,
}

const RESERVED: [&str; 6] = ["command", "input", "verdict", "bound", "trace", "time_ms"];

pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

impl RunReport {
    pub fn new(command: &str, input: &[u8], verdict: Outcome) -> Self {
        RunReport {
            command: command.to_string(),
            input_digest: digest(input),
            verdict,
            bound: None,
            witness: Vec::new(),
            fields: Vec::new(),
            trace_path: None,
            time_ms: 0,
        }
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        debug_assert!(!RESERVED.contains(&key) && !key.starts_with("witness ") && !key.contains(':'));
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        if !self.witness.is_empty() && self.verdict != Outcome::Sat {
            return Err(ReportError::WitnessWithoutSat);
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Parses the line format; the inverse of `Display`.
    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let mut command = None;
        let mut input = None;
        let mut verdict = None;
        let mut report = RunReport::new("", b"", Outcome::Done);
        let mut last_key: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ReportError::Syntax { line, message };
            let (key, value) = raw.split_once(':').ok_or_else(|| err("expected 'key: value'".into()))?;
            let value = value.strip_prefix(' ').unwrap_or(value);
            let continues = last_key.as_deref() == Some(key);
            last_key = Some(key.to_string());
            match key {
                "command" => command = Some(value.to_string()),
                "input" => input = Some(value.to_string()),
                "verdict" => verdict = Some(Outcome::parse(value).ok_or_else(|| err(format!("unknown verdict '{value}'")))?),
                "bound" => report.bound = Some(value.parse().map_err(|_| err(format!("bad bound '{value}'")))?),
                "trace" => report.trace_path = Some(value.to_string()),
                "time_ms" => report.time_ms = value.parse().map_err(|_| err(format!("bad time '{value}'")))?,
                _ => {
                    if let Some(var) = key.strip_prefix("witness ") {
                        report.witness.push((var.to_string(), value.to_string()));
                    } else if continues {
                        let last = report.fields.last_mut().expect("previous field");
                        last.1.push('\n');
                        last.1.push_str(value);
                    } else {
                        report.fields.push((key.to_string(), value.to_string()));
                    }
                }
            }
        }
        report.command = command.ok_or(ReportError::Missing("command"))?;
        report.input_digest = input.ok_or(ReportError::Missing("input"))?;
        report.verdict = verdict.ok_or(ReportError::Missing("verdict"))?;
        report.validate()?;
        Ok(report)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut line = |k: &str, v: &str| {
            if v.is_empty() {
                writeln!(f, "{k}:")
            } else {
                writeln!(f, "{k}: {v}")
            }
        };
        line("command", &self.command)?;
        line("input", &self.input_digest)?;
        line("verdict", self.verdict.as_str())?;
        if let Some(b) = self.bound {
            line("bound", &b.to_string())?;
        }
        for (v, w) in &self.witness {
            line(&format!("witness {v}"), w)?;
        }
        for (k, v) in &self.fields {
            for part in v.split('\n') {
                line(k, part)?;
            }
        }
        if let Some(t) = &self.trace_path {
            line("trace", t)?;
        }
        line("time_ms", &self.time_ms.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut r = RunReport::new("solve", b"gens: a\n", Outcome::Sat);
        r.bound = Some(16);
        r.witness = vec![("x".into(), "a b".into()), ("y".into(), "1".into())];
        r.field("states", 12).field("system", "gens: a\nvars: x\nx = a");
        r.field("empty", "");
        r.trace_path = Some("/tmp/t.trace".into());
        r.time_ms = 5;
        r
    }

    #[test]
    fn line_format_round_trips() {
        let r = sample();
        let text = r.to_string();
        assert!(text.starts_with("command: solve\ninput: sha256:"));
        assert!(text.contains("system: vars: x\n"));
        assert_eq!(RunReport::parse(&text).unwrap(), r);
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn witness_needs_sat() {
        let mut r = sample();
        r.verdict = Outcome::Unsat;
        assert_eq!(RunReport::parse(&r.to_string()), Err(ReportError::WitnessWithoutSat));
        assert!(matches!(RunReport::parse("command: x\nbogus"), Err(ReportError::Syntax { line: 2, .. })));
        assert_eq!(RunReport::parse("command: x\n"), Err(ReportError::Missing("input")));
    }
}
