//! Reports: deterministic JSON with sorted keys, plus a timing sidecar.
//!
//! Wall-clock timings and cache events differ between otherwise identical
//! runs, so they are written next to the report (`<report>.timings.json`)
//! instead of inside it; the report itself is byte-for-byte reproducible.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

/// One verified claim and what backs it: `certificate` (re-checkable from
/// the report), `exact` (direct computation) or `oracle:<name>`.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub evidence: String,
    pub detail: Option<String>,
}

impl Check {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "status": self.status.name(),
            "evidence": self.evidence,
            "detail": self.detail,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub parameters: Value,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    pub timings: BTreeMap<String, f64>,
    pub cache: BTreeMap<String, String>,
}

impl Report {
    pub fn new(command: &str, parameters: Value) -> Report {
        Report { command: command.into(), parameters, ..Report::default() }
    }

    pub fn status(&self) -> Status {
        self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn to_json(&self) -> Value {
        let count = |s| self.checks.iter().filter(|c| c.status == s).count();
        json!({
            "tool": { "name": "tcm", "version": env!("CARGO_PKG_VERSION") },
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "summary": {
                "status": self.status().name(),
                "pass": count(Status::Pass),
                "fail": count(Status::Fail),
                "inconclusive": count(Status::Inconclusive),
            },
        })
    }

    pub fn timings_json(&self) -> Value {
        json!({ "command": self.command, "seconds": self.timings, "cache": self.cache })
    }

    /// Canonical text: sorted keys (serde_json's default map), two-space
    /// indentation, trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes the report (stdout when `path` is `None`) and its timing sidecar.
pub fn emit_report(r: &Report, path: Option<&str>) -> std::io::Result<()> {
    match path {
        None => {
            print!("{}", r.render());
            eprintln!("{}", serde_json::to_string(&r.timings_json()).expect("timings serialize"));
        }
        Some(p) => {
            if let Some(dir) = Path::new(p).parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, r.render())?;
            let mut t = serde_json::to_string_pretty(&r.timings_json()).expect("timings serialize");
            t.push('\n');
            std::fs::write(format!("{p}.timings.json"), t)?;
        }
    }
    Ok(())
}
