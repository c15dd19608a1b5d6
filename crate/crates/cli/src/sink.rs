//! Report lines and the summary table.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use symmlab::Report;

/// Whether a check is expected to hold or to produce a witness of failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Holds,
    Fails,
}

/// One row of the summary table, backed by one or more JSON lines.
#[derive(Debug, Clone)]
pub struct Entry {
    pub check: String,
    pub instance: String,
    pub expect: Expect,
    pub tested: u64,
    pub margin: f64,
    pub ok: bool,
    pub lines: Vec<Value>,
}

impl Entry {
    pub fn from_report(r: &Report, expect: Expect) -> Self {
        let ok = match expect {
            Expect::Holds => r.passed,
            Expect::Fails => r.witness.is_some() && r.worst_margin < -r.tolerance,
        };
        Entry {
            check: r.check_name.clone(),
            instance: r.instance.clone(),
            expect,
            tested: r.instances_tested,
            margin: r.worst_margin,
            ok,
            lines: vec![serde_json::to_value(r.clone().strip_timing()).expect("reports serialize")],
        }
    }
}

/// Serializes every line with `command`, `seed`, `expect` and `ok` keys added.
pub fn render_lines(entries: &[Entry], command: &str, seed: u64) -> String {
    let mut out = String::new();
    for e in entries {
        for line in &e.lines {
            let mut map = match line {
                Value::Object(m) => m.clone(),
                other => {
                    let mut m = Map::new();
                    m.insert("value".into(), other.clone());
                    m
                }
            };
            map.insert("command".into(), command.into());
            map.insert("seed".into(), seed.into());
            map.insert("expect".into(), serde_json::to_value(e.expect).expect("enum serializes"));
            map.entry("ok").or_insert(e.ok.into());
            out.push_str(&serde_json::to_string(&map).expect("values serialize"));
            out.push('\n');
        }
    }
    out
}

pub fn summary_table(entries: &[Entry]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<28} {:<36} {:<6} {:>9} {:>13}  result",
        "check", "instance", "expect", "tested", "worst_margin"
    );
    let _ = writeln!(s, "{}", "-".repeat(102));
    for e in entries {
        let expect = match e.expect {
            Expect::Holds => "holds",
            Expect::Fails => "fails",
        };
        let margin = if e.margin.is_nan() { "-".to_string() } else { format!("{:.4e}", e.margin) };
        let _ = writeln!(
            s,
            "{:<28} {:<36} {:<6} {:>9} {:>13}  {}",
            truncate(&e.check, 28),
            truncate(&e.instance, 36),
            expect,
            e.tested,
            margin,
            if e.ok { "ok" } else { "UNEXPECTED" }
        );
    }
    let bad = entries.iter().filter(|e| !e.ok).count();
    let _ = writeln!(s, "{} checks, {} unexpected", entries.len(), bad);
    s
}

fn truncate(s: &str, w: usize) -> String {
    if s.chars().count() <= w {
        s.to_string()
    } else {
        s.chars().take(w - 1).chain(Some('~')).collect()
    }
}

/// Reports go to `out` when given (table on stdout), else to stdout (table on stderr).
pub fn emit(lines: &str, table: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, lines)?;
            io::stdout().write_all(table.as_bytes())
        }
        None => {
            io::stdout().write_all(lines.as_bytes())?;
            io::stderr().write_all(table.as_bytes())
        }
    }
}
