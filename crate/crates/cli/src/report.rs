//! JSON reports and the table view rendered from them.

use flab_core::f_invariant::{FReport, ReportCertificate};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Uncertified,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Uncertified => "UNCERTIFIED",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict, detail: impl Serialize) -> Self {
        Check {
            name: name.into(),
            verdict,
            detail: to_value(detail),
        }
    }

    pub fn pass_if(name: impl Into<String>, ok: bool, detail: impl Serialize) -> Self {
        let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        Check::new(name, verdict, detail)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub uncertified: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub summary: Summary,
    /// Computed values that are not themselves checks.
    pub data: Value,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, cfg: &RunConfig) -> Self {
        Report {
            command: command.into(),
            config: to_value(cfg),
            checks: Vec::new(),
            summary: Summary::default(),
            data: json!({}),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        match c.verdict {
            Verdict::Pass => self.summary.passed += 1,
            Verdict::Fail => self.summary.failed += 1,
            Verdict::Uncertified => self.summary.uncertified += 1,
        }
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        for c in cs {
            self.push(c);
        }
    }

    pub fn set_data(&mut self, key: &str, v: impl Serialize) {
        if let Value::Object(m) = &mut self.data {
            m.insert(key.to_string(), to_value(v));
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// 0 when every check passed, 1 on any failure, otherwise 2.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed > 0 {
            1
        } else if self.summary.uncertified > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Compact view of a truncated report: the infima and one line per row.
pub fn summarize(rep: &FReport) -> Value {
    json!({
        "process": rep.process,
        "f": rep.f,
        "f_star": rep.f_star,
        "f_certificate": rep.f_certificate,
        "f_star_certificate": rep.f_star_certificate,
        "exactness": rep.exactness,
        "rows": rep.rows.iter().map(|r| json!({
            "n": r.n,
            "F": r.F,
            "F_star": r.F_star,
            "F_star_certificate": r.F_star_certificate,
            "error": r.error,
        })).collect::<Vec<_>>(),
    })
}

/// Whether a report carries an uncertified window.
pub fn has_uncertified(rep: &FReport) -> bool {
    rep.f_certificate == ReportCertificate::Uncertified
        || rep.f_star_certificate == ReportCertificate::Uncertified
}

/// Renders a report from its JSON form, one line per check.
pub fn render_table(report: &Value) -> String {
    let mut out = String::new();
    let command = report["command"].as_str().unwrap_or("?");
    out.push_str(&format!("flab {command}\n"));
    let checks = report["checks"].as_array().cloned().unwrap_or_default();
    let width = checks
        .iter()
        .filter_map(|c| c["name"].as_str())
        .map(str::len)
        .max()
        .unwrap_or(0);
    for c in &checks {
        let verdict = c["verdict"].as_str().unwrap_or("?");
        let name = c["name"].as_str().unwrap_or("?");
        out.push_str(&format!("{verdict:<12} {name:<width$}  {}\n", brief(&c["detail"], 100)));
    }
    if let Some(notes) = report["notes"].as_array() {
        for n in notes.iter().filter_map(Value::as_str) {
            out.push_str(&format!("note: {n}\n"));
        }
    }
    let s = &report["summary"];
    out.push_str(&format!(
        "{} passed, {} failed, {} uncertified\n",
        s["passed"], s["failed"], s["uncertified"]
    ));
    out
}

/// One-line rendering of a JSON value; exact entropy values print their
/// float form.
fn brief(v: &Value, limit: usize) -> String {
    let s = flatten(v);
    if s.chars().count() > limit {
        let cut: String = s.chars().take(limit - 3).collect();
        format!("{cut}...")
    } else {
        s
    }
}

fn flatten(v: &Value) -> String {
    match v {
        Value::Object(m) if m.contains_key("terms") && m.contains_key("float") => {
            format!("{:.6}", m["float"].as_f64().unwrap_or(f64::NAN))
        }
        Value::Object(m) => m
            .iter()
            .map(|(k, x)| format!("{k}={}", flatten(x)))
            .collect::<Vec<_>>()
            .join(" "),
        Value::Array(a) => format!("[{}]", a.iter().map(flatten).collect::<Vec<_>>().join(",")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_worst_verdict() {
        let cfg = RunConfig::default();
        let mut r = Report::new("t", &cfg);
        assert_eq!(r.exit_code(), 0);
        r.push(Check::new("a", Verdict::Uncertified, ()));
        assert_eq!(r.exit_code(), 2);
        r.push(Check::pass_if("b", false, ()));
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn table_renders_floats_for_entropy_values() {
        let cfg = RunConfig::default();
        let mut r = Report::new("t", &cfg);
        let v = flab_core::exact_entropy::EntropyValue::log_int(2).unwrap();
        r.push(Check::pass_if("log2", true, json!({ "value": v })));
        let table = render_table(&serde_json::to_value(&r).unwrap());
        assert!(table.contains("PASS"));
        assert!(table.contains("value=0.693147"));
        assert!(table.ends_with("1 passed, 0 failed, 0 uncertified\n"));
    }
}
