//! Machine-readable verification results.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one named check. `status` is derived from `witnesses`: the
/// report fails exactly when at least one counterexample was recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub status: Status,
    pub witnesses: Vec<Value>,
    /// Elapsed wall-clock seconds.
    pub duration: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Same report with the timing zeroed, for run-to-run comparison.
    pub fn without_duration(&self) -> Self {
        CheckReport {
            duration: 0.0,
            ..self.clone()
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        write!(
            f,
            "[{status}] {} ({}) {} witness(es) in {:.3}s",
            self.name,
            params.join(", "),
            self.witnesses.len(),
            self.duration
        )?;
        for w in &self.witnesses {
            write!(f, "\n    witness: {w}")?;
        }
        Ok(())
    }
}

/// Accumulates params and witnesses while a check runs.
pub struct ReportBuilder {
    name: String,
    params: BTreeMap<String, Value>,
    witnesses: Vec<Value>,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ReportBuilder {
            name: name.into(),
            params: BTreeMap::new(),
            witnesses: Vec::new(),
            start: Instant::now(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn witness(&mut self, w: impl Into<Value>) {
        self.witnesses.push(w.into());
    }

    pub fn witnesses<I: IntoIterator<Item = Value>>(&mut self, ws: I) {
        self.witnesses.extend(ws);
    }

    pub fn finish(self) -> CheckReport {
        let status = if self.witnesses.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckReport {
            name: self.name,
            params: self.params,
            status,
            witnesses: self.witnesses,
            duration: self.start.elapsed().as_secs_f64(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn status_tracks_witnesses() {
        let r = ReportBuilder::new("empty").param("n", 3).finish();
        assert!(r.passed());
        let mut b = ReportBuilder::new("bad");
        b.witness(json!({"n": 4}));
        let r = b.finish();
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn json_line_shape() {
        let r = ReportBuilder::new("x").param("bound", 10).finish();
        let v: Value = serde_json::from_str(&r.to_json_line()).unwrap();
        assert_eq!(v["name"], "x");
        assert_eq!(v["status"], "PASS");
        assert_eq!(v["params"]["bound"], 10);
        assert!(v["witnesses"].as_array().unwrap().is_empty());
        assert!(v["duration"].is_number());
    }
}
