//! Task reports and their text and tree renderings.

use std::fmt::Write;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// A named, canonically rendered object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TaskReport {
    pub name: String,
    pub kind: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_bound: Option<u32>,
    pub checks: Vec<Check>,
    pub objects: Vec<Entry>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

impl TaskReport {
    pub fn new(name: &str, kind: &str) -> TaskReport {
        TaskReport {
            name: name.to_string(),
            kind: kind.to_string(),
            status: Status::Pass,
            order_bound: None,
            checks: Vec::new(),
            objects: Vec::new(),
            notes: Vec::new(),
            millis: None,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, status: Status, detail: Option<String>) {
        self.checks.push(Check { name: name.into(), status, detail });
    }

    pub fn pass_if(&mut self, name: impl Into<String>, ok: bool) {
        self.check(name, Status::from_bool(ok), None);
    }

    pub fn object(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.objects.push(Entry { key: key.into(), value: value.into() });
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    /// The worst check status; a task without checks is inconclusive.
    pub fn finish(mut self) -> TaskReport {
        self.status = self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Inconclusive);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub tasks: Vec<TaskReport>,
    pub summary: Summary,
}

impl Report {
    pub fn new(scenario: &str, tasks: Vec<TaskReport>) -> Report {
        let count = |s: Status| tasks.iter().filter(|t| t.status == s).count();
        let summary = Summary {
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            inconclusive: count(Status::Inconclusive),
            status: tasks.iter().map(|t| t.status).max().unwrap_or(Status::Pass),
        };
        Report { scenario: scenario.to_string(), tasks, summary }
    }

    /// 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.summary.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn text(&self) -> String {
        let mut s = format!("scenario {}\n", self.scenario);
        for t in &self.tasks {
            write!(s, "task {} ({}): {}", t.name, t.kind, t.status.as_str()).unwrap();
            if let Some(ms) = t.millis {
                write!(s, " [{ms} ms]").unwrap();
            }
            s.push('\n');
            if let Some(b) = t.order_bound {
                writeln!(s, "  order bound: {b}").unwrap();
            }
            for c in &t.checks {
                write!(s, "  [{}] {}", c.status.as_str(), c.name).unwrap();
                if let Some(d) = &c.detail {
                    write!(s, ": {d}").unwrap();
                }
                s.push('\n');
            }
            for e in &t.objects {
                writeln!(s, "  {} = {}", e.key, e.value).unwrap();
            }
            for n in &t.notes {
                writeln!(s, "  note: {n}").unwrap();
            }
        }
        writeln!(
            s,
            "summary: {} pass, {} fail, {} inconclusive: {}",
            self.summary.pass,
            self.summary.fail,
            self.summary.inconclusive,
            self.summary.status.as_str()
        )
        .unwrap();
        s
    }

    pub fn tree(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
