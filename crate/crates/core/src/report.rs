//! Obligation reports shared by validation and the checker suites.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// The truncated instance does not determine the answer.
    Insufficient,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Insufficient => "insufficient",
            Verdict::Fail => "FAIL",
        })
    }
}

/// One checked statement.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Obligation {
    pub name: String,
    pub inputs: String,
    pub window: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Obligation {
    pub fn pass(name: impl Into<String>, inputs: impl Into<String>, window: impl Into<String>) -> Self {
        Obligation { name: name.into(), inputs: inputs.into(), window: window.into(), verdict: Verdict::Pass, witness: None }
    }

    pub fn fail(
        name: impl Into<String>,
        inputs: impl Into<String>,
        window: impl Into<String>,
        witness: impl Into<String>,
    ) -> Self {
        Obligation {
            name: name.into(),
            inputs: inputs.into(),
            window: window.into(),
            verdict: Verdict::Fail,
            witness: Some(witness.into()),
        }
    }

    pub fn insufficient(
        name: impl Into<String>,
        inputs: impl Into<String>,
        window: impl Into<String>,
        note: impl Into<String>,
    ) -> Self {
        Obligation {
            name: name.into(),
            inputs: inputs.into(),
            window: window.into(),
            verdict: Verdict::Insufficient,
            witness: Some(note.into()),
        }
    }

    /// Pass when `witness` is `None`, otherwise fail with it.
    pub fn from_witness(
        name: impl Into<String>,
        inputs: impl Into<String>,
        window: impl Into<String>,
        witness: Option<String>,
    ) -> Self {
        match witness {
            None => Self::pass(name, inputs, window),
            Some(w) => Self::fail(name, inputs, window, w),
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Default)]
pub struct Report {
    pub title: String,
    pub obligations: Vec<Obligation>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), obligations: Vec::new() }
    }

    pub fn push(&mut self, o: Obligation) {
        self.obligations.push(o);
    }

    pub fn extend(&mut self, other: Report) {
        self.obligations.extend(other.obligations);
    }

    /// Worst verdict; an empty report passes.
    pub fn verdict(&self) -> Verdict {
        self.obligations.iter().map(|o| o.verdict).max().unwrap_or(Verdict::Pass)
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &Obligation> {
        self.obligations.iter().filter(|o| o.verdict == Verdict::Fail)
    }

    pub fn first_failure(&self) -> Option<&Obligation> {
        self.failures().next()
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.obligations.iter().filter(|o| o.verdict == v).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.title);
        for o in &self.obligations {
            out.push_str(&format!("[{}] {} ({})", o.verdict, o.name, o.inputs));
            if !o.window.is_empty() {
                out.push_str(&format!(" window: {}", o.window));
            }
            out.push('\n');
            if let Some(w) = &o.witness {
                out.push_str(&format!("    {w}\n"));
            }
        }
        out.push_str(&format!(
            "summary: {} pass, {} fail, {} insufficient => {}\n",
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Insufficient),
            self.verdict()
        ));
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
