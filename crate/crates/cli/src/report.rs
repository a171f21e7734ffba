//! Machine-parseable reports: JSON (stable field order) or CSV. Stdout
//! carries only the report; timing goes to stderr so runs are
//! reproducible bit for bit under a fixed seed.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "APPROX-PASS")]
    ApproxPass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIP")]
    Skip,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::ApproxPass => "APPROX-PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckLine {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckLine {
            name: name.into(),
            verdict: Verdict::Pass,
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckLine {
            name: name.into(),
            verdict: Verdict::Fail,
            witness: Some(witness.into()),
        }
    }

    pub fn skip(name: impl Into<String>, why: impl Into<String>) -> Self {
        CheckLine {
            name: name.into(),
            verdict: Verdict::Skip,
            witness: Some(why.into()),
        }
    }

    pub fn approx(name: impl Into<String>, note: impl Into<String>) -> Self {
        CheckLine {
            name: name.into(),
            verdict: Verdict::ApproxPass,
            witness: Some(note.into()),
        }
    }
}

/// One row of a norm table; numeric fields are fixed-format strings so
/// reports compare bit for bit across runs.
#[derive(Clone, Debug, Serialize)]
pub struct NormRow {
    pub p: String,
    pub lower: String,
    pub upper: String,
    pub interpolation: String,
    pub inorm: String,
    pub projective: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelReport {
    pub model: String,
    pub kind: String,
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub norms: Vec<NormRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub models: Vec<ModelReport>,
}

impl Report {
    pub fn has_failure(&self) -> bool {
        self.models
            .iter()
            .any(|m| m.checks.iter().any(|c| c.verdict == Verdict::Fail))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("model,section,name,verdict,detail\n");
        for m in &self.models {
            for c in &m.checks {
                out.push_str(&format!(
                    "{},check,{},{},{}\n",
                    m.model,
                    csv_quote(&c.name),
                    c.verdict.as_str(),
                    csv_quote(c.witness.as_deref().unwrap_or(""))
                ));
            }
            for row in &m.norms {
                out.push_str(&format!(
                    "{},norm,p={},{},\"lower={} upper={} interp={} inorm={} projective={}\"\n",
                    m.model,
                    row.p,
                    "PASS",
                    row.lower,
                    row.upper,
                    row.interpolation,
                    row.inorm,
                    row.projective
                ));
            }
        }
        out
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn fmt_float(x: f64) -> String {
    format!("{:.12e}", x)
}
