use std::collections::BTreeMap;

use serde::Serialize;

/// Values in bits are printed with nine decimals; `inf` for the tagged infinity.
pub fn format_value(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // avoid printing -0.000000000
    let v = if v.abs() < 5e-10 { 0.0 } else { v };
    format!("{v:.9}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultEntry {
    pub name: String,
    /// Formatted with [`format_value`].
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<crate::files::MatrixJson>,
}

impl ResultEntry {
    pub fn value(name: &str, v: f64) -> Self {
        Self {
            name: name.into(),
            value: format_value(v),
            expected: None,
            tolerance: None,
            pass: None,
            witness: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub feas_tol: f64,
    pub gap_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_gap: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

/// Machine-readable record of one command. Wall time is kept out of the
/// serialized form so that reports are byte-identical across runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub results: Vec<ResultEntry>,
    pub diagnostics: Diagnostics,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| r.pass == Some(false)).count()
    }

    /// Plain-text rendering. A single measure prints its bare value.
    pub fn render(&self) -> String {
        if self.results.len() == 1 && self.results[0].pass.is_none() {
            return format!("{}\n", self.results[0].value);
        }
        let width = self.results.iter().map(|r| r.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &self.results {
            let status = match r.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "    ",
            };
            out.push_str(&format!("{status}  {:<width$}  {}", r.name, r.value));
            if let Some(e) = &r.expected {
                out.push_str(&format!("  expected {e}"));
            }
            if let Some(t) = r.tolerance {
                out.push_str(&format!("  tol {t:e}"));
            }
            out.push('\n');
        }
        out
    }
}
