//! The JSON and text report emitted by `verify` and `oracle`.

use std::fmt::Write as _;

use serde::Serialize;
use terwilliger_wreath::CheckReport;

#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: &'static str,
    pub witness: Option<String>,
    pub millis: Option<u64>,
}

impl CheckEntry {
    pub fn from_report(r: &CheckReport, millis: Option<u64>) -> Self {
        CheckEntry {
            name: r.name.clone(),
            status: if r.passed() { "pass" } else { "fail" },
            witness: r.first_witness().map(str::to_string),
            millis,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub moduli: Option<Vec<usize>>,
    pub order: usize,
    pub num_classes: usize,
    pub base_points: Vec<usize>,
    #[serde(rename = "dim_T")]
    pub dim_t: Option<usize>,
    pub dim_formula: Option<usize>,
    pub matrix_block: Option<usize>,
    pub one_dim_count: Option<usize>,
    pub checks: Vec<CheckEntry>,
    pub version: &'static str,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckEntry::passed)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
        let mut out = String::new();
        if let Some(m) = &self.moduli {
            let parts: Vec<String> = m.iter().map(ToString::to_string).collect();
            let _ = write!(out, "moduli {}  ", parts.join(","));
        }
        let _ = writeln!(out, "order {}  classes {}  base points {}", self.order, self.num_classes, self.base_points.len());
        let _ = writeln!(
            out,
            "dim T {}  formula {}  matrix block {}  one-dimensional blocks {}",
            opt(self.dim_t),
            opt(self.dim_formula),
            opt(self.matrix_block),
            opt(self.one_dim_count)
        );
        for c in &self.checks {
            let _ = write!(out, "{:<4} {}", c.status, c.name);
            if let Some(ms) = c.millis {
                let _ = write!(out, " ({ms} ms)");
            }
            if let Some(w) = &c.witness {
                let _ = write!(out, ": {w}");
            }
            out.push('\n');
        }
        out
    }
}
