//! Report rows, summaries and their JSONL / text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Row {
    pub suite: String,
    pub equation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub point_index: usize,
    pub point: Vec<f64>,
    /// Absent when the check raised an error.
    pub residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub gating: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Summary {
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub gating_failed: usize,
    pub errors: usize,
    /// `suite -> [passed, failed]`
    pub by_suite: BTreeMap<String, [usize; 2]>,
}

impl Summary {
    pub fn from_rows(rows: &[Row]) -> Self {
        let mut s = Summary::default();
        for r in rows {
            s.rows += 1;
            let e = s.by_suite.entry(r.suite.clone()).or_default();
            if r.pass {
                s.passed += 1;
                e[0] += 1;
            } else {
                s.failed += 1;
                e[1] += 1;
                if r.gating {
                    s.gating_failed += 1;
                }
            }
            if r.error.is_some() {
                s.errors += 1;
            }
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub manifest: String,
    pub manifest_hash: String,
    pub engine_version: String,
    pub suite: String,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

#[derive(Serialize)]
struct Header<'a> {
    kind: &'static str,
    manifest: &'a str,
    manifest_hash: &'a str,
    engine_version: &'a str,
    suite: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    kind: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

impl CheckReport {
    pub fn all_gating_pass(&self) -> bool {
        self.summary.gating_failed == 0
    }

    /// Rows of one equation id.
    pub fn rows_for<'a>(&'a self, equation: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.equation == equation)
    }

    /// Line-oriented JSON: a header, one line per row, then the summary.
    /// With `timestamp = None` the output depends only on the manifest.
    pub fn to_jsonl(&self, timestamp: Option<u64>) -> String {
        let mut out = String::new();
        let header = Header {
            kind: "header",
            manifest: &self.manifest,
            manifest_hash: &self.manifest_hash,
            engine_version: &self.engine_version,
            suite: &self.suite,
            timestamp,
        };
        out.push_str(&serde_json::to_string(&header).expect("header serializes"));
        out.push('\n');
        for r in &self.rows {
            let line = Tagged { kind: "row", body: r };
            out.push_str(&serde_json::to_string(&line).expect("row serializes"));
            out.push('\n');
        }
        let s = Tagged {
            kind: "summary",
            body: &self.summary,
        };
        out.push_str(&serde_json::to_string(&s).expect("summary serializes"));
        out.push('\n');
        out
    }

    /// One line per (suite, equation, variant) with the worst point.
    pub fn human_summary(&self) -> String {
        struct Agg {
            points: usize,
            failed: usize,
            worst: f64,
            tol: f64,
            gating: bool,
            tags: Vec<String>,
            notes: Vec<String>,
        }
        let mut groups: Vec<((String, String, Option<String>), Agg)> = Vec::new();
        for r in &self.rows {
            let key = (r.suite.clone(), r.equation.clone(), r.variant.clone());
            let idx = match groups.iter().position(|(k, _)| *k == key) {
                Some(i) => i,
                None => {
                    groups.push((
                        key,
                        Agg {
                            points: 0,
                            failed: 0,
                            worst: 0.0,
                            tol: r.tol,
                            gating: r.gating,
                            tags: Vec::new(),
                            notes: Vec::new(),
                        },
                    ));
                    groups.len() - 1
                }
            };
            let a = &mut groups[idx].1;
            a.points += 1;
            if !r.pass {
                a.failed += 1;
            }
            if let Some(v) = r.residual {
                if v > a.worst {
                    a.worst = v;
                    a.tol = r.tol;
                }
            }
            if let Some(e) = &r.error {
                if !a.tags.contains(e) {
                    a.tags.push(e.clone());
                }
            }
            if let Some(n) = &r.note {
                if !a.notes.contains(n) {
                    a.notes.push(n.clone());
                }
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "manifest {} ({})", self.manifest, &self.manifest_hash[..12.min(self.manifest_hash.len())]);
        for ((suite, eq, variant), a) in &groups {
            let status = if a.failed == 0 {
                "PASS"
            } else if a.gating {
                "FAIL"
            } else {
                "fail (non-gating)"
            };
            let name = match variant {
                Some(v) => format!("{eq} [{v}]"),
                None => eq.clone(),
            };
            let _ = write!(
                out,
                "{status:<5} {suite:<10} {name:<40} points {:>3}  max residual {:.3e}  tol {:.1e}",
                a.points, a.worst, a.tol
            );
            if !a.tags.is_empty() {
                let _ = write!(out, "  error {}", a.tags.join(","));
            }
            if let Some(n) = a.notes.first() {
                let _ = write!(out, "  ({n})");
            }
            out.push('\n');
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} rows: {} passed, {} failed ({} gating), {} errors",
            s.rows, s.passed, s.failed, s.gating_failed, s.errors
        );
        out
    }
}
