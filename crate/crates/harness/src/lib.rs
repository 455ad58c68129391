//! Manifest-driven verification of graded connection identities.
//!
//! A manifest fixes a chart, a metric, optional frames, a distribution and a
//! derivation `P`; [`run_suite`] builds every symbolic identity once and
//! measures it at each sample point.

pub mod check;
pub mod manifest;
pub mod report;
pub mod sampling;
pub mod suites;

use std::time::Instant;

use rayon::prelude::*;

use check::{Check, TolMode, EXACT_TOL};
use manifest::Manifest;
use report::{CheckReport, Row, Summary};
use suites::{Context, Selection, Suite};

pub use manifest::{load_manifest, parse_manifest, ManifestError};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "GCONN_THREADS";

/// When set, per-check build and measure times go to stderr.
pub const TIMINGS_ENV: &str = "GCONN_TIMINGS";

/// Runs the selected suites. `tol` overrides the manifest tolerance.
pub fn run_suite(m: &Manifest, selection: Selection, tol: Option<f64>) -> CheckReport {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|n| *n > 0);
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(|| run_inner(m, selection, tol)),
        None => run_inner(m, selection, tol),
    }
}

fn run_inner(m: &Manifest, selection: Selection, tol: Option<f64>) -> CheckReport {
    let base_tol = match tol {
        Some(t) => t,
        None if m.exact => EXACT_TOL,
        None => m.tol,
    };
    let mut rows = Vec::new();
    match Context::new(m) {
        Err(e) => {
            for s in selection.suites() {
                let c = Check::new(s, "setup", Err(e.clone()));
                rows.extend(measure_check(m, &c, base_tol));
            }
        }
        Ok(ctx) => {
            let mut tasks = Vec::new();
            for s in selection.suites() {
                tasks.extend(suites::tasks(&ctx, s));
            }
            let timings = std::env::var_os(TIMINGS_ENV).is_some();
            let checks: Vec<Check> = tasks
                .into_par_iter()
                .flat_map_iter(|t| {
                    let t0 = Instant::now();
                    let cs = t();
                    if timings {
                        for c in &cs {
                            eprintln!("build   {:>8.3}s {} {}", t0.elapsed().as_secs_f64(), c.suite, c.id);
                        }
                    }
                    cs
                })
                .collect();
            let per: Vec<Vec<Row>> = checks
                .par_iter()
                .map(|c| {
                    let t0 = Instant::now();
                    let rows = measure_check(m, c, base_tol);
                    if timings {
                        eprintln!("measure {:>8.3}s {} {}", t0.elapsed().as_secs_f64(), c.suite, c.id);
                    }
                    rows
                })
                .collect();
            rows.extend(per.into_iter().flatten());
        }
    }
    // Stable: keeps check order within a suite.
    rows.sort_by_key(|r| suite_rank(&r.suite));
    let summary = Summary::from_rows(&rows);
    CheckReport {
        manifest: m.name.clone(),
        manifest_hash: m.hash.clone(),
        engine_version: ENGINE_VERSION.to_string(),
        suite: selection.name().to_string(),
        rows,
        summary,
    }
}

fn suite_rank(name: &str) -> usize {
    Suite::ALL.iter().position(|s| s.name() == name).unwrap_or(usize::MAX)
}

fn measure_check(m: &Manifest, c: &Check, base_tol: f64) -> Vec<Row> {
    m.points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut row = Row {
                suite: c.suite.name().to_string(),
                equation: c.id.to_string(),
                variant: c.variant.clone(),
                point_index: i,
                point: p.clone(),
                residual: None,
                tol: 0.0,
                pass: false,
                gating: c.gating,
                worst: None,
                note: c.note.clone(),
                error: None,
            };
            let measured = match &c.probe {
                Ok(probe) => probe(p),
                Err(e) => Err(e.clone()),
            };
            match measured {
                Err(e) => {
                    let tag = e.tag();
                    row.error = Some(tag.to_string());
                    if c.expect_error == Some(tag) {
                        row.pass = true;
                        row.note = Some(format!("expected {tag}: {e}"));
                    } else {
                        row.note = Some(e.to_string());
                    }
                }
                Ok(ms) => {
                    let tol = match c.tol_mode {
                        TolMode::Relative => base_tol * (1.0 + ms.scale),
                        TolMode::Exact => EXACT_TOL,
                        TolMode::Fixed(t) => t * (1.0 + ms.scale),
                    };
                    row.tol = tol;
                    row.residual = Some(ms.residual);
                    row.worst = ms.worst;
                    if ms.note.is_some() {
                        row.note = ms.note;
                    }
                    row.pass = match (c.expect_error, ms.verdict) {
                        // The expected error did not occur.
                        (Some(tag), _) => {
                            row.note = Some(format!("expected {tag}, but the check evaluated"));
                            false
                        }
                        (None, Some(v)) => v,
                        (None, None) => ms.residual.is_finite() && ms.residual <= tol,
                    };
                }
            }
            row
        })
        .collect()
}
