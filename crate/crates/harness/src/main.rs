use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand};

use gconn::suites::Selection;
use gconn::{load_manifest, run_suite};
use gconn_core::forms::blade_name;
use gconn_core::{parse_derivation, parse_form, Scope};

#[derive(Parser)]
#[command(name = "gconn", version, about = "Check graded connection identities on a manifest")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run identity suites at the manifest's sample points.
    Check {
        manifest: PathBuf,
        /// `all` or one of foundation, semisym, curvature, ricci, dist, lie, pframe.
        #[arg(long, default_value = "all")]
        suite: Selection,
        /// Relative tolerance; overrides the manifest.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the full report as JSON lines.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate a derivation (or form) expression at a point.
    Eval {
        manifest: PathBuf,
        #[arg(long)]
        expr: String,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    match Cli::parse().cmd {
        Cmd::Check {
            manifest,
            suite,
            tol,
            json,
        } => {
            let m = load_manifest(&manifest)?;
            let report = run_suite(&m, suite, tol);
            print!("{}", report.human_summary());
            if let Some(path) = json {
                let ts = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .ok()
                    .map(|d| d.as_secs());
                std::fs::write(&path, report.to_jsonl(ts))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(report.all_gating_pass())
        }
        Cmd::Eval { manifest, expr, at } => {
            let m = load_manifest(&manifest)?;
            let p: Vec<f64> = at
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .context("--at expects comma-separated numbers")?;
            if p.len() != m.dim() {
                bail!("--at has {} coordinates, manifest has {}", p.len(), m.dim());
            }
            let vectors = m.scope_vectors();
            let scope = || Scope {
                coords: &m.coords,
                forms: Some(&m.forms),
                vectors: Some(&vectors),
            };
            match parse_derivation(&expr, scope()) {
                Ok(d) => {
                    let v = d.eval(&p)?;
                    let entries = v.entries();
                    if entries.is_empty() {
                        println!("0");
                    }
                    for (name, x) in entries {
                        println!("{name}\t{x:.12e}");
                    }
                }
                Err(derr) => {
                    let f = parse_form(&expr, scope()).map_err(|_| derr)?;
                    let v = f.eval(&p)?;
                    if v.coeffs.is_empty() {
                        println!("0");
                    }
                    for (b, x) in &v.coeffs {
                        let name = blade_name(*b);
                        let name = if name.is_empty() { "1".to_string() } else { name };
                        println!("{name}\t{x:.12e}");
                    }
                }
            }
            Ok(true)
        }
    }
}
