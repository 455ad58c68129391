//! Manifest loading, report determinism and the command-line interface.

use std::path::PathBuf;
use std::process::Command;

use gconn::report::Summary;
use gconn::sampling::sample_box;
use gconn::suites::{Selection, Suite};
use gconn::{load_manifest, parse_manifest, run_suite};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.toml"))
}

const FLAT: &str = r#"
coords = ["x1", "x2"]
metric = [["1", "0"], ["0", "1"]]
p = "i(U)"

[vectors]
U = ["1", "0"]

[sample]
seed = 7
count = 4
domain = [[-1, 1], [-1, 1]]
"#;

#[test]
fn undefined_vector_names_its_field() {
    let text = FLAT.replace("i(U)", "i(V)");
    let e = parse_manifest(&text, "bad").unwrap_err();
    assert_eq!(e.field(), Some("vector.V"), "{e}");
}

#[test]
fn malformed_and_invalid_manifests_are_rejected() {
    assert!(parse_manifest("coords = [", "bad").is_err());
    let wrong_rank = FLAT.replace(r#"metric = [["1", "0"], ["0", "1"]]"#, r#"metric = [["1"]]"#);
    assert!(parse_manifest(&wrong_rank, "bad").unwrap_err().field().is_some());
    let singular = FLAT.replace(r#"["0", "1"]]"#, r#"["0", "x1"]]"#);
    assert!(parse_manifest(&singular, "bad").is_err());
    let even_p = FLAT.replace("i(U)", "L(U)");
    assert!(parse_manifest(&even_p, "bad").is_err());
}

#[test]
fn sphere_fixture_loads() {
    let m = load_manifest(fixture("sphere")).unwrap();
    assert_eq!(m.name, "sphere");
    assert_eq!(m.dim(), 2);
    assert_eq!(m.points.len(), 20);
    let f = m.frame.as_ref().expect("sphere supplies a frame");
    let p = &m.points[0];
    let e2 = f.row(1).eval(p).unwrap();
    assert!(e2[0].abs() < 1e-15);
    assert!((e2[1] - 1.0 / p[0].sin()).abs() < 1e-12);
    let d = m.distribution.as_ref().unwrap();
    assert_eq!(d.indices, vec![0]);
    assert_eq!(d.expect_integrable, Some(true));
}

#[test]
fn sampling_is_reproducible() {
    let d = [[0.2, 2.9], [0.1, 6.0]];
    assert_eq!(sample_box(42, 20, &d), sample_box(42, 20, &d));
    assert_ne!(sample_box(42, 20, &d), sample_box(43, 20, &d));
    let a = load_manifest(fixture("sphere")).unwrap();
    let b = load_manifest(fixture("sphere")).unwrap();
    assert_eq!(a.points, b.points);
    assert_eq!(a.hash, b.hash);
}

#[test]
fn reports_are_byte_identical() {
    let m = load_manifest(fixture("flat2d")).unwrap();
    let a = run_suite(&m, Selection::All, None).to_jsonl(None);
    let b = run_suite(&m, Selection::All, None).to_jsonl(None);
    assert_eq!(a, b);
    assert!(!a.contains("timestamp"));
    let stamped = run_suite(&m, Selection::One(Suite::Semisym), None).to_jsonl(Some(1));
    assert!(stamped.lines().next().unwrap().contains("\"timestamp\":1"));
}

#[test]
fn summary_matches_rows() {
    let m = load_manifest(fixture("so3_nonint")).unwrap();
    let r = run_suite(&m, Selection::One(Suite::Dist), None);
    assert_eq!(r.summary, Summary::from_rows(&r.rows));
    assert_eq!(r.summary.rows, r.rows.len());
    assert_eq!(r.summary.passed, r.rows.iter().filter(|x| x.pass).count());
    assert_eq!(r.summary.errors, r.rows.iter().filter(|x| x.error.is_some()).count());
    let per: usize = r.summary.by_suite.values().map(|[p, f]| p + f).sum();
    assert_eq!(per, r.rows.len());
}

#[test]
fn flat_fixture_passes_everything() {
    let m = load_manifest(fixture("flat2d")).unwrap();
    let r = run_suite(&m, Selection::All, None);
    let failed: Vec<_> = r.rows.iter().filter(|x| !x.pass).map(|x| (&x.suite, &x.equation)).collect();
    assert!(failed.is_empty(), "{failed:?}");
}

#[test]
fn sphere_ricci_rows_pass() {
    let m = load_manifest(fixture("sphere")).unwrap();
    let r = run_suite(&m, Selection::One(Suite::Ricci), None);
    assert!(r.rows_for("ricci-flat").count() == 20);
    assert!(r.rows.iter().all(|x| x.pass));
}

#[test]
fn so3_lambda_half_is_ricci_flat() {
    let m = load_manifest(fixture("so3")).unwrap();
    let r = run_suite(&m, Selection::One(Suite::Pframe), None);
    let half: Vec<_> = r
        .rows_for("lambda-ricci-flat")
        .filter(|x| x.variant.as_deref() == Some("λ=0.5"))
        .collect();
    assert_eq!(half.len(), 20);
    assert!(half.iter().all(|x| x.pass));
}

#[test]
fn rows_are_ordered_by_suite() {
    let m = load_manifest(fixture("flat2d")).unwrap();
    let r = run_suite(&m, Selection::All, None);
    let rank = |s: &str| Suite::ALL.iter().position(|x| x.name() == s).unwrap();
    assert!(r.rows.windows(2).all(|w| rank(&w[0].suite) <= rank(&w[1].suite)));
}

fn gconn(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gconn")).args(args).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let flat = fixture("flat2d");
    let flat = flat.to_str().unwrap();
    let ok = gconn(&["check", flat, "--suite", "semisym"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("koszul"));
    // An impossible tolerance fails rows with nonzero residuals.
    let sphere = fixture("sphere");
    let strict = gconn(&["check", sphere.to_str().unwrap(), "--suite", "semisym", "--tol", "0"]);
    assert_eq!(strict.status.code(), Some(1));
    let missing = gconn(&["check", "/nonexistent.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_suite = gconn(&["check", flat, "--suite", "nope"]);
    assert_eq!(bad_suite.status.code(), Some(2));
}

#[test]
fn cli_writes_jsonl() {
    let dir = std::env::temp_dir().join(format!("gconn-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.jsonl");
    let flat = fixture("flat2d");
    let st = gconn(&["check", flat.to_str().unwrap(), "--suite", "ricci", "--json", out.to_str().unwrap()]);
    assert_eq!(st.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["kind"], "header");
    assert!(lines[0]["timestamp"].is_u64());
    assert_eq!(lines.last().unwrap()["kind"], "summary");
    assert!(lines[1..lines.len() - 1].iter().all(|l| l["kind"] == "row"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cli_eval() {
    let flat = fixture("flat_einstein");
    let d = gconn(&["eval", flat.to_str().unwrap(), "--expr", "x1 * L(U)", "--at", "-0.5,2"]);
    assert_eq!(d.status.code(), Some(0), "{}", String::from_utf8_lossy(&d.stderr));
    let s = String::from_utf8_lossy(&d.stdout);
    assert!(s.contains("-5.0"), "{s}");
    let f = gconn(&["eval", flat.to_str().unwrap(), "--expr", "omega", "--at", "3,0"]);
    assert_eq!(f.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&f.stdout).contains("3.0"));
}
