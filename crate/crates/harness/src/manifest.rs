//! TOML manifests: chart, metric, frames, named fields and sampling.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use gconn_core::distributions::DistributionSplit;
use gconn_core::pframe::{Blend, ParallelFrame};
use gconn_core::{
    parse_derivation, parse_expr, parse_form, Derivation, Form, Frame, GeomError, MetricG, Parity,
    Scope, ScalarExpr, VectorField,
};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::sampling::sample_box;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_LAMBDAS: [f64; 3] = [0.3, 0.5, 0.7];

/// Tolerance for accepting a manifest frame as orthonormal.
const ORTHONORMAL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed manifest: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("metric is singular at sample point {0:?}")]
    SingularMetric(Vec<f64>),
}

impl ManifestError {
    /// Field path of a validation error, e.g. `vector.V`.
    pub fn field(&self) -> Option<&str> {
        match self {
            ManifestError::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}

fn invalid(field: impl Into<String>, message: impl fmt::Display) -> ManifestError {
    ManifestError::Validation {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    name: Option<String>,
    coords: Vec<String>,
    metric: Option<Vec<Vec<String>>>,
    frame: Option<Vec<Vec<String>>>,
    parallel_frame: Option<Vec<Vec<String>>>,
    #[serde(default)]
    vectors: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    forms: BTreeMap<String, String>,
    p: Option<String>,
    distribution: Option<RawDistribution>,
    pframe: Option<RawPframe>,
    sample: RawSample,
    tol: Option<f64>,
    #[serde(default)]
    exact: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    indices: Vec<usize>,
    expect_integrable: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPframe {
    lambdas: Option<Vec<f64>>,
    omega: Option<String>,
    expect_constant: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    seed: Option<u64>,
    count: Option<usize>,
    domain: Option<Vec<[f64; 2]>>,
    points: Option<Vec<Vec<f64>>>,
}

/// How the odd derivation `P` of the semi-symmetric connection was given.
#[derive(Clone, Debug, PartialEq)]
pub enum PSpec {
    Zero,
    /// `i(U)`
    Interior { u: String },
    /// `omega*L(U)`
    FormLie { omega: String, u: String },
    /// Any other odd derivation literal.
    General(String),
}

#[derive(Clone, Debug)]
pub struct DistributionSpec {
    /// 0-based frame indices spanning `D`.
    pub indices: Vec<usize>,
    pub expect_integrable: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct PframeSpec {
    pub lambdas: Vec<f64>,
    pub omega: Option<Form>,
    pub omega_text: Option<String>,
    pub expect_constant: Option<bool>,
}

/// A fully resolved manifest.
pub struct Manifest {
    pub name: String,
    pub coords: Vec<String>,
    pub metric: Arc<MetricG>,
    /// Orthonormal frame supplied by the manifest.
    pub frame: Option<Arc<Frame>>,
    pub parallel: Option<Arc<ParallelFrame>>,
    pub vectors: BTreeMap<String, VectorField>,
    pub forms: BTreeMap<String, Form>,
    pub p_spec: PSpec,
    pub p: Derivation,
    pub distribution: Option<DistributionSpec>,
    pub pframe: PframeSpec,
    pub domain: Option<Vec<[f64; 2]>>,
    pub points: Vec<Vec<f64>>,
    pub tol: f64,
    pub exact: bool,
    /// Hex SHA-256 of the manifest text.
    pub hash: String,
}

impl fmt::Debug for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Manifest")
            .field("name", &self.name)
            .field("coords", &self.coords)
            .field("p", &self.p_spec)
            .field("points", &self.points.len())
            .finish_non_exhaustive()
    }
}

impl Manifest {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The frame distributions are split along: the manifest frame, else the
    /// parallel frame, else the coordinate frame.
    pub fn split_frame(&self) -> Arc<Frame> {
        if let Some(f) = &self.frame {
            f.clone()
        } else if let Some(pf) = &self.parallel {
            pf.frame().clone()
        } else {
            Arc::new(Frame::coordinate(self.dim()))
        }
    }

    /// Vector fields visible to expressions: the named ones plus `E<k>` for
    /// manifest frame rows and `X<k>` for parallel frame rows.
    pub fn scope_vectors(&self) -> BTreeMap<String, VectorField> {
        let mut out = self.vectors.clone();
        if let Some(f) = &self.frame {
            for (k, r) in f.rows().iter().enumerate() {
                out.entry(format!("E{}", k + 1)).or_insert_with(|| r.clone());
            }
        }
        if let Some(pf) = &self.parallel {
            for (k, r) in pf.frame().rows().iter().enumerate() {
                out.entry(format!("X{}", k + 1)).or_insert_with(|| r.clone());
            }
        }
        out
    }

    /// `U` and `ω` when `P` has one of the two structured shapes.
    pub fn u_field(&self) -> Option<&VectorField> {
        match &self.p_spec {
            PSpec::Interior { u } | PSpec::FormLie { u, .. } => self.vectors.get(u),
            _ => None,
        }
    }

    pub fn omega_form(&self) -> Option<&Form> {
        match &self.p_spec {
            PSpec::FormLie { omega, .. } => self.forms.get(omega),
            _ => None,
        }
    }
}

/// Reads and resolves a manifest file.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, ManifestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "manifest".into());
    parse_manifest(&text, &fallback)
}

/// Resolves manifest text; `fallback_name` is used when `name` is absent.
pub fn parse_manifest(text: &str, fallback_name: &str) -> Result<Manifest, ManifestError> {
    let raw: RawManifest = toml::from_str(text).map_err(|e| ManifestError::Parse(e.to_string()))?;
    let hash = Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    resolve(raw, fallback_name, hash)
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn expr(text: &str, coords: &[String], field: &str) -> Result<ScalarExpr, ManifestError> {
    parse_expr(text, coords).map_err(|e| invalid(field, e))
}

fn rows(
    raw: &[Vec<String>],
    coords: &[String],
    field: &str,
) -> Result<Vec<VectorField>, ManifestError> {
    let m = coords.len();
    if raw.len() != m {
        return Err(invalid(field, format!("expected {m} rows, found {}", raw.len())));
    }
    raw.iter()
        .enumerate()
        .map(|(k, row)| {
            let f = format!("{field}[{}]", k + 1);
            if row.len() != m {
                return Err(invalid(&f, format!("expected {m} components, found {}", row.len())));
            }
            let comps = row
                .iter()
                .map(|s| expr(s, coords, &f))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(VectorField::new(comps))
        })
        .collect()
}

/// Classifies the `P` text; names are checked later by the full parse.
fn classify_p(text: &str) -> PSpec {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() || t == "0" {
        return PSpec::Zero;
    }
    if let Some(inner) = t.strip_prefix("i(").and_then(|r| r.strip_suffix(')')) {
        if is_ident(inner) {
            return PSpec::Interior { u: inner.into() };
        }
    }
    if let Some((omega, rest)) = t.split_once("*L(") {
        if let Some(u) = rest.strip_suffix(')') {
            if is_ident(omega) && is_ident(u) {
                return PSpec::FormLie {
                    omega: omega.into(),
                    u: u.into(),
                };
            }
        }
    }
    PSpec::General(text.trim().into())
}

/// Maps an unknown name in a derivation literal to the manifest table it
/// should have come from.
fn unknown_name_field(text: &str, name: &str) -> String {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.contains(&format!("L({name})")) || compact.contains(&format!("i({name})")) {
        format!("vector.{name}")
    } else {
        format!("form.{name}")
    }
}

fn resolve(raw: RawManifest, fallback_name: &str, hash: String) -> Result<Manifest, ManifestError> {
    let coords = raw.coords;
    if coords.is_empty() {
        return Err(invalid("coords", "at least one coordinate is required"));
    }
    for (k, c) in coords.iter().enumerate() {
        if !is_ident(c) || coords[..k].contains(c) {
            return Err(invalid(format!("coords[{}]", k + 1), format!("bad or repeated name `{c}`")));
        }
    }
    let m = coords.len();

    let mut vectors = BTreeMap::new();
    for (name, comps) in &raw.vectors {
        let field = format!("vector.{name}");
        if !is_ident(name) {
            return Err(invalid(&field, "not an identifier"));
        }
        if comps.len() != m {
            return Err(invalid(&field, format!("expected {m} components, found {}", comps.len())));
        }
        let c = comps
            .iter()
            .map(|s| expr(s, &coords, &field))
            .collect::<Result<Vec<_>, _>>()?;
        vectors.insert(name.clone(), VectorField::new(c));
    }
    let mut forms = BTreeMap::new();
    for (name, text) in &raw.forms {
        let field = format!("form.{name}");
        if !is_ident(name) {
            return Err(invalid(&field, "not an identifier"));
        }
        let f = parse_form(text, Scope::coords(&coords)).map_err(|e| invalid(&field, e))?;
        forms.insert(name.clone(), f);
    }

    let domain = raw.sample.domain.clone();
    if let Some(d) = &domain {
        if d.len() != m {
            return Err(invalid("sample.domain", format!("expected {m} intervals, found {}", d.len())));
        }
        for (k, [lo, hi]) in d.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid(format!("sample.domain[{}]", k + 1), "need finite lo < hi"));
            }
        }
    }
    let points = match (&raw.sample.points, raw.sample.count) {
        (Some(_), Some(_)) => {
            return Err(invalid("sample", "give either `points` or `count`, not both"))
        }
        (Some(pts), None) => {
            for (k, p) in pts.iter().enumerate() {
                let field = format!("sample.points[{}]", k + 1);
                if p.len() != m {
                    return Err(invalid(&field, format!("expected {m} coordinates")));
                }
                if let Some(d) = &domain {
                    if p.iter().zip(d).any(|(x, [lo, hi])| x < lo || x > hi) {
                        return Err(invalid(&field, "point lies outside the domain box"));
                    }
                }
            }
            pts.clone()
        }
        (None, Some(count)) => {
            let d = domain
                .as_ref()
                .ok_or_else(|| invalid("sample.domain", "required with `count`"))?;
            let seed = raw
                .sample
                .seed
                .ok_or_else(|| invalid("sample.seed", "required with `count`"))?;
            sample_box(seed, count, d)
        }
        (None, None) => return Err(invalid("sample", "give `points` or `count`")),
    };
    if points.is_empty() {
        return Err(invalid("sample", "no sample points"));
    }

    let parallel = match &raw.parallel_frame {
        None => None,
        Some(r) => {
            let rs = rows(r, &coords, "parallel_frame")?;
            let pf = ParallelFrame::new(rs, &points).map_err(|e| invalid("parallel_frame", e))?;
            Some(Arc::new(pf))
        }
    };

    let metric = match (&raw.metric, &parallel) {
        (Some(g), _) => {
            if g.len() != m || g.iter().any(|r| r.len() != m) {
                return Err(invalid("metric", format!("expected a {m}×{m} matrix")));
            }
            let mut mat = Vec::with_capacity(m);
            for (i, r) in g.iter().enumerate() {
                let mut row = Vec::with_capacity(m);
                for (j, s) in r.iter().enumerate() {
                    row.push(expr(s, &coords, &format!("metric[{}][{}]", i + 1, j + 1))?);
                }
                mat.push(row);
            }
            MetricG::new(mat).map_err(|e| invalid("metric", e))?
        }
        (None, Some(pf)) => pf.metric().map_err(|e| invalid("metric", e))?,
        (None, None) => return Err(invalid("metric", "required unless a parallel frame is given")),
    };
    metric.check_points(&points).map_err(|e| match e {
        GeomError::SingularMetric(p) => ManifestError::SingularMetric(p),
        other => invalid("metric", other),
    })?;
    let metric = Arc::new(metric);

    let frame = match &raw.frame {
        None => None,
        Some(r) => {
            let f = Frame::new(rows(r, &coords, "frame")?).map_err(|e| invalid("frame", e))?;
            f.check_nonsingular(&points).map_err(|e| invalid("frame", e))?;
            metric
                .check_orthonormal(&f, &points, ORTHONORMAL_TOL)
                .map_err(|e| invalid("frame", e))?;
            Some(Arc::new(f))
        }
    };
    if let Some(pf) = &parallel {
        metric
            .check_orthonormal(pf.frame(), &points, ORTHONORMAL_TOL)
            .map_err(|e| invalid("parallel_frame", e))?;
    }

    let p_text = raw.p.clone().unwrap_or_else(|| "0".into());
    let p_spec = classify_p(&p_text);
    let scope_vecs = {
        let mut v = vectors.clone();
        if let Some(f) = &frame {
            for (k, r) in f.rows().iter().enumerate() {
                v.entry(format!("E{}", k + 1)).or_insert_with(|| r.clone());
            }
        }
        v
    };
    let scope = Scope {
        coords: &coords,
        forms: Some(&forms),
        vectors: Some(&scope_vecs),
    };
    let p = parse_derivation(&p_text, scope).map_err(|e| match e {
        GeomError::UnknownIdentifier(name) => {
            invalid(unknown_name_field(&p_text, &name), format!("`{name}` is not defined"))
        }
        other => invalid("p", other),
    })?;
    if !p.is_zero() && p.parity() != Some(Parity::Odd) {
        return Err(invalid("p", "P must be an odd derivation"));
    }

    let distribution = match raw.distribution {
        None => None,
        Some(d) => {
            if d.indices.is_empty() || d.indices.len() >= m {
                return Err(invalid(
                    "distribution.indices",
                    "D must be a proper nonempty subset of the frame",
                ));
            }
            let mut idx = Vec::new();
            for &k in &d.indices {
                if k == 0 || k > m {
                    return Err(invalid(
                        "distribution.indices",
                        GeomError::IndexOutOfRange { index: k, dim: m },
                    ));
                }
                if !idx.contains(&(k - 1)) {
                    idx.push(k - 1);
                }
            }
            idx.sort_unstable();
            Some(DistributionSpec {
                indices: idx,
                expect_integrable: d.expect_integrable,
            })
        }
    };

    let raw_pf = raw.pframe.unwrap_or(RawPframe {
        lambdas: None,
        omega: None,
        expect_constant: None,
    });
    let omega = match &raw_pf.omega {
        None => None,
        Some(t) => {
            let sc = Scope {
                coords: &coords,
                forms: Some(&forms),
                vectors: None,
            };
            let f = parse_form(t, sc).map_err(|e| invalid("pframe.omega", e))?;
            if let Some(pf) = &parallel {
                Blend::omega(pf.clone(), f.clone()).map_err(|e| invalid("pframe.omega", e))?;
            }
            Some(f)
        }
    };
    let pframe = PframeSpec {
        lambdas: raw_pf.lambdas.unwrap_or_else(|| DEFAULT_LAMBDAS.to_vec()),
        omega,
        omega_text: raw_pf.omega,
        expect_constant: raw_pf.expect_constant,
    };

    let tol = raw.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid("tol", "must be positive"));
    }

    let manifest = Manifest {
        name: raw.name.unwrap_or_else(|| fallback_name.to_string()),
        coords,
        metric,
        frame,
        parallel,
        vectors,
        forms,
        p_spec,
        p,
        distribution,
        pframe,
        domain,
        points,
        tol,
        exact: raw.exact,
        hash,
    };
    if let Some(d) = &manifest.distribution {
        let split = DistributionSplit::new(manifest.split_frame(), &d.indices, manifest.points.clone())
            .map_err(|e| invalid("distribution.indices", e))?;
        split
            .check_orthogonal(&manifest.metric)
            .map_err(|e| invalid("distribution", e))?;
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_shapes() {
        assert_eq!(classify_p("i(U)"), PSpec::Interior { u: "U".into() });
        assert_eq!(
            classify_p("omega * L(U)"),
            PSpec::FormLie {
                omega: "omega".into(),
                u: "U".into()
            }
        );
        assert_eq!(classify_p("0"), PSpec::Zero);
        assert!(matches!(classify_p("x1*i(U)"), PSpec::General(_)));
    }

    #[test]
    fn unknown_names_map_to_tables() {
        assert_eq!(unknown_name_field("i(V)", "V"), "vector.V");
        assert_eq!(unknown_name_field("eta*L(U)", "eta"), "form.eta");
    }
}
