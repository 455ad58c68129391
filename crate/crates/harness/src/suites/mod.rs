//! Suite definitions. Each suite turns a manifest into a list of checks;
//! symbolic construction happens once per check, numeric measurement once
//! per sample point.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use gconn_core::distributions::{DistributionSplit, SplitGeometry};
use gconn_core::{
    Derivation, Form, Frame, GeomError, GradedMetric, LeviCivitaLift, ScalarExpr, SemiSymmetric,
    VectorField,
};

use crate::check::Check;
use crate::manifest::Manifest;

mod curvature;
mod dist;
mod foundation;
mod lie;
mod pframe;
mod ricci;
mod semisym;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Foundation,
    Semisym,
    Curvature,
    Ricci,
    Dist,
    Lie,
    Pframe,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Foundation,
        Suite::Semisym,
        Suite::Curvature,
        Suite::Ricci,
        Suite::Dist,
        Suite::Lie,
        Suite::Pframe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Foundation => "foundation",
            Suite::Semisym => "semisym",
            Suite::Curvature => "curvature",
            Suite::Ricci => "ricci",
            Suite::Dist => "dist",
            Suite::Lie => "lie",
            Suite::Pframe => "pframe",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A suite name or `all`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    One(Suite),
}

impl Selection {
    pub fn suites(self) -> Vec<Suite> {
        match self {
            Selection::All => Suite::ALL.to_vec(),
            Selection::One(s) => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Selection::All => "all",
            Selection::One(s) => s.name(),
        }
    }
}

impl FromStr for Selection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(Selection::All);
        }
        Suite::ALL
            .iter()
            .find(|x| x.name() == s)
            .map(|x| Selection::One(*x))
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite `{s}` (expected all, {})", names.join(", "))
            })
    }
}

/// Every equation id a suite can emit.
pub const CATALOG: &[(Suite, &str)] = &[
    (Suite::Foundation, "d-squared"),
    (Suite::Foundation, "cartan"),
    (Suite::Foundation, "graded-jacobi"),
    (Suite::Foundation, "lift-commutator"),
    (Suite::Foundation, "diff-fd"),
    (Suite::Semisym, "koszul"),
    (Suite::Semisym, "lc-torsion"),
    (Suite::Semisym, "lc-metricity"),
    (Suite::Semisym, "lc-lift"),
    (Suite::Semisym, "torsion"),
    (Suite::Semisym, "metricity"),
    (Suite::Semisym, "rules-iu"),
    (Suite::Semisym, "rules-omega"),
    (Suite::Curvature, "lc-rules"),
    (Suite::Curvature, "expansion"),
    (Suite::Curvature, "rules-iu"),
    (Suite::Curvature, "rules-omega"),
    (Suite::Ricci, "lc-ricci-flat"),
    (Suite::Ricci, "ricci-flat"),
    (Suite::Ricci, "einstein"),
    (Suite::Dist, "module-laws"),
    (Suite::Dist, "partial-metricity"),
    (Suite::Dist, "partial-torsion"),
    (Suite::Dist, "second-split"),
    (Suite::Dist, "second-symmetry"),
    (Suite::Dist, "partial-koszul"),
    (Suite::Dist, "ss-split"),
    (Suite::Dist, "ss-closed"),
    (Suite::Dist, "ss-metricity"),
    (Suite::Dist, "ss-torsion"),
    (Suite::Dist, "normal-shift"),
    (Suite::Dist, "shape-adjoint"),
    (Suite::Dist, "weingarten"),
    (Suite::Dist, "gauss"),
    (Suite::Dist, "recombination"),
    (Suite::Dist, "gauss-lc"),
    (Suite::Dist, "codazzi"),
    (Suite::Dist, "codazzi-lc"),
    (Suite::Dist, "ricci-eq"),
    (Suite::Dist, "ricci-eq-lc"),
    (Suite::Dist, "ricci-eq-lc-printed"),
    (Suite::Lie, "integrability"),
    (Suite::Lie, "conn-difference"),
    (Suite::Lie, "conn-commutator"),
    (Suite::Lie, "conn-integrable"),
    (Suite::Lie, "curvature"),
    (Suite::Lie, "normal-module"),
    (Suite::Lie, "normal-commutator"),
    (Suite::Lie, "normal-integrable"),
    (Suite::Lie, "normal-curvature"),
    (Suite::Pframe, "canonical-parallel"),
    (Suite::Pframe, "canonical-flat"),
    (Suite::Pframe, "canonical-torsion"),
    (Suite::Pframe, "canonical-metricity"),
    (Suite::Pframe, "dual-torsion"),
    (Suite::Pframe, "lambda-rules"),
    (Suite::Pframe, "lambda-curvature"),
    (Suite::Pframe, "lambda-ricci-flat"),
    (Suite::Pframe, "omega-curvature"),
    (Suite::Pframe, "omega-ricci"),
    (Suite::Pframe, "dual-lie"),
    (Suite::Pframe, "dual-lie-printed"),
    (Suite::Pframe, "dual-lie-parallel"),
    (Suite::Pframe, "schouten-parallel"),
    (Suite::Pframe, "vranceanu-parallel"),
    (Suite::Pframe, "schouten-fixed"),
    (Suite::Pframe, "vranceanu-symmetric"),
    (Suite::Pframe, "nonintegrable-asymmetric"),
];

/// A labelled argument.
pub type Arg = (String, Derivation);

/// Separates the form factor from the generator in scaled argument labels.
const SCALED_MARK: char = '·';

fn is_scaled(a: &Arg) -> bool {
    a.0.contains(SCALED_MARK)
}

/// Deferred symbolic construction of some checks.
pub type Task<'a> = Box<dyn FnOnce() -> Vec<Check> + Send + 'a>;

pub fn task<'a>(f: impl FnOnce() -> Vec<Check> + Send + 'a) -> Task<'a> {
    Box::new(f)
}

/// Shared objects built once per run.
pub struct Context<'a> {
    pub m: &'a Manifest,
    pub gm: Arc<GradedMetric>,
    pub lc: Arc<LeviCivitaLift>,
    pub conn: Arc<SemiSymmetric>,
    pub geometry: Option<Result<Arc<SplitGeometry>, GeomError>>,
}

impl<'a> Context<'a> {
    pub fn new(m: &'a Manifest) -> Result<Self, GeomError> {
        let gm = Arc::new(GradedMetric::new(m.metric.clone()));
        let lc = Arc::new(LeviCivitaLift::new(gm.clone()));
        let conn = Arc::new(SemiSymmetric::new(lc.clone(), m.p.clone())?);
        let geometry = m.distribution.as_ref().map(|d| {
            let split = DistributionSplit::new(m.split_frame(), &d.indices, m.points.clone())?;
            SplitGeometry::new(split, conn.clone()).map(Arc::new)
        });
        Ok(Context {
            m,
            gm,
            lc,
            conn,
            geometry,
        })
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// The split `D ⊕ D⊥` on its own, or `None` without a distribution.
    pub fn split(&self) -> Option<Result<Arc<DistributionSplit>, GeomError>> {
        self.m.distribution.as_ref().map(|d| {
            DistributionSplit::new(self.m.split_frame(), &d.indices, self.m.points.clone()).map(Arc::new)
        })
    }

    /// The orthonormal frame used for Ricci contractions.
    pub fn ortho_frame(&self) -> Result<Arc<Frame>, GeomError> {
        match &self.m.frame {
            Some(f) => Ok(f.clone()),
            None => self.m.metric.orthonormalize().map(Arc::new),
        }
    }

    /// `L1..Lm, i1..im` over the coordinate frame.
    pub fn coord_gens(&self) -> Vec<Arg> {
        generators(&Frame::coordinate(self.dim()), "")
    }

    /// An odd 1-form `x_m dx_1` used to build form-scaled arguments.
    pub fn odd_alpha(&self) -> Form {
        let m = self.dim();
        Form::dx(m, 0).scale(&ScalarExpr::coord(m - 1))
    }

    /// An even, nonconstant 0-form `1 + x_1 x_m`.
    pub fn even_alpha(&self) -> Form {
        let m = self.dim();
        let e = &ScalarExpr::one() + &(&ScalarExpr::coord(0) * &ScalarExpr::coord(m - 1));
        Form::scalar(m, e)
    }

    pub fn alpha_label(&self, a: &Form) -> String {
        a.display_with(&self.m.coords).to_string()
    }

    /// `args` plus one odd-form multiple of the first argument.
    pub fn with_scaled(&self, args: &[Arg]) -> Vec<Arg> {
        let mut out = args.to_vec();
        if let Some((l, d)) = args.first() {
            let a = self.odd_alpha();
            out.push((format!("({}){SCALED_MARK}{l}", self.alpha_label(&a)), d.left_mul(&a)));
        }
        out
    }

    /// Coordinate fields, manifest frame rows and named vector fields.
    pub fn vector_set(&self) -> Vec<(String, VectorField)> {
        let m = self.dim();
        let mut out: Vec<(String, VectorField)> = (0..m)
            .map(|k| (format!("∂{}", self.m.coords[k]), VectorField::coord(m, k)))
            .collect();
        if let Some(f) = &self.m.frame {
            for (k, r) in f.rows().iter().enumerate() {
                out.push((format!("E{}", k + 1), r.clone()));
            }
        }
        for (n, v) in &self.m.vectors {
            out.push((n.clone(), v.clone()));
        }
        out
    }
}

/// `L<k><suffix>` and `i<k><suffix>` for the rows of a frame.
pub fn generators(frame: &Frame, suffix: &str) -> Vec<Arg> {
    frame
        .generators()
        .into_iter()
        .map(|(l, d)| (format!("{l}{suffix}"), d))
        .collect()
}

/// The cartesian product of argument lists.
pub fn product<'x, T>(sets: &[&'x [T]]) -> Vec<Vec<&'x T>> {
    let mut out: Vec<Vec<&T>> = vec![Vec::new()];
    for set in sets {
        let mut next = Vec::with_capacity(out.len() * set.len());
        for prefix in &out {
            for x in set.iter() {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub fn tuple_label(args: &[&Arg]) -> String {
    let names: Vec<&str> = args.iter().map(|a| a.0.as_str()).collect();
    format!("({})", names.join(","))
}

/// Builds the symbolic checks of the selected suites.
pub fn tasks<'a>(ctx: &'a Context<'a>, suite: Suite) -> Vec<Task<'a>> {
    match suite {
        Suite::Foundation => foundation::tasks(ctx),
        Suite::Semisym => semisym::tasks(ctx),
        Suite::Curvature => curvature::tasks(ctx),
        Suite::Ricci => ricci::tasks(ctx),
        Suite::Dist => dist::tasks(ctx),
        Suite::Lie => lie::tasks(ctx),
        Suite::Pframe => pframe::tasks(ctx),
    }
}

/// Items from every tuple of the product of `sets`; the first error wins.
pub fn over<F>(sets: &[&[Arg]], mut f: F) -> gconn_core::Result<Vec<crate::check::Item>>
where
    F: FnMut(&[&Arg], String) -> gconn_core::Result<Vec<crate::check::Item>>,
{
    let mut out = Vec::new();
    for t in product(sets) {
        out.extend(f(&t, tuple_label(&t))?);
    }
    Ok(out)
}

/// Like [`over`], but skips tuples with more than one form-scaled argument.
/// Used for identities with many slots, where each slot still sees the
/// scaled argument once.
pub fn over_lean<F>(sets: &[&[Arg]], mut f: F) -> gconn_core::Result<Vec<crate::check::Item>>
where
    F: FnMut(&[&Arg], String) -> gconn_core::Result<Vec<crate::check::Item>>,
{
    let mut out = Vec::new();
    for t in product(sets) {
        if t.iter().filter(|a| is_scaled(a)).count() > 1 {
            continue;
        }
        out.extend(f(&t, tuple_label(&t))?);
    }
    Ok(out)
}
