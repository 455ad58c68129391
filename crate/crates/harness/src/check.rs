//! Checks: symbolic residuals built once, then measured at each sample point.

use gconn_core::closed_forms::{FormCheck, RuleCheck};
use gconn_core::{Derivation, EvalCache, Form, GeomError, NumDerivation, NumForm};

use crate::suites::Suite;

/// A symbolic quantity that should vanish, or agree with a second one.
#[derive(Clone, Debug)]
pub enum Value {
    Der(Derivation),
    Form(Form),
}

impl From<Derivation> for Value {
    fn from(d: Derivation) -> Self {
        Value::Der(d)
    }
}

impl From<Form> for Value {
    fn from(f: Form) -> Self {
        Value::Form(f)
    }
}

enum Num {
    Der(NumDerivation),
    Form(NumForm),
}

impl Num {
    fn max_abs(&self) -> f64 {
        match self {
            Num::Der(d) => d.max_abs(),
            Num::Form(f) => f.max_abs(),
        }
    }
}

impl Value {
    fn eval(&self, p: &[f64], cache: &mut EvalCache) -> gconn_core::Result<Num> {
        Ok(match self {
            Value::Der(d) => Num::Der(d.eval_cached(p, cache)?),
            Value::Form(f) => Num::Form(f.eval_cached(p, cache)?),
        })
    }
}

fn diff(a: &Num, b: &Num) -> f64 {
    match (a, b) {
        (Num::Der(x), Num::Der(y)) => x.sub(y).max_abs(),
        (Num::Form(x), Num::Form(y)) => x.sub(y).max_abs(),
        // Mixed kinds never arise from the builders; treat as a full mismatch.
        _ => a.max_abs() + b.max_abs(),
    }
}

/// One argument tuple of an identity: `lhs − rhs` should vanish.
#[derive(Clone, Debug)]
pub struct Item {
    pub label: String,
    pub lhs: Value,
    pub rhs: Option<Value>,
}

impl Item {
    pub fn zero(label: impl Into<String>, v: impl Into<Value>) -> Self {
        Item {
            label: label.into(),
            lhs: v.into(),
            rhs: None,
        }
    }

    pub fn pair(label: impl Into<String>, lhs: impl Into<Value>, rhs: impl Into<Value>) -> Self {
        Item {
            label: label.into(),
            lhs: lhs.into(),
            rhs: Some(rhs.into()),
        }
    }

    pub fn rule(args: &str, r: RuleCheck) -> Self {
        Item::pair(format!("{} {}", r.rule, args).trim().to_string(), r.engine, r.closed)
    }

    pub fn form_rule(args: &str, r: FormCheck) -> Self {
        Item::pair(format!("{} {}", r.rule, args).trim().to_string(), r.engine, r.closed)
    }

    /// `(residual, scale)` at `p`, where scale is the largest coefficient of
    /// either side.
    pub fn measure(&self, p: &[f64]) -> gconn_core::Result<(f64, f64)> {
        self.measure_cached(p, &mut EvalCache::default())
    }

    fn measure_cached(&self, p: &[f64], cache: &mut EvalCache) -> gconn_core::Result<(f64, f64)> {
        let l = self.lhs.eval(p, cache)?;
        match &self.rhs {
            None => Ok((l.max_abs(), 0.0)),
            Some(r) => {
                let r = r.eval(p, cache)?;
                Ok((diff(&l, &r), l.max_abs().max(r.max_abs())))
            }
        }
    }
}

/// The measurement of one check at one point.
#[derive(Clone, Debug, Default)]
pub struct Measure {
    pub residual: f64,
    /// Magnitude the relative tolerance scales with.
    pub scale: f64,
    pub worst: Option<String>,
    pub note: Option<String>,
    /// Overrides the tolerance comparison when set.
    pub verdict: Option<bool>,
}

/// Worst item by `residual / (1 + scale)`.
pub fn measure_items(items: &[Item], p: &[f64]) -> gconn_core::Result<Measure> {
    let mut best = Measure::default();
    let mut best_ratio = -1.0;
    // Items of one check share subtrees, and all of them outlive the cache.
    let mut cache = EvalCache::default();
    for it in items {
        let (r, s) = it.measure_cached(p, &mut cache)?;
        let ratio = r / (1.0 + s);
        if ratio > best_ratio {
            best_ratio = ratio;
            best = Measure {
                residual: r,
                scale: s,
                worst: Some(it.label.clone()),
                ..Measure::default()
            };
        }
    }
    Ok(best)
}

pub type Probe = Box<dyn Fn(&[f64]) -> gconn_core::Result<Measure> + Send + Sync>;

/// How a row's tolerance is set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TolMode {
    /// `tol · (1 + scale)` with the run tolerance.
    Relative,
    /// Absolute bound for identities that hold symbolically.
    Exact,
    /// A fixed absolute bound independent of the run tolerance.
    Fixed(f64),
}

pub const EXACT_TOL: f64 = 1e-12;

pub struct Check {
    pub suite: Suite,
    pub id: &'static str,
    pub variant: Option<String>,
    pub gating: bool,
    pub tol_mode: TolMode,
    /// Set when the check is expected to raise this error tag.
    pub expect_error: Option<&'static str>,
    pub note: Option<String>,
    pub probe: Result<Probe, GeomError>,
}

impl Check {
    pub fn new(suite: Suite, id: &'static str, probe: Result<Probe, GeomError>) -> Self {
        Check {
            suite,
            id,
            variant: None,
            gating: true,
            tol_mode: TolMode::Relative,
            expect_error: None,
            note: None,
            probe,
        }
    }

    /// A check measured as the worst of a list of items.
    pub fn items(suite: Suite, id: &'static str, items: gconn_core::Result<Vec<Item>>) -> Self {
        let probe = items.map(|items| -> Probe { Box::new(move |p| measure_items(&items, p)) });
        Check::new(suite, id, probe)
    }

    pub fn variant(mut self, v: impl Into<String>) -> Self {
        self.variant = Some(v.into());
        self
    }

    pub fn non_gating(mut self) -> Self {
        self.gating = false;
        self
    }

    pub fn exact(mut self) -> Self {
        self.tol_mode = TolMode::Exact;
        self
    }

    pub fn fixed_tol(mut self, t: f64) -> Self {
        self.tol_mode = TolMode::Fixed(t);
        self
    }

    pub fn expecting(mut self, tag: &'static str) -> Self {
        self.expect_error = Some(tag);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }
}
