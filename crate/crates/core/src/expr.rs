//! Symbolic scalar functions of chart coordinates.
//!
//! A [`ScalarExpr`] is an immutable, reference-counted expression tree. The
//! constructors apply a light normal form (flattening, constant folding, like
//! term collection, power merging) so that equal expressions usually share
//! structure, but nothing downstream relies on simplification for
//! correctness. Coordinates are addressed by 0-based index.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use crate::error::{GeomError, Result};

/// Memoized values of shared subtrees at one evaluation point.
#[derive(Debug, Default)]
pub struct EvalCache(HashMap<usize, f64>);

/// Exact rational exponent with positive denominator in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator in rational exponent");
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Rational {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn add(self, o: Rational) -> Rational {
        Rational::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    fn mul(self, o: Rational) -> Rational {
        Rational::new(self.num * o.num, self.den * o.den)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Elementary functions kept as explicit nodes. `sqrt` is not here: it is
/// stored as a power with exponent 1/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Exp => v.exp(),
            Func::Log => {
                if v > 0.0 {
                    v.ln()
                } else {
                    f64::NAN
                }
            }
        }
    }
}

#[derive(Debug)]
enum Node {
    Const(f64),
    Pi,
    Coord(usize),
    Sum(Vec<ScalarExpr>),
    Product(Vec<ScalarExpr>),
    Pow(ScalarExpr, Rational),
    Apply(Func, ScalarExpr),
}

/// Derivatives along the first few coordinates are memoized per node; charts
/// in practice have dimension at most four.
const DIFF_CACHE: usize = 4;

struct Inner {
    node: Node,
    hash: u64,
    size: usize,
    dcache: [OnceLock<ScalarExpr>; DIFF_CACHE],
}

/// Immutable symbolic scalar.
#[derive(Clone)]
pub struct ScalarExpr(Arc<Inner>);

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (&self.0.node, &other.0.node) {
            (Node::Const(a), Node::Const(b)) => a.to_bits() == b.to_bits(),
            (Node::Pi, Node::Pi) => true,
            (Node::Coord(a), Node::Coord(b)) => a == b,
            (Node::Sum(a), Node::Sum(b)) | (Node::Product(a), Node::Product(b)) => a == b,
            (Node::Pow(a, r), Node::Pow(b, s)) => r == s && a == b,
            (Node::Apply(f, a), Node::Apply(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for ScalarExpr {}

impl Hash for ScalarExpr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

fn make(node: Node) -> ScalarExpr {
    let mut h = DefaultHasher::new();
    let size = match &node {
        Node::Const(c) => {
            0u8.hash(&mut h);
            c.to_bits().hash(&mut h);
            1
        }
        Node::Pi => {
            1u8.hash(&mut h);
            1
        }
        Node::Coord(i) => {
            2u8.hash(&mut h);
            i.hash(&mut h);
            1
        }
        Node::Sum(ts) => {
            3u8.hash(&mut h);
            ts.iter().for_each(|t| t.0.hash.hash(&mut h));
            ts.iter().fold(1usize, |s, t| s.saturating_add(t.0.size))
        }
        Node::Product(ts) => {
            4u8.hash(&mut h);
            ts.iter().for_each(|t| t.0.hash.hash(&mut h));
            ts.iter().fold(1usize, |s, t| s.saturating_add(t.0.size))
        }
        Node::Pow(b, r) => {
            5u8.hash(&mut h);
            b.0.hash.hash(&mut h);
            r.hash(&mut h);
            b.0.size.saturating_add(1)
        }
        Node::Apply(f, a) => {
            6u8.hash(&mut h);
            f.hash(&mut h);
            a.0.hash.hash(&mut h);
            a.0.size.saturating_add(1)
        }
    };
    ScalarExpr(Arc::new(Inner {
        node,
        hash: h.finish(),
        size,
        dcache: Default::default(),
    }))
}

/// Deterministic ordering used to canonicalize sums and products: leaves
/// first (constants, pi, coordinates by index), then composite nodes by hash.
fn canonical_cmp(a: &ScalarExpr, b: &ScalarExpr) -> Ordering {
    fn key(e: &ScalarExpr) -> (u8, usize, u64) {
        match &e.0.node {
            Node::Const(_) => (0, 0, e.0.hash),
            Node::Pi => (1, 0, 0),
            Node::Coord(i) => (2, *i, 0),
            Node::Apply(..) => (3, 0, e.0.hash),
            Node::Pow(b, _) => {
                let (_, i, h) = key(b);
                (4, i, h)
            }
            Node::Product(_) => (5, 0, e.0.hash),
            Node::Sum(_) => (6, 0, e.0.hash),
        }
    }
    key(a).cmp(&key(b)).then_with(|| a.0.hash.cmp(&b.0.hash))
}

fn norm_zero(c: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c
    }
}

impl ScalarExpr {
    pub fn constant(c: f64) -> Self {
        make(Node::Const(norm_zero(c)))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn pi() -> Self {
        make(Node::Pi)
    }

    /// The coordinate function with 0-based index `i`.
    pub fn coord(i: usize) -> Self {
        make(Node::Coord(i))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.0.node {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    /// Tree size counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        self.0.size
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match &self.0.node {
            Node::Const(_) | Node::Pi => None,
            Node::Coord(i) => Some(*i),
            Node::Sum(ts) | Node::Product(ts) => ts.iter().filter_map(|t| t.max_coord()).max(),
            Node::Pow(b, _) => b.max_coord(),
            Node::Apply(_, a) => a.max_coord(),
        }
    }

    /// n-ary sum with like terms collected.
    pub fn sum<I: IntoIterator<Item = ScalarExpr>>(terms: I) -> Self {
        let mut constant = 0.0;
        let mut keys: Vec<ScalarExpr> = Vec::new();
        let mut coefs: Vec<f64> = Vec::new();
        let mut index: HashMap<ScalarExpr, usize> = HashMap::new();
        let mut stack: Vec<ScalarExpr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            match &t.0.node {
                Node::Const(c) => constant += c,
                Node::Sum(inner) => stack.extend(inner.iter().rev().cloned()),
                _ => {
                    let (c, key) = split_coefficient(&t);
                    match index.get(&key) {
                        Some(&k) => coefs[k] += c,
                        None => {
                            index.insert(key.clone(), keys.len());
                            keys.push(key);
                            coefs.push(c);
                        }
                    }
                }
            }
        }
        pythagorean(&mut keys, &mut coefs, &mut index, &mut constant);
        let mut out: Vec<ScalarExpr> = keys
            .into_iter()
            .zip(coefs)
            .filter(|(_, c)| *c != 0.0)
            .map(|(k, c)| {
                if c == 1.0 {
                    k
                } else {
                    ScalarExpr::product([ScalarExpr::constant(c), k])
                }
            })
            .collect();
        out.sort_by(|a, b| canonical_cmp(&split_coefficient(a).1, &split_coefficient(b).1));
        if constant != 0.0 {
            out.insert(0, ScalarExpr::constant(constant));
        }
        match out.len() {
            0 => ScalarExpr::zero(),
            1 => out.pop().unwrap(),
            _ => make(Node::Sum(out)),
        }
    }

    /// n-ary product with powers of equal bases merged.
    pub fn product<I: IntoIterator<Item = ScalarExpr>>(factors: I) -> Self {
        let mut constant = 1.0;
        let mut bases: Vec<ScalarExpr> = Vec::new();
        let mut exps: Vec<Rational> = Vec::new();
        let mut index: HashMap<ScalarExpr, usize> = HashMap::new();
        let mut stack: Vec<ScalarExpr> = factors.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            let (base, r) = match &t.0.node {
                Node::Const(c) => {
                    constant *= c;
                    continue;
                }
                Node::Product(inner) => {
                    stack.extend(inner.iter().rev().cloned());
                    continue;
                }
                Node::Pow(b, r) => (b.clone(), *r),
                _ => (t.clone(), Rational::integer(1)),
            };
            match index.get(&base) {
                Some(&k) => exps[k] = exps[k].add(r),
                None => {
                    index.insert(base.clone(), bases.len());
                    bases.push(base);
                    exps.push(r);
                }
            }
        }
        if constant == 0.0 {
            return ScalarExpr::zero();
        }
        let mut out = Vec::with_capacity(bases.len());
        for (b, r) in bases.into_iter().zip(exps) {
            if r.is_zero() {
                continue;
            }
            let p = ScalarExpr::pow_raw(b, r);
            match &p.0.node {
                Node::Const(c) => constant *= c,
                Node::Product(inner) => {
                    // integer power of a product distributed over its factors
                    for f in inner {
                        match f.as_const() {
                            Some(c) => constant *= c,
                            None => out.push(f.clone()),
                        }
                    }
                }
                _ => out.push(p),
            }
        }
        if constant == 0.0 {
            return ScalarExpr::zero();
        }
        out.sort_by(canonical_cmp);
        if out.is_empty() {
            return ScalarExpr::constant(constant);
        }
        if constant != 1.0 {
            out.insert(0, ScalarExpr::constant(constant));
        }
        if out.len() == 1 {
            return out.pop().unwrap();
        }
        make(Node::Product(out))
    }

    /// `self^r`. Nested powers are merged only where that is valid for every
    /// admissible base value.
    pub fn pow(&self, r: Rational) -> Self {
        let p = ScalarExpr::pow_raw(self.clone(), r);
        if let Node::Product(_) = p.0.node {
            // re-run through product so duplicate bases get merged
            ScalarExpr::product([p])
        } else {
            p
        }
    }

    pub fn powi(&self, n: i64) -> Self {
        self.pow(Rational::integer(n))
    }

    fn pow_raw(base: ScalarExpr, r: Rational) -> Self {
        if r.is_zero() {
            return ScalarExpr::one();
        }
        if r == Rational::integer(1) {
            return base;
        }
        match &base.0.node {
            Node::Const(c) => {
                let v = if r.is_integer() {
                    c.powi(r.num as i32)
                } else if *c >= 0.0 {
                    c.powf(r.to_f64())
                } else {
                    f64::NAN
                };
                if v.is_finite() {
                    return ScalarExpr::constant(v);
                }
                make(Node::Pow(base, r))
            }
            Node::Pow(b, s) if r.is_integer() || s.den != 1 => ScalarExpr::pow_raw(b.clone(), s.mul(r)),
            Node::Product(fs) if r.is_integer() => {
                let parts: Vec<ScalarExpr> = fs.iter().map(|f| ScalarExpr::pow_raw(f.clone(), r)).collect();
                make(Node::Product(parts))
            }
            _ => make(Node::Pow(base, r)),
        }
    }

    pub fn sqrt(&self) -> Self {
        self.pow(Rational::new(1, 2))
    }

    pub fn recip(&self) -> Self {
        self.powi(-1)
    }

    pub fn apply(f: Func, arg: ScalarExpr) -> Self {
        if let Some(c) = arg.as_const() {
            let v = f.apply(c);
            if v.is_finite() {
                return ScalarExpr::constant(v);
            }
        }
        make(Node::Apply(f, arg))
    }

    pub fn sin(&self) -> Self {
        Self::apply(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Self {
        Self::apply(Func::Cos, self.clone())
    }

    pub fn tan(&self) -> Self {
        Self::apply(Func::Tan, self.clone())
    }

    pub fn exp(&self) -> Self {
        Self::apply(Func::Exp, self.clone())
    }

    pub fn ln(&self) -> Self {
        Self::apply(Func::Log, self.clone())
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 1.0 {
            return self.clone();
        }
        ScalarExpr::product([ScalarExpr::constant(c), self.clone()])
    }

    /// Exact partial derivative along the coordinate with 0-based index `j`.
    pub fn diff(&self, j: usize) -> Self {
        if j < DIFF_CACHE {
            self.0.dcache[j].get_or_init(|| self.diff_uncached(j)).clone()
        } else {
            self.diff_uncached(j)
        }
    }

    fn diff_uncached(&self, j: usize) -> Self {
        match &self.0.node {
            Node::Const(_) | Node::Pi => ScalarExpr::zero(),
            Node::Coord(i) => {
                if *i == j {
                    ScalarExpr::one()
                } else {
                    ScalarExpr::zero()
                }
            }
            Node::Sum(ts) => ScalarExpr::sum(ts.iter().map(|t| t.diff(j))),
            Node::Product(fs) => {
                let mut terms = Vec::new();
                for k in 0..fs.len() {
                    let dk = fs[k].diff(j);
                    if dk.is_zero() {
                        continue;
                    }
                    let factors = fs
                        .iter()
                        .enumerate()
                        .map(|(l, f)| if l == k { dk.clone() } else { f.clone() });
                    terms.push(ScalarExpr::product(factors));
                }
                ScalarExpr::sum(terms)
            }
            Node::Pow(b, r) => {
                let db = b.diff(j);
                if db.is_zero() {
                    return ScalarExpr::zero();
                }
                let lowered = b.pow(r.add(Rational::integer(-1)));
                ScalarExpr::product([ScalarExpr::constant(r.to_f64()), lowered, db])
            }
            Node::Apply(f, a) => {
                let da = a.diff(j);
                if da.is_zero() {
                    return ScalarExpr::zero();
                }
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => a.sin().scale(-1.0),
                    Func::Tan => a.cos().powi(-2),
                    Func::Exp => self.clone(),
                    Func::Log => a.recip(),
                };
                ScalarExpr::product([outer, da])
            }
        }
    }

    /// Numeric value at `p`; any non-finite intermediate is an error.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        self.eval_cached(p, &mut EvalCache::default())
    }

    /// [`ScalarExpr::eval`] sharing memoized subtrees through `cache`, which
    /// must only be reused at the same point and while the evaluated
    /// expressions are alive.
    pub fn eval_cached(&self, p: &[f64], cache: &mut EvalCache) -> Result<f64> {
        let v = self.eval_raw(p, &mut cache.0);
        if v.is_finite() {
            Ok(v)
        } else if self.size() <= 200 {
            Err(GeomError::EvalSingularity(self.to_string()))
        } else {
            Err(GeomError::EvalSingularity(format!("<expression of {} nodes>", self.size())))
        }
    }

    /// Evaluates without the finiteness check; NaN propagates so a single
    /// check at the root catches every singular subterm. Large shared
    /// subtrees are memoized by address.
    fn eval_raw(&self, p: &[f64], memo: &mut HashMap<usize, f64>) -> f64 {
        let key = Arc::as_ptr(&self.0) as usize;
        let shared = self.0.size > 4;
        if shared {
            if let Some(v) = memo.get(&key) {
                return *v;
            }
        }
        let v = match &self.0.node {
            Node::Const(c) => *c,
            Node::Pi => std::f64::consts::PI,
            Node::Coord(i) => p.get(*i).copied().unwrap_or(f64::NAN),
            Node::Sum(ts) => ts.iter().map(|t| t.eval_raw(p, memo)).sum(),
            Node::Product(fs) => fs.iter().map(|f| f.eval_raw(p, memo)).product(),
            Node::Pow(b, r) => {
                let x = b.eval_raw(p, memo);
                if r.is_integer() {
                    x.powi(r.num as i32)
                } else if x < 0.0 {
                    f64::NAN
                } else if r.den == 2 && r.num == 1 {
                    x.sqrt()
                } else {
                    x.powf(r.to_f64())
                }
            }
            Node::Apply(f, a) => f.apply(a.eval_raw(p, memo)),
        };
        let v = if v.is_finite() { v } else { f64::NAN };
        if shared {
            memo.insert(key, v);
        }
        v
    }

    /// Printable form using the given coordinate names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        Printer { e: self, names }
    }
}

/// Every way to write the monomial as `f(a)^2 · rest` with `f` sine or cosine.
fn split_trig_squared(key: &ScalarExpr) -> Vec<(Func, ScalarExpr, ScalarExpr)> {
    let factors: &[ScalarExpr] = match &key.0.node {
        Node::Product(fs) => fs,
        _ => std::slice::from_ref(key),
    };
    let mut out = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let Node::Pow(b, r) = &f.0.node else { continue };
        let Node::Apply(func @ (Func::Sin | Func::Cos), a) = &b.0.node else { continue };
        if !r.is_integer() || r.num < 2 {
            continue;
        }
        let mut rest: Vec<ScalarExpr> = factors
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        if r.num > 2 {
            rest.push(b.powi(r.num - 2));
        }
        out.push((*func, a.clone(), ScalarExpr::product(rest)));
    }
    out
}

/// Collected sum terms: `coefficient · key` plus a constant.
struct Terms<'a> {
    keys: &'a mut Vec<ScalarExpr>,
    coefs: &'a mut Vec<f64>,
    index: &'a mut HashMap<ScalarExpr, usize>,
    constant: &'a mut f64,
}

impl Terms<'_> {
    fn coef_of(&self, e: &ScalarExpr) -> f64 {
        if let Some(v) = e.as_const() {
            return *self.constant * if v == 0.0 { 0.0 } else { 1.0 / v };
        }
        let (rc, rkey) = split_coefficient(e);
        self.index.get(&rkey).map(|&j| self.coefs[j] / rc).unwrap_or(0.0)
    }

    fn add(&mut self, c: f64, e: &ScalarExpr) {
        if let Some(v) = e.as_const() {
            *self.constant += c * v;
            return;
        }
        let (rc, rkey) = split_coefficient(e);
        match self.index.get(&rkey) {
            Some(&j) => self.coefs[j] += c * rc,
            None => {
                self.index.insert(rkey.clone(), self.keys.len());
                self.keys.push(rkey);
                self.coefs.push(c * rc);
            }
        }
    }
}

/// Applies `sin(a)^2 + cos(a)^2 = 1` among collected sum terms:
/// `c·M·s^2 + c·M·o^2 → c·M` and `c·M·s^2 − c·M → −c·M·o^2`, where `s` and
/// `o` are sine and cosine in either order. Each rewrite removes a term.
fn pythagorean(
    keys: &mut Vec<ScalarExpr>,
    coefs: &mut Vec<f64>,
    index: &mut HashMap<ScalarExpr, usize>,
    constant: &mut f64,
) {
    let mut t = Terms {
        keys,
        coefs,
        index,
        constant,
    };
    let mut k = 0;
    while k < t.keys.len() {
        let c = t.coefs[k];
        if c != 0.0 {
            let key = t.keys[k].clone();
            for (func, a, rest) in split_trig_squared(&key) {
                let other = match func {
                    Func::Sin => a.cos(),
                    _ => a.sin(),
                }
                .powi(2);
                let partner = ScalarExpr::product([rest.clone(), other.clone()]);
                if t.coef_of(&partner) == c {
                    t.coefs[k] = 0.0;
                    t.add(-c, &partner);
                    t.add(c, &rest);
                    break;
                }
                if t.coef_of(&rest) == -c {
                    t.coefs[k] = 0.0;
                    t.add(c, &rest);
                    t.add(-c, &partner);
                    break;
                }
            }
        }
        k += 1;
    }
}

/// Splits `c * rest` into its numeric coefficient and the remaining monomial.
fn split_coefficient(t: &ScalarExpr) -> (f64, ScalarExpr) {
    if let Node::Product(fs) = &t.0.node {
        if let Some(c) = fs[0].as_const() {
            let rest = if fs.len() == 2 {
                fs[1].clone()
            } else {
                make(Node::Product(fs[1..].to_vec()))
            };
            return (c, rest);
        }
    }
    (1.0, t.clone())
}

struct Printer<'a> {
    e: &'a ScalarExpr,
    names: &'a [String],
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.e, self.names)
    }
}

fn write_name(f: &mut fmt::Formatter<'_>, i: usize, names: &[String]) -> fmt::Result {
    match names.get(i) {
        Some(n) => write!(f, "{n}"),
        None => write!(f, "x{}", i + 1),
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &ScalarExpr, names: &[String]) -> fmt::Result {
    match &e.0.node {
        Node::Sum(ts) => {
            for (k, t) in ts.iter().enumerate() {
                let (c, rest) = split_coefficient(t);
                if k == 0 {
                    write_product_like(f, t, names)?;
                } else if c < 0.0 {
                    write!(f, " - ")?;
                    let flipped = if c == -1.0 { rest } else { ScalarExpr::product([ScalarExpr::constant(-c), rest]) };
                    write_product_like(f, &flipped, names)?;
                } else {
                    write!(f, " + ")?;
                    write_product_like(f, t, names)?;
                }
            }
            Ok(())
        }
        _ => write_product_like(f, e, names),
    }
}

/// Writes a non-sum expression; a sum is parenthesized.
fn write_product_like(f: &mut fmt::Formatter<'_>, e: &ScalarExpr, names: &[String]) -> fmt::Result {
    match &e.0.node {
        Node::Sum(_) => {
            write!(f, "(")?;
            write_expr(f, e, names)?;
            write!(f, ")")
        }
        Node::Product(fs) => {
            let mut num: Vec<&ScalarExpr> = Vec::new();
            let mut den: Vec<ScalarExpr> = Vec::new();
            let mut lead = None;
            for x in fs {
                match &x.0.node {
                    Node::Const(c) => lead = Some(*c),
                    Node::Pow(b, r) if r.num < 0 => den.push(b.pow(Rational::new(-r.num, r.den))),
                    _ => num.push(x),
                }
            }
            let mut first = true;
            match lead {
                Some(c) if c == -1.0 && !num.is_empty() => write!(f, "-")?,
                Some(c) => {
                    write!(f, "{c}")?;
                    first = false;
                }
                None => {}
            }
            if num.is_empty() && first {
                write!(f, "1")?;
                first = false;
            }
            for x in num {
                if !first {
                    write!(f, "*")?;
                }
                write_atom(f, x, names)?;
                first = false;
            }
            if !den.is_empty() {
                write!(f, "/")?;
                if den.len() == 1 {
                    write_atom(f, &den[0], names)?;
                } else {
                    write!(f, "(")?;
                    for (k, x) in den.iter().enumerate() {
                        if k > 0 {
                            write!(f, "*")?;
                        }
                        write_atom(f, x, names)?;
                    }
                    write!(f, ")")?;
                }
            }
            Ok(())
        }
        Node::Pow(b, r) if r.num < 0 => {
            write!(f, "1/")?;
            write_atom(f, &b.pow(Rational::new(-r.num, r.den)), names)
        }
        _ => write_atom(f, e, names),
    }
}

/// Writes an expression that can stand as a factor.
fn write_atom(f: &mut fmt::Formatter<'_>, e: &ScalarExpr, names: &[String]) -> fmt::Result {
    match &e.0.node {
        Node::Const(c) => {
            if *c < 0.0 {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        Node::Pi => write!(f, "pi"),
        Node::Coord(i) => write_name(f, *i, names),
        Node::Sum(_) | Node::Product(_) => {
            write!(f, "(")?;
            write_expr(f, e, names)?;
            write!(f, ")")
        }
        Node::Pow(b, r) => {
            match &b.0.node {
                Node::Coord(_) | Node::Pi | Node::Apply(..) => write_atom(f, b, names)?,
                Node::Const(c) if *c >= 0.0 => write_atom(f, b, names)?,
                _ => {
                    write!(f, "(")?;
                    write_expr(f, b, names)?;
                    write!(f, ")")?;
                }
            }
            if r.is_integer() && r.num > 0 {
                write!(f, "^{}", r.num)
            } else {
                write!(f, "^({r})")
            }
        }
        Node::Apply(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a, names)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, &[])
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<f64> for ScalarExpr {
    fn from(c: f64) -> Self {
        ScalarExpr::constant(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl std::ops::$tr<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                let f: fn(&ScalarExpr, &ScalarExpr) -> ScalarExpr = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                std::ops::$tr::$m(&self, &rhs)
            }
        }
        impl std::ops::$tr<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr {
                std::ops::$tr::$m(&self, rhs)
            }
        }
        impl std::ops::$tr<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr {
                std::ops::$tr::$m(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| ScalarExpr::sum([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| ScalarExpr::sum([a.clone(), b.scale(-1.0)]));
binop!(Mul, mul, |a, b| ScalarExpr::product([a.clone(), b.clone()]));
binop!(Div, div, |a, b| ScalarExpr::product([a.clone(), b.recip()]));

impl std::ops::Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        self.scale(-1.0)
    }
}

impl std::ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> ScalarExpr {
        ScalarExpr::coord(0)
    }
    fn y() -> ScalarExpr {
        ScalarExpr::coord(1)
    }

    #[test]
    fn like_terms_collect() {
        let e = &(&x() * &y()) + &(&y() * &x());
        assert_eq!(e, (&x() * &y()).scale(2.0));
        assert!((&x() - &x()).is_zero());
    }

    #[test]
    fn pythagorean_folds() {
        let s2 = x().sin().powi(2);
        let c2 = x().cos().powi(2);
        assert!((&s2 + &c2).is_one());
        let m = y().recip();
        let e = &(&(&s2 * &m) + &(&c2 * &m)) + &x();
        assert_eq!(e, &m + &x());
        let e = &(&x().sin().powi(3) * &y()) + &(&(&x().sin() * &c2) * &y());
        assert_eq!(e, &x().sin() * &y());
        let s2y = y().sin().powi(2);
        let e = &(&s2y * &s2) + &(&s2y * &c2);
        assert_eq!(e, s2y);
        assert_eq!(&ScalarExpr::one() - &c2, s2);
        assert_eq!(&(&y() * &s2) - &y(), (&y() * &c2).scale(-1.0));
        // unequal coefficients are left alone
        let e = &s2.scale(2.0) + &c2;
        assert_eq!(e.size(), (&s2.scale(2.0) + &c2).size());
        assert!(!e.is_one());
    }

    #[test]
    fn powers_merge() {
        let e = &x() * &x().recip();
        assert!(e.is_one());
        assert_eq!(&x() * &x(), x().powi(2));
        assert_eq!(x().sqrt().powi(2), x());
        // (x^2)^(1/2) is |x|, not x
        assert_ne!(x().powi(2).sqrt(), x());
    }

    #[test]
    fn diff_chain_rule() {
        let e = x().sin().powi(2);
        let d = e.diff(0);
        let p = [0.7, 0.0];
        assert!((d.eval(&p).unwrap() - (1.4f64).sin()).abs() < 1e-15);
        assert_eq!((&x() * &y()).diff(1), x());
        assert!(ScalarExpr::constant(3.0).diff(0).is_zero());
    }

    #[test]
    fn singular_eval() {
        let e = x().recip();
        assert!(matches!(e.eval(&[0.0]), Err(GeomError::EvalSingularity(_))));
        assert!(x().ln().eval(&[-1.0]).is_err());
        assert!(x().sqrt().eval(&[-1.0]).is_err());
    }

    #[test]
    fn display_basic() {
        let names = vec!["x".to_string(), "y".to_string()];
        let e = &x() - &(&y().recip() * &ScalarExpr::constant(2.0));
        assert_eq!(e.display_with(&names).to_string(), "x - 2/y");
        assert_eq!(x().sin().powi(-2).display_with(&names).to_string(), "1/sin(x)^2");
        assert_eq!(x().pow(Rational::new(-1, 2)).to_string(), "1/x1^(1/2)");
    }
}
