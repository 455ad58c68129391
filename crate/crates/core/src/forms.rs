//! Differential forms on one chart.
//!
//! A basis monomial `dx_{i1}∧…∧dx_{ik}` with `i1 < … < ik` is stored as a
//! bitmask, so a [`Form`] is a sparse map from masks to coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{GeomError, Result};
use crate::expr::{EvalCache, ScalarExpr};
use crate::parity::Parity;
use crate::vector::VectorField;

/// Bitmask of a strictly increasing multi-index.
pub type Blade = u32;

pub fn blade_degree(b: Blade) -> usize {
    b.count_ones() as usize
}

/// Sign of `dx_I ∧ dx_J` relative to `dx_{I∪J}`; `None` if they overlap.
pub fn wedge_sign(i: Blade, j: Blade) -> Option<f64> {
    if i & j != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = j;
    while rest != 0 {
        let k = rest.trailing_zeros();
        inversions += (i >> (k + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Human-readable monomial such as `dx1^dx3`; empty for degree 0.
pub fn blade_name(b: Blade) -> String {
    let mut parts = Vec::new();
    for k in 0..32 {
        if b & (1 << k) != 0 {
            parts.push(format!("dx{}", k + 1));
        }
    }
    parts.join("^")
}

#[derive(Clone, PartialEq)]
pub struct Form {
    dim: usize,
    terms: BTreeMap<Blade, ScalarExpr>,
}

impl Form {
    pub fn zero(dim: usize) -> Self {
        Form {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(dim: usize, f: ScalarExpr) -> Self {
        Self::monomial(dim, 0, f)
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::scalar(dim, ScalarExpr::constant(c))
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, 1.0)
    }

    /// `dx_j` for the 0-based coordinate index `j`.
    pub fn dx(dim: usize, j: usize) -> Self {
        Self::monomial(dim, 1 << j, ScalarExpr::one())
    }

    pub fn monomial(dim: usize, blade: Blade, f: ScalarExpr) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() && (blade >> dim) == 0 {
            terms.insert(blade, f);
        }
        Form { dim, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Blade, ScalarExpr)>>(dim: usize, it: I) -> Self {
        let mut f = Form::zero(dim);
        for (b, c) in it {
            f.add_term(b, c);
        }
        f
    }

    fn add_term(&mut self, b: Blade, c: ScalarExpr) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&b) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(b, merged);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &ScalarExpr)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn coeff(&self, b: Blade) -> ScalarExpr {
        self.terms.get(&b).cloned().unwrap_or_else(ScalarExpr::zero)
    }

    /// Structural zero test (no numeric cancellation detection).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree-0 coefficient, if the form is a pure function.
    pub fn as_scalar(&self) -> Option<ScalarExpr> {
        match self.terms.len() {
            0 => Some(ScalarExpr::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// Parity if every term has the same degree parity; zero is even.
    pub fn parity(&self) -> Option<Parity> {
        let mut p: Option<Parity> = None;
        for b in self.terms.keys() {
            let q = Parity::of_degree(blade_degree(*b));
            match p {
                None => p = Some(q),
                Some(r) if r != q => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(Parity::Even))
    }

    pub fn parity_part(&self, p: Parity) -> Form {
        Form {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| Parity::of_degree(blade_degree(**b)) == p)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    /// Nonzero homogeneous-parity parts.
    pub fn parity_parts(&self) -> Vec<(Parity, Form)> {
        Parity::both()
            .into_iter()
            .map(|p| (p, self.parity_part(p)))
            .filter(|(_, f)| !f.is_zero())
            .collect()
    }

    /// Components by degree, lowest first; their sum is `self`.
    pub fn homogeneous_components(&self) -> Vec<(usize, Form)> {
        let mut by_deg: BTreeMap<usize, Form> = BTreeMap::new();
        for (b, c) in &self.terms {
            by_deg
                .entry(blade_degree(*b))
                .or_insert_with(|| Form::zero(self.dim))
                .terms
                .insert(*b, c.clone());
        }
        by_deg.into_iter().collect()
    }

    fn check(&self, o: &Form) -> Result<()> {
        if self.dim != o.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                found: o.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut r = self.clone();
        for (b, c) in &o.terms {
            r.add_term(*b, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.scale_const(-1.0))
    }

    pub fn neg(&self) -> Form {
        self.scale_const(-1.0)
    }

    pub fn scale_const(&self, c: f64) -> Form {
        if c == 1.0 {
            return self.clone();
        }
        if c == 0.0 {
            return Form::zero(self.dim);
        }
        self.map(|e| e.scale(c))
    }

    pub fn scale(&self, f: &ScalarExpr) -> Form {
        if f.is_one() {
            return self.clone();
        }
        self.map(|e| f * e)
    }

    fn map(&self, mut op: impl FnMut(&ScalarExpr) -> ScalarExpr) -> Form {
        Form::from_terms(self.dim, self.terms.iter().map(|(b, c)| (*b, op(c))))
    }

    /// Exterior product; errors only on mismatched chart dimension.
    pub fn try_wedge(&self, o: &Form) -> Result<Form> {
        self.check(o)?;
        Ok(self.wedge(o))
    }

    pub fn wedge(&self, o: &Form) -> Form {
        debug_assert_eq!(self.dim, o.dim);
        if let Some(s) = self.as_scalar() {
            return o.scale(&s);
        }
        if let Some(s) = o.as_scalar() {
            return self.scale(&s);
        }
        let mut r = Form::zero(self.dim);
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                if let Some(sign) = wedge_sign(*i, *j) {
                    r.add_term(i | j, (a * b).scale(sign));
                }
            }
        }
        r
    }

    /// Exterior derivative.
    pub fn d(&self) -> Form {
        let mut r = Form::zero(self.dim);
        for (i, a) in &self.terms {
            for k in 0..self.dim {
                if i & (1 << k) != 0 {
                    continue;
                }
                let dk = a.diff(k);
                if dk.is_zero() {
                    continue;
                }
                // dx_k ∧ dx_I: move dx_k past the indices of I below k
                let below = (i & ((1u32 << k) - 1)).count_ones();
                let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                r.add_term(i | (1 << k), dk.scale(sign));
            }
        }
        r
    }

    /// Interior product with the coordinate field `∂_j`.
    pub fn interior_coord(&self, j: usize) -> Form {
        let mut r = Form::zero(self.dim);
        for (i, a) in &self.terms {
            if i & (1 << j) == 0 {
                continue;
            }
            let below = (i & ((1u32 << j) - 1)).count_ones();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            r.add_term(i & !(1 << j), a.scale(sign));
        }
        r
    }

    pub fn interior(&self, v: &VectorField) -> Form {
        let mut r = Form::zero(self.dim);
        for (j, a) in v.comps().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            r = r.add(&self.interior_coord(j).scale(a));
        }
        r
    }

    /// Coefficient-wise `∂_j`, i.e. the Lie derivative along `∂_j`.
    pub fn partial(&self, j: usize) -> Form {
        self.map(|c| c.diff(j))
    }

    /// Lie derivative along `v` by Cartan's formula.
    pub fn lie(&self, v: &VectorField) -> Form {
        self.interior(v).d().add(&self.d().interior(v))
    }

    pub fn eval(&self, p: &[f64]) -> Result<NumForm> {
        self.eval_cached(p, &mut EvalCache::default())
    }

    pub fn eval_cached(&self, p: &[f64], cache: &mut EvalCache) -> Result<NumForm> {
        let mut coeffs = BTreeMap::new();
        for (b, c) in &self.terms {
            let v = c.eval_cached(p, cache)?;
            if v != 0.0 {
                coeffs.insert(*b, v);
            }
        }
        Ok(NumForm { coeffs })
    }

    /// Largest node count among coefficients.
    pub fn max_size(&self) -> usize {
        self.terms.values().map(|c| c.size()).max().unwrap_or(0)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        FormPrinter { f: self, names }
    }
}

struct FormPrinter<'a> {
    f: &'a Form,
    names: &'a [String],
}

impl fmt::Display for FormPrinter<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (b, c)) in self.f.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *b == 0 {
                write!(f, "{}", c.display_with(self.names))?;
            } else {
                write!(f, "({}) * {}", c.display_with(self.names), blade_name(*b))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

/// A form evaluated at a point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NumForm {
    pub coeffs: BTreeMap<Blade, f64>,
}

impl NumForm {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, o: &NumForm) -> NumForm {
        let mut coeffs = self.coeffs.clone();
        for (b, v) in &o.coeffs {
            *coeffs.entry(*b).or_insert(0.0) -= v;
        }
        NumForm { coeffs }
    }

    pub fn add(&self, o: &NumForm) -> NumForm {
        let mut coeffs = self.coeffs.clone();
        for (b, v) in &o.coeffs {
            *coeffs.entry(*b).or_insert(0.0) += v;
        }
        NumForm { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> ScalarExpr {
        ScalarExpr::coord(i)
    }

    #[test]
    fn wedge_antisymmetry() {
        let a = Form::dx(2, 0);
        let b = Form::dx(2, 1);
        assert_eq!(a.wedge(&b), Form::monomial(2, 0b11, ScalarExpr::one()));
        assert_eq!(b.wedge(&a), Form::monomial(2, 0b11, ScalarExpr::constant(-1.0)));
        assert!(Form::dx(2, 0).scale(&x(0)).wedge(&Form::dx(2, 0)).is_zero());
        assert_eq!(Form::dx(2, 0).add(&Form::dx(2, 1)).wedge(&b), a.wedge(&b));
    }

    #[test]
    fn exterior_derivative() {
        let xy = Form::scalar(2, &x(0) * &x(1));
        assert_eq!(xy.d(), Form::from_terms(2, [(0b01, x(1)), (0b10, x(0))]));
        let f = Form::dx(2, 0).scale(&(&x(0) * &x(1)));
        assert_eq!(f.d(), Form::monomial(2, 0b11, -x(0)));
        assert!(Form::dx(2, 0).d().is_zero());
    }

    #[test]
    fn interior_signs() {
        let v = Form::monomial(2, 0b11, ScalarExpr::one());
        assert_eq!(v.interior_coord(0), Form::dx(2, 1));
        assert_eq!(v.interior_coord(1), Form::dx(2, 0).neg());
        let w = VectorField::new(vec![x(0), ScalarExpr::zero()]);
        assert_eq!(Form::dx(2, 0).interior(&w), Form::scalar(2, x(0)));
    }

    #[test]
    fn lie_cartan() {
        let e1 = VectorField::coord(2, 0);
        assert_eq!(Form::dx(2, 0).scale(&x(0)).lie(&e1), Form::dx(2, 0));
        assert_eq!(Form::scalar(2, &x(0) * &x(1)).lie(&e1), Form::scalar(2, x(1)));
        assert_eq!(Form::dx(2, 1).scale(&x(0)).lie(&e1), Form::dx(2, 1));
    }
}
