//! Derivations of the form algebra, stored over the coordinate generators.
//!
//! Every derivation is `W = Σ_j l_j L_j + Σ_j i_j ι_j` where `L_j` is the Lie
//! derivative along `∂_j` (even), `ι_j` the interior product with `∂_j` (odd)
//! and the coefficients are forms multiplied from the left. The coefficients
//! are recovered from the action: `l_j = W(x_j)`, `i_j = W(dx_j)`.

use std::fmt;

use crate::error::{GeomError, Result};
use crate::expr::{EvalCache, ScalarExpr};
use crate::forms::{Form, NumForm};
use crate::parity::Parity;
use crate::vector::VectorField;

#[derive(Clone, PartialEq)]
pub struct Derivation {
    dim: usize,
    lie: Vec<Form>,
    ins: Vec<Form>,
}

impl Derivation {
    pub fn zero(dim: usize) -> Self {
        Derivation {
            dim,
            lie: vec![Form::zero(dim); dim],
            ins: vec![Form::zero(dim); dim],
        }
    }

    pub fn from_parts(lie: Vec<Form>, ins: Vec<Form>) -> Self {
        let dim = lie.len();
        assert_eq!(ins.len(), dim, "generator coefficient lists differ in length");
        Derivation { dim, lie, ins }
    }

    /// `L_{∂_j}`.
    pub fn lie_gen(dim: usize, j: usize) -> Self {
        let mut d = Self::zero(dim);
        d.lie[j] = Form::one(dim);
        d
    }

    /// `ι_{∂_j}`.
    pub fn ins_gen(dim: usize, j: usize) -> Self {
        let mut d = Self::zero(dim);
        d.ins[j] = Form::one(dim);
        d
    }

    /// Lie derivative along `v`: `Σ a^j L_j + da^j ι_j`.
    pub fn lift_lie(v: &VectorField) -> Self {
        let dim = v.dim();
        Derivation {
            dim,
            lie: v.comps().iter().map(|a| Form::scalar(dim, a.clone())).collect(),
            ins: v.comps().iter().map(|a| Form::scalar(dim, a.clone()).d()).collect(),
        }
    }

    /// Interior product with `v`: `Σ a^j ι_j`.
    pub fn lift_ins(v: &VectorField) -> Self {
        let dim = v.dim();
        Derivation {
            dim,
            lie: vec![Form::zero(dim); dim],
            ins: v.comps().iter().map(|a| Form::scalar(dim, a.clone())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lie_coeffs(&self) -> &[Form] {
        &self.lie
    }

    pub fn ins_coeffs(&self) -> &[Form] {
        &self.ins
    }

    pub fn is_zero(&self) -> bool {
        self.lie.iter().chain(&self.ins).all(|f| f.is_zero())
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                found: self.dim,
            });
        }
        Ok(())
    }

    fn zip(&self, o: &Derivation, f: impl Fn(&Form, &Form) -> Form) -> Derivation {
        Derivation {
            dim: self.dim,
            lie: self.lie.iter().zip(&o.lie).map(|(a, b)| f(a, b)).collect(),
            ins: self.ins.iter().zip(&o.ins).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn map(&self, f: impl Fn(&Form) -> Form) -> Derivation {
        Derivation {
            dim: self.dim,
            lie: self.lie.iter().map(&f).collect(),
            ins: self.ins.iter().map(&f).collect(),
        }
    }

    pub fn add(&self, o: &Derivation) -> Derivation {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Derivation) -> Derivation {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Derivation {
        self.scale_const(-1.0)
    }

    pub fn scale_const(&self, c: f64) -> Derivation {
        if c == 1.0 {
            return self.clone();
        }
        self.map(|f| f.scale_const(c))
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Derivation>>(dim: usize, it: I) -> Derivation {
        it.into_iter().fold(Derivation::zero(dim), |acc, d| acc.add(d))
    }

    /// `a · W`: wedge `a` onto every coefficient from the left.
    pub fn left_mul(&self, a: &Form) -> Derivation {
        if a.is_zero() {
            return Derivation::zero(self.dim);
        }
        self.map(|f| a.wedge(f))
    }

    /// `W · a = (−1)^{|a||W|} a · W`, applied per homogeneous part.
    pub fn right_mul(&self, a: &Form) -> Derivation {
        let mut r = Derivation::zero(self.dim);
        for (pw, w) in self.parity_parts() {
            for (pa, fa) in a.parity_parts() {
                r = r.add(&w.left_mul(&fa).scale_const(Parity::sign(pw, pa)));
            }
        }
        r
    }

    /// Parity if `self` is homogeneous; the zero derivation counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut p: Option<Parity> = None;
        let mut note = |q: Parity| -> bool {
            match p {
                None => {
                    p = Some(q);
                    true
                }
                Some(r) => r == q,
            }
        };
        for f in &self.lie {
            for q in f.parity_parts().into_iter().map(|(q, _)| q) {
                if !note(q) {
                    return None;
                }
            }
        }
        for f in &self.ins {
            for q in f.parity_parts().into_iter().map(|(q, _)| q.flip()) {
                if !note(q) {
                    return None;
                }
            }
        }
        Some(p.unwrap_or(Parity::Even))
    }

    pub fn require_homogeneous(&self, what: &str) -> Result<Parity> {
        self.parity()
            .ok_or_else(|| GeomError::NonHomogeneous(what.to_string()))
    }

    pub fn parity_part(&self, p: Parity) -> Derivation {
        Derivation {
            dim: self.dim,
            lie: self.lie.iter().map(|f| f.parity_part(p)).collect(),
            ins: self.ins.iter().map(|f| f.parity_part(p.flip())).collect(),
        }
    }

    /// Nonzero homogeneous parts; their sum is `self`.
    pub fn parity_parts(&self) -> Vec<(Parity, Derivation)> {
        Parity::both()
            .into_iter()
            .map(|p| (p, self.parity_part(p)))
            .filter(|(_, d)| !d.is_zero())
            .collect()
    }

    /// Action on a form: `Σ l_j ∧ ∂_j α + i_j ∧ ι_j α`.
    pub fn apply(&self, alpha: &Form) -> Form {
        let mut r = Form::zero(self.dim);
        for j in 0..self.dim {
            if !self.lie[j].is_zero() {
                let pa = alpha.partial(j);
                if !pa.is_zero() {
                    r = r.add(&self.lie[j].wedge(&pa));
                }
            }
            if !self.ins[j].is_zero() {
                let ia = alpha.interior_coord(j);
                if !ia.is_zero() {
                    r = r.add(&self.ins[j].wedge(&ia));
                }
            }
        }
        r
    }

    /// Graded commutator `W1∘W2 − (−1)^{|W1||W2|} W2∘W1`, bilinear over parts.
    pub fn commutator(&self, o: &Derivation) -> Derivation {
        let mut r = Derivation::zero(self.dim);
        for (p1, a) in self.parity_parts() {
            for (p2, b) in o.parity_parts() {
                let s = Parity::sign(p1, p2);
                let part = Derivation {
                    dim: self.dim,
                    lie: (0..self.dim)
                        .map(|j| a.apply(&b.lie[j]).sub(&b.apply(&a.lie[j]).scale_const(s)))
                        .collect(),
                    ins: (0..self.dim)
                        .map(|j| a.apply(&b.ins[j]).sub(&b.apply(&a.ins[j]).scale_const(s)))
                        .collect(),
                };
                r = r.add(&part);
            }
        }
        r
    }

    /// Rebuilds a derivation from its action on coordinates and their
    /// differentials.
    pub fn reconstruct(dim: usize, act: impl Fn(&Form) -> Form) -> Derivation {
        Derivation {
            dim,
            lie: (0..dim)
                .map(|j| act(&Form::scalar(dim, ScalarExpr::coord(j))))
                .collect(),
            ins: (0..dim).map(|j| act(&Form::dx(dim, j))).collect(),
        }
    }

    pub fn eval(&self, p: &[f64]) -> Result<NumDerivation> {
        self.eval_cached(p, &mut EvalCache::default())
    }

    pub fn eval_cached(&self, p: &[f64], cache: &mut EvalCache) -> Result<NumDerivation> {
        Ok(NumDerivation {
            lie: self.lie.iter().map(|f| f.eval_cached(p, cache)).collect::<Result<_>>()?,
            ins: self.ins.iter().map(|f| f.eval_cached(p, cache)).collect::<Result<_>>()?,
        })
    }

    pub fn max_size(&self) -> usize {
        self.lie
            .iter()
            .chain(&self.ins)
            .map(|f| f.max_size())
            .max()
            .unwrap_or(0)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DerivationPrinter { d: self, names }
    }
}

struct DerivationPrinter<'a> {
    d: &'a Derivation,
    names: &'a [String],
}

impl fmt::Display for DerivationPrinter<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (label, coeffs) in [("L", &self.d.lie), ("i", &self.d.ins)] {
            for (j, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "[{}] {}{}", c.display_with(self.names), label, j + 1)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

/// A derivation evaluated at a point: numeric generator coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NumDerivation {
    pub lie: Vec<NumForm>,
    pub ins: Vec<NumForm>,
}

impl NumDerivation {
    pub fn max_abs(&self) -> f64 {
        self.lie
            .iter()
            .chain(&self.ins)
            .fold(0.0, |m, f| m.max(f.max_abs()))
    }

    pub fn sub(&self, o: &NumDerivation) -> NumDerivation {
        NumDerivation {
            lie: self.lie.iter().zip(&o.lie).map(|(a, b)| a.sub(b)).collect(),
            ins: self.ins.iter().zip(&o.ins).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    /// Nonzero entries as `(label, value)` such as `("dx1 L2", 0.5)`.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for (label, coeffs) in [("L", &self.lie), ("i", &self.ins)] {
            for (j, c) in coeffs.iter().enumerate() {
                for (b, v) in &c.coeffs {
                    let mono = crate::forms::blade_name(*b);
                    let name = if mono.is_empty() {
                        format!("{label}{}", j + 1)
                    } else {
                        format!("{mono} {label}{}", j + 1)
                    };
                    out.push((name, *v));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> ScalarExpr {
        ScalarExpr::coord(i)
    }

    #[test]
    fn lifts() {
        let v = VectorField::new(vec![x(0), ScalarExpr::zero()]);
        let l = Derivation::lift_lie(&v);
        assert_eq!(l.lie_coeffs()[0], Form::scalar(2, x(0)));
        assert_eq!(l.ins_coeffs()[0], Form::dx(2, 0));
        assert_eq!(l.apply(&Form::dx(2, 0)), Form::dx(2, 0).lie(&v));
        let i = Derivation::lift_ins(&VectorField::coord(2, 0));
        assert_eq!(
            i.apply(&Form::monomial(2, 0b11, ScalarExpr::one())),
            Form::dx(2, 1)
        );
    }

    #[test]
    fn module_multiplication_signs() {
        let i1 = Derivation::ins_gen(2, 0);
        let dx1 = Form::dx(2, 0);
        assert_eq!(i1.right_mul(&dx1), i1.left_mul(&dx1).neg());
        let l1 = Derivation::lie_gen(2, 0);
        assert_eq!(l1.right_mul(&dx1), l1.left_mul(&dx1));
    }

    #[test]
    fn commutator_lie_ins() {
        // [L_{x ∂2}, i_{∂1}] = i_{[x∂2, ∂1]} = −i_2
        let v = VectorField::new(vec![ScalarExpr::zero(), x(0)]);
        let c = Derivation::lift_lie(&v).commutator(&Derivation::lift_ins(&VectorField::coord(2, 0)));
        assert_eq!(c, Derivation::ins_gen(2, 1).neg());
        let i12 = Derivation::ins_gen(2, 0).commutator(&Derivation::ins_gen(2, 1));
        assert!(i12.is_zero());
    }
}
