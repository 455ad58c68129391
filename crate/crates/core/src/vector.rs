//! Vector fields in the coordinate basis.

use std::fmt;

use crate::error::{GeomError, Result};
use crate::expr::ScalarExpr;

/// `Σ_j a^j ∂_j` with symbolic components.
#[derive(Clone, PartialEq)]
pub struct VectorField {
    comps: Vec<ScalarExpr>,
}

impl VectorField {
    pub fn new(comps: Vec<ScalarExpr>) -> Self {
        VectorField { comps }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField {
            comps: vec![ScalarExpr::zero(); dim],
        }
    }

    /// The coordinate field `∂_j` (0-based).
    pub fn coord(dim: usize, j: usize) -> Self {
        let mut v = Self::zero(dim);
        v.comps[j] = ScalarExpr::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[ScalarExpr] {
        &self.comps
    }

    pub fn comp(&self, j: usize) -> &ScalarExpr {
        &self.comps[j]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Directional derivative `v(f)`.
    pub fn apply(&self, f: &ScalarExpr) -> ScalarExpr {
        ScalarExpr::sum(
            self.comps
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(j, a)| a * f.diff(j)),
        )
    }

    /// Lie bracket `[v, w]`.
    pub fn bracket(&self, w: &VectorField) -> VectorField {
        VectorField::new(
            (0..self.dim())
                .map(|k| &self.apply(&w.comps[k]) - &w.apply(&self.comps[k]))
                .collect(),
        )
    }

    pub fn scale(&self, f: &ScalarExpr) -> VectorField {
        VectorField::new(self.comps.iter().map(|c| f * c).collect())
    }

    pub fn add(&self, w: &VectorField) -> VectorField {
        VectorField::new(self.comps.iter().zip(&w.comps).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, w: &VectorField) -> VectorField {
        VectorField::new(self.comps.iter().zip(&w.comps).map(|(a, b)| a - b).collect())
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.comps).finish()
    }
}
