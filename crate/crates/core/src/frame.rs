//! Local frames `E_k = Σ_j A_k^j ∂_j` and expansion of derivations over the
//! lifted generators `L_{E_k}`, `ι_{E_k}`.

use crate::derivations::Derivation;
use crate::error::{GeomError, Result};
use crate::expr::ScalarExpr;
use crate::forms::Form;
use crate::linalg::{self, SymMatrix};
use crate::vector::VectorField;

#[derive(Clone, Debug)]
pub struct Frame {
    dim: usize,
    rows: Vec<VectorField>,
    /// `inv[j][k]` with `∂_j = Σ_k inv[j][k] E_k`.
    inv: SymMatrix,
    /// `dA[k][j] = d(A_k^j)`.
    da: Vec<Vec<Form>>,
    lie: Vec<Derivation>,
    ins: Vec<Derivation>,
    identity: bool,
}

impl Frame {
    pub fn coordinate(dim: usize) -> Self {
        let rows: Vec<VectorField> = (0..dim).map(|k| VectorField::coord(dim, k)).collect();
        let inv = (0..dim)
            .map(|j| {
                (0..dim)
                    .map(|k| if j == k { ScalarExpr::one() } else { ScalarExpr::zero() })
                    .collect()
            })
            .collect();
        Frame {
            dim,
            da: vec![vec![Form::zero(dim); dim]; dim],
            lie: (0..dim).map(|k| Derivation::lie_gen(dim, k)).collect(),
            ins: (0..dim).map(|k| Derivation::ins_gen(dim, k)).collect(),
            rows,
            inv,
            identity: true,
        }
    }

    pub fn new(rows: Vec<VectorField>) -> Result<Self> {
        let dim = rows.len();
        for r in &rows {
            r.check_dim(dim)?;
        }
        let a: SymMatrix = rows.iter().map(|r| r.comps().to_vec()).collect();
        let identity = (0..dim).all(|k| {
            (0..dim).all(|j| {
                let c = a[k][j].as_const();
                c == Some(if j == k { 1.0 } else { 0.0 })
            })
        });
        if identity {
            return Ok(Self::coordinate(dim));
        }
        let (inv, det) = linalg::inverse(&a);
        if det.is_zero() {
            return Err(GeomError::SingularFrame(vec![]));
        }
        let da = a
            .iter()
            .map(|r| r.iter().map(|e| Form::scalar(dim, e.clone()).d()).collect())
            .collect();
        Ok(Frame {
            dim,
            lie: rows.iter().map(Derivation::lift_lie).collect(),
            ins: rows.iter().map(Derivation::lift_ins).collect(),
            rows,
            inv,
            da,
            identity: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[VectorField] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &VectorField {
        &self.rows[k]
    }

    pub fn is_coordinate(&self) -> bool {
        self.identity
    }

    /// `L_{E_k}`.
    pub fn lie(&self, k: usize) -> &Derivation {
        &self.lie[k]
    }

    /// `ι_{E_k}`.
    pub fn ins(&self, k: usize) -> &Derivation {
        &self.ins[k]
    }

    /// All `2m` generators with labels, `L` generators first.
    pub fn generators(&self) -> Vec<(String, Derivation)> {
        let mut out: Vec<(String, Derivation)> = (0..self.dim)
            .map(|k| (format!("L{}", k + 1), self.lie[k].clone()))
            .collect();
        out.extend((0..self.dim).map(|k| (format!("i{}", k + 1), self.ins[k].clone())));
        out
    }

    /// Frame components `c_k` of a vector field, `v = Σ c_k E_k`.
    pub fn components(&self, v: &VectorField) -> Vec<ScalarExpr> {
        if self.identity {
            return v.comps().to_vec();
        }
        (0..self.dim)
            .map(|k| {
                ScalarExpr::sum(
                    (0..self.dim)
                        .filter(|j| !v.comp(*j).is_zero() && !self.inv[*j][k].is_zero())
                        .map(|j| v.comp(j) * &self.inv[j][k]),
                )
            })
            .collect()
    }

    /// Coefficients `(α_k, β_k)` with `W = Σ α_k L_{E_k} + β_k ι_{E_k}`.
    pub fn expand(&self, w: &Derivation) -> (Vec<Form>, Vec<Form>) {
        if self.identity {
            return (w.lie_coeffs().to_vec(), w.ins_coeffs().to_vec());
        }
        let m = self.dim;
        let alpha: Vec<Form> = (0..m)
            .map(|k| self.combine(w.lie_coeffs(), k))
            .collect();
        // subtract the ι-part generated by the L_{E_k} lifts
        let rest: Vec<Form> = (0..m)
            .map(|j| {
                let mut r = w.ins_coeffs()[j].clone();
                for (k, a) in alpha.iter().enumerate() {
                    if !a.is_zero() && !self.da[k][j].is_zero() {
                        r = r.sub(&a.wedge(&self.da[k][j]));
                    }
                }
                r
            })
            .collect();
        let beta = (0..m).map(|k| self.combine(&rest, k)).collect();
        (alpha, beta)
    }

    fn combine(&self, coeffs: &[Form], k: usize) -> Form {
        let mut acc = Form::zero(self.dim);
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() && !self.inv[j][k].is_zero() {
                acc = acc.add(&c.scale(&self.inv[j][k]));
            }
        }
        acc
    }

    pub fn assemble(&self, alpha: &[Form], beta: &[Form]) -> Derivation {
        let mut r = Derivation::zero(self.dim);
        for k in 0..self.dim {
            if !alpha[k].is_zero() {
                r = r.add(&self.lie[k].left_mul(&alpha[k]));
            }
            if !beta[k].is_zero() {
                r = r.add(&self.ins[k].left_mul(&beta[k]));
            }
        }
        r
    }

    /// The metric for which this frame is orthonormal:
    /// `g_ij = Σ_k inv[i][k] inv[j][k]`.
    pub fn orthonormalizing_metric(&self) -> SymMatrix {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        ScalarExpr::sum(
                            (0..self.dim)
                                .filter(|k| !self.inv[i][*k].is_zero() && !self.inv[j][*k].is_zero())
                                .map(|k| &self.inv[i][k] * &self.inv[j][k]),
                        )
                    })
                    .collect()
            })
            .collect()
    }

    /// Fails at the first point where `det A` vanishes or is not finite.
    pub fn check_nonsingular(&self, points: &[Vec<f64>]) -> Result<()> {
        if self.identity {
            return Ok(());
        }
        let a: SymMatrix = self.rows.iter().map(|r| r.comps().to_vec()).collect();
        for p in points {
            let m = linalg::eval_matrix(&a, p).map_err(|_| GeomError::SingularFrame(p.clone()))?;
            let d = linalg::det_numeric(&m);
            if !d.is_finite() || d.abs() < 1e-12 {
                return Err(GeomError::SingularFrame(p.clone()));
            }
        }
        Ok(())
    }
}
