//! Riemannian data on the chart and the odd pairing it induces on
//! derivations.

use std::sync::{Arc, OnceLock};

use crate::derivations::Derivation;
use crate::error::{GeomError, Result};
use crate::expr::ScalarExpr;
use crate::forms::Form;
use crate::frame::Frame;
use crate::linalg::{self, SymMatrix};
use crate::parity::Parity;
use crate::vector::VectorField;

/// Node-count cap for symbolic Gram–Schmidt.
pub const ORTHONORMALIZE_CAP: usize = 20_000;

/// A positive-definite metric `g_ij` with its Levi-Civita data.
#[derive(Debug)]
pub struct MetricG {
    dim: usize,
    g: SymMatrix,
    inv: SymMatrix,
    /// `gamma[k][i][j] = Γ^k_ij`.
    gamma: Vec<Vec<Vec<ScalarExpr>>>,
    /// `riemann[l][k][i][j]`: component along `∂_l` of `R(∂_i, ∂_j)∂_k`.
    riemann: OnceLock<Vec<Vec<Vec<Vec<ScalarExpr>>>>>,
}

impl MetricG {
    pub fn new(g: SymMatrix) -> Result<Self> {
        let dim = g.len();
        for (i, row) in g.iter().enumerate() {
            if row.len() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for j in 0..i {
                if g[i][j] != g[j][i] {
                    return Err(GeomError::NotSymmetric(i + 1, j + 1));
                }
            }
        }
        let (inv, det) = linalg::inverse(&g);
        if det.is_zero() {
            return Err(GeomError::SingularMetric(vec![]));
        }
        let half = ScalarExpr::constant(0.5);
        let gamma = (0..dim)
            .map(|k| {
                (0..dim)
                    .map(|i| {
                        (0..dim)
                            .map(|j| {
                                let terms = (0..dim).filter(|l| !inv[k][*l].is_zero()).map(|l| {
                                    let s = &(&g[j][l].diff(i) + &g[i][l].diff(j)) - &g[i][j].diff(l);
                                    &inv[k][l] * &s
                                });
                                &half * &ScalarExpr::sum(terms)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(MetricG {
            dim,
            g,
            inv,
            gamma,
            riemann: OnceLock::new(),
        })
    }

    pub fn euclidean(dim: usize) -> Self {
        let g = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { ScalarExpr::one() } else { ScalarExpr::zero() })
                    .collect()
            })
            .collect();
        Self::new(g).expect("identity metric")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn g(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.g[i][j]
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.g
    }

    pub fn inverse(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.inv[i][j]
    }

    /// `Γ^k_ij`.
    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> &ScalarExpr {
        &self.gamma[k][i][j]
    }

    /// Component along `∂_l` of `R(∂_i, ∂_j)∂_k`.
    pub fn riemann(&self, l: usize, k: usize, i: usize, j: usize) -> &ScalarExpr {
        &self.riemann_table()[l][k][i][j]
    }

    fn riemann_table(&self) -> &Vec<Vec<Vec<Vec<ScalarExpr>>>> {
        self.riemann.get_or_init(|| {
            let m = self.dim;
            let gm = &self.gamma;
            (0..m)
                .map(|l| {
                    (0..m)
                        .map(|k| {
                            (0..m)
                                .map(|i| {
                                    (0..m)
                                        .map(|j| {
                                            let mut t = vec![gm[l][j][k].diff(i), -gm[l][i][k].diff(j)];
                                            for n in 0..m {
                                                t.push(&gm[n][j][k] * &gm[l][i][n]);
                                                t.push(-(&gm[n][i][k] * &gm[l][j][n]));
                                            }
                                            ScalarExpr::sum(t)
                                        })
                                        .collect()
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// Rejects points where `g` is not finite, singular or not positive definite.
    pub fn check_points(&self, points: &[Vec<f64>]) -> Result<()> {
        for p in points {
            let m = linalg::eval_matrix(&self.g, p).map_err(|_| GeomError::SingularMetric(p.clone()))?;
            if linalg::det_numeric(&m).abs() < 1e-12 || !linalg::is_positive_definite(&m) {
                return Err(GeomError::SingularMetric(p.clone()));
            }
        }
        Ok(())
    }

    /// `g(X, Y)`.
    pub fn inner(&self, x: &VectorField, y: &VectorField) -> ScalarExpr {
        let mut t = Vec::new();
        for i in 0..self.dim {
            if x.comp(i).is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y.comp(j).is_zero() || self.g[i][j].is_zero() {
                    continue;
                }
                t.push(ScalarExpr::product([x.comp(i).clone(), y.comp(j).clone(), self.g[i][j].clone()]));
            }
        }
        ScalarExpr::sum(t)
    }

    /// `∇^g_X Y`.
    pub fn covariant(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let m = self.dim;
        VectorField::new(
            (0..m)
                .map(|k| {
                    let mut t = vec![x.apply(y.comp(k))];
                    for i in 0..m {
                        if x.comp(i).is_zero() {
                            continue;
                        }
                        for j in 0..m {
                            if y.comp(j).is_zero() || self.gamma[k][i][j].is_zero() {
                                continue;
                            }
                            t.push(ScalarExpr::product([
                                x.comp(i).clone(),
                                y.comp(j).clone(),
                                self.gamma[k][i][j].clone(),
                            ]));
                        }
                    }
                    ScalarExpr::sum(t)
                })
                .collect(),
        )
    }

    /// `R^g(X, Y)Z`, built from the coordinate components.
    pub fn curvature(&self, x: &VectorField, y: &VectorField, z: &VectorField) -> VectorField {
        let m = self.dim;
        VectorField::new(
            (0..m)
                .map(|l| {
                    let mut t = Vec::new();
                    for i in 0..m {
                        for j in 0..m {
                            for k in 0..m {
                                let r = self.riemann(l, k, i, j);
                                if r.is_zero() || x.comp(i).is_zero() || y.comp(j).is_zero() || z.comp(k).is_zero() {
                                    continue;
                                }
                                t.push(ScalarExpr::product([
                                    x.comp(i).clone(),
                                    y.comp(j).clone(),
                                    z.comp(k).clone(),
                                    r.clone(),
                                ]));
                            }
                        }
                    }
                    ScalarExpr::sum(t)
                })
                .collect(),
        )
    }

    /// Gram–Schmidt on the coordinate frame.
    pub fn orthonormalize(&self) -> Result<Frame> {
        let m = self.dim;
        let mut rows: Vec<VectorField> = Vec::with_capacity(m);
        for k in 0..m {
            let mut v = VectorField::coord(m, k);
            for e in &rows {
                let c = self.inner(&VectorField::coord(m, k), e);
                if !c.is_zero() {
                    v = v.sub(&e.scale(&c));
                }
            }
            let norm = self.inner(&v, &v).sqrt();
            let e = v.scale(&norm.recip());
            let size = e.comps().iter().map(|c| c.size()).max().unwrap_or(0);
            if size > ORTHONORMALIZE_CAP {
                return Err(GeomError::ExpressionBlowup {
                    size,
                    cap: ORTHONORMALIZE_CAP,
                });
            }
            rows.push(e);
        }
        Frame::new(rows)
    }

    /// Largest `|g(E_k, E_l) − δ_kl|` over the sample points.
    pub fn orthonormality_residual(&self, frame: &Frame, points: &[Vec<f64>]) -> Result<f64> {
        let m = self.dim;
        let mut worst: f64 = 0.0;
        let entries: Vec<(usize, usize, ScalarExpr)> = (0..m)
            .flat_map(|k| (0..m).map(move |l| (k, l)))
            .map(|(k, l)| (k, l, self.inner(frame.row(k), frame.row(l))))
            .collect();
        for p in points {
            for (k, l, e) in &entries {
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((e.eval(p)? - target).abs());
            }
        }
        Ok(worst)
    }

    pub fn check_orthonormal(&self, frame: &Frame, points: &[Vec<f64>], tol: f64) -> Result<()> {
        let r = self.orthonormality_residual(frame, points)?;
        if r > tol {
            return Err(GeomError::FrameNotOrthonormal(r));
        }
        Ok(())
    }
}

/// The odd pairing `⟨·,·⟩` induced by a metric:
/// `⟨L_j, L_k⟩ = d g_jk`, `⟨L_j, ι_k⟩ = ⟨ι_k, L_j⟩ = g_jk`, `⟨ι_j, ι_k⟩ = 0`.
#[derive(Debug)]
pub struct GradedMetric {
    metric: Arc<MetricG>,
    g: Vec<Vec<Form>>,
    dg: Vec<Vec<Form>>,
}

impl GradedMetric {
    pub fn new(metric: Arc<MetricG>) -> Self {
        let m = metric.dim();
        let g: Vec<Vec<Form>> = (0..m)
            .map(|i| (0..m).map(|j| Form::scalar(m, metric.g(i, j).clone())).collect())
            .collect();
        let dg = g.iter().map(|r| r.iter().map(|f| f.d()).collect()).collect();
        GradedMetric { metric, g, dg }
    }

    pub fn metric(&self) -> &Arc<MetricG> {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `⟨W1, W2⟩`, bilinear with the module sign rule
    /// `⟨aT1, bT2⟩ = a ∧ (−1)^{|T1||b|} b ∧ ⟨T1, T2⟩`.
    pub fn pair(&self, w1: &Derivation, w2: &Derivation) -> Form {
        let m = self.dim();
        let mut acc = Form::zero(m);
        let twisted: Vec<Form> = w2
            .lie_coeffs()
            .iter()
            .map(|b| b.parity_part(Parity::Even).sub(&b.parity_part(Parity::Odd)))
            .collect();
        for j in 0..m {
            let al = &w1.lie_coeffs()[j];
            let ai = &w1.ins_coeffs()[j];
            for k in 0..m {
                let bl = &w2.lie_coeffs()[k];
                let bi = &w2.ins_coeffs()[k];
                if !al.is_zero() {
                    if !bl.is_zero() && !self.dg[j][k].is_zero() {
                        acc = acc.add(&al.wedge(bl).wedge(&self.dg[j][k]));
                    }
                    if !bi.is_zero() && !self.g[j][k].is_zero() {
                        acc = acc.add(&al.wedge(bi).wedge(&self.g[j][k]));
                    }
                }
                if !ai.is_zero() && !twisted[k].is_zero() && !self.g[j][k].is_zero() {
                    acc = acc.add(&ai.wedge(&twisted[k]).wedge(&self.g[j][k]));
                }
            }
        }
        acc
    }

    /// Parity of `⟨W1, W2⟩` for homogeneous arguments (the pairing is odd).
    pub fn pair_parity(p1: Parity, p2: Parity) -> Parity {
        p1 + p2 + Parity::Odd
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> MetricG {
        let th = ScalarExpr::coord(0);
        MetricG::new(vec![
            vec![ScalarExpr::one(), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), th.sin().powi(2)],
        ])
        .unwrap()
    }

    #[test]
    fn sphere_christoffel() {
        let g = sphere();
        let p = [0.9, 0.3];
        let (s, c) = (0.9f64.sin(), 0.9f64.cos());
        assert!((g.christoffel(0, 1, 1).eval(&p).unwrap() + s * c).abs() < 1e-15);
        assert!((g.christoffel(1, 0, 1).eval(&p).unwrap() - c / s).abs() < 1e-14);
        assert!(g.christoffel(0, 0, 0).is_zero());
    }

    #[test]
    fn sphere_frame() {
        let g = sphere();
        let f = g.orthonormalize().unwrap();
        let p = [0.7, 1.0];
        let e2 = f.row(1).eval(&p).unwrap();
        assert!(e2[0].abs() < 1e-15 && (e2[1] - 1.0 / 0.7f64.sin()).abs() < 1e-14);
        g.check_orthonormal(&f, &[p.to_vec()], 1e-12).unwrap();
    }

    #[test]
    fn diag_constant_frame() {
        let g = MetricG::new(vec![
            vec![ScalarExpr::constant(4.0), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), ScalarExpr::one()],
        ])
        .unwrap();
        let f = g.orthonormalize().unwrap();
        assert_eq!(f.row(0).comp(0).as_const(), Some(0.5));
        assert_eq!(f.row(1).comp(1).as_const(), Some(1.0));
    }

    #[test]
    fn pairing_values() {
        let g = Arc::new(sphere());
        let gm = GradedMetric::new(g);
        let l = |j| Derivation::lie_gen(2, j);
        let i = |j| Derivation::ins_gen(2, j);
        assert!(gm.pair(&i(0), &i(1)).is_zero());
        assert!(gm.pair(&l(0), &i(0)).as_scalar().unwrap().is_one());
        assert!(gm.pair(&l(0), &l(1)).is_zero());
        let v = gm.pair(&l(1), &l(1)).eval(&[0.4, 0.0]).unwrap();
        assert!((v.coeffs[&1] - 2.0 * 0.4f64.sin() * 0.4f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_metric_rejected() {
        let x = ScalarExpr::coord(0);
        let r = MetricG::new(vec![
            vec![ScalarExpr::one(), x.clone()],
            vec![ScalarExpr::zero(), ScalarExpr::one()],
        ]);
        assert_eq!(r.unwrap_err(), GeomError::NotSymmetric(2, 1));
    }
}
