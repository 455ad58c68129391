//! Graded connections: the Levi-Civita lift, the semi-symmetric metric
//! connection, and the generic torsion / curvature / Ricci machinery.

use std::fmt;
use std::sync::Arc;

use crate::derivations::Derivation;
use crate::error::{GeomError, Result};
use crate::forms::Form;
use crate::frame::Frame;
use crate::metric::GradedMetric;
use crate::parity::Parity;
use crate::vector::VectorField;

#[derive(Clone, Debug, PartialEq)]
pub enum ConnectionKind {
    LeviCivitaLift,
    SemiSymmetric,
    Canonical,
    Dual,
    Lambda(f64),
    OmegaBlend,
    Schouten,
    Vranceanu,
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnectionKind::LeviCivitaLift => write!(f, "levi-civita-lift"),
            ConnectionKind::SemiSymmetric => write!(f, "semi-symmetric"),
            ConnectionKind::Canonical => write!(f, "canonical"),
            ConnectionKind::Dual => write!(f, "dual"),
            ConnectionKind::Lambda(l) => write!(f, "lambda({l})"),
            ConnectionKind::OmegaBlend => write!(f, "omega"),
            ConnectionKind::Schouten => write!(f, "schouten"),
            ConnectionKind::Vranceanu => write!(f, "vranceanu"),
        }
    }
}

/// An even graded connection `(X, Y) ↦ ∇_X Y`.
pub trait Connection: Send + Sync {
    fn kind(&self) -> ConnectionKind;
    fn dim(&self) -> usize;
    fn nabla(&self, x: &Derivation, y: &Derivation) -> Result<Derivation>;
}

impl<C: Connection + ?Sized> Connection for Arc<C> {
    fn kind(&self) -> ConnectionKind {
        (**self).kind()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn nabla(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        (**self).nabla(x, y)
    }
}

/// Values of a connection on pairs of coordinate generators.
#[derive(Clone, Debug)]
pub struct GeneratorTable {
    /// `∇_{L_j} L_k`
    pub ll: Vec<Vec<Derivation>>,
    /// `∇_{L_j} ι_k`
    pub li: Vec<Vec<Derivation>>,
    /// `∇_{ι_j} L_k`
    pub il: Vec<Vec<Derivation>>,
    /// `∇_{ι_j} ι_k`
    pub ii: Vec<Vec<Derivation>>,
}

fn twist(b: &Form) -> Form {
    b.parity_part(Parity::Even).sub(&b.parity_part(Parity::Odd))
}

impl GeneratorTable {
    /// Extends the table to all derivations: Ω-linear in the first slot and
    /// `∇_T(bS) = T(b)S + (−1)^{|T||b|} b ∇_T S` in the second.
    pub fn extend(&self, x: &Derivation, y: &Derivation) -> Derivation {
        let m = x.dim();
        let mut out = Derivation::zero(m);
        for j in 0..m {
            let a = &x.lie_coeffs()[j];
            if !a.is_zero() {
                let mut d = Derivation::from_parts(
                    y.lie_coeffs().iter().map(|b| b.partial(j)).collect(),
                    y.ins_coeffs().iter().map(|b| b.partial(j)).collect(),
                );
                for k in 0..m {
                    let bl = &y.lie_coeffs()[k];
                    if !bl.is_zero() && !self.ll[j][k].is_zero() {
                        d = d.add(&self.ll[j][k].left_mul(bl));
                    }
                    let bi = &y.ins_coeffs()[k];
                    if !bi.is_zero() && !self.li[j][k].is_zero() {
                        d = d.add(&self.li[j][k].left_mul(bi));
                    }
                }
                out = out.add(&d.left_mul(a));
            }
            let a = &x.ins_coeffs()[j];
            if !a.is_zero() {
                let mut d = Derivation::from_parts(
                    y.lie_coeffs().iter().map(|b| b.interior_coord(j)).collect(),
                    y.ins_coeffs().iter().map(|b| b.interior_coord(j)).collect(),
                );
                for k in 0..m {
                    let bl = &y.lie_coeffs()[k];
                    if !bl.is_zero() && !self.il[j][k].is_zero() {
                        d = d.add(&self.il[j][k].left_mul(&twist(bl)));
                    }
                    let bi = &y.ins_coeffs()[k];
                    if !bi.is_zero() && !self.ii[j][k].is_zero() {
                        d = d.add(&self.ii[j][k].left_mul(&twist(bi)));
                    }
                }
                out = out.add(&d.left_mul(a));
            }
        }
        out
    }
}

/// `∇^L`, determined by `∇_{L_X}L_Y = L_{∇^g_X Y}`, `∇_{L_X}ι_Y = ∇_{ι_X}L_Y = ι_{∇^g_X Y}`
/// and `∇_{ι_X}ι_Y = 0`.
#[derive(Debug)]
pub struct LeviCivitaLift {
    gm: Arc<GradedMetric>,
    table: GeneratorTable,
}

impl LeviCivitaLift {
    pub fn new(gm: Arc<GradedMetric>) -> Self {
        let m = gm.dim();
        let g = gm.metric().clone();
        let cov = |j: usize, k: usize| {
            g.covariant(&VectorField::coord(m, j), &VectorField::coord(m, k))
        };
        let ll = (0..m)
            .map(|j| (0..m).map(|k| Derivation::lift_lie(&cov(j, k))).collect())
            .collect();
        let li: Vec<Vec<Derivation>> = (0..m)
            .map(|j| (0..m).map(|k| Derivation::lift_ins(&cov(j, k))).collect())
            .collect();
        let table = GeneratorTable {
            ll,
            il: li.clone(),
            li,
            ii: vec![vec![Derivation::zero(m); m]; m],
        };
        LeviCivitaLift { gm, table }
    }

    pub fn graded_metric(&self) -> &Arc<GradedMetric> {
        &self.gm
    }
}

impl Connection for LeviCivitaLift {
    fn kind(&self) -> ConnectionKind {
        ConnectionKind::LeviCivitaLift
    }
    fn dim(&self) -> usize {
        self.gm.dim()
    }
    fn nabla(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        x.check_dim(self.dim())?;
        y.check_dim(self.dim())?;
        Ok(self.table.extend(x, y))
    }
}

/// `∇_X Y = ∇^L_X Y + X·⟨Y,P⟩ − ⟨X,Y⟩P` for an odd derivation `P`.
pub struct SemiSymmetric {
    lc: Arc<LeviCivitaLift>,
    p: Derivation,
}

impl SemiSymmetric {
    /// The zero derivation is accepted (it is homogeneous of either parity).
    pub fn new(lc: Arc<LeviCivitaLift>, p: Derivation) -> Result<Self> {
        p.check_dim(lc.dim())?;
        if !p.is_zero() && p.parity() != Some(Parity::Odd) {
            return Err(GeomError::ParityViolation(
                "P must be odd so that the pairing with P is even".into(),
            ));
        }
        Ok(SemiSymmetric { lc, p })
    }

    pub fn p(&self) -> &Derivation {
        &self.p
    }

    pub fn levi_civita(&self) -> &Arc<LeviCivitaLift> {
        &self.lc
    }
}

impl Connection for SemiSymmetric {
    fn kind(&self) -> ConnectionKind {
        ConnectionKind::SemiSymmetric
    }
    fn dim(&self) -> usize {
        self.lc.dim()
    }
    fn nabla(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        let gm = self.lc.graded_metric();
        let base = self.lc.nabla(x, y)?;
        if self.p.is_zero() {
            return Ok(base);
        }
        let right = x.right_mul(&gm.pair(y, &self.p));
        let left = self.p.left_mul(&gm.pair(x, y));
        Ok(base.add(&right).sub(&left))
    }
}

fn hom(w: &Derivation, what: &str) -> Result<Parity> {
    w.require_homogeneous(what)
}

/// `T(X,Y) = ∇_X Y − (−1)^{|X||Y|}∇_Y X − [X,Y]`.
pub fn torsion(c: &dyn Connection, x: &Derivation, y: &Derivation) -> Result<Derivation> {
    let s = Parity::sign(hom(x, "torsion X")?, hom(y, "torsion Y")?);
    Ok(c.nabla(x, y)?
        .sub(&c.nabla(y, x)?.scale_const(s))
        .sub(&x.commutator(y)))
}

/// `R(X,Y)Z = ∇_X∇_Y Z − (−1)^{|X||Y|}∇_Y∇_X Z − ∇_{[X,Y]}Z`.
pub fn curvature(c: &dyn Connection, x: &Derivation, y: &Derivation, z: &Derivation) -> Result<Derivation> {
    let s = Parity::sign(hom(x, "curvature X")?, hom(y, "curvature Y")?);
    let xy = c.nabla(x, &c.nabla(y, z)?)?;
    let yx = c.nabla(y, &c.nabla(x, z)?)?;
    let br = c.nabla(&x.commutator(y), z)?;
    Ok(xy.sub(&yx.scale_const(s)).sub(&br))
}

/// Ricci tensor over an orthonormal frame:
/// `Σ_k ⟨R(L_{E_k},X)Y, ι_{E_k}⟩ − (−1)^{|X|+|Y|} Σ_l ⟨R(ι_{E_l},X)Y, L_{E_l}⟩`.
pub fn ricci(
    c: &dyn Connection,
    gm: &GradedMetric,
    frame: &Frame,
    x: &Derivation,
    y: &Derivation,
) -> Result<Form> {
    let s = (hom(x, "ricci X")? + hom(y, "ricci Y")?).sign1();
    let mut acc = Form::zero(c.dim());
    for k in 0..frame.dim() {
        let r = curvature(c, frame.lie(k), x, y)?;
        acc = acc.add(&gm.pair(&r, frame.ins(k)));
        let r = curvature(c, frame.ins(k), x, y)?;
        acc = acc.sub(&gm.pair(&r, frame.lie(k)).scale_const(s));
    }
    Ok(acc)
}

/// `X⟨Y,Z⟩ − ⟨∇_X Y, Z⟩ − (−1)^{|X||Y|}⟨Y, ∇_X Z⟩`.
pub fn metric_compat_residual(
    c: &dyn Connection,
    gm: &GradedMetric,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
) -> Result<Form> {
    let s = Parity::sign(hom(x, "metricity X")?, hom(y, "metricity Y")?);
    hom(z, "metricity Z")?;
    Ok(x
        .apply(&gm.pair(y, z))
        .sub(&gm.pair(&c.nabla(x, y)?, z))
        .sub(&gm.pair(y, &c.nabla(x, z)?).scale_const(s)))
}

/// Right side of the Koszul formula for `2⟨∇^L_X Y, Z⟩`.
pub fn koszul_rhs(gm: &GradedMetric, x: &Derivation, y: &Derivation, z: &Derivation) -> Result<Form> {
    let px = hom(x, "koszul X")?;
    let py = hom(y, "koszul Y")?;
    let pz = hom(z, "koszul Z")?;
    let s1 = Parity::sign(px, py + pz);
    let s2 = Parity::sign(pz, px + py);
    let first = x.apply(&gm.pair(y, z)).add(&gm.pair(&x.commutator(y), z));
    let second = y.apply(&gm.pair(z, x)).sub(&gm.pair(&y.commutator(z), x));
    let third = z.apply(&gm.pair(x, y)).sub(&gm.pair(&z.commutator(x), y));
    Ok(first.add(&second.scale_const(s1)).sub(&third.scale_const(s2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ScalarExpr;
    use crate::metric::MetricG;

    fn flat(dim: usize) -> Arc<LeviCivitaLift> {
        Arc::new(LeviCivitaLift::new(Arc::new(GradedMetric::new(Arc::new(MetricG::euclidean(dim))))))
    }

    #[test]
    fn flat_semisymmetric_anchor() {
        let lc = flat(2);
        let p = Derivation::ins_gen(2, 0);
        let ss = SemiSymmetric::new(lc, p).unwrap();
        let l = |j| Derivation::lie_gen(2, j);
        let i = |j| Derivation::ins_gen(2, j);
        assert_eq!(ss.nabla(&l(0), &l(0)).unwrap(), l(0));
        assert!(ss.nabla(&i(0), &l(0)).unwrap().is_zero());
        assert!(ss.nabla(&i(0), &i(1)).unwrap().is_zero());
        let r = curvature(&ss, &l(0), &l(1), &l(0)).unwrap();
        assert_eq!(r, l(1).neg());
    }

    #[test]
    fn even_p_rejected() {
        let r = SemiSymmetric::new(flat(2), Derivation::lie_gen(2, 0));
        assert!(matches!(r, Err(GeomError::ParityViolation(_))));
    }

    #[test]
    fn sphere_lc_value() {
        let th = ScalarExpr::coord(0);
        let g = MetricG::new(vec![
            vec![ScalarExpr::one(), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), th.sin().powi(2)],
        ])
        .unwrap();
        let lc = LeviCivitaLift::new(Arc::new(GradedMetric::new(Arc::new(g))));
        let l2 = Derivation::lie_gen(2, 1);
        let v = lc.nabla(&l2, &l2).unwrap().eval(&[0.8, 0.1]).unwrap();
        assert!((v.lie[0].coeffs[&0] + 0.8f64.sin() * 0.8f64.cos()).abs() < 1e-15);
    }
}
