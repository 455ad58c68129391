//! Connections on a parallelized chart: the canonical connection of a
//! global frame, its dual, the real and form-valued blends of the two, and
//! the Schouten / Vranceanu connections of a split.

use std::sync::Arc;

use crate::closed_forms::{FormCheck, RuleCheck};
use crate::connections::{curvature, ricci, torsion, Connection, ConnectionKind};
use crate::derivations::Derivation;
use crate::distributions::{DistributionSplit, Side, PROBE_TOL};
use crate::error::{GeomError, Result};
use crate::expr::ScalarExpr;
use crate::forms::Form;
use crate::frame::Frame;
use crate::metric::{GradedMetric, MetricG};
use crate::parity::Parity;
use crate::vector::VectorField;

/// A global frame `X̄_1..X̄_m` with structure coefficients
/// `[X̄_k, X̄_l] = Σ_μ C^μ_{kl} X̄_μ`.
#[derive(Debug)]
pub struct ParallelFrame {
    frame: Arc<Frame>,
    brackets: Vec<Vec<VectorField>>,
    c: Vec<Vec<Vec<ScalarExpr>>>,
    constant: bool,
}

impl ParallelFrame {
    /// The structure coefficients count as constant when all their partial
    /// derivatives vanish at every probe point.
    pub fn new(rows: Vec<VectorField>, probes: &[Vec<f64>]) -> Result<Self> {
        let frame = Frame::new(rows)?;
        frame.check_nonsingular(probes)?;
        let m = frame.dim();
        let brackets: Vec<Vec<VectorField>> = (0..m)
            .map(|k| (0..m).map(|l| frame.row(k).bracket(frame.row(l))).collect())
            .collect();
        let comps: Vec<Vec<Vec<ScalarExpr>>> = (0..m)
            .map(|k| (0..m).map(|l| frame.components(&brackets[k][l])).collect())
            .collect();
        let c: Vec<Vec<Vec<ScalarExpr>>> = (0..m)
            .map(|mu| {
                (0..m)
                    .map(|k| (0..m).map(|l| comps[k][l][mu].clone()).collect())
                    .collect()
            })
            .collect();
        let mut constant = true;
        'outer: for e in c.iter().flatten().flatten() {
            if e.as_const().is_some() {
                continue;
            }
            for j in 0..m {
                let de = e.diff(j);
                for p in probes {
                    if de.eval(p)?.abs() > PROBE_TOL {
                        constant = false;
                        break 'outer;
                    }
                }
            }
        }
        Ok(ParallelFrame {
            frame: Arc::new(frame),
            brackets,
            c,
            constant,
        })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn row(&self, k: usize) -> &VectorField {
        self.frame.row(k)
    }

    /// `[X̄_k, X̄_l]`.
    pub fn bracket(&self, k: usize, l: usize) -> &VectorField {
        &self.brackets[k][l]
    }

    /// `C^μ_{kl}`.
    pub fn structure(&self, mu: usize, k: usize, l: usize) -> &ScalarExpr {
        &self.c[mu][k][l]
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn require_constant(&self) -> Result<()> {
        if self.constant {
            Ok(())
        } else {
            Err(GeomError::NonConstantStructure)
        }
    }

    /// Largest `|Σ_μ C^μ_{kl} X̄_μ − [X̄_k, X̄_l]|` and `|C^μ_{kl} + C^μ_{lk}|`.
    pub fn structure_residual(&self, probes: &[Vec<f64>]) -> Result<f64> {
        let m = self.dim();
        let mut worst = 0.0f64;
        for k in 0..m {
            for l in 0..m {
                let mut v = self.brackets[k][l].clone();
                for mu in 0..m {
                    v = v.sub(&self.row(mu).scale(&self.c[mu][k][l]));
                }
                for p in probes {
                    for x in v.eval(p)? {
                        worst = worst.max(x.abs());
                    }
                    for mu in 0..m {
                        let s = &self.c[mu][k][l] + &self.c[mu][l][k];
                        worst = worst.max(s.eval(p)?.abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// The metric making the frame orthonormal.
    pub fn metric(&self) -> Result<MetricG> {
        MetricG::new(self.frame.orthonormalizing_metric())
    }
}

/// `∇^c_X Y = Σ X(ω_j) L_{X̄_j} + X(ω′_j) ι_{X̄_j}` for `Y = Σ ω_j L_{X̄_j} + ω′_j ι_{X̄_j}`.
#[derive(Clone, Debug)]
pub struct Canonical {
    pf: Arc<ParallelFrame>,
}

impl Canonical {
    pub fn new(pf: Arc<ParallelFrame>) -> Self {
        Canonical { pf }
    }

    pub fn parallel_frame(&self) -> &Arc<ParallelFrame> {
        &self.pf
    }
}

impl Connection for Canonical {
    fn kind(&self) -> ConnectionKind {
        ConnectionKind::Canonical
    }
    fn dim(&self) -> usize {
        self.pf.dim()
    }
    fn nabla(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        x.check_dim(self.dim())?;
        y.check_dim(self.dim())?;
        let f = self.pf.frame();
        let (a, b) = f.expand(y);
        let da: Vec<Form> = a.iter().map(|w| x.apply(w)).collect();
        let db: Vec<Form> = b.iter().map(|w| x.apply(w)).collect();
        Ok(f.assemble(&da, &db))
    }
}

/// `∇̃_X Y = (−1)^{|X||Y|}∇^c_Y X + [X,Y]`, extended bilinearly over parity parts.
#[derive(Clone, Debug)]
pub struct Dual {
    canon: Canonical,
}

impl Dual {
    pub fn new(pf: Arc<ParallelFrame>) -> Self {
        Dual {
            canon: Canonical::new(pf),
        }
    }
}

impl Connection for Dual {
    fn kind(&self) -> ConnectionKind {
        ConnectionKind::Dual
    }
    fn dim(&self) -> usize {
        self.canon.dim()
    }
    fn nabla(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        let mut out = Derivation::zero(self.dim());
        for (px, xp) in x.parity_parts() {
            for (py, yp) in y.parity_parts() {
                let t = self
                    .canon
                    .nabla(&yp, &xp)?
                    .scale_const(Parity::sign(px, py))
                    .add(&xp.commutator(&yp));
                out = out.add(&t);
            }
        }
        Ok(out)
    }
}

/// `(1 − w)∇^c + w∇̃` for a real `λ` or an even form `ω`.
#[derive(Clone, Debug)]
pub struct Blend {
    canon: Canonical,
    dual: Dual,
    weight: Form,
    kind: ConnectionKind,
}

impl Blend {
    pub fn lambda(pf: Arc<ParallelFrame>, lambda: f64) -> Self {
        let m = pf.dim();
        Blend {
            canon: Canonical::new(pf.clone()),
            dual: Dual::new(pf),
            weight: Form::constant(m, lambda),
            kind: ConnectionKind::Lambda(lambda),
        }
    }

    pub fn omega(pf: Arc<ParallelFrame>, omega: Form) -> Result<Self> {
        if !omega.is_zero() && omega.parity() != Some(Parity::Even) {
            return Err(GeomError::ParityViolation("ω must be an even form".into()));
        }
        Ok(Blend {
            canon: Canonical::new(pf.clone()),
            dual: Dual::new(pf),
            weight: omega,
            kind: ConnectionKind::OmegaBlend,
        })
    }

    pub fn weight(&self) -> &Form {
        &self.weight
    }
}

impl Connection for Blend {
    fn kind(&self) -> ConnectionKind {
        self.kind.clone()
    }
    fn dim(&self) -> usize {
        self.canon.dim()
    }
    fn nabla(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        let c = self.canon.nabla(x, y)?;
        let d = self.dual.nabla(x, y)?;
        Ok(c.add(&d.sub(&c).left_mul(&self.weight)))
    }
}

/// `∇^s_X Y = π^D∇_X π^D Y + π^{D⊥}∇_X π^{D⊥} Y`.
pub struct Schouten {
    base: Arc<dyn Connection>,
    split: Arc<DistributionSplit>,
}

impl Schouten {
    pub fn new(base: Arc<dyn Connection>, split: Arc<DistributionSplit>) -> Self {
        Schouten { base, split }
    }
}

impl Connection for Schouten {
    fn kind(&self) -> ConnectionKind {
        ConnectionKind::Schouten
    }
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn nabla(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        let s = &self.split;
        let d = s.project(&self.base.nabla(x, &s.project(y, Side::D))?, Side::D);
        let p = s.project(&self.base.nabla(x, &s.project(y, Side::Perp))?, Side::Perp);
        Ok(d.add(&p))
    }
}

/// `∇^v_X Y = π^D∇_{π^D X}π^D Y + π^{D⊥}∇_{π^{D⊥}X}π^{D⊥}Y + π^D[π^{D⊥}X, π^D Y] + π^{D⊥}[π^D X, π^{D⊥}Y]`.
pub struct Vranceanu {
    base: Arc<dyn Connection>,
    split: Arc<DistributionSplit>,
}

impl Vranceanu {
    pub fn new(base: Arc<dyn Connection>, split: Arc<DistributionSplit>) -> Self {
        Vranceanu { base, split }
    }
}

impl Connection for Vranceanu {
    fn kind(&self) -> ConnectionKind {
        ConnectionKind::Vranceanu
    }
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn nabla(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        let s = &self.split;
        let (xd, xp) = (s.project(x, Side::D), s.project(x, Side::Perp));
        let (yd, yp) = (s.project(y, Side::D), s.project(y, Side::Perp));
        Ok(s.project(&self.base.nabla(&xd, &yd)?, Side::D)
            .add(&s.project(&self.base.nabla(&xp, &yp)?, Side::Perp))
            .add(&s.project(&xp.commutator(&yd), Side::D))
            .add(&s.project(&xd.commutator(&yp), Side::Perp)))
    }
}

fn ll(v: &VectorField) -> Derivation {
    Derivation::lift_lie(v)
}

fn li(v: &VectorField) -> Derivation {
    Derivation::lift_ins(v)
}

fn check(rule: String, engine: Derivation, closed: Derivation) -> RuleCheck {
    RuleCheck {
        rule,
        engine,
        closed,
    }
}

/// Torsion of `∇^c` on generator pairs against
/// `T(L_j,L_l) = −L_{[j,l]}`, `T(L_j,ι_l) = −ι_{[j,l]}`, `T(ι_j,L_l) = ι_{[l,j]}`, `T(ι_j,ι_l) = 0`.
pub fn canonical_torsion_table(pf: &Arc<ParallelFrame>) -> Result<Vec<RuleCheck>> {
    let c = Canonical::new(pf.clone());
    let f = pf.frame();
    let m = pf.dim();
    let mut out = Vec::new();
    for j in 0..m {
        for l in 0..m {
            let (j1, l1) = (j + 1, l + 1);
            out.push(check(
                format!("T(L{j1},L{l1})"),
                torsion(&c, f.lie(j), f.lie(l))?,
                ll(pf.bracket(j, l)).neg(),
            ));
            out.push(check(
                format!("T(L{j1},i{l1})"),
                torsion(&c, f.lie(j), f.ins(l))?,
                li(pf.bracket(j, l)).neg(),
            ));
            out.push(check(
                format!("T(i{j1},L{l1})"),
                torsion(&c, f.ins(j), f.lie(l))?,
                li(pf.bracket(l, j)),
            ));
            out.push(check(
                format!("T(i{j1},i{l1})"),
                torsion(&c, f.ins(j), f.ins(l))?,
                Derivation::zero(m),
            ));
        }
    }
    Ok(out)
}

/// `∇^λ` on generator pairs against
/// `∇_{L_j}L_l = λL_{[j,l]}`, `∇_{L_j}ι_l = ∇_{ι_j}L_l = λι_{[j,l]}`, `∇_{ι_j}ι_l = 0`.
pub fn lambda_table(pf: &Arc<ParallelFrame>, lambda: f64) -> Result<Vec<RuleCheck>> {
    let c = Blend::lambda(pf.clone(), lambda);
    let f = pf.frame();
    let m = pf.dim();
    let mut out = Vec::new();
    for j in 0..m {
        for l in 0..m {
            let (j1, l1) = (j + 1, l + 1);
            let br = pf.bracket(j, l);
            out.push(check(
                format!("nabla(L{j1},L{l1})"),
                c.nabla(f.lie(j), f.lie(l))?,
                ll(br).scale_const(lambda),
            ));
            out.push(check(
                format!("nabla(L{j1},i{l1})"),
                c.nabla(f.lie(j), f.ins(l))?,
                li(br).scale_const(lambda),
            ));
            out.push(check(
                format!("nabla(i{j1},L{l1})"),
                c.nabla(f.ins(j), f.lie(l))?,
                li(br).scale_const(lambda),
            ));
            out.push(check(
                format!("nabla(i{j1},i{l1})"),
                c.nabla(f.ins(j), f.ins(l))?,
                Derivation::zero(m),
            ));
        }
    }
    Ok(out)
}

/// `Σ_μ [X̄_j(C^μ_{kl}) − X̄_k(C^μ_{jl})] X̄_μ`.
fn derivative_field(pf: &ParallelFrame, j: usize, k: usize, l: usize) -> VectorField {
    let m = pf.dim();
    let mut v = VectorField::zero(m);
    for mu in 0..m {
        let a = pf.row(j).apply(pf.structure(mu, k, l));
        let b = pf.row(k).apply(pf.structure(mu, j, l));
        let coef = &a - &b;
        if !coef.is_zero() {
            v = v.add(&pf.row(mu).scale(&coef));
        }
    }
    v
}

/// `Σ_μ X̄_l(C^μ_{jk}) X̄_μ`.
fn slot_derivative_field(pf: &ParallelFrame, j: usize, k: usize, l: usize) -> VectorField {
    let m = pf.dim();
    let mut v = VectorField::zero(m);
    for mu in 0..m {
        let coef = pf.row(l).apply(pf.structure(mu, j, k));
        if !coef.is_zero() {
            v = v.add(&pf.row(mu).scale(&coef));
        }
    }
    v
}

/// Curvature of `∇^λ` on generator triples against the displayed table.
pub fn lambda_curvature_table(pf: &Arc<ParallelFrame>, lambda: f64) -> Result<Vec<RuleCheck>> {
    let c = Blend::lambda(pf.clone(), lambda);
    let f = pf.frame();
    let m = pf.dim();
    let q = lambda * lambda - lambda;
    let mut out = Vec::new();
    for j in 0..m {
        for k in 0..m {
            for l in 0..m {
                let (j1, k1, l1) = (j + 1, k + 1, l + 1);
                let jkl = pf.bracket(j, k).bracket(pf.row(l));
                let dv = derivative_field(pf, j, k, l);
                let sv = slot_derivative_field(pf, j, k, l);
                let table = |lift: fn(&VectorField) -> Derivation| {
                    lift(&jkl)
                        .scale_const(q)
                        .sub(&lift(&dv).scale_const(q))
                        .sub(&lift(&sv).scale_const(lambda))
                };
                let zero = Derivation::zero(m);
                out.push(check(
                    format!("R(L{j1},L{k1})L{l1}"),
                    curvature(&c, f.lie(j), f.lie(k), f.lie(l))?,
                    table(ll),
                ));
                out.push(check(
                    format!("R(L{j1},L{k1})i{l1}"),
                    curvature(&c, f.lie(j), f.lie(k), f.ins(l))?,
                    table(li),
                ));
                out.push(check(
                    format!("R(L{j1},i{k1})L{l1}"),
                    curvature(&c, f.lie(j), f.ins(k), f.lie(l))?,
                    table(li),
                ));
                out.push(check(
                    format!("R(L{j1},i{k1})i{l1}"),
                    curvature(&c, f.lie(j), f.ins(k), f.ins(l))?,
                    zero.clone(),
                ));
                out.push(check(
                    format!("R(i{j1},i{k1})L{l1}"),
                    curvature(&c, f.ins(j), f.ins(k), f.lie(l))?,
                    zero.clone(),
                ));
                out.push(check(
                    format!("R(i{j1},i{k1})i{l1}"),
                    curvature(&c, f.ins(j), f.ins(k), f.ins(l))?,
                    zero,
                ));
            }
        }
    }
    Ok(out)
}

/// Curvature of `∇^ω` on generator triples against the displayed table
/// (constant structure coefficients only).
pub fn omega_curvature_table(pf: &Arc<ParallelFrame>, omega: &Form) -> Result<Vec<RuleCheck>> {
    pf.require_constant()?;
    let c = Blend::omega(pf.clone(), omega.clone())?;
    let f = pf.frame();
    let m = pf.dim();
    let q = omega.wedge(omega).sub(omega);
    let lw = |k: usize| f.lie(k).apply(omega);
    let iw = |k: usize| f.ins(k).apply(omega);
    let mut out = Vec::new();
    for j in 0..m {
        for k in 0..m {
            for l in 0..m {
                let (j1, k1, l1) = (j + 1, k + 1, l + 1);
                let jkl = pf.bracket(j, k).bracket(pf.row(l));
                let (kl, jl) = (pf.bracket(k, l), pf.bracket(j, l));
                out.push(check(
                    format!("R(L{j1},L{k1})L{l1}"),
                    curvature(&c, f.lie(j), f.lie(k), f.lie(l))?,
                    ll(kl)
                        .left_mul(&lw(j))
                        .sub(&ll(jl).left_mul(&lw(k)))
                        .add(&ll(&jkl).left_mul(&q)),
                ));
                out.push(check(
                    format!("R(L{j1},L{k1})i{l1}"),
                    curvature(&c, f.lie(j), f.lie(k), f.ins(l))?,
                    li(kl)
                        .left_mul(&lw(j))
                        .sub(&li(jl).left_mul(&lw(k)))
                        .add(&li(&jkl).left_mul(&q)),
                ));
                out.push(check(
                    format!("R(L{j1},i{k1})L{l1}"),
                    curvature(&c, f.lie(j), f.ins(k), f.lie(l))?,
                    li(kl)
                        .left_mul(&lw(j))
                        .sub(&ll(jl).left_mul(&iw(k)))
                        .add(&li(&jkl).left_mul(&q)),
                ));
                out.push(check(
                    format!("R(L{j1},i{k1})i{l1}"),
                    curvature(&c, f.lie(j), f.ins(k), f.ins(l))?,
                    li(jl).left_mul(&iw(k)).neg(),
                ));
                out.push(check(
                    format!("R(i{j1},i{k1})L{l1}"),
                    curvature(&c, f.ins(j), f.ins(k), f.lie(l))?,
                    li(kl).left_mul(&iw(j)).add(&li(jl).left_mul(&iw(k))),
                ));
                out.push(check(
                    format!("R(i{j1},i{k1})i{l1}"),
                    curvature(&c, f.ins(j), f.ins(k), f.ins(l))?,
                    Derivation::zero(m),
                ));
            }
        }
    }
    Ok(out)
}

/// Ricci of a connection on the parallel frame, using the metric that makes
/// the frame orthonormal.
pub fn frame_ricci(pf: &ParallelFrame, c: &dyn Connection, x: &Derivation, y: &Derivation) -> Result<Form> {
    let gm = GradedMetric::new(Arc::new(pf.metric()?));
    ricci(c, &gm, pf.frame(), x, y)
}

/// Ricci of `∇^ω` on generator pairs against
/// `Ric(L_j,L_l) = L_{[j,l]}(ω)`, `Ric(L_j,ι_l) = Ric(ι_j,L_l) = ι_{[j,l]}(ω)`, `Ric(ι_j,ι_l) = 0`.
pub fn omega_ricci_table(pf: &Arc<ParallelFrame>, omega: &Form) -> Result<Vec<FormCheck>> {
    pf.require_constant()?;
    let c = Blend::omega(pf.clone(), omega.clone())?;
    let gm = GradedMetric::new(Arc::new(pf.metric()?));
    let f = pf.frame();
    let m = pf.dim();
    let mut out = Vec::new();
    for j in 0..m {
        for l in 0..m {
            let (j1, l1) = (j + 1, l + 1);
            let br = pf.bracket(j, l);
            let lw = ll(br).apply(omega);
            let iw = li(br).apply(omega);
            let r = |x: &Derivation, y: &Derivation| ricci(&c, &gm, f, x, y);
            out.push(FormCheck {
                rule: format!("Ric(L{j1},L{l1})"),
                engine: r(f.lie(j), f.lie(l))?,
                closed: lw,
            });
            out.push(FormCheck {
                rule: format!("Ric(L{j1},i{l1})"),
                engine: r(f.lie(j), f.ins(l))?,
                closed: iw.clone(),
            });
            out.push(FormCheck {
                rule: format!("Ric(i{j1},L{l1})"),
                engine: r(f.ins(j), f.lie(l))?,
                closed: iw,
            });
            out.push(FormCheck {
                rule: format!("Ric(i{j1},i{l1})"),
                engine: r(f.ins(j), f.ins(l))?,
                closed: Form::zero(m),
            });
        }
    }
    Ok(out)
}

/// `(L_X∇)(Y,Z) = [X, ∇_Y Z] − ∇_{[X,Y]}Z − (−1)^{|X||Y|}∇_Y[X,Z]` for a
/// connection on all of `Der Ω(M)`.
pub fn lie_of_connection(c: &dyn Connection, x: &Derivation, y: &Derivation, z: &Derivation) -> Result<Derivation> {
    let s = Parity::sign(x.require_homogeneous("X")?, y.require_homogeneous("Y")?);
    Ok(x.commutator(&c.nabla(y, z)?)
        .sub(&c.nabla(&x.commutator(y), z)?)
        .sub(&c.nabla(y, &x.commutator(z))?.scale_const(s)))
}

/// `(L_X∇̃)(Y,Z)` against `(−1)^{|Y||Z|}(L_X∇^c)` with the arguments as
/// printed `(Y,Z)` and exchanged `(Z,Y)`: returns `(printed, exchanged)`.
pub fn dual_lie_checks(
    pf: &Arc<ParallelFrame>,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
) -> Result<(RuleCheck, RuleCheck)> {
    let c = Canonical::new(pf.clone());
    let d = Dual::new(pf.clone());
    let s = Parity::sign(y.require_homogeneous("Y")?, z.require_homogeneous("Z")?);
    let lhs = lie_of_connection(&d, x, y, z)?;
    let printed = lie_of_connection(&c, x, y, z)?.scale_const(s);
    let exchanged = lie_of_connection(&c, x, z, y)?.scale_const(s);
    Ok((
        check("printed".into(), lhs.clone(), printed),
        check("exchanged".into(), lhs, exchanged),
    ))
}

/// Requires `∇^c_G X = 0` for every frame generator `G` at every probe.
pub fn require_canonically_parallel(pf: &Arc<ParallelFrame>, x: &Derivation, probes: &[Vec<f64>]) -> Result<()> {
    let c = Canonical::new(pf.clone());
    for (_, g) in pf.frame().generators() {
        let v = c.nabla(&g, x)?;
        if !v.is_zero() {
            let r = crate::distributions::max_abs_at(&v, probes)?;
            if r > PROBE_TOL || probes.is_empty() {
                return Err(GeomError::PreconditionViolated(format!(
                    "∇^c X ≠ 0 (residual {r:e})"
                )));
            }
        }
    }
    Ok(())
}

/// For `∇^c X = 0`: `(L_X∇̃)(Y,Z)` against
/// `−(−1)^{|Y||Z|}T^c(X, ∇^c_Z Y) + (−1)^{(|X|+|Y|)|Z|}∇^c_Z(T^c(X,Y))`.
pub fn dual_lie_parallel_check(
    pf: &Arc<ParallelFrame>,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
    probes: &[Vec<f64>],
) -> Result<RuleCheck> {
    require_canonically_parallel(pf, x, probes)?;
    let c = Canonical::new(pf.clone());
    let d = Dual::new(pf.clone());
    let (px, py, pz) = (
        x.require_homogeneous("X")?,
        y.require_homogeneous("Y")?,
        z.require_homogeneous("Z")?,
    );
    let lhs = lie_of_connection(&d, x, y, z)?;
    let rhs = torsion(&c, x, &c.nabla(z, y)?)?
        .scale_const(-Parity::sign(py, pz))
        .add(&c.nabla(z, &torsion(&c, x, y)?)?.scale_const(Parity::sign(px + py, pz)));
    Ok(check("parallel".into(), lhs, rhs))
}

/// `(π^{D⊥}∇_X(π^D Y), π^D∇_X(π^{D⊥}Y))`: both vanish when `D` and `D⊥` are parallel.
pub fn parallelism_residuals(
    c: &dyn Connection,
    split: &DistributionSplit,
    x: &Derivation,
    y: &Derivation,
) -> Result<(Derivation, Derivation)> {
    let a = split.project(&c.nabla(x, &split.project(y, Side::D))?, Side::Perp);
    let b = split.project(&c.nabla(x, &split.project(y, Side::Perp))?, Side::D);
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abelian() -> Arc<ParallelFrame> {
        Arc::new(ParallelFrame::new((0..2).map(|k| VectorField::coord(2, k)).collect(), &[vec![0.1, 0.2]]).unwrap())
    }

    #[test]
    fn canonical_kills_generators() {
        let pf = abelian();
        let c = Canonical::new(pf.clone());
        let x = Form::scalar(2, ScalarExpr::coord(0));
        let l1 = pf.frame().lie(0).clone();
        let l2 = pf.frame().lie(1).clone();
        assert!(c.nabla(&l1, &l2).unwrap().is_zero());
        assert_eq!(c.nabla(&l1, &l2.left_mul(&x)).unwrap(), l2);
        assert!(pf.is_constant());
    }

    #[test]
    fn odd_omega_rejected() {
        let r = Blend::omega(abelian(), Form::dx(2, 0));
        assert!(matches!(r, Err(GeomError::ParityViolation(_))));
    }

    #[test]
    fn nonconstant_structure_detected() {
        let x1 = ScalarExpr::coord(0);
        let rows = vec![
            VectorField::coord(2, 0),
            VectorField::new(vec![ScalarExpr::zero(), x1.clone()]),
        ];
        let pf = Arc::new(ParallelFrame::new(rows, &[vec![0.5, 0.2], vec![1.5, -0.3]]).unwrap());
        assert!(!pf.is_constant());
        assert!(matches!(
            omega_curvature_table(&pf, &Form::scalar(2, x1)),
            Err(GeomError::NonConstantStructure)
        ));
    }
}
