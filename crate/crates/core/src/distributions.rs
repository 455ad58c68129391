//! Splits `Der Ω(M) = D ⊕ D⊥` by a partition of frame indices, the partial
//! connections they induce, second fundamental forms, Weingarten data, and
//! the Gauss / Codazzi / Ricci equations written as residuals.

use std::sync::{Arc, OnceLock};

use crate::connections::{curvature, Connection, LeviCivitaLift, SemiSymmetric};
use crate::derivations::Derivation;
use crate::error::{GeomError, Result};
use crate::forms::Form;
use crate::frame::Frame;
use crate::metric::{GradedMetric, MetricG};
use crate::parity::Parity;

/// Numeric tolerance for membership and integrability probes.
pub const PROBE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    D,
    Perp,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::D => Side::Perp,
            Side::Perp => Side::D,
        }
    }
}

/// Largest coefficient of `w` over the probe points.
pub fn max_abs_at(w: &Derivation, points: &[Vec<f64>]) -> Result<f64> {
    let mut m = 0.0f64;
    for p in points {
        m = m.max(w.eval(p)?.max_abs());
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct DistributionSplit {
    frame: Arc<Frame>,
    in_d: Vec<bool>,
    probes: Vec<Vec<f64>>,
    integrability: OnceLock<Result<f64>>,
}

impl DistributionSplit {
    /// `d_indices` are 0-based frame indices spanning `D`; the rest span `D⊥`.
    /// `probes` are the points used for numeric membership tests.
    pub fn new(frame: Arc<Frame>, d_indices: &[usize], probes: Vec<Vec<f64>>) -> Result<Self> {
        let m = frame.dim();
        let mut in_d = vec![false; m];
        for &k in d_indices {
            if k >= m {
                return Err(GeomError::IndexOutOfRange { index: k + 1, dim: m });
            }
            in_d[k] = true;
        }
        Ok(DistributionSplit {
            frame,
            in_d,
            probes,
            integrability: OnceLock::new(),
        })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn probes(&self) -> &[Vec<f64>] {
        &self.probes
    }

    pub fn side_of(&self, k: usize) -> Side {
        if self.in_d[k] {
            Side::D
        } else {
            Side::Perp
        }
    }

    pub fn indices(&self, side: Side) -> Vec<usize> {
        (0..self.dim()).filter(|k| self.side_of(*k) == side).collect()
    }

    /// Frame generators on one side, labelled like [`Frame::generators`].
    pub fn generators(&self, side: Side) -> Vec<(String, Derivation)> {
        let idx = self.indices(side);
        let mut out: Vec<(String, Derivation)> = idx
            .iter()
            .map(|k| (format!("L{}", k + 1), self.frame.lie(*k).clone()))
            .collect();
        out.extend(idx.iter().map(|k| (format!("i{}", k + 1), self.frame.ins(*k).clone())));
        out
    }

    /// `π^D` or `π^{D⊥}`: keeps the frame terms whose index lies on `side`.
    pub fn project(&self, w: &Derivation, side: Side) -> Derivation {
        let (mut alpha, mut beta) = self.frame.expand(w);
        let m = self.dim();
        for k in 0..m {
            if self.side_of(k) != side {
                alpha[k] = Form::zero(m);
                beta[k] = Form::zero(m);
            }
        }
        self.frame.assemble(&alpha, &beta)
    }

    /// Ok if `w` has no component off `side`, symbolically or at every probe.
    pub fn require(&self, w: &Derivation, side: Side) -> Result<()> {
        let off = self.project(w, side.other());
        if off.is_zero() {
            return Ok(());
        }
        let r = max_abs_at(&off, &self.probes)?;
        if self.probes.is_empty() || r > PROBE_TOL {
            return Err(GeomError::NotInDistribution(r));
        }
        Ok(())
    }

    pub fn contains(&self, w: &Derivation, side: Side) -> bool {
        self.require(w, side).is_ok()
    }

    /// Largest `π^{D⊥}[G_a, G_b]` over pairs of `D`-generators and probes.
    pub fn integrability_residual(&self) -> Result<f64> {
        self.integrability
            .get_or_init(|| self.compute_integrability())
            .clone()
    }

    fn compute_integrability(&self) -> Result<f64> {
        let gens = self.generators(Side::D);
        let mut worst = 0.0f64;
        for (i, (_, a)) in gens.iter().enumerate() {
            for (_, b) in &gens[i..] {
                let off = self.project(&a.commutator(b), Side::Perp);
                if !off.is_zero() {
                    worst = worst.max(max_abs_at(&off, &self.probes)?);
                }
            }
        }
        Ok(worst)
    }

    pub fn require_integrable(&self) -> Result<()> {
        let r = self.integrability_residual()?;
        if r > PROBE_TOL {
            return Err(GeomError::NotIntegrable(r));
        }
        Ok(())
    }

    /// The split must be `g`-orthogonal so that `G = G^D ⊕ G^{D⊥}`.
    pub fn check_orthogonal(&self, g: &MetricG) -> Result<()> {
        let mut worst = 0.0f64;
        for a in self.indices(Side::D) {
            for b in self.indices(Side::Perp) {
                let e = g.inner(self.frame.row(a), self.frame.row(b));
                for p in &self.probes {
                    worst = worst.max(e.eval(p)?.abs());
                }
            }
        }
        if worst > PROBE_TOL {
            return Err(GeomError::PreconditionViolated(format!(
                "split is not orthogonal (residual {worst:e})"
            )));
        }
        Ok(())
    }
}

/// Which ambient connection a formula is built on: `∇^L` (the `U = 0`
/// corollaries) or the semi-symmetric `∇`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    LeviCivita,
    SemiSymmetric,
}

/// A split together with the semi-symmetric connection built from `U`.
pub struct SplitGeometry {
    split: DistributionSplit,
    conn: Arc<SemiSymmetric>,
    u_d: Derivation,
    u_perp: Derivation,
}

fn sg(a: Parity, b: Parity) -> f64 {
    Parity::sign(a, b)
}

fn par(w: &Derivation, what: &str) -> Result<Parity> {
    w.require_homogeneous(what)
}

impl SplitGeometry {
    pub fn new(split: DistributionSplit, conn: Arc<SemiSymmetric>) -> Result<Self> {
        if split.dim() != conn.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: conn.dim(),
                found: split.dim(),
            });
        }
        split.check_orthogonal(conn.levi_civita().graded_metric().metric())?;
        let u_d = split.project(conn.p(), Side::D);
        let u_perp = split.project(conn.p(), Side::Perp);
        Ok(SplitGeometry {
            split,
            conn,
            u_d,
            u_perp,
        })
    }

    pub fn split(&self) -> &DistributionSplit {
        &self.split
    }

    pub fn connection(&self) -> &Arc<SemiSymmetric> {
        &self.conn
    }

    pub fn levi_civita(&self) -> &Arc<LeviCivitaLift> {
        self.conn.levi_civita()
    }

    pub fn gm(&self) -> &GradedMetric {
        self.levi_civita().graded_metric()
    }

    pub fn u(&self) -> &Derivation {
        self.conn.p()
    }

    pub fn u_d(&self) -> &Derivation {
        &self.u_d
    }

    pub fn u_perp(&self) -> &Derivation {
        &self.u_perp
    }

    pub(crate) fn pair(&self, a: &Derivation, b: &Derivation) -> Form {
        self.gm().pair(a, b)
    }

    pub(crate) fn proj(&self, w: &Derivation, side: Side) -> Derivation {
        self.split.project(w, side)
    }

    pub(crate) fn dd(&self, ws: &[&Derivation]) -> Result<()> {
        ws.iter().try_for_each(|w| self.split.require(w, Side::D))
    }

    fn ambient(&self, which: Ambient, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        match which {
            Ambient::LeviCivita => self.levi_civita().nabla(x, y),
            Ambient::SemiSymmetric => self.conn.nabla(x, y),
        }
    }

    /// `[X,Y]^D`.
    pub fn bracket_d(&self, x: &Derivation, y: &Derivation) -> Derivation {
        self.proj(&x.commutator(y), Side::D)
    }

    /// `[X,Y]^{D⊥}`.
    pub fn bracket_perp(&self, x: &Derivation, y: &Derivation) -> Derivation {
        self.proj(&x.commutator(y), Side::Perp)
    }

    // Unchecked building blocks; the public wrappers verify membership.

    pub(crate) fn partial_raw(&self, which: Ambient, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        Ok(self.proj(&self.ambient(which, x, y)?, Side::D))
    }

    pub(crate) fn second_raw(&self, which: Ambient, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        Ok(self.proj(&self.ambient(which, x, y)?, Side::Perp))
    }

    pub(crate) fn normal_raw(&self, x: &Derivation, xi: &Derivation) -> Result<Derivation> {
        Ok(self.proj(&self.levi_civita().nabla(x, xi)?, Side::Perp))
    }

    pub(crate) fn shape_raw(&self, x: &Derivation, xi: &Derivation) -> Result<Derivation> {
        Ok(self.proj(&self.levi_civita().nabla(x, xi)?, Side::D).neg())
    }

    pub(crate) fn shape_tilde_raw(&self, x: &Derivation, xi: &Derivation) -> Result<Derivation> {
        Ok(self.shape_raw(x, xi)?.sub(&x.right_mul(&self.pair(xi, self.u()))))
    }

    /// `∇^{D,L}_X Y = π^D ∇^L_X Y`.
    pub fn partial_lc(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        self.dd(&[x, y])?;
        self.partial_raw(Ambient::LeviCivita, x, y)
    }

    /// `B(X,Y) = π^{D⊥} ∇^L_X Y`.
    pub fn second_fundamental(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        self.dd(&[x, y])?;
        self.second_raw(Ambient::LeviCivita, x, y)
    }

    /// `(∇̃^D_X Y, B̃(X,Y))`, the two components of `∇_X Y`.
    pub fn partial_ss(&self, x: &Derivation, y: &Derivation) -> Result<(Derivation, Derivation)> {
        self.dd(&[x, y])?;
        let full = self.conn.nabla(x, y)?;
        Ok((self.proj(&full, Side::D), self.proj(&full, Side::Perp)))
    }

    /// The same pair assembled from the Levi-Civita data:
    /// `∇^{D,L}_X Y + X·G(Y,U) − G(X,Y)U^D` and `B(X,Y) − G(X,Y)U^{D⊥}`.
    pub fn partial_ss_closed(&self, x: &Derivation, y: &Derivation) -> Result<(Derivation, Derivation)> {
        self.dd(&[x, y])?;
        let gxy = self.pair(x, y);
        let nd = self
            .partial_raw(Ambient::LeviCivita, x, y)?
            .add(&x.right_mul(&self.pair(y, self.u())))
            .sub(&self.u_d.left_mul(&gxy));
        let bt = self
            .second_raw(Ambient::LeviCivita, x, y)?
            .sub(&self.u_perp.left_mul(&gxy));
        Ok((nd, bt))
    }

    /// `A_X ξ = −π^D ∇^L_X ξ`.
    pub fn shape(&self, x: &Derivation, xi: &Derivation) -> Result<Derivation> {
        self.dd(&[x])?;
        self.split.require(xi, Side::Perp)?;
        self.shape_raw(x, xi)
    }

    /// `A_ξ X = (−1)^{|X||ξ|} A_X ξ`.
    pub fn shape_xi(&self, xi: &Derivation, x: &Derivation) -> Result<Derivation> {
        let s = sg(par(x, "shape X")?, par(xi, "shape ξ")?);
        Ok(self.shape(x, xi)?.scale_const(s))
    }

    /// `∇⊥_X ξ = π^{D⊥} ∇^L_X ξ`.
    pub fn normal(&self, x: &Derivation, xi: &Derivation) -> Result<Derivation> {
        self.dd(&[x])?;
        self.split.require(xi, Side::Perp)?;
        self.normal_raw(x, xi)
    }

    /// `Ã_X ξ = A_X ξ − X·G(ξ,U)`.
    pub fn shape_tilde(&self, x: &Derivation, xi: &Derivation) -> Result<Derivation> {
        self.dd(&[x])?;
        self.split.require(xi, Side::Perp)?;
        self.shape_tilde_raw(x, xi)
    }

    /// Curvature of the induced partial connection, with the tensorial
    /// correction `−π^D[[X1,X2]^{D⊥}, X3]`. `Ambient::LeviCivita` gives
    /// `R^D` built from `∇^{D,L}`, otherwise `R̃^D` from `∇̃^D`.
    pub fn partial_curvature(
        &self,
        which: Ambient,
        x1: &Derivation,
        x2: &Derivation,
        x3: &Derivation,
    ) -> Result<Derivation> {
        self.dd(&[x1, x2, x3])?;
        let s = sg(par(x1, "X1")?, par(x2, "X2")?);
        let n = |a: &Derivation, b: &Derivation| self.partial_raw(which, a, b);
        let br = x1.commutator(x2);
        let br_d = self.proj(&br, Side::D);
        let br_p = self.proj(&br, Side::Perp);
        Ok(n(x1, &n(x2, x3)?)?
            .sub(&n(x2, &n(x1, x3)?)?.scale_const(s))
            .sub(&n(&br_d, x3)?)
            .sub(&self.proj(&br_p.commutator(x3), Side::D)))
    }

    /// Normal curvature `∇⊥_X∇⊥_Y ξ − (−1)^{|X||Y|}∇⊥_Y∇⊥_X ξ − ∇⊥_{[X,Y]^D} ξ
    /// − π^{D⊥}∇_{[X,Y]^{D⊥}} ξ`, with `∇` the chosen ambient connection.
    pub fn normal_curvature(
        &self,
        which: Ambient,
        x: &Derivation,
        y: &Derivation,
        xi: &Derivation,
    ) -> Result<Derivation> {
        self.dd(&[x, y])?;
        self.split.require(xi, Side::Perp)?;
        let s = sg(par(x, "X")?, par(y, "Y")?);
        let n = |a: &Derivation, b: &Derivation| self.normal_raw(a, b);
        let br = x.commutator(y);
        let br_d = self.proj(&br, Side::D);
        let br_p = self.proj(&br, Side::Perp);
        Ok(n(x, &n(y, xi)?)?
            .sub(&n(y, &n(x, xi)?)?.scale_const(s))
            .sub(&n(&br_d, xi)?)
            .sub(&self.proj(&self.ambient(which, &br_p, xi)?, Side::Perp)))
    }

    fn ambient_curvature(&self, which: Ambient, x: &Derivation, y: &Derivation, z: &Derivation) -> Result<Derivation> {
        match which {
            Ambient::LeviCivita => curvature(self.levi_civita().as_ref(), x, y, z),
            Ambient::SemiSymmetric => curvature(self.conn.as_ref(), x, y, z),
        }
    }

    /// `R(X,Y,Z,W)` minus the right side of the Gauss equation. With
    /// `Ambient::LeviCivita` the `U` terms are dropped (the `U = 0` form).
    pub fn gauss_residual(
        &self,
        which: Ambient,
        x: &Derivation,
        y: &Derivation,
        z: &Derivation,
        w: &Derivation,
    ) -> Result<Form> {
        self.dd(&[x, y, z, w])?;
        let (px, py, pz, pw) = (par(x, "X")?, par(y, "Y")?, par(z, "Z")?, par(w, "W")?);
        let b = |a: &Derivation, c: &Derivation| self.second_raw(Ambient::LeviCivita, a, c);
        let g = |a: &Derivation, c: &Derivation| self.pair(a, c);
        let lhs = g(&self.ambient_curvature(which, x, y, z)?, w);
        let s_yzw = sg(py + pz, pw);
        let s_xy_xzw = sg(px, py) * sg(px + pz, pw);
        let s_x_yz = sg(px, py + pz);
        let s_yz = sg(py, pz);
        let (bxw, byz, byw, bxz, bzw) = (b(x, w)?, b(y, z)?, b(y, w)?, b(x, z)?, b(z, w)?);
        let mut rhs = g(&self.partial_curvature(which, x, y, z)?, w)
            .sub(&g(&bxw, &byz).scale_const(s_yzw))
            .add(&g(&byw, &bxz).scale_const(s_xy_xzw))
            .add(&g(&x.commutator(y), &bzw));
        if which == Ambient::SemiSymmetric {
            let u = self.u();
            let uu = g(&self.u_perp, &self.u_perp);
            rhs = rhs
                .add(&g(&bxw, u).wedge(&g(y, z)).scale_const(s_yzw))
                .sub(&g(&byw, u).wedge(&g(x, z)).scale_const(s_xy_xzw))
                .add(&g(&byz, u).wedge(&g(x, w)).scale_const(s_x_yz))
                .sub(&g(&bxz, u).wedge(&g(y, w)).scale_const(s_yz))
                .sub(&g(y, z).wedge(&uu).wedge(&g(x, w)).scale_const(s_x_yz))
                .add(&g(x, z).wedge(&uu).wedge(&g(y, w)).scale_const(s_yz));
        }
        Ok(lhs.sub(&rhs))
    }

    /// `(∇⊥_X B̃)(Y,Z) = ∇⊥_X(B̃(Y,Z)) − B̃(∇̃^D_X Y, Z) − (−1)^{|X||Y|}B̃(Y, ∇̃^D_X Z)`,
    /// or the same with `B`, `∇^{D,L}` for `Ambient::LeviCivita`.
    pub fn normal_derivative_of_second(
        &self,
        which: Ambient,
        x: &Derivation,
        y: &Derivation,
        z: &Derivation,
    ) -> Result<Derivation> {
        self.dd(&[x, y, z])?;
        let s = sg(par(x, "X")?, par(y, "Y")?);
        let bt = |a: &Derivation, c: &Derivation| self.second_raw(which, a, c);
        let nd = |a: &Derivation, c: &Derivation| self.partial_raw(which, a, c);
        Ok(self
            .normal_raw(x, &bt(y, z)?)?
            .sub(&bt(&nd(x, y)?, z)?)
            .sub(&bt(y, &nd(x, z)?)?.scale_const(s)))
    }

    /// `π^{D⊥}R(X,Y)Z` minus the right side of the Codazzi equation.
    pub fn codazzi_residual(
        &self,
        which: Ambient,
        x: &Derivation,
        y: &Derivation,
        z: &Derivation,
    ) -> Result<Derivation> {
        self.dd(&[x, y, z])?;
        let (px, py, pz) = (par(x, "X")?, par(y, "Y")?, par(z, "Z")?);
        let s_xy = sg(px, py);
        let s_xyz = sg(px + py, pz);
        let lhs = self.proj(&self.ambient_curvature(which, x, y, z)?, Side::Perp);
        let br_p = self.bracket_perp(x, y);
        let mut rhs = self
            .normal_derivative_of_second(which, x, y, z)?
            .sub(&self.normal_derivative_of_second(which, y, x, z)?.scale_const(s_xy))
            .sub(&self.proj(&br_p.commutator(z), Side::Perp))
            .sub(&self.normal_raw(z, &br_p)?.scale_const(s_xyz));
        if which == Ambient::SemiSymmetric {
            let u = self.u();
            let bt = |a: &Derivation, c: &Derivation| self.second_raw(which, a, c);
            rhs = rhs
                .sub(&bt(y, z)?.left_mul(&self.pair(x, u)))
                .add(&bt(x, z)?.left_mul(&self.pair(y, u)).scale_const(s_xy))
                .sub(&br_p.right_mul(&self.pair(z, u)));
        }
        Ok(lhs.sub(&rhs))
    }

    /// `π^{D⊥}R(X,Y)ξ` minus `−B̃(X, Ã_Y ξ) + (−1)^{|X||Y|}B̃(Y, Ã_X ξ) + R̃^{L⊥}(X,Y)ξ`.
    pub fn ricci_eq_residual(&self, x: &Derivation, y: &Derivation, xi: &Derivation) -> Result<Derivation> {
        self.dd(&[x, y])?;
        self.split.require(xi, Side::Perp)?;
        let s = sg(par(x, "X")?, par(y, "Y")?);
        par(xi, "ξ")?;
        let w = Ambient::SemiSymmetric;
        let lhs = self.proj(&self.ambient_curvature(w, x, y, xi)?, Side::Perp);
        let rhs = self
            .second_raw(w, x, &self.shape_tilde_raw(y, xi)?)?
            .neg()
            .add(&self.second_raw(w, y, &self.shape_tilde_raw(x, xi)?)?.scale_const(s))
            .add(&self.normal_curvature(w, x, y, xi)?);
        Ok(lhs.sub(&rhs))
    }

    /// The `U = 0` form as printed:
    /// `π^{D⊥}R^L(X,Y)ξ − (−B(X, A_ξ Y) + (−1)^{|X||Y|}B(Y, A_ξ X) + R^{L⊥}(X,Y)ξ)`.
    pub fn ricci_eq_lc_residual(&self, x: &Derivation, y: &Derivation, xi: &Derivation) -> Result<Derivation> {
        self.dd(&[x, y])?;
        self.split.require(xi, Side::Perp)?;
        let (px, py, pxi) = (par(x, "X")?, par(y, "Y")?, par(xi, "ξ")?);
        let w = Ambient::LeviCivita;
        let lhs = self.proj(&self.ambient_curvature(w, x, y, xi)?, Side::Perp);
        let a_xi_y = self.shape_raw(y, xi)?.scale_const(sg(py, pxi));
        let a_xi_x = self.shape_raw(x, xi)?.scale_const(sg(px, pxi));
        let rhs = self
            .second_raw(w, x, &a_xi_y)?
            .neg()
            .add(&self.second_raw(w, y, &a_xi_x)?.scale_const(sg(px, py)))
            .add(&self.normal_curvature(w, x, y, xi)?);
        Ok(lhs.sub(&rhs))
    }

    /// The same equation with `A_Y ξ` in place of `A_ξ Y`, i.e. the `U = 0`
    /// specialisation of the general Ricci equation.
    pub fn ricci_eq_lc_residual_shape_x(&self, x: &Derivation, y: &Derivation, xi: &Derivation) -> Result<Derivation> {
        self.dd(&[x, y])?;
        self.split.require(xi, Side::Perp)?;
        let s = sg(par(x, "X")?, par(y, "Y")?);
        let w = Ambient::LeviCivita;
        let lhs = self.proj(&self.ambient_curvature(w, x, y, xi)?, Side::Perp);
        let rhs = self
            .second_raw(w, x, &self.shape_raw(y, xi)?)?
            .neg()
            .add(&self.second_raw(w, y, &self.shape_raw(x, xi)?)?.scale_const(s))
            .add(&self.normal_curvature(w, x, y, xi)?);
        Ok(lhs.sub(&rhs))
    }

    // Property residuals.

    /// Metricity of `∇^{D,L}` (or `∇̃^D`) on `D`.
    pub fn partial_metricity_residual(
        &self,
        which: Ambient,
        x: &Derivation,
        y: &Derivation,
        z: &Derivation,
    ) -> Result<Form> {
        self.dd(&[x, y, z])?;
        let s = sg(par(x, "X")?, par(y, "Y")?);
        let n = |a: &Derivation, b: &Derivation| self.partial_raw(which, a, b);
        Ok(x
            .apply(&self.pair(y, z))
            .sub(&self.pair(&n(x, y)?, z))
            .sub(&self.pair(y, &n(x, z)?).scale_const(s)))
    }

    /// Torsion of the partial connection minus its closed form:
    /// `−[X,Y]^{D⊥}` for `∇^{D,L}`, and
    /// `−[X,Y]^{D⊥} + X·G(Y,U) − (−1)^{|X||Y|}Y·G(X,U)` for `∇̃^D`.
    pub fn partial_torsion_residual(&self, which: Ambient, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        self.dd(&[x, y])?;
        let s = sg(par(x, "X")?, par(y, "Y")?);
        let n = |a: &Derivation, b: &Derivation| self.partial_raw(which, a, b);
        let br = x.commutator(y);
        let t = n(x, y)?.sub(&n(y, x)?.scale_const(s)).sub(&br);
        let mut closed = self.proj(&br, Side::Perp).neg();
        if which == Ambient::SemiSymmetric {
            let u = self.u();
            closed = closed
                .add(&x.right_mul(&self.pair(y, u)))
                .sub(&y.right_mul(&self.pair(x, u)).scale_const(s));
        }
        Ok(t.sub(&closed))
    }

    /// `2⟨∇^{D,L}_X Y, Z⟩` minus the Koszul-type right side on `D`.
    pub fn partial_koszul_residual(&self, x: &Derivation, y: &Derivation, z: &Derivation) -> Result<Form> {
        self.dd(&[x, y, z])?;
        let (px, py, pz) = (par(x, "X")?, par(y, "Y")?, par(z, "Z")?);
        let g = |a: &Derivation, b: &Derivation| self.pair(a, b);
        let first = x.apply(&g(y, z)).add(&g(&self.bracket_d(x, y), z));
        let second = y.apply(&g(z, x)).sub(&g(&self.bracket_d(y, z), x));
        let third = z.apply(&g(x, y)).sub(&g(&self.bracket_d(z, x), y));
        let rhs = first
            .add(&second.scale_const(sg(px, py + pz)))
            .sub(&third.scale_const(sg(pz, px + py)));
        let lhs = g(&self.partial_raw(Ambient::LeviCivita, x, y)?, z).scale_const(2.0);
        Ok(lhs.sub(&rhs))
    }

    /// `B(X,Y) − (−1)^{|X||Y|}B(Y,X) − [X,Y]^{D⊥}`.
    pub fn second_symmetry_residual(&self, x: &Derivation, y: &Derivation) -> Result<Derivation> {
        self.dd(&[x, y])?;
        let s = sg(par(x, "X")?, par(y, "Y")?);
        let b = |a: &Derivation, c: &Derivation| self.second_raw(Ambient::LeviCivita, a, c);
        Ok(b(x, y)?
            .sub(&b(y, x)?.scale_const(s))
            .sub(&self.bracket_perp(x, y)))
    }

    /// `G(B(X,Y), ξ) − (−1)^{|X||Y|}G(Y, A_X ξ)`.
    pub fn shape_adjoint_residual(&self, x: &Derivation, y: &Derivation, xi: &Derivation) -> Result<Form> {
        self.dd(&[x, y])?;
        self.split.require(xi, Side::Perp)?;
        let s = sg(par(x, "X")?, par(y, "Y")?);
        let b = self.second_raw(Ambient::LeviCivita, x, y)?;
        Ok(self
            .pair(&b, xi)
            .sub(&self.pair(y, &self.shape_raw(x, xi)?).scale_const(s)))
    }

    /// `∇_X ξ − (−Ã_X ξ + ∇⊥_X ξ)`.
    pub fn weingarten_residual(&self, x: &Derivation, xi: &Derivation) -> Result<Derivation> {
        self.dd(&[x])?;
        self.split.require(xi, Side::Perp)?;
        let full = self.conn.nabla(x, xi)?;
        Ok(full
            .add(&self.shape_tilde_raw(x, xi)?)
            .sub(&self.normal_raw(x, xi)?))
    }

    /// `∇_{X1}X2 − ((−1)^{|X1||X2|}∇_{X2}X1 + [X1,X2] + X1·G(X2,U) − (−1)^{|X1||X2|}X2·G(X1,U))`
    /// for arbitrary homogeneous derivations.
    pub fn recombination_residual(&self, x1: &Derivation, x2: &Derivation) -> Result<Derivation> {
        let s = sg(par(x1, "X1")?, par(x2, "X2")?);
        let u = self.u();
        let rhs = self
            .conn
            .nabla(x2, x1)?
            .scale_const(s)
            .add(&x1.commutator(x2))
            .add(&x1.right_mul(&self.pair(x2, u)))
            .sub(&x2.right_mul(&self.pair(x1, u)).scale_const(s));
        Ok(self.conn.nabla(x1, x2)?.sub(&rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ScalarExpr;
    use crate::vector::VectorField;

    fn sphere_geometry(d: &[usize], u: Derivation) -> SplitGeometry {
        let th = ScalarExpr::coord(0);
        let g = MetricG::new(vec![
            vec![ScalarExpr::one(), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), th.sin().powi(2)],
        ])
        .unwrap();
        let frame = Frame::new(vec![
            VectorField::coord(2, 0),
            VectorField::new(vec![ScalarExpr::zero(), th.sin().powi(-1)]),
        ])
        .unwrap();
        let gm = Arc::new(GradedMetric::new(Arc::new(g)));
        let lc = Arc::new(LeviCivitaLift::new(gm));
        let conn = Arc::new(SemiSymmetric::new(lc, u).unwrap());
        let probes = vec![vec![0.7, 0.3], vec![1.9, 2.2]];
        let split = DistributionSplit::new(Arc::new(frame), d, probes).unwrap();
        SplitGeometry::new(split, conn).unwrap()
    }

    fn worst_form(f: &Form, pts: &[Vec<f64>]) -> f64 {
        pts.iter().map(|p| f.eval(p).unwrap().max_abs()).fold(0.0, f64::max)
    }

    #[test]
    fn projection_partition() {
        let geo = sphere_geometry(&[0], Derivation::zero(2));
        let s = geo.split();
        let x = ScalarExpr::coord(0);
        let w = s.frame().lie(0).add(&s.frame().ins(1).left_mul(&Form::scalar(2, x.clone())));
        assert_eq!(s.project(&w, Side::D), *s.frame().lie(0));
        let back = s.project(&w, Side::D).add(&s.project(&w, Side::Perp));
        assert!(max_abs_at(&back.sub(&w), s.probes()).unwrap() < 1e-14);
        let off = s.frame().lie(1).left_mul(&Form::dx(2, 0));
        assert!(s.project(&off, Side::D).is_zero());
        assert!(matches!(
            geo.partial_lc(&off, s.frame().lie(0)),
            Err(GeomError::NotInDistribution(_))
        ));
    }

    #[test]
    fn sphere_fundamental_equations() {
        let u = Derivation::ins_gen(2, 0);
        for d in [[0usize], [1]] {
            let geo = sphere_geometry(&d, u.clone());
            let pts = geo.split().probes().to_vec();
            let dg: Vec<Derivation> = geo.split().generators(Side::D).into_iter().map(|g| g.1).collect();
            let pg: Vec<Derivation> = geo.split().generators(Side::Perp).into_iter().map(|g| g.1).collect();
            for x in &dg {
                for y in &dg {
                    for z in &dg {
                        let c = geo.codazzi_residual(Ambient::SemiSymmetric, x, y, z).unwrap();
                        assert!(max_abs_at(&c, &pts).unwrap() < 1e-12, "codazzi {d:?}");
                        for w in &dg {
                            let r = geo.gauss_residual(Ambient::SemiSymmetric, x, y, z, w).unwrap();
                            assert!(worst_form(&r, &pts) < 1e-12, "gauss {d:?}");
                        }
                    }
                    for xi in &pg {
                        let r = geo.ricci_eq_residual(x, y, xi).unwrap();
                        assert!(max_abs_at(&r, &pts).unwrap() < 1e-12, "ricci {d:?}");
                    }
                }
            }
        }
    }
}
