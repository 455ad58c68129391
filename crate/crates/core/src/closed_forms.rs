//! The displayed closed forms for the semi-symmetric connection and its
//! curvature, transcribed term by term. Each function returns the engine's
//! definitional value next to the closed-form value so callers can report
//! the difference; nothing here feeds back into the connections themselves.

use crate::connections::{curvature, Connection, LeviCivitaLift, SemiSymmetric};
use crate::derivations::Derivation;
use crate::error::Result;
use crate::expr::ScalarExpr;
use crate::forms::Form;
use crate::metric::MetricG;
use crate::parity::Parity;
use crate::vector::VectorField;

/// One rule of a closed-form display evaluated on concrete arguments.
#[derive(Clone, Debug)]
pub struct RuleCheck {
    pub rule: String,
    pub engine: Derivation,
    pub closed: Derivation,
}

impl RuleCheck {
    pub fn residual(&self) -> Derivation {
        self.engine.sub(&self.closed)
    }
}

/// A form-valued rule, e.g. one entry of a Ricci table.
#[derive(Clone, Debug)]
pub struct FormCheck {
    pub rule: String,
    pub engine: Form,
    pub closed: Form,
}

impl FormCheck {
    pub fn residual(&self) -> Form {
        self.engine.sub(&self.closed)
    }
}

fn ll(v: &VectorField) -> Derivation {
    Derivation::lift_lie(v)
}

fn li(v: &VectorField) -> Derivation {
    Derivation::lift_ins(v)
}

/// Helper bundle for writing displayed formulas compactly.
struct Terms<'a> {
    g: &'a MetricG,
    dim: usize,
}

impl Terms<'_> {
    fn f(&self, e: ScalarExpr) -> Form {
        Form::scalar(self.dim, e)
    }
    fn gf(&self, a: &VectorField, b: &VectorField) -> Form {
        self.f(self.g.inner(a, b))
    }
    fn dg(&self, a: &VectorField, b: &VectorField) -> Form {
        self.gf(a, b).d()
    }
    fn cov(&self, a: &VectorField, b: &VectorField) -> VectorField {
        self.g.covariant(a, b)
    }
}

/// `α1 ∧ α2 ∧ … · W`.
fn times(forms: &[&Form], w: &Derivation) -> Derivation {
    let mut acc = forms[0].clone();
    for f in &forms[1..] {
        acc = acc.wedge(f);
    }
    w.left_mul(&acc)
}

/// Generator-pair closed forms of the connection for `P = ι_U`.
pub fn semisym_iu_rules(
    conn: &SemiSymmetric,
    g: &MetricG,
    x: &VectorField,
    y: &VectorField,
    u: &VectorField,
) -> Result<Vec<RuleCheck>> {
    let t = Terms { g, dim: g.dim() };
    let nxy = t.cov(x, y);
    let iu = li(u);
    let mut out = Vec::new();
    out.push(RuleCheck {
        rule: "LL".into(),
        engine: conn.nabla(&ll(x), &ll(y))?,
        closed: ll(&nxy)
            .add(&times(&[&t.gf(y, u)], &ll(x)))
            .sub(&times(&[&t.dg(x, y)], &iu)),
    });
    out.push(RuleCheck {
        rule: "Li".into(),
        engine: conn.nabla(&ll(x), &li(y))?,
        closed: li(&nxy).sub(&times(&[&t.gf(x, y)], &iu)),
    });
    out.push(RuleCheck {
        rule: "iL".into(),
        engine: conn.nabla(&li(x), &ll(y))?,
        closed: li(&nxy)
            .add(&times(&[&t.gf(y, u)], &li(x)))
            .sub(&times(&[&t.gf(x, y)], &iu)),
    });
    out.push(RuleCheck {
        rule: "ii".into(),
        engine: conn.nabla(&li(x), &li(y))?,
        closed: Derivation::zero(g.dim()),
    });
    Ok(out)
}

/// Generator-pair closed forms of the connection for `P = ω L_U`, `ω` odd.
pub fn semisym_omega_rules(
    conn: &SemiSymmetric,
    g: &MetricG,
    x: &VectorField,
    y: &VectorField,
    u: &VectorField,
    omega: &Form,
) -> Result<Vec<RuleCheck>> {
    let t = Terms { g, dim: g.dim() };
    let nxy = t.cov(x, y);
    let lu = ll(u);
    let w = omega;
    let mut out = Vec::new();
    out.push(RuleCheck {
        rule: "LL".into(),
        engine: conn.nabla(&ll(x), &ll(y))?,
        closed: ll(&nxy)
            .add(&times(&[w, &t.dg(y, u)], &ll(x)))
            .sub(&times(&[&t.dg(x, y), w], &lu)),
    });
    out.push(RuleCheck {
        rule: "Li".into(),
        engine: conn.nabla(&ll(x), &li(y))?,
        closed: li(&nxy)
            .sub(&times(&[w, &t.gf(y, u)], &ll(x)))
            .sub(&times(&[&t.gf(x, y), w], &lu)),
    });
    out.push(RuleCheck {
        rule: "iL".into(),
        engine: conn.nabla(&li(x), &ll(y))?,
        closed: li(&nxy)
            .add(&times(&[w, &t.dg(y, u)], &li(x)))
            .sub(&times(&[&t.gf(x, y), w], &lu)),
    });
    out.push(RuleCheck {
        rule: "ii".into(),
        engine: conn.nabla(&li(x), &li(y))?,
        closed: times(&[w, &t.gf(y, u)], &li(x)),
    });
    Ok(out)
}

/// Curvature of the Levi-Civita lift on generator triples, from `R^g`.
pub fn lc_curvature_rules(
    lc: &LeviCivitaLift,
    g: &MetricG,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
) -> Result<Vec<RuleCheck>> {
    let r = g.curvature(x, y, z);
    let zero = Derivation::zero(g.dim());
    let c = |a: &Derivation, b: &Derivation, e: &Derivation| curvature(lc, a, b, e);
    Ok(vec![
        RuleCheck {
            rule: "LLL".into(),
            engine: c(&ll(x), &ll(y), &ll(z))?,
            closed: ll(&r),
        },
        RuleCheck {
            rule: "LLi".into(),
            engine: c(&ll(x), &ll(y), &li(z))?,
            closed: li(&r),
        },
        RuleCheck {
            rule: "LiL".into(),
            engine: c(&ll(x), &li(y), &ll(z))?,
            closed: li(&r),
        },
        RuleCheck {
            rule: "Lii".into(),
            engine: c(&ll(x), &li(y), &li(z))?,
            closed: zero.clone(),
        },
        RuleCheck {
            rule: "iiL".into(),
            engine: c(&li(x), &li(y), &ll(z))?,
            closed: zero.clone(),
        },
        RuleCheck {
            rule: "iii".into(),
            engine: c(&li(x), &li(y), &li(z))?,
            closed: zero,
        },
    ])
}

/// Curvature of the connection with `P = ι_U` on generator triples.
pub fn semisym_iu_curvature_rules(
    conn: &SemiSymmetric,
    g: &MetricG,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    u: &VectorField,
) -> Result<Vec<RuleCheck>> {
    let t = Terms { g, dim: g.dim() };
    let r = g.curvature(x, y, z);
    let nxu = t.cov(x, u);
    let nyu = t.cov(y, u);
    let iu = li(u);
    let zero = Derivation::zero(g.dim());
    let c = |a: &Derivation, b: &Derivation, e: &Derivation| curvature(conn, a, b, e);

    let lll = ll(&r)
        .add(&times(&[&t.gf(z, &nxu)], &ll(y)))
        .sub(&times(&[&t.gf(z, &nyu)], &ll(x)))
        .sub(&times(&[&t.dg(y, z)], &li(&nxu)))
        .add(&times(&[&t.dg(x, z)], &li(&nyu)))
        .add(&times(&[&t.gf(z, u), &t.gf(y, u)], &ll(x)))
        .sub(&times(&[&t.gf(z, u), &t.gf(x, u)], &ll(y)))
        .add(&times(&[&t.dg(y, z), &t.gf(x, u)], &iu))
        .sub(&times(&[&t.dg(x, z), &t.gf(y, u)], &iu));
    let lli = li(&r)
        .sub(&times(&[&t.gf(y, z)], &li(&nxu)))
        .add(&times(&[&t.gf(x, z)], &li(&nyu)))
        .add(&times(&[&t.gf(y, z), &t.gf(x, u)], &iu))
        .sub(&times(&[&t.gf(x, z), &t.gf(y, u)], &iu));
    let lil = li(&r)
        .add(&times(&[&t.gf(z, &nxu)], &li(y)))
        .sub(&times(&[&t.gf(y, z)], &li(&nxu)))
        .sub(&times(&[&t.gf(z, u), &t.gf(x, u)], &li(y)))
        .add(&times(&[&t.gf(y, z), &t.gf(x, u)], &iu));

    Ok(vec![
        RuleCheck {
            rule: "LLL".into(),
            engine: c(&ll(x), &ll(y), &ll(z))?,
            closed: lll,
        },
        RuleCheck {
            rule: "LLi".into(),
            engine: c(&ll(x), &ll(y), &li(z))?,
            closed: lli,
        },
        RuleCheck {
            rule: "LiL".into(),
            engine: c(&ll(x), &li(y), &ll(z))?,
            closed: lil,
        },
        RuleCheck {
            rule: "Lii".into(),
            engine: c(&ll(x), &li(y), &li(z))?,
            closed: zero.clone(),
        },
        RuleCheck {
            rule: "iiL".into(),
            engine: c(&li(x), &li(y), &ll(z))?,
            closed: zero.clone(),
        },
        RuleCheck {
            rule: "iii".into(),
            engine: c(&li(x), &li(y), &li(z))?,
            closed: zero,
        },
    ])
}

/// Curvature of the connection with `P = ω L_U` on generator triples.
#[allow(clippy::too_many_arguments)]
pub fn semisym_omega_curvature_rules(
    conn: &SemiSymmetric,
    g: &MetricG,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    u: &VectorField,
    omega: &Form,
) -> Result<Vec<RuleCheck>> {
    let t = Terms { g, dim: g.dim() };
    let r = g.curvature(x, y, z);
    let nxu = t.cov(x, u);
    let nyu = t.cov(y, u);
    let lu = ll(u);
    let w = omega;
    let lxw = w.lie(x);
    let lyw = w.lie(y);
    let ixw = w.interior(x);
    let iyw = w.interior(y);
    let c = |a: &Derivation, b: &Derivation, e: &Derivation| curvature(conn, a, b, e);

    let lll = ll(&r)
        .add(&times(&[&lxw, &t.dg(z, u)], &ll(y)))
        .add(&times(&[w, &t.dg(z, &nxu)], &ll(y)))
        .sub(&times(&[&lyw, &t.dg(z, u)], &ll(x)))
        .sub(&times(&[w, &t.dg(z, &nyu)], &ll(x)))
        .sub(&times(&[&t.dg(y, z), &lxw], &lu))
        .sub(&times(&[&t.dg(y, z), w], &ll(&nxu)))
        .add(&times(&[&t.dg(x, z), &lyw], &lu))
        .add(&times(&[&t.dg(x, z), w], &ll(&nyu)));
    let lli = li(&r)
        .sub(&times(&[&lxw, &t.gf(z, u)], &ll(y)))
        .sub(&times(&[w, &t.gf(z, &nxu)], &ll(y)))
        .add(&times(&[&lyw, &t.gf(z, u)], &ll(x)))
        .add(&times(&[w, &t.gf(z, &nyu)], &ll(x)))
        .sub(&times(&[&t.gf(y, z), &lxw], &lu))
        .sub(&times(&[&t.gf(y, z), w], &ll(&nxu)))
        .add(&times(&[&t.gf(x, z), &lyw], &lu))
        .add(&times(&[&t.gf(x, z), w], &ll(&nyu)));
    let lil = li(&r)
        .add(&times(&[&lxw, &t.dg(z, u)], &li(y)))
        .add(&times(&[w, &t.dg(z, &nxu)], &li(y)))
        .sub(&times(&[&iyw, &t.dg(z, u)], &ll(x)))
        .add(&times(&[w, &t.gf(z, &nyu)], &ll(x)))
        .sub(&times(&[&t.gf(y, z), &lxw], &lu))
        .sub(&times(&[&t.gf(y, z), w], &ll(&nxu)))
        .sub(&times(&[&t.dg(x, z), &iyw], &lu))
        .add(&times(&[&t.dg(x, z), w], &li(&nyu)));
    let lii = times(&[&lxw, &t.gf(z, u)], &li(y))
        .add(&times(&[w, &t.gf(z, &nxu)], &li(y)))
        .add(&times(&[&iyw, &t.gf(z, u)], &ll(x)))
        .add(&times(&[&t.gf(x, z), &iyw], &lu))
        .sub(&times(&[&t.gf(x, z), w], &li(&nyu)));
    let iil = times(&[&ixw, &t.dg(z, u)], &li(y))
        .sub(&times(&[w, &t.gf(z, &nxu)], &li(y)))
        .add(&times(&[&iyw, &t.dg(z, u)], &li(x)))
        .sub(&times(&[w, &t.gf(z, &nyu)], &li(x)))
        .sub(&times(&[&t.gf(y, z), &ixw], &lu))
        .add(&times(&[&t.gf(y, z), w], &li(&nxu)))
        .sub(&times(&[&t.gf(x, z), &iyw], &lu))
        .add(&times(&[&t.gf(x, z), w], &li(&nyu)));
    let iii = times(&[&ixw, &t.gf(z, u)], &li(y)).add(&times(&[&iyw, &t.gf(z, u)], &li(x)));

    Ok(vec![
        RuleCheck {
            rule: "LLL".into(),
            engine: c(&ll(x), &ll(y), &ll(z))?,
            closed: lll,
        },
        RuleCheck {
            rule: "LLi".into(),
            engine: c(&ll(x), &ll(y), &li(z))?,
            closed: lli,
        },
        RuleCheck {
            rule: "LiL".into(),
            engine: c(&ll(x), &li(y), &ll(z))?,
            closed: lil,
        },
        RuleCheck {
            rule: "Lii".into(),
            engine: c(&ll(x), &li(y), &li(z))?,
            closed: lii,
        },
        RuleCheck {
            rule: "iiL".into(),
            engine: c(&li(x), &li(y), &ll(z))?,
            closed: iil,
        },
        RuleCheck {
            rule: "iii".into(),
            engine: c(&li(x), &li(y), &li(z))?,
            closed: iii,
        },
    ])
}

/// The general curvature expansion of the semi-symmetric connection in
/// terms of `R^L`, `∇^L P` and pairings, for homogeneous `X, Y, Z`.
pub fn semisym_curvature_expansion(
    conn: &SemiSymmetric,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
) -> Result<RuleCheck> {
    let lc = conn.levi_civita();
    let gm = lc.graded_metric();
    let p = conn.p();
    let px = x.require_homogeneous("X")?;
    let py = y.require_homogeneous("Y")?;
    let pz = z.require_homogeneous("Z")?;
    let sg = Parity::sign;
    let s_xy = sg(px, py);
    let s_xy_z = sg(px + py, pz);
    let gyz = gm.pair(y, z);
    let gxz = gm.pair(x, z);
    let p_gyz = py + pz + Parity::Odd;
    let p_gxz = px + pz + Parity::Odd;
    let gzp = gm.pair(z, p);
    let gyp = gm.pair(y, p);
    let gxp = gm.pair(x, p);
    let gpp = gm.pair(p, p);
    let nxp = lc.nabla(x, p)?;
    let nyp = lc.nabla(y, p)?;

    let closed = curvature(lc.as_ref(), x, y, z)?
        .add(&y.left_mul(&gm.pair(z, &nxp)).scale_const(s_xy_z))
        .sub(&x.left_mul(&gm.pair(z, &nyp)).scale_const(s_xy * s_xy_z))
        .sub(&nxp.left_mul(&gyz).scale_const(sg(p_gyz, px)))
        .add(&nyp.left_mul(&gxz).scale_const(s_xy * sg(p_gxz, py)))
        .add(&x.left_mul(&gzp.wedge(&gyp)).scale_const(sg(px, py + pz) * sg(py, pz)))
        .sub(&x.left_mul(&gyz.wedge(&gpp)).scale_const(sg(px, py + pz)))
        .sub(&y.left_mul(&gzp.wedge(&gxp)).scale_const(s_xy_z))
        .add(&y.left_mul(&gxz.wedge(&gpp)).scale_const(sg(py, pz)))
        .add(&p.left_mul(&gyz.wedge(&gxp)).scale_const(sg(px, p_gyz)))
        .sub(&p.left_mul(&gxz.wedge(&gyp)).scale_const(s_xy * sg(py, p_gxz)));
    Ok(RuleCheck {
        rule: "general".into(),
        engine: curvature(conn, x, y, z)?,
        closed,
    })
}

/// Torsion of the semi-symmetric connection against
/// `X·⟨Y,P⟩ − (−1)^{|X||Y|} Y·⟨X,P⟩`.
pub fn semisym_torsion(conn: &SemiSymmetric, x: &Derivation, y: &Derivation) -> Result<RuleCheck> {
    let gm = conn.levi_civita().graded_metric();
    let s = Parity::sign(x.require_homogeneous("X")?, y.require_homogeneous("Y")?);
    let closed = x
        .right_mul(&gm.pair(y, conn.p()))
        .sub(&y.right_mul(&gm.pair(x, conn.p())).scale_const(s));
    Ok(RuleCheck {
        rule: "torsion".into(),
        engine: crate::connections::torsion(conn, x, y)?,
        closed,
    })
}

/// Residuals of `Ric(X,Y) = −⟨X,Y⟩·L_U ω` for `P = ω L_U`, in both
/// multiplication orders: `(Ric + ⟨X,Y⟩∧L_Uω, Ric + L_Uω∧⟨X,Y⟩)`.
pub fn einstein_residuals(
    conn: &SemiSymmetric,
    frame: &crate::frame::Frame,
    u: &VectorField,
    omega: &Form,
    x: &Derivation,
    y: &Derivation,
) -> Result<(Form, Form)> {
    let gm = conn.levi_civita().graded_metric();
    let ric = crate::connections::ricci(conn, gm, frame, x, y)?;
    let luw = omega.lie(u);
    let gxy = gm.pair(x, y);
    Ok((ric.add(&gxy.wedge(&luw)), ric.add(&luw.wedge(&gxy))))
}
