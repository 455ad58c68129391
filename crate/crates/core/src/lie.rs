//! Lie derivatives of the induced partial connections, the normal
//! connection and their curvatures along operators in `D`, with the
//! commutator and curvature identities written as residuals.
//!
//! Every object here is a graded bilinear map `T` of parity `|T|`; its Lie
//! derivative along a homogeneous `X ∈ D` is
//! `L_X(T)(Z,W) = L_X(T(Z,W)) − (−1)^{|X||T|} T(L_X Z, W) − (−1)^{|X|(|T|+|Z|)} T(Z, L_X W)`,
//! where `L_X` acts as `[X,·]^D` on `D` and as `[X,·]^{D⊥}` on `D⊥`.

use std::sync::Arc;

use crate::derivations::Derivation;
use crate::distributions::{Ambient, Side, SplitGeometry};
use crate::error::Result;
use crate::forms::Form;
use crate::parity::Parity;

type BilFn<'a> = Arc<dyn Fn(&Derivation, &Derivation) -> Result<Derivation> + 'a>;

/// A graded bilinear map `D × S → V` for a second-slot side `S` and value side `V`.
#[derive(Clone)]
struct Bil<'a> {
    parity: Parity,
    second: Side,
    value: Side,
    f: BilFn<'a>,
}

impl<'a> Bil<'a> {
    fn call(&self, z: &Derivation, w: &Derivation) -> Result<Derivation> {
        (self.f)(z, w)
    }
}

fn sg(a: Parity, b: Parity) -> f64 {
    Parity::sign(a, b)
}

fn par(w: &Derivation) -> Result<Parity> {
    w.require_homogeneous("Lie-derivative argument")
}

/// `L_X` on a value of the given side.
fn lx(geo: &SplitGeometry, x: &Derivation, v: &Derivation, side: Side) -> Derivation {
    geo.split().project(&x.commutator(v), side)
}

fn lie_of<'a>(geo: &'a SplitGeometry, x: &Derivation, t: Bil<'a>) -> Result<Bil<'a>> {
    let px = par(x)?;
    let x = x.clone();
    let pt = t.parity;
    let (second, value) = (t.second, t.value);
    let f = move |z: &Derivation, w: &Derivation| -> Result<Derivation> {
        let pz = par(z)?;
        let a = lx(geo, &x, &t.call(z, w)?, value);
        let b = t.call(&lx(geo, &x, z, Side::D), w)?;
        let c = t.call(z, &lx(geo, &x, w, second))?;
        Ok(a.sub(&b.scale_const(sg(px, pt))).sub(&c.scale_const(sg(px, pt + pz))))
    };
    Ok(Bil {
        parity: px + pt,
        second,
        value,
        f: Arc::new(f),
    })
}

/// `[L_X, L_Y](T) = L_X(L_Y T) − (−1)^{|X||Y|} L_Y(L_X T)` evaluated at `(z, w)`.
fn commutator_of(
    geo: &SplitGeometry,
    x: &Derivation,
    y: &Derivation,
    t: Bil<'_>,
    z: &Derivation,
    w: &Derivation,
) -> Result<Derivation> {
    let s = sg(par(x)?, par(y)?);
    let xy = lie_of(geo, x, lie_of(geo, y, t.clone())?)?.call(z, w)?;
    let yx = lie_of(geo, y, lie_of(geo, x, t)?)?.call(z, w)?;
    Ok(xy.sub(&yx.scale_const(s)))
}

fn partial_conn(geo: &SplitGeometry, which: Ambient) -> Bil<'_> {
    Bil {
        parity: Parity::Even,
        second: Side::D,
        value: Side::D,
        f: Arc::new(move |a, b| geo.partial_raw(which, a, b)),
    }
}

fn normal_conn(geo: &SplitGeometry) -> Bil<'_> {
    Bil {
        parity: Parity::Even,
        second: Side::Perp,
        value: Side::Perp,
        f: Arc::new(move |a, b| geo.normal_raw(a, b)),
    }
}

/// `L_X(∇)(Y,Z) = L_X(∇_Y Z) − ∇_{[X,Y]^D}Z − (−1)^{|X||Y|}∇_Y([X,Z]^D)` for
/// `∇^{D,L}` (`Ambient::LeviCivita`) or `∇̃^D` (`Ambient::SemiSymmetric`).
pub fn lie_conn(
    geo: &SplitGeometry,
    which: Ambient,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
) -> Result<Derivation> {
    geo.dd(&[x, y, z])?;
    lie_of(geo, x, partial_conn(geo, which))?.call(y, z)
}

/// `L_X(∇̃^D) − L_X(∇^{D,L}) − L_X(K)` with `K(Y,Z) = Y·G(Z,U) − G(Y,Z)U^D`,
/// the difference of the two partial connections.
pub fn lie_conn_difference_residual(
    geo: &SplitGeometry,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
) -> Result<Derivation> {
    geo.dd(&[x, y, z])?;
    let k = Bil {
        parity: Parity::Even,
        second: Side::D,
        value: Side::D,
        f: Arc::new(move |a: &Derivation, b: &Derivation| {
            Ok(a.right_mul(&geo.pair(b, geo.u()))
                .sub(&geo.u_d().left_mul(&geo.pair(a, b))))
        }),
    };
    let ss = lie_conn(geo, Ambient::SemiSymmetric, x, y, z)?;
    let lc = lie_conn(geo, Ambient::LeviCivita, x, y, z)?;
    Ok(ss.sub(&lc).sub(&lie_of(geo, x, k)?.call(y, z)?))
}

/// `[L_X,L_Y](∇)(Z,W)` minus its expansion through iterated brackets.
pub fn lie_conn_commutator_residual(
    geo: &SplitGeometry,
    which: Ambient,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
    w: &Derivation,
) -> Result<Derivation> {
    geo.dd(&[x, y, z, w])?;
    let (px, py, pz) = (par(x)?, par(y)?, par(z)?);
    let conn = partial_conn(geo, which);
    let lhs = commutator_of(geo, x, y, conn.clone(), z, w)?;
    let n = |a: &Derivation, b: &Derivation| conn.call(a, b);
    let d = |a: &Derivation, b: &Derivation| lx(geo, a, b, Side::D);
    let nzw = n(z, w)?;
    let rhs = d(x, &d(y, &nzw))
        .sub(&d(y, &d(x, &nzw)).scale_const(sg(px, py)))
        .add(&n(&d(y, &d(x, z)), w)?.scale_const(sg(px, py)))
        .add(&n(z, &d(y, &d(x, w)))?.scale_const(sg(px, py) * sg(px, pz) * sg(py, pz)))
        .sub(&n(&d(x, &d(y, z)), w)?)
        .sub(&n(z, &d(x, &d(y, w)))?.scale_const(sg(px + py, pz)));
    Ok(lhs.sub(&rhs))
}

/// `[L_X,L_Y](∇) − L_{[X,Y]}(∇)` at `(Z,W)`; needs an integrable split.
pub fn lie_conn_integrable_residual(
    geo: &SplitGeometry,
    which: Ambient,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
    w: &Derivation,
) -> Result<Derivation> {
    geo.split().require_integrable()?;
    geo.dd(&[x, y, z, w])?;
    let conn = partial_conn(geo, which);
    let lhs = commutator_of(geo, x, y, conn.clone(), z, w)?;
    let xy = x.commutator(y);
    Ok(lhs.sub(&lie_of(geo, &xy, conn)?.call(z, w)?))
}

/// `R^{D,L}(Y,Z)W` on an integrable split.
fn curvature_dl(geo: &SplitGeometry, y: &Derivation, z: &Derivation, w: &Derivation) -> Result<Derivation> {
    geo.partial_curvature(Ambient::LeviCivita, y, z, w)
}

/// `(L_X R^{D,L})(Y,Z,W)`.
pub fn lie_curvature(
    geo: &SplitGeometry,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
    w: &Derivation,
) -> Result<Derivation> {
    geo.split().require_integrable()?;
    geo.dd(&[x, y, z, w])?;
    let (px, py, pz) = (par(x)?, par(y)?, par(z)?);
    let d = |b: &Derivation| lx(geo, x, b, Side::D);
    let r = |a: &Derivation, b: &Derivation, c: &Derivation| curvature_dl(geo, a, b, c);
    Ok(d(&r(y, z, w)?)
        .sub(&r(&d(y), z, w)?)
        .sub(&r(y, &d(z), w)?.scale_const(sg(px, py)))
        .sub(&r(y, z, &d(w))?.scale_const(sg(px, py + pz))))
}

/// `(L_X R^{D,L})(Y,Z,W)` minus its five-term expression through `L_X ∇^{D,L}`.
pub fn lie_curvature_residual(
    geo: &SplitGeometry,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
    w: &Derivation,
) -> Result<Derivation> {
    let lhs = lie_curvature(geo, x, y, z, w)?;
    let (px, py, pz) = (par(x)?, par(y)?, par(z)?);
    let conn = partial_conn(geo, Ambient::LeviCivita);
    let lc = lie_of(geo, x, conn.clone())?;
    let n = |a: &Derivation, b: &Derivation| conn.call(a, b);
    let l = |a: &Derivation, b: &Derivation| lc.call(a, b);
    let yz = geo.bracket_d(y, z);
    let rhs = l(&yz, w)?
        .neg()
        .add(&l(y, &n(z, w)?)?)
        .add(&n(y, &l(z, w)?)?.scale_const(sg(px, py)))
        .sub(&l(z, &n(y, w)?)?.scale_const(sg(py, pz)))
        .sub(&n(z, &l(y, w)?)?.scale_const(sg(px + py, pz)));
    Ok(lhs.sub(&rhs))
}

fn require_normal(geo: &SplitGeometry, ds: &[&Derivation], n: &Derivation) -> Result<()> {
    geo.dd(ds)?;
    geo.split().require(n, Side::Perp)
}

/// `L⊥_X(∇⊥)(Y,N) = L⊥_X(∇⊥_Y N) − ∇⊥_{[X,Y]^D}N − (−1)^{|X||Y|}∇⊥_Y([X,N]^{D⊥})`.
pub fn lie_normal(geo: &SplitGeometry, x: &Derivation, y: &Derivation, n: &Derivation) -> Result<Derivation> {
    require_normal(geo, &[x, y], n)?;
    lie_of(geo, x, normal_conn(geo))?.call(y, n)
}

/// The two module rules of `L⊥_X(∇⊥)` for a homogeneous form `α`:
/// first slot `L⊥_X(∇⊥)(αY,N) − (−1)^{|X||α|}α L⊥_X(∇⊥)(Y,N)`, second slot
/// `L⊥_X(∇⊥)(Y,αN) − [X,Y]^{D⊥}(α)N − (−1)^{(|X|+|Y|)|α|}α L⊥_X(∇⊥)(Y,N)`.
pub fn lie_normal_module_residuals(
    geo: &SplitGeometry,
    x: &Derivation,
    y: &Derivation,
    n: &Derivation,
    alpha: &Form,
) -> Result<(Derivation, Derivation)> {
    require_normal(geo, &[x, y], n)?;
    let pa = alpha
        .parity()
        .ok_or_else(|| crate::error::GeomError::NonHomogeneous("α".into()))?;
    let (px, py) = (par(x)?, par(y)?);
    let base = lie_normal(geo, x, y, n)?;
    let first = lie_normal(geo, x, &y.left_mul(alpha), n)?
        .sub(&base.left_mul(alpha).scale_const(sg(px, pa)));
    let second = lie_normal(geo, x, y, &n.left_mul(alpha))?
        .sub(&n.left_mul(&geo.bracket_perp(x, y).apply(alpha)))
        .sub(&base.left_mul(alpha).scale_const(sg(px + py, pa)));
    Ok((first, second))
}

/// `[L⊥_X,L⊥_Y](∇⊥)(Z,N)` minus its expansion through iterated brackets.
pub fn lie_normal_commutator_residual(
    geo: &SplitGeometry,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
    n: &Derivation,
) -> Result<Derivation> {
    require_normal(geo, &[x, y, z], n)?;
    let (px, py, pz) = (par(x)?, par(y)?, par(z)?);
    let conn = normal_conn(geo);
    let lhs = commutator_of(geo, x, y, conn.clone(), z, n)?;
    let nb = |a: &Derivation, b: &Derivation| conn.call(a, b);
    let d = |a: &Derivation, b: &Derivation| lx(geo, a, b, Side::D);
    let p = |a: &Derivation, b: &Derivation| lx(geo, a, b, Side::Perp);
    let nzn = nb(z, n)?;
    let rhs = p(x, &p(y, &nzn))
        .sub(&p(y, &p(x, &nzn)).scale_const(sg(px, py)))
        .add(&nb(&d(y, &d(x, z)), n)?.scale_const(sg(px, py)))
        .add(&nb(z, &p(y, &p(x, n)))?.scale_const(sg(px, py) * sg(px, pz) * sg(py, pz)))
        .sub(&nb(&d(x, &d(y, z)), n)?)
        .sub(&nb(z, &p(x, &p(y, n)))?.scale_const(sg(px + py, pz)));
    Ok(lhs.sub(&rhs))
}

/// `[L⊥_X,L⊥_Y](∇⊥) − L⊥_{[X,Y]}(∇⊥)` at `(Z,N)`; needs an integrable split.
pub fn lie_normal_integrable_residual(
    geo: &SplitGeometry,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
    n: &Derivation,
) -> Result<Derivation> {
    geo.split().require_integrable()?;
    require_normal(geo, &[x, y, z], n)?;
    let conn = normal_conn(geo);
    let lhs = commutator_of(geo, x, y, conn.clone(), z, n)?;
    Ok(lhs.sub(&lie_of(geo, &x.commutator(y), conn)?.call(z, n)?))
}

/// `(L⊥_X R⊥)(Y,Z,N)` minus its five-term expression through `L⊥_X ∇⊥`.
pub fn lie_normal_curvature_residual(
    geo: &SplitGeometry,
    x: &Derivation,
    y: &Derivation,
    z: &Derivation,
    n: &Derivation,
) -> Result<Derivation> {
    geo.split().require_integrable()?;
    require_normal(geo, &[x, y, z], n)?;
    let (px, py, pz) = (par(x)?, par(y)?, par(z)?);
    let d = |b: &Derivation| lx(geo, x, b, Side::D);
    let p = |b: &Derivation| lx(geo, x, b, Side::Perp);
    let r = |a: &Derivation, b: &Derivation, c: &Derivation| {
        geo.normal_curvature(Ambient::LeviCivita, a, b, c)
    };
    let lhs = p(&r(y, z, n)?)
        .sub(&r(&d(y), z, n)?)
        .sub(&r(y, &d(z), n)?.scale_const(sg(px, py)))
        .sub(&r(y, z, &p(n))?.scale_const(sg(px, py + pz)));
    let conn = normal_conn(geo);
    let lc = lie_of(geo, x, conn.clone())?;
    let nb = |a: &Derivation, b: &Derivation| conn.call(a, b);
    let l = |a: &Derivation, b: &Derivation| lc.call(a, b);
    let yz = geo.bracket_d(y, z);
    let rhs = l(&yz, n)?
        .neg()
        .add(&l(y, &nb(z, n)?)?)
        .add(&nb(y, &l(z, n)?)?.scale_const(sg(px, py)))
        .sub(&l(z, &nb(y, n)?)?.scale_const(sg(py, pz)))
        .sub(&nb(z, &l(y, n)?)?.scale_const(sg(px + py, pz)));
    Ok(lhs.sub(&rhs))
}
