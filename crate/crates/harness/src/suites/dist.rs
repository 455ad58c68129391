//! Distribution geometry: induced connections, second fundamental forms,
//! shape operators and the Gauss, Codazzi and Ricci equations.

use std::sync::Arc;

use gconn_core::distributions::{Ambient, Side, SplitGeometry};
use gconn_core::{Connection, Derivation, Form, Parity};

use super::{over, over_lean, task, Arg, Context, Suite, Task};
use crate::check::{Check, Item};

const S: Suite = Suite::Dist;

const IDS: [&str; 21] = [
    "module-laws",
    "partial-metricity",
    "partial-torsion",
    "second-split",
    "second-symmetry",
    "partial-koszul",
    "ss-split",
    "ss-closed",
    "ss-metricity",
    "ss-torsion",
    "normal-shift",
    "shape-adjoint",
    "weingarten",
    "recombination",
    "gauss",
    "gauss-lc",
    "codazzi",
    "codazzi-lc",
    "ricci-eq",
    "ricci-eq-lc",
    "ricci-eq-lc-printed",
];

struct Args {
    d: Vec<Arg>,
    ds: Vec<Arg>,
    p: Vec<Arg>,
    ps: Vec<Arg>,
    all: Vec<Arg>,
}

fn args(ctx: &Context, geo: &SplitGeometry) -> Args {
    let s = geo.split();
    let d = s.generators(Side::D);
    let p = s.generators(Side::Perp);
    let mut all = d.clone();
    all.extend(p.iter().cloned());
    Args {
        ds: ctx.with_scaled(&d),
        ps: ctx.with_scaled(&p),
        all: ctx.with_scaled(&all),
        d,
        p,
    }
}

fn sign(a: &Derivation, f: &Form) -> gconn_core::Result<f64> {
    let pa = a.require_homogeneous("X")?;
    let pf = f.parity().unwrap_or(Parity::Even);
    Ok(Parity::sign(pa, pf))
}

pub fn tasks<'a>(ctx: &'a Context<'a>) -> Vec<Task<'a>> {
    let geo = match &ctx.geometry {
        None => return Vec::new(),
        Some(Err(e)) => {
            let e = e.clone();
            return vec![task(move || {
                IDS.iter()
                    .map(|id| Check::items(S, id, Err(e.clone())))
                    .collect()
            })];
        }
        Some(Ok(g)) => g.clone(),
    };
    let a = Arc::new(args(ctx, &geo));
    let mut out: Vec<Task<'a>> = Vec::new();
    let mut add = |id: &'static str, f: Box<dyn Fn(&SplitGeometry, &Args) -> gconn_core::Result<Vec<Item>> + Send + Sync>| {
        let geo = geo.clone();
        let a = a.clone();
        out.push(task(move || {
            let mut c = Check::items(S, id, f(&geo, &a));
            if id == "ricci-eq-lc-printed" {
                c = c
                    .non_gating()
                    .note("shape operator in the A_ξY argument order as printed");
            }
            vec![c]
        }));
    };

    let alphas = [ctx.even_alpha(), ctx.odd_alpha()];
    let alpha_names: Vec<String> = alphas.iter().map(|x| ctx.alpha_label(x)).collect();
    add(
        "module-laws",
        Box::new(move |g, a| {
            let mut items = Vec::new();
            for (al, an) in alphas.iter().zip(&alpha_names) {
                items.extend(over(&[&a.d, &a.d], |t, l| {
                    let (x, y) = (&t[0].1, &t[1].1);
                    let l = format!("{l} α={an}");
                    let s = sign(x, al)?;
                    let base = g.partial_lc(x, y)?;
                    let b = g.second_fundamental(x, y)?;
                    Ok(vec![
                        Item::pair(format!("∇(αX,Y) {l}"), g.partial_lc(&x.left_mul(al), y)?, base.left_mul(al)),
                        Item::pair(
                            format!("∇(X,αY) {l}"),
                            g.partial_lc(x, &y.left_mul(al))?,
                            y.left_mul(&x.apply(al)).add(&base.left_mul(al).scale_const(s)),
                        ),
                        Item::pair(format!("B(αX,Y) {l}"), g.second_fundamental(&x.left_mul(al), y)?, b.left_mul(al)),
                        Item::pair(
                            format!("B(X,αY) {l}"),
                            g.second_fundamental(x, &y.left_mul(al))?,
                            b.left_mul(al).scale_const(s),
                        ),
                    ])
                })?);
                items.extend(over(&[&a.d, &a.p], |t, l| {
                    let (x, xi) = (&t[0].1, &t[1].1);
                    let l = format!("{l} α={an}");
                    let s = sign(x, al)?;
                    let sh = g.shape(x, xi)?;
                    Ok(vec![
                        Item::pair(format!("A(αX)ξ {l}"), g.shape(&x.left_mul(al), xi)?, sh.left_mul(al)),
                        Item::pair(
                            format!("A(X)(αξ) {l}"),
                            g.shape(x, &xi.left_mul(al))?,
                            sh.left_mul(al).scale_const(s),
                        ),
                    ])
                })?);
            }
            Ok(items)
        }),
    );
    add(
        "partial-metricity",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds, &a.ds], |t, l| {
                Ok(vec![Item::zero(l, g.partial_metricity_residual(Ambient::LeviCivita, &t[0].1, &t[1].1, &t[2].1)?)])
            })
        }),
    );
    add(
        "partial-torsion",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds], |t, l| {
                Ok(vec![Item::zero(l, g.partial_torsion_residual(Ambient::LeviCivita, &t[0].1, &t[1].1)?)])
            })
        }),
    );
    add(
        "second-split",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds], |t, l| {
                let (x, y) = (&t[0].1, &t[1].1);
                let parts = g.partial_lc(x, y)?.add(&g.second_fundamental(x, y)?);
                Ok(vec![Item::pair(l, g.levi_civita().nabla(x, y)?, parts)])
            })
        }),
    );
    add(
        "second-symmetry",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds], |t, l| {
                Ok(vec![Item::zero(l, g.second_symmetry_residual(&t[0].1, &t[1].1)?)])
            })
        }),
    );
    add(
        "partial-koszul",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds, &a.ds], |t, l| {
                Ok(vec![Item::zero(l, g.partial_koszul_residual(&t[0].1, &t[1].1, &t[2].1)?)])
            })
        }),
    );
    add(
        "ss-split",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds], |t, l| {
                let (x, y) = (&t[0].1, &t[1].1);
                let (pd, pp) = g.partial_ss(x, y)?;
                Ok(vec![Item::pair(l, g.connection().nabla(x, y)?, pd.add(&pp))])
            })
        }),
    );
    add(
        "ss-closed",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds], |t, l| {
                let (x, y) = (&t[0].1, &t[1].1);
                let (pd, pp) = g.partial_ss(x, y)?;
                let (cd, cp) = g.partial_ss_closed(x, y)?;
                Ok(vec![
                    Item::pair(format!("∇̃^D {l}"), pd, cd),
                    Item::pair(format!("B̃ {l}"), pp, cp),
                ])
            })
        }),
    );
    add(
        "ss-metricity",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds, &a.ds], |t, l| {
                Ok(vec![Item::zero(l, g.partial_metricity_residual(Ambient::SemiSymmetric, &t[0].1, &t[1].1, &t[2].1)?)])
            })
        }),
    );
    add(
        "ss-torsion",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds], |t, l| {
                Ok(vec![Item::zero(l, g.partial_torsion_residual(Ambient::SemiSymmetric, &t[0].1, &t[1].1)?)])
            })
        }),
    );
    add(
        "normal-shift",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ps], |t, l| {
                let (x, xi) = (&t[0].1, &t[1].1);
                let rhs = g
                    .levi_civita()
                    .nabla(x, xi)?
                    .add(&x.right_mul(&g.gm().pair(xi, g.u())));
                Ok(vec![Item::pair(l, g.connection().nabla(x, xi)?, rhs)])
            })
        }),
    );
    add(
        "shape-adjoint",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds, &a.ps], |t, l| {
                Ok(vec![Item::zero(l, g.shape_adjoint_residual(&t[0].1, &t[1].1, &t[2].1)?)])
            })
        }),
    );
    add(
        "weingarten",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ps], |t, l| Ok(vec![Item::zero(l, g.weingarten_residual(&t[0].1, &t[1].1)?)]))
        }),
    );
    add(
        "recombination",
        Box::new(|g, a| {
            over(&[&a.all, &a.all], |t, l| {
                Ok(vec![Item::zero(l, g.recombination_residual(&t[0].1, &t[1].1)?)])
            })
        }),
    );
    for (id, which) in [("gauss", Ambient::SemiSymmetric), ("gauss-lc", Ambient::LeviCivita)] {
        add(
            id,
            Box::new(move |g, a| {
                over_lean(&[&a.ds, &a.ds, &a.ds, &a.ds], |t, l| {
                    Ok(vec![Item::zero(l, g.gauss_residual(which, &t[0].1, &t[1].1, &t[2].1, &t[3].1)?)])
                })
            }),
        );
    }
    for (id, which) in [("codazzi", Ambient::SemiSymmetric), ("codazzi-lc", Ambient::LeviCivita)] {
        add(
            id,
            Box::new(move |g, a| {
                over(&[&a.ds, &a.ds, &a.ds], |t, l| {
                    Ok(vec![Item::zero(l, g.codazzi_residual(which, &t[0].1, &t[1].1, &t[2].1)?)])
                })
            }),
        );
    }
    add(
        "ricci-eq",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds, &a.ps], |t, l| {
                Ok(vec![Item::zero(l, g.ricci_eq_residual(&t[0].1, &t[1].1, &t[2].1)?)])
            })
        }),
    );
    add(
        "ricci-eq-lc",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds, &a.ps], |t, l| {
                Ok(vec![Item::zero(l, g.ricci_eq_lc_residual_shape_x(&t[0].1, &t[1].1, &t[2].1)?)])
            })
        }),
    );
    add(
        "ricci-eq-lc-printed",
        Box::new(|g, a| {
            over(&[&a.ds, &a.ds, &a.ps], |t, l| {
                Ok(vec![Item::zero(l, g.ricci_eq_lc_residual(&t[0].1, &t[1].1, &t[2].1)?)])
            })
        }),
    );
    out
}
