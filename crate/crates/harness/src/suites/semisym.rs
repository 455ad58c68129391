//! The Levi-Civita lift and the semi-symmetric connection: Koszul formula,
//! torsion, metricity and the generator closed forms.

use gconn_core::closed_forms::{semisym_iu_rules, semisym_omega_rules, semisym_torsion};
use gconn_core::connections::{koszul_rhs, metric_compat_residual, torsion};
use gconn_core::{Connection, Derivation};

use super::{product, task, tuple_label, Context, Suite, Task};
use crate::check::{Check, Item};
use crate::manifest::PSpec;

const S: Suite = Suite::Semisym;

pub fn tasks<'a>(ctx: &'a Context<'a>) -> Vec<Task<'a>> {
    let mut out: Vec<Task<'a>> = vec![
        task(move || {
            let g = ctx.coord_gens();
            let items = product(&[&g[..], &g[..], &g[..]])
                .into_iter()
                .map(|t| {
                    let lhs = ctx.gm.pair(&ctx.lc.nabla(&t[0].1, &t[1].1)?, &t[2].1).scale_const(2.0);
                    let rhs = koszul_rhs(&ctx.gm, &t[0].1, &t[1].1, &t[2].1)?;
                    Ok(Item::pair(tuple_label(&t), lhs, rhs))
                })
                .collect();
            vec![Check::items(S, "koszul", items)]
        }),
        task(move || {
            let g = ctx.with_scaled(&ctx.coord_gens());
            let items = product(&[&g[..], &g[..]])
                .into_iter()
                .map(|t| Ok(Item::zero(tuple_label(&t), torsion(ctx.lc.as_ref(), &t[0].1, &t[1].1)?)))
                .collect();
            vec![Check::items(S, "lc-torsion", items)]
        }),
        task(move || {
            let g = ctx.coord_gens();
            let items = product(&[&g[..], &g[..], &g[..]])
                .into_iter()
                .map(|t| {
                    let r = metric_compat_residual(ctx.lc.as_ref(), &ctx.gm, &t[0].1, &t[1].1, &t[2].1)?;
                    Ok(Item::zero(tuple_label(&t), r))
                })
                .collect();
            vec![Check::items(S, "lc-metricity", items)]
        }),
        task(move || {
            let vs = ctx.vector_set();
            let g = &ctx.m.metric;
            let mut items = Vec::new();
            let res = (|| -> gconn_core::Result<()> {
                for (xn, x) in &vs {
                    for (yn, y) in &vs {
                        let cov = g.covariant(x, y);
                        let (lx, ix) = (Derivation::lift_lie(x), Derivation::lift_ins(x));
                        let (ly, iy) = (Derivation::lift_lie(y), Derivation::lift_ins(y));
                        let lab = |a: &str, b: &str| format!("∇_{a}({xn}) {b}({yn})");
                        items.push(Item::pair(lab("L", "L"), ctx.lc.nabla(&lx, &ly)?, Derivation::lift_lie(&cov)));
                        items.push(Item::pair(lab("L", "i"), ctx.lc.nabla(&lx, &iy)?, Derivation::lift_ins(&cov)));
                        items.push(Item::pair(lab("i", "L"), ctx.lc.nabla(&ix, &ly)?, Derivation::lift_ins(&cov)));
                        items.push(Item::zero(lab("i", "i"), ctx.lc.nabla(&ix, &iy)?));
                    }
                }
                Ok(())
            })();
            vec![Check::items(S, "lc-lift", res.map(|_| items))]
        }),
        task(move || {
            let g = ctx.with_scaled(&ctx.coord_gens());
            let items = product(&[&g[..], &g[..]])
                .into_iter()
                .map(|t| Ok(Item::rule(&tuple_label(&t), semisym_torsion(&ctx.conn, &t[0].1, &t[1].1)?)))
                .collect();
            vec![Check::items(S, "torsion", items)]
        }),
        task(move || {
            let g = ctx.with_scaled(&ctx.coord_gens());
            let items = product(&[&g[..], &g[..], &g[..]])
                .into_iter()
                .map(|t| {
                    let r = metric_compat_residual(ctx.conn.as_ref(), &ctx.gm, &t[0].1, &t[1].1, &t[2].1)?;
                    Ok(Item::zero(tuple_label(&t), r))
                })
                .collect();
            vec![Check::items(S, "metricity", items)]
        }),
    ];
    let u = ctx.m.u_field().cloned();
    match (&ctx.m.p_spec, u) {
        (PSpec::Interior { .. }, Some(u)) => out.push(task(move || {
            let vs = ctx.vector_set();
            let mut items = Vec::new();
            let res = (|| -> gconn_core::Result<()> {
                for (xn, x) in &vs {
                    for (yn, y) in &vs {
                        for r in semisym_iu_rules(&ctx.conn, &ctx.m.metric, x, y, &u)? {
                            items.push(Item::rule(&format!("({xn},{yn})"), r));
                        }
                    }
                }
                Ok(())
            })();
            vec![Check::items(S, "rules-iu", res.map(|_| items))]
        })),
        (PSpec::FormLie { .. }, Some(u)) => {
            let omega = ctx.m.omega_form().cloned();
            out.push(task(move || {
                let vs = ctx.vector_set();
                let mut items = Vec::new();
                let res = (|| -> gconn_core::Result<()> {
                    let omega = omega.expect("resolved at load");
                    for (xn, x) in &vs {
                        for (yn, y) in &vs {
                            for r in semisym_omega_rules(&ctx.conn, &ctx.m.metric, x, y, &u, &omega)? {
                                items.push(Item::rule(&format!("({xn},{yn})"), r));
                            }
                        }
                    }
                    Ok(())
                })();
                vec![Check::items(S, "rules-omega", res.map(|_| items))]
            }))
        }
        _ => {}
    }
    out
}
