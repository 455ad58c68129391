//! Curvature: the general expansion and the generator closed forms.

use gconn_core::closed_forms::{
    lc_curvature_rules, semisym_curvature_expansion, semisym_iu_curvature_rules,
    semisym_omega_curvature_rules,
};

use super::{product, task, tuple_label, Context, Suite, Task};
use crate::check::{Check, Item};
use crate::manifest::PSpec;

const S: Suite = Suite::Curvature;

pub fn tasks<'a>(ctx: &'a Context<'a>) -> Vec<Task<'a>> {
    let mut out: Vec<Task<'a>> = vec![
        task(move || {
            let vs = ctx.vector_set();
            let mut items = Vec::new();
            let res = (|| -> gconn_core::Result<()> {
                for t in product(&[&vs[..], &vs[..], &vs[..]]) {
                    let lab = format!("({},{},{})", t[0].0, t[1].0, t[2].0);
                    for r in lc_curvature_rules(&ctx.lc, &ctx.m.metric, &t[0].1, &t[1].1, &t[2].1)? {
                        items.push(Item::rule(&lab, r));
                    }
                }
                Ok(())
            })();
            vec![Check::items(S, "lc-rules", res.map(|_| items))]
        }),
        task(move || {
            let g = ctx.with_scaled(&ctx.coord_gens());
            let items = product(&[&g[..], &g[..], &g[..]])
                .into_iter()
                .map(|t| {
                    let r = semisym_curvature_expansion(&ctx.conn, &t[0].1, &t[1].1, &t[2].1)?;
                    Ok(Item::rule(&tuple_label(&t), r))
                })
                .collect();
            vec![Check::items(S, "expansion", items)]
        }),
    ];
    let u = ctx.m.u_field().cloned();
    match (&ctx.m.p_spec, u) {
        (PSpec::Interior { .. }, Some(u)) => out.push(task(move || {
            let vs = ctx.vector_set();
            let mut items = Vec::new();
            let res = (|| -> gconn_core::Result<()> {
                for t in product(&[&vs[..], &vs[..], &vs[..]]) {
                    let lab = format!("({},{},{})", t[0].0, t[1].0, t[2].0);
                    for r in semisym_iu_curvature_rules(&ctx.conn, &ctx.m.metric, &t[0].1, &t[1].1, &t[2].1, &u)? {
                        items.push(Item::rule(&lab, r));
                    }
                }
                Ok(())
            })();
            vec![Check::items(S, "rules-iu", res.map(|_| items))]
        })),
        (PSpec::FormLie { .. }, Some(u)) => {
            let omega = ctx.m.omega_form().cloned().expect("resolved at load");
            out.push(task(move || {
                let vs = ctx.vector_set();
                let mut items = Vec::new();
                let res = (|| -> gconn_core::Result<()> {
                    for t in product(&[&vs[..], &vs[..], &vs[..]]) {
                        let lab = format!("({},{},{})", t[0].0, t[1].0, t[2].0);
                        let rules = semisym_omega_curvature_rules(
                            &ctx.conn,
                            &ctx.m.metric,
                            &t[0].1,
                            &t[1].1,
                            &t[2].1,
                            &u,
                            &omega,
                        )?;
                        for r in rules {
                            items.push(Item::rule(&lab, r));
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
