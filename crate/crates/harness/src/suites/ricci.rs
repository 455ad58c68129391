//! Ricci tensors: flatness for `P = ι_U` and the Einstein identity for
//! `P = ω L_U`.

use gconn_core::closed_forms::einstein_residuals;
use gconn_core::connections::ricci;
use gconn_core::Connection;

use super::{product, task, tuple_label, Context, Suite, Task};
use crate::check::{measure_items, Check, Item, Measure, Probe};
use crate::manifest::PSpec;

const S: Suite = Suite::Ricci;

fn flat_items(ctx: &Context, c: &dyn Connection) -> gconn_core::Result<Vec<Item>> {
    let frame = ctx.ortho_frame()?;
    let g = ctx.with_scaled(&ctx.coord_gens());
    product(&[&g[..], &g[..]])
        .into_iter()
        .map(|t| {
            let r = ricci(c, &ctx.gm, &frame, &t[0].1, &t[1].1)?;
            Ok(Item::zero(tuple_label(&t), r))
        })
        .collect()
}

pub fn tasks<'a>(ctx: &'a Context<'a>) -> Vec<Task<'a>> {
    let mut out: Vec<Task<'a>> = vec![task(move || {
        vec![Check::items(S, "lc-ricci-flat", flat_items(ctx, ctx.lc.as_ref()))]
    })];
    match &ctx.m.p_spec {
        PSpec::Zero | PSpec::Interior { .. } => out.push(task(move || {
            vec![Check::items(S, "ricci-flat", flat_items(ctx, ctx.conn.as_ref()))]
        })),
        PSpec::FormLie { .. } => out.push(task(move || {
            vec![Check::new(S, "einstein", einstein_probe(ctx))]
        })),
        PSpec::General(_) => {}
    }
    out
}

const ORDER_A: &str = "Ric + G∧L_Uω";
const ORDER_B: &str = "Ric + L_Uω∧G";

/// Measures both multiplication orders and keeps the smaller; the note
/// names the order that achieved it.
fn einstein_probe(ctx: &Context) -> gconn_core::Result<Probe> {
    let frame = ctx.ortho_frame()?;
    let u = ctx.m.u_field().expect("resolved at load");
    let omega = ctx.m.omega_form().expect("resolved at load");
    let g = ctx.with_scaled(&ctx.coord_gens());
    let mut a = Vec::new();
    let mut b = Vec::new();
    for t in product(&[&g[..], &g[..]]) {
        let (ra, rb) = einstein_residuals(&ctx.conn, &frame, u, omega, &t[0].1, &t[1].1)?;
        a.push(Item::zero(tuple_label(&t), ra));
        b.push(Item::zero(tuple_label(&t), rb));
    }
    Ok(Box::new(move |p: &[f64]| {
        let ma = measure_items(&a, p)?;
        let mb = measure_items(&b, p)?;
        let (best, order, other) = if ma.residual <= mb.residual {
            (ma, ORDER_A, mb.residual)
        } else {
            (mb, ORDER_B, ma.residual)
        };
        Ok(Measure {
            note: Some(format!("order {order}; other order residual {other:.3e}")),
            ..best
        })
    }))
}
