//! Lie derivatives of the induced connections along `D` and `D⊥`.

use std::sync::Arc;

use gconn_core::distributions::{Ambient, Side, SplitGeometry};
use gconn_core::lie::{
    lie_conn_commutator_residual, lie_conn_difference_residual, lie_conn_integrable_residual,
    lie_curvature_residual, lie_normal_commutator_residual, lie_normal_curvature_residual,
    lie_normal_integrable_residual, lie_normal_module_residuals,
};

use super::{over, over_lean, product, task, tuple_label, Arg, Context, Suite, Task};
use crate::check::{measure_items, Check, Item, Measure, Probe};

const S: Suite = Suite::Lie;

const IDS: [&str; 9] = [
    "integrability",
    "conn-difference",
    "conn-commutator",
    "conn-integrable",
    "curvature",
    "normal-module",
    "normal-commutator",
    "normal-integrable",
    "normal-curvature",
];

/// Threshold above which a bracket is taken to leave `D`.
const LEAK_TOL: f64 = 1e-10;

fn integrability_check(geo: &SplitGeometry, expect: Option<bool>) -> Check {
    let gens = geo.split().generators(Side::D);
    let items: Vec<Item> = product(&[&gens[..], &gens[..]])
        .into_iter()
        .map(|t| {
            let off = geo.split().project(&t[0].1.commutator(&t[1].1), Side::Perp);
            Item::zero(format!("π⊥{}", tuple_label(&t)), off)
        })
        .collect();
    let probe: Probe = Box::new(move |p: &[f64]| {
        let m = measure_items(&items, p)?;
        let integrable = m.residual <= LEAK_TOL;
        let verdict = match expect {
            Some(e) => Some(e == integrable),
            None => None,
        };
        Ok(Measure {
            note: Some(if integrable { "integrable".into() } else { "not integrable".into() }),
            verdict,
            ..m
        })
    });
    let c = Check::new(S, "integrability", Ok(probe));
    match expect {
        Some(false) => c.note("expected non-integrable"),
        Some(true) => c,
        None => c.non_gating(),
    }
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
    let expect = ctx.m.distribution.as_ref().and_then(|d| d.expect_integrable);
    let split = geo.split();
    let d = split.generators(Side::D);
    let ds = Arc::new(ctx.with_scaled(&d));
    let p = Arc::new(ctx.with_scaled(&split.generators(Side::Perp)));
    let alphas = [ctx.even_alpha(), ctx.odd_alpha()];
    let alpha_names: Vec<String> = alphas.iter().map(|x| ctx.alpha_label(x)).collect();

    let needs_integrable = move |c: Check| {
        if expect == Some(false) {
            c.expecting("NotIntegrable")
        } else {
            c
        }
    };

    type Build = Box<dyn Fn(&SplitGeometry, &[Arg], &[Arg]) -> gconn_core::Result<Vec<Item>> + Send + Sync>;
    let mut out: Vec<Task<'a>> = Vec::new();
    {
        let geo = geo.clone();
        out.push(task(move || vec![integrability_check(&geo, expect)]));
    }
    let mut add = |id: &'static str, variant: Option<&'static str>, integrable: bool, f: Build| {
        let (geo, ds, p) = (geo.clone(), ds.clone(), p.clone());
        out.push(task(move || {
            let mut c = Check::items(S, id, f(&geo, &ds, &p));
            if let Some(v) = variant {
                c = c.variant(v);
            }
            if integrable {
                c = needs_integrable(c);
            }
            vec![c]
        }));
    };

    add(
        "conn-difference",
        None,
        false,
        Box::new(|g, ds, _| {
            over_lean(&[ds, ds, ds], |t, l| {
                Ok(vec![Item::zero(l, lie_conn_difference_residual(g, &t[0].1, &t[1].1, &t[2].1)?)])
            })
        }),
    );
    for (v, which) in [("∇^{D,L}", Ambient::LeviCivita), ("∇̃^D", Ambient::SemiSymmetric)] {
        add(
            "conn-commutator",
            Some(v),
            false,
            Box::new(move |g, ds, _| {
                over_lean(&[ds, ds, ds, ds], |t, l| {
                    Ok(vec![Item::zero(
                        l,
                        lie_conn_commutator_residual(g, which, &t[0].1, &t[1].1, &t[2].1, &t[3].1)?,
                    )])
                })
            }),
        );
        add(
            "conn-integrable",
            Some(v),
            true,
            Box::new(move |g, ds, _| {
                over_lean(&[ds, ds, ds, ds], |t, l| {
                    Ok(vec![Item::zero(
                        l,
                        lie_conn_integrable_residual(g, which, &t[0].1, &t[1].1, &t[2].1, &t[3].1)?,
                    )])
                })
            }),
        );
    }
    add(
        "curvature",
        None,
        true,
        Box::new(|g, ds, _| {
            over_lean(&[ds, ds, ds, ds], |t, l| {
                Ok(vec![Item::zero(l, lie_curvature_residual(g, &t[0].1, &t[1].1, &t[2].1, &t[3].1)?)])
            })
        }),
    );
    add(
        "normal-module",
        None,
        false,
        Box::new(move |g, ds, p| {
            let mut items = Vec::new();
            for (al, an) in alphas.iter().zip(&alpha_names) {
                items.extend(over(&[ds, ds, p], |t, l| {
                    let (a, b) = lie_normal_module_residuals(g, &t[0].1, &t[1].1, &t[2].1, al)?;
                    Ok(vec![
                        Item::zero(format!("first slot {l} α={an}"), a),
                        Item::zero(format!("second slot {l} α={an}"), b),
                    ])
                })?);
            }
            Ok(items)
        }),
    );
    add(
        "normal-commutator",
        None,
        false,
        Box::new(|g, ds, p| {
            over_lean(&[ds, ds, ds, p], |t, l| {
                Ok(vec![Item::zero(
                    l,
                    lie_normal_commutator_residual(g, &t[0].1, &t[1].1, &t[2].1, &t[3].1)?,
                )])
            })
        }),
    );
    add(
        "normal-integrable",
        None,
        true,
        Box::new(|g, ds, p| {
            over_lean(&[ds, ds, ds, p], |t, l| {
                Ok(vec![Item::zero(
                    l,
                    lie_normal_integrable_residual(g, &t[0].1, &t[1].1, &t[2].1, &t[3].1)?,
                )])
            })
        }),
    );
    add(
        "normal-curvature",
        None,
        true,
        Box::new(|g, ds, p| {
            over_lean(&[ds, ds, ds, p], |t, l| {
                Ok(vec![Item::zero(
                    l,
                    lie_normal_curvature_residual(g, &t[0].1, &t[1].1, &t[2].1, &t[3].1)?,
                )])
            })
        }),
    );
    out
}
