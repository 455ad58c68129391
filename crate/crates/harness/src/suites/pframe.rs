//! Parallelizable charts: the canonical connection, its dual, the `λ` and
//! `ω` blends, and the Schouten and Vranceanu connections of a split.

use std::sync::Arc;

use gconn_core::closed_forms::RuleCheck;
use gconn_core::connections::{curvature, metric_compat_residual, torsion};
use gconn_core::distributions::{DistributionSplit, Side};
use gconn_core::pframe::{
    canonical_torsion_table, dual_lie_checks, dual_lie_parallel_check, frame_ricci, lambda_curvature_table,
    lambda_table, omega_curvature_table, omega_ricci_table, parallelism_residuals, Blend, Canonical, Dual,
    ParallelFrame, Schouten, Vranceanu,
};
use gconn_core::{Connection, GeomError, GradedMetric};

use super::{generators, over, task, Arg, Context, Suite, Task};
use crate::check::{measure_items, Check, Item, Measure, Probe};

const S: Suite = Suite::Pframe;

/// Torsion above this counts as present.
const TORSION_PRESENT: f64 = 1e-10;

fn table(r: gconn_core::Result<Vec<RuleCheck>>) -> gconn_core::Result<Vec<Item>> {
    Ok(r?.into_iter().map(|c| Item::rule("", c)).collect())
}

fn frame_tasks<'a>(ctx: &'a Context<'a>, pf: Arc<ParallelFrame>) -> Vec<Task<'a>> {
    let gens = generators(pf.frame(), "");
    let args = Arc::new(ctx.with_scaled(&gens));
    let gens = Arc::new(gens);
    let mut out: Vec<Task<'a>> = Vec::new();
    let mut add = |f: Box<dyn FnOnce(&Arc<ParallelFrame>, &[Arg], &[Arg]) -> Vec<Check> + Send + 'a>| {
        let (pf, args, gens) = (pf.clone(), args.clone(), gens.clone());
        out.push(task(move || f(&pf, &args, &gens)));
    };

    add(Box::new(|pf, a, g| {
        let c = Canonical::new(pf.clone());
        let items = over(&[a, g], |t, l| Ok(vec![Item::zero(l, c.nabla(&t[0].1, &t[1].1)?)]));
        vec![Check::items(S, "canonical-parallel", items).exact()]
    }));
    add(Box::new(|pf, a, _| {
        let c = Canonical::new(pf.clone());
        let items = over(&[a, a, a], |t, l| Ok(vec![Item::zero(l, curvature(&c, &t[0].1, &t[1].1, &t[2].1)?)]));
        vec![Check::items(S, "canonical-flat", items)]
    }));
    add(Box::new(|pf, _, _| vec![Check::items(S, "canonical-torsion", table(canonical_torsion_table(pf)))]));
    add(Box::new(|pf, a, _| {
        let c = Canonical::new(pf.clone());
        let items = pf.metric().and_then(|g| {
            let gm = GradedMetric::new(Arc::new(g));
            over(&[a, a, a], |t, l| {
                Ok(vec![Item::zero(l, metric_compat_residual(&c, &gm, &t[0].1, &t[1].1, &t[2].1)?)])
            })
        });
        vec![Check::items(S, "canonical-metricity", items)]
    }));
    add(Box::new(|pf, a, _| {
        let (c, d) = (Canonical::new(pf.clone()), Dual::new(pf.clone()));
        let items = over(&[a, a], |t, l| {
            let (x, y) = (&t[0].1, &t[1].1);
            Ok(vec![Item::pair(l, torsion(&d, x, y)?, torsion(&c, x, y)?.neg())])
        });
        vec![Check::items(S, "dual-torsion", items)]
    }));

    for &lambda in &ctx.m.pframe.lambdas {
        let v = format!("λ={lambda}");
        let v2 = v.clone();
        let v3 = v.clone();
        add(Box::new(move |pf, _, _| {
            vec![Check::items(S, "lambda-rules", table(lambda_table(pf, lambda))).variant(v)]
        }));
        add(Box::new(move |pf, _, _| {
            vec![Check::items(S, "lambda-curvature", table(lambda_curvature_table(pf, lambda))).variant(v2)]
        }));
        add(Box::new(move |pf, a, _| {
            let c = Blend::lambda(pf.clone(), lambda);
            let items = over(&[a, a], |t, l| Ok(vec![Item::zero(l, frame_ricci(pf, &c, &t[0].1, &t[1].1)?)]));
            vec![Check::items(S, "lambda-ricci-flat", items).variant(v3)]
        }));
    }

    if let Some(omega) = ctx.m.pframe.omega.clone() {
        let variant = format!("ω={}", ctx.m.pframe.omega_text.as_deref().unwrap_or("?"));
        let expect = ctx.m.pframe.expect_constant;
        let mark = move |c: Check| {
            let c = c.variant(variant.clone());
            if expect == Some(false) {
                c.expecting("NonConstantStructure")
            } else {
                c
            }
        };
        let (o1, o2, m1, m2) = (omega.clone(), omega, mark.clone(), mark);
        add(Box::new(move |pf, _, _| {
            vec![m1(Check::items(S, "omega-curvature", table(omega_curvature_table(pf, &o1))))]
        }));
        add(Box::new(move |pf, _, _| {
            let items = omega_ricci_table(pf, &o2)
                .map(|v| v.into_iter().map(|c| Item::form_rule("", c)).collect());
            vec![m2(Check::items(S, "omega-ricci", items))]
        }));
    }

    add(Box::new(|pf, a, _| {
        let mut printed = Vec::new();
        let mut exchanged = Vec::new();
        let res = over(&[a, a, a], |t, l| {
            let (p, e) = dual_lie_checks(pf, &t[0].1, &t[1].1, &t[2].1)?;
            printed.push(Item::rule(&l, p));
            exchanged.push(Item::rule(&l, e));
            Ok(Vec::new())
        });
        let (p, e) = match res {
            Ok(_) => (Ok(printed), Ok(exchanged)),
            Err(err) => (Err(err.clone()), Err(err)),
        };
        vec![
            Check::items(S, "dual-lie", e).note("arguments of L_X∇^c exchanged"),
            Check::items(S, "dual-lie-printed", p)
                .non_gating()
                .note("arguments of L_X∇^c as printed"),
        ]
    }));
    let probes = ctx.m.points.clone();
    add(Box::new(move |pf, a, g| {
        let items = over(&[g, a, a], |t, l| {
            Ok(vec![Item::rule(&l, dual_lie_parallel_check(pf, &t[0].1, &t[1].1, &t[2].1, &probes)?)])
        });
        vec![Check::items(S, "dual-lie-parallel", items)]
    }));
    out
}

fn parallel_items(c: &dyn Connection, split: &DistributionSplit, a: &[Arg]) -> gconn_core::Result<Vec<Item>> {
    over(&[a, a], |t, l| {
        let (p, q) = parallelism_residuals(c, split, &t[0].1, &t[1].1)?;
        Ok(vec![Item::zero(format!("D {l}"), p), Item::zero(format!("D⊥ {l}"), q)])
    })
}

fn split_tasks<'a>(ctx: &'a Context<'a>, split: Result<Arc<DistributionSplit>, GeomError>) -> Vec<Task<'a>> {
    let split = match split {
        Ok(s) => s,
        Err(e) => {
            return vec![task(move || {
                ["schouten-parallel", "vranceanu-parallel", "schouten-fixed"]
                    .iter()
                    .map(|id| Check::items(S, id, Err(e.clone())))
                    .collect()
            })]
        }
    };
    let mut all = split.generators(Side::D);
    all.extend(split.generators(Side::Perp));
    let args = Arc::new(ctx.with_scaled(&all));
    let base: Arc<dyn Connection> = ctx.lc.clone();
    let mut out: Vec<Task<'a>> = Vec::new();

    {
        let (split, args, base) = (split.clone(), args.clone(), base.clone());
        out.push(task(move || {
            let s = Schouten::new(base, split.clone());
            vec![Check::items(S, "schouten-parallel", parallel_items(&s, &split, &args))]
        }));
    }
    {
        let (split, args, base) = (split.clone(), args.clone(), base.clone());
        out.push(task(move || {
            let v = Vranceanu::new(base, split.clone());
            vec![Check::items(S, "vranceanu-parallel", parallel_items(&v, &split, &args))]
        }));
    }
    {
        let (split, args, base) = (split.clone(), args.clone(), base.clone());
        // The canonical connection keeps the frame parallel, so it already
        // preserves a split spanned by parallel-frame rows.
        let canon = match (&ctx.m.parallel, &ctx.m.frame) {
            (Some(pf), None) => Some(Canonical::new(pf.clone())),
            _ => None,
        };
        out.push(task(move || {
            let s1: Arc<dyn Connection> = Arc::new(Schouten::new(base, split.clone()));
            let s2 = Schouten::new(s1.clone(), split.clone());
            let canon_s = canon.map(|c| (Schouten::new(Arc::new(c.clone()), split.clone()), c));
            let items = over(&[&args, &args], |t, l| {
                let (x, y) = (&t[0].1, &t[1].1);
                let mut v = vec![Item::pair(format!("S(S(∇^L)) {l}"), s2.nabla(x, y)?, s1.nabla(x, y)?)];
                if let Some((cs, c)) = &canon_s {
                    v.push(Item::pair(format!("S(∇^c) {l}"), cs.nabla(x, y)?, c.nabla(x, y)?));
                }
                Ok(v)
            });
            vec![Check::items(S, "schouten-fixed", items)]
        }));
    }

    let complement = DistributionSplit::new(split.frame().clone(), &split.indices(Side::Perp), split.probes().to_vec());
    let both = split.require_integrable().is_ok()
        && complement.as_ref().map(|c| c.require_integrable().is_ok()).unwrap_or(false);
    out.push(task(move || {
        let v = Vranceanu::new(base, split.clone());
        let items = over(&[&args, &args], |t, l| Ok(vec![Item::zero(l, torsion(&v, &t[0].1, &t[1].1)?)]));
        if both {
            return vec![Check::items(S, "vranceanu-symmetric", items).note("D and D⊥ both integrable")];
        }
        let probe = items.map(|items| -> Probe {
            Box::new(move |p: &[f64]| {
                let m = measure_items(&items, p)?;
                let present = m.residual > TORSION_PRESENT * (1.0 + m.scale);
                Ok(Measure {
                    verdict: Some(present),
                    ..m
                })
            })
        });
        vec![Check::new(S, "nonintegrable-asymmetric", probe)
            .non_gating()
            .note("D or D⊥ not integrable; Vranceanu torsion expected nonzero")]
    }));
    out
}

pub fn tasks<'a>(ctx: &'a Context<'a>) -> Vec<Task<'a>> {
    let mut out = Vec::new();
    if let Some(pf) = &ctx.m.parallel {
        out.extend(frame_tasks(ctx, pf.clone()));
    }
    if let Some(split) = ctx.split() {
        out.extend(split_tasks(ctx, split));
    }
    out
}
