//! Algebraic identities of the engine itself: forms, brackets, lifts and
//! symbolic differentiation.

use gconn_core::{Derivation, Form, ScalarExpr};

use super::{product, task, tuple_label, Arg, Context, Suite, Task};
use crate::check::{Check, Item, Measure, Probe};

const S: Suite = Suite::Foundation;

/// Step of the five-point difference stencil.
const FD_STEP: f64 = 1e-3;
const FD_TOL: f64 = 1e-6;

/// Forms exercised by the exterior-algebra checks.
fn sample_forms(ctx: &Context) -> Vec<(String, Form)> {
    let m = ctx.dim();
    let mut out: Vec<(String, Form)> = ctx
        .m
        .forms
        .iter()
        .map(|(n, f)| (n.clone(), f.clone()))
        .collect();
    for i in 0..m {
        for j in i..m {
            let g = ctx.m.metric.g(i, j);
            if !g.is_zero() {
                out.push((format!("g{}{}", i + 1, j + 1), Form::scalar(m, g.clone())));
            }
        }
    }
    out.push((ctx.alpha_label(&ctx.odd_alpha()), ctx.odd_alpha()));
    if m >= 2 {
        let two = Form::dx(m, 0)
            .wedge(&Form::dx(m, m - 1))
            .scale(&ScalarExpr::coord(0).sin());
        out.push((ctx.alpha_label(&two), two));
    }
    out
}

fn lifts(ctx: &Context) -> Vec<Arg> {
    let mut out = ctx.with_scaled(&ctx.coord_gens());
    for (n, v) in &ctx.m.vectors {
        out.push((format!("L({n})"), Derivation::lift_lie(v)));
        out.push((format!("i({n})"), Derivation::lift_ins(v)));
    }
    out
}

pub fn tasks<'a>(ctx: &'a Context<'a>) -> Vec<Task<'a>> {
    vec![
        task(move || {
            let items = sample_forms(ctx)
                .into_iter()
                .map(|(n, f)| Item::zero(format!("d(d {n})"), f.d().d()))
                .collect();
            vec![Check::items(S, "d-squared", Ok(items)).exact()]
        }),
        task(move || {
            let mut items = Vec::new();
            for (vn, v) in ctx.vector_set() {
                for (fname, f) in sample_forms(ctx) {
                    items.push(Item::pair(
                        format!("L({vn}) {fname}"),
                        Derivation::lift_lie(&v).apply(&f),
                        f.interior(&v).d().add(&f.d().interior(&v)),
                    ));
                }
            }
            vec![Check::items(S, "cartan", Ok(items))]
        }),
        task(move || {
            let args = lifts(ctx);
            let mut items = Vec::new();
            for t in product(&[&args[..], &args[..], &args[..]]) {
                let (x, y, z) = (&t[0].1, &t[1].1, &t[2].1);
                let r = (|| -> gconn_core::Result<Derivation> {
                    let s = gconn_core::Parity::sign(
                        x.require_homogeneous("X")?,
                        y.require_homogeneous("Y")?,
                    );
                    Ok(x.commutator(&y.commutator(z))
                        .sub(&x.commutator(y).commutator(z))
                        .sub(&y.commutator(&x.commutator(z)).scale_const(s)))
                })();
                match r {
                    Ok(r) => items.push(Item::zero(tuple_label(&t), r)),
                    Err(e) => return vec![Check::items(S, "graded-jacobi", Err(e))],
                }
            }
            vec![Check::items(S, "graded-jacobi", Ok(items))]
        }),
        task(move || {
            let vs = ctx.vector_set();
            let mut items = Vec::new();
            for (xn, x) in &vs {
                for (yn, y) in &vs {
                    let (lx, ix) = (Derivation::lift_lie(x), Derivation::lift_ins(x));
                    let (ly, iy) = (Derivation::lift_lie(y), Derivation::lift_ins(y));
                    let b = x.bracket(y);
                    items.push(Item::pair(
                        format!("[L({xn}),L({yn})]"),
                        lx.commutator(&ly),
                        Derivation::lift_lie(&b),
                    ));
                    items.push(Item::pair(
                        format!("[L({xn}),i({yn})]"),
                        lx.commutator(&iy),
                        Derivation::lift_ins(&b),
                    ));
                    items.push(Item::zero(format!("[i({xn}),i({yn})]"), ix.commutator(&iy)));
                }
            }
            vec![Check::items(S, "lift-commutator", Ok(items))]
        }),
        task(move || vec![Check::new(S, "diff-fd", Ok(fd_probe(ctx))).fixed_tol(FD_TOL)]),
    ]
}

/// Scalars whose derivatives are compared against finite differences.
fn fd_scalars(ctx: &Context) -> Vec<(String, ScalarExpr)> {
    let m = ctx.dim();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i..m {
            out.push((format!("g{}{}", i + 1, j + 1), ctx.m.metric.g(i, j).clone()));
        }
    }
    for (n, v) in &ctx.m.vectors {
        for (k, c) in v.comps().iter().enumerate() {
            out.push((format!("{n}[{}]", k + 1), c.clone()));
        }
    }
    let rows = ctx
        .m
        .frame
        .iter()
        .map(|f| ("E", f.clone()))
        .chain(ctx.m.parallel.iter().map(|p| ("X", p.frame().clone())));
    for (tag, f) in rows {
        for (r, row) in f.rows().iter().enumerate() {
            for (k, c) in row.comps().iter().enumerate() {
                out.push((format!("{tag}{}[{}]", r + 1, k + 1), c.clone()));
            }
        }
    }
    for (n, f) in &ctx.m.forms {
        for (b, c) in f.terms() {
            out.push((format!("{n}[{}]", gconn_core::forms::blade_name(b)), c.clone()));
        }
    }
    out.retain(|(_, e)| e.as_const().is_none());
    out
}

fn fd_probe(ctx: &Context) -> Probe {
    let m = ctx.dim();
    let jobs: Vec<(String, ScalarExpr, ScalarExpr, usize)> = fd_scalars(ctx)
        .into_iter()
        .flat_map(|(n, e)| (0..m).map(move |j| (n.clone(), e.clone(), e.diff(j), j)))
        .collect();
    Box::new(move |p: &[f64]| {
        let mut best = Measure::default();
        let mut best_ratio = -1.0;
        for (n, e, de, j) in &jobs {
            let at = |t: f64| {
                let mut q = p.to_vec();
                q[*j] += t;
                e.eval(&q)
            };
            let h = FD_STEP;
            let fd = (-at(2.0 * h)? + 8.0 * at(h)? - 8.0 * at(-h)? + at(-2.0 * h)?) / (12.0 * h);
            let exact = de.eval(p)?;
            let r = (exact - fd).abs();
            let ratio = r / (1.0 + exact.abs());
            if ratio > best_ratio {
                best_ratio = ratio;
                best = Measure {
                    residual: r,
                    scale: exact.abs(),
                    worst: Some(format!("∂{} {n}", j + 1)),
                    ..Measure::default()
                };
            }
        }
        Ok(best)
    })
}
