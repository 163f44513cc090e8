use nalgebra::DVector;
use rayon::prelude::*;

use super::context::PointContext;
use super::theorems::{nan_max, Recorder};
use super::{ConditionRecord, Lab, PointSummary, RCondition, TheoremId, TheoremReport, Verdict};
use crate::quaternionic::RTag;
use crate::submersion::bracket;

fn oneill_point(ctx: &PointContext) -> Vec<ConditionRecord> {
    let geo = &ctx.geo;
    let (hs, vs, full) = (ctx.horizontal(), ctx.vertical(), ctx.full());
    let mut rec = Recorder::new(ctx.index, None);
    let zero = DVector::zeros(geo.dim());

    for i in 0..hs.len() {
        for j in 0..hs.len() {
            let axy = geo.oneill_a(&hs[i], &hs[j]);
            let ayx = geo.oneill_a(&hs[j], &hs[i]);
            rec.push_vec(ctx, "A_X Y + A_Y X = 0", || format!("X=h{i}, Y=h{j}"), &(&axy + &ayx), &zero);
            let b = bracket(&geo.horizontal_field(&hs[i]), &geo.horizontal_field(&hs[j]));
            let half = geo.vert(&b) * 0.5;
            rec.push_vec(ctx, "A_X Y = 1/2 V[X, Y]", || format!("X=h{i}, Y=h{j}"), &axy, &half);
        }
    }
    for i in 0..vs.len() {
        for j in 0..vs.len() {
            let tuv = geo.oneill_t(&vs[i], &vs[j]);
            let tvu = geo.oneill_t(&vs[j], &vs[i]);
            rec.push_vec(ctx, "T_U V = T_V U", || format!("U=e{i}, V=e{j}"), &tuv, &tvu);
        }
    }

    // skew-adjointness over the full frame, from precomputed tensor tables
    let n = full.len();
    let t: Vec<Vec<DVector<f64>>> = full
        .iter()
        .map(|u| full.iter().map(|w| geo.oneill_t(u, w)).collect())
        .collect();
    let a: Vec<Vec<DVector<f64>>> = full
        .iter()
        .map(|u| full.iter().map(|w| geo.oneill_a(u, w)).collect())
        .collect();
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                let st = ctx.inner(&t[u][v], &full[w]) + ctx.inner(&full[v], &t[u][w]);
                rec.push(
                    "g(T_U V, W) + g(V, T_U W) = 0",
                    || format!("U=b{u}, V=b{v}, W=b{w}"),
                    st,
                    0.0,
                    st.abs(),
                );
                let sa = ctx.inner(&a[u][v], &full[w]) + ctx.inner(&full[v], &a[u][w]);
                rec.push(
                    "g(A_U V, W) + g(V, A_U W) = 0",
                    || format!("U=b{u}, V=b{v}, W=b{w}"),
                    sa,
                    0.0,
                    sa.abs(),
                );
            }
        }
    }

    for (i, x) in full.iter().enumerate() {
        for (j, y) in full.iter().enumerate() {
            let d = geo.second_fundamental_form(x, y) - geo.second_fundamental_form(y, x);
            let r = geo.base_norm(&d);
            rec.push("(nabla F_*)(U, V) = (nabla F_*)(V, U)", || format!("U=b{i}, V=b{j}"), r, 0.0, r);
        }
    }
    for (i, x) in hs.iter().enumerate() {
        for (j, y) in hs.iter().enumerate() {
            let r = geo.base_norm(&geo.second_fundamental_form(x, y));
            rec.push("(nabla F_*)(X, Y) = 0", || format!("X=h{i}, Y=h{j}"), r, 0.0, r);
        }
    }
    rec.records
}

/// Algebraic O'Neill identities and symmetry of `∇F_*` at every sample.
pub fn oneill_identities(lab: &Lab<'_>) -> TheoremReport {
    let per_point: Vec<Vec<ConditionRecord>> = lab.contexts.par_iter().map(oneill_point).collect();
    let points = lab
        .contexts
        .iter()
        .zip(&per_point)
        .map(|(ctx, recs)| {
            let worst = recs.iter().map(|r| r.residual).fold(0.0, nan_max);
            summary(ctx, true, worst, worst < lab.tolerance, Vec::new())
        })
        .collect();
    finish(lab, TheoremId::OneillIdentities, per_point.into_iter().flatten().collect(), points)
}

fn structure_point(ctx: &PointContext, tag: RTag) -> Vec<ConditionRecord> {
    let geo = &ctx.geo;
    let op = ctx.op(tag);
    let (hs, vs) = (ctx.horizontal(), ctx.vertical());
    let mut rec = Recorder::new(ctx.index, Some(tag));

    for (k, v) in vs.iter().enumerate() {
        for (l, w) in vs.iter().enumerate() {
            let tvw = geo.oneill_t(v, w);
            let lhs = geo.oneill_t(v, &op.apply(w));
            rec.push_vec(ctx, "T_V RW = B_R T_V W", || format!("V=e{k}, W=e{l}"), &lhs, &op.b(&tvw));
            let wf = geo.vertical_field(w);
            let lhs = geo.horiz(&geo.nabla(v, &ctx.r_field(tag, &wf)));
            let rhs = op.c(&tvw) + op.apply(&geo.vert(&geo.nabla(v, &wf)));
            rec.push_vec(
                ctx,
                "H nabla_V RW = C_R T_V W + R hat-nabla_V W",
                || format!("V=e{k}, W=e{l}"),
                &lhs,
                &rhs,
            );
        }
    }
    for (i, x) in hs.iter().enumerate() {
        for (j, y) in hs.iter().enumerate() {
            let yf = geo.horizontal_field(y);
            let h_nabla = geo.horiz(&geo.nabla(x, &yf));
            let lhs = geo.oneill_a(x, &op.c(y)) + geo.vert(&geo.nabla(x, &ctx.b_field(tag, &yf)));
            rec.push_vec(
                ctx,
                "A_X C_R Y + V nabla_X B_R Y = B_R H nabla_X Y",
                || format!("X=h{i}, Y=h{j}"),
                &lhs,
                &op.b(&h_nabla),
            );
            let lhs = geo.horiz(&geo.nabla(x, &ctx.c_field(tag, &yf))) + geo.oneill_a(x, &op.b(y));
            let rhs = op.apply(&geo.oneill_a(x, y)) + op.c(&h_nabla);
            rec.push_vec(
                ctx,
                "H nabla_X C_R Y + A_X B_R Y = R A_X Y + C_R H nabla_X Y",
                || format!("X=h{i}, Y=h{j}"),
                &lhs,
                &rhs,
            );
        }
        for (k, v) in vs.iter().enumerate() {
            let axv = geo.oneill_a(x, v);
            let lhs = geo.oneill_a(x, &op.apply(v));
            rec.push_vec(ctx, "A_X RV = B_R A_X V", || format!("X=h{i}, V=e{k}"), &lhs, &op.b(&axv));
            let vf = geo.vertical_field(v);
            let lhs = geo.horiz(&geo.nabla(x, &ctx.r_field(tag, &vf)));
            let rhs = op.c(&axv) + op.apply(&geo.vert(&geo.nabla(x, &vf)));
            rec.push_vec(
                ctx,
                "H nabla_X RV = C_R A_X V + R V nabla_X V",
                || format!("X=h{i}, V=e{k}"),
                &lhs,
                &rhs,
            );
        }
    }
    rec.records
}

/// The six decomposition identities, for each structure that is
/// anti-invariant at the sample.
pub fn structure_identities(lab: &Lab<'_>) -> TheoremReport {
    let tol = lab.tolerance;
    let per_point: Vec<(PointSummary, Vec<ConditionRecord>)> = lab
        .contexts
        .par_iter()
        .map(|ctx| {
            let mut records = Vec::new();
            let mut conditions = Vec::new();
            if ctx.ops.is_some() {
                for tag in RTag::ALL {
                    if !ctx.is_anti_invariant(tag) {
                        continue;
                    }
                    let recs = structure_point(ctx, tag);
                    let residual = recs.iter().map(|r| r.residual).fold(0.0, nan_max);
                    conditions.push(RCondition {
                        tag,
                        residual,
                        holds: residual < tol,
                    });
                    records.extend(recs);
                }
            }
            let worst = conditions.iter().map(|c| c.residual).fold(0.0, nan_max);
            let applicable = !conditions.is_empty();
            let holds = conditions.iter().all(|c| c.holds);
            (summary(ctx, applicable, worst, holds, conditions), records)
        })
        .collect();
    let (points, recs): (Vec<_>, Vec<_>) = per_point.into_iter().unzip();
    finish(lab, TheoremId::StructureIdentities, recs.into_iter().flatten().collect(), points)
}

fn summary(
    ctx: &PointContext,
    applicable: bool,
    residual: f64,
    holds: bool,
    conditions: Vec<RCondition>,
) -> PointSummary {
    PointSummary {
        index: ctx.index,
        point: ctx.geo.point.iter().cloned().collect(),
        hypothesis: ctx.hypothesis(),
        applicable,
        direct_residual: residual,
        direct_holds: holds,
        conditions,
        agree: true,
    }
}

fn finish(
    lab: &Lab<'_>,
    id: TheoremId,
    records: Vec<ConditionRecord>,
    points: Vec<PointSummary>,
) -> TheoremReport {
    let applicable = points.iter().filter(|p| p.applicable).count();
    let property_holds = points.iter().filter(|p| p.applicable).all(|p| p.direct_holds);
    let worst = points
        .iter()
        .filter(|p| p.applicable)
        .map(|p| p.direct_residual)
        .fold(0.0, nan_max);
    let mut notes = lab.notes.clone();
    let verdict = if applicable == 0 {
        notes.push("no structure is anti-invariant at any sample".to_string());
        Verdict::Inapplicable
    } else if property_holds {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    TheoremReport {
        id,
        title: id.title().to_string(),
        tolerance: lab.tolerance,
        verdict,
        property_holds,
        equivalence_ok: true,
        applicable_points: applicable,
        total_points: points.len(),
        worst_direct_residual: worst,
        worst_condition_residual: worst,
        identity: None,
        notes,
        records,
        points,
    }
}
