use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::context::PointContext;
use super::foliation::{horizontal_residuals, point_flags, product_from_flags, vertical_residuals, ProductType};
use super::{
    identities, ConditionRecord, IdentityCheck, Lab, PointSummary, RCondition, TheoremId,
    TheoremReport, Verdict,
};
use crate::classify::{classify, Overall};
use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::quaternionic::{RTag, StructureTriple};
use crate::submersion::{
    bracket, sweep, SubmersionFixture, DEFAULT_TOLERANCE, VERTICAL_ANGLE_TOLERANCE,
};

/// Tolerance for `lhs − rhs = g(𝒱[X, Y], V)`.
pub const IDENTITY_TOLERANCE: f64 = 1e-6;
/// Tolerance for `g(𝒜_X V, X) = 0`.
pub const KEY_STEP_TOLERANCE: f64 = 1e-8;

/// Keeps the worst record per condition family.
pub(crate) struct Recorder {
    index: usize,
    tag: Option<RTag>,
    pub(crate) records: Vec<ConditionRecord>,
}

impl Recorder {
    pub(crate) fn new(index: usize, tag: Option<RTag>) -> Self {
        Recorder {
            index,
            tag,
            records: Vec::new(),
        }
    }

    pub(crate) fn push(
        &mut self,
        condition: &str,
        inputs: impl FnOnce() -> String,
        lhs: f64,
        rhs: f64,
        residual: f64,
    ) {
        match self.records.iter_mut().find(|r| r.condition == condition) {
            Some(r) => {
                if residual > r.residual || residual.is_nan() {
                    r.inputs = inputs();
                    r.lhs = lhs;
                    r.rhs = rhs;
                    r.residual = residual;
                }
            }
            None => self.records.push(ConditionRecord {
                index: self.index,
                tag: self.tag,
                condition: condition.to_string(),
                inputs: inputs(),
                lhs,
                rhs,
                residual,
            }),
        }
    }

    /// Records `‖lhs − rhs‖` for vector sides.
    pub(crate) fn push_vec(
        &mut self,
        ctx: &PointContext,
        condition: &str,
        inputs: impl FnOnce() -> String,
        lhs: &DVector<f64>,
        rhs: &DVector<f64>,
    ) {
        let residual = ctx.norm(&(lhs - rhs));
        self.push(condition, inputs, ctx.norm(lhs), ctx.norm(rhs), residual);
    }

    pub(crate) fn worst(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, nan_max)
    }
}

pub(crate) fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

pub(crate) fn run(lab: &Lab<'_>, id: TheoremId) -> Result<TheoremReport> {
    match id {
        TheoremId::HorizontalUmbilic => horizontal_umbilic(lab),
        TheoremId::Nonexistence => nonexistence(lab),
        TheoremId::OneillIdentities => Ok(identities::oneill_identities(lab)),
        TheoremId::StructureIdentities => Ok(identities::structure_identities(lab)),
        _ => equivalence(lab, id),
    }
}

fn direct_residual(ctx: &PointContext, id: TheoremId) -> f64 {
    let geo = &ctx.geo;
    let vertical_umbilic = || {
        let r = vertical_residuals(geo);
        r.umbilic.min(r.geodesic)
    };
    match id {
        TheoremId::HorizontalIntegrability => {
            let hs = ctx.horizontal();
            let mut worst: f64 = 0.0;
            for i in 0..hs.len() {
                for j in i + 1..hs.len() {
                    let b = bracket(&geo.horizontal_field(&hs[i]), &geo.horizontal_field(&hs[j]));
                    worst = worst.max(geo.norm(&geo.vert(&b)));
                }
            }
            worst
        }
        TheoremId::HorizontalGeodesic => horizontal_residuals(geo).geodesic,
        TheoremId::VerticalGeodesic => vertical_residuals(geo).geodesic,
        TheoremId::TotallyGeodesic => {
            let full = ctx.full();
            let mut worst: f64 = 0.0;
            for a in &full {
                for b in &full {
                    worst = worst.max(geo.base_norm(&geo.second_fundamental_form(a, b)));
                }
            }
            worst
        }
        TheoremId::Harmonic => geo.base_norm(&geo.tension()),
        TheoremId::RiemannianProduct => horizontal_residuals(geo)
            .geodesic
            .max(vertical_residuals(geo).geodesic),
        TheoremId::TwistedProduct => horizontal_residuals(geo).geodesic.max(vertical_umbilic()),
        TheoremId::VerticalUmbilic => vertical_umbilic(),
        _ => 0.0,
    }
}

fn lbl(a: &str, i: usize, b: &str, j: usize) -> String {
    format!("{a}=h{i}, {b}=e{j}")
}

/// `g(𝒜_X B_R Y, RV) = g(C_R Y, R𝒜_X V)`, or `𝒜_X RY = 0` for h-Lagrangian.
fn horizontal_geodesic_condition(ctx: &PointContext, tag: RTag, hyp: Overall, rec: &mut Recorder) {
    let (hs, vs) = (ctx.horizontal(), ctx.vertical());
    let op = ctx.op(tag);
    for (i, x) in hs.iter().enumerate() {
        for (j, y) in hs.iter().enumerate() {
            if hyp == Overall::HLagrangian {
                let a = ctx.geo.oneill_a(x, &op.apply(y));
                rec.push("A_X RY = 0", || format!("X=h{i}, Y=h{j}"), ctx.norm(&a), 0.0, ctx.norm(&a));
                continue;
            }
            let ab = ctx.geo.oneill_a(x, &op.b(y));
            let cy = op.c(y);
            for (k, v) in vs.iter().enumerate() {
                let lhs = ctx.inner(&ab, &op.apply(v));
                let rhs = ctx.inner(&cy, &op.apply(&ctx.geo.oneill_a(x, v)));
                rec.push(
                    "g(A_X B_R Y, RV) = g(C_R Y, R A_X V)",
                    || format!("X=h{i}, Y=h{j}, V=e{k}"),
                    lhs,
                    rhs,
                    (lhs - rhs).abs(),
                );
            }
        }
    }
}

/// `𝒯_V B_R X + 𝒜_{C_R X} V ∈ μ_R`, or `𝒯_V RX = 0` for h-Lagrangian.
fn vertical_geodesic_condition(ctx: &PointContext, tag: RTag, hyp: Overall, rec: &mut Recorder) {
    let (hs, vs) = (ctx.horizontal(), ctx.vertical());
    let op = ctx.op(tag);
    for (i, x) in hs.iter().enumerate() {
        for (k, v) in vs.iter().enumerate() {
            if hyp == Overall::HLagrangian {
                let t = ctx.geo.oneill_t(v, &op.apply(x));
                rec.push("T_V RX = 0", || lbl("X", i, "V", k), ctx.norm(&t), 0.0, ctx.norm(&t));
                continue;
            }
            let w = ctx.geo.oneill_t(v, &op.b(x)) + ctx.geo.oneill_a(&op.c(x), v);
            let d = op.distance_to_mu(&w);
            rec.push(
                "T_V B_R X + A_{C_R X} V in mu_R",
                || lbl("X", i, "V", k),
                ctx.norm(&w),
                ctx.norm(&op.q(&w)),
                d,
            );
        }
    }
}

/// `𝒯_V B_R X + ℋ∇_V C_R X = −g(H, X) RV` paired with `R(ker F_*)`, or
/// `𝒯_V RX = −g(H, X) RV` for h-Lagrangian.
fn vertical_umbilic_condition(ctx: &PointContext, tag: RTag, hyp: Overall, rec: &mut Recorder) {
    let (hs, vs) = (ctx.horizontal(), ctx.vertical());
    let op = ctx.op(tag);
    let h = ctx.mean_curvature();
    for (i, x) in hs.iter().enumerate() {
        let hx = ctx.inner(&h, x);
        let c_field = ctx.c_field(tag, &ctx.geo.horizontal_field(x));
        for (k, v) in vs.iter().enumerate() {
            let rhs = -(op.apply(v) * hx);
            if hyp == Overall::HLagrangian {
                let lhs = ctx.geo.oneill_t(v, &op.apply(x));
                rec.push_vec(ctx, "T_V RX = -g(H, X) RV", || lbl("X", i, "V", k), &lhs, &rhs);
                continue;
            }
            let raw = ctx.geo.oneill_t(v, &op.b(x)) + ctx.geo.horiz(&ctx.geo.nabla(v, &c_field));
            let lhs = op.p(&raw);
            rec.push_vec(
                ctx,
                "P_R(T_V B_R X + H nabla_V C_R X) = -g(H, X) RV",
                || lbl("X", i, "V", k),
                &lhs,
                &rhs,
            );
        }
    }
}

/// Lie-bracket criterion; `𝒜_X RY = 𝒜_Y RX` for h-Lagrangian.
fn integrability_condition(ctx: &PointContext, tag: RTag, hyp: Overall, rec: &mut Recorder) {
    let (hs, vs) = (ctx.horizontal(), ctx.vertical());
    let op = ctx.op(tag);
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let (x, y) = (&hs[i], &hs[j]);
            if hyp == Overall::HLagrangian {
                let lhs = ctx.geo.oneill_a(x, &op.apply(y));
                let rhs = ctx.geo.oneill_a(y, &op.apply(x));
                rec.push_vec(ctx, "A_X RY = A_Y RX", || format!("X=h{i}, Y=h{j}"), &lhs, &rhs);
                continue;
            }
            for (k, v) in vs.iter().enumerate() {
                let s = sides(ctx, tag, x, y, v);
                rec.push(
                    "g(A_X B_R Y - A_Y B_R X, RV) = g(C_R Y, R A_X V) - g(C_R X, R A_Y V)",
                    || format!("X=h{i}, Y=h{j}, V=e{k}"),
                    s.0,
                    s.1,
                    (s.0 - s.1).abs(),
                );
            }
        }
    }
}

fn sides(ctx: &PointContext, tag: RTag, x: &DVector<f64>, y: &DVector<f64>, v: &DVector<f64>) -> (f64, f64) {
    let op = ctx.op(tag);
    let geo = &ctx.geo;
    let rv = op.apply(v);
    let lhs = ctx.inner(&(geo.oneill_a(x, &op.b(y)) - geo.oneill_a(y, &op.b(x))), &rv);
    let rhs = ctx.inner(&op.c(y), &op.apply(&geo.oneill_a(x, v)))
        - ctx.inner(&op.c(x), &op.apply(&geo.oneill_a(y, v)));
    (lhs, rhs)
}

/// `g(𝒱[X, Y], V)` for the projector extensions of `x`, `y`.
fn bracket_term(ctx: &PointContext, x: &DVector<f64>, y: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let geo = &ctx.geo;
    let b = bracket(&geo.horizontal_field(x), &geo.horizontal_field(y));
    ctx.inner(&geo.vert(&b), v)
}

fn totally_geodesic_condition(ctx: &PointContext, tag: RTag, hyp: Overall, rec: &mut Recorder) {
    let (hs, vs) = (ctx.horizontal(), ctx.vertical());
    let op = ctx.op(tag);
    let geo = &ctx.geo;
    let lagrangian = hyp == Overall::HLagrangian;
    for (k, v) in vs.iter().enumerate() {
        let rv_field = ctx.r_field(tag, &geo.vertical_field(v));
        for (i, x) in hs.iter().enumerate() {
            let a = geo.oneill_a(x, &op.apply(v));
            rec.push("A_X RV = 0", || lbl("X", i, "V", k), ctx.norm(&a), 0.0, ctx.norm(&a));
            if !lagrangian {
                let q = op.q(&geo.horiz(&geo.nabla(x, &rv_field)));
                rec.push("Q_R H nabla_X RV = 0", || lbl("X", i, "V", k), ctx.norm(&q), 0.0, ctx.norm(&q));
            }
        }
        for (l, w) in vs.iter().enumerate() {
            let t = geo.oneill_t(v, &op.apply(w));
            rec.push("T_V RW = 0", || format!("V=e{k}, W=e{l}"), ctx.norm(&t), 0.0, ctx.norm(&t));
            if !lagrangian {
                let rw_field = ctx.r_field(tag, &geo.vertical_field(w));
                let q = op.q(&geo.horiz(&geo.nabla(v, &rw_field)));
                rec.push("Q_R H nabla_V RW = 0", || format!("V=e{k}, W=e{l}"), ctx.norm(&q), 0.0, ctx.norm(&q));
            }
        }
    }
}

fn harmonic_condition(ctx: &PointContext, tag: RTag, hyp: Overall, rec: &mut Recorder) {
    if hyp == Overall::HLagrangian {
        rec.push("J preserves ker F_*", || "frame {e, Je}".to_string(), 0.0, 0.0, 0.0);
        return;
    }
    let vs = ctx.vertical();
    let op = ctx.op(tag);
    let geo = &ctx.geo;
    let mut trace = DVector::zeros(geo.dim());
    for e in &vs {
        trace += geo.oneill_t(e, e);
    }
    let q = op.q(&trace);
    rec.push("Q_R(trace T) = 0", || "trace over e_i".to_string(), ctx.norm(&q), 0.0, ctx.norm(&q));
    for (k, v) in vs.iter().enumerate() {
        let s: f64 = vs.iter().map(|e| ctx.inner(e, &op.apply(&geo.oneill_t(v, e)))).sum();
        rec.push("trace(R T_V) = 0", || format!("V=e{k}"), s, 0.0, s.abs());
    }
}

fn condition(ctx: &PointContext, id: TheoremId, tag: RTag, hyp: Overall, rec: &mut Recorder) {
    match id {
        TheoremId::HorizontalIntegrability => integrability_condition(ctx, tag, hyp, rec),
        TheoremId::HorizontalGeodesic => horizontal_geodesic_condition(ctx, tag, hyp, rec),
        TheoremId::VerticalGeodesic => vertical_geodesic_condition(ctx, tag, hyp, rec),
        TheoremId::TotallyGeodesic => totally_geodesic_condition(ctx, tag, hyp, rec),
        TheoremId::Harmonic => harmonic_condition(ctx, tag, hyp, rec),
        TheoremId::RiemannianProduct => {
            horizontal_geodesic_condition(ctx, tag, hyp, rec);
            vertical_geodesic_condition(ctx, tag, hyp, rec);
        }
        TheoremId::TwistedProduct => {
            horizontal_geodesic_condition(ctx, tag, hyp, rec);
            vertical_umbilic_condition(ctx, tag, hyp, rec);
        }
        TheoremId::VerticalUmbilic => vertical_umbilic_condition(ctx, tag, hyp, rec),
        _ => {}
    }
}

struct PointOutcome {
    summary: PointSummary,
    records: Vec<ConditionRecord>,
    /// `(worst residual, largest term)` of the integrability proof identity.
    identity: Option<(f64, f64)>,
}

fn evaluate_point(ctx: &PointContext, id: TheoremId, tol: f64) -> PointOutcome {
    let direct = direct_residual(ctx, id);
    let direct_holds = direct < tol;
    let hyp = ctx.hypothesis();
    let applicable = hyp != Overall::None;
    let mut records = Vec::new();
    let mut conditions = Vec::new();
    let mut identity = None;
    if applicable {
        for tag in RTag::ALL {
            let mut rec = Recorder::new(ctx.index, Some(tag));
            condition(ctx, id, tag, hyp, &mut rec);
            let residual = rec.worst();
            conditions.push(RCondition {
                tag,
                residual,
                holds: residual < tol,
            });
            records.extend(rec.records);
        }
        if id == TheoremId::HorizontalIntegrability && hyp == Overall::HAntiInvariant {
            identity = Some(integrability_identity(ctx));
        }
    }
    let agree = conditions.iter().all(|c| c.holds == direct_holds);
    PointOutcome {
        summary: PointSummary {
            index: ctx.index,
            point: ctx.geo.point.iter().cloned().collect(),
            hypothesis: hyp,
            applicable,
            direct_residual: direct,
            direct_holds,
            conditions,
            agree,
        },
        records,
        identity,
    }
}

fn integrability_identity(ctx: &PointContext) -> (f64, f64) {
    let (hs, vs) = (ctx.horizontal(), ctx.vertical());
    let mut worst: f64 = 0.0;
    let mut largest: f64 = 0.0;
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let geo = &ctx.geo;
            let vb = geo.vert(&bracket(&geo.horizontal_field(&hs[i]), &geo.horizontal_field(&hs[j])));
            for v in &vs {
                let b = ctx.inner(&vb, v);
                for tag in RTag::ALL {
                    let (lhs, rhs) = sides(ctx, tag, &hs[i], &hs[j], v);
                    worst = nan_max(worst, (lhs - rhs - b).abs());
                    largest = largest.max(lhs.abs()).max(rhs.abs()).max(b.abs());
                }
            }
        }
    }
    (worst, largest)
}

fn equivalence(lab: &Lab<'_>, id: TheoremId) -> Result<TheoremReport> {
    let tol = lab.tolerance;
    let outcomes: Vec<PointOutcome> = lab
        .contexts
        .par_iter()
        .map(|ctx| evaluate_point(ctx, id, tol))
        .collect();
    let mut notes = lab.notes.clone();
    let mut records = Vec::new();
    let mut points = Vec::with_capacity(outcomes.len());
    let mut identity: Option<IdentityCheck> = None;
    for o in outcomes {
        if let Some((w, l)) = o.identity {
            let c = identity.get_or_insert(IdentityCheck {
                tolerance: IDENTITY_TOLERANCE,
                worst_residual: 0.0,
                largest_term: 0.0,
                holds: true,
            });
            c.worst_residual = nan_max(c.worst_residual, w);
            c.largest_term = c.largest_term.max(l);
            c.holds = c.worst_residual < IDENTITY_TOLERANCE;
        }
        records.extend(o.records);
        points.push(o.summary);
    }
    let applicable: Vec<&PointSummary> = points.iter().filter(|p| p.applicable).collect();
    let skipped = points.len() - applicable.len();
    // without applicable samples the direct property is reported over all of them
    let property_holds = if applicable.is_empty() {
        points.iter().all(|p| p.direct_holds)
    } else {
        applicable.iter().all(|p| p.direct_holds)
    };
    let equivalence_ok = applicable.iter().all(|p| p.agree);
    let worst_condition_residual = applicable
        .iter()
        .flat_map(|p| p.conditions.iter().map(|c| c.residual))
        .fold(0.0, nan_max);
    let worst_direct_residual = points.iter().map(|p| p.direct_residual).fold(0.0, nan_max);
    let verdict = if applicable.is_empty() {
        notes.push("hypothesis fails at every sample; direct residuals only".to_string());
        Verdict::Inapplicable
    } else {
        if skipped > 0 {
            notes.push(format!("{skipped} samples fail the hypothesis and were skipped"));
        }
        let identity_ok = identity.as_ref().is_none_or(|c| c.holds);
        if property_holds && equivalence_ok && identity_ok && worst_condition_residual < tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    };
    if !equivalence_ok {
        let bad = applicable.iter().find(|p| !p.agree).map(|p| p.index);
        notes.push(format!(
            "condition and direct verdicts disagree (first at sample {})",
            bad.unwrap_or(0)
        ));
    }
    if id == TheoremId::Harmonic && applicable.iter().any(|p| p.hypothesis == Overall::HLagrangian) {
        notes.push("h-Lagrangian samples: harmonicity is forced, the direct check confirms it".to_string());
    }
    Ok(TheoremReport {
        id,
        title: id.title().to_string(),
        tolerance: tol,
        verdict,
        property_holds,
        equivalence_ok,
        applicable_points: applicable.len(),
        total_points: points.len(),
        worst_direct_residual,
        worst_condition_residual,
        identity,
        notes,
        records,
        points,
    })
}

/// Polarised `g(𝒜_X V, X) = 0`: `g(𝒜_{h_i} e_k, h_j) + g(𝒜_{h_j} e_k, h_i)`.
pub(crate) fn key_step_residual(ctx: &PointContext, rec: &mut Recorder) -> f64 {
    let (hs, vs) = (ctx.horizontal(), ctx.vertical());
    let mut worst: f64 = 0.0;
    for (k, v) in vs.iter().enumerate() {
        let av: Vec<DVector<f64>> = hs.iter().map(|h| ctx.geo.oneill_a(h, v)).collect();
        for i in 0..hs.len() {
            for j in i..hs.len() {
                let s = ctx.inner(&av[i], &hs[j]) + ctx.inner(&av[j], &hs[i]);
                worst = nan_max(worst, s.abs());
                rec.push("g(A_X V, X) = 0", || format!("X=h{i}+h{j}, V=e{k}"), s, 0.0, s.abs());
            }
        }
    }
    worst
}

fn horizontal_umbilic(lab: &Lab<'_>) -> Result<TheoremReport> {
    let tol = lab.tolerance;
    let outcomes: Vec<(PointSummary, Vec<ConditionRecord>)> = lab
        .contexts
        .par_iter()
        .map(|ctx| {
            let mut rec = Recorder::new(ctx.index, None);
            let key = key_step_residual(ctx, &mut rec);
            let r = horizontal_residuals(&ctx.geo);
            let umbilic = r.umbilic.min(r.geodesic);
            let h_perp = ctx.norm(&ctx.geo.horizontal_mean_curvature());
            let mut implication = true;
            if umbilic < tol {
                rec.push("umbilic => H_perp = 0", String::new, h_perp, 0.0, h_perp);
                rec.push("umbilic => geodesic", String::new, r.geodesic, 0.0, r.geodesic);
                implication = h_perp < tol && r.geodesic < tol;
            }
            let holds = key < KEY_STEP_TOLERANCE && implication;
            (
                PointSummary {
                    index: ctx.index,
                    point: ctx.geo.point.iter().cloned().collect(),
                    hypothesis: ctx.hypothesis(),
                    applicable: true,
                    direct_residual: key,
                    direct_holds: holds,
                    conditions: Vec::new(),
                    agree: true,
                },
                rec.records,
            )
        })
        .collect();
    let (points, recs): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let records: Vec<ConditionRecord> = recs.into_iter().flatten().collect();
    let property_holds = points.iter().all(|p| p.direct_holds);
    let umbilic_samples = records
        .iter()
        .filter(|r| r.condition == "umbilic => geodesic")
        .count();
    let mut notes = lab.notes.clone();
    notes.push(format!(
        "horizontal distribution umbilic at {umbilic_samples} of {} samples",
        points.len()
    ));
    Ok(TheoremReport {
        id: TheoremId::HorizontalUmbilic,
        title: TheoremId::HorizontalUmbilic.title().to_string(),
        tolerance: tol,
        verdict: if property_holds { Verdict::Pass } else { Verdict::Fail },
        property_holds,
        equivalence_ok: true,
        applicable_points: points.len(),
        total_points: points.len(),
        worst_direct_residual: points.iter().map(|p| p.direct_residual).fold(0.0, nan_max),
        worst_condition_residual: records
            .iter()
            .filter(|r| r.condition != "g(A_X V, X) = 0")
            .map(|r| r.residual)
            .fold(0.0, nan_max),
        identity: None,
        notes,
        records,
        points,
    })
}

fn nonexistence(lab: &Lab<'_>) -> Result<TheoremReport> {
    let tol = lab.tolerance;
    let flags = lab.point_flags()?;
    let product = product_from_flags(flags, tol);
    let mut points = Vec::with_capacity(flags.len());
    let mut records = Vec::new();
    for (ctx, f) in lab.contexts.iter().zip(flags) {
        let hyp = ctx.hypothesis();
        let applicable = hyp != Overall::None;
        let umbilic = f.horizontal.umbilic.min(f.horizontal.geodesic) < tol;
        let geodesic = f.horizontal.geodesic < tol;
        let forbidden = applicable && umbilic && !geodesic;
        if applicable {
            let mut rec = Recorder::new(ctx.index, None);
            rec.push(
                "horizontal umbilic and not geodesic",
                || format!("{hyp}"),
                f.horizontal.umbilic,
                f.horizontal.geodesic,
                if forbidden { 1.0 } else { 0.0 },
            );
            records.extend(rec.records);
        }
        points.push(PointSummary {
            index: ctx.index,
            point: ctx.geo.point.iter().cloned().collect(),
            hypothesis: hyp,
            applicable,
            direct_residual: f.horizontal.geodesic,
            direct_holds: !forbidden,
            conditions: Vec::new(),
            agree: true,
        });
    }
    let applicable = points.iter().filter(|p| p.applicable).count();
    let property_holds = points.iter().all(|p| p.direct_holds);
    let mut notes = lab.notes.clone();
    notes.push(format!("product type: {}", product.label));
    let verdict = if applicable == 0 {
        notes.push("no sample is h-anti-invariant or h-Lagrangian".to_string());
        Verdict::Inapplicable
    } else if property_holds {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(TheoremReport {
        id: TheoremId::Nonexistence,
        title: TheoremId::Nonexistence.title().to_string(),
        tolerance: tol,
        verdict,
        property_holds,
        equivalence_ok: true,
        applicable_points: applicable,
        total_points: points.len(),
        worst_direct_residual: points.iter().map(|p| p.direct_residual).fold(0.0, nan_max),
        worst_condition_residual: 0.0,
        identity: None,
        notes,
        records,
        points,
    })
}

/// The two sides of the integrability criterion and the bracket term they
/// differ by, at one point for explicit test vectors.
#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilitySides {
    pub tag: RTag,
    pub applicable: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `g(𝒱[X, Y], V)` from the Lie bracket of the projector extensions.
    pub bracket: f64,
    /// `|lhs − rhs − bracket|`.
    pub identity_residual: f64,
}

pub fn integrability_sides(
    fixture: &SubmersionFixture,
    triple: &StructureTriple,
    tag: RTag,
    x: &DVector<f64>,
    y: &DVector<f64>,
    v: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<IntegrabilitySides> {
    let ctx = PointContext::new(fixture, Some(triple), 0, p)?;
    for w in [x, y, v] {
        if w.len() != fixture.dim() {
            return Err(Error::DimensionMismatch(format!(
                "test vector has {} entries, expected {}",
                w.len(),
                fixture.dim()
            )));
        }
    }
    for w in [x, y] {
        let n = ctx.norm(w);
        let off = if n > 0.0 { ctx.norm(&ctx.geo.vert(w)) / n } else { 0.0 };
        if off > VERTICAL_ANGLE_TOLERANCE {
            return Err(Error::NotHorizontal(off));
        }
    }
    let s = ctx.geo.distance_to_vertical(v);
    if s > VERTICAL_ANGLE_TOLERANCE {
        return Err(Error::NotVertical(s));
    }
    let applicable = ctx.is_anti_invariant(tag);
    if !applicable {
        return Ok(IntegrabilitySides {
            tag,
            applicable,
            lhs: 0.0,
            rhs: 0.0,
            bracket: 0.0,
            identity_residual: 0.0,
        });
    }
    let (lhs, rhs) = sides(&ctx, tag, x, y, v);
    let bracket = bracket_term(&ctx, x, y, v);
    Ok(IntegrabilitySides {
        tag,
        applicable,
        lhs,
        rhs,
        bracket,
        identity_residual: (lhs - rhs - bracket).abs(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NonexistenceEntry {
    pub fixture: String,
    pub classification: Overall,
    pub product_type: ProductType,
    pub horizontal_umbilic: bool,
    pub horizontal_geodesic: bool,
    pub forbidden: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonexistenceSummary {
    pub entries: Vec<NonexistenceEntry>,
    pub consistent: bool,
}

/// Over every fixture: an h-anti-invariant or h-Lagrangian classification
/// never comes with a horizontal foliation that is umbilic but not geodesic.
/// A violation is an [`Error::Inconsistency`].
pub fn nonexistence_invariants(fixtures: &[Fixture]) -> Result<NonexistenceSummary> {
    let mut entries = Vec::with_capacity(fixtures.len());
    for f in fixtures {
        let points = f.submersion.sample_points()?;
        let classification = match &f.structure {
            Some(t) => classify(&f.submersion, t)?.overall,
            None => Overall::None,
        };
        let flags = sweep(&points, |i, p| point_flags(&f.submersion, i, p))?;
        let product = product_from_flags(&flags, DEFAULT_TOLERANCE);
        let horizontal_umbilic = product.horizontal.umbilic.holds;
        let horizontal_geodesic = product.horizontal.totally_geodesic.holds;
        let forbidden = classification != Overall::None && horizontal_umbilic && !horizontal_geodesic;
        if forbidden {
            return Err(Error::Inconsistency(format!(
                "{}: classified {classification} with a horizontal foliation that is umbilic but not totally geodesic",
                f.name
            )));
        }
        entries.push(NonexistenceEntry {
            fixture: f.name.clone(),
            classification,
            product_type: product.product_type,
            horizontal_umbilic,
            horizontal_geodesic,
            forbidden,
        });
    }
    Ok(NonexistenceSummary {
        entries,
        consistent: true,
    })
}

