//! Vertical/horizontal splitting of a submersion, the O'Neill tensors, the
//! second fundamental form of the map and its trace.

mod fixture;
mod geometry;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

pub use fixture::SubmersionFixture;
pub use geometry::{PointGeometry, SplitFrame, RANK_TOLERANCE};

use crate::error::{Error, Result};
use crate::linalg::FieldJet;
use crate::riemann::VectorField;

/// Vectors closer than this (as a sine) to the vertical space count as vertical.
pub const VERTICAL_ANGLE_TOLERANCE: f64 = 1e-8;
/// Isometry residual allowed by [`validate_submersion`].
pub const ISOMETRY_TOLERANCE: f64 = 1e-9;
/// Default verdict tolerance for tensor identities and theorem checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

pub fn split_at(fixture: &SubmersionFixture, p: &DVector<f64>) -> Result<SplitFrame> {
    Ok(PointGeometry::at(fixture, p)?.frame)
}

pub fn oneill_t(
    fixture: &SubmersionFixture,
    u: &DVector<f64>,
    v: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<DVector<f64>> {
    Ok(PointGeometry::at(fixture, p)?.oneill_t(u, v))
}

pub fn oneill_a(
    fixture: &SubmersionFixture,
    u: &DVector<f64>,
    v: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<DVector<f64>> {
    Ok(PointGeometry::at(fixture, p)?.oneill_a(u, v))
}

/// `𝒱∇_u v` for vertical `u`, `v`.
pub fn hat_nabla(
    fixture: &SubmersionFixture,
    u: &DVector<f64>,
    v: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<DVector<f64>> {
    let geo = PointGeometry::at(fixture, p)?;
    for w in [u, v] {
        let s = geo.distance_to_vertical(w);
        if s > VERTICAL_ANGLE_TOLERANCE {
            return Err(Error::NotVertical(s));
        }
    }
    Ok(geo.hat_nabla_unchecked(u, v))
}

pub fn second_fundamental_form(
    fixture: &SubmersionFixture,
    u: &DVector<f64>,
    v: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<DVector<f64>> {
    Ok(PointGeometry::at(fixture, p)?.second_fundamental_form(u, v))
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanCurvatureReport {
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub point: DVector<f64>,
    /// `H = (1/m) Σ 𝒯_{e_i} e_i`.
    #[serde(rename = "H", serialize_with = "crate::report::ser_vector")]
    pub h: DVector<f64>,
    /// `H^⊥ = (1/n) Σ 𝒜_{v_i} v_i`.
    #[serde(rename = "H_perp", serialize_with = "crate::report::ser_vector")]
    pub h_perp: DVector<f64>,
}

pub fn mean_curvatures(fixture: &SubmersionFixture, p: &DVector<f64>) -> Result<MeanCurvatureReport> {
    let geo = PointGeometry::at(fixture, p)?;
    Ok(MeanCurvatureReport {
        point: p.clone(),
        h: geo.mean_curvature(),
        h_perp: geo.horizontal_mean_curvature(),
    })
}

/// Evaluates `f` at every point in parallel; results keep the point order.
pub(crate) fn sweep<T: Send>(
    points: &[DVector<f64>],
    f: impl Fn(usize, &DVector<f64>) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| f(i, p))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct IsometryRecord {
    pub index: usize,
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub point: DVector<f64>,
    pub residual: f64,
    /// Singular values of `F_*` restricted to the horizontal space.
    pub horizontal_singular_values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankFailure {
    pub index: usize,
    pub point: Vec<f64>,
    pub rank: usize,
    pub expected: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubmersionValidation {
    pub tolerance: f64,
    pub is_submersion: bool,
    pub is_riemannian: bool,
    pub worst_index: Option<usize>,
    pub worst_residual: f64,
    pub rank_failure: Option<RankFailure>,
    pub points: Vec<IsometryRecord>,
}

/// Checks full rank and the horizontal isometry condition at every sample.
pub fn validate_submersion(fixture: &SubmersionFixture) -> Result<SubmersionValidation> {
    validate_at(fixture, &fixture.sample_points()?)
}

pub fn validate_at(fixture: &SubmersionFixture, points: &[DVector<f64>]) -> Result<SubmersionValidation> {
    let outcomes = sweep(points, |i, p| match PointGeometry::at(fixture, p) {
        Ok(geo) => Ok(Ok(isometry_record(i, &geo))),
        Err(Error::NotSubmersion { rank, expected }) => Ok(Err(RankFailure {
            index: i,
            point: p.iter().cloned().collect(),
            rank,
            expected,
        })),
        Err(e) => Err(e),
    })?;
    let mut records = Vec::new();
    let mut rank_failure = None;
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(f) => {
                if rank_failure.is_none() {
                    rank_failure = Some(f);
                }
            }
        }
    }
    let worst = records
        .iter()
        .max_by(|a, b| a.residual.total_cmp(&b.residual).then(b.index.cmp(&a.index)));
    let worst_residual = worst.map_or(0.0, |r| r.residual);
    let is_submersion = rank_failure.is_none();
    Ok(SubmersionValidation {
        tolerance: ISOMETRY_TOLERANCE,
        is_submersion,
        is_riemannian: is_submersion && worst_residual < ISOMETRY_TOLERANCE,
        worst_index: worst.map(|r| r.index),
        worst_residual,
        rank_failure,
        points: records,
    })
}

fn isometry_record(index: usize, geo: &PointGeometry) -> IsometryRecord {
    let h = &geo.frame.horizontal_basis;
    let pushed = &geo.jacobian.value * h;
    let gram = pushed.transpose() * &geo.base_metric * &pushed;
    let n = gram.nrows();
    let residual = (&gram - DMatrix::identity(n, n)).abs().max();
    let sym = (&gram + gram.transpose()) * 0.5;
    let mut sv: Vec<f64> = sym
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    IsometryRecord {
        index,
        point: geo.point.clone(),
        residual: if n == 0 { 0.0 } else { residual },
        horizontal_singular_values: sv,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicRecord {
    pub index: usize,
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub point: DVector<f64>,
    /// `trace(∇F_*)` in base coordinates.
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub trace: DVector<f64>,
    pub trace_norm: f64,
    /// `−m F_*(H)`, the same quantity through the fibre mean curvature.
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub mean_curvature_route: DVector<f64>,
    pub route_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicityReport {
    pub tolerance: f64,
    pub is_harmonic: bool,
    pub worst_trace_residual: f64,
    pub worst_route_gap: f64,
    pub points: Vec<HarmonicRecord>,
}

pub fn harmonicity(fixture: &SubmersionFixture) -> Result<HarmonicityReport> {
    harmonicity_at(fixture, &fixture.sample_points()?, DEFAULT_TOLERANCE)
}

pub fn harmonicity_at(
    fixture: &SubmersionFixture,
    points: &[DVector<f64>],
    tol: f64,
) -> Result<HarmonicityReport> {
    let m = fixture.vertical_dim() as f64;
    let records = sweep(points, |index, p| {
        let geo = PointGeometry::at(fixture, p)?;
        let trace = geo.tension();
        let route = -geo.push(&geo.mean_curvature()) * m;
        Ok(HarmonicRecord {
            index,
            point: p.clone(),
            trace_norm: geo.base_norm(&trace),
            route_gap: geo.base_norm(&(&trace - &route)),
            trace,
            mean_curvature_route: route,
        })
    })?;
    let worst_trace_residual = records.iter().map(|r| r.trace_norm).fold(0.0, f64::max);
    let worst_route_gap = records.iter().map(|r| r.route_gap).fold(0.0, f64::max);
    Ok(HarmonicityReport {
        tolerance: tol,
        is_harmonic: worst_trace_residual < tol,
        worst_trace_residual,
        worst_route_gap,
        points: records,
    })
}

/// Which projector extends a tangent vector to a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    Vertical,
    Horizontal,
}

/// The field `q ↦ P(q) c` for the vertical or horizontal projector `P`.
pub struct ProjectedField<'a> {
    pub fixture: &'a SubmersionFixture,
    pub projection: Projection,
    pub constant: DVector<f64>,
}

impl VectorField for ProjectedField<'_> {
    fn dim(&self) -> usize {
        self.fixture.dim()
    }

    fn jet(&self, p: &DVector<f64>) -> Result<FieldJet> {
        let geo = PointGeometry::at(self.fixture, p)?;
        Ok(match self.projection {
            Projection::Vertical => geo.vertical_field(&self.constant),
            Projection::Horizontal => geo.horizontal_field(&self.constant),
        })
    }
}

/// `[A, B]` at a point from the two field jets.
pub fn bracket(a: &FieldJet, b: &FieldJet) -> DVector<f64> {
    &b.d * &a.value - &a.d * &b.value
}
