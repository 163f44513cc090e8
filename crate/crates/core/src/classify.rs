//! Per-point and sample-wide classification of a submersion with a structure
//! triple as h-anti-invariant, h-Lagrangian, or neither.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{pivoted_orthonormal, subspace_gap};
use crate::quaternionic::{RTag, StructureTriple, CLASSIFICATION_TOLERANCE};
use crate::submersion::{sweep, PointGeometry, SplitFrame, SubmersionFixture};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RVerdict {
    /// `R(ker F_*)` lies in the horizontal space.
    AntiInvariant,
    /// `R(ker F_*) = ker F_*`.
    LagrangianVertical,
    InvariantMixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overall {
    HAntiInvariant,
    HLagrangian,
    None,
}

impl std::fmt::Display for Overall {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Overall::HAntiInvariant => "h-anti-invariant",
            Overall::HLagrangian => "h-Lagrangian",
            Overall::None => "none",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RMeasure {
    pub tag: RTag,
    /// Sine of the largest principal angle from `R(ker)` to the horizontal space.
    pub horizontal_gap: f64,
    /// Sine of the largest principal angle from `R(ker)` to `ker`.
    pub vertical_gap: f64,
    pub verdict: RVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointClassification {
    pub index: usize,
    pub point: Vec<f64>,
    pub per_r: Vec<RMeasure>,
    pub overall: Overall,
}

impl PointClassification {
    pub fn verdict(&self, tag: RTag) -> RVerdict {
        self.per_r[tag.index()].verdict
    }

    pub fn is_anti_invariant(&self, tag: RTag) -> bool {
        self.verdict(tag) == RVerdict::AntiInvariant
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub vertical_dim: usize,
    pub horizontal_dim: usize,
    /// With `m = n` all three structures cannot map `ker` into its complement.
    pub h_anti_invariant_excluded: bool,
    /// `I(ker) = ker`, `J(ker) = ker`, `K(ker) = ker^⊥` can never hold with `m = n`.
    pub ij_vertical_k_horizontal_excluded: bool,
    pub notes: Vec<String>,
}

/// Dimension constraints that rule out patterns before measuring anything.
pub fn dimension_obstruction(fixture: &SubmersionFixture) -> ObstructionReport {
    let m = fixture.vertical_dim();
    let n = fixture.base_dim();
    let equal = m == n;
    let mut notes = Vec::new();
    if equal {
        notes.push(format!(
            "dim ker = dim horizontal = {m}: h-anti-invariance would force K(ker) = IJ(ker) = ker"
        ));
        notes.push(
            "the pattern I(ker) = ker, J(ker) = ker, K(ker) = horizontal is impossible".to_string(),
        );
    } else if m > n {
        notes.push(format!(
            "dim ker = {m} > dim horizontal = {n}: no R can map ker into the horizontal space"
        ));
    }
    ObstructionReport {
        vertical_dim: m,
        horizontal_dim: n,
        h_anti_invariant_excluded: equal || m > n,
        ij_vertical_k_horizontal_excluded: equal,
        notes,
    }
}

fn measure(tag: RTag, r: &DMatrix<f64>, frame: &SplitFrame, g: &DMatrix<f64>) -> RMeasure {
    let m = frame.vertical_dim();
    let image = pivoted_orthonormal(&(r * &frame.vertical_basis), g, m);
    let horizontal_gap = subspace_gap(&image, &frame.horizontal_basis, g);
    let vertical_gap = subspace_gap(&image, &frame.vertical_basis, g);
    let verdict = if horizontal_gap < CLASSIFICATION_TOLERANCE {
        RVerdict::AntiInvariant
    } else if vertical_gap < CLASSIFICATION_TOLERANCE {
        RVerdict::LagrangianVertical
    } else {
        RVerdict::InvariantMixed
    };
    RMeasure {
        tag,
        horizontal_gap,
        vertical_gap,
        verdict,
    }
}

/// Classifies one point given the structure matrices there.
pub fn classify_frame(
    index: usize,
    frame: &SplitFrame,
    structures: &[DMatrix<f64>; 3],
    g: &DMatrix<f64>,
) -> Result<PointClassification> {
    let m = frame.vertical_dim();
    let n = frame.horizontal_dim();
    let per_r: Vec<RMeasure> = RTag::ALL
        .iter()
        .map(|t| measure(*t, &structures[t.index()], frame, g))
        .collect();
    let v = |t: RTag| per_r[t.index()].verdict;
    use RVerdict::*;
    let all_anti = RTag::ALL.iter().all(|t| v(*t) == AntiInvariant);
    if m > 0 && m == n && all_anti {
        return Err(Error::Inconsistency(format!(
            "all of I, J, K measured anti-invariant with dim ker = dim horizontal = {m} at sample {index}"
        )));
    }
    if m > 0
        && m == n
        && v(RTag::I) == LagrangianVertical
        && v(RTag::J) == LagrangianVertical
        && v(RTag::K) == AntiInvariant
    {
        return Err(Error::Inconsistency(format!(
            "I and J preserve ker while K maps it to the horizontal space at sample {index}"
        )));
    }
    let overall = if all_anti && m < n {
        Overall::HAntiInvariant
    } else if m == n
        && v(RTag::I) == AntiInvariant
        && v(RTag::K) == AntiInvariant
        && v(RTag::J) == LagrangianVertical
    {
        Overall::HLagrangian
    } else {
        Overall::None
    };
    Ok(PointClassification {
        index,
        point: frame.point.iter().cloned().collect(),
        per_r,
        overall,
    })
}

pub fn classify_point(
    fixture: &SubmersionFixture,
    triple: &StructureTriple,
    index: usize,
    p: &DVector<f64>,
) -> Result<PointClassification> {
    let geo = PointGeometry::at(fixture, p)?;
    classify_geometry(&geo, triple, index)
}

pub fn classify_geometry(
    geo: &PointGeometry,
    triple: &StructureTriple,
    index: usize,
) -> Result<PointClassification> {
    let structures = triple.at(&geo.point)?;
    classify_frame(index, &geo.frame, &structures, geo.g())
}

#[derive(Clone, Debug, Serialize)]
pub struct RSummary {
    pub tag: RTag,
    /// Common verdict over all samples, or `invariant-mixed` when they disagree.
    pub verdict: RVerdict,
    pub uniform: bool,
    pub worst_horizontal_gap: f64,
    pub worst_vertical_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationVerdict {
    pub overall: Overall,
    pub tolerance: f64,
    pub per_r: Vec<RSummary>,
    /// Largest principal-angle sine among the relations the verdict relies on.
    pub worst_residual: f64,
    /// First sample whose pointwise verdict differs from the others.
    pub offending_index: Option<usize>,
    pub offending_point: Option<Vec<f64>>,
    pub obstruction: ObstructionReport,
    pub points: Vec<PointClassification>,
}

pub fn classify(fixture: &SubmersionFixture, triple: &StructureTriple) -> Result<ClassificationVerdict> {
    classify_at(fixture, triple, &fixture.sample_points()?)
}

pub fn classify_at(
    fixture: &SubmersionFixture,
    triple: &StructureTriple,
    points: &[DVector<f64>],
) -> Result<ClassificationVerdict> {
    if !triple.dim.is_multiple_of(4) {
        return Err(Error::StructureDimension(triple.dim));
    }
    if triple.dim != fixture.dim() {
        return Err(Error::DimensionMismatch(format!(
            "structure dimension {} differs from total dimension {}",
            triple.dim,
            fixture.dim()
        )));
    }
    let obstruction = dimension_obstruction(fixture);
    let pts = sweep(points, |i, p| classify_point(fixture, triple, i, p))?;
    Ok(summarize(pts, obstruction))
}

pub(crate) fn summarize(pts: Vec<PointClassification>, obstruction: ObstructionReport) -> ClassificationVerdict {
    let first = pts.first().map(|p| p.overall).unwrap_or(Overall::None);
    let offending = pts.iter().find(|p| p.overall != first);
    let overall = if offending.is_some() { Overall::None } else { first };
    let per_r: Vec<RSummary> = RTag::ALL
        .iter()
        .map(|t| {
            let verdicts: Vec<RVerdict> = pts.iter().map(|p| p.verdict(*t)).collect();
            let uniform = verdicts.windows(2).all(|w| w[0] == w[1]);
            RSummary {
                tag: *t,
                verdict: if uniform {
                    verdicts.first().cloned().unwrap_or(RVerdict::InvariantMixed)
                } else {
                    RVerdict::InvariantMixed
                },
                uniform,
                worst_horizontal_gap: pts
                    .iter()
                    .map(|p| p.per_r[t.index()].horizontal_gap)
                    .fold(0.0, f64::max),
                worst_vertical_gap: pts
                    .iter()
                    .map(|p| p.per_r[t.index()].vertical_gap)
                    .fold(0.0, f64::max),
            }
        })
        .collect();
    let worst_residual = match overall {
        Overall::HAntiInvariant => per_r.iter().map(|s| s.worst_horizontal_gap).fold(0.0, f64::max),
        Overall::HLagrangian => per_r[0]
            .worst_horizontal_gap
            .max(per_r[2].worst_horizontal_gap)
            .max(per_r[1].worst_vertical_gap),
        Overall::None => per_r
            .iter()
            .map(|s| s.worst_horizontal_gap.min(s.worst_vertical_gap))
            .fold(0.0, f64::max),
    };
    ClassificationVerdict {
        overall,
        tolerance: CLASSIFICATION_TOLERANCE,
        worst_residual,
        offending_index: offending.map(|p| p.index),
        offending_point: offending.map(|p| p.point.clone()),
        per_r,
        obstruction,
        points: pts,
    }
}
