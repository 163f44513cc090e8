//! Numerical checks of the equivalence theorems: every condition is
//! evaluated next to the geometric property it is claimed to be equivalent
//! to, and the two verdicts are compared point by point.

mod context;
mod foliation;
mod identities;
mod theorems;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DVector;
use serde::Serialize;

pub use context::PointContext;
pub use foliation::{
    classify_product, distribution_residuals, foliation_flags, foliation_flags_at,
    horizontal_residuals, point_flags, product_classification, product_classification_at,
    spheric_residual, vertical_residuals, Distribution, DistributionResiduals, Flag,
    FoliationFlags, PointFlags, ProductClassification, ProductType, SPHERIC_STEP,
    SPHERIC_TOLERANCE,
};
pub use identities::{oneill_identities, structure_identities};
pub use theorems::{
    integrability_sides, nonexistence_invariants, IntegrabilitySides, NonexistenceEntry,
    NonexistenceSummary, IDENTITY_TOLERANCE, KEY_STEP_TOLERANCE,
};

use crate::classify::Overall;
use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::quaternionic::{RTag, StructureTriple};
use crate::submersion::{sweep, SubmersionFixture, DEFAULT_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    HorizontalIntegrability,
    HorizontalGeodesic,
    VerticalGeodesic,
    TotallyGeodesic,
    Harmonic,
    RiemannianProduct,
    TwistedProduct,
    VerticalUmbilic,
    HorizontalUmbilic,
    Nonexistence,
    OneillIdentities,
    StructureIdentities,
}

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::HorizontalIntegrability,
        TheoremId::HorizontalGeodesic,
        TheoremId::VerticalGeodesic,
        TheoremId::TotallyGeodesic,
        TheoremId::Harmonic,
        TheoremId::RiemannianProduct,
        TheoremId::TwistedProduct,
        TheoremId::VerticalUmbilic,
        TheoremId::HorizontalUmbilic,
        TheoremId::Nonexistence,
        TheoremId::OneillIdentities,
        TheoremId::StructureIdentities,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::HorizontalIntegrability => "horizontal-integrability",
            TheoremId::HorizontalGeodesic => "horizontal-geodesic",
            TheoremId::VerticalGeodesic => "vertical-geodesic",
            TheoremId::TotallyGeodesic => "totally-geodesic",
            TheoremId::Harmonic => "harmonic",
            TheoremId::RiemannianProduct => "riemannian-product",
            TheoremId::TwistedProduct => "twisted-product",
            TheoremId::VerticalUmbilic => "vertical-umbilic",
            TheoremId::HorizontalUmbilic => "horizontal-umbilic",
            TheoremId::Nonexistence => "nonexistence",
            TheoremId::OneillIdentities => "oneill-identities",
            TheoremId::StructureIdentities => "structure-identities",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            TheoremId::HorizontalIntegrability => "integrability of the horizontal distribution",
            TheoremId::HorizontalGeodesic => "horizontal distribution defines a totally geodesic foliation",
            TheoremId::VerticalGeodesic => "fibres form a totally geodesic foliation",
            TheoremId::TotallyGeodesic => "F is a totally geodesic map",
            TheoremId::Harmonic => "F is harmonic",
            TheoremId::RiemannianProduct => "M is locally a Riemannian product of the two foliations",
            TheoremId::TwistedProduct => "M is locally a twisted product of the two foliations",
            TheoremId::VerticalUmbilic => "fibres form a totally umbilic foliation",
            TheoremId::HorizontalUmbilic => "a totally umbilic horizontal foliation is totally geodesic",
            TheoremId::Nonexistence => "no h-anti-invariant or h-Lagrangian map with a non-trivial double-twisted splitting",
            TheoremId::OneillIdentities => "algebraic identities of the O'Neill tensors and of the second fundamental form",
            TheoremId::StructureIdentities => "decomposition identities for a parallel anti-invariant structure",
        }
    }

    /// Whether the check compares a condition against a geometric property.
    pub fn is_equivalence(self) -> bool {
        !matches!(
            self,
            TheoremId::HorizontalUmbilic
                | TheoremId::Nonexistence
                | TheoremId::OneillIdentities
                | TheoremId::StructureIdentities
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inapplicable => "inapplicable",
        })
    }
}

/// The worst test-vector combination of one condition family at one point.
/// For vector equations `lhs` and `rhs` are g-norms of the two sides.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionRecord {
    pub index: usize,
    pub tag: Option<RTag>,
    pub condition: String,
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RCondition {
    pub tag: RTag,
    pub residual: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointSummary {
    pub index: usize,
    pub point: Vec<f64>,
    pub hypothesis: Overall,
    pub applicable: bool,
    pub direct_residual: f64,
    pub direct_holds: bool,
    pub conditions: Vec<RCondition>,
    /// Every condition verdict equals the direct verdict.
    pub agree: bool,
}

/// The proof identity behind the integrability criterion:
/// `lhs − rhs = g(𝒱[X, Y], V)`.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub tolerance: f64,
    pub worst_residual: f64,
    /// Largest `|lhs|`, `|rhs|` or `|g([X, Y], V)|` seen.
    pub largest_term: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub id: TheoremId,
    pub title: String,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// The geometric property holds at every applicable sample, or at every
    /// sample when none is applicable.
    pub property_holds: bool,
    /// Condition and direct verdicts agree at every applicable sample.
    pub equivalence_ok: bool,
    pub applicable_points: usize,
    pub total_points: usize,
    pub worst_direct_residual: f64,
    pub worst_condition_residual: f64,
    pub identity: Option<IdentityCheck>,
    pub notes: Vec<String>,
    pub records: Vec<ConditionRecord>,
    pub points: Vec<PointSummary>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// A fixture with its optional structure, evaluated once per sample.
pub struct Lab<'a> {
    pub fixture: &'a SubmersionFixture,
    pub triple: Option<&'a StructureTriple>,
    pub tolerance: f64,
    pub contexts: Vec<PointContext>,
    pub notes: Vec<String>,
    flags: OnceLock<Vec<PointFlags>>,
}

impl<'a> Lab<'a> {
    pub fn new(
        fixture: &'a SubmersionFixture,
        triple: Option<&'a StructureTriple>,
        points: &[DVector<f64>],
        tolerance: f64,
    ) -> Result<Self> {
        let mut notes = Vec::new();
        let triple = match triple {
            Some(t) if t.dim != fixture.dim() => {
                return Err(Error::DimensionMismatch(format!(
                    "structure dimension {} differs from total dimension {}",
                    t.dim,
                    fixture.dim()
                )))
            }
            Some(t) => Some(t),
            None => {
                notes.push("no structure triple: direct geometric checks only".to_string());
                None
            }
        };
        let contexts = sweep(points, |i, p| PointContext::new(fixture, triple, i, p))?;
        Ok(Lab {
            fixture,
            triple,
            tolerance,
            contexts,
            notes,
            flags: OnceLock::new(),
        })
    }

    /// Lab over the fixture's own sample plan at the default tolerance.
    pub fn for_fixture(fixture: &'a Fixture) -> Result<Self> {
        let points = fixture.submersion.sample_points()?;
        Lab::new(&fixture.submersion, fixture.structure.as_ref(), &points, DEFAULT_TOLERANCE)
    }

    /// Foliation residuals at every sample, computed once.
    pub fn point_flags(&self) -> Result<&[PointFlags]> {
        if let Some(f) = self.flags.get() {
            return Ok(f);
        }
        let points: Vec<DVector<f64>> = self.contexts.iter().map(|c| c.geo.point.clone()).collect();
        let flags = sweep(&points, |i, p| point_flags(self.fixture, i, p))?;
        Ok(self.flags.get_or_init(|| flags))
    }

    pub fn product(&self) -> Result<ProductClassification> {
        Ok(foliation::product_from_flags(self.point_flags()?, self.tolerance))
    }

    pub fn run(&self, id: TheoremId) -> Result<TheoremReport> {
        theorems::run(self, id)
    }

    pub fn run_all(&self) -> Result<Vec<TheoremReport>> {
        TheoremId::ALL.iter().map(|id| self.run(*id)).collect()
    }
}
