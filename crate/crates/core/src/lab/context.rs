use nalgebra::{DMatrix, DVector};

use crate::classify::{classify_geometry, Overall, PointClassification};
use crate::error::Result;
use crate::linalg::{FieldJet, MatJet};
use crate::quaternionic::{ROperators, RTag, StructureTriple};
use crate::submersion::{PointGeometry, SubmersionFixture};

/// Geometry, classification and structure operators at one sample.
#[derive(Clone, Debug)]
pub struct PointContext {
    pub index: usize,
    pub geo: PointGeometry,
    pub class: Option<PointClassification>,
    pub r_jets: Option<[MatJet; 3]>,
    pub ops: Option<[ROperators; 3]>,
}

impl PointContext {
    pub fn new(
        fixture: &SubmersionFixture,
        triple: Option<&StructureTriple>,
        index: usize,
        p: &DVector<f64>,
    ) -> Result<Self> {
        let geo = PointGeometry::at(fixture, p)?;
        let (class, r_jets, ops) = match triple {
            Some(t) => {
                let class = classify_geometry(&geo, t, index)?;
                let jets = t.jets(p)?;
                let ops = RTag::ALL.map(|tag| {
                    ROperators::new(tag, jets[tag.index()].value.clone(), &geo.frame, geo.g().clone())
                });
                (Some(class), Some(jets), Some(ops))
            }
            None => (None, None, None),
        };
        Ok(PointContext {
            index,
            geo,
            class,
            r_jets,
            ops,
        })
    }

    pub fn hypothesis(&self) -> Overall {
        self.class.as_ref().map_or(Overall::None, |c| c.overall)
    }

    pub fn is_anti_invariant(&self, tag: RTag) -> bool {
        self.class.as_ref().is_some_and(|c| c.is_anti_invariant(tag))
    }

    pub fn vertical(&self) -> Vec<DVector<f64>> {
        columns(&self.geo.frame.vertical_basis)
    }

    pub fn horizontal(&self) -> Vec<DVector<f64>> {
        columns(&self.geo.frame.horizontal_basis)
    }

    pub fn full(&self) -> Vec<DVector<f64>> {
        columns(&self.geo.frame.full_basis())
    }

    /// Operators for `tag`; only call when a structure is present.
    pub fn op(&self, tag: RTag) -> &ROperators {
        &self.ops.as_ref().expect("structure operators")[tag.index()]
    }

    pub fn r(&self, tag: RTag, x: &DVector<f64>) -> DVector<f64> {
        self.op(tag).apply(x)
    }

    /// The field `R W`.
    pub fn r_field(&self, tag: RTag, w: &FieldJet) -> FieldJet {
        self.r_jets.as_ref().expect("structure jets")[tag.index()].apply(w)
    }

    /// The field `B_R Y`.
    pub fn b_field(&self, tag: RTag, y: &FieldJet) -> FieldJet {
        self.geo.vertical_part(&self.r_field(tag, y))
    }

    /// The field `C_R Y`.
    pub fn c_field(&self, tag: RTag, y: &FieldJet) -> FieldJet {
        self.geo.horizontal_part(&self.r_field(tag, y))
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.geo.inner(u, v)
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.geo.norm(u)
    }

    pub fn mean_curvature(&self) -> DVector<f64> {
        self.geo.mean_curvature()
    }
}

pub(crate) fn columns(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    m.column_iter().map(|c| c.into_owned()).collect()
}

