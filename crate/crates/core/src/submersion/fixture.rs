use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::expr::{DomainBox, SmoothMapSpec};
use crate::riemann::MetricField;
use crate::sampling::SamplePlan;

/// A candidate submersion `F : (M, g_M) → (N, g_N)` on one chart of each
/// manifold, together with the points it is to be checked at.
#[derive(Clone, Debug)]
pub struct SubmersionFixture {
    pub name: String,
    pub total: MetricField,
    pub base: MetricField,
    pub map: SmoothMapSpec,
    pub samples: SamplePlan,
}

impl SubmersionFixture {
    pub fn new(
        name: impl Into<String>,
        total: MetricField,
        base: MetricField,
        map: SmoothMapSpec,
    ) -> Result<Self> {
        if total.dim() != map.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "total metric is {}-dimensional but the map has {} variables",
                total.dim(),
                map.domain_dim
            )));
        }
        if base.dim() != map.codomain_dim {
            return Err(Error::DimensionMismatch(format!(
                "base metric is {}-dimensional but the map has {} components",
                base.dim(),
                map.codomain_dim
            )));
        }
        if map.codomain_dim > map.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "a map from dimension {} to {} cannot be a submersion",
                map.domain_dim, map.codomain_dim
            )));
        }
        Ok(SubmersionFixture {
            name: name.into(),
            total,
            base,
            map,
            samples: SamplePlan::default(),
        })
    }

    pub fn with_samples(mut self, samples: SamplePlan) -> Self {
        self.samples = samples;
        self
    }

    /// Dimension of the total space.
    pub fn dim(&self) -> usize {
        self.map.domain_dim
    }

    pub fn base_dim(&self) -> usize {
        self.map.codomain_dim
    }

    /// Fiber dimension `m = dim M − dim N`.
    pub fn vertical_dim(&self) -> usize {
        self.dim() - self.base_dim()
    }

    pub fn domain_box(&self) -> &DomainBox {
        &self.map.domain_box
    }

    pub fn sample_points(&self) -> Result<Vec<DVector<f64>>> {
        self.samples.points(self.domain_box())
    }
}
