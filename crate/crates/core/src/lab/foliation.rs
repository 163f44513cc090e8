use nalgebra::DVector;
use serde::Serialize;

use super::context::columns;
use crate::error::Result;
use crate::submersion::{sweep, PointGeometry, SubmersionFixture, DEFAULT_TOLERANCE};

/// Tolerance for the spheric flag, whose mean-curvature derivative is taken
/// by central differences.
pub const SPHERIC_TOLERANCE: f64 = 1e-4;
/// Central-difference step for `∇_b H`.
pub const SPHERIC_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    /// `ker F_*`.
    Vertical,
    /// `(ker F_*)^⊥`.
    Horizontal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Flag {
    pub holds: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoliationFlags {
    pub distribution: Distribution,
    pub tolerance: f64,
    pub spheric_tolerance: f64,
    pub totally_geodesic: Flag,
    pub umbilic: Flag,
    /// Holds only together with `umbilic`; the residual is the derivative
    /// term alone.
    pub spheric: Flag,
    /// Sample with the largest umbilic residual.
    pub worst_index: Option<usize>,
    pub points: usize,
}

/// Pointwise residuals of one distribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DistributionResiduals {
    /// `max ‖complement part of ∇_{b_i} b_j‖`.
    pub geodesic: f64,
    /// `max ‖h(b_i, b_j) − δ_ij H‖`.
    pub umbilic: f64,
}

/// `𝒯_{e_i} e_j` over the vertical frame.
pub fn vertical_residuals(geo: &PointGeometry) -> DistributionResiduals {
    let basis = columns(&geo.frame.vertical_basis);
    residuals(geo, &basis, geo.mean_curvature(), |a, b| geo.oneill_t(a, b))
}

/// `𝒜_{v_i} v_j` over the horizontal frame.
pub fn horizontal_residuals(geo: &PointGeometry) -> DistributionResiduals {
    let basis = columns(&geo.frame.horizontal_basis);
    residuals(geo, &basis, geo.horizontal_mean_curvature(), |a, b| geo.oneill_a(a, b))
}

fn residuals(
    geo: &PointGeometry,
    basis: &[DVector<f64>],
    mean: DVector<f64>,
    h: impl Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64>,
) -> DistributionResiduals {
    let mut out = DistributionResiduals::default();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let v = h(a, b);
            out.geodesic = out.geodesic.max(geo.norm(&v));
            let u = if i == j { &v - &mean } else { v };
            out.umbilic = out.umbilic.max(geo.norm(&u));
        }
    }
    out
}

pub fn distribution_residuals(geo: &PointGeometry, d: Distribution) -> DistributionResiduals {
    match d {
        Distribution::Vertical => vertical_residuals(geo),
        Distribution::Horizontal => horizontal_residuals(geo),
    }
}

fn mean_of(geo: &PointGeometry, d: Distribution) -> DVector<f64> {
    match d {
        Distribution::Vertical => geo.mean_curvature(),
        Distribution::Horizontal => geo.horizontal_mean_curvature(),
    }
}

/// `max_b ‖complement part of ∇_b H‖` over the distribution's frame, with
/// `H` differentiated by central differences through the full pipeline.
pub fn spheric_residual(
    fixture: &SubmersionFixture,
    geo: &PointGeometry,
    d: Distribution,
) -> Result<f64> {
    let basis = match d {
        Distribution::Vertical => &geo.frame.vertical_basis,
        Distribution::Horizontal => &geo.frame.horizontal_basis,
    };
    let h0 = mean_of(geo, d);
    let mut worst: f64 = 0.0;
    for b in basis.column_iter() {
        let b = b.into_owned();
        let plus = PointGeometry::at_unchecked(fixture, &(&geo.point + &b * SPHERIC_STEP))?;
        let minus = PointGeometry::at_unchecked(fixture, &(&geo.point - &b * SPHERIC_STEP))?;
        let dh = (mean_of(&plus, d) - mean_of(&minus, d)) / (2.0 * SPHERIC_STEP);
        let cov = dh + geo.christoffel.contract(&b, &h0);
        let off = match d {
            Distribution::Vertical => geo.horiz(&cov),
            Distribution::Horizontal => geo.vert(&cov),
        };
        worst = worst.max(geo.norm(&off));
    }
    Ok(worst)
}

/// Residuals of both distributions at one sample.
#[derive(Clone, Debug, Serialize)]
pub struct PointFlags {
    pub index: usize,
    pub point: Vec<f64>,
    pub vertical: DistributionResiduals,
    pub vertical_spheric: f64,
    pub horizontal: DistributionResiduals,
    pub horizontal_spheric: f64,
}

pub fn point_flags(fixture: &SubmersionFixture, index: usize, p: &DVector<f64>) -> Result<PointFlags> {
    let geo = PointGeometry::at(fixture, p)?;
    Ok(PointFlags {
        index,
        point: p.iter().cloned().collect(),
        vertical: vertical_residuals(&geo),
        vertical_spheric: spheric_residual(fixture, &geo, Distribution::Vertical)?,
        horizontal: horizontal_residuals(&geo),
        horizontal_spheric: spheric_residual(fixture, &geo, Distribution::Horizontal)?,
    })
}

fn aggregate(flags: &[PointFlags], d: Distribution, tol: f64) -> FoliationFlags {
    let pick = |f: &PointFlags| match d {
        Distribution::Vertical => (f.vertical, f.vertical_spheric),
        Distribution::Horizontal => (f.horizontal, f.horizontal_spheric),
    };
    let mut geodesic: f64 = 0.0;
    let mut umbilic: f64 = 0.0;
    let mut spheric: f64 = 0.0;
    let mut worst_index = None;
    for f in flags {
        let (r, s) = pick(f);
        geodesic = geodesic.max(r.geodesic);
        // a totally geodesic point is umbilic with H = 0
        let u = r.umbilic.min(r.geodesic);
        if worst_index.is_none() || u > umbilic {
            worst_index = Some(f.index);
        }
        umbilic = umbilic.max(u);
        spheric = spheric.max(s);
    }
    let geodesic_holds = geodesic < tol;
    let umbilic_holds = geodesic_holds || umbilic < tol;
    FoliationFlags {
        distribution: d,
        tolerance: tol,
        spheric_tolerance: SPHERIC_TOLERANCE,
        totally_geodesic: Flag {
            holds: geodesic_holds,
            residual: geodesic,
        },
        umbilic: Flag {
            holds: umbilic_holds,
            residual: umbilic,
        },
        spheric: Flag {
            holds: umbilic_holds && spheric < SPHERIC_TOLERANCE,
            residual: spheric,
        },
        worst_index,
        points: flags.len(),
    }
}

pub fn foliation_flags(fixture: &SubmersionFixture, d: Distribution) -> Result<FoliationFlags> {
    foliation_flags_at(fixture, d, &fixture.sample_points()?, DEFAULT_TOLERANCE)
}

pub fn foliation_flags_at(
    fixture: &SubmersionFixture,
    d: Distribution,
    points: &[DVector<f64>],
    tol: f64,
) -> Result<FoliationFlags> {
    let flags = sweep(points, |i, p| point_flags(fixture, i, p))?;
    Ok(aggregate(&flags, d, tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProductType {
    RiemannianProduct,
    Warped,
    Twisted,
    DoubleTwisted,
    NotPerpendicularOrNone,
}

impl std::fmt::Display for ProductType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProductType::RiemannianProduct => "Riemannian product",
            ProductType::Warped => "warped product",
            ProductType::Twisted => "twisted product",
            ProductType::DoubleTwisted => "double-twisted product",
            ProductType::NotPerpendicularOrNone => "none",
        })
    }
}

/// Product type of `M_{(ker F_*)^⊥} × M_{ker F_*}` suggested by the flags.
#[derive(Clone, Debug, Serialize)]
pub struct ProductClassification {
    pub product_type: ProductType,
    /// Sample flags cannot certify a local product decomposition.
    pub label: String,
    pub horizontal: FoliationFlags,
    pub vertical: FoliationFlags,
}

pub fn classify_product(horizontal: &FoliationFlags, vertical: &FoliationFlags) -> ProductType {
    let h_geo = horizontal.totally_geodesic.holds;
    if h_geo && vertical.totally_geodesic.holds {
        ProductType::RiemannianProduct
    } else if h_geo && vertical.spheric.holds {
        ProductType::Warped
    } else if h_geo && vertical.umbilic.holds {
        ProductType::Twisted
    } else if horizontal.umbilic.holds && vertical.umbilic.holds {
        ProductType::DoubleTwisted
    } else {
        ProductType::NotPerpendicularOrNone
    }
}

pub fn product_classification(fixture: &SubmersionFixture) -> Result<ProductClassification> {
    product_classification_at(fixture, &fixture.sample_points()?, DEFAULT_TOLERANCE)
}

pub fn product_classification_at(
    fixture: &SubmersionFixture,
    points: &[DVector<f64>],
    tol: f64,
) -> Result<ProductClassification> {
    let flags = sweep(points, |i, p| point_flags(fixture, i, p))?;
    Ok(product_from_flags(&flags, tol))
}

pub(crate) fn product_from_flags(flags: &[PointFlags], tol: f64) -> ProductClassification {
    let horizontal = aggregate(flags, Distribution::Horizontal, tol);
    let vertical = aggregate(flags, Distribution::Vertical, tol);
    let product_type = classify_product(&horizontal, &vertical);
    let label = match product_type {
        ProductType::NotPerpendicularOrNone => "flags consistent with no product type".to_string(),
        t => format!("flags consistent with a {t}"),
    };
    ProductClassification {
        product_type,
        label,
        horizontal,
        vertical,
    }
}
