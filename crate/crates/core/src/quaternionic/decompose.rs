use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::structure::{RTag, StructureTriple};
use crate::error::{Error, Result};
use crate::linalg::{self, norm, project_onto};
use crate::riemann::MetricField;
use crate::submersion::{SplitFrame, VERTICAL_ANGLE_TOLERANCE};

/// Anti-invariance threshold (sine of the largest principal angle).
pub const CLASSIFICATION_TOLERANCE: f64 = 1e-8;

/// `R` at one point together with the subspaces `R(ker F_*)` and `μ_R`.
#[derive(Clone, Debug)]
pub struct ROperators {
    pub tag: RTag,
    pub r: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub vertical_projector: DMatrix<f64>,
    pub horizontal_projector: DMatrix<f64>,
    /// Orthonormal basis of `R(ker F_*)`.
    pub r_kernel: DMatrix<f64>,
    /// Orthonormal basis of `μ_R`, the complement of `R(ker F_*)` in the
    /// horizontal space.
    pub mu: DMatrix<f64>,
}

impl ROperators {
    pub fn new(tag: RTag, r: DMatrix<f64>, frame: &SplitFrame, g: DMatrix<f64>) -> Self {
        let m = frame.vertical_dim();
        let n = frame.horizontal_dim();
        let images = &r * &frame.vertical_basis;
        let r_kernel = linalg::pivoted_orthonormal(&images, &g, m);
        let mut residual = frame.horizontal_basis.clone();
        for mut col in residual.column_iter_mut() {
            let v = col.clone_owned();
            col -= project_onto(&r_kernel, &g, &v);
        }
        let mu = linalg::pivoted_orthonormal(&residual, &g, n.saturating_sub(r_kernel.ncols()));
        ROperators {
            tag,
            r,
            g,
            vertical_projector: frame.vertical_projector.clone(),
            horizontal_projector: frame.horizontal_projector.clone(),
            r_kernel,
            mu,
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.r * x
    }

    /// `B_R x`, the vertical part of `Rx`.
    pub fn b(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.vertical_projector * (&self.r * x)
    }

    /// `C_R x`, the horizontal part of `Rx`.
    pub fn c(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.horizontal_projector * (&self.r * x)
    }

    /// `P_R x`, the component in `R(ker F_*)`.
    pub fn p(&self, x: &DVector<f64>) -> DVector<f64> {
        project_onto(&self.r_kernel, &self.g, x)
    }

    /// `Q_R x`, the component in `μ_R`.
    pub fn q(&self, x: &DVector<f64>) -> DVector<f64> {
        project_onto(&self.mu, &self.g, x)
    }

    /// g-distance of `w` from `μ_R`.
    pub fn distance_to_mu(&self, w: &DVector<f64>) -> f64 {
        norm(&self.g, &(w - self.q(w)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub tag: RTag,
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub x: DVector<f64>,
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub b: DVector<f64>,
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub c: DVector<f64>,
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub p: DVector<f64>,
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub q: DVector<f64>,
    #[serde(serialize_with = "crate::report::ser_columns")]
    pub r_kernel_basis: DMatrix<f64>,
    #[serde(serialize_with = "crate::report::ser_columns")]
    pub mu_basis: DMatrix<f64>,
    /// `‖Rx − B_R x − C_R x‖`.
    pub split_residual: f64,
    /// `‖x − P_R x − Q_R x‖`.
    pub sum_residual: f64,
    /// Distance of `C_R x` from `μ_R`.
    pub c_in_mu_residual: f64,
    /// `max_i |g(C_R x, R e_i)|` over the vertical frame.
    pub c_perp_residual: f64,
}

fn metric_at(g: &MetricField, p: &DVector<f64>) -> Result<DMatrix<f64>> {
    if g.dim() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "metric dimension {} differs from frame dimension {}",
            g.dim(),
            p.len()
        )));
    }
    g.value(p.as_slice())
}

/// `R` at the frame's point with the decomposition subspaces.
pub fn operators_at(
    triple: &StructureTriple,
    tag: RTag,
    frame: &SplitFrame,
    g: &MetricField,
) -> Result<ROperators> {
    if triple.dim != frame.point.len() {
        return Err(Error::DimensionMismatch(format!(
            "structure dimension {} differs from frame dimension {}",
            triple.dim,
            frame.point.len()
        )));
    }
    let gm = metric_at(g, &frame.point)?;
    let r = triple.field(tag).value(frame.point.as_slice())?;
    Ok(ROperators::new(tag, r, frame, gm))
}

/// Splits `Rx` and `x` for a horizontal `x`.
pub fn decompose(
    triple: &StructureTriple,
    tag: RTag,
    frame: &SplitFrame,
    x: &DVector<f64>,
    g: &MetricField,
) -> Result<DecompositionReport> {
    let ops = operators_at(triple, tag, frame, g)?;
    let xn = norm(&ops.g, x);
    if xn > 0.0 {
        let off = norm(&ops.g, &(&frame.vertical_projector * x)) / xn;
        if off > VERTICAL_ANGLE_TOLERANCE {
            return Err(Error::NotHorizontal(off));
        }
    }
    let rx = ops.apply(x);
    let (b, c, p, q) = (ops.b(x), ops.c(x), ops.p(x), ops.q(x));
    let c_perp_residual = frame
        .vertical_basis
        .column_iter()
        .map(|e| linalg::inner(&ops.g, &c, &(&ops.r * e)).abs())
        .fold(0.0, f64::max);
    Ok(DecompositionReport {
        tag,
        x: x.clone(),
        split_residual: norm(&ops.g, &(&rx - &b - &c)),
        sum_residual: norm(&ops.g, &(x - &p - &q)),
        c_in_mu_residual: ops.distance_to_mu(&c),
        c_perp_residual,
        b,
        c,
        p,
        q,
        r_kernel_basis: ops.r_kernel.clone(),
        mu_basis: ops.mu.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MuInvarianceReport {
    pub tag: RTag,
    pub applicable: bool,
    pub mu_dim: usize,
    pub worst_distance: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

pub const MU_INVARIANCE_TOLERANCE: f64 = 1e-9;

/// Checks `R(μ_R) ⊂ μ_R` where `R` is anti-invariant at the frame's point.
pub fn check_mu_invariance(
    triple: &StructureTriple,
    tag: RTag,
    frame: &SplitFrame,
    g: &MetricField,
) -> Result<MuInvarianceReport> {
    let ops = operators_at(triple, tag, frame, g)?;
    let gap = linalg::subspace_gap(&ops.r_kernel, &frame.horizontal_basis, &ops.g);
    let tolerance = MU_INVARIANCE_TOLERANCE;
    if gap >= CLASSIFICATION_TOLERANCE || ops.r_kernel.ncols() != frame.vertical_dim() {
        return Ok(MuInvarianceReport {
            tag,
            applicable: false,
            mu_dim: ops.mu.ncols(),
            worst_distance: 0.0,
            tolerance,
            pass: true,
            note: format!("{tag} is not anti-invariant here (gap {gap:.3e}); check skipped"),
        });
    }
    let worst_distance = ops
        .mu
        .column_iter()
        .map(|w| ops.distance_to_mu(&(&ops.r * w)))
        .fold(0.0, f64::max);
    let note = if ops.mu.ncols() == 0 {
        format!("mu_{tag} is zero-dimensional; vacuous")
    } else {
        String::new()
    };
    Ok(MuInvarianceReport {
        tag,
        applicable: true,
        mu_dim: ops.mu.ncols(),
        worst_distance,
        tolerance,
        pass: worst_distance < tolerance,
        note,
    })
}
