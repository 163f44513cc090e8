use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::fixture::SubmersionFixture;
use crate::error::{Error, Result};
use crate::expr::stack_jacobian;
use crate::linalg::{self, FieldJet, MatJet};
use crate::riemann::{ensure_spd, Christoffel};

/// Singular values of `F_*` below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Orthonormal vertical and horizontal frames at a point, with the
/// g-orthogonal projectors onto each distribution.
#[derive(Clone, Debug, Serialize)]
pub struct SplitFrame {
    #[serde(serialize_with = "crate::report::ser_vector")]
    pub point: DVector<f64>,
    #[serde(serialize_with = "crate::report::ser_columns")]
    pub vertical_basis: DMatrix<f64>,
    #[serde(serialize_with = "crate::report::ser_columns")]
    pub horizontal_basis: DMatrix<f64>,
    #[serde(skip)]
    pub vertical_projector: DMatrix<f64>,
    #[serde(skip)]
    pub horizontal_projector: DMatrix<f64>,
}

impl SplitFrame {
    pub fn vertical_dim(&self) -> usize {
        self.vertical_basis.ncols()
    }

    pub fn horizontal_dim(&self) -> usize {
        self.horizontal_basis.ncols()
    }

    /// Vertical basis followed by horizontal basis.
    pub fn full_basis(&self) -> DMatrix<f64> {
        let n = self.point.len();
        let mut m = DMatrix::zeros(n, n);
        let v = self.vertical_dim();
        m.columns_mut(0, v).copy_from(&self.vertical_basis);
        m.columns_mut(v, n - v).copy_from(&self.horizontal_basis);
        m
    }
}

/// Everything needed to evaluate tensors at one point: metric and connection
/// of both manifolds, the Jacobian with its derivatives, and the projector
/// fields with their first derivatives.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub point: DVector<f64>,
    pub metric: MatJet,
    pub christoffel: Christoffel,
    pub image: DVector<f64>,
    /// `F_*` as an `n × dim` matrix; `jacobian.d[i]` holds `∂_i F_*`.
    pub jacobian: MatJet,
    pub singular_values: Vec<f64>,
    pub base_metric: DMatrix<f64>,
    pub base_christoffel: Christoffel,
    pub vertical: MatJet,
    pub horizontal: MatJet,
    pub frame: SplitFrame,
}

/// Vertical and horizontal projector jets at `p`, from the Gram formula
/// `P_H = G⁻¹Jᵀ (J G⁻¹ Jᵀ)⁻¹ J`, `P_V = Id − P_H`.
pub(crate) fn projector_jets(metric: &MatJet, jacobian: &MatJet) -> Result<(MatJet, MatJet)> {
    let dim = metric.value.nrows();
    let ginv = metric
        .inverse()
        .ok_or(Error::NotPositiveDefinite { min_eigenvalue: 0.0 })?;
    let jt = jacobian.transpose();
    let a_jt = ginv.mul(&jt);
    let gram = jacobian.mul(&a_jt);
    let gram_inv = gram.inverse().ok_or(Error::NotSubmersion {
        rank: 0,
        expected: jacobian.value.nrows(),
    })?;
    let horizontal = a_jt.mul(&gram_inv).mul(jacobian);
    let vertical = MatJet::identity(dim, metric.nvars()).sub(&horizontal);
    Ok((vertical, horizontal))
}

fn jacobian_jet(fixture: &SubmersionFixture, p: &DVector<f64>) -> Result<(DVector<f64>, MatJet)> {
    let jets = fixture.map.eval_jet2(p.as_slice())?;
    let dim = fixture.dim();
    let value = stack_jacobian(&jets, dim);
    let d = (0..dim)
        .map(|i| DMatrix::from_fn(jets.len(), dim, |a, j| jets[a].hess[(i, j)]))
        .collect();
    let image = DVector::from_iterator(jets.len(), jets.iter().map(|j| j.value));
    Ok((image, MatJet { value, d }))
}

fn check_rank(jacobian: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = jacobian.nrows();
    let sv: Vec<f64> = if n == 0 {
        Vec::new()
    } else {
        let mut s: Vec<f64> = jacobian.singular_values().iter().cloned().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let largest = sv.first().cloned().unwrap_or(0.0);
    let rank = sv.iter().filter(|s| **s > RANK_TOLERANCE * largest && **s > 0.0).count();
    if rank < n {
        return Err(Error::NotSubmersion { rank, expected: n });
    }
    Ok(sv)
}

impl PointGeometry {
    pub fn at(fixture: &SubmersionFixture, p: &DVector<f64>) -> Result<PointGeometry> {
        let dim = fixture.dim();
        if p.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected a {dim}-point, got {}",
                p.len()
            )));
        }
        fixture.map.domain_box.check(p.as_slice())?;
        Self::at_unchecked(fixture, p)
    }

    /// Same as [`PointGeometry::at`] without the domain-box check; used for
    /// finite-difference stencils that may step just outside the box.
    pub(crate) fn at_unchecked(fixture: &SubmersionFixture, p: &DVector<f64>) -> Result<PointGeometry> {
        let dim = fixture.dim();
        let (image, jacobian) = jacobian_jet(fixture, p)?;
        let singular_values = check_rank(&jacobian.value)?;
        let metric = fixture.total.jet(p.as_slice())?;
        ensure_spd(&metric.value)?;
        let christoffel = if fixture.total.is_constant() {
            Christoffel::zeros(dim)
        } else {
            Christoffel::from_metric_jet(&metric)?
        };
        let base_jet = fixture.base.jet(image.as_slice())?;
        let base_christoffel = if fixture.base.is_constant() {
            Christoffel::zeros(fixture.base_dim())
        } else {
            Christoffel::from_metric_jet(&base_jet)?
        };
        let (vertical, horizontal) = projector_jets(&metric, &jacobian)?;
        let m = dim - fixture.base_dim();
        let vertical_basis = linalg::pivoted_orthonormal(&vertical.value, &metric.value, m);
        let horizontal_basis =
            linalg::pivoted_orthonormal(&horizontal.value, &metric.value, fixture.base_dim());
        let frame = SplitFrame {
            point: p.clone(),
            vertical_basis,
            horizontal_basis,
            vertical_projector: vertical.value.clone(),
            horizontal_projector: horizontal.value.clone(),
        };
        Ok(PointGeometry {
            point: p.clone(),
            metric,
            christoffel,
            image,
            jacobian,
            singular_values,
            base_metric: base_jet.value,
            base_christoffel,
            vertical,
            horizontal,
            frame,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.metric.value
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        linalg::inner(&self.metric.value, u, v)
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        linalg::norm(&self.metric.value, u)
    }

    pub fn base_norm(&self, w: &DVector<f64>) -> f64 {
        linalg::norm(&self.base_metric, w)
    }

    pub fn vert(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.vertical.value * x
    }

    pub fn horiz(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.horizontal.value * x
    }

    /// `F_* u`.
    pub fn push(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.jacobian.value * u
    }

    pub fn constant_field(&self, c: &DVector<f64>) -> FieldJet {
        FieldJet::constant(c.clone(), self.dim())
    }

    /// The field `q ↦ P_V(q) c`.
    pub fn vertical_field(&self, c: &DVector<f64>) -> FieldJet {
        self.vertical.apply_const(c)
    }

    /// The field `q ↦ P_H(q) c`.
    pub fn horizontal_field(&self, c: &DVector<f64>) -> FieldJet {
        self.horizontal.apply_const(c)
    }

    pub fn vertical_part(&self, w: &FieldJet) -> FieldJet {
        self.vertical.apply(w)
    }

    pub fn horizontal_part(&self, w: &FieldJet) -> FieldJet {
        self.horizontal.apply(w)
    }

    /// `∇_u W` at the point.
    pub fn nabla(&self, u: &DVector<f64>, w: &FieldJet) -> DVector<f64> {
        w.derivative_along(u) + self.christoffel.contract(u, &w.value)
    }

    /// `𝒯_u W` for an arbitrary extension `W`.
    pub fn oneill_t_field(&self, u: &DVector<f64>, w: &FieldJet) -> DVector<f64> {
        let vu = self.vert(u);
        let a = self.nabla(&vu, &self.vertical_part(w));
        let b = self.nabla(&vu, &self.horizontal_part(w));
        self.horiz(&a) + self.vert(&b)
    }

    /// `𝒜_u W` for an arbitrary extension `W`.
    pub fn oneill_a_field(&self, u: &DVector<f64>, w: &FieldJet) -> DVector<f64> {
        let hu = self.horiz(u);
        let a = self.nabla(&hu, &self.vertical_part(w));
        let b = self.nabla(&hu, &self.horizontal_part(w));
        self.horiz(&a) + self.vert(&b)
    }

    pub fn oneill_t(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.tensor_constant(&self.vert(u), v)
    }

    pub fn oneill_a(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.tensor_constant(&self.horiz(u), v)
    }

    /// `ℋ∇_d(P_V w) + 𝒱∇_d(P_H w)` for a constant `w`, using `∂P_H = −∂P_V`.
    fn tensor_constant(&self, d: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let dv = self.vertical.directional_apply(d, w);
        let vw = self.vert(w);
        let hw = self.horiz(w);
        let a = &dv + self.christoffel.contract(d, &vw);
        let b = self.christoffel.contract(d, &hw) - dv;
        self.horiz(&a) + self.vert(&b)
    }

    /// `𝒱∇_u (P_V v)`; no verticality check.
    pub fn hat_nabla_unchecked(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.vert(&self.nabla(u, &self.vertical_field(v)))
    }

    /// Sine of the angle between `u` and the vertical space.
    pub fn distance_to_vertical(&self, u: &DVector<f64>) -> f64 {
        let n = self.norm(u);
        if n == 0.0 {
            0.0
        } else {
            self.norm(&self.horiz(u)) / n
        }
    }

    /// `(∇F_*)(u, v)` in base coordinates, with `v` extended as a constant
    /// coordinate field.
    pub fn second_fundamental_form(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let hess_term = self.jacobian.directional(u) * v;
        let fu = self.push(u);
        let fv = self.push(v);
        hess_term + self.base_christoffel.contract(&fu, &fv)
            - self.push(&self.christoffel.contract(u, v))
    }

    /// `(1/m) Σ 𝒯_{e_i} e_i` over the vertical frame (zero when `m = 0`).
    pub fn mean_curvature(&self) -> DVector<f64> {
        mean_over(&self.frame.vertical_basis, self.dim(), |e| self.oneill_t(e, e))
    }

    /// `(1/n) Σ 𝒜_{v_i} v_i` over the horizontal frame.
    pub fn horizontal_mean_curvature(&self) -> DVector<f64> {
        mean_over(&self.frame.horizontal_basis, self.dim(), |e| self.oneill_a(e, e))
    }

    /// `Σ (∇F_*)(b, b)` over a full orthonormal frame.
    pub fn tension(&self) -> DVector<f64> {
        let full = self.frame.full_basis();
        let mut acc = DVector::zeros(self.image.len());
        for b in full.column_iter() {
            let b = b.into_owned();
            acc += self.second_fundamental_form(&b, &b);
        }
        acc
    }
}

fn mean_over(
    basis: &DMatrix<f64>,
    dim: usize,
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
) -> DVector<f64> {
    let k = basis.ncols();
    let mut acc = DVector::zeros(dim);
    if k == 0 {
        return acc;
    }
    for e in basis.column_iter() {
        acc += f(&e.into_owned());
    }
    acc / k as f64
}
