//! Small dense helpers: matrix/vector jets with first derivatives, Gram–Schmidt
//! in a metric, and subspace comparisons.

use nalgebra::{DMatrix, DVector};

/// Relative size below which a candidate direction counts as dependent.
pub const RANK_FLOOR: f64 = 1e-10;

/// A matrix-valued function's value and its partial derivatives at a point:
/// `d[i] = ∂_i M`.
#[derive(Clone, Debug)]
pub struct MatJet {
    pub value: DMatrix<f64>,
    pub d: Vec<DMatrix<f64>>,
}

impl MatJet {
    pub fn constant(value: DMatrix<f64>, nvars: usize) -> Self {
        let (r, c) = value.shape();
        MatJet {
            value,
            d: vec![DMatrix::zeros(r, c); nvars],
        }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        MatJet::constant(DMatrix::identity(n, n), nvars)
    }

    pub fn nvars(&self) -> usize {
        self.d.len()
    }

    pub fn mul(&self, other: &MatJet) -> MatJet {
        MatJet {
            value: &self.value * &other.value,
            d: self
                .d
                .iter()
                .zip(&other.d)
                .map(|(da, db)| da * &other.value + &self.value * db)
                .collect(),
        }
    }

    pub fn sub(&self, other: &MatJet) -> MatJet {
        MatJet {
            value: &self.value - &other.value,
            d: self.d.iter().zip(&other.d).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn transpose(&self) -> MatJet {
        MatJet {
            value: self.value.transpose(),
            d: self.d.iter().map(|m| m.transpose()).collect(),
        }
    }

    pub fn inverse(&self) -> Option<MatJet> {
        let inv = self.value.clone().try_inverse()?;
        let d = self.d.iter().map(|m| -(&inv * m * &inv)).collect();
        Some(MatJet { value: inv, d })
    }

    /// `Σ_i u^i ∂_i M`.
    pub fn directional(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (r, c) = self.value.shape();
        let mut out = DMatrix::zeros(r, c);
        for (ui, di) in u.iter().zip(&self.d) {
            if *ui != 0.0 {
                out.zip_apply(di, |o, x| *o += *ui * x);
            }
        }
        out
    }

    /// `(∂_u M) w` without forming `∂_u M`.
    pub fn directional_apply(&self, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.value.nrows());
        for (ui, di) in u.iter().zip(&self.d) {
            if *ui != 0.0 {
                out.gemv(*ui, di, w, 1.0);
            }
        }
        out
    }

    /// Product rule: the jet of `M(q) w(q)`.
    pub fn apply(&self, w: &FieldJet) -> FieldJet {
        let value = &self.value * &w.value;
        let mut d = &self.value * &w.d;
        for (i, di) in self.d.iter().enumerate() {
            let col = di * &w.value;
            let mut dst = d.column_mut(i);
            dst += col;
        }
        FieldJet { value, d }
    }

    /// The jet of `M(q) c` for a constant vector `c`.
    pub fn apply_const(&self, c: &DVector<f64>) -> FieldJet {
        let mut d = DMatrix::zeros(self.value.nrows(), self.nvars());
        for (i, di) in self.d.iter().enumerate() {
            d.set_column(i, &(di * c));
        }
        FieldJet {
            value: &self.value * c,
            d,
        }
    }
}

/// A vector field's value and Jacobian at a point; column `i` of `d` is `∂_i W`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldJet {
    pub value: DVector<f64>,
    pub d: DMatrix<f64>,
}

impl FieldJet {
    pub fn constant(value: DVector<f64>, nvars: usize) -> Self {
        let n = value.len();
        FieldJet {
            value,
            d: DMatrix::zeros(n, nvars),
        }
    }

    /// Directional derivative `Σ_i u^i ∂_i W` (no connection terms).
    pub fn derivative_along(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.d * u
    }

    pub fn add(&self, other: &FieldJet) -> FieldJet {
        FieldJet {
            value: &self.value + &other.value,
            d: &self.d + &other.d,
        }
    }

    pub fn sub(&self, other: &FieldJet) -> FieldJet {
        FieldJet {
            value: &self.value - &other.value,
            d: &self.d - &other.d,
        }
    }

    pub fn scale(&self, s: f64) -> FieldJet {
        FieldJet {
            value: &self.value * s,
            d: &self.d * s,
        }
    }
}

pub fn inner(g: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (u.transpose() * g * v)[(0, 0)]
}

pub fn norm(g: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    inner(g, u, u).max(0.0).sqrt()
}

/// Picks `k` g-orthonormal vectors spanning the column space of `candidates`,
/// always taking next the candidate with the largest remaining g-norm.
/// Ties go to the lowest column index. Stops early once every remaining
/// candidate is negligible relative to the largest input column.
pub fn pivoted_orthonormal(candidates: &DMatrix<f64>, g: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = candidates.nrows();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(k);
    let mut pool: Vec<DVector<f64>> = candidates.column_iter().map(|c| c.into_owned()).collect();
    let scale = pool.iter().map(|c| norm(g, c)).fold(0.0, f64::max);
    let floor = RANK_FLOOR * scale;
    for _ in 0..k {
        let mut best = None;
        let mut best_norm = 0.0;
        for (idx, c) in pool.iter().enumerate() {
            let nrm = norm(g, c);
            if nrm > best_norm * (1.0 + 1e-12) {
                best_norm = nrm;
                best = Some(idx);
            }
        }
        let Some(idx) = best else { break };
        if best_norm <= floor {
            break;
        }
        let mut v = pool[idx].clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(g, b, &v);
                v -= b * c;
            }
        }
        let nrm = norm(g, &v);
        if nrm == 0.0 {
            break;
        }
        v /= nrm;
        for c in pool.iter_mut() {
            let coef = inner(g, &v, c);
            *c -= &v * coef;
        }
        basis.push(v);
    }
    let mut out = DMatrix::zeros(n, basis.len());
    for (j, b) in basis.iter().enumerate() {
        out.set_column(j, b);
    }
    out
}

/// Classical (re-orthogonalised) Gram–Schmidt of the columns, in order.
pub fn gram_schmidt(vectors: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = vectors.clone();
    for j in 0..out.ncols() {
        let mut v = out.column(j).into_owned();
        for _ in 0..2 {
            for i in 0..j {
                let b = out.column(i).into_owned();
                let c = inner(g, &b, &v);
                v -= b * c;
            }
        }
        let nrm = norm(g, &v);
        out.set_column(j, &(v / nrm));
    }
    out
}

/// g-orthogonal projection of `v` onto the span of the g-orthonormal columns of `basis`.
pub fn project_onto(basis: &DMatrix<f64>, g: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for b in basis.column_iter() {
        let b = b.into_owned();
        let c = inner(g, &b, v);
        out += b * c;
    }
    out
}

/// Sine of the largest principal angle from span(a) to span(b), both given by
/// g-orthonormal columns. Computed from the residual of projecting `a` onto
/// `b`, so it stays accurate near zero.
pub fn subspace_gap(a: &DMatrix<f64>, b: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    if a.ncols() == 0 {
        return 0.0;
    }
    let coef = b.transpose() * g * a;
    let resid = a - b * coef;
    let gram = resid.transpose() * g * &resid;
    let gram = (&gram + gram.transpose()) * 0.5;
    let eig = gram.symmetric_eigenvalues();
    eig.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
}

/// Principal angles (radians, ascending) between span(a) and span(b), both
/// g-orthonormal.
pub fn principal_angles(a: &DMatrix<f64>, b: &DMatrix<f64>, g: &DMatrix<f64>) -> Vec<f64> {
    if a.ncols() == 0 || b.ncols() == 0 {
        return Vec::new();
    }
    let m = a.transpose() * g * b;
    let sv = m.singular_values();
    let mut angles: Vec<f64> = sv.iter().map(|s| s.clamp(-1.0, 1.0).acos()).collect();
    angles.sort_by(|x, y| x.total_cmp(y));
    angles
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_jet_matches_product_rule() {
        let m = MatJet {
            value: DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]),
            d: vec![DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 2.0, -1.0])],
        };
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        assert!((prod.value - DMatrix::identity(2, 2)).norm() < 1e-14);
        assert!(prod.d[0].norm() < 1e-14);
    }

    #[test]
    fn pivoting_prefers_coordinate_directions() {
        let g = DMatrix::identity(3, 3);
        let mut p = DMatrix::zeros(3, 3);
        p[(0, 0)] = 1.0;
        p[(2, 2)] = 1.0;
        let b = pivoted_orthonormal(&p, &g, 2);
        assert_eq!(b.column(0).into_owned(), DVector::from_vec(vec![1.0, 0.0, 0.0]));
        assert_eq!(b.column(1).into_owned(), DVector::from_vec(vec![0.0, 0.0, 1.0]));
    }

    #[test]
    fn gap_between_planes() {
        let g = DMatrix::identity(3, 3);
        let a = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(subspace_gap(&a, &b, &g), 0.0);
        let t = 0.3f64;
        let tilted = DMatrix::from_column_slice(3, 1, &[t.cos(), 0.0, t.sin()]);
        assert!((subspace_gap(&tilted, &b, &g) - t.sin()).abs() < 1e-14);
        assert!((principal_angles(&tilted, &b, &g)[0] - t).abs() < 1e-12);
    }
}
