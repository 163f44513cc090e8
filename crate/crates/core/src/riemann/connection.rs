use nalgebra::{DMatrix, DVector};

use super::field::VectorField;
use super::metric::{ensure_spd, MetricField};
use crate::error::{Error, Result};
use crate::linalg::MatJet;

/// Christoffel symbols of the second kind; `gamma[k][(i, j)] = Γ^k_{ij}`.
#[derive(Clone, Debug)]
pub struct Christoffel {
    gamma: Vec<DMatrix<f64>>,
    zero: bool,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Christoffel {
            gamma: vec![DMatrix::zeros(dim, dim); dim],
            zero: true,
        }
    }

    /// Builds the symbols from the metric value and its first derivatives.
    pub fn from_metric_jet(g: &MatJet) -> Result<Self> {
        let n = g.value.nrows();
        if g.d.iter().all(|m| m.iter().all(|v| *v == 0.0)) {
            return Ok(Christoffel::zeros(n));
        }
        ensure_spd(&g.value)?;
        let ginv = g
            .value
            .clone()
            .try_inverse()
            .ok_or(Error::NotPositiveDefinite { min_eigenvalue: 0.0 })?;
        // first kind: c[l](i, j) = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
        let first: Vec<DMatrix<f64>> = (0..n)
            .map(|l| {
                DMatrix::from_fn(n, n, |i, j| {
                    0.5 * (g.d[i][(j, l)] + g.d[j][(i, l)] - g.d[l][(i, j)])
                })
            })
            .collect();
        let gamma = (0..n)
            .map(|k| {
                let mut m = DMatrix::zeros(n, n);
                for (l, fl) in first.iter().enumerate() {
                    let c = ginv[(k, l)];
                    if c != 0.0 {
                        m += fl * c;
                    }
                }
                // Γ^k_ij = Γ^k_ji exactly
                (&m + m.transpose()) * 0.5
            })
            .collect();
        Ok(Christoffel { gamma, zero: false })
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[k][(i, j)]
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// `Γ(u, v)^k = Γ^k_{ij} u^i v^j`.
    pub fn contract(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        if self.zero {
            return DVector::zeros(self.dim());
        }
        DVector::from_iterator(
            self.dim(),
            self.gamma.iter().map(|gk| (u.transpose() * gk * v)[(0, 0)]),
        )
    }

    /// The matrix `(Γ_u)^k_j = Γ^k_{ij} u^i`, i.e. the connection's action
    /// along `u`.
    pub fn along(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        if self.zero {
            return m;
        }
        for (k, gk) in self.gamma.iter().enumerate() {
            let row = u.transpose() * gk;
            m.set_row(k, &row);
        }
        m
    }
}

/// Christoffel symbols of `g` at `p`.
pub fn christoffel(g: &MetricField, p: &DVector<f64>) -> Result<Christoffel> {
    let jet = g.jet(p.as_slice())?;
    ensure_spd(&jet.value)?;
    Christoffel::from_metric_jet(&jet)
}

/// `∇_U V` at `p`.
pub fn covariant_derivative(
    g: &MetricField,
    u: &dyn VectorField,
    v: &dyn VectorField,
    p: &DVector<f64>,
) -> Result<DVector<f64>> {
    let gamma = christoffel(g, p)?;
    let uj = u.jet(p)?;
    let vj = v.jet(p)?;
    Ok(vj.derivative_along(&uj.value) + gamma.contract(&uj.value, &vj.value))
}

/// Coordinate Lie bracket `[U, V]` at `p`.
pub fn lie_bracket(u: &dyn VectorField, v: &dyn VectorField, p: &DVector<f64>) -> Result<DVector<f64>> {
    let uj = u.jet(p)?;
    let vj = v.jet(p)?;
    Ok(vj.derivative_along(&uj.value) - uj.derivative_along(&vj.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::{ConstantField, ExprField};

    fn pt(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    fn polar_metric() -> MetricField {
        MetricField::parse_grid(&[vec!["1", "0"], vec!["0", "x1^2"]]).unwrap()
    }

    fn heisenberg() -> MetricField {
        MetricField::parse_grid(&[
            vec!["1 + x2^2/4", "-(x1*x2)/4", "x2/2"],
            vec!["-(x1*x2)/4", "1 + x1^2/4", "-x1/2"],
            vec!["x2/2", "-x1/2", "1"],
        ])
        .unwrap()
    }

    #[test]
    fn euclidean_symbols_vanish() {
        let g = MetricField::euclidean(3);
        let c = christoffel(&g, &pt(&[0.3, 1.0, -2.0])).unwrap();
        assert!(c.is_zero());
        assert_eq!(c.get(2, 1, 0), 0.0);
    }

    #[test]
    fn polar_symbols() {
        let c = christoffel(&polar_metric(), &pt(&[2.0, 0.4])).unwrap();
        assert!((c.get(0, 1, 1) + 2.0).abs() < 1e-14);
        assert!((c.get(1, 0, 1) - 0.5).abs() < 1e-14);
        assert!((c.get(1, 1, 0) - 0.5).abs() < 1e-14);
        for (k, i, j) in [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 1, 1)] {
            assert_eq!(c.get(k, i, j), 0.0);
        }
    }

    #[test]
    fn heisenberg_metric_compatibility() {
        let g = heisenberg();
        let p = pt(&[0.0, 0.0, 0.0]);
        let c = christoffel(&g, &p).unwrap();
        let jet = g.jet(p.as_slice()).unwrap();
        let n = 3;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(c.get(k, i, j), c.get(k, j, i));
                    // ∂_k g_ij = Γ^l_{ki} g_lj + Γ^l_{kj} g_il
                    let mut rhs = 0.0;
                    for l in 0..n {
                        rhs += c.get(l, k, i) * jet.value[(l, j)] + c.get(l, k, j) * jet.value[(i, l)];
                    }
                    assert!((jet.d[k][(i, j)] - rhs).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn covariant_derivative_examples() {
        let flat = MetricField::euclidean(2);
        let a = ConstantField(pt(&[1.0, 2.0]));
        let b = ConstantField(pt(&[-3.0, 0.5]));
        assert_eq!(covariant_derivative(&flat, &a, &b, &pt(&[0.1, 0.2])).unwrap().norm(), 0.0);

        let circle = ExprField::parse("-x2/sqrt(x1^2+x2^2), x1/sqrt(x1^2+x2^2)", 2).unwrap();
        let acc = covariant_derivative(&flat, &circle, &circle, &pt(&[1.0, 0.0])).unwrap();
        assert!((acc - pt(&[-1.0, 0.0])).norm() < 1e-14);

        let ds = ConstantField(pt(&[0.0, 1.0]));
        let acc = covariant_derivative(&polar_metric(), &ds, &ds, &pt(&[2.0, 0.0])).unwrap();
        assert!((acc - pt(&[-2.0, 0.0])).norm() < 1e-14);
    }

    #[test]
    fn bracket_examples() {
        let p = pt(&[0.7, -0.4]);
        let a = ConstantField(pt(&[1.0, 2.0]));
        let b = ConstantField(pt(&[3.0, 4.0]));
        assert_eq!(lie_bracket(&a, &b, &p).unwrap().norm(), 0.0);
        let u = ExprField::parse("0, x1", 2).unwrap();
        let v = ConstantField(pt(&[1.0, 0.0]));
        assert_eq!(lie_bracket(&u, &v, &p).unwrap(), pt(&[0.0, -1.0]));

        let x = ExprField::parse("1, 0, -x2/2", 3).unwrap();
        let y = ExprField::parse("0, 1, x1/2", 3).unwrap();
        for q in [[0.0, 0.0, 0.0], [0.3, -0.8, 2.0], [-1.0, 0.5, 0.1]] {
            let br = lie_bracket(&x, &y, &pt(&q)).unwrap();
            assert!((br - pt(&[0.0, 0.0, 1.0])).norm() < 1e-15);
        }
    }
}
