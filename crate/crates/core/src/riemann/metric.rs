use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::linalg::{min_eigenvalue, MatJet};

/// Smallest eigenvalue a metric must exceed at an evaluated point.
pub const SPD_FLOOR: f64 = 1e-10;

/// A symmetric positive-definite matrix field given by expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    dim: usize,
    entries: Option<Vec<Expr>>,
    constant: Option<DMatrix<f64>>,
}

impl MetricField {
    pub fn euclidean(dim: usize) -> Self {
        MetricField {
            dim,
            entries: None,
            constant: Some(DMatrix::identity(dim, dim)),
        }
    }

    /// Builds a metric from a square grid of expressions. Entry `(i, j)` must
    /// be structurally identical to entry `(j, i)`.
    pub fn from_grid(grid: Vec<Vec<Expr>>) -> Result<Self> {
        let dim = grid.len();
        if grid.iter().any(|row| row.len() != dim) {
            return Err(Error::DimensionMismatch("metric grid is not square".into()));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if grid[i][j] != grid[j][i] {
                    return Err(Error::AsymmetricMetric(i, j));
                }
            }
        }
        let entries: Vec<Expr> = grid.into_iter().flatten().collect();
        if let Some(k) = entries.iter().filter_map(Expr::max_var).max() {
            if k >= dim {
                return Err(Error::VariableOutOfRange {
                    index: k + 1,
                    dim,
                    line: 1,
                    column: 1,
                });
            }
        }
        let constant = entries
            .iter()
            .map(Expr::as_constant)
            .collect::<Option<Vec<f64>>>()
            .map(|v| DMatrix::from_row_slice(dim, dim, &v));
        Ok(MetricField {
            dim,
            entries: Some(entries),
            constant,
        })
    }

    pub fn parse_grid<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        let dim = rows.len();
        let grid = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_expr(s.as_ref(), dim))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MetricField::from_grid(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_euclidean(&self) -> bool {
        self.entries.is_none()
    }

    /// True when every entry is a literal, so all Christoffel symbols vanish.
    pub fn is_constant(&self) -> bool {
        self.constant.is_some()
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&Expr> {
        self.entries.as_ref().map(|e| &e[i * self.dim + j])
    }

    fn check_len(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "metric of dimension {} evaluated at a {}-point",
                self.dim,
                p.len()
            )));
        }
        Ok(())
    }

    pub fn value(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(p)?;
        if let Some(c) = &self.constant {
            return Ok(c.clone());
        }
        let entries = self.entries.as_ref().expect("non-constant metric has entries");
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = entries[i * self.dim + j].eval(p)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Metric matrix and its first partial derivatives.
    pub fn jet(&self, p: &[f64]) -> Result<MatJet> {
        self.check_len(p)?;
        if let Some(c) = &self.constant {
            return Ok(MatJet::constant(c.clone(), self.dim));
        }
        let n = self.dim;
        let entries = self.entries.as_ref().expect("non-constant metric has entries");
        let mut value = DMatrix::zeros(n, n);
        let mut d = vec![DMatrix::zeros(n, n); n];
        for i in 0..n {
            for j in i..n {
                let e = &entries[i * n + j];
                if let Some(c) = e.as_constant() {
                    value[(i, j)] = c;
                    value[(j, i)] = c;
                    continue;
                }
                let jet = e.jet(p)?;
                value[(i, j)] = jet.value;
                value[(j, i)] = jet.value;
                for (k, dk) in d.iter_mut().enumerate() {
                    dk[(i, j)] = jet.grad[k];
                    dk[(j, i)] = jet.grad[k];
                }
            }
        }
        Ok(MatJet { value, d })
    }

    /// Returns the smallest eigenvalue, or an error when it does not exceed
    /// the positive-definiteness floor.
    pub fn check_positive_definite(&self, p: &[f64]) -> Result<f64> {
        let m = self.value(p)?;
        ensure_spd(&m)
    }

    pub fn inner(&self, p: &[f64], u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        Ok(crate::linalg::inner(&self.value(p)?, u, v))
    }
}

pub(crate) fn ensure_spd(m: &DMatrix<f64>) -> Result<f64> {
    let lam = min_eigenvalue(m);
    if lam > SPD_FLOOR {
        Ok(lam)
    } else {
        Err(Error::NotPositiveDefinite { min_eigenvalue: lam })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_structurally_asymmetric_grid() {
        let err = MetricField::parse_grid(&[vec!["1", "x1"], vec!["x2", "1"]]).unwrap_err();
        assert!(matches!(err, Error::AsymmetricMetric(0, 1)));
    }

    #[test]
    fn flags_indefinite_points() {
        let g = MetricField::parse_grid(&[vec!["x1", "0"], vec!["0", "1"]]).unwrap();
        assert!(g.check_positive_definite(&[2.0, 0.0]).is_ok());
        match g.check_positive_definite(&[-1.0, 0.0]) {
            Err(Error::NotPositiveDefinite { min_eigenvalue }) => assert_eq!(min_eigenvalue, -1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn literal_grid_is_constant() {
        let g = MetricField::parse_grid(&[vec!["2", "0"], vec!["0", "1"]]).unwrap();
        assert!(g.is_constant());
        assert!(g.jet(&[0.0, 0.0]).unwrap().d.iter().all(|m| m.norm() == 0.0));
    }
}
