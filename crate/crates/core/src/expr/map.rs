use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::ast::Expr;
use super::jet::Jet2;
use super::parse::parse_list;
use crate::error::{Error, Result};

/// Closed coordinate box `[lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainBox {
    pub bounds: Vec<(f64, f64)>,
}

impl DomainBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        DomainBox { bounds }
    }

    pub fn unbounded(dim: usize) -> Self {
        DomainBox {
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); dim],
        }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        DomainBox {
            bounds: vec![(lo, hi); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.bounds.len()
            && p.iter()
                .zip(&self.bounds)
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    pub fn check(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideBox { point: p.to_vec() })
        }
    }
}

/// A smooth map `F : R^domain_dim -> R^codomain_dim` given by component
/// expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMapSpec {
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub components: Vec<Expr>,
    pub domain_box: DomainBox,
}

impl SmoothMapSpec {
    pub fn new(domain_dim: usize, components: Vec<Expr>, domain_box: DomainBox) -> Result<Self> {
        if domain_box.dim() != domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "domain box has {} intervals for a {domain_dim}-dimensional domain",
                domain_box.dim()
            )));
        }
        if let Some(i) = components.iter().filter_map(Expr::max_var).max() {
            if i >= domain_dim {
                return Err(Error::VariableOutOfRange {
                    index: i + 1,
                    dim: domain_dim,
                    line: 1,
                    column: 1,
                });
            }
        }
        Ok(SmoothMapSpec {
            domain_dim,
            codomain_dim: components.len(),
            components,
            domain_box,
        })
    }

    pub fn with_box(mut self, domain_box: DomainBox) -> Result<Self> {
        if domain_box.dim() != self.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "domain box has {} intervals for a {}-dimensional domain",
                domain_box.dim(),
                self.domain_dim
            )));
        }
        self.domain_box = domain_box;
        Ok(self)
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "expected a {}-point, got {}",
                self.domain_dim,
                p.len()
            )));
        }
        self.domain_box.check(p)
    }

    pub fn value(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.check_point(p)?;
        let vals = self
            .components
            .iter()
            .map(|c| c.eval(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(vals))
    }

    /// One jet per component: values, Jacobian rows and Hessians.
    pub fn eval_jet2(&self, p: &[f64]) -> Result<Vec<Jet2>> {
        self.check_point(p)?;
        self.components.iter().map(|c| c.jet(p)).collect()
    }

    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let jets = self.eval_jet2(p)?;
        Ok(stack_jacobian(&jets, self.domain_dim))
    }
}

pub(crate) fn stack_jacobian(jets: &[Jet2], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(jets.len(), n, |a, i| jets[a].grad[i])
}

impl fmt::Display for SmoothMapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Parses `source` as a comma-separated component list over `x1..x{domain_dim}`.
/// The resulting map is unbounded until a box is attached.
pub fn parse_map(source: &str, domain_dim: usize) -> Result<SmoothMapSpec> {
    let components = parse_list(source, domain_dim)?;
    SmoothMapSpec::new(domain_dim, components, DomainBox::unbounded(domain_dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn linear_h_lagrangian_map() {
        let f = parse_map("(x2 + x3)/sqrt(2), (x1 + x4)/sqrt(2)", 4).unwrap();
        assert_eq!(f.codomain_dim, 2);
        let jets = f.eval_jet2(&[0.3, -0.2, 0.7, 1.1]).unwrap();
        let expected = [[0.0, S, S, 0.0], [S, 0.0, 0.0, S]];
        for (jet, row) in jets.iter().zip(expected) {
            for (g, e) in jet.grad.iter().zip(row) {
                assert!((g - e).abs() < 1e-15);
            }
            assert!(jet.hess.iter().all(|h| *h == 0.0));
        }
    }

    #[test]
    fn identity_on_the_line() {
        let f = parse_map("x1", 1).unwrap();
        assert_eq!((f.domain_dim, f.codomain_dim), (1, 1));
        let j = &f.eval_jet2(&[2.5]).unwrap()[0];
        assert_eq!(j.value, 2.5);
        assert_eq!(j.grad[0], 1.0);
    }

    #[test]
    fn variable_out_of_range() {
        assert!(matches!(
            parse_map("x7", 4),
            Err(Error::VariableOutOfRange { index: 7, dim: 4, .. })
        ));
    }

    #[test]
    fn radius_jet() {
        let f = parse_map("sqrt(x1^2+x2^2)", 2).unwrap();
        let j = &f.eval_jet2(&[1.0, 0.0]).unwrap()[0];
        assert_eq!(j.value, 1.0);
        assert!((j.grad[0] - 1.0).abs() < 1e-15 && j.grad[1].abs() < 1e-15);
        let expected = [[0.0, 0.0], [0.0, 1.0]];
        for a in 0..2 {
            for b in 0..2 {
                assert!((j.hess[(a, b)] - expected[a][b]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn product_jet() {
        let f = parse_map("x1*x2", 2).unwrap();
        let j = &f.eval_jet2(&[2.0, 3.0]).unwrap()[0];
        assert_eq!(j.value, 6.0);
        assert_eq!((j.grad[0], j.grad[1]), (3.0, 2.0));
        assert_eq!(j.hess, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn domain_violations() {
        let f = parse_map("log(x1), 1/x2", 2).unwrap();
        assert!(matches!(f.eval_jet2(&[-1.0, 1.0]), Err(Error::Domain(_))));
        assert!(matches!(f.eval_jet2(&[1.0, 0.0]), Err(Error::Domain(_))));
        let boxed = f.with_box(DomainBox::cube(2, 0.5, 2.0)).unwrap();
        assert!(matches!(boxed.value(&[3.0, 1.0]), Err(Error::OutsideBox { .. })));
    }
}
