use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::{parse_list, Expr};
use crate::linalg::FieldJet;

/// Anything that can report its value and first derivatives at a point.
///
/// Expression fields and the projector-extended fields of a submersion both
/// implement this, so the connection accepts either.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;
    fn jet(&self, p: &DVector<f64>) -> Result<FieldJet>;
}

/// A vector field whose components are coordinate expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprField {
    pub components: Vec<Expr>,
}

impl ExprField {
    pub fn new(components: Vec<Expr>) -> Self {
        ExprField { components }
    }

    pub fn parse(source: &str, dim: usize) -> Result<Self> {
        let components = parse_list(source, dim)?;
        if components.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "vector field on a {dim}-manifold needs {dim} components, got {}",
                components.len()
            )));
        }
        Ok(ExprField { components })
    }
}

impl VectorField for ExprField {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn jet(&self, p: &DVector<f64>) -> Result<FieldJet> {
        let n = p.len();
        let mut value = DVector::zeros(self.components.len());
        let mut d = DMatrix::zeros(self.components.len(), n);
        for (k, c) in self.components.iter().enumerate() {
            if let Some(v) = c.as_constant() {
                value[k] = v;
                continue;
            }
            let j = c.jet(p.as_slice())?;
            value[k] = j.value;
            d.set_row(k, &j.grad.transpose());
        }
        Ok(FieldJet { value, d })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantField(pub DVector<f64>);

impl VectorField for ConstantField {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn jet(&self, p: &DVector<f64>) -> Result<FieldJet> {
        Ok(FieldJet::constant(self.0.clone(), p.len()))
    }
}
