use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::linalg::MatJet;
use crate::riemann::{Christoffel, MetricField};

/// Which member of the triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RTag {
    I,
    J,
    K,
}

impl RTag {
    pub const ALL: [RTag; 3] = [RTag::I, RTag::J, RTag::K];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RTag::I => "I",
            RTag::J => "J",
            RTag::K => "K",
        })
    }
}

/// An endomorphism field: a constant matrix or a grid of expressions
/// (row-major, `entries[a * dim + b]` is the `(a, b)` entry).
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixField {
    Constant(DMatrix<f64>),
    Expr { dim: usize, entries: Vec<Expr> },
}

impl MatrixField {
    pub fn dim(&self) -> usize {
        match self {
            MatrixField::Constant(m) => m.nrows(),
            MatrixField::Expr { dim, .. } => *dim,
        }
    }

    /// Parses a square grid of expression strings in `x1..x{dim}`.
    pub fn parse_grid<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "structure matrix row has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for s in row {
                entries.push(parse_expr(s.as_ref(), dim)?);
            }
        }
        if let Some(values) = entries.iter().map(Expr::as_constant).collect::<Option<Vec<f64>>>() {
            return Ok(MatrixField::Constant(DMatrix::from_row_slice(dim, dim, &values)));
        }
        Ok(MatrixField::Expr { dim, entries })
    }

    pub fn value(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        match self {
            MatrixField::Constant(m) => Ok(m.clone()),
            MatrixField::Expr { dim, entries } => {
                let n = *dim;
                let mut m = DMatrix::zeros(n, n);
                for a in 0..n {
                    for b in 0..n {
                        m[(a, b)] = entries[a * n + b].eval(p)?;
                    }
                }
                Ok(m)
            }
        }
    }

    pub fn jet(&self, p: &[f64]) -> Result<MatJet> {
        match self {
            MatrixField::Constant(m) => Ok(MatJet::constant(m.clone(), p.len())),
            MatrixField::Expr { dim, entries } => {
                let n = *dim;
                let mut value = DMatrix::zeros(n, n);
                let mut d = vec![DMatrix::zeros(n, n); p.len()];
                for a in 0..n {
                    for b in 0..n {
                        let e = &entries[a * n + b];
                        if let Some(c) = e.as_constant() {
                            value[(a, b)] = c;
                            continue;
                        }
                        let j = e.jet(p)?;
                        value[(a, b)] = j.value;
                        for (k, dk) in d.iter_mut().enumerate() {
                            dk[(a, b)] = j.grad[k];
                        }
                    }
                }
                Ok(MatJet { value, d })
            }
        }
    }
}

/// Three endomorphism fields standing in for a local basis `I, J, K` of the
/// quaternionic structure.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureTriple {
    pub dim: usize,
    pub fields: [MatrixField; 3],
}

impl StructureTriple {
    pub fn new(i: MatrixField, j: MatrixField, k: MatrixField) -> Result<Self> {
        let dim = i.dim();
        if j.dim() != dim || k.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "structure matrices have sizes {}, {}, {}",
                dim,
                j.dim(),
                k.dim()
            )));
        }
        if !dim.is_multiple_of(4) {
            return Err(Error::StructureDimension(dim));
        }
        Ok(StructureTriple {
            dim,
            fields: [i, j, k],
        })
    }

    /// The standard constant triple on `R^{4m}`.
    pub fn canonical(m: usize) -> Self {
        let [i, j, k] = canonical_matrices(m);
        StructureTriple {
            dim: 4 * m,
            fields: [
                MatrixField::Constant(i),
                MatrixField::Constant(j),
                MatrixField::Constant(k),
            ],
        }
    }

    pub fn field(&self, tag: RTag) -> &MatrixField {
        &self.fields[tag.index()]
    }

    pub fn is_constant(&self) -> bool {
        self.fields.iter().all(|f| matches!(f, MatrixField::Constant(_)))
    }

    /// `[I, J, K]` evaluated at `p`.
    pub fn at(&self, p: &DVector<f64>) -> Result<[DMatrix<f64>; 3]> {
        self.check_point(p)?;
        Ok([
            self.fields[0].value(p.as_slice())?,
            self.fields[1].value(p.as_slice())?,
            self.fields[2].value(p.as_slice())?,
        ])
    }

    pub fn jets(&self, p: &DVector<f64>) -> Result<[MatJet; 3]> {
        self.check_point(p)?;
        Ok([
            self.fields[0].jet(p.as_slice())?,
            self.fields[1].jet(p.as_slice())?,
            self.fields[2].jet(p.as_slice())?,
        ])
    }

    fn check_point(&self, p: &DVector<f64>) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "structure lives in dimension {}, point has {}",
                self.dim,
                p.len()
            )));
        }
        Ok(())
    }
}

pub fn canonical_structure(m: usize) -> StructureTriple {
    StructureTriple::canonical(m)
}

/// Matrices of the standard `I, J, K` on `R^{4m}`: column `c` is the image of `∂_{c+1}`.
pub fn canonical_matrices(m: usize) -> [DMatrix<f64>; 3] {
    let n = 4 * m;
    let mut out = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
    // (source, target, sign) inside one block of four, 0-based.
    let actions: [[(usize, usize, f64); 4]; 3] = [
        [(0, 1, 1.0), (1, 0, -1.0), (2, 3, 1.0), (3, 2, -1.0)],
        [(0, 2, 1.0), (1, 3, -1.0), (2, 0, -1.0), (3, 1, 1.0)],
        [(0, 3, 1.0), (1, 2, 1.0), (2, 1, -1.0), (3, 0, -1.0)],
    ];
    for (mat, act) in out.iter_mut().zip(actions) {
        for k in 0..m {
            for (src, dst, sign) in act {
                mat[(4 * k + dst, 4 * k + src)] = sign;
            }
        }
    }
    out
}

/// Tolerance for the algebraic structure identities.
pub const STRUCTURE_TOLERANCE: f64 = 1e-10;
/// Tolerance for `∇R = 0`.
pub const PARALLEL_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, Default, Serialize)]
pub struct StructureValidation {
    pub tolerance: f64,
    pub points: usize,
    /// `‖R² + Id‖` for `I`, `J`, `K`.
    pub square_i: f64,
    pub square_j: f64,
    pub square_k: f64,
    /// `‖IJ + JI‖`, `‖JK + KJ‖`, `‖KI + IK‖`.
    pub anticommutation: f64,
    /// `‖IJ − K‖`, `‖JK − I‖`, `‖KI − J‖`.
    pub cyclic: f64,
    /// `‖RᵀGR − G‖` over the three structures.
    pub metric: f64,
    pub parallel_tolerance: f64,
    /// `‖∇R‖` over the three structures.
    pub parallel: f64,
    pub algebra_ok: bool,
    pub hermitian_ok: bool,
    pub parallel_ok: bool,
    pub valid: bool,
    pub failures: Vec<String>,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Checks the quaternion relations, metric compatibility and parallelism
/// at every point.
pub fn validate_structure(
    triple: &StructureTriple,
    g: &MetricField,
    points: &[DVector<f64>],
) -> Result<StructureValidation> {
    if !triple.dim.is_multiple_of(4) {
        return Err(Error::StructureDimension(triple.dim));
    }
    if g.dim() != triple.dim {
        return Err(Error::DimensionMismatch(format!(
            "structure dimension {} differs from metric dimension {}",
            triple.dim,
            g.dim()
        )));
    }
    let n = triple.dim;
    let id = DMatrix::<f64>::identity(n, n);
    let per_point = crate::submersion::sweep(points, |_, p| {
        let jets = triple.jets(p)?;
        let [i, j, k] = [&jets[0].value, &jets[1].value, &jets[2].value];
        let gj = g.jet(p.as_slice())?;
        let gm = &gj.value;
        let gamma = if g.is_constant() {
            Christoffel::zeros(n)
        } else {
            Christoffel::from_metric_jet(&gj)?
        };
        let squares = [i, j, k].map(|r| max_abs(&(r * r + &id)));
        let anti = max_abs(&(i * j + j * i))
            .max(max_abs(&(j * k + k * j)))
            .max(max_abs(&(k * i + i * k)));
        let cyc = max_abs(&(i * j - k))
            .max(max_abs(&(j * k - i)))
            .max(max_abs(&(k * i - j)));
        let met = [i, j, k]
            .iter()
            .map(|r| max_abs(&(r.transpose() * gm * *r - gm)))
            .fold(0.0, f64::max);
        let mut par: f64 = 0.0;
        for rj in &jets {
            for (c, dc) in rj.d.iter().enumerate() {
                let mut e = DVector::zeros(n);
                e[c] = 1.0;
                let gc = gamma.along(&e);
                let cov = dc + &gc * &rj.value - &rj.value * &gc;
                par = par.max(max_abs(&cov));
            }
        }
        Ok([squares[0], squares[1], squares[2], anti, cyc, met, par])
    })?;
    let mut worst = [0.0f64; 7];
    for r in &per_point {
        for (w, v) in worst.iter_mut().zip(r) {
            *w = w.max(*v);
        }
    }
    let tol = STRUCTURE_TOLERANCE;
    let mut failures = Vec::new();
    let names = ["I^2 = -Id", "J^2 = -Id", "K^2 = -Id", "anticommutation", "IJ = K (cyclic)", "g(RX, RY) = g(X, Y)"];
    for (name, w) in names.iter().zip(&worst) {
        if w.is_nan() || *w >= tol {
            failures.push(format!("{name} fails (residual {w:.3e})"));
        }
    }
    let parallel_ok = worst[6] < PARALLEL_TOLERANCE;
    if !parallel_ok {
        failures.push(format!("nabla R = 0 fails (residual {:.3e})", worst[6]));
    }
    let algebra_ok = worst[..5].iter().all(|w| *w < tol);
    let hermitian_ok = worst[5] < tol;
    Ok(StructureValidation {
        tolerance: tol,
        points: points.len(),
        square_i: worst[0],
        square_j: worst[1],
        square_k: worst[2],
        anticommutation: worst[3],
        cyclic: worst[4],
        metric: worst[5],
        parallel_tolerance: PARALLEL_TOLERANCE,
        parallel: worst[6],
        algebra_ok,
        hermitian_ok,
        parallel_ok,
        valid: algebra_ok && hermitian_ok && parallel_ok,
        failures,
    })
}
