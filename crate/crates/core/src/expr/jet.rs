use nalgebra::{DMatrix, DVector};

/// Second-order jet of a scalar function of `n` variables.
///
/// The Hessian is stored as a full matrix but only the upper triangle is
/// computed; the lower triangle is mirrored so symmetry is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl Jet2 {
    pub fn constant(value: f64, n: usize) -> Self {
        Jet2 {
            value,
            grad: DVector::zeros(n),
            hess: DMatrix::zeros(n, n),
        }
    }

    pub fn variable(index: usize, value: f64, n: usize) -> Self {
        let mut j = Jet2::constant(value, n);
        j.grad[index] = 1.0;
        j
    }

    pub fn nvars(&self) -> usize {
        self.grad.len()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && self.hess.iter().all(|v| v.is_finite())
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.value *= s;
        self.grad *= s;
        self.hess *= s;
        self
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(mut self, other: &Jet2) -> Self {
        self.value += other.value;
        self.grad += &other.grad;
        self.hess += &other.hess;
        self
    }

    pub fn mul(&self, other: &Jet2) -> Jet2 {
        let n = self.nvars();
        let (a, b) = (self.value, other.value);
        let grad = &other.grad * a + &self.grad * b;
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let h = a * other.hess[(i, j)]
                    + b * self.hess[(i, j)]
                    + self.grad[i] * other.grad[j]
                    + other.grad[i] * self.grad[j];
                hess[(i, j)] = h;
                hess[(j, i)] = h;
            }
        }
        Jet2 {
            value: a * b,
            grad,
            hess,
        }
    }

    /// Composes a univariate function with this jet, given the function's
    /// value `f0` and derivatives `f1`, `f2` at `self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        let n = self.nvars();
        let grad = &self.grad * f1;
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let h = f1 * self.hess[(i, j)] + f2 * self.grad[i] * self.grad[j];
                hess[(i, j)] = h;
                hess[(j, i)] = h;
            }
        }
        Jet2 {
            value: f0,
            grad,
            hess,
        }
    }
}
