use std::fmt;

use super::jet::Jet2;
use crate::error::{Error, Result};

/// Elementary functions understood by the expression language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    /// Value, first and second derivative at `u`.
    fn eval3(self, u: f64) -> Result<(f64, f64, f64)> {
        match self {
            Func::Sqrt => {
                if u <= 0.0 {
                    return Err(Error::Domain(format!(
                        "sqrt is not differentiable at argument {u}"
                    )));
                }
                let s = u.sqrt();
                Ok((s, 0.5 / s, -0.25 / (s * u)))
            }
            Func::Exp => {
                let e = u.exp();
                Ok((e, e, e))
            }
            Func::Log => {
                if u <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive argument {u}")));
                }
                Ok((u.ln(), 1.0 / u, -1.0 / (u * u)))
            }
            Func::Sin => Ok((u.sin(), u.cos(), -u.sin())),
            Func::Cos => Ok((u.cos(), -u.sin(), -u.cos())),
        }
    }

    fn eval(self, u: f64) -> Result<f64> {
        match self {
            Func::Sqrt if u < 0.0 => Err(Error::Domain(format!("sqrt of negative argument {u}"))),
            Func::Sqrt => Ok(u.sqrt()),
            Func::Exp => Ok(u.exp()),
            Func::Log if u <= 0.0 => {
                Err(Error::Domain(format!("log of non-positive argument {u}")))
            }
            Func::Log => Ok(u.ln()),
            Func::Sin => Ok(u.sin()),
            Func::Cos => Ok(u.cos()),
        }
    }
}

/// Expression tree over the coordinates `x1..xn` (stored zero-based).
///
/// Numeric literals are never negative: a negative constant is `Neg(Num(..))`,
/// which is exactly what the parser produces for `-2`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        assert!(v.is_finite(), "expression literals must be finite");
        if v < 0.0 {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    /// Zero-based coordinate variable (`var(0)` prints as `x1`).
    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    /// Literal value, if the expression is a (possibly negated) literal.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Neg(inner) => inner.as_constant().map(|v| -v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    // Folding constructors used when assembling expressions in code.

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a.as_constant() {
            Some(v) => Expr::num(-v),
            None => match a {
                Expr::Neg(inner) => *inner,
                other => Expr::Neg(Box::new(other)),
            },
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expr::num(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => match b {
                Expr::Neg(inner) => Expr::Sub(Box::new(a), inner),
                b => Expr::Add(Box::new(a), Box::new(b)),
            },
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expr::num(x - y),
            (Some(0.0), _) => Expr::neg(b),
            (_, Some(0.0)) => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => Expr::num(x * y),
            (Some(0.0), _) | (_, Some(0.0)) => Expr::Num(0.0),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            (Some(-1.0), _) => Expr::neg(b),
            (_, Some(-1.0)) => Expr::neg(a),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        match b.as_constant() {
            Some(1.0) => a,
            _ if a.is_zero() => Expr::Num(0.0),
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn powi(a: Expr, k: i32) -> Expr {
        match k {
            0 => Expr::Num(1.0),
            1 => a,
            _ => Expr::Pow(Box::new(a), k),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    /// Largest zero-based variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    /// Plain value at `p`.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => *p.get(*i).ok_or_else(|| {
                Error::DimensionMismatch(format!("x{} evaluated at a {}-point", i + 1, p.len()))
            })?,
            Expr::Neg(a) => -a.eval(p)?,
            Expr::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Expr::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Expr::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Expr::Div(a, b) => {
                let d = b.eval(p)?;
                if d == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                a.eval(p)? / d
            }
            Expr::Pow(a, k) => {
                let base = a.eval(p)?;
                if base == 0.0 && *k < 0 {
                    return Err(Error::Domain("negative power of zero".into()));
                }
                base.powi(*k)
            }
            Expr::Call(f, a) => f.eval(a.eval(p)?)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite value while evaluating {self}")))
        }
    }

    /// Value, gradient and Hessian at `p` by second-order forward propagation.
    pub fn jet(&self, p: &[f64]) -> Result<Jet2> {
        let n = p.len();
        let j = match self {
            Expr::Num(v) => Jet2::constant(*v, n),
            Expr::Var(i) => {
                if *i >= n {
                    return Err(Error::DimensionMismatch(format!(
                        "x{} evaluated at a {n}-point",
                        i + 1
                    )));
                }
                Jet2::variable(*i, p[*i], n)
            }
            Expr::Neg(a) => a.jet(p)?.scale(-1.0),
            Expr::Add(a, b) => a.jet(p)?.add(&b.jet(p)?),
            Expr::Sub(a, b) => a.jet(p)?.add(&b.jet(p)?.scale(-1.0)),
            Expr::Mul(a, b) => a.jet(p)?.mul(&b.jet(p)?),
            Expr::Div(a, b) => {
                let d = b.jet(p)?;
                if d.value == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                let v = d.value;
                let recip = d.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
                a.jet(p)?.mul(&recip)
            }
            Expr::Pow(a, k) => {
                let u = a.jet(p)?;
                let k = *k;
                if k == 0 {
                    Jet2::constant(1.0, n)
                } else {
                    let x = u.value;
                    if x == 0.0 && k < 0 {
                        return Err(Error::Domain("negative power of zero".into()));
                    }
                    let kf = k as f64;
                    let f0 = x.powi(k);
                    let f1 = kf * x.powi(k - 1);
                    let f2 = if k == 1 { 0.0 } else { kf * (kf - 1.0) * x.powi(k - 2) };
                    u.chain(f0, f1, f2)
                }
            }
            Expr::Call(f, a) => {
                let u = a.jet(p)?;
                let (f0, f1, f2) = f.eval3(u.value)?;
                u.chain(f0, f1, f2)
            }
        };
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::Domain(format!("non-finite derivative while evaluating {self}")))
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, needs_parens: bool) -> fmt::Result {
    if needs_parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, a.precedence() < 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => " * ",
                    _ => " / ",
                };
                write_operand(f, a, a.precedence() < prec)?;
                f.write_str(op)?;
                // the right operand of a binary node never carries a bare
                // lower-or-equal precedence node, except a negation which the
                // parser reads as a unary operand
                let right_parens = match **b {
                    Expr::Neg(_) => false,
                    _ => b.precedence() <= prec,
                };
                write_operand(f, b, right_parens)
            }
            Expr::Pow(a, k) => {
                write_operand(f, a, a.precedence() < 5)?;
                write!(f, "^{k}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
