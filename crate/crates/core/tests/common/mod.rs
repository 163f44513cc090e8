//! Random polynomial/trigonometric manifests and central-difference oracles.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use quatsub::expr::{parse_expr, Expr};
use quatsub::riemann::{christoffel, MetricField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOLERANCE: f64 = 1e-6;

/// A random manifest: a chart dimension, a metric `δ + A Aᵀ` built from
/// random entries, map components and a point in `[-1, 1]^dim`.
pub struct RandomManifest {
    pub dim: usize,
    pub metric: MetricField,
    pub metric_source: Vec<Vec<String>>,
    pub components: Vec<Expr>,
    pub point: DVector<f64>,
}

fn coeff(rng: &mut ChaCha8Rng) -> String {
    format!("{:.3}", rng.random_range(-0.6..0.6))
}

fn term(rng: &mut ChaCha8Rng, dim: usize) -> String {
    let i = rng.random_range(1..=dim);
    let j = rng.random_range(1..=dim);
    let (c, a) = (coeff(rng), coeff(rng));
    match rng.random_range(0..7) {
        0 => format!("{c}*x{i}"),
        1 => format!("{c}*x{i}*x{j}"),
        2 => format!("{c}*x{i}^2"),
        3 => format!("{c}*x{i}^3"),
        4 => format!("{c}*sin({a}*x{i} + 0.3)"),
        5 => format!("{c}*cos({a}*x{i} + {c}*x{j})"),
        _ => format!("{c}*exp({a}*x{i})"),
    }
}

pub fn random_expr(rng: &mut ChaCha8Rng, dim: usize) -> String {
    let n = rng.random_range(2..=3);
    let mut s = coeff(rng);
    for _ in 0..n {
        s.push_str(" + ");
        s.push_str(&term(rng, dim));
    }
    s
}

pub fn random_manifest(seed: u64) -> RandomManifest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.random_range(2..=4);
    let a: Vec<Vec<String>> = (0..dim)
        .map(|_| (0..dim).map(|_| random_expr(&mut rng, dim)).collect())
        .collect();
    let mut src = vec![vec![String::new(); dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let mut s = if i == j { "1".to_string() } else { "0".to_string() };
            for k in 0..dim {
                s.push_str(&format!(" + ({})*({})", a[i][k], a[j][k]));
            }
            src[i][j] = s.clone();
            src[j][i] = s;
        }
    }
    let metric = MetricField::parse_grid(&src).expect("generated metric parses");
    let components = (0..dim)
        .map(|_| parse_expr(&random_expr(&mut rng, dim), dim).expect("generated expression parses"))
        .collect();
    let point = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
    RandomManifest {
        dim,
        metric,
        metric_source: src,
        components,
        point,
    }
}

/// `|a − b| / max(|b|, 1)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn shifted(p: &DVector<f64>, i: usize, h: f64) -> DVector<f64> {
    let mut q = p.clone();
    q[i] += h;
    q
}

/// Worst error of jet gradients against differences of values, and of jet
/// Hessians against differences of jet gradients.
pub fn jet_errors(e: &Expr, p: &DVector<f64>) -> (f64, f64) {
    let n = p.len();
    let jet = e.jet(p.as_slice()).expect("jet");
    let mut grad_err: f64 = 0.0;
    let mut hess_err: f64 = 0.0;
    for i in 0..n {
        let (pp, pm) = (shifted(p, i, FD_STEP), shifted(p, i, -FD_STEP));
        let fd = (e.eval(pp.as_slice()).unwrap() - e.eval(pm.as_slice()).unwrap()) / (2.0 * FD_STEP);
        grad_err = grad_err.max(rel_err(jet.grad[i], fd));
        let gp = e.jet(pp.as_slice()).unwrap().grad;
        let gm = e.jet(pm.as_slice()).unwrap().grad;
        for j in 0..n {
            let fd = (gp[j] - gm[j]) / (2.0 * FD_STEP);
            hess_err = hess_err.max(rel_err(jet.hess[(i, j)], fd));
        }
    }
    (grad_err, hess_err)
}

/// Christoffel symbols from central differences of metric values.
pub fn fd_christoffel(g: &MetricField, p: &DVector<f64>) -> Vec<f64> {
    let n = p.len();
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|i| {
            let gp = g.value(shifted(p, i, FD_STEP).as_slice()).unwrap();
            let gm = g.value(shifted(p, i, -FD_STEP).as_slice()).unwrap();
            (gp - gm) / (2.0 * FD_STEP)
        })
        .collect();
    let ginv = g.value(p.as_slice()).unwrap().try_inverse().unwrap();
    let mut out = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                out[(k * n + i) * n + j] = 0.5 * s;
            }
        }
    }
    out
}

pub fn christoffel_error(g: &MetricField, p: &DVector<f64>) -> f64 {
    let n = p.len();
    let gamma = christoffel(g, p).unwrap();
    let fd = fd_christoffel(g, p);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(rel_err(gamma.get(k, i, j), fd[(k * n + i) * n + j]));
            }
        }
    }
    worst
}

/// Worst error over the metric jet, the map jets and the Christoffel symbols.
pub fn manifest_errors(m: &RandomManifest) -> f64 {
    let mut worst: f64 = 0.0;
    for c in &m.components {
        let (a, b) = jet_errors(c, &m.point);
        worst = worst.max(a).max(b);
    }
    let gj = m.metric.jet(m.point.as_slice()).unwrap();
    for i in 0..m.dim {
        let gp = m.metric.value(shifted(&m.point, i, FD_STEP).as_slice()).unwrap();
        let gm = m.metric.value(shifted(&m.point, i, -FD_STEP).as_slice()).unwrap();
        let fd = (gp - gm) / (2.0 * FD_STEP);
        for (a, b) in gj.d[i].iter().zip(fd.iter()) {
            worst = worst.max(rel_err(*a, *b));
        }
    }
    worst.max(christoffel_error(&m.metric, &m.point))
}
