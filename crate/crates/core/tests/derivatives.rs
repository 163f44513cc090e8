//! Jets and Christoffel symbols against central finite differences.

mod common;

use common::{manifest_errors, random_manifest, FD_TOLERANCE};

#[test]
fn hundred_random_manifests() {
    for seed in 0..100 {
        let m = random_manifest(seed);
        let err = manifest_errors(&m);
        assert!(err < FD_TOLERANCE, "seed {seed}: error {err:e}, metric {:?}", m.metric_source);
    }
}

#[test]
fn christoffel_is_torsion_free_and_metric_compatible() {
    for seed in 100..120 {
        let m = random_manifest(seed);
        let n = m.dim;
        let gamma = quatsub::riemann::christoffel(&m.metric, &m.point).unwrap();
        let gj = m.metric.jet(m.point.as_slice()).unwrap();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert!((gamma.get(k, i, j) - gamma.get(k, j, i)).abs() < 1e-12);
                }
            }
        }
        // ∂_k g_ij = g(∇_k ∂_i, ∂_j) + g(∂_i, ∇_k ∂_j)
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut rhs = 0.0;
                    for l in 0..n {
                        rhs += gamma.get(l, k, i) * gj.value[(l, j)] + gamma.get(l, k, j) * gj.value[(i, l)];
                    }
                    assert!((gj.d[k][(i, j)] - rhs).abs() < 1e-10, "seed {seed}");
                }
            }
        }
    }
}
