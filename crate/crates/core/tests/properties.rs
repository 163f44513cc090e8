//! Property-based invariants of the tensor engine, the classifier and the
//! expression layer.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use quatsub::classify::{classify_frame, classify_point};
use quatsub::expr::parse_expr;
use quatsub::fixtures::builtin;
use quatsub::linalg::FieldJet;
use quatsub::quaternionic::RTag;
use quatsub::sampling::SamplePlan;
use quatsub::submersion::{PointGeometry, SplitFrame};

const CURVED: [&str; 5] = ["gibbons-hawking-v1", "heisenberg", "twisted-exp", "sphere-fiber", "polar-warped"];

/// A point of the fixture's box from unit coordinates.
fn point_in(name: &str, unit: &[f64]) -> (quatsub::fixtures::Fixture, DVector<f64>) {
    let f = builtin(name).unwrap();
    let b = &f.submersion.domain_box().bounds;
    let p = DVector::from_iterator(
        b.len(),
        b.iter().zip(unit.iter().cycle()).map(|((lo, hi), t)| lo + (0.02 + 0.96 * t) * (hi - lo)),
    );
    (f, p)
}

fn vector(n: usize, raw: &[f64]) -> DVector<f64> {
    DVector::from_iterator(n, raw.iter().cycle().cloned().take(n))
}

prop_compose! {
    fn unit_vec(len: usize)(v in prop::collection::vec(0.0f64..1.0, len)) -> Vec<f64> { v }
}
prop_compose! {
    fn signed_vec(len: usize)(v in prop::collection::vec(-1.0f64..1.0, len)) -> Vec<f64> { v }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tensors_do_not_depend_on_the_extension(
        which in 0usize..CURVED.len(),
        unit in unit_vec(4),
        u in signed_vec(4),
        w in signed_vec(4),
        d in signed_vec(16),
    ) {
        let (f, p) = point_in(CURVED[which], &unit);
        let geo = PointGeometry::at(&f.submersion, &p).unwrap();
        let n = geo.dim();
        let (u, w) = (vector(n, &u), vector(n, &w));
        let ext = FieldJet { value: w.clone(), d: DMatrix::from_iterator(n, n, d.iter().cycle().cloned().take(n * n)) };
        let t = geo.oneill_t(&u, &w);
        let a = geo.oneill_a(&u, &w);
        prop_assert!((geo.oneill_t_field(&u, &ext) - &t).amax() < 1e-10);
        prop_assert!((geo.oneill_a_field(&u, &ext) - &a).amax() < 1e-10);
        // tensorial in the first slot too
        prop_assert!((geo.oneill_t(&(&u * 2.5), &w) - &t * 2.5).amax() < 1e-10);
    }

    #[test]
    fn tensor_symmetries(which in 0usize..CURVED.len(), unit in unit_vec(4), a in signed_vec(4), b in signed_vec(4)) {
        let (f, p) = point_in(CURVED[which], &unit);
        let geo = PointGeometry::at(&f.submersion, &p).unwrap();
        let n = geo.dim();
        let (a, b) = (vector(n, &a), vector(n, &b));
        let (x, y) = (geo.horiz(&a), geo.horiz(&b));
        prop_assert!((geo.oneill_a(&x, &y) + geo.oneill_a(&y, &x)).amax() < 1e-10);
        let (u, v) = (geo.vert(&a), geo.vert(&b));
        prop_assert!((geo.oneill_t(&u, &v) - geo.oneill_t(&v, &u)).amax() < 1e-10);
        // T reverses the distributions, A too
        prop_assert!(geo.vert(&geo.oneill_t(&u, &v)).amax() < 1e-10);
        prop_assert!(geo.horiz(&geo.oneill_a(&x, &y)).amax() < 1e-10);
        let s = geo.second_fundamental_form(&a, &b) - geo.second_fundamental_form(&b, &a);
        prop_assert!(s.amax() < 1e-10);
    }

    #[test]
    fn projectors_split_orthogonally(which in 0usize..CURVED.len(), unit in unit_vec(4), a in signed_vec(4), b in signed_vec(4)) {
        let (f, p) = point_in(CURVED[which], &unit);
        let geo = PointGeometry::at(&f.submersion, &p).unwrap();
        let n = geo.dim();
        let (a, b) = (vector(n, &a), vector(n, &b));
        prop_assert!((geo.vert(&a) + geo.horiz(&a) - &a).amax() < 1e-12);
        prop_assert!((geo.vert(&geo.vert(&a)) - geo.vert(&a)).amax() < 1e-12);
        prop_assert!(geo.inner(&geo.vert(&a), &geo.horiz(&b)).abs() < 1e-12);
        prop_assert!(geo.push(&geo.vert(&a)).amax() < 1e-12);
    }

    #[test]
    fn classifier_ignores_vertical_basis_rotation(angle in 0.0f64..6.3, unit in unit_vec(4)) {
        let (f, p) = point_in("example-3-2", &unit);
        let t = f.structure.as_ref().unwrap();
        let geo = PointGeometry::at(&f.submersion, &p).unwrap();
        let base = classify_frame(0, &geo.frame, &t.at(&p).unwrap(), geo.g()).unwrap();
        let (c, s) = (angle.cos(), angle.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let swapped = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        for q in [rot, swapped] {
            let frame = SplitFrame { vertical_basis: &geo.frame.vertical_basis * q, ..geo.frame.clone() };
            let other = classify_frame(0, &frame, &t.at(&p).unwrap(), geo.g()).unwrap();
            prop_assert_eq!(other.overall, base.overall);
            for tag in RTag::ALL {
                prop_assert_eq!(other.verdict(tag), base.verdict(tag));
            }
        }
    }

    #[test]
    fn expressions_round_trip_through_display(seed in 0u64..10_000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.random_range(1..=4);
        let src = format!("{:.3}*x1^2 + sin({:.3}*x{dim}) - exp(-x1)/(2 + cos(x{dim}))", rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let e = parse_expr(&src, dim).unwrap();
        let again = parse_expr(&e.to_string(), dim).unwrap();
        let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        prop_assert!((e.eval(&p).unwrap() - again.eval(&p).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn classifier_is_stable_under_resampling() {
    for name in ["example-3-1", "example-3-2", "flat-product", "gibbons-hawking-v0", "gibbons-hawking-v1"] {
        let f = builtin(name).unwrap();
        let t = f.structure.as_ref().unwrap();
        let verdicts: Vec<_> = [1u64, 2, 3]
            .iter()
            .map(|seed| {
                let pts = SamplePlan::low_discrepancy(8, *seed).points(f.submersion.domain_box()).unwrap();
                let overall: Vec<_> = pts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| classify_point(&f.submersion, t, i, p).unwrap().overall)
                    .collect();
                assert!(overall.windows(2).all(|w| w[0] == w[1]), "{name}");
                overall[0]
            })
            .collect();
        assert!(verdicts.windows(2).all(|w| w[0] == w[1]), "{name}");
    }
}
