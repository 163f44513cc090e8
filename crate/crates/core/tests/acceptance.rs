//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on failure.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use quatsub::classify::{classify, dimension_obstruction, Overall};
use quatsub::fixtures::{builtin, list_fixtures, Fixture};
use quatsub::lab::{
    foliation_flags, integrability_sides, product_classification, spheric_residual, Distribution, Lab,
    ProductType, TheoremId, TheoremReport, KEY_STEP_TOLERANCE,
};
use quatsub::linalg::subspace_gap;
use quatsub::quaternionic::RTag;
use quatsub::sampling::SamplePlan;
use quatsub::submersion::{harmonicity, mean_curvatures, split_at, PointGeometry};
use quatsub::Result;

type Outcome = Result<(bool, String)>;
type Check = fn() -> Outcome;

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn unit(dim: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(dim);
    e[i - 1] = 1.0;
    e
}

fn fixture(name: &str, samples: usize) -> Result<Fixture> {
    let mut f = builtin(name)?;
    f.submersion.samples = SamplePlan::low_discrepancy(samples, 42);
    Ok(f)
}

fn run(f: &Fixture, id: TheoremId) -> Result<TheoremReport> {
    Lab::for_fixture(f)?.run(id)
}

fn example_3_1() -> Outcome {
    let start = Instant::now();
    let f = builtin("example-3-1")?;
    let t = f.structure.as_ref().expect("structure");
    let c = classify(&f.submersion, t)?;
    let mut ker = DMatrix::zeros(12, 3);
    for (c, i) in [1, 5, 9].iter().enumerate() {
        ker.set_column(c, &unit(12, *i));
    }
    let mut worst_angle: f64 = 0.0;
    for p in f.submersion.sample_points()? {
        let s = split_at(&f.submersion, &p)?;
        worst_angle = worst_angle.max(subspace_gap(&s.vertical_basis, &ker, &DMatrix::identity(12, 12)));
    }
    let [i, j, k] = t.at(&DVector::zeros(12))?;
    let expected = [(&i, [2, 6, 10]), (&j, [3, 7, 11]), (&k, [4, 8, 12])];
    let mut images_exact = true;
    for (r, targets) in expected {
        for (src, dst) in [1, 5, 9].iter().zip(targets) {
            images_exact &= r * unit(12, *src) == unit(12, dst);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = c.overall == Overall::HAntiInvariant && worst_angle < 1e-10 && images_exact && secs < 1.0;
    Ok((
        ok,
        format!("{}, vertical angle {worst_angle:.1e}, images exact {images_exact}, {secs:.2} s", c.overall),
    ))
}

fn example_3_2() -> Outcome {
    let f = builtin("example-3-2")?;
    let t = f.structure.as_ref().expect("structure");
    let c = classify(&f.submersion, t)?;
    let h = harmonicity(&f.submersion)?;
    let excluded = dimension_obstruction(&f.submersion).h_anti_invariant_excluded;
    let s2 = 2f64.sqrt();
    let (v1, v2) = (v(&[0.0, 1.0, -1.0, 0.0]) / s2, v(&[1.0, 0.0, 0.0, -1.0]) / s2);
    let (x1, x2) = (v(&[0.0, 1.0, 1.0, 0.0]) / s2, v(&[1.0, 0.0, 0.0, 1.0]) / s2);
    let [i, j, k] = t.at(&DVector::zeros(4))?;
    let pairs = [
        (&i * &v1, -&x2),
        (&i * &v2, x1.clone()),
        (&j * &v1, v2.clone()),
        (&j * &v2, -&v1),
        (&k * &v1, x1.clone()),
        (&k * &v2, x2.clone()),
    ];
    let image_err = pairs.iter().map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
    let ok = c.overall == Overall::HLagrangian
        && h.is_harmonic
        && h.worst_trace_residual < 1e-9
        && excluded
        && image_err < 1e-14;
    Ok((
        ok,
        format!(
            "{}, harmonic residual {:.1e}, anti-invariant excluded {excluded}, image error {image_err:.1e}",
            c.overall, h.worst_trace_residual
        ),
    ))
}

fn oneill_identities() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut count = 0;
    for info in list_fixtures() {
        let f = fixture(info.name, 100)?;
        let r = run(&f, TheoremId::OneillIdentities)?;
        ok &= r.property_holds && r.total_points == 100;
        worst = worst.max(r.worst_direct_residual);
        count += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= worst < 1e-7 && secs < 10.0;
    Ok((ok, format!("{count} fixtures x 100 points, worst {worst:.1e}, {secs:.2} s")))
}

fn polar_and_heisenberg() -> Outcome {
    let polar = builtin("polar")?.submersion;
    let geo = PointGeometry::at(&polar, &v(&[1.0, 0.0]))?;
    let t = geo.oneill_t(&v(&[0.0, 1.0]), &v(&[0.0, 1.0]));
    let t_err = (t - v(&[-1.0, 0.0])).amax();

    let mut h_err: f64 = 0.0;
    for k in 0..20 {
        let r = 0.6 + 1.3 * k as f64 / 19.0;
        let theta = 0.3 * (k as f64).sin();
        let p = v(&[r * theta.cos(), r * theta.sin()]);
        let expected = -&p / (r * r);
        h_err = h_err.max((mean_curvatures(&polar, &p)?.h - expected).amax());
    }

    let heis = fixture("heisenberg", 20)?;
    let mut a_err: f64 = 0.0;
    for q in heis.submersion.sample_points()? {
        let geo = PointGeometry::at(&heis.submersion, &q)?;
        let x = v(&[1.0, 0.0, -q[1] / 2.0]);
        let y = v(&[0.0, 1.0, q[0] / 2.0]);
        a_err = a_err.max((geo.oneill_a(&x, &y) - v(&[0.0, 0.0, 0.5])).amax());
    }
    let r = run(&heis, TheoremId::HorizontalIntegrability)?;
    let bracket_err = r
        .points
        .iter()
        .map(|p| (p.direct_residual - 1.0).abs())
        .fold(0.0, f64::max);

    let ok = t_err < 1e-6 && h_err < 1e-6 && a_err < 1e-6 && !r.property_holds && bracket_err < 1e-6;
    Ok((
        ok,
        format!(
            "T_V V error {t_err:.1e}, H error {h_err:.1e} (20 radii), A_X Y error {a_err:.1e}, \
             non-integrable {}, |V[X,Y]| - 1 = {bracket_err:.1e}",
            !r.property_holds
        ),
    ))
}

fn equivalences() -> Outcome {
    let ids = [
        TheoremId::HorizontalGeodesic,
        TheoremId::VerticalGeodesic,
        TheoremId::TotallyGeodesic,
        TheoremId::Harmonic,
        TheoremId::VerticalUmbilic,
    ];
    let mut ok = true;
    let mut bad = Vec::new();
    for name in ["example-3-1", "example-3-2", "gibbons-hawking-v1"] {
        let f = fixture(name, 64)?;
        let lab = Lab::for_fixture(&f)?;
        for id in ids {
            let r = lab.run(id)?;
            let all_agree = r.points.iter().all(|p| p.agree);
            if !(r.equivalence_ok && all_agree && r.applicable_points == r.total_points) {
                ok = false;
                bad.push(format!("{name}/{id}"));
            }
        }
    }

    let gh = fixture("gibbons-hawking-v1", 64)?;
    let r = run(&gh, TheoremId::HorizontalIntegrability)?;
    let identity = r.identity.expect("integrability identity");
    ok &= identity.worst_residual < 1e-6 && identity.largest_term > 1e-3;

    // the same identity on random horizontal pairs
    let t = gh.structure.as_ref().expect("structure");
    let mut side_err: f64 = 0.0;
    let mut largest: f64 = 0.0;
    for (n, p) in gh.submersion.sample_points()?.iter().take(8).enumerate() {
        let frame = split_at(&gh.submersion, p)?;
        let h = &frame.horizontal_basis;
        let a = 0.3 + 0.1 * n as f64;
        let x = h.column(0) * a.cos() + h.column(1) * a.sin();
        let y = h.column(2) * 0.7 - h.column(0) * 0.4;
        let e = frame.vertical_basis.column(0).into_owned();
        for tag in RTag::ALL {
            let s = integrability_sides(&gh.submersion, t, tag, &x, &y, &e, p)?;
            if s.applicable {
                side_err = side_err.max(s.identity_residual);
                largest = largest.max(s.lhs.abs()).max(s.rhs.abs()).max(s.bracket.abs());
            }
        }
    }
    ok &= side_err < 1e-6 && largest > 1e-3;

    let detail = if bad.is_empty() {
        "all five agree at every point on three fixtures".to_string()
    } else {
        format!("disagreement: {}", bad.join(", "))
    };
    Ok((
        ok,
        format!(
            "{detail}; identity residual {:.1e} (largest term {:.2}), random pairs {side_err:.1e} (largest {largest:.2})",
            identity.worst_residual, identity.largest_term
        ),
    ))
}

fn horizontal_umbilic() -> Outcome {
    let mut worst_key: f64 = 0.0;
    for info in list_fixtures() {
        let f = fixture(info.name, 64)?;
        let r = run(&f, TheoremId::HorizontalUmbilic)?;
        for rec in r.records.iter().filter(|r| r.condition == "g(A_X V, X) = 0") {
            worst_key = worst_key.max(rec.residual);
        }
        worst_key = worst_key.max(r.worst_direct_residual);
    }

    let flat = fixture("flat-product", 64)?;
    let flags = foliation_flags(&flat.submersion, Distribution::Horizontal)?;
    let mut h_perp: f64 = 0.0;
    for p in flat.submersion.sample_points()? {
        h_perp = h_perp.max(mean_curvatures(&flat.submersion, &p)?.h_perp.amax());
    }
    let ok = worst_key < KEY_STEP_TOLERANCE && flags.umbilic.holds && h_perp < 1e-9 && flags.totally_geodesic.holds;
    Ok((
        ok,
        format!(
            "key step {worst_key:.1e}; flat-product umbilic {}, H_perp {h_perp:.1e}, geodesic {}",
            flags.umbilic.holds, flags.totally_geodesic.holds
        ),
    ))
}

fn product_types() -> Outcome {
    let flat = product_classification(&fixture("flat-product", 64)?.submersion)?;
    let warped_fixture = fixture("polar-warped", 64)?;
    let warped = product_classification(&warped_fixture.submersion)?;
    let twisted_fixture = fixture("twisted-exp", 64)?;
    let twisted = product_classification(&twisted_fixture.submersion)?;
    let geo = PointGeometry::at(&twisted_fixture.submersion, &v(&[1.0, 1.0]))?;
    let spheric = spheric_residual(&twisted_fixture.submersion, &geo, Distribution::Vertical)?;
    let ok = flat.product_type == ProductType::RiemannianProduct
        && warped.product_type == ProductType::Warped
        && warped.vertical.spheric.holds
        && warped.vertical.spheric.residual < 1e-4
        && twisted.product_type == ProductType::Twisted
        && !twisted.vertical.spheric.holds
        && spheric > 0.1;
    Ok((
        ok,
        format!(
            "flat {}, polar-warped {} (spheric {:.1e}), twisted-exp {} (spheric at (1,1) {spheric:.3})",
            flat.product_type, warped.product_type, warped.vertical.spheric.residual, twisted.product_type
        ),
    ))
}

fn derivatives() -> Outcome {
    let worst = (0..100)
        .map(|seed| common::manifest_errors(&common::random_manifest(seed)))
        .fold(0.0, f64::max);
    Ok((worst < common::FD_TOLERANCE, format!("100 manifests, worst relative error {worst:.1e}")))
}

fn structure_identities() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["example-3-1", "gibbons-hawking-v1"] {
        let f = fixture(name, 20)?;
        let r = run(&f, TheoremId::StructureIdentities)?;
        ok &= r.property_holds && r.applicable_points == 20 && r.worst_direct_residual < 1e-7;
        parts.push(format!(
            "{name} {:.1e} ({} of 20 applicable)",
            r.worst_direct_residual, r.applicable_points
        ));
    }
    Ok((ok, parts.join(", ")))
}

const MANIFEST: &str = r#"
name = "linear-anti-invariant"
structure = "canonical"

[total]
dim = 12
metric = "euclidean"
box = [[-1, 1], [-1, 1], [-1, 1], [-1, 1], [-1, 1], [-1, 1],
       [-1, 1], [-1, 1], [-1, 1], [-1, 1], [-1, 1], [-1, 1]]

[base]
dim = 9
metric = "euclidean"

[map]
components = ["x10", "x11", "x12", "x4", "x3", "x2", "x8", "x6", "x7"]

[samples]
mode = "lowdiscrepancy"
count = 64
seed = 42
"#;

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir()?;
    let manifest = dir.path().join("linear.toml");
    std::fs::write(&manifest, MANIFEST)?;
    let mut outputs = Vec::new();
    for n in 0..2 {
        let out = dir.path().join(format!("run{n}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_quatsub"))
            .args(["report", "--all", "--seed", "42", "--manifest"])
            .arg(&manifest)
            .arg("--json")
            .arg(&out)
            .output()?;
        if !status.status.success() {
            return Ok((false, format!("run {n} exited with {:?}", status.status.code())));
        }
        outputs.push(std::fs::read(&out)?);
    }
    let same = outputs[0] == outputs[1];
    Ok((same, format!("two runs, {} bytes, identical {same}", outputs[0].len())))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("linear anti-invariant example", example_3_1),
        ("linear Lagrangian example", example_3_2),
        ("O'Neill identities", oneill_identities),
        ("polar and Heisenberg tensors", polar_and_heisenberg),
        ("equivalence checks", equivalences),
        ("horizontal umbilic", horizontal_umbilic),
        ("product types", product_types),
        ("derivatives vs finite differences", derivatives),
        ("structure identities", structure_identities),
        ("reproducible reports", reproducibility),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("criterion {} ({name}): {} {detail}", n + 1, if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
