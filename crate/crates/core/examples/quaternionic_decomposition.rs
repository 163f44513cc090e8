//! Split `R X` into vertical and horizontal parts for the canonical triple
//! on the twelve-dimensional example.

use quatsub::fixtures::builtin;
use quatsub::quaternionic::{check_mu_invariance, decompose, validate_structure, RTag};
use quatsub::submersion::PointGeometry;

fn main() -> quatsub::Result<()> {
    let f = builtin("example-3-1")?;
    let triple = f.structure.as_ref().expect("structure");
    let points = f.submersion.sample_points()?;
    let v = validate_structure(triple, &f.submersion.total, &points)?;
    println!("structure valid: {} (parallel residual {:.1e})", v.valid, v.parallel);

    let geo = PointGeometry::at(&f.submersion, &points[0])?;
    let x = geo.frame.horizontal_basis.column(0).into_owned();
    for tag in RTag::ALL {
        let d = decompose(triple, tag, &geo.frame, &x, &f.submersion.total)?;
        println!(
            "{tag}: |B X| = {:.6}, |C X| = {:.6}, dim mu = {}, split residual {:.1e}",
            d.b.norm(),
            d.c.norm(),
            d.mu_basis.ncols(),
            d.split_residual
        );
        let mu = check_mu_invariance(triple, tag, &geo.frame, &f.submersion.total)?;
        println!("   R(mu) in mu: {}", mu.pass);
    }
    Ok(())
}
