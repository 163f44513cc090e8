//! Foliation flags and the product type they suggest.

use quatsub::fixtures::builtin;
use quatsub::lab::product_classification;

fn main() -> quatsub::Result<()> {
    for name in ["flat-product", "polar-warped", "twisted-exp", "heisenberg", "sphere-fiber"] {
        let f = builtin(name)?;
        let p = product_classification(&f.submersion)?;
        println!("{name}: {}", p.label);
        for flags in [&p.horizontal, &p.vertical] {
            println!(
                "  {:?}: geodesic {} ({:.1e}), umbilic {} ({:.1e}), spheric {} ({:.1e})",
                flags.distribution,
                flags.totally_geodesic.holds,
                flags.totally_geodesic.residual,
                flags.umbilic.holds,
                flags.umbilic.residual,
                flags.spheric.holds,
                flags.spheric.residual
            );
        }
    }
    Ok(())
}
