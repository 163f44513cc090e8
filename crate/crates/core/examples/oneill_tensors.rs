//! Validate two submersions and evaluate their O'Neill tensors.

use nalgebra::DVector;
use quatsub::fixtures::builtin;
use quatsub::submersion::{bracket, validate_submersion, PointGeometry};

fn main() -> quatsub::Result<()> {
    let polar = builtin("polar")?;
    let v = validate_submersion(&polar.submersion)?;
    println!("polar: riemannian = {}, worst residual {:.2e}", v.is_riemannian, v.worst_residual);
    let geo = PointGeometry::at(&polar.submersion, &DVector::from_vec(vec![1.0, 0.0]))?;
    let e = geo.frame.vertical_basis.column(0).into_owned();
    println!("polar at (1,0): vertical e = {:?}", e.as_slice());
    println!("  T_e e = {:.12?}", geo.oneill_t(&e, &e).as_slice());
    println!("  H     = {:.12?}", geo.mean_curvature().as_slice());

    let heis = builtin("heisenberg")?;
    let geo = PointGeometry::at(&heis.submersion, &DVector::from_vec(vec![0.3, -0.2, 0.5]))?;
    let x = geo.frame.horizontal_basis.column(0).into_owned();
    let y = geo.frame.horizontal_basis.column(1).into_owned();
    let axy = geo.oneill_a(&x, &y);
    let vb = geo.vert(&bracket(&geo.horizontal_field(&x), &geo.horizontal_field(&y)));
    println!("heisenberg: A_X Y = {:.12?}", axy.as_slice());
    println!("  |V[X, Y]| = {:.12}", geo.norm(&vb));
    println!("  tension   = {:.3e}", geo.base_norm(&geo.tension()));
    Ok(())
}
