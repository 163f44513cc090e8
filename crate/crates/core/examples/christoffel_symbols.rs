//! Christoffel symbols and covariant derivatives of the polar-coordinate
//! metric `dr^2 + r^2 ds^2`.

use nalgebra::DVector;
use quatsub::riemann::{christoffel, covariant_derivative, lie_bracket, ExprField, MetricField};

fn main() -> quatsub::Result<()> {
    let g = MetricField::parse_grid(&[vec!["1", "0"], vec!["0", "x1^2"]])?;
    let p = DVector::from_vec(vec![2.0, 0.3]);
    let gamma = christoffel(&g, &p)?;
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let v = gamma.get(k, i, j);
                if v != 0.0 {
                    println!("Gamma^{k}_{i}{j} = {v:+.6}");
                }
            }
        }
    }

    let dr = ExprField::parse("1, 0", 2)?;
    let ds = ExprField::parse("0, 1", 2)?;
    println!("nabla_ds ds = {:?}", covariant_derivative(&g, &ds, &ds, &p)?.as_slice());
    println!("nabla_dr ds = {:?}", covariant_derivative(&g, &dr, &ds, &p)?.as_slice());

    let flat = MetricField::euclidean(2);
    let rot = ExprField::parse("-x2, x1", 2)?;
    let rad = ExprField::parse("x1, x2", 2)?;
    let q = DVector::from_vec(vec![1.0, 0.0]);
    println!("flat nabla_rot rot at (1,0) = {:?}", covariant_derivative(&flat, &rot, &rot, &q)?.as_slice());
    println!("[rad, rot] at (1,0) = {:?}", lie_bracket(&rad, &rot, &q)?.as_slice());
    Ok(())
}
