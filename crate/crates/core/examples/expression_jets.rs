//! Parse an expression and read its value, gradient and Hessian at a point.

use quatsub::expr::{parse_expr, parse_map};

fn main() -> quatsub::Result<()> {
    let f = parse_expr("x1^2*sin(x2) + exp(x1*x2)", 2)?;
    let p = [0.5, 1.0];
    let jet = f.jet(&p)?;
    println!("f(p)      = {:.12}", jet.value);
    println!("grad f(p) = {:.12?}", jet.grad.as_slice());
    println!("hess f(p) = {:.12}", jet.hess);

    let map = parse_map("sqrt(x1^2 + x2^2), x1*x2", 2)?;
    println!("F(p)      = {:.12?}", map.value(&p)?.as_slice());
    println!("F_*(p)    = {:.12}", map.jacobian(&p)?);

    match parse_expr("x1 + * x2", 2) {
        Err(e) => println!("parse error: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
