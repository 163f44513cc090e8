//! Run every theorem check on the curved Gibbons-Hawking fixture and show
//! that conditions and geometry agree even where the property fails.

use quatsub::fixtures::builtin;
use quatsub::lab::Lab;

fn main() -> quatsub::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "gibbons-hawking-v1".into());
    let f = builtin(&name)?;
    let lab = Lab::for_fixture(&f)?;
    for r in lab.run_all()? {
        println!(
            "{:<26} {:<12} property {:<5} agree {:<5} direct {:.2e} condition {:.2e}",
            r.id.as_str(),
            r.verdict.to_string(),
            r.property_holds,
            r.equivalence_ok,
            r.worst_direct_residual,
            r.worst_condition_residual
        );
        if let Some(i) = &r.identity {
            println!("{:<26} identity residual {:.1e}, largest term {:.3}", "", i.worst_residual, i.largest_term);
        }
    }
    Ok(())
}
