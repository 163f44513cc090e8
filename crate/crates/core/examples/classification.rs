//! Classify the two linear examples against `I`, `J`, `K`.

use quatsub::classify::classify;
use quatsub::fixtures::builtin;

fn main() -> quatsub::Result<()> {
    for name in ["example-3-1", "example-3-2", "gibbons-hawking-v1", "flat-product"] {
        let f = builtin(name)?;
        let c = classify(&f.submersion, f.structure.as_ref().expect("structure"))?;
        println!("{name}: {} (worst angle {:.1e})", c.overall, c.worst_residual);
        for r in &c.per_r {
            println!("  {}: {:?}", r.tag, r.verdict);
        }
        for n in &c.obstruction.notes {
            println!("  note: {n}");
        }
    }
    Ok(())
}
