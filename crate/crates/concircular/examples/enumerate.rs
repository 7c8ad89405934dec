//! Counting geometrically inequivalent concircular tensors for eigenvalue
//! multiplicity patterns, and the separable webs of E3.
//!
//! `cargo run --release --example enumerate`

use concircular::enumerate::{count_classes, enumerate_classes, enumerate_webs_e3, StructureSpec};

fn main() -> concircular::error::Result<()> {
    for n in 3..=5 {
        let e = count_classes(&StructureSpec::central(0, StructureSpec::one_double(n)))?;
        let m = count_classes(&StructureSpec::central(1, StructureSpec::one_double(n)))?;
        let h = count_classes(&StructureSpec::spherical(-1, 1, StructureSpec::simple(n)))?;
        println!("n = {n}: one double eigenvalue E {e}, M {m}; simple spectrum on hyperbolic space {h}");
    }
    println!("\nMinkowski 3-space, one double eigenvalue:");
    for c in enumerate_classes(&StructureSpec::central(1, StructureSpec::one_double(3)))? {
        println!("  {}", c.assignment);
    }
    println!("\nseparable webs of E3:");
    for w in enumerate_webs_e3()? {
        println!("  {} ({})", w.label, w.tensor_class);
    }
    Ok(())
}
