//! Validate side-pairings and look at their face cycles and induced maps.

use handleforge::library::{by_name, cube_halfturn};
use handleforge::{face_cycles, induced_face_map, orientation_character, validate_pairing};

fn main() -> handleforge::Result<()> {
    let e = cube_halfturn();
    let report = validate_pairing(&e.complex, &e.pairing);
    println!("cube-halfturn: {} violations", report.violations.len());
    for k in 0..3 {
        let cycles = face_cycles(&e.complex, &e.pairing, k)?;
        println!("  {} cycle(s) of {k}-faces", cycles.len());
        for cy in &cycles {
            println!("    {}", cy.members.join(" -> "));
        }
    }
    let a = e.pairing.get("a").expect("generator a");
    for v in ["v000", "v001", "v010", "v011"] {
        println!("  a: {v} -> {}", induced_face_map(&e.complex, a, v)?);
    }

    for name in ["wielenberg", "rt1011"] {
        let e = by_name(name)?;
        let ch = orientation_character(&e.pairing)?;
        println!("{name}: {} ({:?})", ch.verdict, ch.characters);
    }
    Ok(())
}
