//! Handle counts and homology for the bundled closed examples.

use handleforge::handles::{chain_complex, euler_characteristic, handle_decomposition, homology};
use handleforge::library::by_name;

fn main() -> handleforge::Result<()> {
    for name in ["circle", "cube", "cube-halfturn", "tesseract"] {
        let e = by_name(name)?;
        let hd = handle_decomposition(&e.complex, &e.pairing)?;
        let h = homology(&chain_complex(&hd)?);
        println!(
            "{name:<14} handles {:?}  chi {}  betti {:?}  torsion {:?}",
            hd.counts(),
            euler_characteristic(&hd),
            h.betti,
            h.torsion
        );
    }
    Ok(())
}
