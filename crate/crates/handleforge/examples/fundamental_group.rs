//! Read a presentation of the fundamental group off the 2-handles and
//! simplify it with Tietze moves.

use handleforge::filling::presentation;
use handleforge::group::{tietze_simplify, DEFAULT_BUDGET};
use handleforge::handles::handle_decomposition;
use handleforge::library::by_name;

fn main() -> handleforge::Result<()> {
    for name in ["cube-halfturn", "wielenberg", "figure-eight", "figure-eight-sister"] {
        let e = by_name(name)?;
        let hd = handle_decomposition(&e.complex, &e.pairing)?;
        let pr = presentation(&hd)?;
        println!("{name}: generators {}", pr.generators.join(" "));
        for r in &pr.relators {
            println!("  {}", pr.word_names(r).join(" "));
        }
        let (betti, torsion) = pr.abelianization();
        println!("  abelianization Z^{betti} {torsion:?}");
        let s = tietze_simplify(&pr, DEFAULT_BUDGET);
        println!("  after {} moves: {} generators, {} relators", s.trace.len(), s.presentation.generators.len(), s.presentation.relators.len());
    }
    Ok(())
}
