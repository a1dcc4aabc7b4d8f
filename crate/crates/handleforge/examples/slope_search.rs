//! Search all combinations of short slopes for fillings with trivial
//! fundamental group.

use handleforge::cusps::{attach_geometry, vertex_links};
use handleforge::filling::search_fillings;
use handleforge::group::DEFAULT_BUDGET;
use handleforge::handles::handle_decomposition;
use handleforge::library::{by_name, wielenberg_geometry};

fn main() -> handleforge::Result<()> {
    for name in ["figure-eight", "figure-eight-sister", "wielenberg"] {
        let e = by_name(name)?;
        let hd = handle_decomposition(&e.complex, &e.pairing)?;
        let mut cusps = vertex_links(&hd)?;
        if name == "wielenberg" {
            attach_geometry(&mut cusps, &wielenberg_geometry());
        }
        let r = search_fillings(&hd, &cusps, 1, DEFAULT_BUDGET)?;
        println!("{name}: {} successes, {} failures", r.successes.len(), r.failures.len());
        for a in r.successes.iter().take(3) {
            println!("  ok   {:?}", a.words);
        }
        if let Some(a) = r.failures.first() {
            println!("  fail {:?}: {}", a.words, a.reason);
        }
    }
    Ok(())
}
