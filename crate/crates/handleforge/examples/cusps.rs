//! Cusp cross-sections of the Wielenberg manifold: peripheral bases and the
//! shortest slopes, measured on the bundled horosphere geometry.

use handleforge::cusps::{attach_geometry, classify_cusp, enumerate_slopes, periphery, slope_length, vertex_links, word_names};
use handleforge::handles::handle_decomposition;
use handleforge::library::{wielenberg, wielenberg_geometry};

fn main() -> handleforge::Result<()> {
    let e = wielenberg();
    let hd = handle_decomposition(&e.complex, &e.pairing)?;
    let mut cusps = vertex_links(&hd)?;
    attach_geometry(&mut cusps, &wielenberg_geometry());
    for s in &cusps {
        let cl = classify_cusp(s);
        println!("cusp {} at {}: {} (link cells {:?})", s.index, s.representative, cl.verdict, s.complex.counts());
        let per = periphery(&hd, s)?;
        let (m, l) = &per.basis;
        println!("  m = {:<20} length {:.4}", word_names(&hd, &m.word(&hd)?).join(" "), slope_length(&hd, s, m)?);
        println!("  l = {:<20} length {:.4}", word_names(&hd, &l.word(&hd)?).join(" "), slope_length(&hd, s, l)?);
        for r in enumerate_slopes(&hd, s, 1)?.iter().take(4) {
            println!("    {:?} {:.4} {}", r.slope.class, r.length.unwrap_or(f64::NAN), word_names(&hd, &r.slope.word(&hd)?).join(" "));
        }
    }
    Ok(())
}
