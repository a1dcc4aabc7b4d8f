//! The orientation double cover of the 24-cell manifold: five flat cusps,
//! each filled along a fiber, giving a homotopy 4-sphere.

use handleforge::cusps::{classify_cusp, vertex_links};
use handleforge::filling::{certify_sphere, fill, instruction};
use handleforge::group::DEFAULT_BUDGET;
use handleforge::handles::handle_decomposition;
use handleforge::library::{rt_double_cover, rt_fibers};

fn main() -> handleforge::Result<()> {
    let e = rt_double_cover();
    let hd = handle_decomposition(&e.complex, &e.pairing)?;
    println!("handles {:?}", hd.counts());
    let cusps = vertex_links(&hd)?;
    for s in &cusps {
        println!("  cusp {}: {}", s.representative, classify_cusp(s).verdict);
    }
    let ins = rt_fibers().iter().map(|d| instruction(&hd, &cusps, d)).collect::<handleforge::Result<Vec<_>>>()?;
    let filled = fill(&hd, &cusps, &ins)?;
    let r = certify_sphere(&filled, DEFAULT_BUDGET)?;
    println!("filled {:?}, chi {}, betti {:?}", r.counts, r.euler, r.homology.betti);
    println!("{} Tietze moves; verdict: {}", r.trace.len(), r.verdict);
    Ok(())
}
