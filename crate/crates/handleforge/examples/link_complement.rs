//! Fill the three Wielenberg cusps along the bundled meridians: the result
//! is S³, so the manifold is the complement of the link formed by the cores.

use handleforge::cusps::vertex_links;
use handleforge::filling::{certify_sphere, fill, instruction, link_exterior};
use handleforge::group::DEFAULT_BUDGET;
use handleforge::handles::handle_decomposition;
use handleforge::library::{wielenberg, wielenberg_meridians};

fn main() -> handleforge::Result<()> {
    let e = wielenberg();
    let hd = handle_decomposition(&e.complex, &e.pairing)?;
    let cusps = vertex_links(&hd)?;
    let ins = wielenberg_meridians().iter().map(|d| instruction(&hd, &cusps, d)).collect::<handleforge::Result<Vec<_>>>()?;
    let filled = fill(&hd, &cusps, &ins)?;
    let report = certify_sphere(&filled, DEFAULT_BUDGET)?;
    println!("handles {:?} -> {:?}", hd.counts(), filled.counts());
    for m in &report.trace {
        println!("  {}. {}: {}", m.step, m.kind, m.detail);
    }
    println!("verdict: {}", report.verdict);
    for c in link_exterior(&hd, &cusps, &ins)? {
        println!("  component at {}: meridian {} / longitude {}", c.cusp, c.meridian.join(" "), c.longitude.join(" "));
    }
    Ok(())
}
