//! Write handle diagrams for the bundled examples as SVG and JSON.

use handleforge::cusps::vertex_links;
use handleforge::diagram::{emit, scene3, scene4, track_meridians, RenderOptions};
use handleforge::handles::handle_decomposition;
use handleforge::library::{by_name, layout, wielenberg_meridians};

fn main() -> handleforge::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "diagrams".into());
    std::fs::create_dir_all(&dir)?;
    for name in ["cube-halfturn", "tesseract", "wielenberg", "rt1011"] {
        let e = by_name(name)?;
        let hd = handle_decomposition(&e.complex, &e.pairing)?;
        let l = layout(name)?;
        let mut scene = if hd.n == 3 { scene3(&hd, &l)? } else { scene4(&hd, &l)? };
        if name == "wielenberg" {
            scene.tracked_curves = track_meridians(&hd, &vertex_links(&hd)?, &l, &wielenberg_meridians())?;
        }
        for f in &scene.feet {
            println!("{name}: {} pairs {} / {} ({})", f.handle, f.regions[0].facet, f.regions[1].facet, f.descriptor);
        }
        println!("{name}: {} circuits, {} triangles", scene.arcs.len(), scene.triangles.len());
        std::fs::write(format!("{dir}/{name}.svg"), emit(&scene, "svg", &RenderOptions::default())?)?;
        std::fs::write(format!("{dir}/{name}.json"), emit(&scene, "json", &RenderOptions::default())?)?;
    }
    Ok(())
}
