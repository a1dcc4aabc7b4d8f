mod common;

use common::*;
use handleforge::complex::CellComplex;
use handleforge::diagram::{
    diagram3, diagram4, emit, norm_squared, roman, rt_coordinates, scene3, scene4, DiagramScene, Layout, RenderOptions, LAYOUT_SCHEMA,
};
use handleforge::error::Error;
use handleforge::handles::{handle_decomposition, HandleDecomposition};
use handleforge::library::{self, by_name, rt_facets, rt_label};
use handleforge::pairing::{face_cycles, SidePairing, SidePairingSet};
use handleforge::surd::Surd;
use num_rational::Rational64;
use std::collections::BTreeMap;

fn scene(name: &str) -> (HandleDecomposition, DiagramScene) {
    let hd = decomposition(name);
    let layout = library::layout(name).unwrap();
    let s = if hd.n == 3 { scene3(&hd, &layout) } else { scene4(&hd, &layout) }.unwrap();
    (hd, s)
}

fn facets_containing(c: &CellComplex, face: &str) -> Vec<String> {
    let f = c.index_of(face).unwrap();
    let mut v: Vec<String> =
        c.cofaces(f).iter().filter(|&&(x, _)| c.cell(x).dim + 1 == c.dim()).map(|&(x, _)| c.id(x).to_string()).collect();
    v.sort();
    v
}

const SCENES: [&str; 6] = ["cube", "cube-halfturn", "wielenberg", "tesseract", "rt1011", "rt1011-double"];

#[test]
fn arcs_run_between_the_facets_of_their_face() {
    for name in SCENES {
        let (hd, s) = scene(name);
        let c = hd.complex();
        for circuit in &s.arcs {
            for seg in &circuit.segments {
                let mut ends = vec![seg.from.clone(), seg.to.clone()];
                ends.sort();
                assert_eq!(ends, facets_containing(c, &seg.face), "{name} {}", seg.face);
            }
        }
    }
}

#[test]
fn one_arc_per_codimension_two_face() {
    for name in SCENES {
        let (hd, s) = scene(name);
        let c = hd.complex();
        let e = by_name(name).unwrap();
        let cycles = face_cycles(&e.complex, &e.pairing, hd.n - 2).unwrap();
        assert_eq!(s.arcs.len(), cycles.len(), "{name}");
        assert_eq!(s.arc_count(), c.cells_of_dim(hd.n - 2).len(), "{name}");
        assert_eq!(s.feet.len(), e.pairing.len(), "{name}");
        let mut seen: Vec<&str> = s.arcs.iter().flat_map(|a| a.segments.iter().map(|g| g.face.as_str())).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), c.cells_of_dim(hd.n - 2).len(), "{name}");
    }
}

// Leaving through a foot of generator g, the circuit re-enters through the
// partner foot.
#[test]
fn consecutive_segments_follow_the_word() {
    for name in SCENES {
        let (_, s) = scene(name);
        let e = by_name(name).unwrap();
        for circuit in &s.arcs {
            let k = circuit.segments.len();
            assert_eq!(circuit.word.len(), k, "{name}");
            for i in 0..k {
                let letter = &circuit.word[i];
                let (g, inverse) = match letter.strip_suffix("^-1") {
                    Some(g) => (g, true),
                    None => (letter.as_str(), false),
                };
                let p = e.pairing.get(g).unwrap();
                let (exit, entry) = if inverse { (&p.target, &p.source) } else { (&p.source, &p.target) };
                assert_eq!(&circuit.segments[i].to, exit, "{name} {} letter {i}", circuit.label);
                assert_eq!(&circuit.segments[(i + 1) % k].from, entry, "{name} {} letter {i}", circuit.label);
            }
        }
    }
}

#[test]
fn scene_counts() {
    let (_, cube) = scene("cube");
    assert_eq!((cube.feet.len(), cube.arcs.len(), cube.arc_count()), (3, 3, 12));
    let labels: Vec<&str> = cube.arcs.iter().map(|a| a.label.as_str()).collect();
    assert_eq!(labels, ["I", "II", "III"]);
    let (_, w) = scene("wielenberg");
    assert_eq!((w.feet.len(), w.arcs.len()), (4, 3));
    let (_, t) = scene("tesseract");
    assert_eq!((t.feet.len(), t.arcs.len(), t.arc_count(), t.triangles.len()), (4, 6, 24, 32));
    let (_, q) = scene("rt1011");
    assert_eq!((q.feet.len(), q.arcs.len(), q.arc_count()), (12, 24, 96));
    let in_plane: Vec<&str> = q.feet.iter().filter(|f| f.descriptor == "reflection-in-plane").map(|f| f.handle.as_str()).collect();
    assert_eq!(in_plane, ["e", "f", "g", "h"]);
    let (_, d) = scene("rt1011-double");
    assert_eq!((d.feet.len(), d.arcs.len()), (24, 48));
}

#[test]
fn triangles_collect_the_squares_around_each_edge() {
    let (hd, t) = scene("tesseract");
    let c = hd.complex();
    for tri in &t.triangles {
        assert_eq!(tri.arcs.len(), 3, "{}", tri.face);
        let e = c.index_of(&tri.face).unwrap();
        for a in &tri.arcs {
            let f = c.index_of(a).unwrap();
            assert_eq!(c.cell(f).dim, 2);
            assert!(c.closure(f).contains(&e));
        }
    }
}

// Each 2-handle gets one parallel circle; its pieces cover every member
// square with an edge of one edge cycle, and the triangles of that cycle's
// edges are exactly the triangles of that cycle.
#[test]
fn parallel_circles_are_consistent() {
    let (hd, t) = scene("tesseract");
    let c = hd.complex();
    let e = by_name("tesseract").unwrap();
    let squares = face_cycles(&e.complex, &e.pairing, 2).unwrap();
    let edges = face_cycles(&e.complex, &e.pairing, 1).unwrap();
    assert_eq!(t.parallel.len(), 6);
    for (i, pc) in t.parallel.iter().enumerate() {
        assert_eq!(pc.label, roman(i + 1));
        let cycle = squares.iter().find(|s| s.members.contains(&pc.pieces[0].face)).unwrap();
        let mut faces: Vec<&str> = pc.pieces.iter().map(|p| p.face.as_str()).collect();
        faces.sort();
        let mut members: Vec<&str> = cycle.members.iter().map(|s| s.as_str()).collect();
        members.sort();
        assert_eq!(faces, members);
        let ec = edges.iter().find(|x| x.representative == pc.cycle).unwrap();
        for p in &pc.pieces {
            assert!(ec.members.contains(&p.edge));
            let f = c.index_of(&p.face).unwrap();
            assert!(c.closure(f).contains(&c.index_of(&p.edge).unwrap()));
            let tri = t.triangles.iter().find(|x| x.face == p.edge).unwrap();
            assert_eq!(tri.cycle, pc.cycle);
            assert!(tri.arcs.contains(&p.face));
        }
    }
}

#[test]
fn scenes_round_trip_as_json() {
    for name in SCENES {
        let (_, s) = scene(name);
        let json = emit(&s, "json", &RenderOptions::default()).unwrap();
        let back = DiagramScene::parse(&json).unwrap();
        assert_eq!(back, s, "{name}");
    }
}

#[test]
fn cube_svg() {
    let (_, s) = scene("cube");
    let svg = emit(&s, "svg", &RenderOptions::default()).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(svg.matches(r#"class="foot""#).count(), 5);
    assert_eq!(svg.matches(r#"class="outer""#).count(), 1);
    assert!(svg.matches("<polyline").count() >= 3);
    let text = emit(&s, "structured-text", &RenderOptions::default()).unwrap();
    assert!(text.contains("III"));
    assert!(matches!(emit(&s, "png", &RenderOptions::default()), Err(Error::Format(_)) | Err(Error::Invalid(_))));
}

fn identity_pairing(c: &CellComplex, source: &str, target: &str) -> SidePairingSet {
    let vertex_map: BTreeMap<String, String> = c
        .vertices(c.index_of(source).unwrap())
        .into_iter()
        .map(|v| (c.id(v).to_string(), c.id(v).to_string()))
        .collect();
    SidePairingSet::new(vec![SidePairing {
        generator: "a".into(),
        source: source.into(),
        target: target.into(),
        vertex_map,
        orientation: Some(1),
    }])
}

fn two_regions(ambient: usize) -> Layout {
    let mut regions = BTreeMap::new();
    let mut f = vec![0.0; ambient];
    f[0] = -1.0;
    let mut g = vec![0.0; ambient];
    g[0] = 1.0;
    regions.insert("F".to_string(), f);
    regions.insert("G".to_string(), g);
    Layout { schema: LAYOUT_SCHEMA.into(), regions, exact: BTreeMap::new(), vertices: BTreeMap::new(), outer: None, radius: None, sphere_arcs: false }
}

#[test]
fn triangle_pillow_diagram() {
    let c = triangle_pillow();
    let p = identity_pairing(&c, "F", "G");
    let hd = handle_decomposition(&c, &p).unwrap();
    assert_eq!(hd.counts(), vec![1, 1, 3, 3]);
    let s = diagram3(&c, &p, &two_regions(2)).unwrap();
    assert_eq!((s.feet.len(), s.arcs.len(), s.arc_count()), (1, 3, 3));
    for a in &s.arcs {
        assert_eq!(a.word.len(), 1);
    }
}

#[test]
fn tetrahedral_pillow_diagram() {
    let c = tetrahedral_pillow();
    let p = identity_pairing(&c, "F", "G");
    let hd = handle_decomposition(&c, &p).unwrap();
    assert_eq!(hd.counts(), vec![1, 1, 4, 6, 4]);
    let s = diagram4(&c, &p, &two_regions(3)).unwrap();
    assert_eq!((s.feet.len(), s.arcs.len(), s.arc_count(), s.triangles.len()), (1, 4, 4, 6));
    for t in &s.triangles {
        assert_eq!(t.arcs.len(), 2);
    }
    assert!(matches!(diagram3(&c, &p, &two_regions(3)), Err(Error::UnsupportedDimension(4))));
}

#[test]
fn layout_errors() {
    let e = by_name("cube").unwrap();
    let mut l = library::layout("cube").unwrap();
    let missing = l.regions.keys().next().unwrap().clone();
    l.regions.remove(&missing);
    assert!(matches!(diagram3(&e.complex, &e.pairing, &l), Err(Error::Layout(_))));
    let mut l = library::layout("cube").unwrap();
    l.radius = Some(100.0);
    assert!(matches!(diagram3(&e.complex, &e.pairing, &l), Err(Error::Layout(_))));
    let mut l = library::layout("cube").unwrap();
    for p in l.regions.values_mut() {
        p.push(0.0);
    }
    assert!(matches!(diagram3(&e.complex, &e.pairing, &l), Err(Error::Layout(_))));
    assert!(Layout::parse(r#"{"schema": "handleforge-layout/1", "regions": {}, "colour": 1}"#).is_err());
}

fn half() -> Surd {
    Surd::new(Rational64::new(1, 2), Rational64::from_integer(0))
}

#[test]
fn rt_feet_closed_forms() {
    let s2 = Surd::sqrt2();
    let one = Surd::int(1);
    let cases = [
        ("S+-00", [s2 * half(), -s2 * half(), Surd::zero()]),
        ("S0+0+", [Surd::zero(), s2 + one, Surd::zero()]),
        ("S00-+", [Surd::zero(), Surd::zero(), -(s2 + one)]),
        ("S-00-", [-(s2 - one), Surd::zero(), Surd::zero()]),
    ];
    for (label, want) in cases {
        assert_eq!(rt_coordinates(label).unwrap(), want, "{label}");
    }
}

// The foot of r is the image of r/√2 under x ↦ e₄ + 2(x − e₄)/|x − e₄|².
#[test]
fn rt_feet_match_the_inversion() {
    let facets = rt_facets();
    assert_eq!(facets.len(), 24);
    let (a, b) = (2f64.sqrt() + 1.0, 2f64.sqrt() - 1.0);
    for r in &facets {
        let label = rt_label(r);
        let x: Vec<f64> = r.iter().map(|&s| s as f64 / 2f64.sqrt()).collect();
        let d: Vec<f64> = (0..4).map(|i| x[i] - if i == 3 { 1.0 } else { 0.0 }).collect();
        let q: f64 = d.iter().map(|t| t * t).sum();
        let img: Vec<f64> = (0..4).map(|i| if i == 3 { 1.0 } else { 0.0 } + 2.0 * d[i] / q).collect();
        assert!(img[3].abs() < 1e-12);
        let p = rt_coordinates(&label).unwrap();
        for i in 0..3 {
            assert!((p[i].to_f64() - img[i]).abs() < 1e-12, "{label}");
        }
        let n2 = norm_squared(&p);
        let ok = [Surd::int(1), (Surd::sqrt2() + Surd::int(1)) * (Surd::sqrt2() + Surd::int(1)), (Surd::sqrt2() - Surd::int(1)) * (Surd::sqrt2() - Surd::int(1))];
        assert!(ok.contains(&n2), "{label}: |d|² = {n2}");
        let len = n2.to_f64().sqrt();
        assert!([1.0, a, b].iter().any(|t| (len - t).abs() < 1e-12));
    }
}

#[test]
fn malformed_labels() {
    for bad in ["", "S", "S+++", "S++++", "S+0+0+", "T++00", "S+x00", "S0000", "S+000"] {
        assert!(matches!(rt_coordinates(bad), Err(Error::Label(_))), "{bad}");
    }
}

#[test]
fn roman_numerals() {
    let want = ["I", "II", "III", "IV", "V", "VI", "IX", "XIV", "XL", "XCIX"];
    for (n, w) in [1, 2, 3, 4, 5, 6, 9, 14, 40, 99].iter().zip(want) {
        assert_eq!(roman(*n), w);
    }
}
