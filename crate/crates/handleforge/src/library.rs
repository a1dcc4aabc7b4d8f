//! Bundled examples: cubes, the 4-cube, the Wielenberg polyhedron, the
//! figure-8 knot complement and a sister, and the 24-cell polytope Q with
//! the side-pairing of the manifold M₁₀₁₁ and its orientation double cover.

use crate::complex::{CellComplex, Incidence};
use crate::cusps::{CuspGeometry, TileShape, GEOMETRY_SCHEMA};
use crate::diagram::{rt_double_layout, rt_layout, Layout, LAYOUT_SCHEMA};
use crate::filling::SlopeDoc;
use crate::error::{Error, Result};
use crate::pairing::{derived_character, double_cover, SidePairing, SidePairingSet};
use crate::polytope::{build, PolytopeSpec};
use std::collections::BTreeMap;

/// A complex with its side-pairing.
#[derive(Debug, Clone)]
pub struct Example {
    pub name: &'static str,
    pub complex: CellComplex,
    pub pairing: SidePairingSet,
}

fn bits(v: &[i64]) -> String {
    let s: String = v.iter().map(|x| x.to_string()).collect();
    format!("v{s}")
}

/// Unit n-cube with facets `x{i}=0|1` and pairings given by affine maps of
/// the vertex coordinates.
fn cube(n: usize, maps: &[(&str, usize, fn(&[i64]) -> Vec<i64>)]) -> Result<(CellComplex, SidePairingSet)> {
    let verts: Vec<Vec<i64>> = (0..1usize << n).map(|m| (0..n).map(|i| ((m >> (n - 1 - i)) & 1) as i64).collect()).collect();
    let facet = |i: usize, s: i64| format!("x{}={}", i + 1, s);
    let mut facets = Vec::new();
    for i in 0..n {
        for s in 0..2 {
            facets.push((facet(i, s), verts.iter().filter(|v| v[i] == s).map(|v| bits(v)).collect()));
        }
    }
    let spec = PolytopeSpec { name: "P".into(), vertices: verts.iter().map(|v| (bits(v), false)).collect(), facets };
    let c = build(n, &[spec])?;
    let mut ps = Vec::new();
    for &(g, axis, f) in maps {
        let vertex_map = verts.iter().filter(|v| v[axis] == 0).map(|v| (bits(v), bits(&f(v)))).collect();
        ps.push(SidePairing { generator: g.into(), source: facet(axis, 0), target: facet(axis, 1), vertex_map, orientation: Some(1) });
    }
    Ok((c, SidePairingSet::new(ps)))
}

fn shift(axis: usize) -> impl Fn(&[i64]) -> Vec<i64> {
    move |v| {
        let mut w = v.to_vec();
        w[axis] += 1;
        w
    }
}

/// Three-torus: the cube with opposite facets paired by translations.
pub fn cube_t3() -> Example {
    let (complex, pairing) = cube(3, &[("a", 0, |v| shift(0)(v)), ("b", 1, |v| shift(1)(v)), ("c", 2, |v| shift(2)(v))])
        .expect("cube builds");
    Example { name: "cube", complex, pairing }
}

/// The cube with x-facets paired by a translation followed by a half-turn
/// about the x-axis, the others by translations.
pub fn cube_halfturn() -> Example {
    let (complex, pairing) = cube(
        3,
        &[("a", 0, |v| vec![1, 1 - v[1], 1 - v[2]]), ("b", 1, |v| shift(1)(v)), ("c", 2, |v| shift(2)(v))],
    )
    .expect("cube builds");
    Example { name: "cube-halfturn", complex, pairing }
}

/// Four-torus from the 4-cube.
pub fn tesseract() -> Example {
    let (complex, pairing) = cube(
        4,
        &[
            ("a", 0, |v| shift(0)(v)),
            ("b", 1, |v| shift(1)(v)),
            ("c", 2, |v| shift(2)(v)),
            ("d", 3, |v| shift(3)(v)),
        ],
    )
    .expect("4-cube builds");
    Example { name: "tesseract", complex, pairing }
}

/// The circle: an interval with its endpoints identified.
pub fn circle() -> Example {
    use crate::complex::Cell;
    let complex = CellComplex::new(
        1,
        vec![Cell::new("a", 0), Cell::new("b", 0), Cell::new("e", 1)],
        vec![
            Incidence { of: "a".into(), within: "e".into(), sign: -1 },
            Incidence { of: "b".into(), within: "e".into(), sign: 1 },
        ],
    )
    .expect("interval builds");
    let pairing = SidePairingSet::new(vec![SidePairing {
        generator: "t".into(),
        source: "a".into(),
        target: "b".into(),
        vertex_map: BTreeMap::from([("a".into(), "b".into())]),
        orientation: Some(1),
    }]);
    Example { name: "circle", complex, pairing }
}

fn p(x: i64, y: i64) -> String {
    format!("p{x}{y}")
}

/// Wielenberg's polyhedron in the upper half-space over the square [0,2]².
///
/// Walls C (x=0), C′ (x=2), D (y=0), D′ (y=2); floor hemispheres of radius
/// 1/√2 centred at (½,½) = A, (3⁄2,3⁄2) = A′, (3⁄2,½) = B, (½,3⁄2) = B′.
/// All ten vertices (∞, corners, edge midpoints, centre) are ideal.
pub fn wielenberg() -> Example {
    let mut vertices = vec![("inf".to_string(), true)];
    for x in 0..3 {
        for y in 0..3 {
            vertices.push((p(x, y), true));
        }
    }
    let f = |pts: &[(i64, i64)], inf: bool| -> Vec<String> {
        let mut v: Vec<String> = pts.iter().map(|&(x, y)| p(x, y)).collect();
        if inf {
            v.push("inf".into());
        }
        v
    };
    let facets = vec![
        ("A".to_string(), f(&[(0, 0), (1, 0), (1, 1), (0, 1)], false)),
        ("A'".to_string(), f(&[(1, 1), (2, 1), (2, 2), (1, 2)], false)),
        ("B".to_string(), f(&[(1, 0), (2, 0), (2, 1), (1, 1)], false)),
        ("B'".to_string(), f(&[(0, 1), (1, 1), (1, 2), (0, 2)], false)),
        ("C".to_string(), f(&[(0, 0), (0, 1), (0, 2)], true)),
        ("C'".to_string(), f(&[(2, 0), (2, 1), (2, 2)], true)),
        ("D".to_string(), f(&[(0, 0), (1, 0), (2, 0)], true)),
        ("D'".to_string(), f(&[(0, 2), (1, 2), (2, 2)], true)),
    ];
    let complex = build(3, &[PolytopeSpec { name: "P".into(), vertices, facets }]).expect("Wielenberg polyhedron builds");
    // planar action of each pairing on the floor points; ∞ is fixed
    let pairing_of = |g: &str, s: &str, t: &str, pts: &[(i64, i64)], map: fn(i64, i64) -> (i64, i64), inf: bool| {
        let mut vertex_map: BTreeMap<String, String> = pts
            .iter()
            .map(|&(x, y)| {
                let (u, v) = map(x, y);
                (p(x, y), p(u, v))
            })
            .collect();
        if inf {
            vertex_map.insert("inf".into(), "inf".into());
        }
        SidePairing { generator: g.into(), source: s.into(), target: t.into(), vertex_map, orientation: Some(1) }
    };
    let pairing = SidePairingSet::new(vec![
        // inversion in A, then reflection in the vertical plane x+y=2 through the tangency point
        pairing_of("a", "A", "A'", &[(0, 0), (1, 0), (1, 1), (0, 1)], |x, y| (2 - y, 2 - x), false),
        // reflection in the vertical plane x+y=1 followed by the translation (0,2)
        pairing_of("b", "B", "B'", &[(1, 0), (2, 0), (2, 1), (1, 1)], |x, y| (1 - y, 3 - x), false),
        pairing_of("c", "C", "C'", &[(0, 0), (0, 1), (0, 2)], |x, y| (x + 2, y), true),
        pairing_of("d", "D", "D'", &[(0, 0), (1, 0), (2, 0)], |x, y| (x, y + 2), true),
    ]);
    Example { name: "wielenberg", complex, pairing }
}

/// Horospherical cross-sections of the Wielenberg cusps.
///
/// At ∞ a square of side 2 bounded by the walls. At each corner a 45-45-90
/// triangle with the two walls as unit legs; at the centre a square whose
/// sides are the four hemispheres, of side √2 to match the hypotenuses glued
/// to it. At the edge midpoints the two hemispheres are unit legs and the
/// wall is the hypotenuse.
pub fn wielenberg_geometry() -> CuspGeometry {
    let r2 = 2f64.sqrt();
    let q = std::f64::consts::FRAC_PI_4;
    let h = std::f64::consts::FRAC_PI_2;
    let tile = |v: &str, sides: [&str; 3]| TileShape {
        cell: format!("P|{v}"),
        sides: sides.iter().map(|s| format!("{s}|{v}")).collect(),
        lengths: vec![1.0, 1.0, r2],
        angles: vec![q, h, q],
    };
    let square = |v: &str, sides: [&str; 4], side: f64| TileShape {
        cell: format!("P|{v}"),
        sides: sides.iter().map(|s| format!("{s}|{v}")).collect(),
        lengths: vec![side; 4],
        angles: vec![h; 4],
    };
    CuspGeometry {
        schema: GEOMETRY_SCHEMA.into(),
        tiles: vec![
            square("inf", ["D", "C'", "D'", "C"], 2.0),
            // legs first, the right angle sits between them
            tile("p00", ["C", "D", "A"]),
            tile("p02", ["C", "D'", "B'"]),
            tile("p20", ["C'", "D", "B"]),
            tile("p22", ["C'", "D'", "A'"]),
            square("p11", ["A", "B", "A'", "B'"], r2),
            tile("p10", ["A", "B", "D"]),
            tile("p01", ["A", "B'", "C"]),
            tile("p21", ["B", "A'", "C'"]),
            tile("p12", ["B'", "A'", "D'"]),
        ],
    }
}

/// Face `i` of a tetrahedron is opposite vertex `i`.
fn two_tetrahedra(name: &'static str, gluing: &[(usize, usize, [(usize, usize); 3])]) -> Example {
    let tet = |t: usize| PolytopeSpec {
        name: format!("T{t}"),
        vertices: (0..4).map(|v| (format!("T{t}.{v}"), true)).collect(),
        facets: (0..4)
            .map(|f| (format!("T{t}.f{f}"), (0..4).filter(|&v| v != f).map(|v| format!("T{t}.{v}")).collect()))
            .collect(),
    };
    let mut complex = build(3, &[tet(0), tet(1)]).expect("tetrahedra build");
    let gens = ["a", "b", "c", "d"];
    let pairings: Vec<SidePairing> = gluing
        .iter()
        .enumerate()
        .map(|(i, &(f0, f1, vm))| SidePairing {
            generator: gens[i].into(),
            source: format!("T0.f{f0}"),
            target: format!("T1.f{f1}"),
            vertex_map: vm.iter().map(|&(a, b)| (format!("T0.{a}"), format!("T1.{b}"))).collect(),
            orientation: None,
        })
        .collect();
    // orient the second tetrahedron so that every gluing preserves orientation
    let chis: Vec<i64> = pairings.iter().map(|g| derived_character(&complex, g).expect("gluing resolves")).collect();
    if chis.iter().all(|&x| x == -1) {
        complex = flip_top(&complex, "T1");
    }
    let pairings = pairings.into_iter().map(|g| SidePairing { orientation: Some(1), ..g }).collect();
    Example { name, complex, pairing: SidePairingSet::new(pairings) }
}

fn flip_top(c: &CellComplex, top: &str) -> CellComplex {
    let mut doc = c.to_document();
    for inc in doc.incidence.iter_mut() {
        if inc.within == top {
            inc.sign = -inc.sign;
        }
    }
    CellComplex::from_document(&doc).expect("flipped complex is valid")
}

/// Figure-8 knot complement from two regular ideal tetrahedra.
pub fn figure_eight() -> Example {
    two_tetrahedra(
        "figure-eight",
        &[
            (0, 0, [(1, 2), (2, 1), (3, 3)]),
            (1, 1, [(0, 2), (2, 0), (3, 3)]),
            (2, 3, [(0, 1), (1, 2), (3, 0)]),
            (3, 2, [(0, 1), (1, 3), (2, 0)]),
        ],
    )
}

/// A one-cusped sister of the figure-8 complement with H₁ = Z ⊕ Z/5.
pub fn figure_eight_sister() -> Example {
    two_tetrahedra(
        "figure-eight-sister",
        &[
            (0, 0, [(1, 1), (2, 3), (3, 2)]),
            (1, 1, [(0, 2), (2, 0), (3, 3)]),
            (2, 2, [(0, 0), (1, 3), (3, 1)]),
            (3, 3, [(0, 1), (1, 0), (2, 2)]),
        ],
    )
}

fn sign_char(x: i64) -> char {
    match x {
        1 => '+',
        -1 => '-',
        _ => '0',
    }
}

pub fn rt_label(c: &[i64; 4]) -> String {
    format!("S{}", c.iter().map(|&x| sign_char(x)).collect::<String>())
}

/// Ideal vertices of Q are ±e_i and (±1,±1,±1,±1)/2, named by sign patterns.
fn rt_vertices() -> Vec<[i64; 4]> {
    let mut v = Vec::new();
    for i in 0..4 {
        for s in [1, -1] {
            let mut x = [0; 4];
            x[i] = s;
            v.push(x);
        }
    }
    for m in 0..16 {
        v.push([0, 1, 2, 3].map(|i| if (m >> (3 - i)) & 1 == 0 { 1 } else { -1 }));
    }
    v
}

fn rt_vertex_name(v: &[i64; 4]) -> String {
    format!("v{}", v.iter().map(|&x| sign_char(x)).collect::<String>())
}

/// Facet vectors: two nonzero entries ±1.
pub fn rt_facets() -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            for si in [1, -1] {
                for sj in [1, -1] {
                    let mut c = [0; 4];
                    c[i] = si;
                    c[j] = sj;
                    out.push(c);
                }
            }
        }
    }
    out
}

// S_c contains v iff v·c = 1 (half vectors doubled).
fn rt_contains(c: &[i64; 4], v: &[i64; 4]) -> bool {
    let half = v.iter().all(|x| *x != 0);
    let dot: i64 = c.iter().zip(v).map(|(a, b)| a * b).sum();
    if half { dot == 2 } else { dot == 1 }
}

fn parse_signs(s: &str) -> [i64; 4] {
    let v: Vec<i64> = s.chars().map(|ch| match ch {
        '+' => 1,
        '-' => -1,
        _ => 0,
    })
    .collect();
    [v[0], v[1], v[2], v[3]]
}

/// Pairing table of M₁₀₁₁: generator, source, sign vector u, target.
/// Each pairing is r∘u with r the reflection in the source sphere.
pub const RT_TABLE: [(&str, &str, &str, &str); 12] = [
    ("a", "++00", "-+++", "-+00"),
    ("b", "+-00", "-+++", "--00"),
    ("c", "+0+0", "++-+", "+0-0"),
    ("d", "-0+0", "++-+", "-0-0"),
    ("e", "0++0", "----", "0--0"),
    ("f", "0+-0", "----", "0-+0"),
    ("g", "+00+", "----", "-00-"),
    ("h", "+00-", "----", "-00+"),
    ("i", "0+0+", "+-++", "0-0+"),
    ("j", "0+0-", "+-++", "0-0-"),
    ("k", "00++", "+++-", "00+-"),
    ("l", "00-+", "+++-", "00--"),
];

/// Character of r∘u: r reverses orientation, u contributes det u.
pub fn rt_character(u: &str) -> i64 {
    -parse_signs(u).iter().product::<i64>()
}

/// The polytope Q (combinatorially the 24-cell) with the M₁₀₁₁ pairing.
pub fn rt_q() -> Example {
    let verts = rt_vertices();
    let facets = rt_facets()
        .iter()
        .map(|c| (rt_label(c), verts.iter().filter(|v| rt_contains(c, v)).map(rt_vertex_name).collect()))
        .collect();
    let spec = PolytopeSpec { name: "Q".into(), vertices: verts.iter().map(|v| (rt_vertex_name(v), true)).collect(), facets };
    let complex = build(4, &[spec]).expect("24-cell builds");
    let pairings = RT_TABLE
        .iter()
        .map(|&(g, s, u, t)| {
            let (sc, uu) = (parse_signs(s), parse_signs(u));
            let vertex_map = verts
                .iter()
                .filter(|v| rt_contains(&sc, v))
                .map(|v| {
                    let w = [0, 1, 2, 3].map(|i| uu[i] * v[i]);
                    (rt_vertex_name(v), rt_vertex_name(&w))
                })
                .collect();
            SidePairing {
                generator: g.into(),
                source: format!("S{s}"),
                target: format!("S{t}"),
                vertex_map,
                orientation: Some(rt_character(u)),
            }
        })
        .collect();
    Example { name: "rt1011", complex, pairing: SidePairingSet::new(pairings) }
}

/// Orientation double cover of Q glued along the orientation-reversing `h`.
pub fn rt_double_cover() -> Example {
    let q = rt_q();
    let (complex, pairing) = double_cover(&q.complex, &q.pairing, "h").expect("h reverses orientation");
    Example { name: "rt1011-double", complex, pairing }
}

pub fn by_name(name: &str) -> Result<Example> {
    Ok(match name {
        "cube" => cube_t3(),
        "cube-halfturn" => cube_halfturn(),
        "tesseract" => tesseract(),
        "circle" => circle(),
        "wielenberg" => wielenberg(),
        "figure-eight" => figure_eight(),
        "figure-eight-sister" => figure_eight_sister(),
        "rt1011" => rt_q(),
        "rt1011-double" => rt_double_cover(),
        other => return Err(Error::Invalid(format!("no bundled example `{other}`"))),
    })
}

pub const NAMES: [&str; 9] = [
    "circle",
    "cube",
    "cube-halfturn",
    "tesseract",
    "wielenberg",
    "figure-eight",
    "figure-eight-sister",
    "rt1011",
    "rt1011-double",
];

fn word_doc(cusp: &str, word: &[&str], label: &str) -> SlopeDoc {
    SlopeDoc {
        cusp: cusp.into(),
        class: None,
        word: Some(word.iter().map(|s| s.to_string()).collect()),
        path: None,
        basis: None,
        label: Some(label.into()),
    }
}

/// Meridians m₁, m₂, m₃ of a three-component link whose complement is the
/// Wielenberg manifold.
pub fn wielenberg_meridians() -> Vec<SlopeDoc> {
    vec![
        word_doc("p01", &["b^-1", "a^-1", "d", "a^-1"], "m1"),
        word_doc("p00", &["a", "c^-1", "d^-1"], "m2"),
        word_doc("inf", &["c"], "m3"),
    ]
}

/// Fibers of the five flat cusps of the double cover of Q, one per cusp.
pub fn rt_fibers() -> Vec<SlopeDoc> {
    vec![
        word_doc("v0+00@Q", &["a@Q"], "fiber1"),
        word_doc("v000-@Q", &["j@Q"], "fiber2"),
        word_doc("v00+0@Q", &["k@Q"], "fiber3"),
        word_doc("v+000@Q", &["c@Q"], "fiber4"),
        word_doc("v----@hQ", &["e@Q^-1", "g@Q"], "fiber5"),
    ]
}

// ------------------------------------------------------------------ layouts

fn unit(b: u8) -> f64 {
    if b == b'1' {
        1.0
    } else {
        -1.0
    }
}

/// Schlegel-style layout of the n-cube (n = 3, 4): the last facet x_n=1 is
/// the outside, the opposite facet sits small in the middle.
fn cube_layout(c: &CellComplex) -> Layout {
    let n = c.dim();
    let vertices: BTreeMap<String, Vec<f64>> = c
        .cells_of_dim(0)
        .into_iter()
        .map(|v| {
            let id = &c.id(v).as_bytes()[1..];
            let s = if id[n - 1] == b'1' { 2.0 } else if n == 3 { 0.6 } else { 0.7 };
            (c.id(v).to_string(), id[..n - 1].iter().map(|&b| s * unit(b)).collect())
        })
        .collect();
    centred(c, vertices, Some(format!("x{n}=1")))
}

fn centred(c: &CellComplex, vertices: BTreeMap<String, Vec<f64>>, outer: Option<String>) -> Layout {
    let regions = c
        .cells_of_dim(c.dim() - 1)
        .into_iter()
        .map(|f| {
            let pts: Vec<&Vec<f64>> = c.vertices(f).iter().filter_map(|&v| vertices.get(c.id(v))).collect();
            let k = pts.len() as f64;
            let d = pts.first().map_or(0, |p| p.len());
            (c.id(f).to_string(), (0..d).map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / k).collect())
        })
        .collect();
    Layout { schema: LAYOUT_SCHEMA.into(), regions, exact: BTreeMap::new(), vertices, outer, radius: None, sphere_arcs: false }
}

/// Floor-plan layout: the square [0,2]² seen from ∞, walls outside it.
fn wielenberg_layout(c: &CellComplex) -> Layout {
    let mut vertices = BTreeMap::new();
    for x in 0..3 {
        for y in 0..3 {
            vertices.insert(p(x, y), vec![x as f64, y as f64]);
        }
    }
    let mut l = centred(c, vertices, None);
    for (f, at) in [("C", [-0.6, 1.0]), ("C'", [2.6, 1.0]), ("D", [1.0, -0.6]), ("D'", [1.0, 2.6])] {
        l.regions.insert(f.into(), at.to_vec());
    }
    l
}

/// Layout bundled for an example, if any.
pub fn layout(name: &str) -> Result<Layout> {
    let e = by_name(name)?;
    let c = &e.complex;
    let facets: Vec<String> = c.cells_of_dim(c.dim() - 1).into_iter().map(|f| c.id(f).to_string()).collect();
    match name {
        "cube" | "cube-halfturn" | "tesseract" => Ok(cube_layout(c)),
        "wielenberg" => Ok(wielenberg_layout(c)),
        "rt1011" => rt_layout(&facets),
        "rt1011-double" => rt_double_layout(&facets),
        other => Err(Error::Layout(format!("no bundled layout for `{other}`"))),
    }
}
