//! Handle diagrams: feet of 1-handles as disks (n = 3) or balls (n = 4),
//! attaching circles of 2-handles as arcs through the crossed faces.

use crate::complex::CellComplex;
use crate::cusps::{periphery, slope_for_class, walk, CuspSection, Slope};
use crate::filling::{complementary, instruction, SlopeDoc};
use crate::error::{Error, Result};
use crate::handles::{cycle_word, handle_decomposition, HandleDecomposition};
use crate::pairing::{Gluing, SidePairingSet};
use crate::surd::Surd;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

pub const SCENE_SCHEMA: &str = "handleforge-scene/1";
pub const LAYOUT_SCHEMA: &str = "handleforge-layout/1";

/// Coordinates for the projected boundary subdivision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub schema: String,
    /// Centre of the foot drawn for each facet.
    pub regions: BTreeMap<String, Vec<f64>>,
    /// Exact centres, when known.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exact: BTreeMap<String, Vec<Surd>>,
    /// Projected vertex positions; vertices at infinity are omitted.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vertices: BTreeMap<String, Vec<f64>>,
    /// The facet drawn as the outside of the picture.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Arcs between feet whose centres are both on the unit sphere follow it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub sphere_arcs: bool,
}

impl Layout {
    pub fn parse(text: &str) -> Result<Layout> {
        let l: Layout = serde_json::from_str(text).map_err(crate::complex::classify)?;
        if l.schema != LAYOUT_SCHEMA {
            return Err(Error::Schema(format!("expected schema `{LAYOUT_SCHEMA}`")));
        }
        Ok(l)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub facet: String,
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub outer: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<Surd>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Foot {
    /// Generator of the 1-handle.
    pub handle: String,
    pub regions: [Region; 2],
    pub descriptor: String,
    pub orientation: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// The face crossed.
    pub face: String,
    pub from: String,
    pub to: String,
    /// `line` or `sphere`.
    pub kind: String,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    /// 2-handle id.
    pub handle: String,
    pub label: String,
    pub word: Vec<String>,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    /// 3-handle id.
    pub handle: String,
    pub face: String,
    /// The 2-faces containing the 1-face, whose arcs bound the triangle.
    pub arcs: Vec<String>,
    pub cycle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub face: String,
    pub edge: String,
}

/// A parallel copy of an attaching circle, pushed across one triangle per
/// member 2-face; all the triangles lie in one cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelCircle {
    pub handle: String,
    pub label: String,
    pub cycle: String,
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedCurve {
    pub label: String,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub vertex: String,
    pub ideal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramScene {
    pub schema: String,
    pub dim: usize,
    pub feet: Vec<Foot>,
    pub arcs: Vec<Circuit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triangles: Vec<Triangle>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parallel: Vec<ParallelCircle>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tracked_curves: Vec<TrackedCurve>,
    pub markers: Vec<Marker>,
}

impl DiagramScene {
    pub fn region(&self, facet: &str) -> Option<&Region> {
        self.feet.iter().flat_map(|f| f.regions.iter()).find(|r| r.facet == facet)
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.iter().map(|c| c.segments.len()).sum()
    }

    pub fn parse(text: &str) -> Result<DiagramScene> {
        let s: DiagramScene = serde_json::from_str(text).map_err(crate::complex::classify)?;
        if s.schema != SCENE_SCHEMA {
            return Err(Error::Schema(format!("expected schema `{SCENE_SCHEMA}`")));
        }
        Ok(s)
    }
}

pub fn roman(mut i: usize) -> String {
    const T: [(usize, &str); 13] = [
        (1000, "M"),
        (900, "CM"),
        (500, "D"),
        (400, "CD"),
        (100, "C"),
        (90, "XC"),
        (50, "L"),
        (40, "XL"),
        (10, "X"),
        (9, "IX"),
        (5, "V"),
        (4, "IV"),
        (1, "I"),
    ];
    let mut s = String::new();
    for &(v, r) in &T {
        while i >= v {
            s.push_str(r);
            i -= v;
        }
    }
    s
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn centroid(pts: &[&Vec<f64>]) -> Vec<f64> {
    let k = pts.len() as f64;
    (0..pts[0].len()).map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / k).collect()
}

struct Ctx<'a> {
    c: &'a CellComplex,
    layout: &'a Layout,
    radius: f64,
    middle: Vec<f64>,
}

impl Ctx<'_> {
    fn new<'a>(c: &'a CellComplex, layout: &'a Layout, ambient: usize) -> Result<Ctx<'a>> {
        let n = c.dim();
        for f in c.cells_of_dim(n - 1) {
            let id = c.id(f);
            let p = layout.regions.get(id).ok_or_else(|| Error::Layout(format!("layout has no region for `{id}`")))?;
            if p.len() != ambient {
                return Err(Error::Layout(format!("region `{id}` needs {ambient} coordinates")));
            }
        }
        for (v, p) in &layout.vertices {
            if p.len() != ambient {
                return Err(Error::Layout(format!("vertex `{v}` needs {ambient} coordinates")));
            }
        }
        let inner: Vec<(&String, &Vec<f64>)> =
            layout.regions.iter().filter(|(k, _)| Some(*k) != layout.outer.as_ref() && c.index_of(k).is_ok()).collect();
        let mut closest = f64::INFINITY;
        for (i, a) in inner.iter().enumerate() {
            for b in &inner[i + 1..] {
                closest = closest.min(norm(&sub(a.1, b.1)));
            }
        }
        let radius = match layout.radius {
            Some(r) => {
                if 2.0 * r > closest + 1e-12 {
                    return Err(Error::Layout(format!("regions of radius {r} overlap")));
                }
                r
            }
            None if closest.is_finite() => 0.3 * closest,
            None => 1.0,
        };
        let all: Vec<&Vec<f64>> = inner.iter().map(|x| x.1).collect();
        let middle = if all.is_empty() { vec![0.0; ambient] } else { centroid(&all) };
        Ok(Ctx { c, layout, radius, middle })
    }

    fn region(&self, f: usize) -> Region {
        let id = self.c.id(f).to_string();
        let outer = self.layout.outer.as_deref() == Some(id.as_str());
        Region {
            center: self.layout.regions[&id].clone(),
            radius: if outer { 0.0 } else { self.radius },
            outer,
            exact: self.layout.exact.get(&id).cloned(),
            facet: id,
        }
    }

    fn vertex(&self, v: usize) -> Option<&Vec<f64>> {
        self.layout.vertices.get(self.c.id(v))
    }

    /// Where an arc crosses a face: its vertex centroid, pushed outward when
    /// some vertices sit at infinity; `None` without vertex positions.
    fn crossing(&self, face: usize) -> Option<Vec<f64>> {
        let vs = self.c.vertices(face);
        let known: Vec<&Vec<f64>> = vs.iter().filter_map(|&v| self.vertex(v)).collect();
        if known.is_empty() {
            return None;
        }
        let mut p = centroid(&known);
        if known.len() < vs.len() {
            let d = sub(&p, &self.middle);
            let l = norm(&d);
            if l > 1e-12 {
                p = p.iter().zip(&d).map(|(x, y)| x + self.radius * y / l).collect();
            }
        }
        Some(p)
    }

    fn segment(&self, face: usize, from: usize, to: usize) -> Segment {
        let a = self.region(from);
        let b = self.region(to);
        let on_sphere = |p: &[f64]| (norm(p) - 1.0).abs() < 1e-9;
        let (kind, points) = match self.crossing(face) {
            Some(x) => ("line", vec![a.center.clone(), x, b.center.clone()]),
            None if self.layout.sphere_arcs && on_sphere(&a.center) && on_sphere(&b.center) => ("sphere", great_arc(&a.center, &b.center)),
            None => ("line", vec![a.center.clone(), b.center.clone()]),
        };
        Segment { face: self.c.id(face).to_string(), from: a.facet, to: b.facet, kind: kind.into(), points }
    }
}

fn great_arc(a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    const STEPS: usize = 8;
    (0..=STEPS)
        .map(|i| {
            let t = i as f64 / STEPS as f64;
            let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
            let l = norm(&p);
            p.iter().map(|x| x / l).collect()
        })
        .collect()
}

fn facets_of(c: &CellComplex, f: usize) -> Vec<usize> {
    let n = c.dim();
    let mut v: Vec<usize> = c.cofaces(f).iter().map(|&(x, _)| x).filter(|&x| c.cell(x).dim + 1 == n).collect();
    v.sort();
    v
}

fn angle(p: &[f64], c: &[f64]) -> f64 {
    (p[1] - c[1]).atan2(p[0] - c[0])
}

fn wrap(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// How the planar feet of a pairing are matched: compare the vertex map
/// with reflection in the perpendicular bisector of the two centres (for the
/// outer region, with the angle-preserving match through infinity).
fn descriptor3(ctx: &Ctx, g: &Gluing, map: usize) -> String {
    let m = &g.maps[map];
    let c = ctx.c;
    let (ra, rb) = (ctx.region(m.source), ctx.region(m.target));
    let mut pairs = Vec::new();
    for v in c.vertices(m.source) {
        let w = g.apply(crate::pairing::Step { map, inverse: false }, v).map(|x| x.0);
        if let (Some(p), Some(q)) = (ctx.vertex(v), w.and_then(|w| ctx.vertex(w))) {
            pairs.push((p.clone(), q.clone()));
        }
    }
    if pairs.len() < 2 {
        return "reflection-in-bisector".into();
    }
    let outer = ra.outer || rb.outer;
    let (ca, cb) = if outer { (ctx.middle.clone(), ctx.middle.clone()) } else { (ra.center.clone(), rb.center.clone()) };
    let phi = angle(&cb, &ca) + PI / 2.0;
    let mut thetas: Vec<(f64, f64)> = pairs.iter().map(|(p, q)| (angle(p, &ca), angle(q, &cb))).collect();
    let matches = thetas.iter().all(|&(t, s)| {
        let want = if outer { t } else { 2.0 * phi - t };
        wrap(s - want).abs() < 1e-6
    });
    thetas.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let k = thetas.len();
    let turn: f64 = (0..k).map(|i| wrap(thetas[(i + 1) % k].1 - thetas[i].1)).sum();
    let reversed = turn < 0.0;
    // through infinity the orientation of the outer region is inverted
    let reflective = if outer { !reversed } else { reversed };
    match (reflective, matches) {
        (_, true) => "reflection-in-bisector",
        (true, false) => "reflection-plus-rotation",
        (false, false) => "reflection-in-plane",
    }
    .into()
}

fn descriptor4(g: &Gluing, map: usize) -> String {
    let m = &g.maps[map];
    if m.chi == -1 || g.owner(m.source) != g.owner(m.target) {
        "reflection-in-plane".into()
    } else {
        "reflection-in-bisector".into()
    }
}

fn feet(ctx: &Ctx, g: &Gluing, n: usize) -> Vec<Foot> {
    (0..g.maps.len())
        .map(|i| {
            let m = &g.maps[i];
            Foot {
                handle: m.generator.clone(),
                regions: [ctx.region(m.source), ctx.region(m.target)],
                descriptor: if n == 3 { descriptor3(ctx, g, i) } else { descriptor4(g, i) },
                orientation: m.chi,
            }
        })
        .collect()
}

fn circuits(ctx: &Ctx, hd: &HandleDecomposition) -> Result<Vec<Circuit>> {
    let g = hd.gluing();
    let c = ctx.c;
    let k = hd.n - 2;
    let mut out = Vec::new();
    for o in &hd.orbits[k] {
        let Some((_, pos)) = hd.handle_of(o.rep) else { continue };
        let (word, trail) = cycle_word(g, o, &hd.generators)?;
        let segments = trail
            .iter()
            .map(|&(f, step)| {
                let exit = g.exit_facet(step);
                let from = facets_of(c, f).into_iter().find(|&x| x != exit).expect("face lies in two facets");
                ctx.segment(f, from, exit)
            })
            .collect();
        out.push(Circuit {
            handle: hd.handles[2][pos].id.clone(),
            label: roman(out.len() + 1),
            word: word.iter().map(|&l| crate::group::letter_name(&hd.generators, l)).collect(),
            segments,
        });
    }
    Ok(out)
}

fn markers(ctx: &Ctx) -> Vec<Marker> {
    ctx.c
        .cells_of_dim(0)
        .into_iter()
        .map(|v| Marker { vertex: ctx.c.id(v).to_string(), ideal: ctx.c.cell(v).ideal, position: ctx.vertex(v).cloned() })
        .collect()
}

/// Disk-and-arc diagram of a 3-dimensional side-pairing.
pub fn diagram3(c: &CellComplex, p: &SidePairingSet, layout: &Layout) -> Result<DiagramScene> {
    if c.dim() != 3 {
        return Err(Error::UnsupportedDimension(c.dim()));
    }
    let hd = handle_decomposition(c, p)?;
    scene3(&hd, layout)
}

pub fn scene3(hd: &HandleDecomposition, layout: &Layout) -> Result<DiagramScene> {
    let ctx = Ctx::new(hd.complex(), layout, 2)?;
    Ok(DiagramScene {
        schema: SCENE_SCHEMA.into(),
        dim: 3,
        feet: feet(&ctx, hd.gluing(), 3),
        arcs: circuits(&ctx, hd)?,
        triangles: vec![],
        parallel: vec![],
        tracked_curves: vec![],
        markers: markers(&ctx),
    })
}

/// Ball-and-arc (Kirby-style) diagram of a 4-dimensional side-pairing.
pub fn diagram4(c: &CellComplex, p: &SidePairingSet, layout: &Layout) -> Result<DiagramScene> {
    if c.dim() != 4 {
        return Err(Error::UnsupportedDimension(c.dim()));
    }
    let hd = handle_decomposition(c, p)?;
    scene4(&hd, layout)
}

pub fn scene4(hd: &HandleDecomposition, layout: &Layout) -> Result<DiagramScene> {
    let c = hd.complex();
    let ctx = Ctx::new(c, layout, 3)?;
    let mut triangles = Vec::new();
    for e in c.cells_of_dim(1) {
        let Some((_, pos)) = hd.handle_of(e) else { continue };
        let mut arcs: Vec<String> = c.star(e).into_iter().filter(|&f| c.cell(f).dim == 2).map(|f| c.id(f).to_string()).collect();
        arcs.sort();
        triangles.push(Triangle {
            handle: hd.handles[3][pos].id.clone(),
            face: c.id(e).to_string(),
            arcs,
            cycle: c.id(hd.orbit_of(e).rep).to_string(),
        });
    }
    Ok(DiagramScene {
        schema: SCENE_SCHEMA.into(),
        dim: 4,
        feet: feet(&ctx, hd.gluing(), 4),
        arcs: circuits(&ctx, hd)?,
        triangles,
        parallel: parallel_circles(hd),
        tracked_curves: vec![],
        markers: markers(&ctx),
    })
}

/// For each 2-handle, the first cycle of 1-faces meeting every member
/// 2-face, and one edge of that cycle in each member.
pub fn parallel_circles(hd: &HandleDecomposition) -> Vec<ParallelCircle> {
    let c = hd.complex();
    let mut out = Vec::new();
    for o in &hd.orbits[hd.n - 2] {
        let Some((_, pos)) = hd.handle_of(o.rep) else { continue };
        let edges_of = |f: usize| -> Vec<usize> { c.closure(f).into_iter().filter(|&e| c.cell(e).dim == 1).collect() };
        let found = hd.orbits[1].iter().find_map(|ec| {
            let pieces: Option<Vec<Piece>> = o
                .members
                .iter()
                .map(|&f| {
                    edges_of(f)
                        .into_iter()
                        .filter(|e| ec.members.contains(e))
                        .min_by(|a, b| c.id(*a).cmp(c.id(*b)))
                        .map(|e| Piece { face: c.id(f).to_string(), edge: c.id(e).to_string() })
                })
                .collect();
            pieces.map(|p| (ec, p))
        });
        if let Some((ec, pieces)) = found {
            out.push(ParallelCircle {
                handle: hd.handles[2][pos].id.clone(),
                label: roman(out.len() + 1),
                cycle: c.id(ec.rep).to_string(),
                pieces,
            });
        }
    }
    out
}

/// A peripheral curve drawn through the feet it crosses, passing near its
/// ideal vertex.
pub fn tracked_curve(hd: &HandleDecomposition, layout: &Layout, label: &str, slope: &Slope) -> Result<TrackedCurve> {
    let g = hd.gluing();
    let c = hd.complex();
    let ambient = if hd.n == 3 { 2 } else { 3 };
    let ctx = Ctx::new(c, layout, ambient)?;
    let cr = walk(g, slope.start, &slope.exits)?;
    let m = cr.len();
    let segments = (0..m)
        .map(|i| {
            let prev = &cr[(i + m - 1) % m];
            let entry = g.entry_facet(prev.step);
            let (a, b) = (ctx.region(entry), ctx.region(cr[i].exit));
            let mut points = vec![a.center.clone()];
            if let Some(v) = ctx.vertex(cr[i].tile.1) {
                points.push(v.clone());
            }
            points.push(b.center.clone());
            Segment { face: c.id(cr[i].tile.1).to_string(), from: a.facet, to: b.facet, kind: "line".into(), points }
        })
        .collect();
    Ok(TrackedCurve { label: label.into(), segments })
}

/// Meridians given as slope documents, each with a complementary longitude,
/// as tracked curves `m…` and `l…`.
pub fn track_meridians(hd: &HandleDecomposition, cusps: &[CuspSection], layout: &Layout, docs: &[SlopeDoc]) -> Result<Vec<TrackedCurve>> {
    let mut out = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        let ins = instruction(hd, cusps, doc)?;
        let label = doc.label.clone().unwrap_or_else(|| format!("m{}", i + 1));
        out.push(tracked_curve(hd, layout, &label, &ins.slope)?);
        let s = &cusps[ins.cusp];
        let l = complementary(&ins.slope.class).ok_or_else(|| Error::Slope("no complementary class".into()))?;
        let lon = slope_for_class(hd, s, &periphery(hd, s)?, l)?;
        let name = match label.strip_prefix('m') {
            Some(rest) => format!("l{rest}"),
            None => format!("{label}-longitude"),
        };
        out.push(tracked_curve(hd, layout, &name, &lon)?);
    }
    Ok(out)
}

// ----------------------------------------------------------- RT coordinates

/// Position of the foot of facet `S****` of Q: the image of r/√2 under the
/// Möbius map fixing S², r the facet's sign vector.
pub fn rt_coordinates(label: &str) -> Result<[Surd; 3]> {
    let bad = || Error::Label(format!("`{label}` is not a facet label S****"));
    let body = label.strip_prefix('S').ok_or_else(bad)?;
    let signs: Vec<i64> = body
        .chars()
        .map(|ch| match ch {
            '+' => Ok(1),
            '-' => Ok(-1),
            '0' => Ok(0),
            _ => Err(bad()),
        })
        .collect::<Result<_>>()?;
    if signs.len() != 4 || signs.iter().filter(|&&x| x != 0).count() != 2 {
        return Err(bad());
    }
    let half = Surd::new(num_rational::Rational64::new(1, 2), num_rational::Rational64::new(0, 1));
    let scale = match signs[3] {
        0 => Surd::sqrt2() * half,
        1 => Surd::sqrt2() + Surd::int(1),
        _ => Surd::sqrt2() - Surd::int(1),
    };
    Ok([0, 1, 2].map(|i| Surd::int(signs[i]) * scale))
}

pub fn norm_squared(p: &[Surd; 3]) -> Surd {
    p.iter().fold(Surd::zero(), |acc, &x| acc + x * x)
}

fn to_f64s(p: &[Surd]) -> Vec<f64> {
    p.iter().map(|x| x.to_f64()).collect()
}

/// Layout for Q: feet at their exact positions; arcs run straight in a
/// coordinate plane or along S².
pub fn rt_layout(facets: &[String]) -> Result<Layout> {
    let mut regions = BTreeMap::new();
    let mut exact = BTreeMap::new();
    for f in facets {
        let p = rt_coordinates(f)?;
        regions.insert(f.clone(), to_f64s(&p));
        exact.insert(f.clone(), p.to_vec());
    }
    Ok(Layout { schema: LAYOUT_SCHEMA.into(), regions, exact, vertices: BTreeMap::new(), outer: None, radius: Some(0.1), sphere_arcs: true })
}

/// Layout for the double cover: the first copy as in [`rt_layout`], the
/// second its image under d ↦ −d/|d|² shifted by x₁ ↦ −6 − x₁.
pub fn rt_double_layout(facets: &[String]) -> Result<Layout> {
    let mut regions = BTreeMap::new();
    let mut exact = BTreeMap::new();
    for f in facets {
        let (base, copy) = f.rsplit_once('@').ok_or_else(|| Error::Label(format!("`{f}` has no copy suffix")))?;
        let mut p = rt_coordinates(base)?;
        if copy == "hQ" {
            let n2 = norm_squared(&p);
            p = p.map(|x| -x / n2);
            p[0] = Surd::int(-6) - p[0];
        }
        regions.insert(f.clone(), to_f64s(&p));
        exact.insert(f.clone(), p.to_vec());
    }
    Ok(Layout { schema: LAYOUT_SCHEMA.into(), regions, exact, vertices: BTreeMap::new(), outer: None, radius: Some(0.1), sphere_arcs: false })
}

// ------------------------------------------------------------------ emission

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewAxis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for ViewAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<ViewAxis> {
        match s {
            "x" => Ok(ViewAxis::X),
            "y" => Ok(ViewAxis::Y),
            "z" => Ok(ViewAxis::Z),
            _ => Err(Error::Format(format!("unknown view axis `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    pub view_axis: ViewAxis,
    pub width: u32,
    pub height: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { view_axis: ViewAxis::Z, width: 800, height: 800 }
    }
}

const PALETTE: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

/// Serialize a scene as `svg` or `json` (the structured-text form).
pub fn emit(scene: &DiagramScene, format: &str, opts: &RenderOptions) -> Result<String> {
    match format {
        "json" | "structured-text" => Ok(serde_json::to_string_pretty(scene).expect("scene serializes")),
        "svg" => Ok(svg(scene, opts)),
        other => Err(Error::Format(format!("unsupported format `{other}`"))),
    }
}

fn project(p: &[f64], axis: ViewAxis) -> [f64; 2] {
    if p.len() == 2 {
        return [p[0], p[1]];
    }
    match axis {
        ViewAxis::Z => [p[0], p[1]],
        ViewAxis::Y => [p[0], p[2]],
        ViewAxis::X => [p[1], p[2]],
    }
}

fn svg(scene: &DiagramScene, opts: &RenderOptions) -> String {
    let ax = opts.view_axis;
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for f in &scene.feet {
        for r in f.regions.iter().filter(|r| !r.outer) {
            let c = project(&r.center, ax);
            pts.push([c[0] - r.radius, c[1] - r.radius]);
            pts.push([c[0] + r.radius, c[1] + r.radius]);
        }
    }
    for s in scene.arcs.iter().flat_map(|c| &c.segments).chain(scene.tracked_curves.iter().flat_map(|t| &t.segments)) {
        pts.extend(s.points.iter().map(|p| project(p, ax)));
    }
    pts.extend(scene.markers.iter().filter_map(|m| m.position.as_ref()).map(|p| project(p, ax)));
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if pts.is_empty() {
        lo = [0.0, 0.0];
        hi = [1.0, 1.0];
    }
    let (w, h) = (opts.width as f64, opts.height as f64);
    let margin = 0.08 * w.min(h);
    let scale = ((w - 2.0 * margin) / (hi[0] - lo[0]).max(1e-9)).min((h - 2.0 * margin) / (hi[1] - lo[1]).max(1e-9));
    let tx = |p: [f64; 2]| [margin + (p[0] - lo[0]) * scale, h - margin - (p[1] - lo[1]) * scale];
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        opts.width, opts.height, opts.width, opts.height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<g id="feet" fill="none" stroke="black" stroke-width="1.5">"#);
    for f in &scene.feet {
        for r in &f.regions {
            if r.outer {
                let _ = writeln!(
                    out,
                    r#"<rect class="outer" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" stroke-dasharray="6 4"><title>{} (outside)</title></rect>"#,
                    margin / 2.0,
                    margin / 2.0,
                    w - margin,
                    h - margin,
                    r.facet
                );
                continue;
            }
            let c = tx(project(&r.center, ax));
            let _ = writeln!(
                out,
                r#"<circle class="foot" cx="{:.3}" cy="{:.3}" r="{:.3}"><title>{}</title></circle>"#,
                c[0],
                c[1],
                r.radius * scale,
                r.facet
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" font-size="11" text-anchor="middle" fill="black" stroke="none">{} {}</text>"#,
                c[0],
                c[1] + 4.0,
                xml(&r.facet),
                xml(&f.handle)
            );
            if f.descriptor == "reflection-plus-rotation" {
                // orientation arrow
                let rr = r.radius * scale;
                let _ = writeln!(
                    out,
                    r#"<path class="arrow" d="M {:.3} {:.3} A {:.3} {:.3} 0 0 1 {:.3} {:.3}" stroke="gray"/>"#,
                    c[0] - 0.7 * rr,
                    c[1] - 0.7 * rr,
                    rr,
                    rr,
                    c[0] + 0.7 * rr,
                    c[1] - 0.7 * rr
                );
            }
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="circuits" fill="none" stroke-width="2">"#);
    for (i, circ) in scene.arcs.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let _ = writeln!(out, r#"<g class="circuit" stroke="{colour}"><title>{} {}</title>"#, circ.label, xml(&circ.handle));
        for s in &circ.segments {
            let d: Vec<String> = s.points.iter().map(|p| tx(project(p, ax))).map(|p| format!("{:.3},{:.3}", p[0], p[1])).collect();
            let _ = writeln!(out, r#"<polyline points="{}"/>"#, d.join(" "));
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</g>");
    if !scene.tracked_curves.is_empty() {
        let _ = writeln!(out, r#"<g id="tracked" fill="none" stroke="black" stroke-dasharray="3 3">"#);
        for t in &scene.tracked_curves {
            let _ = writeln!(out, r#"<g class="tracked"><title>{}</title>"#, xml(&t.label));
            for s in &t.segments {
                let d: Vec<String> = s.points.iter().map(|p| tx(project(p, ax))).map(|p| format!("{:.3},{:.3}", p[0], p[1])).collect();
                let _ = writeln!(out, r#"<polyline points="{}"/>"#, d.join(" "));
            }
            let _ = writeln!(out, "</g>");
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, r#"<g id="markers" stroke="black">"#);
    for m in &scene.markers {
        if let Some(p) = &m.position {
            let c = tx(project(p, ax));
            let fill = if m.ideal { "white" } else { "black" };
            let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{fill}"><title>{}</title></circle>"#, c[0], c[1], xml(&m.vertex));
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
