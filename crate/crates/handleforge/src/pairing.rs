//! Side-pairings, induced face maps, face cycles and orientation covers.

use crate::complex::{classify, Cell, CellComplex, Document, Incidence, ValidationReport, SCHEMA};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingDoc {
    pub generator: String,
    pub source: String,
    pub target: String,
    pub vertex_map: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidePairing {
    pub generator: String,
    pub source: String,
    pub target: String,
    pub vertex_map: BTreeMap<String, String>,
    /// +1 if the pairing preserves the ambient orientation.
    pub orientation: Option<i64>,
}

impl From<&PairingDoc> for SidePairing {
    fn from(d: &PairingDoc) -> Self {
        SidePairing {
            generator: d.generator.clone(),
            source: d.source.clone(),
            target: d.target.clone(),
            vertex_map: d.vertex_map.clone(),
            orientation: d.orientation,
        }
    }
}

impl From<&SidePairing> for PairingDoc {
    fn from(p: &SidePairing) -> Self {
        PairingDoc {
            generator: p.generator.clone(),
            source: p.source.clone(),
            target: p.target.clone(),
            vertex_map: p.vertex_map.clone(),
            orientation: p.orientation,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SidePairingSet {
    pub pairings: Vec<SidePairing>,
    /// Generators whose 1-handles are cancelled by doubling 2-handles.
    pub doubling: Vec<String>,
}

impl SidePairingSet {
    pub fn new(pairings: Vec<SidePairing>) -> Self {
        SidePairingSet { pairings, doubling: Vec::new() }
    }

    pub fn get(&self, generator: &str) -> Option<&SidePairing> {
        self.pairings.iter().find(|p| p.generator == generator)
    }

    /// Generator symbols in ascending order.
    pub fn generators(&self) -> Vec<String> {
        let mut g: Vec<String> = self.pairings.iter().map(|p| p.generator.clone()).collect();
        g.sort();
        g
    }

    pub fn len(&self) -> usize {
        self.pairings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairings.is_empty()
    }
}

/// Load a document holding a complex and optionally its pairing.
pub fn load_document(text: &str) -> Result<(CellComplex, Option<SidePairingSet>)> {
    let doc = Document::parse(text)?;
    let c = CellComplex::from_document(&doc)?;
    let p = doc.pairings.as_ref().map(|ps| SidePairingSet {
        pairings: ps.iter().map(SidePairing::from).collect(),
        doubling: doc.doubling.clone().unwrap_or_default(),
    });
    Ok((c, p))
}

/// Load a standalone pairing document (`{"schema", "pairings", "doubling"?}`).
pub fn load_pairing(text: &str) -> Result<SidePairingSet> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct PairingFile {
        schema: String,
        pairings: Vec<PairingDoc>,
        #[serde(default)]
        doubling: Vec<String>,
    }
    let f: PairingFile = serde_json::from_str(text).map_err(classify)?;
    if f.schema != SCHEMA {
        return Err(Error::Schema(format!("expected schema `{SCHEMA}`")));
    }
    Ok(SidePairingSet { pairings: f.pairings.iter().map(SidePairing::from).collect(), doubling: f.doubling })
}

pub fn to_document(c: &CellComplex, p: &SidePairingSet) -> Document {
    let mut doc = c.to_document();
    doc.pairings = Some(p.pairings.iter().map(PairingDoc::from).collect());
    if !p.doubling.is_empty() {
        doc.doubling = Some(p.doubling.clone());
    }
    doc
}

/// Induced map of one pairing on the closure of its source facet.
#[derive(Debug, Clone)]
pub struct FaceMap {
    pub generator: String,
    pub source: usize,
    pub target: usize,
    pub chi: i64,
    /// face -> (image, transport sign)
    pub forward: BTreeMap<usize, (usize, i64)>,
    pub backward: BTreeMap<usize, (usize, i64)>,
}

impl FaceMap {
    pub fn image(&self, f: usize) -> Option<(usize, i64)> {
        self.forward.get(&f).copied()
    }

    pub fn preimage(&self, f: usize) -> Option<(usize, i64)> {
        self.backward.get(&f).copied()
    }
}

/// One step of an orbit walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    /// Index into [`Gluing::maps`].
    pub map: usize,
    pub inverse: bool,
}

/// A complex together with the resolved face maps of its pairing.
#[derive(Debug, Clone)]
pub struct Gluing {
    pub complex: CellComplex,
    pub pairing: SidePairingSet,
    /// Sorted by generator symbol.
    pub maps: Vec<FaceMap>,
    owner: Vec<Option<usize>>,
}

impl Gluing {
    /// Resolve all face maps; fails on the first structural problem.
    pub fn new(c: &CellComplex, p: &SidePairingSet) -> Result<Gluing> {
        let mut ps: Vec<&SidePairing> = p.pairings.iter().collect();
        ps.sort_by(|a, b| a.generator.cmp(&b.generator));
        let owner = owners(c);
        let mut maps = Vec::with_capacity(ps.len());
        for g in ps {
            let mut fm = resolve(c, g)?;
            let chi = match g.orientation {
                Some(o) if o == 1 || o == -1 => o,
                Some(o) => return Err(Error::Invalid(format!("orientation {o} of `{}` is not ±1", g.generator))),
                None => derived_chi(c, &owner, &fm).unwrap_or(1),
            };
            fm.chi = chi;
            maps.push(fm);
        }
        Ok(Gluing { complex: c.clone(), pairing: p.clone(), maps, owner })
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    /// The top cell containing a cell, if unique.
    pub fn owner(&self, cell: usize) -> Option<usize> {
        self.owner[cell]
    }

    pub fn generator(&self, step: Step) -> &str {
        &self.maps[step.map].generator
    }

    /// Facet crossed when leaving through `step`: source for forward steps.
    pub fn exit_facet(&self, step: Step) -> usize {
        let m = &self.maps[step.map];
        if step.inverse { m.target } else { m.source }
    }

    pub fn entry_facet(&self, step: Step) -> usize {
        let m = &self.maps[step.map];
        if step.inverse { m.source } else { m.target }
    }

    /// Apply a step to a face, returning the image and its transport sign.
    pub fn apply(&self, step: Step, face: usize) -> Option<(usize, i64)> {
        let m = &self.maps[step.map];
        if step.inverse { m.preimage(face) } else { m.image(face) }
    }

    /// All steps applicable to a face, in deterministic order.
    pub fn moves(&self, face: usize) -> Vec<(Step, usize, i64, i64)> {
        let mut out = Vec::new();
        for (i, m) in self.maps.iter().enumerate() {
            if let Some((img, t)) = m.image(face) {
                out.push((Step { map: i, inverse: false }, img, t, m.chi));
            }
            if let Some((img, t)) = m.preimage(face) {
                out.push((Step { map: i, inverse: true }, img, t, m.chi));
            }
        }
        out
    }

    /// Step crossing facet `facet` outward (source → forward, target → inverse).
    pub fn step_through(&self, facet: usize) -> Option<Step> {
        self.maps.iter().enumerate().find_map(|(i, m)| {
            if m.source == facet {
                Some(Step { map: i, inverse: false })
            } else if m.target == facet {
                Some(Step { map: i, inverse: true })
            } else {
                None
            }
        })
    }

    pub fn map_index(&self, generator: &str) -> Option<usize> {
        self.maps.iter().position(|m| m.generator == generator)
    }

    /// k-dimensional face cycles.
    pub fn cycles(&self, k: usize) -> Result<Vec<Orbit<usize>>> {
        let c = &self.complex;
        let nodes = c.cells_of_dim(k);
        let check = |f: &usize| !c.cell(*f).ideal;
        orbits(&nodes, |&f| self.moves(f), check, |f| c.id(*f).to_string())
    }
}

fn owners(c: &CellComplex) -> Vec<Option<usize>> {
    let mut owner = vec![None; c.len()];
    let mut multiple = vec![false; c.len()];
    for top in c.cells_of_dim(c.dim()) {
        for f in c.closure(top) {
            if owner[f].is_some() {
                multiple[f] = true;
            }
            owner[f] = Some(top);
        }
    }
    for (o, m) in owner.iter_mut().zip(multiple) {
        if m {
            *o = None;
        }
    }
    owner
}

fn resolve(c: &CellComplex, g: &SidePairing) -> Result<FaceMap> {
    let s = c.index_of(&g.source)?;
    let t = c.index_of(&g.target)?;
    let src = c.closure(s);
    let tgt = c.closure(t);
    let mut vmap: HashMap<usize, usize> = HashMap::new();
    for (a, b) in &g.vertex_map {
        vmap.insert(c.index_of(a)?, c.index_of(b)?);
    }
    let mut by_verts: HashMap<(usize, Vec<usize>), Vec<usize>> = HashMap::new();
    for &f in &tgt {
        by_verts.entry((c.cell(f).dim, c.vertices(f))).or_default().push(f);
    }
    let mut forward = BTreeMap::new();
    let mut order = src.clone();
    order.sort_by_key(|&f| c.cell(f).dim);
    for &f in &order {
        let vs = c.vertices(f);
        let mut img = Vec::with_capacity(vs.len());
        for v in &vs {
            let w = vmap.get(v).ok_or_else(|| {
                Error::Invalid(format!("vertex_map of `{}` misses vertex `{}`", g.generator, c.id(*v)))
            })?;
            img.push(*w);
        }
        img.sort();
        let key = (c.cell(f).dim, img);
        let image = match by_verts.get(&key).map(|v| v.as_slice()) {
            Some([one]) => *one,
            Some(_) => return Err(Error::AmbiguousImage(c.id(f).to_string())),
            None => {
                return Err(Error::Invalid(format!(
                    "`{}` does not induce a face map: `{}` has no image",
                    g.generator,
                    c.id(f)
                )))
            }
        };
        // transport sign from codimension-one faces
        let mut tau: Option<i64> = None;
        if c.cell(f).dim == 0 {
            tau = Some(1);
        } else {
            for &(e, sfe) in c.faces(f) {
                if sfe == 0 {
                    continue;
                }
                let Some(&(ie, te)) = forward.get(&e) else { continue };
                let sie = c.incidence(ie, image).unwrap_or(0);
                if sie == 0 {
                    return Err(Error::Invalid(format!(
                        "`{}`: incidence of `{}` in `{}` has no counterpart",
                        g.generator,
                        c.id(e),
                        c.id(f)
                    )));
                }
                let cand = sie * sfe * te;
                match tau {
                    None => tau = Some(cand),
                    Some(t0) if t0 != cand => {
                        return Err(Error::Invalid(format!(
                            "`{}`: incidence signs of `{}` are inconsistent with the pairing",
                            g.generator,
                            c.id(f)
                        )))
                    }
                    _ => {}
                }
            }
        }
        forward.insert(f, (image, tau.unwrap_or(1)));
    }
    let mut backward = BTreeMap::new();
    for (&f, &(i, t)) in &forward {
        if backward.insert(i, (f, t)).is_some() {
            return Err(Error::Invalid(format!("`{}` is not injective on faces", g.generator)));
        }
    }
    if backward.len() != tgt.len() {
        return Err(Error::Invalid(format!("`{}` is not onto the target closure", g.generator)));
    }
    Ok(FaceMap { generator: g.generator.clone(), source: s, target: t, chi: 1, forward, backward })
}

fn derived_chi(c: &CellComplex, owner: &[Option<usize>], fm: &FaceMap) -> Option<i64> {
    let tau = fm.image(fm.source)?.1;
    let p1 = owner[fm.source]?;
    let p2 = owner[fm.target]?;
    Some(-tau * c.incidence(fm.source, p1)? * c.incidence(fm.target, p2)?)
}

/// Character forced by the incidence signs: `−τ·[P₁:S]·[P₂:S′]`.
pub fn derived_character(c: &CellComplex, g: &SidePairing) -> Result<i64> {
    let fm = resolve(c, g)?;
    derived_chi(c, &owners(c), &fm)
        .ok_or_else(|| Error::Invalid(format!("facets of `{}` lack a unique top cell", g.generator)))
}

pub fn validate_pairing(c: &CellComplex, p: &SidePairingSet) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let n = c.dim();
    let mut seen: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut gens = BTreeSet::new();
    for g in &p.pairings {
        if !gens.insert(g.generator.clone()) {
            rep.push("duplicate-generator", format!("generator `{}` declared twice", g.generator), vec![]);
        }
        if g.source == g.target {
            rep.push("self-paired", format!("`{}` pairs facet `{}` to itself", g.generator, g.source), vec![g.source.clone()]);
        }
        for f in [&g.source, &g.target] {
            match c.index_of(f) {
                Err(_) => rep.push("unknown-cell", format!("`{}` names unknown facet `{f}`", g.generator), vec![f.clone()]),
                Ok(i) => {
                    if c.cell(i).dim + 1 != n {
                        rep.push(
                            "dimension-mismatch",
                            format!("`{f}` paired by `{}` has dimension {}, expected {}", g.generator, c.cell(i).dim, n - 1),
                            vec![f.clone()],
                        );
                    }
                    seen.entry(f.clone()).or_default().push(g.generator.clone());
                }
            }
        }
    }
    for f in c.cells_of_dim(n - 1) {
        let id = c.id(f);
        match seen.get(id).map(|v| v.len()).unwrap_or(0) {
            1 => {}
            0 => rep.push("coverage", format!("facet `{id}` is not paired"), vec![id.to_string()]),
            k => rep.push("coverage", format!("facet `{id}` is paired {k} times"), vec![id.to_string()]),
        }
    }
    let owner = owners(c);
    for g in &p.pairings {
        let (Ok(s), Ok(t)) = (c.index_of(&g.source), c.index_of(&g.target)) else { continue };
        let sv: BTreeSet<String> = c.vertices(s).iter().map(|&v| c.id(v).to_string()).collect();
        let tv: BTreeSet<String> = c.vertices(t).iter().map(|&v| c.id(v).to_string()).collect();
        let keys: BTreeSet<String> = g.vertex_map.keys().cloned().collect();
        let vals: BTreeSet<String> = g.vertex_map.values().cloned().collect();
        if keys != sv || vals != tv || vals.len() != g.vertex_map.len() {
            rep.push(
                "vertex-map",
                format!("vertex_map of `{}` is not a bijection between the facet vertex sets", g.generator),
                vec![g.source.clone(), g.target.clone()],
            );
            continue;
        }
        for (a, b) in &g.vertex_map {
            let (ia, ib) = (c.index_of(a).unwrap(), c.index_of(b).unwrap());
            if c.cell(ia).ideal != c.cell(ib).ideal {
                rep.push("ideal-mismatch", format!("`{}` sends `{a}` to `{b}` of different kind", g.generator), vec![a.clone(), b.clone()]);
            }
        }
        match resolve(c, g) {
            Err(e) => rep.push("poset-isomorphism", e.to_string(), vec![g.source.clone(), g.target.clone()]),
            Ok(fm) => {
                if let (Some(o), Some(d)) = (g.orientation, derived_chi(c, &owner, &fm)) {
                    if o != d {
                        rep.push(
                            "orientation",
                            format!("`{}` declares orientation {o} but incidences force {d}", g.generator),
                            vec![g.source.clone(), g.target.clone()],
                        );
                    }
                }
            }
        }
    }
    rep
}

pub fn induced_face_map(c: &CellComplex, g: &SidePairing, face: &str) -> Result<String> {
    let f = c.index_of(face)?;
    let s = c.index_of(&g.source)?;
    if !c.closure(s).contains(&f) {
        return Err(Error::NotInClosure { face: face.to_string(), facet: g.source.clone() });
    }
    let fm = resolve(c, g)?;
    Ok(c.id(fm.image(f).expect("closure member has an image").0).to_string())
}

/// An orbit of the pairing groupoid with a breadth-first witness tree.
#[derive(Debug, Clone)]
pub struct Orbit<N> {
    pub rep: N,
    /// Ascending.
    pub members: Vec<N>,
    /// Signs `(τ, χ)` of the composite map from the representative to each member.
    pub signs: BTreeMap<N, (i64, i64)>,
    /// Tree edges `(from, step, to)` in discovery order.
    pub tree: Vec<(N, Step, N)>,
}

impl<N: Ord + Copy> Orbit<N> {
    pub fn sign(&self, m: &N) -> (i64, i64) {
        self.signs[m]
    }

    /// Product `τ·χ` for a member.
    pub fn twist(&self, m: &N) -> i64 {
        let (t, c) = self.signs[m];
        t * c
    }
}

/// Orbits of `nodes` (given ascending) under the moves; transport conflicts
/// are errors for nodes where `check` holds.
pub(crate) fn orbits<N, F, C, D>(nodes: &[N], moves: F, check: C, show: D) -> Result<Vec<Orbit<N>>>
where
    N: Ord + Copy,
    F: Fn(&N) -> Vec<(Step, N, i64, i64)>,
    C: Fn(&N) -> bool,
    D: Fn(&N) -> String,
{
    let mut sorted = nodes.to_vec();
    sorted.sort();
    let mut done: BTreeSet<N> = BTreeSet::new();
    let mut out = Vec::new();
    for &start in &sorted {
        if done.contains(&start) {
            continue;
        }
        let mut signs = BTreeMap::new();
        signs.insert(start, (1, 1));
        let mut tree = Vec::new();
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let (tx, cx) = signs[&x];
            for (step, y, t, ch) in moves(&x) {
                let want = (tx * t, cx * ch);
                match signs.get(&y) {
                    None => {
                        signs.insert(y, want);
                        tree.push((x, step, y));
                        queue.push_back(y);
                    }
                    Some(&have) => {
                        if have != want && check(&y) {
                            return Err(Error::SubdivisionRequired(format!(
                                "`{}` is identified with itself with a flip",
                                show(&y)
                            )));
                        }
                    }
                }
            }
        }
        let members: Vec<N> = signs.keys().copied().collect();
        done.extend(members.iter().copied());
        out.push(Orbit { rep: start, members, signs, tree });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub generator: String,
    pub inverse: bool,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceCycle {
    pub dim: usize,
    pub representative: String,
    pub members: Vec<String>,
    pub edges: Vec<Transition>,
}

impl FaceCycle {
    pub(crate) fn from_orbit(g: &Gluing, k: usize, o: &Orbit<usize>) -> FaceCycle {
        let c = &g.complex;
        FaceCycle {
            dim: k,
            representative: c.id(o.rep).to_string(),
            members: o.members.iter().map(|&m| c.id(m).to_string()).collect(),
            edges: o
                .tree
                .iter()
                .map(|&(a, s, b)| Transition {
                    from: c.id(a).to_string(),
                    generator: g.generator(s).to_string(),
                    inverse: s.inverse,
                    to: c.id(b).to_string(),
                })
                .collect(),
        }
    }
}

pub fn face_cycles(c: &CellComplex, p: &SidePairingSet, k: usize) -> Result<Vec<FaceCycle>> {
    if k >= c.dim() {
        return Err(Error::Dimension(format!("cycle dimension {k} outside 0..{}", c.dim())));
    }
    let g = Gluing::new(c, p)?;
    Ok(g.cycles(k)?.iter().map(|o| FaceCycle::from_orbit(&g, k, o)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterReport {
    pub characters: BTreeMap<String, i64>,
    pub verdict: String,
}

impl CharacterReport {
    pub fn orientable(&self) -> bool {
        self.verdict == "orientable"
    }
}

pub fn orientation_character(p: &SidePairingSet) -> Result<CharacterReport> {
    let mut characters = BTreeMap::new();
    for g in &p.pairings {
        let o = g.orientation.ok_or_else(|| Error::MissingOrientation(g.generator.clone()))?;
        characters.insert(g.generator.clone(), o);
    }
    let verdict = if characters.values().all(|&x| x == 1) { "orientable" } else { "nonorientable-evidence" };
    Ok(CharacterReport { characters, verdict: verdict.to_string() })
}

pub const COPY_Q: &str = "@Q";
pub const COPY_HQ: &str = "@hQ";

/// Orientation double cover glued from two copies tagged `@Q` and `@hQ`.
pub fn double_cover(c: &CellComplex, p: &SidePairingSet, h: &str) -> Result<(CellComplex, SidePairingSet)> {
    let hp = p.get(h).ok_or_else(|| Error::UnknownGenerator(h.to_string()))?;
    match hp.orientation {
        None => return Err(Error::MissingOrientation(h.to_string())),
        Some(1) => return Err(Error::NotReversing(h.to_string())),
        _ => {}
    }
    let n = c.dim();
    let mut cells = Vec::with_capacity(2 * c.len());
    let mut inc = Vec::new();
    for tag in [COPY_Q, COPY_HQ] {
        for cell in c.cells() {
            cells.push(Cell { id: format!("{}{tag}", cell.id), ..cell.clone() });
        }
        for ((of, within), s) in c.incidences() {
            let flip = tag == COPY_HQ && c.cell(within).dim == n;
            inc.push(Incidence {
                of: format!("{}{tag}", c.id(of)),
                within: format!("{}{tag}", c.id(within)),
                sign: if flip { -s } else { s },
            });
        }
    }
    let cover = CellComplex::new(n, cells, inc)?;
    let mut pairings = Vec::new();
    for g in &p.pairings {
        let o = g.orientation.ok_or_else(|| Error::MissingOrientation(g.generator.clone()))?;
        for (from, other) in [(COPY_Q, COPY_HQ), (COPY_HQ, COPY_Q)] {
            let to = if o == 1 { from } else { other };
            pairings.push(SidePairing {
                generator: format!("{}{from}", g.generator),
                source: format!("{}{from}", g.source),
                target: format!("{}{to}", g.target),
                vertex_map: g.vertex_map.iter().map(|(a, b)| (format!("{a}{from}"), format!("{b}{to}"))).collect(),
                orientation: Some(1),
            });
        }
    }
    // H@hQ → H′@Q joins the two copies
    let set = SidePairingSet { pairings, doubling: vec![format!("{h}{COPY_HQ}")] };
    Ok((cover, set))
}
