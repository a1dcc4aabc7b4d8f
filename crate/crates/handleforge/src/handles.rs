//! Handle decompositions from face cycles, their chain complexes and homology.

use crate::complex::{validate_complex, CellComplex};
use crate::error::{Error, Result};
use crate::group::{Letter, Word};
use crate::intmat::{smith, IntMatrix};
use crate::pairing::{validate_pairing, FaceCycle, Gluing, Orbit, SidePairingSet, Step};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HandleOrigin {
    /// The top cell of one polytope copy.
    Body { cell: String },
    /// A cycle of faces of the given dimension.
    Cycle { dim: usize, representative: String },
    /// Added by filling a cusp.
    Filling { cusp: String, part: String },
    /// Cancels the 1-handle of a generator when 0-handles are merged.
    Doubling { generator: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Handle {
    pub index: usize,
    pub id: String,
    pub origin: HandleOrigin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<FaceCycle>,
}

#[derive(Debug, Clone)]
pub struct HandleDecomposition {
    pub n: usize,
    /// Handles grouped by index `0..=n`.
    pub handles: Vec<Vec<Handle>>,
    /// `boundaries[j]` is ∂_j: C_j → C_{j−1}; `boundaries[0]` is empty.
    pub boundaries: Vec<IntMatrix>,
    /// Attaching words of the 2-handles, aligned with `handles[2]`.
    pub words: Vec<Option<Word>>,
    /// Generator symbols of the 1-handles, aligned with `handles[1]`.
    pub generators: Vec<String>,
    pub boundary_flag: bool,
    /// Ideal-vertex cycles (as vertex representatives) already filled.
    pub filled: Vec<String>,
    pub(crate) gluing: Arc<Gluing>,
    pub(crate) orbits: Vec<Vec<Orbit<usize>>>,
    // cell -> (cycle index within its dimension)
    pub(crate) cycle_of: Vec<usize>,
}

impl HandleDecomposition {
    pub fn gluing(&self) -> &Gluing {
        &self.gluing
    }

    pub fn complex(&self) -> &CellComplex {
        &self.gluing.complex
    }

    pub fn counts(&self) -> Vec<usize> {
        self.handles.iter().map(|h| h.len()).collect()
    }

    pub(crate) fn orbit_of(&self, cell: usize) -> &Orbit<usize> {
        let d = self.complex().cell(cell).dim;
        &self.orbits[d][self.cycle_of[cell]]
    }

    /// Handle index position of the face cycle containing `cell`, if it
    /// carries a handle.
    pub(crate) fn handle_of(&self, cell: usize) -> Option<(usize, usize)> {
        let c = self.complex();
        let n = self.n;
        let d = c.cell(cell).dim;
        if d == n {
            let pos = self.handles[0].iter().position(|h| h.id == c.id(cell))?;
            return Some((0, pos));
        }
        let rep = self.orbit_of(cell).rep;
        let j = n - d;
        let pos = self.handles[j].iter().position(|h| match &h.origin {
            HandleOrigin::Cycle { representative, .. } => representative == c.id(rep),
            _ => false,
        })?;
        Some((j, pos))
    }

    /// Append a handle of index `j` with boundary column in C_{j−1}.
    pub(crate) fn add_handle(&mut self, handle: Handle, column: Vec<i64>, word: Option<Word>) {
        let j = handle.index;
        assert!(j >= 1 && j <= self.n);
        let b = &self.boundaries[j];
        assert_eq!(column.len(), b.rows());
        self.boundaries[j] = b.hstack(&IntMatrix::from_columns(b.rows(), &[column]));
        if j < self.n {
            let up = &self.boundaries[j + 1];
            let mut rows = up.to_rows();
            rows.push(vec![0; up.cols()]);
            let mut m = IntMatrix::zeros(rows.len(), up.cols());
            for (r, row) in rows.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    m.set(r, c, v);
                }
            }
            self.boundaries[j + 1] = m;
        }
        if j == 2 {
            self.words.push(word);
        }
        if j == 1 {
            self.generators.push(handle.id.clone());
        }
        self.handles[j].push(handle);
    }

    /// Ideal-vertex cycles, as orbits of vertices.
    pub(crate) fn ideal_cycles(&self) -> Vec<&Orbit<usize>> {
        let c = self.complex();
        self.orbits[0].iter().filter(|o| c.cell(o.rep).ideal).collect()
    }

    /// Spanning forest of 1-handles over the 0-handles, preferring doubling
    /// generators. Returns 1-handle positions.
    pub(crate) fn zero_handle_tree(&self) -> Vec<usize> {
        let k = self.handles[0].len();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut order: Vec<usize> = (0..self.handles[1].len()).collect();
        let doubling = &self.gluing.pairing.doubling;
        order.sort_by_key(|&i| (!doubling.contains(&self.generators[i]), self.generators[i].clone()));
        let d1 = &self.boundaries[1];
        let mut tree = Vec::new();
        for i in order {
            let ends: Vec<usize> = (0..k).filter(|&r| d1.get(r, i) != 0).collect();
            if let [a, b] = ends[..] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                    tree.push(i);
                }
            }
        }
        tree
    }

    /// Merge all 0-handles into one, adding a cancelling 2-handle for each
    /// tree generator.
    pub fn merge_zero_handles(&mut self) {
        if self.handles[0].len() <= 1 {
            return;
        }
        for t in self.zero_handle_tree() {
            let g = self.generators[t].clone();
            let mut col = vec![0; self.handles[1].len()];
            col[t] = 1;
            let h = Handle { index: 2, id: format!("double:{g}"), origin: HandleOrigin::Doubling { generator: g }, cycle: None };
            self.add_handle(h, col, Some(vec![Letter::new(t, false)]));
        }
        let first = self.handles[0][0].clone();
        self.handles[0] = vec![first];
        let cols = self.handles[1].len();
        self.boundaries[1] = IntMatrix::zeros(1, cols);
        self.boundaries[0] = IntMatrix::zeros(0, 1);
    }
}

/// Word read around a codimension-two face cycle, starting at its representative.
pub(crate) fn cycle_word(g: &Gluing, orbit: &Orbit<usize>, generators: &[String]) -> Result<(Word, Vec<(usize, Step)>)> {
    let c = &g.complex;
    let n = c.dim();
    let facets_of = |f: usize| -> Vec<usize> {
        let mut v: Vec<usize> = c.cofaces(f).iter().map(|&(x, _)| x).filter(|&x| c.cell(x).dim + 1 == n).collect();
        v.sort();
        v
    };
    let start_face = orbit.rep;
    let fs = facets_of(start_face);
    if fs.len() != 2 {
        return Err(Error::Invalid(format!("`{}` lies in {} facets, expected 2", c.id(start_face), fs.len())));
    }
    let start = (start_face, fs[0]);
    let (mut f, mut s) = start;
    let mut word = Vec::new();
    let mut trail = Vec::new();
    let limit = 2 * orbit.members.len() + 2;
    loop {
        let step = g.step_through(s).ok_or_else(|| Error::Invalid(format!("facet `{}` is unpaired", c.id(s))))?;
        let gi = generators.iter().position(|x| x == g.generator(step)).expect("generator has a 1-handle");
        word.push(Letter::new(gi, step.inverse));
        trail.push((f, step));
        let (f2, _) = g.apply(step, f).expect("face lies in the crossed facet");
        let entry = g.entry_facet(step);
        let fs2 = facets_of(f2);
        let other = fs2.iter().copied().find(|&x| x != entry).ok_or_else(|| {
            Error::Invalid(format!("`{}` lies in a single facet", c.id(f2)))
        })?;
        f = f2;
        s = other;
        if (f, s) == start {
            break;
        }
        if word.len() > limit {
            return Err(Error::SubdivisionRequired(format!("walk around `{}` does not close", c.id(start_face))));
        }
    }
    Ok((word, trail))
}

pub fn handle_decomposition(c: &CellComplex, p: &SidePairingSet) -> Result<HandleDecomposition> {
    let rep = validate_complex(c);
    if !rep.is_empty() {
        return Err(Error::Invalid(format!("complex fails validation: {}", rep.violations[0].message)));
    }
    let rep = validate_pairing(c, p);
    if !rep.is_empty() {
        return Err(Error::Invalid(format!("pairing fails validation: {}", rep.violations[0].message)));
    }
    let g = Gluing::new(c, p)?;
    let n = c.dim();
    for i in 0..c.len() {
        if g.owner(i).is_none() {
            return Err(Error::Invalid(format!("`{}` does not lie in exactly one top cell", c.id(i))));
        }
    }
    let mut orbits = Vec::with_capacity(n);
    let mut cycle_of = vec![usize::MAX; c.len()];
    for k in 0..n {
        let os = g.cycles(k)?;
        for (i, o) in os.iter().enumerate() {
            for &m in &o.members {
                cycle_of[m] = i;
            }
        }
        orbits.push(os);
    }
    let tops = c.cells_of_dim(n);
    for (i, &t) in tops.iter().enumerate() {
        cycle_of[t] = i;
    }

    let mut handles: Vec<Vec<Handle>> = vec![Vec::new(); n + 1];
    handles[0] = tops
        .iter()
        .map(|&t| Handle { index: 0, id: c.id(t).to_string(), origin: HandleOrigin::Body { cell: c.id(t).to_string() }, cycle: None })
        .collect();
    // handle position of each cycle (None for ideal vertex cycles)
    let mut position: Vec<Vec<Option<usize>>> = Vec::with_capacity(n);
    let mut generators = Vec::new();
    for (k, os) in orbits.iter().enumerate() {
        let j = n - k;
        let mut pos = Vec::with_capacity(os.len());
        for o in os {
            if k == 0 && c.cell(o.rep).ideal {
                pos.push(None);
                continue;
            }
            let fc = FaceCycle::from_orbit(&g, k, o);
            let id = if j == 1 {
                let step = g.step_through(o.rep).expect("facet is paired");
                g.generator(step).to_string()
            } else {
                c.id(o.rep).to_string()
            };
            if j == 1 {
                generators.push(id.clone());
            }
            pos.push(Some(handles[j].len()));
            handles[j].push(Handle {
                index: j,
                id,
                origin: HandleOrigin::Cycle { dim: k, representative: c.id(o.rep).to_string() },
                cycle: Some(fc),
            });
        }
        position.push(pos);
    }

    // ∂_j from incidences of k-faces in representatives of (k+1)-cycles
    let mut boundaries = vec![IntMatrix::zeros(0, handles[0].len())];
    for j in 1..=n {
        let k = n - j;
        let mut m = IntMatrix::zeros(handles[j - 1].len(), handles[j].len());
        let reps: Vec<(usize, usize)> = if k + 1 == n {
            tops.iter().enumerate().map(|(i, &t)| (t, i)).collect()
        } else {
            orbits[k + 1]
                .iter()
                .enumerate()
                .filter_map(|(i, o)| position[k + 1][i].map(|p| (o.rep, p)))
                .collect()
        };
        for (big, row) in reps {
            for &(f, s) in c.faces(big) {
                if c.cell(f).dim != k || s == 0 {
                    continue;
                }
                let ci = cycle_of[f];
                let Some(col) = position[k][ci] else { continue };
                m.add_to(row, col, s * orbits[k][ci].twist(&f));
            }
        }
        boundaries.push(m);
    }

    let mut hd = HandleDecomposition {
        n,
        handles,
        boundaries,
        words: Vec::new(),
        generators,
        boundary_flag: c.has_ideal(),
        filled: Vec::new(),
        gluing: Arc::new(g),
        orbits,
        cycle_of,
    };
    if n >= 2 {
        let k = n - 2;
        let mut words = Vec::new();
        for (i, o) in hd.orbits[k].iter().enumerate() {
            if position[k][i].is_some() {
                words.push(Some(cycle_word(&hd.gluing, o, &hd.generators)?.0));
            }
        }
        hd.words = words;
    }
    Ok(hd)
}

pub fn handle_counts(hd: &HandleDecomposition) -> Vec<usize> {
    hd.counts()
}

pub fn euler_characteristic(hd: &HandleDecomposition) -> i64 {
    hd.counts().iter().enumerate().map(|(j, &x)| if j % 2 == 0 { x as i64 } else { -(x as i64) }).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    pub ranks: Vec<usize>,
    /// `boundaries[j]` is ∂_{j+1}: C_{j+1} → C_j.
    pub boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    pub fn new(ranks: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<ChainComplex> {
        if boundaries.len() + 1 != ranks.len() {
            return Err(Error::Invalid("need one boundary map per positive degree".into()));
        }
        for (j, b) in boundaries.iter().enumerate() {
            if b.rows() != ranks[j] || b.cols() != ranks[j + 1] {
                return Err(Error::Invalid(format!("∂_{} has the wrong shape", j + 1)));
            }
        }
        for j in 1..boundaries.len() {
            if !boundaries[j - 1].mul(&boundaries[j]).is_zero() {
                return Err(Error::BoundarySquared(j));
            }
        }
        Ok(ChainComplex { ranks, boundaries })
    }

    /// ∂_j for j ≥ 1.
    pub fn d(&self, j: usize) -> &IntMatrix {
        &self.boundaries[j - 1]
    }
}

pub fn chain_complex(hd: &HandleDecomposition) -> Result<ChainComplex> {
    ChainComplex::new(hd.counts(), hd.boundaries[1..].to_vec())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<i64>>,
}

impl HomologyProfile {
    pub fn euler(&self) -> i64 {
        self.betti.iter().enumerate().map(|(j, &b)| if j % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.iter().all(|t| t.is_empty())
    }

    /// Homology of the n-sphere.
    pub fn is_sphere(&self) -> bool {
        let n = self.betti.len() - 1;
        self.is_torsion_free() && self.betti.iter().enumerate().all(|(j, &b)| b == usize::from(j == 0 || j == n))
    }
}

pub fn homology(cc: &ChainComplex) -> HomologyProfile {
    let top = cc.ranks.len();
    let ranks: Vec<usize> = cc.boundaries.iter().map(|b| b.rank()).collect();
    let diag: Vec<Vec<i64>> = cc.boundaries.iter().map(|b| smith(b).diagonal).collect();
    let mut betti = Vec::with_capacity(top);
    let mut torsion = Vec::with_capacity(top);
    for j in 0..top {
        let rin = if j == 0 { 0 } else { ranks[j - 1] };
        let rout = if j + 1 < top { ranks[j] } else { 0 };
        betti.push(cc.ranks[j] - rin - rout);
        torsion.push(if j + 1 < top { diag[j].iter().copied().filter(|&x| x > 1).collect() } else { Vec::new() });
    }
    HomologyProfile { betti, torsion }
}

/// Compact summary used in reports.
pub fn cycle_membership(hd: &HandleDecomposition) -> BTreeMap<usize, Vec<Vec<String>>> {
    let c = hd.complex();
    hd.orbits
        .iter()
        .enumerate()
        .map(|(k, os)| (k, os.iter().map(|o| o.members.iter().map(|&m| c.id(m).to_string()).collect()).collect()))
        .collect()
}
