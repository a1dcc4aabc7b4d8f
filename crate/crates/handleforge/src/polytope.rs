//! Oriented face lattices of convex polytopes from facet vertex sets.
//!
//! Faces are the nonempty intersections of facets. Incidence signs are
//! propagated through diamonds: every ridge of a cell lies in exactly two of
//! its facets, whose signs must cancel on that ridge.

use crate::complex::{Cell, CellComplex, Incidence};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone)]
pub struct PolytopeSpec {
    /// Id of the top cell.
    pub name: String,
    /// Vertex ids with their ideal flags.
    pub vertices: Vec<(String, bool)>,
    /// Facet ids with their vertex ids.
    pub facets: Vec<(String, Vec<String>)>,
}

/// Faces of one polytope, before naming.
struct Lattice {
    // vertex sets by dimension
    faces: Vec<Vec<BTreeSet<usize>>>,
}

fn lattice(n: usize, facet_sets: &[BTreeSet<usize>], nverts: usize) -> Result<Lattice> {
    let mut all: BTreeSet<BTreeSet<usize>> = facet_sets.iter().cloned().collect();
    let mut frontier: Vec<BTreeSet<usize>> = all.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for b in facet_sets {
                let c: BTreeSet<usize> = a.intersection(b).copied().collect();
                if !c.is_empty() && all.insert(c.clone()) {
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    for v in 0..nverts {
        if !all.contains(&BTreeSet::from([v])) {
            return Err(Error::Invalid(format!("vertex {v} is not an intersection of facets")));
        }
    }
    // rank by longest chain of proper subsets
    let mut sets: Vec<BTreeSet<usize>> = all.into_iter().collect();
    sets.sort_by_key(|s| s.len());
    let mut rank: Vec<usize> = Vec::with_capacity(sets.len());
    for i in 0..sets.len() {
        let r = (0..i)
            .filter(|&j| sets[j].len() < sets[i].len() && sets[j].is_subset(&sets[i]))
            .map(|j| rank[j] + 1)
            .max()
            .unwrap_or(0);
        rank.push(r);
    }
    let mut faces = vec![Vec::new(); n];
    for (s, r) in sets.into_iter().zip(rank) {
        if r >= n {
            return Err(Error::Invalid(format!("face of rank {r} in a {n}-polytope")));
        }
        faces[r].push(s);
    }
    for f in facet_sets {
        if !faces[n - 1].contains(f) {
            return Err(Error::Invalid("facet vertex sets do not form a polytope of the stated dimension".into()));
        }
    }
    Ok(Lattice { faces })
}

/// Build the oriented face lattice of several disjoint polytopes.
///
/// Intermediate faces are named `<top>/<d>:<v1>,<v2>,...` unless only one
/// polytope is given, in which case the prefix is dropped.
pub fn build(n: usize, specs: &[PolytopeSpec]) -> Result<CellComplex> {
    if n < 1 {
        return Err(Error::Dimension("polytope dimension must be at least 1".into()));
    }
    let mut cells = Vec::new();
    let mut incidence = Vec::new();
    for spec in specs {
        let prefix = if specs.len() > 1 { format!("{}/", spec.name) } else { String::new() };
        let vid: BTreeMap<&str, usize> =
            spec.vertices.iter().enumerate().map(|(i, (v, _))| (v.as_str(), i)).collect();
        let mut facet_sets = Vec::new();
        for (fid, vs) in &spec.facets {
            let set = vs
                .iter()
                .map(|v| vid.get(v.as_str()).copied().ok_or_else(|| Error::UnknownCell(v.clone())))
                .collect::<Result<BTreeSet<usize>>>()?;
            if set.is_empty() {
                return Err(Error::Invalid(format!("facet `{fid}` has no vertices")));
            }
            facet_sets.push(set);
        }
        let lat = lattice(n, &facet_sets, spec.vertices.len())?;

        // name every face
        let mut name: BTreeMap<BTreeSet<usize>, String> = BTreeMap::new();
        for (i, (v, _)) in spec.vertices.iter().enumerate() {
            name.insert(BTreeSet::from([i]), v.clone());
        }
        for (set, (fid, _)) in facet_sets.iter().zip(&spec.facets) {
            if n >= 2 {
                name.insert(set.clone(), fid.clone());
            }
        }
        for d in 1..n.saturating_sub(1) {
            for s in &lat.faces[d] {
                let vs: Vec<&str> = s.iter().map(|&i| spec.vertices[i].0.as_str()).collect();
                name.insert(s.clone(), format!("{prefix}{d}:{}", vs.join(",")));
            }
        }
        for (v, ideal) in &spec.vertices {
            cells.push(Cell { id: v.clone(), dim: 0, ideal: *ideal, label: None });
        }
        for d in 1..n {
            for s in &lat.faces[d] {
                cells.push(Cell::new(name[s].clone(), d));
            }
        }
        cells.push(Cell::new(spec.name.clone(), n));

        // orient: faces of each cell, signs propagated across ridges
        let mut grid: Vec<Vec<BTreeSet<usize>>> = lat.faces.clone();
        let top: BTreeSet<usize> = (0..spec.vertices.len()).collect();
        grid.push(vec![top.clone()]);
        for d in 1..=n {
            for s in &grid[d] {
                let cell_name = if d == n { spec.name.clone() } else { name[s].clone() };
                let subs: Vec<&BTreeSet<usize>> = grid[d - 1].iter().filter(|f| f.is_subset(s)).collect();
                let signs = orient_cell(&grid, d, &subs, &name)?;
                for (f, sg) in subs.iter().zip(signs) {
                    incidence.push(Incidence { of: name[*f].clone(), within: cell_name.clone(), sign: sg });
                }
            }
        }
    }
    CellComplex::new(n, cells, incidence)
}

// Signs for the facets `subs` of a d-cell, with the lexicographically first
// named facet positive.
fn orient_cell(
    grid: &[Vec<BTreeSet<usize>>],
    d: usize,
    subs: &[&BTreeSet<usize>],
    name: &BTreeMap<BTreeSet<usize>, String>,
) -> Result<Vec<i64>> {
    if d == 1 {
        if subs.len() != 2 {
            return Err(Error::Invalid("edge without two endpoints".into()));
        }
        let (a, b) = (&name[subs[0]], &name[subs[1]]);
        return Ok(if a < b { vec![-1, 1] } else { vec![1, -1] });
    }
    // incidence sign of a (d-2)-face g in a (d-1)-face f, computed recursively
    let inner = |f: &BTreeSet<usize>| -> Result<BTreeMap<BTreeSet<usize>, i64>> {
        let gs: Vec<&BTreeSet<usize>> = grid[d - 2].iter().filter(|g| g.is_subset(f)).collect();
        let s = orient_cell(grid, d - 1, &gs, name)?;
        Ok(gs.into_iter().cloned().zip(s).collect())
    };
    let inners = subs.iter().map(|f| inner(f)).collect::<Result<Vec<_>>>()?;
    let mut sign = vec![0i64; subs.len()];
    let first = (0..subs.len()).min_by_key(|&i| &name[subs[i]]).unwrap();
    sign[first] = 1;
    let mut queue = VecDeque::from([first]);
    while let Some(i) = queue.pop_front() {
        for (g, &s_ig) in &inners[i] {
            let others: Vec<usize> = (0..subs.len()).filter(|&j| j != i && inners[j].contains_key(g)).collect();
            if others.len() != 1 {
                return Err(Error::Invalid(format!("ridge in {} facets of a {d}-cell", others.len() + 1)));
            }
            let j = others[0];
            let want = -sign[i] * s_ig * inners[j][g];
            if sign[j] == 0 {
                sign[j] = want;
                queue.push_back(j);
            } else if sign[j] != want {
                return Err(Error::Invalid("non-orientable cell boundary".into()));
            }
        }
    }
    if sign.contains(&0) {
        return Err(Error::Invalid("disconnected cell boundary".into()));
    }
    Ok(sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_complex;

    #[test]
    fn square_orientation_closes() {
        let spec = PolytopeSpec {
            name: "Q".into(),
            vertices: ["a", "b", "c", "d"].iter().map(|v| (v.to_string(), false)).collect(),
            facets: vec![
                ("ab".into(), vec!["a".into(), "b".into()]),
                ("bc".into(), vec!["b".into(), "c".into()]),
                ("cd".into(), vec!["c".into(), "d".into()]),
                ("da".into(), vec!["d".into(), "a".into()]),
            ],
        };
        let c = build(2, &[spec]).unwrap();
        assert_eq!(c.counts(), vec![4, 4, 1]);
        assert!(validate_complex(&c).is_empty());
    }
}
