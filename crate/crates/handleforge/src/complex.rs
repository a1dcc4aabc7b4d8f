//! Regular cell complexes with signed incidence numbers.

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::pairing::PairingDoc;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub const SCHEMA: &str = "handleforge/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ideal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Cell {
    pub fn new(id: impl Into<String>, dim: usize) -> Self {
        Cell { id: id.into(), dim, ideal: false, label: None }
    }

    pub fn ideal(id: impl Into<String>) -> Self {
        Cell { id: id.into(), dim: 0, ideal: true, label: None }
    }
}

/// `sign` is the incidence number of the cell `of` in the boundary of `in`.
/// A zero sign records a face relation that cancels in the boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Incidence {
    pub of: String,
    #[serde(rename = "in")]
    pub within: String,
    pub sign: i64,
}

/// On-disk document: a complex, optionally with its side-pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema: String,
    pub dim: usize,
    pub cells: Vec<Cell>,
    pub incidence: Vec<Incidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairings: Option<Vec<PairingDoc>>,
    /// Generators added by doubling, each cancelled by a 2-handle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doubling: Option<Vec<String>>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let doc: Document = serde_json::from_str(text).map_err(classify)?;
        if doc.schema != SCHEMA {
            return Err(Error::Schema(format!("expected schema `{SCHEMA}`, found `{}`", doc.schema)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

pub(crate) fn classify(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => Error::Schema(e.to_string()),
        _ => Error::Parse(e.to_string()),
    }
}

#[derive(Debug, Clone)]
pub struct CellComplex {
    dim: usize,
    cells: Vec<Cell>,
    index: HashMap<String, usize>,
    // (of, in) -> sign
    incidence: BTreeMap<(usize, usize), i64>,
    faces: Vec<Vec<(usize, i64)>>,
    cofaces: Vec<Vec<(usize, i64)>>,
}

impl PartialEq for CellComplex {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.cells == other.cells && self.incidence == other.incidence
    }
}

impl CellComplex {
    /// Assemble a complex, rejecting duplicate ids and unknown cells only.
    /// Other defects are left for [`validate_complex`].
    pub fn from_parts(dim: usize, mut cells: Vec<Cell>, incidence: Vec<Incidence>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("complex dimension must be at least 1".into()));
        }
        cells.sort_by(|a, b| a.id.cmp(&b.id));
        for w in cells.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::Schema(format!("duplicate cell id `{}`", w[0].id)));
            }
        }
        let index: HashMap<String, usize> =
            cells.iter().enumerate().map(|(i, c)| (c.id.clone(), i)).collect();
        let mut inc = BTreeMap::new();
        for e in &incidence {
            let of = *index.get(&e.of).ok_or_else(|| Error::UnknownCell(e.of.clone()))?;
            let within = *index.get(&e.within).ok_or_else(|| Error::UnknownCell(e.within.clone()))?;
            if inc.insert((of, within), e.sign).is_some() {
                return Err(Error::Schema(format!("duplicate incidence ({}, {})", e.of, e.within)));
            }
        }
        let mut faces = vec![Vec::new(); cells.len()];
        let mut cofaces = vec![Vec::new(); cells.len()];
        for (&(of, within), &s) in &inc {
            faces[within].push((of, s));
            cofaces[of].push((within, s));
        }
        Ok(CellComplex { dim, cells, index, incidence: inc, faces, cofaces })
    }

    /// Strict constructor: also rejects cells above `dim` and incidences
    /// between non-adjacent dimensions.
    pub fn new(dim: usize, cells: Vec<Cell>, incidence: Vec<Incidence>) -> Result<Self> {
        let c = Self::from_parts(dim, cells, incidence)?;
        if let Some(cell) = c.cells.iter().find(|x| x.dim > dim) {
            return Err(Error::Dimension(format!("cell `{}` has dimension {} > {}", cell.id, cell.dim, dim)));
        }
        for &(of, within) in c.incidence.keys() {
            if c.cells[of].dim + 1 != c.cells[within].dim {
                return Err(Error::Dimension(format!(
                    "incidence between `{}` (dim {}) and `{}` (dim {})",
                    c.cells[of].id, c.cells[of].dim, c.cells[within].id, c.cells[within].dim
                )));
            }
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn id(&self, i: usize) -> &str {
        &self.cells[i].id
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownCell(id.to_string()))
    }

    /// Cells of dimension `k`, ascending by id.
    pub fn cells_of_dim(&self, k: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].dim == k).collect()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut v = vec![0; self.dim + 1];
        for c in &self.cells {
            if c.dim <= self.dim {
                v[c.dim] += 1;
            }
        }
        v
    }

    pub fn incidence(&self, of: usize, within: usize) -> Option<i64> {
        self.incidence.get(&(of, within)).copied()
    }

    pub fn incidences(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.incidence.iter().map(|(&k, &v)| (k, v))
    }

    /// Codimension-one faces of a cell with their signs.
    pub fn faces(&self, i: usize) -> &[(usize, i64)] {
        &self.faces[i]
    }

    pub fn cofaces(&self, i: usize) -> &[(usize, i64)] {
        &self.cofaces[i]
    }

    /// The cell and all its faces, ascending.
    pub fn closure(&self, i: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend(self.faces[c].iter().map(|&(f, _)| f));
            }
        }
        seen.into_iter().collect()
    }

    /// Vertices in the closure of a cell, ascending.
    pub fn vertices(&self, i: usize) -> Vec<usize> {
        self.closure(i).into_iter().filter(|&c| self.cells[c].dim == 0).collect()
    }

    /// Cells whose closure contains `i`, including `i`.
    pub fn star(&self, i: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend(self.cofaces[c].iter().map(|&(f, _)| f));
            }
        }
        seen.into_iter().collect()
    }

    pub fn has_ideal(&self) -> bool {
        self.cells.iter().any(|c| c.ideal)
    }

    pub fn to_document(&self) -> Document {
        Document {
            schema: SCHEMA.to_string(),
            dim: self.dim,
            cells: self.cells.clone(),
            incidence: self
                .incidence
                .iter()
                .map(|(&(of, within), &sign)| Incidence {
                    of: self.cells[of].id.clone(),
                    within: self.cells[within].id.clone(),
                    sign,
                })
                .collect(),
            pairings: None,
            doubling: None,
        }
    }

    pub fn from_document(doc: &Document) -> Result<Self> {
        if doc.schema != SCHEMA {
            return Err(Error::Schema(format!("expected schema `{SCHEMA}`")));
        }
        Self::new(doc.dim, doc.cells.clone(), doc.incidence.clone())
    }
}

/// Parse a complex document (any pairing section is ignored here).
pub fn load_complex(text: &str) -> Result<CellComplex> {
    CellComplex::from_document(&Document::parse(text)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: String,
    pub message: String,
    pub cells: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, kind: &str, message: String, cells: Vec<String>) {
        self.violations.push(Violation { kind: kind.to_string(), message, cells });
    }
}

pub fn validate_complex(c: &CellComplex) -> ValidationReport {
    let mut rep = ValidationReport::default();
    for cell in c.cells() {
        if cell.dim > c.dim {
            rep.push("dimension-range", format!("cell `{}` exceeds dimension {}", cell.id, c.dim), vec![cell.id.clone()]);
        }
        if cell.ideal && cell.dim != 0 {
            rep.push("ideal-dimension", format!("ideal cell `{}` has dimension {}", cell.id, cell.dim), vec![cell.id.clone()]);
        }
    }
    for ((of, within), _) in c.incidences() {
        if c.cell(of).dim + 1 != c.cell(within).dim {
            rep.push(
                "dimension-gap",
                format!("`{}` (dim {}) is incident to `{}` (dim {})", c.id(of), c.cell(of).dim, c.id(within), c.cell(within).dim),
                vec![c.id(within).to_string(), c.id(of).to_string()],
            );
        }
    }
    for i in 0..c.len() {
        if c.cell(i).dim >= 1 && !c.faces(i).iter().any(|&(f, _)| c.cell(f).dim + 1 == c.cell(i).dim) {
            rep.push("grading-gap", format!("{}-cell `{}` has no codimension-one face", c.cell(i).dim, c.id(i)), vec![c.id(i).to_string()]);
        }
    }
    // composite boundary
    for top in 0..c.len() {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for &(f, s) in c.faces(top) {
            if c.cell(f).dim + 1 != c.cell(top).dim {
                continue;
            }
            for &(e, t) in c.faces(f) {
                if c.cell(e).dim + 1 == c.cell(f).dim {
                    *acc.entry(e).or_insert(0) += s * t;
                }
            }
        }
        for (e, v) in acc {
            if v != 0 {
                rep.push(
                    "nonzero-composite",
                    format!("composite incidence of `{}` in `{}` is {}", c.id(e), c.id(top), v),
                    vec![c.id(top).to_string(), c.id(e).to_string()],
                );
            }
        }
    }
    rep
}

/// Rows: (k−1)-cells, columns: k-cells, both ascending by id.
pub fn boundary_matrix(c: &CellComplex, k: usize) -> Result<IntMatrix> {
    if k == 0 || k > c.dim() {
        return Err(Error::Dimension(format!("boundary degree {k} outside 1..={}", c.dim())));
    }
    let rows = c.cells_of_dim(k - 1);
    let cols = c.cells_of_dim(k);
    let row_of: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut m = IntMatrix::zeros(rows.len(), cols.len());
    for (j, &col) in cols.iter().enumerate() {
        for &(f, s) in c.faces(col) {
            if let Some(&i) = row_of.get(&f) {
                m.set(i, j, s);
            }
        }
    }
    Ok(m)
}
