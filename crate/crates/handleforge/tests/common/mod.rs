#![allow(dead_code)]

use handleforge::complex::{Cell, CellComplex, Incidence};
use handleforge::group::{Letter, Presentation};
use handleforge::handles::{handle_decomposition, HandleDecomposition};
use handleforge::intmat::IntMatrix;
use handleforge::library::{by_name, NAMES};
use proptest::prelude::*;

pub fn decomposition(name: &str) -> HandleDecomposition {
    let e = by_name(name).unwrap();
    handle_decomposition(&e.complex, &e.pairing).unwrap()
}

pub fn all_examples() -> Vec<(&'static str, HandleDecomposition)> {
    NAMES.iter().map(|&n| (n, decomposition(n))).collect()
}

pub fn inc(of: &str, within: &str, sign: i64) -> Incidence {
    Incidence { of: of.into(), within: within.into(), sign }
}

/// Ball whose boundary is two triangles glued along their edges.
pub fn triangle_pillow() -> CellComplex {
    let mut cells: Vec<Cell> = ["1", "2", "3"].iter().map(|v| Cell::new(*v, 0)).collect();
    cells.extend(["12", "13", "23"].iter().map(|e| Cell::new(*e, 1)));
    cells.extend([Cell::new("F", 2), Cell::new("G", 2), Cell::new("B", 3)]);
    let mut i = vec![inc("1", "12", -1), inc("2", "12", 1), inc("1", "13", -1), inc("3", "13", 1), inc("2", "23", -1), inc("3", "23", 1)];
    for f in ["F", "G"] {
        i.extend([inc("12", f, 1), inc("23", f, 1), inc("13", f, -1)]);
    }
    i.extend([inc("F", "B", 1), inc("G", "B", -1)]);
    CellComplex::new(3, cells, i).unwrap()
}

/// 4-ball whose boundary is two 3-balls glued along the boundary of a
/// tetrahedron.
pub fn tetrahedral_pillow() -> CellComplex {
    let vs = ["1", "2", "3", "4"];
    let mut cells: Vec<Cell> = vs.iter().map(|v| Cell::new(*v, 0)).collect();
    let mut i = Vec::new();
    let mut edges = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            let e = format!("{}{}", vs[a], vs[b]);
            i.push(inc(vs[a], &e, -1));
            i.push(inc(vs[b], &e, 1));
            cells.push(Cell::new(e.clone(), 1));
            edges.push(e);
        }
    }
    // triangle abc has boundary ab + bc − ac; the tetrahedron boundary is
    // Σ (−1)^k (face without vertex k)
    let tri = [("234", 1), ("134", -1), ("124", 1), ("123", -1)];
    for (t, _) in tri {
        let b = t.as_bytes();
        let (x, y, z) = (b[0] as char, b[1] as char, b[2] as char);
        cells.push(Cell::new(t, 2));
        i.push(inc(&format!("{x}{y}"), t, 1));
        i.push(inc(&format!("{y}{z}"), t, 1));
        i.push(inc(&format!("{x}{z}"), t, -1));
    }
    for (f, s) in [("F", 1), ("G", -1)] {
        cells.push(Cell::new(f, 3));
        for (t, sign) in tri {
            i.push(inc(t, f, sign));
        }
        i.push(inc(f, "B", s));
    }
    cells.push(Cell::new("B", 4));
    CellComplex::new(4, cells, i).unwrap()
}

/// Rank and, for square input, the determinant by fraction-free
/// elimination over i128.
pub fn bareiss(a: &IntMatrix) -> (usize, Option<i128>) {
    let (m, n) = (a.rows(), a.cols());
    let mut x: Vec<Vec<i128>> = (0..m).map(|r| a.row(r).iter().map(|&v| v as i128).collect()).collect();
    let mut rank = 0;
    let mut prev = 1i128;
    let mut sign = 1i128;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&r| x[r][col] != 0) else { continue };
        if p != rank {
            x.swap(p, rank);
            sign = -sign;
        }
        for r in rank + 1..m {
            for c in col + 1..n {
                x[r][c] = (x[rank][col] * x[r][c] - x[r][col] * x[rank][c]) / prev;
            }
            x[r][col] = 0;
        }
        prev = x[rank][col];
        rank += 1;
    }
    let det = (m == n).then(|| if rank == n { sign * x[n - 1][n - 1] } else { 0 });
    (rank, det)
}

pub fn matrix(max_dim: usize, max_entry: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-max_entry..=max_entry, r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c).map(|x| x.to_vec()).collect();
            IntMatrix::from_rows(&rows)
        })
    })
}

/// Sparse matrices, so that small invariant factors other than 1 show up.
pub fn sparse_matrix(max_dim: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(prop_oneof![6 => Just(0i64), 1 => -6i64..=6], r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c).map(|x| x.to_vec()).collect();
            IntMatrix::from_rows(&rows)
        })
    })
}

pub fn presentation(max_gens: usize, max_len: usize) -> impl Strategy<Value = Presentation> {
    (1..=max_gens).prop_flat_map(move |g| {
        let letter = (0..g, any::<bool>()).prop_map(|(i, inv)| Letter::new(i, inv));
        let rel = proptest::collection::vec(letter, 1..=max_len);
        proptest::collection::vec(rel, 0..=max_gens + 1).prop_map(move |rels| {
            let gens = (0..g).map(|i| ["x", "y", "z", "w"][i % 4].to_string()).collect();
            Presentation::new(gens, rels)
        })
    })
}

/// ∂ ∘ ∂ computed directly from the stored matrices.
pub fn boundary_squares_vanish(hd: &HandleDecomposition) -> bool {
    let b = &hd.boundaries;
    (2..b.len()).all(|j| b[j - 1].mul(&b[j]).is_zero())
}

type Perm = Vec<usize>;

fn compose(a: &Perm, b: &Perm) -> Perm {
    // apply a, then b
    a.iter().map(|&i| b[i]).collect()
}

fn invert(a: &Perm) -> Perm {
    let mut r = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        r[x] = i;
    }
    r
}

fn permutations(k: usize) -> Vec<Perm> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Number of homomorphisms from the presented group to S_k, by brute force.
pub fn hom_count(p: &Presentation, k: usize) -> usize {
    let perms = permutations(k);
    let g = p.generators.len();
    let id: Perm = (0..k).collect();
    let mut count = 0;
    let mut idx = vec![0usize; g];
    loop {
        let images: Vec<&Perm> = idx.iter().map(|&i| &perms[i]).collect();
        let ok = p.relators.iter().all(|r| {
            let mut acc = id.clone();
            for l in r {
                let x = if l.inv { invert(images[l.gen]) } else { images[l.gen].clone() };
                acc = compose(&acc, &x);
            }
            acc == id
        });
        count += usize::from(ok);
        let mut j = 0;
        loop {
            if j == g {
                return count;
            }
            idx[j] += 1;
            if idx[j] < perms.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

pub fn cusps_of(hd: &HandleDecomposition) -> Vec<handleforge::cusps::CuspSection> {
    handleforge::cusps::vertex_links(hd).unwrap()
}

/// Fill along slope documents and certify with the given budget.
pub fn fill_and_certify(
    name: &str,
    docs: &[handleforge::filling::SlopeDoc],
    budget: usize,
) -> (HandleDecomposition, HandleDecomposition, handleforge::filling::SphereReport) {
    use handleforge::filling::{certify_sphere, fill, instruction};
    let hd = decomposition(name);
    let cusps = cusps_of(&hd);
    let ins: Vec<_> = docs.iter().map(|d| instruction(&hd, &cusps, d).unwrap()).collect();
    let filled = fill(&hd, &cusps, &ins).unwrap();
    let report = certify_sphere(&filled, budget).unwrap();
    (hd, filled, report)
}

pub fn exponent_rows(gens: usize, words: &[Vec<Letter>]) -> IntMatrix {
    let rows: Vec<Vec<i64>> = words
        .iter()
        .map(|w| {
            let mut r = vec![0; gens];
            for l in w {
                r[l.gen] += l.exponent();
            }
            r
        })
        .collect();
    IntMatrix::from_rows(&rows)
}
