//! Dense integer matrices and Smith normal form.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Row-major dense integer matrix.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Matrix product; panics on shape mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        out.add_to(i, j, a.checked_mul(b).expect("integer overflow"));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "shape mismatch in product");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Append columns of `other` (same row count).
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    // row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) {
        if k == 0 {
            return;
        }
        for c in 0..self.cols {
            let v = self.get(src, c);
            if v != 0 {
                let w = self.get(dst, c).checked_add(k.checked_mul(v).expect("overflow"));
                self.set(dst, c, w.expect("overflow"));
            }
        }
    }

    // col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) {
        if k == 0 {
            return;
        }
        for r in 0..self.rows {
            let v = self.get(r, src);
            if v != 0 {
                let w = self.get(r, dst).checked_add(k.checked_mul(v).expect("overflow"));
                self.set(r, dst, w.expect("overflow"));
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = self.get(r, c);
            self.set(r, c, -v);
        }
    }

    pub fn rank(&self) -> usize {
        invariant_factors(self).len()
    }
}

/// Smith normal form `D = U · A · V` with unimodular `U`, `V`.
///
/// `diagonal` holds the nonzero invariant factors, positive and with
/// `d[i] | d[i+1]`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diagonal: Vec<i64>,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub d: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Basis of the integer kernel of `A`: the last columns of `V`.
    pub fn kernel_basis(&self) -> Vec<Vec<i64>> {
        (self.rank()..self.v.cols()).map(|c| self.v.column(c)).collect()
    }
}

/// Nonzero invariant factors of `A` without the transforms, which can
/// outgrow `i64` on dense input long before the factors do.
///
/// Panics if an intermediate entry overflows `i128`.
pub fn invariant_factors(a: &IntMatrix) -> Vec<i64> {
    let (m, n) = (a.rows(), a.cols());
    let mut d: Vec<Vec<i128>> = (0..m).map(|r| a.row(r).iter().map(|&x| x as i128).collect()).collect();
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        let Some((pr, pc)) = (t..m)
            .flat_map(|r| (t..n).map(move |c| (r, c)))
            .filter(|&(r, c)| d[r][c] != 0)
            .min_by_key(|&(r, c)| d[r][c].abs())
        else {
            break;
        };
        d.swap(t, pr);
        for row in d.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let p = d[t][t];
            let mut dirty = false;
            for r in t + 1..m {
                let q = d[r][t] / p;
                if q != 0 {
                    for c in t..n {
                        d[r][c] = d[r][c].checked_sub(q.checked_mul(d[t][c]).expect("overflow")).expect("overflow");
                    }
                }
                dirty |= d[r][t] != 0;
            }
            for c in t + 1..n {
                let q = d[t][c] / p;
                if q != 0 {
                    for row in d.iter_mut().skip(t) {
                        row[c] = row[c].checked_sub(q.checked_mul(row[t]).expect("overflow")).expect("overflow");
                    }
                }
                dirty |= d[t][c] != 0;
            }
            if !dirty {
                let bad = (t + 1..m).find(|&r| (t + 1..n).any(|c| d[r][c] % p != 0));
                match bad {
                    None => break,
                    Some(r) => {
                        for c in t..n {
                            d[t][c] += d[r][c];
                        }
                        continue;
                    }
                }
            }
            let (mut br, mut bc) = (t, t);
            for r in t..m {
                if d[r][t] != 0 && d[r][t].abs() < d[br][bc].abs() {
                    (br, bc) = (r, t);
                }
            }
            for c in t..n {
                if d[t][c] != 0 && d[t][c].abs() < d[br][bc].abs() {
                    (br, bc) = (t, c);
                }
            }
            d.swap(t, br);
            for row in d.iter_mut() {
                row.swap(t, bc);
            }
        }
        out.push(i64::try_from(d[t][t].abs()).expect("invariant factor exceeds i64"));
        t += 1;
    }
    out
}

/// Smith normal form by pivoting on the smallest nonzero absolute value.
pub fn smith(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    // Each elementary op is mirrored on the transforms and their inverses.
    macro_rules! row_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            d.add_row($dst, $src, $k);
            u.add_row($dst, $src, $k);
            u_inv.add_col($src, $dst, -$k);
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            d.add_col($dst, $src, $k);
            v.add_col($dst, $src, $k);
            v_inv.add_row($src, $dst, -$k);
        }};
    }
    macro_rules! row_swap {
        ($a:expr, $b:expr) => {{
            d.swap_rows($a, $b);
            u.swap_rows($a, $b);
            u_inv.swap_cols($a, $b);
        }};
    }
    macro_rules! col_swap {
        ($a:expr, $b:expr) => {{
            d.swap_cols($a, $b);
            v.swap_cols($a, $b);
            v_inv.swap_rows($a, $b);
        }};
    }

    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for r in t..m {
            for c in t..n {
                let x = d.get(r, c).abs();
                if x != 0 && best.is_none_or(|(br, bc)| x < d.get(br, bc).abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        row_swap!(t, pr);
        col_swap!(t, pc);

        loop {
            let p = d.get(t, t);
            let mut dirty = false;
            for r in t + 1..m {
                let q = d.get(r, t) / p;
                if q != 0 {
                    row_add!(r, t, -q);
                }
                if d.get(r, t) != 0 {
                    dirty = true;
                }
            }
            for c in t + 1..n {
                let q = d.get(t, c) / p;
                if q != 0 {
                    col_add!(c, t, -q);
                }
                if d.get(t, c) != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // enforce divisibility against the rest of the block
                let bad = (t + 1..m)
                    .flat_map(|r| (t + 1..n).map(move |c| (r, c)))
                    .find(|&(r, c)| d.get(r, c) % p != 0);
                match bad {
                    None => break,
                    Some((r, _)) => {
                        row_add!(t, r, 1);
                        continue;
                    }
                }
            }
            // move the new smallest entry of row/col t into the pivot
            let mut best = (t, t);
            for r in t..m {
                let x = d.get(r, t).abs();
                if x != 0 && x < d.get(best.0, best.1).abs() {
                    best = (r, t);
                }
            }
            for c in t..n {
                let x = d.get(t, c).abs();
                if x != 0 && x < d.get(best.0, best.1).abs() {
                    best = (t, c);
                }
            }
            row_swap!(t, best.0);
            col_swap!(t, best.1);
        }
        if d.get(t, t) < 0 {
            d.negate_row(t);
            u.negate_row(t);
            for r in 0..m {
                let x = u_inv.get(r, t);
                u_inv.set(r, t, -x);
            }
        }
        t += 1;
    }
    let diagonal = (0..t).map(|i| d.get(i, i)).collect();
    Smith { diagonal, u, u_inv, v, v_inv, d }
}

/// Homology of a segment `C_{j+1} --dout--> C_j --din--> C_{j-1}` at degree j.
#[derive(Debug, Clone)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<i64>,
    /// Cycle representatives of a basis of the free part.
    pub free_reps: Vec<Vec<i64>>,
    cycle_basis: Vec<Vec<i64>>,
    // rows project coordinates in the cycle basis onto the free part
    free_projection: IntMatrix,
}

impl HomologyGroup {
    /// `din`: C_j → C_{j-1} (rows may be zero); `dout`: C_{j+1} → C_j.
    pub fn compute(rank: usize, din: &IntMatrix, dout: &IntMatrix) -> HomologyGroup {
        assert!(din.cols() == rank && dout.rows() == rank);
        let cycle_basis = if din.rows() == 0 {
            (0..rank)
                .map(|i| {
                    let mut e = vec![0; rank];
                    e[i] = 1;
                    e
                })
                .collect()
        } else {
            smith(din).kernel_basis()
        };
        let z = cycle_basis.len();
        let zmat = IntMatrix::from_columns(rank, &cycle_basis);
        // boundaries expressed in cycle coordinates
        let coords: Vec<Vec<i64>> = (0..dout.cols())
            .map(|c| solve_in_basis(&zmat, &dout.column(c)).expect("boundary is not a cycle"))
            .collect();
        let y = IntMatrix::from_columns(z, &coords);
        let s = smith(&y);
        let torsion: Vec<i64> = s.diagonal.iter().copied().filter(|&x| x > 1).collect();
        let r = s.rank();
        let free_reps = (r..z)
            .map(|i| zmat.mul_vec(&s.u_inv.column(i)))
            .collect::<Vec<_>>();
        let mut free_projection = IntMatrix::zeros(z - r, z);
        for i in r..z {
            for c in 0..z {
                free_projection.set(i - r, c, s.u.get(i, c));
            }
        }
        HomologyGroup { betti: z - r, torsion, free_reps, cycle_basis, free_projection }
    }

    /// Free-part coordinates of a cycle, or `None` if it is not a cycle.
    pub fn free_coordinates(&self, cycle: &[i64]) -> Option<Vec<i64>> {
        let zmat = IntMatrix::from_columns(cycle.len(), &self.cycle_basis);
        let c = solve_in_basis(&zmat, cycle)?;
        Some(self.free_projection.mul_vec(&c))
    }
}

/// Solve `B x = v` exactly for a matrix with independent columns.
pub fn solve_in_basis(b: &IntMatrix, v: &[i64]) -> Option<Vec<i64>> {
    let s = smith(b);
    let w = s.u.mul_vec(v);
    let r = s.rank();
    if w[r..].iter().any(|&x| x != 0) {
        return None;
    }
    let mut y = vec![0; b.cols()];
    for i in 0..r {
        if w[i] % s.diagonal[i] != 0 {
            return None;
        }
        y[i] = w[i] / s.diagonal[i];
    }
    if r < b.cols() && y[r..].iter().any(|&x| x != 0) {
        return None;
    }
    Some(s.v.mul_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_of_klein_relation() {
        let a = IntMatrix::from_rows(&[vec![0], vec![2]]);
        let s = smith(&a);
        assert_eq!(s.diagonal, vec![2]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn divisibility_is_enforced() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(smith(&a).diagonal, vec![1, 6]);
    }

    #[test]
    fn inverses_are_inverses() {
        let a = IntMatrix::from_rows(&[vec![4, 6, 2], vec![1, -3, 5], vec![0, 7, 7]]);
        let s = smith(&a);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(3));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(3));
    }

    #[test]
    fn homology_of_circle_segment() {
        // C1 = Z, C0 = Z, zero maps
        let h = HomologyGroup::compute(1, &IntMatrix::zeros(1, 1), &IntMatrix::zeros(1, 0));
        assert_eq!(h.betti, 1);
        assert_eq!(h.free_coordinates(&[3]), Some(vec![3]));
    }
}
