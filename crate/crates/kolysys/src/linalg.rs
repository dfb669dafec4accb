//! Exact linear algebra over `Z/m`: Howell normal form, kernels, and span
//! membership.
//!
//! Over `Z/m` a row echelon form is not enough to decide membership in a row
//! span: the span of `(4, 1)` over `Z/8` contains `(0, 2)`, which no greedy
//! reduction against `(4, 1)` alone will find. The Howell form repairs this
//! by adjoining, for every pivot `g`, the annihilator multiple `(m/g)` of its
//! row, so that every span element with leading zeros is spanned by later
//! rows. Membership and kernel computations then reduce to greedy
//! substitution.

use crate::modring::{gcd, unit_associate, xgcd};

/// A dense matrix over `Z/m`, entries reduced to `[0, m)`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixZm {
    m: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl MatrixZm {
    pub fn new(m: u64, rows: usize, cols: usize) -> Self {
        assert!(m >= 2, "matrix modulus must be at least 2");
        MatrixZm {
            m,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(m: u64, rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut mat = MatrixZm::new(m, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                mat.set(i, j, x);
            }
        }
        mat
    }

    pub fn identity(m: u64, n: usize) -> Self {
        let mut mat = MatrixZm::new(m, n, n);
        for i in 0..n {
            mat.set(i, i, 1);
        }
        mat
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.m;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Matrix-vector product `A * x`.
    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc: u128 = 0;
                for (j, &xj) in x.iter().enumerate() {
                    acc = (acc + self.get(i, j) as u128 * xj as u128) % self.m as u128;
                }
                acc as u64
            })
            .collect()
    }

    /// Product `A * B`.
    pub fn mul(&self, other: &MatrixZm) -> MatrixZm {
        assert_eq!(self.m, other.m);
        assert_eq!(self.cols, other.rows);
        let mut out = MatrixZm::new(self.m, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let mut acc: u128 = 0;
                for j in 0..self.cols {
                    acc = (acc + self.get(i, j) as u128 * other.get(j, k) as u128) % self.m as u128;
                }
                out.set(i, k, acc as u64);
            }
        }
        out
    }

    /// Determinant by cofactor expansion; everything here is desk scale.
    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return 1 % self.m;
        }
        if n == 1 {
            return self.get(0, 0);
        }
        let mut acc: i128 = 0;
        for j in 0..n {
            let a = self.get(0, j);
            if a == 0 {
                continue;
            }
            let minor = self.minor(0, j);
            let term = a as i128 * minor.det() as i128;
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
            acc = acc.rem_euclid(self.m as i128);
        }
        acc.rem_euclid(self.m as i128) as u64
    }

    fn minor(&self, row: usize, col: usize) -> MatrixZm {
        let mut out = MatrixZm::new(self.m, self.rows - 1, self.cols - 1);
        let mut r = 0;
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let mut c = 0;
            for j in 0..self.cols {
                if j == col {
                    continue;
                }
                out.set(r, c, self.get(i, j));
                c += 1;
            }
            r += 1;
        }
        out
    }
}

/// Result of [`howell_form`]: `h = u * a_padded`, where `a_padded` is the
/// input with zero rows appended (the Howell form of a span can need more
/// rows than the matrix that generated it), and `u` is invertible over
/// `Z/m`.
#[derive(Debug, Clone)]
pub struct Howell {
    pub h: MatrixZm,
    pub u: MatrixZm,
    /// `(row, col, pivot)` triples in row order; each pivot divides `m`.
    pub pivots: Vec<(usize, usize, u64)>,
}

/// Workspace for the Howell reduction; `trans` optionally accumulates the
/// invertible row transform.
struct Reducer {
    h: MatrixZm,
    trans: Option<MatrixZm>,
}

impl Reducer {
    fn new(a: &MatrixZm, track: bool) -> Self {
        let cols = a.cols;
        // Room for the input rows, one annihilator row per pivot in every
        // sweep, and slack so a free zero row always exists.
        let n = a.rows + 2 * cols + 1;
        let mut h = MatrixZm::new(a.m, n, cols);
        for i in 0..a.rows {
            for j in 0..cols {
                h.set(i, j, a.get(i, j));
            }
        }
        let trans = track.then(|| MatrixZm::identity(a.m, n));
        Reducer { h, trans }
    }

    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let swap_in = |mat: &mut MatrixZm| {
            for c in 0..mat.cols {
                let (a, b) = (mat.get(i, c), mat.get(j, c));
                mat.set(i, c, b);
                mat.set(j, c, a);
            }
        };
        swap_in(&mut self.h);
        if let Some(u) = &mut self.trans {
            swap_in(u);
        }
    }

    /// Applies the 2x2 unimodular [[s, t], [p, q]] to rows (r0, r1).
    fn transform(&mut self, r0: usize, r1: usize, s: i128, t: i128, p: i128, q: i128) {
        let m = self.h.m as i128;
        let apply = |mat: &mut MatrixZm| {
            for c in 0..mat.cols {
                let a = mat.get(r0, c) as i128;
                let b = mat.get(r1, c) as i128;
                mat.set(r0, c, (s * a + t * b).rem_euclid(m) as u64);
                mat.set(r1, c, (p * a + q * b).rem_euclid(m) as u64);
            }
        };
        apply(&mut self.h);
        if let Some(u) = &mut self.trans {
            apply(u);
        }
    }

    fn scale(&mut self, r: usize, w: u64) {
        let m = self.h.m as u128;
        let apply = |mat: &mut MatrixZm| {
            for c in 0..mat.cols {
                mat.set(r, c, (mat.get(r, c) as u128 * w as u128 % m) as u64);
            }
        };
        apply(&mut self.h);
        if let Some(u) = &mut self.trans {
            apply(u);
        }
    }

    /// `row[dst] -= q * row[src]`.
    fn sub_scaled(&mut self, dst: usize, src: usize, q: u64) {
        let m = self.h.m as u128;
        let apply = |mat: &mut MatrixZm| {
            for c in 0..mat.cols {
                let sub = q as u128 * mat.get(src, c) as u128 % m;
                let v = (mat.get(dst, c) as u128 + m - sub) % m;
                mat.set(dst, c, v as u64);
            }
        };
        apply(&mut self.h);
        if let Some(u) = &mut self.trans {
            apply(u);
        }
    }

    /// Writes `scale * row[src]` into a free zero row. Adding into a zero
    /// row is an invertible elementary operation.
    fn adjoin_multiple(&mut self, src: usize, scale: u64) {
        let n = self.h.rows;
        let free = (0..n)
            .find(|&i| self.h.row(i).iter().all(|&x| x == 0))
            .expect("howell workspace exhausted");
        let m = self.h.m as u128;
        for c in 0..self.h.cols {
            let v = (self.h.get(src, c) as u128 * scale as u128 % m) as u64;
            self.h.set(free, c, v);
        }
        if let Some(u) = &mut self.trans {
            for c in 0..u.cols {
                let v = (u.get(free, c) as u128 + u.get(src, c) as u128 * scale as u128) % m;
                u.set(free, c, v as u64);
            }
        }
    }

    /// Echelonizes with canonical pivots (each divides `m`) and entries
    /// above pivots reduced; returns the pivot list.
    fn echelonize(&mut self) -> Vec<(usize, usize, u64)> {
        let m = self.h.m;
        let n = self.h.rows;
        let cols = self.h.cols;
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..cols {
            if pivot_row >= n {
                break;
            }
            let Some(first) = (pivot_row..n).find(|&i| self.h.get(i, col) != 0) else {
                continue;
            };
            self.swap(pivot_row, first);
            for i in pivot_row + 1..n {
                if self.h.get(i, col) == 0 {
                    continue;
                }
                let a = self.h.get(pivot_row, col) as i128;
                let b = self.h.get(i, col) as i128;
                let (g, s, t) = xgcd(a, b);
                self.transform(pivot_row, i, s, t, -(b / g), a / g);
            }
            let a = self.h.get(pivot_row, col);
            debug_assert!(a != 0);
            self.scale(pivot_row, unit_associate(a, m));
            let g = self.h.get(pivot_row, col);
            debug_assert_eq!(g, gcd(a, m));
            for k in 0..pivot_row {
                let q = self.h.get(k, col) / g;
                if q != 0 {
                    self.sub_scaled(k, pivot_row, q);
                }
            }
            pivots.push((pivot_row, col, g));
            pivot_row += 1;
        }
        pivots
    }

    /// Full Howell reduction: echelonize, then adjoin annihilator rows
    /// until every `(m/g) * row` reduces to zero against the later rows.
    fn howellize(&mut self) -> Vec<(usize, usize, u64)> {
        let m = self.h.m;
        let mut pivots = self.echelonize();
        loop {
            let mut appended = false;
            for &(row, _col, g) in &pivots.clone() {
                if g == 1 {
                    continue;
                }
                let ann = m / g;
                let mut cand: Vec<u64> = self
                    .h
                    .row(row)
                    .iter()
                    .map(|&x| (x as u128 * ann as u128 % m as u128) as u64)
                    .collect();
                reduce_against(&mut cand, &self.h, &pivots);
                if cand.iter().any(|&x| x != 0) {
                    self.adjoin_multiple(row, ann);
                    appended = true;
                }
            }
            if !appended {
                return pivots;
            }
            pivots = self.echelonize();
        }
    }
}

/// Greedy reduction of `cand` against the pivot rows; leaves the remainder.
fn reduce_against(cand: &mut [u64], h: &MatrixZm, pivots: &[(usize, usize, u64)]) {
    let m = h.m;
    for &(row, col, g) in pivots {
        let q = cand[col] / g;
        if q != 0 {
            for (j, c) in cand.iter_mut().enumerate() {
                let sub = q as u128 * h.get(row, j) as u128 % m as u128;
                *c = ((*c as u128 + m as u128 - sub) % m as u128) as u64;
            }
        }
    }
}

/// Howell normal form over `Z/m`.
///
/// The row span of `h` equals the row span of `a`, entries above each pivot
/// are reduced modulo the pivot, pivots divide `m`, and the Howell property
/// holds: every span vector with zeros before column `j` is a combination of
/// the rows with pivots in columns `>= j`.
pub fn howell_form(a: &MatrixZm) -> Howell {
    let mut red = Reducer::new(a, true);
    let pivots = red.howellize();
    Howell {
        h: red.h,
        u: red.trans.expect("transform tracked"),
        pivots,
    }
}

/// A generating set for `{x : A x = 0}` over `Z/m`.
///
/// Every returned vector is in the kernel and every kernel vector is a
/// `Z/m`-combination of the returned ones. The set need not be minimal.
pub fn kernel_generators(a: &MatrixZm) -> Vec<Vec<u64>> {
    let m = a.m;
    let r = a.rows;
    let c = a.cols;
    if r == 0 {
        // No constraints: the standard basis generates everything.
        return (0..c)
            .map(|i| {
                let mut e = vec![0; c];
                e[i] = 1;
                e
            })
            .collect();
    }
    // Rows of [A^T | I]: combinations (x^T A^T | x^T) = ((A x)^T | x^T), so
    // span vectors with zero left block correspond exactly to kernel
    // vectors; the Howell property over the left columns makes the rows
    // with zero left block a complete generating set.
    let mut aug = MatrixZm::new(m, c, r + c);
    for i in 0..c {
        for j in 0..r {
            aug.set(i, j, a.get(j, i));
        }
        aug.set(i, r + i, 1);
    }
    let mut red = Reducer::new(&aug, false);
    let pivots = red.howellize();
    pivots
        .iter()
        .filter(|&&(_, col, _)| col >= r)
        .map(|&(row, _, _)| red.h.row(row)[r..].to_vec())
        .collect()
}

/// Coefficients `c` with `sum c_i * gens[i] = target` over `Z/m`, or `None`
/// if no combination exists. Complete as well as sound: greedy substitution
/// against a Howell form decides membership exactly.
pub fn in_span(m: u64, gens: &[Vec<u64>], target: &[u64]) -> Option<Vec<u64>> {
    SpanSolver::new(m, gens, target.len()).solve(target)
}

/// A prepared span-membership solver: one Howell reduction of `[G | I]`
/// answers any number of targets.
pub struct SpanSolver {
    m: u64,
    k: usize,
    len: usize,
    h: Option<MatrixZm>,
    pivots: Vec<(usize, usize, u64)>,
}

impl SpanSolver {
    pub fn new(m: u64, gens: &[Vec<u64>], len: usize) -> Self {
        let k = gens.len();
        if k == 0 {
            return SpanSolver {
                m,
                k,
                len,
                h: None,
                pivots: Vec::new(),
            };
        }
        for g in gens {
            assert_eq!(g.len(), len, "generator length mismatch");
        }
        // Howellize [G | I]; each reduced row is (R_i . G | R_i), so
        // solving the left blocks for a target and pushing through the
        // right blocks gives coefficients on the original generators.
        let mut aug = MatrixZm::new(m, k, len + k);
        for (i, gen) in gens.iter().enumerate() {
            for (j, &x) in gen.iter().enumerate() {
                aug.set(i, j, x);
            }
            aug.set(i, len + i, 1);
        }
        let mut red = Reducer::new(&aug, false);
        let pivots = red.howellize();
        SpanSolver {
            m,
            k,
            len,
            h: Some(red.h),
            pivots,
        }
    }

    pub fn solve(&self, target: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(target.len(), self.len, "target length mismatch");
        let m = self.m;
        let Some(h) = &self.h else {
            return if target.iter().all(|&x| x % m == 0) {
                Some(Vec::new())
            } else {
                None
            };
        };
        let mut rem: Vec<u64> = target.iter().map(|&x| x % m).collect();
        let mut coeffs = vec![0u64; self.k];
        for &(row, col, g) in &self.pivots {
            if col >= self.len {
                break;
            }
            if !rem[col].is_multiple_of(g) {
                return None;
            }
            let y = rem[col] / g;
            if y == 0 {
                continue;
            }
            for (j, r) in rem.iter_mut().enumerate() {
                let sub = y as u128 * h.get(row, j) as u128 % m as u128;
                *r = ((*r as u128 + m as u128 - sub) % m as u128) as u64;
            }
            for (j, c) in coeffs.iter_mut().enumerate() {
                let add = y as u128 * h.get(row, self.len + j) as u128 % m as u128;
                *c = ((*c as u128 + add) % m as u128) as u64;
            }
        }
        if rem.iter().any(|&x| x != 0) {
            return None;
        }
        Some(coeffs)
    }
}

/// Howell-reduces a list of vectors to a (usually much smaller) list with
/// the same span.
pub fn reduce_span(m: u64, vectors: &[Vec<u64>]) -> Vec<Vec<u64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mat = MatrixZm::from_rows(m, vectors);
    let mut red = Reducer::new(&mat, false);
    let pivots = red.howellize();
    pivots
        .iter()
        .map(|&(row, _, _)| red.h.row(row).to_vec())
        .collect()
}

/// Recombines `coeffs` against `gens`: `sum c_i * gens[i] mod m`.
pub fn combine(m: u64, gens: &[Vec<u64>], coeffs: &[u64]) -> Vec<u64> {
    assert_eq!(gens.len(), coeffs.len());
    let len = gens.first().map_or(0, Vec::len);
    let mut acc = vec![0u64; len];
    for (c, g) in coeffs.iter().zip(gens) {
        for (dst, &x) in acc.iter_mut().zip(g) {
            *dst = ((*dst as u128 + *c as u128 * x as u128) % m as u128) as u64;
        }
    }
    acc
}
