//! Dense matrices over `F_p` with exact rank / kernel / solve.
//!
//! Everything is plain Gaussian elimination. Dimensions in scope top out at
//! 248 (the E8 adjoint), where an O(n^3) reduction is instantaneous; no
//! attempt is made at anything cleverer.

use super::fp;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixFp {
    rows: usize,
    cols: usize,
    p: u64,
    data: Vec<u64>,
}

impl MatrixFp {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        MatrixFp {
            rows,
            cols,
            p,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row slices of canonical residues.
    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            for &v in row {
                assert!(v < p);
                data.push(v);
            }
        }
        MatrixFp {
            rows: r,
            cols: c,
            p,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(v < self.p);
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> MatrixFp {
        let mut out = MatrixFp::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn mul(&self, other: &MatrixFp) -> MatrixFp {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut out = MatrixFp::zeros(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow.iter()) {
                    if b != 0 {
                        *d = fp::add(p, *d, fp::mul(p, a, b));
                    }
                }
            }
        }
        out
    }

    /// `self^k` for a square matrix; `k = 0` gives the identity.
    pub fn pow(&self, mut k: u64) -> MatrixFp {
        assert_eq!(self.rows, self.cols, "pow needs a square matrix");
        let mut acc = MatrixFp::identity(self.p, self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let p = self.p;
        (0..self.rows)
            .map(|r| {
                let mut acc = 0;
                for (c, &x) in v.iter().enumerate() {
                    if x != 0 {
                        acc = fp::add(p, acc, fp::mul(p, self.get(r, c), x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &MatrixFp) -> MatrixFp {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (d, &s) in out.data.iter_mut().zip(other.data.iter()) {
            *d = fp::add(self.p, *d, s);
        }
        out
    }

    pub fn scale(&self, c: u64) -> MatrixFp {
        let mut out = self.clone();
        for d in out.data.iter_mut() {
            *d = fp::mul(self.p, *d, c);
        }
        out
    }

    /// Row-reduced echelon form. Returns `(rref, pivot_columns)`; the rank
    /// is `pivot_columns.len()`. Reduction is fully deterministic (first
    /// nonzero row is the pivot), so all downstream bases are canonical.
    pub fn rref(&self) -> (MatrixFp, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut pivot_row = None;
            for rr in r..m.rows {
                if m.get(rr, c) != 0 {
                    pivot_row = Some(rr);
                    break;
                }
            }
            let Some(pr) = pivot_row else { continue };
            if pr != r {
                for cc in 0..m.cols {
                    let a = m.get(r, cc);
                    let b = m.get(pr, cc);
                    m.set(r, cc, b);
                    m.set(pr, cc, a);
                }
            }
            let inv = fp::inv(p, m.get(r, c));
            for cc in 0..m.cols {
                let v = fp::mul(p, m.get(r, cc), inv);
                m.set(r, cc, v);
            }
            for rr in 0..m.rows {
                if rr != r && m.get(rr, c) != 0 {
                    let f = m.get(rr, c);
                    for cc in 0..m.cols {
                        let v = fp::sub(p, m.get(rr, cc), fp::mul(p, f, m.get(r, cc)));
                        m.set(rr, cc, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical kernel basis: one vector per free column, with that free
    /// coordinate set to 1 and the remaining free coordinates 0.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let (rr, pivots) = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = Some(i);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![0u64; self.cols];
            vec[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                vec[pc] = fp::neg(p, rr.get(i, free));
            }
            basis.push(vec);
        }
        basis
    }

    /// Solves `self * x = b`. Returns the particular solution with all free
    /// coordinates equal to zero, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let p = self.p;
        let mut aug = MatrixFp::zeros(p, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let (rr, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // a pivot in the augmented column: inconsistent
        }
        let mut x = vec![0u64; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = rr.get(i, self.cols);
        }
        Some(x)
    }
}

/// Reduces a list of vectors to a canonical basis of their span.
pub fn span_basis(p: u64, vectors: &[Vec<u64>]) -> Vec<Vec<u64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = MatrixFp::from_rows(p, vectors);
    let (rr, pivots) = m.rref();
    (0..pivots.len()).map(|i| rr.row(i).to_vec()).collect()
}

/// Dimension of the span of `vectors`.
pub fn span_dim(p: u64, vectors: &[Vec<u64>]) -> usize {
    span_basis(p, vectors).len()
}

/// Is `v` contained in the span of `basis`?
pub fn in_span(p: u64, basis: &[Vec<u64>], v: &[u64]) -> bool {
    let mut all = basis.to_vec();
    let before = span_dim(p, &all);
    all.push(v.to_vec());
    span_dim(p, &all) == before
}

/// Basis of the intersection of two subspaces given by spanning sets.
pub fn intersect_subspaces(p: u64, dim: usize, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Solve sum(lam_i a_i) - sum(mu_j b_j) = 0; the a-part of each kernel
    // vector spans the intersection.
    let mut m = MatrixFp::zeros(p, dim, a.len() + b.len());
    for (i, v) in a.iter().enumerate() {
        for (r, &x) in v.iter().enumerate() {
            m.set(r, i, x);
        }
    }
    for (j, v) in b.iter().enumerate() {
        for (r, &x) in v.iter().enumerate() {
            m.set(r, a.len() + j, fp::neg(p, x));
        }
    }
    let mut vecs = Vec::new();
    for k in m.kernel() {
        let mut w = vec![0u64; dim];
        for (i, v) in a.iter().enumerate() {
            if k[i] != 0 {
                for (r, &x) in v.iter().enumerate() {
                    w[r] = fp::add(p, w[r], fp::mul(p, k[i], x));
                }
            }
        }
        if w.iter().any(|&x| x != 0) {
            vecs.push(w);
        }
    }
    span_basis(p, &vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_kernel_and_rank() {
        let m = MatrixFp::identity(5, 4);
        assert_eq!(m.rank(), 4);
        assert!(m.kernel().is_empty());
    }

    #[test]
    fn kernel_and_solve() {
        // x + 2y + 3z = 0 over F_5 has a 2-dimensional kernel.
        let m = MatrixFp::from_rows(5, &[vec![1, 2, 3]]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(m.apply(v), vec![0]);
        }
        let sol = m.solve(&[4]).unwrap();
        assert_eq!(m.apply(&sol), vec![4]);
    }

    #[test]
    fn inconsistent_solve_is_none() {
        let m = MatrixFp::from_rows(3, &[vec![1, 1], vec![2, 2]]);
        assert_eq!(m.solve(&[1, 1]), None);
        assert!(m.solve(&[1, 2]).is_some());
    }

    #[test]
    fn pow_zero_is_identity() {
        let m = MatrixFp::from_rows(7, &[vec![2, 1], vec![0, 3]]);
        assert_eq!(m.pow(0), MatrixFp::identity(7, 2));
        assert_eq!(m.pow(3), m.mul(&m).mul(&m));
    }

    #[test]
    fn subspace_intersection() {
        let p = 7;
        let a = vec![vec![1, 0, 0], vec![0, 1, 0]];
        let b = vec![vec![0, 1, 0], vec![0, 0, 1]];
        let i = intersect_subspaces(p, 3, &a, &b);
        assert_eq!(i.len(), 1);
        assert!(in_span(p, &[vec![0, 1, 0]], &i[0]));
    }
}
