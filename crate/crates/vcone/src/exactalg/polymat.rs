//! Matrices with polynomial entries, rank certificates and the linear
//! constraint solver used by the verification pipeline.
//!
//! A `RankCertificate` for `M` is a choice of rows `r_1..r_R` and columns
//! `c_1..c_R` such that the submatrix `S[i][j] = M[r_i][c_j]` is upper
//! triangular with every diagonal entry a nonzero constant. Every
//! evaluation of `M` then has rank at least `R`, no matter what the
//! variables are; "rank of a polynomial matrix" itself is never computed.

use super::fp;
use super::matrix::MatrixFp;
use super::poly::PolyFp;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Sparse row-major matrix over `F_p[x_0..]`.
#[derive(Clone, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    p: u64,
    data: Vec<Vec<(usize, PolyFp)>>, // per row, sorted by column, nonzero
}

impl PolyMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            p,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn from_scalar(m: &MatrixFp) -> Self {
        let p = m.modulus();
        let mut out = Self::zeros(p, m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m.get(r, c);
                if v != 0 {
                    out.data[r].push((c, PolyFp::constant(p, v)));
                }
            }
        }
        out
    }

    pub fn identity(p: u64, n: usize) -> Self {
        Self::from_scalar(&MatrixFp::identity(p, n))
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

    pub fn row(&self, r: usize) -> &[(usize, PolyFp)] {
        &self.data[r]
    }

    pub fn set(&mut self, r: usize, c: usize, v: PolyFp) {
        let row = &mut self.data[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(i) => {
                if v.is_zero() {
                    row.remove(i);
                } else {
                    row[i].1 = v;
                }
            }
            Err(i) => {
                if !v.is_zero() {
                    row.insert(i, (c, v));
                }
            }
        }
    }

    pub fn get(&self, r: usize, c: usize) -> PolyFp {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => PolyFp::zero(self.p),
        }
    }

    pub fn is_entry_zero(&self, r: usize, c: usize) -> bool {
        self.data[r].binary_search_by_key(&c, |e| e.0).is_err()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        assert_eq!(self.p, other.p);
        let mut out = PolyMatrix::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc: BTreeMap<usize, PolyFp> = BTreeMap::new();
            for (j, a) in &self.data[i] {
                for (k, b) in &other.data[*j] {
                    let prod = a.mul(b);
                    if prod.is_zero() {
                        continue;
                    }
                    match acc.get_mut(k) {
                        Some(e) => *e = e.add(&prod),
                        None => {
                            acc.insert(*k, prod);
                        }
                    }
                }
            }
            out.data[i] = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        out
    }

    /// Exact `k`-th power of a square polynomial matrix; `k = 0` is the
    /// identity.
    pub fn pow(&self, k: u32) -> PolyMatrix {
        assert_eq!(self.rows, self.cols, "pow needs a square matrix");
        let mut acc = PolyMatrix::identity(self.p, self.rows);
        let mut base = self.clone();
        let mut k = k;
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

    pub fn eval(&self, point: &[u64]) -> MatrixFp {
        let mut out = MatrixFp::zeros(self.p, self.rows, self.cols);
        for r in 0..self.rows {
            for (c, v) in &self.data[r] {
                out.set(r, *c, v.eval(point));
            }
        }
        out
    }

    pub fn substitute_map(&self, map: &BTreeMap<usize, PolyFp>) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.p, self.rows, self.cols);
        for r in 0..self.rows {
            for (c, v) in &self.data[r] {
                let nv = v.substitute_map(map);
                if !nv.is_zero() {
                    out.data[r].push((*c, nv));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for (c, v) in &self.data[r] {
                out.data[*c].push((r, v.clone()));
            }
        }
        for row in out.data.iter_mut() {
            row.sort_by_key(|e| e.0);
        }
        out
    }

    /// Indices of columns that are identically zero.
    pub fn zero_columns(&self) -> Vec<usize> {
        let mut nonzero = vec![false; self.cols];
        for row in &self.data {
            for (c, _) in row {
                nonzero[*c] = true;
            }
        }
        (0..self.cols).filter(|&c| !nonzero[c]).collect()
    }
}

/// Witness that every evaluation of a polynomial matrix has rank >= R.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// The (constant, nonzero) diagonal entries `M[rows[i]][cols[i]]`.
    pub diag: Vec<u64>,
}

impl RankCertificate {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Re-checks the defining property against `m`; never trusts the
    /// stored data.
    pub fn validate(&self, m: &PolyMatrix) -> Result<(), String> {
        let r = self.rows.len();
        if self.cols.len() != r || self.diag.len() != r {
            return Err("certificate shape mismatch".into());
        }
        for i in 0..r {
            let entry = m.get(self.rows[i], self.cols[i]);
            match entry.as_constant() {
                Some(c) if c != 0 && c == self.diag[i] => {}
                _ => {
                    return Err(format!(
                        "diagonal entry ({},{}) is not the recorded nonzero constant",
                        self.rows[i], self.cols[i]
                    ));
                }
            }
            for j in 0..i {
                if !m.is_entry_zero(self.rows[i], self.cols[j]) {
                    return Err(format!(
                        "entry ({},{}) below the diagonal is not identically zero",
                        self.rows[i], self.cols[j]
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Searches for a rank certificate of size `r`.
///
/// Greedy strategy: a pivot candidate is an entry that is a nonzero
/// constant polynomial. Pivots are chosen one at a time; the i-th chosen
/// row must be identically zero at all previously chosen columns, which
/// directly builds the upper triangular shape. Among valid candidates we
/// prefer columns that are zero on many remaining candidate rows (keeping
/// options open), breaking ties towards rows with many nonzero entries so
/// sparse rows stay available for late picks. A bounded backtracking pass
/// rescues near misses. Returns `None` on failure; never a false witness.
pub fn find_rank_certificate(m: &PolyMatrix, r: usize) -> Option<RankCertificate> {
    if r == 0 {
        return Some(RankCertificate {
            rows: vec![],
            cols: vec![],
            diag: vec![],
        });
    }
    // Candidate pivots per row: (col, value).
    let mut cands: Vec<Vec<(usize, u64)>> = vec![Vec::new(); m.nrows()];
    for i in 0..m.nrows() {
        for (c, v) in m.row(i) {
            if let Some(k) = v.as_constant() {
                if k != 0 {
                    cands[i].push((*c, k));
                }
            }
        }
    }
    let row_nnz: Vec<usize> = (0..m.nrows()).map(|i| m.row(i).len()).collect();

    struct Search<'a> {
        m: &'a PolyMatrix,
        cands: &'a [Vec<(usize, u64)>],
        row_nnz: &'a [usize],
        target: usize,
        budget: usize,
    }

    impl Search<'_> {
        fn go(
            &mut self,
            chosen_rows: &mut Vec<usize>,
            chosen_cols: &mut Vec<usize>,
            diag: &mut Vec<u64>,
        ) -> bool {
            if chosen_rows.len() == self.target {
                return true;
            }
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            // Valid candidates: unused row, unused column, row vanishes at
            // all previously chosen columns.
            let mut options: Vec<(usize, usize, u64, i64)> = Vec::new();
            for row in 0..self.m.nrows() {
                if chosen_rows.contains(&row) {
                    continue;
                }
                if !chosen_cols
                    .iter()
                    .all(|&c| self.m.is_entry_zero(row, c))
                {
                    continue;
                }
                for &(col, val) in &self.cands[row] {
                    if chosen_cols.contains(&col) {
                        continue;
                    }
                    // Column score: how many other candidate rows are zero
                    // in this column (higher = less constraining later).
                    let mut score = 0i64;
                    for other in 0..self.m.nrows() {
                        if other != row && self.m.is_entry_zero(other, col) {
                            score += 1;
                        }
                    }
                    options.push((row, col, val, score * 1000 + self.row_nnz[row] as i64));
                }
            }
            options.sort_by_key(|&(row, col, _, sc)| (std::cmp::Reverse(sc), row, col));
            // Try the best few options at each node; full DFS is
            // unnecessary in practice.
            for &(row, col, val, _) in options.iter().take(6) {
                chosen_rows.push(row);
                chosen_cols.push(col);
                diag.push(val);
                if self.go(chosen_rows, chosen_cols, diag) {
                    return true;
                }
                chosen_rows.pop();
                chosen_cols.pop();
                diag.pop();
            }
            false
        }
    }

    let mut s = Search {
        m,
        cands: &cands,
        row_nnz: &row_nnz,
        target: r,
        budget: 200_000,
    };
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let mut diag = Vec::new();
    if s.go(&mut rows, &mut cols, &mut diag) {
        let cert = RankCertificate { rows, cols, diag };
        cert.validate(m).expect("search produced invalid certificate");
        Some(cert)
    } else {
        None
    }
}

/// Entries of every row of `m` that is identically zero at all certificate
/// columns. When the rank of every admissible evaluation is bounded by the
/// certificate size, each such row must evaluate to zero, so all its
/// entries are forced constraints.
pub fn vanishing_row_constraints(m: &PolyMatrix, cert: &RankCertificate) -> Vec<PolyFp> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        if cert.cols.iter().all(|&c| m.is_entry_zero(r, c)) {
            for (_, v) in m.row(r) {
                out.push(v.clone());
            }
        }
    }
    out
}

/// Outcome of eliminating a system of degree <= 1 constraints.
#[derive(Clone, Debug)]
pub enum LinearOutcome {
    /// Triangular substitution: each eliminated variable maps to an affine
    /// polynomial in the surviving variables.
    Consistent { assignments: BTreeMap<usize, PolyFp> },
    /// The system contains `0 = c` with `c != 0`.
    Inconsistent,
}

/// Gaussian elimination on affine constraints `f = 0` with `deg f <= 1`.
///
/// Returns the substitution that zeroes every input, eliminating as many
/// variables as the system determines. Panics if an input has total degree
/// above 1 (callers filter first).
pub fn linear_constraints(p: u64, eqs: &[PolyFp]) -> LinearOutcome {
    // Each row: (var -> coeff, constant), meaning sum(c_v x_v) + k = 0.
    let mut rows: Vec<(BTreeMap<usize, u64>, u64)> = Vec::new();
    for eq in eqs {
        let (coeffs, konst) = eq
            .as_linear()
            .expect("linear_constraints requires degree <= 1 inputs");
        if coeffs.is_empty() {
            if konst != 0 {
                return LinearOutcome::Inconsistent;
            }
            continue;
        }
        rows.push((coeffs.into_iter().collect(), konst));
    }

    let mut assignments: BTreeMap<usize, PolyFp> = BTreeMap::new();
    let mut reduced: Vec<(BTreeMap<usize, u64>, u64)> = Vec::new();
    for (mut coeffs, mut konst) in rows {
        // Reduce against already-pivoted rows.
        for (pc, prow, pk) in reduced.iter().map(|r| {
            let pc = *r.0.keys().next().unwrap();
            (pc, &r.0, r.1)
        }) {
            if let Some(&c) = coeffs.get(&pc) {
                if c != 0 {
                    for (&v, &pv) in prow.iter() {
                        let cur = coeffs.get(&v).copied().unwrap_or(0);
                        let nv = fp::sub(p, cur, fp::mul(p, c, pv));
                        if nv == 0 {
                            coeffs.remove(&v);
                        } else {
                            coeffs.insert(v, nv);
                        }
                    }
                    konst = fp::sub(p, konst, fp::mul(p, c, pk));
                }
            }
        }
        coeffs.retain(|_, c| *c != 0);
        if coeffs.is_empty() {
            if konst != 0 {
                return LinearOutcome::Inconsistent;
            }
            continue;
        }
        // Normalise so the smallest variable is the pivot with coeff 1.
        let pivot = *coeffs.keys().next().unwrap();
        let inv = fp::inv(p, coeffs[&pivot]);
        let mut norm: BTreeMap<usize, u64> = BTreeMap::new();
        for (&v, &c) in &coeffs {
            norm.insert(v, fp::mul(p, c, inv));
        }
        let nk = fp::mul(p, konst, inv);
        // Back-substitute into earlier rows to keep the system triangular.
        let mut new_reduced = Vec::new();
        for (rcoeffs, rk) in reduced {
            let mut rc = rcoeffs;
            let mut rkk = rk;
            if let Some(&c) = rc.get(&pivot) {
                for (&v, &pv) in &norm {
                    let cur = rc.get(&v).copied().unwrap_or(0);
                    let nv = fp::sub(p, cur, fp::mul(p, c, pv));
                    if nv == 0 {
                        rc.remove(&v);
                    } else {
                        rc.insert(v, nv);
                    }
                }
                rkk = fp::sub(p, rkk, fp::mul(p, c, nk));
            }
            new_reduced.push((rc, rkk));
        }
        reduced = new_reduced;
        reduced.push((norm, nk));
    }

    // pivot + sum(c_v x_v) + k = 0  =>  pivot = -k - sum(c_v x_v)
    for (coeffs, k) in &reduced {
        let mut it = coeffs.iter();
        let (&pivot, _) = it.next().unwrap();
        let mut expr = PolyFp::constant(p, fp::neg(p, *k));
        for (&v, &c) in it {
            expr = expr.add(&PolyFp::var(p, v).scale(fp::neg(p, c)));
        }
        assignments.insert(pivot, expr);
    }
    LinearOutcome::Consistent { assignments }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::Mono;

    fn var(p: u64, i: usize) -> PolyFp {
        PolyFp::var(p, i)
    }

    #[test]
    fn power_zero_is_identity() {
        let p = 5;
        let mut m = PolyMatrix::zeros(p, 3, 3);
        m.set(0, 1, var(p, 0));
        let id = m.pow(0);
        for i in 0..3 {
            assert_eq!(id.get(i, i).as_constant(), Some(1));
        }
    }

    #[test]
    fn eval_commutes_with_power() {
        let p = 7;
        let mut m = PolyMatrix::zeros(p, 3, 3);
        m.set(0, 1, var(p, 0));
        m.set(1, 2, var(p, 1).add(&PolyFp::constant(p, 2)));
        m.set(2, 0, var(p, 0).mul(&var(p, 1)));
        m.set(1, 1, PolyFp::constant(p, 3));
        let m3 = m.pow(3);
        for a in 0..7 {
            for b in 0..7 {
                let pt = vec![a, b];
                assert_eq!(m3.eval(&pt), m.eval(&pt).pow(3));
            }
        }
    }

    #[test]
    fn identity_certificate() {
        let p = 5;
        let m = PolyMatrix::identity(p, 4);
        let cert = find_rank_certificate(&m, 4).unwrap();
        assert_eq!(cert.size(), 4);
        cert.validate(&m).unwrap();
    }

    #[test]
    fn certificate_respects_triangularity() {
        let p = 3;
        // [[x, 1], [1, 0]]: must pick (0,1) and (1,0) in the right order.
        let mut m = PolyMatrix::zeros(p, 2, 2);
        m.set(0, 0, var(p, 0));
        m.set(0, 1, PolyFp::constant(p, 1));
        m.set(1, 0, PolyFp::constant(p, 1));
        let cert = find_rank_certificate(&m, 2).unwrap();
        cert.validate(&m).unwrap();
        for a in 0..3 {
            assert!(m.eval(&[a]).rank() >= 2);
        }
    }

    #[test]
    fn vanishing_rows_collects_constraints() {
        let p = 3;
        let mut m = PolyMatrix::zeros(p, 3, 3);
        m.set(0, 0, PolyFp::constant(p, 1));
        // row 1 is zero at column 0 => all its entries are constraints
        m.set(1, 1, var(p, 0));
        m.set(1, 2, var(p, 1).scale(2));
        // row 2 hits the certificate column => not a vanishing row
        m.set(2, 0, var(p, 1));
        let cert = RankCertificate {
            rows: vec![0],
            cols: vec![0],
            diag: vec![1],
        };
        cert.validate(&m).unwrap();
        let cons = vanishing_row_constraints(&m, &cert);
        assert_eq!(cons.len(), 2);
        assert!(cons.iter().any(|c| c.coeff(Mono::var(0)) == 1));
    }

    #[test]
    fn zero_matrix_has_no_vanishing_constraints() {
        let p = 3;
        let m = PolyMatrix::zeros(p, 2, 2);
        let cert = RankCertificate {
            rows: vec![],
            cols: vec![],
            diag: vec![],
        };
        assert!(vanishing_row_constraints(&m, &cert).is_empty());
    }

    #[test]
    fn linear_elimination() {
        let p = 5;
        // x0 = 0 alone
        match linear_constraints(p, &[var(p, 0)]) {
            LinearOutcome::Consistent { assignments } => {
                assert_eq!(assignments.len(), 1);
                assert!(assignments[&0].is_zero());
            }
            _ => panic!("expected consistent"),
        }
        // x0 + x1 = 0, x0 + 2 = 0 -> x0 = 3, x1 = 2
        let eqs = vec![
            var(p, 0).add(&var(p, 1)),
            var(p, 0).add(&PolyFp::constant(p, 2)),
        ];
        match linear_constraints(p, &eqs) {
            LinearOutcome::Consistent { assignments } => {
                assert_eq!(assignments[&0].as_constant(), Some(3));
                assert_eq!(assignments[&1].as_constant(), Some(2));
                for eq in &eqs {
                    assert!(eq.substitute_map(&assignments).is_zero());
                }
            }
            _ => panic!("expected consistent"),
        }
        // x0 = 1 and x0 = 2 is inconsistent
        let eqs = vec![
            var(p, 0).add(&PolyFp::constant(p, 4)),
            var(p, 0).add(&PolyFp::constant(p, 3)),
        ];
        assert!(matches!(
            linear_constraints(p, &eqs),
            LinearOutcome::Inconsistent
        ));
    }
}
