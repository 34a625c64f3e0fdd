//! Chevalley-basis Lie algebra over `F_p` with exact integer structure
//! constants.
//!
//! The basis order is: `e_alpha` for the positive roots in the documented
//! total order (height, then lexicographic on coefficient vectors), then
//! `e_{-alpha}` in the same order, then `h_1..h_rank`.
//!
//! Structure constants are computed over the integers by the extraspecial
//! pair method and reduced mod p only at the point of use: for each
//! non-simple positive root `gamma` the pair `(alpha, beta)` with
//! `alpha + beta = gamma` and `alpha` minimal gets `N = +(q+1)`, and every
//! other constant follows from the Jacobi identity and the length
//! relations. The resulting table satisfies `N_{a,b} = +-(q+1)`,
//! `[e_a, e_{-a}] = h_a` and the integral Jacobi identity; all three are
//! (re)checked by tests rather than trusted.

use crate::exactalg::{fp, MatrixFp, PolyFp};
use crate::rootsys::{RootSystem, SimpleType};
use crate::Error;
use std::collections::{BTreeMap, HashMap};

/// An element of the algebra: a coefficient vector over `F_p` in basis
/// order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieElement {
    pub coeffs: Vec<u64>,
}

impl LieElement {
    pub fn zero(dim: usize) -> Self {
        LieElement {
            coeffs: vec![0; dim],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i] != 0)
            .collect()
    }
}

/// Grading of the algebra induced by integer weights on the simple roots:
/// `e_alpha` sits in degree `sum(weights * coeffs(alpha))`, the Cartan in
/// degree 0.
#[derive(Clone, Debug)]
pub struct GradedDecomposition {
    /// Degree of each basis vector.
    pub degrees: Vec<i64>,
    /// Basis indices per degree.
    pub blocks: BTreeMap<i64, Vec<usize>>,
}

impl GradedDecomposition {
    pub fn block(&self, degree: i64) -> &[usize] {
        self.blocks.get(&degree).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// Divided-power operators `ad(e_beta)^k / k!` reduced mod p, in order of
/// increasing `k` starting at `k = 0` (the identity). The list is finite
/// because `ad` of a root vector is nilpotent over the integers.
pub struct RootGroupOps {
    pub powers: Vec<MatrixFp>,
}

pub struct ChevalleyAlgebra {
    pub rs: RootSystem,
    pub p: u64,
    dim: usize,
    num_pos: usize,
    /// All 2N root coefficient vectors: positives `0..N` in basis order,
    /// then their negatives `N..2N`.
    roots: Vec<Vec<i64>>,
    root_idx: HashMap<Vec<i64>, usize>,
    /// Integer bracket table: `table[a][b]` lists `(basis index, coeff)`
    /// for the bracket of basis vectors `a` and `b`, over Z.
    table: Vec<Vec<(u32, i64)>>,
}

impl ChevalleyAlgebra {
    pub fn build(rs: RootSystem, p: u64) -> Result<Self, Error> {
        if p == 2 {
            return Err(Error::BadPrime(
                "characteristic 2 is excluded: the defining relations degenerate".into(),
            ));
        }
        if !fp::is_odd_prime(p) {
            return Err(Error::BadPrime(format!("{p} is not an odd prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::BadPrime("modulus too large".into()));
        }
        let n = rs.num_positive();
        let dim = rs.algebra_dim();
        let mut roots: Vec<Vec<i64>> = rs.positive_roots.iter().map(|r| r.coeffs.clone()).collect();
        for i in 0..n {
            let neg: Vec<i64> = roots[i].iter().map(|c| -c).collect();
            roots.push(neg);
        }
        let root_idx: HashMap<Vec<i64>, usize> = roots
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();

        let mut builder = ConstantBuilder {
            rs: &rs,
            roots: &roots,
            root_idx: &root_idx,
            num_pos: n,
            extraspecial: compute_extraspecial(&rs, &roots, &root_idx, n),
            memo: HashMap::new(),
        };

        // Fill the integer bracket table.
        let mut table: Vec<Vec<(u32, i64)>> = vec![Vec::new(); dim * dim];
        for a in 0..2 * n {
            for b in 0..2 * n {
                if a == b {
                    continue;
                }
                let sum: Vec<i64> = roots[a]
                    .iter()
                    .zip(roots[b].iter())
                    .map(|(x, y)| x + y)
                    .collect();
                if sum.iter().all(|&c| c == 0) {
                    // [e_alpha, e_{-alpha}] = h_alpha
                    let pos = if a < n { a } else { b };
                    let sign = if a < n { 1 } else { -1 };
                    let cc = rs.coroot_coefficients(&roots[pos]);
                    let entry: Vec<(u32, i64)> = (0..rs.rank)
                        .filter(|&i| cc[i] != 0)
                        .map(|i| ((2 * n + i) as u32, sign * cc[i]))
                        .collect();
                    table[a * dim + b] = entry;
                } else if let Some(&s) = root_idx.get(&sum) {
                    let c = builder.n_const(a, b);
                    table[a * dim + b] = vec![(s as u32, c)];
                }
            }
        }
        for i in 0..rs.rank {
            let h = 2 * n + i;
            for b in 0..2 * n {
                let w = rs.pairing(&roots[b], i);
                if w != 0 {
                    table[h * dim + b] = vec![(b as u32, w)];
                    table[b * dim + h] = vec![(b as u32, -w)];
                }
            }
        }

        let alg = ChevalleyAlgebra {
            rs,
            p,
            dim,
            num_pos: n,
            roots,
            root_idx,
            table,
        };
        alg.validate_constants()?;
        Ok(alg)
    }

    /// Cheap structural validation run at construction: every root-pair
    /// constant has magnitude `q+1`, and brackets with the Cartan agree
    /// with the pairing.
    fn validate_constants(&self) -> Result<(), Error> {
        let n = self.num_pos;
        for a in 0..2 * n {
            for b in 0..2 * n {
                let sum: Vec<i64> = self.roots[a]
                    .iter()
                    .zip(self.roots[b].iter())
                    .map(|(x, y)| x + y)
                    .collect();
                if self.root_idx.contains_key(&sum) {
                    let entry = &self.table[a * self.dim + b];
                    if entry.len() != 1 {
                        return Err(Error::Validation("missing root-pair constant".into()));
                    }
                    let q = self.string_q(&self.roots[a], &self.roots[b]);
                    if entry[0].1.unsigned_abs() as i64 != q + 1 {
                        return Err(Error::Validation(format!(
                            "constant for pair ({a},{b}) is {} but q+1 = {}",
                            entry[0].1,
                            q + 1
                        )));
                    }
                    // antisymmetry
                    let rev = &self.table[b * self.dim + a];
                    if rev.len() != 1 || rev[0].1 != -entry[0].1 {
                        return Err(Error::Validation("bracket not antisymmetric".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn string_q(&self, alpha: &[i64], beta: &[i64]) -> i64 {
        let mut q = 0;
        loop {
            let cand: Vec<i64> = beta
                .iter()
                .zip(alpha.iter())
                .map(|(b, a)| b - (q + 1) * a)
                .collect();
            if self.root_idx.contains_key(&cand) {
                q += 1;
            } else {
                return q;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_positive(&self) -> usize {
        self.num_pos
    }

    pub fn rank(&self) -> usize {
        self.rs.rank
    }

    /// The root attached to basis index `i`, if `i` indexes a root vector.
    pub fn basis_root(&self, i: usize) -> Option<&[i64]> {
        if i < 2 * self.num_pos {
            Some(&self.roots[i])
        } else {
            None
        }
    }

    /// Basis index of the root vector `e_coeffs` (any sign).
    pub fn root_vector_index(&self, coeffs: &[i64]) -> Option<usize> {
        self.root_idx.get(coeffs).copied()
    }

    pub fn basis_label(&self, i: usize) -> String {
        if let Some(r) = self.basis_root(i) {
            format!(
                "e({})",
                r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            )
        } else {
            format!("h{}", i - 2 * self.num_pos + 1)
        }
    }

    /// Integer structure constant `N_{a,b}` for two roots with root sum.
    pub fn structure_constant(&self, a: &[i64], b: &[i64]) -> Option<i64> {
        let ia = self.root_vector_index(a)?;
        let ib = self.root_vector_index(b)?;
        let e = &self.table[ia * self.dim + ib];
        if e.len() == 1 && (e[0].0 as usize) < 2 * self.num_pos {
            Some(e[0].1)
        } else {
            None
        }
    }

    pub fn zero(&self) -> LieElement {
        LieElement::zero(self.dim)
    }

    pub fn basis_element(&self, i: usize) -> LieElement {
        let mut v = self.zero();
        v.coeffs[i] = 1;
        v
    }

    /// Builds an element from `(coefficient, root)` terms.
    pub fn element_from_root_terms(&self, terms: &[(i64, Vec<i64>)]) -> Result<LieElement, Error> {
        let mut v = self.zero();
        for (c, r) in terms {
            let idx = self
                .root_vector_index(r)
                .ok_or_else(|| Error::Validation(format!("{:?} is not a root", r)))?;
            v.coeffs[idx] = fp::add(self.p, v.coeffs[idx], fp::reduce_i64(self.p, *c));
        }
        Ok(v)
    }

    /// The Cartan element `sum c_i h_i`.
    pub fn cartan_element(&self, coroot_coeffs: &[u64]) -> LieElement {
        assert_eq!(coroot_coeffs.len(), self.rs.rank);
        let mut v = self.zero();
        for (i, &c) in coroot_coeffs.iter().enumerate() {
            v.coeffs[2 * self.num_pos + i] = c % self.p;
        }
        v
    }

    /// `h_alpha = [e_alpha, e_{-alpha}]` for a root `alpha`.
    pub fn coroot_element(&self, root: &[i64]) -> LieElement {
        let cc = self.rs.coroot_coefficients(root);
        let mut v = self.zero();
        for (i, &c) in cc.iter().enumerate() {
            v.coeffs[2 * self.num_pos + i] = fp::reduce_i64(self.p, c);
        }
        v
    }

    pub fn add(&self, x: &LieElement, y: &LieElement) -> LieElement {
        LieElement {
            coeffs: x
                .coeffs
                .iter()
                .zip(y.coeffs.iter())
                .map(|(&a, &b)| fp::add(self.p, a, b))
                .collect(),
        }
    }

    pub fn scale(&self, x: &LieElement, c: u64) -> LieElement {
        LieElement {
            coeffs: x.coeffs.iter().map(|&a| fp::mul(self.p, a, c % self.p)).collect(),
        }
    }

    pub fn sub(&self, x: &LieElement, y: &LieElement) -> LieElement {
        self.add(x, &self.scale(y, self.p - 1))
    }

    /// Integer bracket of two basis vectors.
    pub fn bracket_int_basis(&self, a: usize, b: usize) -> &[(u32, i64)] {
        &self.table[a * self.dim + b]
    }

    /// Bracket of two elements over `F_p`.
    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> Result<LieElement, Error> {
        if x.coeffs.len() != self.dim || y.coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "bracket of elements of length {}/{} in a {}-dimensional algebra",
                x.coeffs.len(),
                y.coeffs.len(),
                self.dim
            )));
        }
        let p = self.p;
        let mut out = self.zero();
        for i in x.support() {
            let xi = x.coeffs[i];
            for j in y.support() {
                let c = fp::mul(p, xi, y.coeffs[j]);
                if c == 0 {
                    continue;
                }
                for &(k, v) in &self.table[i * self.dim + j] {
                    let vv = fp::mul(p, c, fp::reduce_i64(p, v));
                    out.coeffs[k as usize] = fp::add(p, out.coeffs[k as usize], vv);
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad(x)` in the basis: column `j` is `[x, basis_j]`.
    pub fn ad_matrix(&self, x: &LieElement) -> MatrixFp {
        let p = self.p;
        let mut m = MatrixFp::zeros(p, self.dim, self.dim);
        for i in x.support() {
            let xi = x.coeffs[i];
            for j in 0..self.dim {
                for &(k, v) in &self.table[i * self.dim + j] {
                    let add = fp::mul(p, xi, fp::reduce_i64(p, v));
                    let cur = m.get(k as usize, j);
                    m.set(k as usize, j, fp::add(p, cur, add));
                }
            }
        }
        m
    }

    /// Integer Jacobi identity on a basis triple; the build is rejected by
    /// tests if this ever fails.
    pub fn jacobi_int_basis(&self, a: usize, b: usize, c: usize) -> bool {
        let mut acc: HashMap<u32, i64> = HashMap::new();
        let add_term = |table: &Vec<Vec<(u32, i64)>>, x: usize, y: usize, z: usize, acc: &mut HashMap<u32, i64>| {
            // [[x,y],z]
            let inner = &table[x * self.dim + y];
            for &(k, v) in inner {
                for &(l, w) in &table[(k as usize) * self.dim + z] {
                    *acc.entry(l).or_insert(0) += v * w;
                }
            }
        };
        add_term(&self.table, a, b, c, &mut acc);
        add_term(&self.table, b, c, a, &mut acc);
        add_term(&self.table, c, a, b, &mut acc);
        acc.values().all(|&v| v == 0)
    }

    /// Exhaustive integer Jacobi scan over all unordered basis triples.
    pub fn jacobi_scan_exhaustive(&self) -> bool {
        for a in 0..self.dim {
            for b in (a + 1)..self.dim {
                for c in (b + 1)..self.dim {
                    if !self.jacobi_int_basis(a, b, c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Jacobi scan over `count` pseudorandom basis triples (deterministic
    /// for a given seed).
    pub fn jacobi_scan_sampled(&self, count: usize, seed: u64) -> bool {
        let mut state = seed | 1;
        let mut next = || {
            // xorshift64*
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            state.wrapping_mul(0x2545F4914F6CDD1D)
        };
        for _ in 0..count {
            let a = (next() % self.dim as u64) as usize;
            let b = (next() % self.dim as u64) as usize;
            let c = (next() % self.dim as u64) as usize;
            if !self.jacobi_int_basis(a, b, c) {
                return false;
            }
        }
        true
    }

    /// Divided-power operators for the one-parameter root group of
    /// `e_beta`; `beta_idx` is a root-vector basis index. Powers are
    /// computed over Z, divided by `k!` there, and only then reduced.
    pub fn root_group_ops(&self, beta_idx: usize) -> RootGroupOps {
        assert!(beta_idx < 2 * self.num_pos, "not a root vector index");
        let p = self.p;
        // columns over Z: u_k = ad(e_beta)^k e_j
        let mut powers: Vec<MatrixFp> = vec![MatrixFp::identity(p, self.dim)];
        let mut cols: Vec<Vec<(u32, i64)>> = (0..self.dim).map(|j| vec![(j as u32, 1)]).collect();
        let mut k: u64 = 1;
        let mut factorial: i64 = 1;
        loop {
            factorial *= k as i64;
            let mut any = false;
            let mut newcols: Vec<Vec<(u32, i64)>> = Vec::with_capacity(self.dim);
            for col in &cols {
                let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
                for &(i, v) in col {
                    for &(t, w) in &self.table[beta_idx * self.dim + i as usize] {
                        *acc.entry(t).or_insert(0) += v * w;
                    }
                }
                let col: Vec<(u32, i64)> = acc.into_iter().filter(|&(_, v)| v != 0).collect();
                if !col.is_empty() {
                    any = true;
                }
                newcols.push(col);
            }
            if !any {
                break;
            }
            let mut m = MatrixFp::zeros(p, self.dim, self.dim);
            for (j, col) in newcols.iter().enumerate() {
                for &(i, v) in col {
                    assert_eq!(v % factorial, 0, "divided power is not integral");
                    m.set(i as usize, j, fp::reduce_i64(p, v / factorial));
                }
            }
            powers.push(m);
            cols = newcols;
            k += 1;
            assert!(k < 16, "ad(e_beta) failed to nilpotate");
        }
        RootGroupOps { powers }
    }

    /// `x_beta(t) . v` for a scalar parameter `t`.
    pub fn exp_root_action(&self, beta_idx: usize, t: u64, v: &LieElement) -> LieElement {
        let ops = self.root_group_ops(beta_idx);
        self.exp_root_action_with(&ops, t, v)
    }

    pub fn exp_root_action_with(&self, ops: &RootGroupOps, t: u64, v: &LieElement) -> LieElement {
        let p = self.p;
        let mut out = self.zero();
        let mut tk = 1u64;
        for m in &ops.powers {
            let term = m.apply(&v.coeffs);
            for (o, &x) in out.coeffs.iter_mut().zip(term.iter()) {
                *o = fp::add(p, *o, fp::mul(p, tk, x));
            }
            tk = fp::mul(p, tk, t % p);
        }
        out
    }

    /// `x_beta(t) . v` for polynomial coordinates and polynomial parameter.
    pub fn exp_root_action_poly(
        &self,
        ops: &RootGroupOps,
        t: &PolyFp,
        coords: &[PolyFp],
    ) -> Vec<PolyFp> {
        let p = self.p;
        let mut out = vec![PolyFp::zero(p); self.dim];
        let mut tk = PolyFp::constant(p, 1);
        for m in &ops.powers {
            for r in 0..self.dim {
                let mut acc = PolyFp::zero(p);
                for (c, coord) in coords.iter().enumerate() {
                    let mv = m.get(r, c);
                    if mv != 0 && !coord.is_zero() {
                        acc = acc.add(&coord.scale(mv));
                    }
                }
                if !acc.is_zero() {
                    out[r] = out[r].add(&acc.mul(&tk));
                }
            }
            tk = tk.mul(t);
        }
        out
    }

    /// Weight of a basis vector under the torus coweight `sum c_i alpha_i^vee`.
    pub fn torus_weight(&self, basis_idx: usize, coweights: &[i64]) -> i64 {
        match self.basis_root(basis_idx) {
            Some(r) => (0..self.rs.rank)
                .map(|i| coweights[i] * self.rs.pairing(r, i))
                .sum(),
            None => 0,
        }
    }

    /// Diagonal torus action `v -> s^{<gamma, chi>} v` componentwise.
    pub fn torus_action(&self, coweights: &[i64], s: u64, v: &LieElement) -> LieElement {
        let p = self.p;
        let mut out = v.clone();
        for i in 0..self.dim {
            if out.coeffs[i] != 0 {
                let w = self.torus_weight(i, coweights);
                let f = if w >= 0 {
                    fp::pow(p, s, w as u64)
                } else {
                    fp::inv(p, fp::pow(p, s, (-w) as u64))
                };
                out.coeffs[i] = fp::mul(p, out.coeffs[i], f);
            }
        }
        out
    }

    /// Grading by integer weights on the simple roots.
    pub fn grading(&self, weights: &[i64]) -> GradedDecomposition {
        assert_eq!(weights.len(), self.rs.rank);
        let mut degrees = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let d = match self.basis_root(i) {
                Some(r) => r.iter().zip(weights.iter()).map(|(c, w)| c * w).sum(),
                None => 0,
            };
            degrees.push(d);
        }
        let mut blocks: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &d) in degrees.iter().enumerate() {
            blocks.entry(d).or_default().push(i);
        }
        GradedDecomposition { degrees, blocks }
    }

    /// Kernel of `ad(x)` as a canonical basis.
    pub fn centralizer_subspace(&self, x: &LieElement) -> Vec<Vec<u64>> {
        self.ad_matrix(x).kernel()
    }

    pub fn centralizer_dimension(&self, x: &LieElement) -> usize {
        self.centralizer_subspace(x).len()
    }

    /// Basis of `ker(ad x) /\ g(degree)` for a coordinate grading: the
    /// grading blocks are spanned by basis vectors, so this is the kernel
    /// of the column-restricted `ad(x)`.
    pub fn centralizer_in_degree(
        &self,
        x: &LieElement,
        grading: &GradedDecomposition,
        degree: i64,
    ) -> Vec<Vec<u64>> {
        let block = grading.block(degree);
        if block.is_empty() {
            return Vec::new();
        }
        let ad = self.ad_matrix(x);
        let mut sub = MatrixFp::zeros(self.p, self.dim, block.len());
        for (c, &j) in block.iter().enumerate() {
            for r in 0..self.dim {
                sub.set(r, c, ad.get(r, j));
            }
        }
        sub.kernel()
            .into_iter()
            .map(|k| {
                let mut v = vec![0u64; self.dim];
                for (c, &j) in block.iter().enumerate() {
                    v[j] = k[c];
                }
                v
            })
            .collect()
    }

    /// Determines nilpotency of `ad(x)` (true for every root vector sum in
    /// the nilradical; used for catalog validation).
    pub fn is_ad_nilpotent(&self, x: &LieElement) -> bool {
        let ad = self.ad_matrix(x);
        // ad is nilpotent iff ad^dim = 0
        ad.pow(self.dim as u64).is_zero()
    }
}

fn compute_extraspecial(
    rs: &RootSystem,
    roots: &[Vec<i64>],
    root_idx: &HashMap<Vec<i64>, usize>,
    num_pos: usize,
) -> Vec<Option<(usize, usize)>> {
    let mut out = vec![None; num_pos];
    for (g, gamma) in roots.iter().take(num_pos).enumerate() {
        if rs.positive_roots[g].height() < 2 {
            continue;
        }
        for a in 0..num_pos {
            let diff: Vec<i64> = gamma.iter().zip(roots[a].iter()).map(|(x, y)| x - y).collect();
            if let Some(&b) = root_idx.get(&diff) {
                if b < num_pos {
                    out[g] = Some((a, b));
                    break;
                }
            }
        }
        assert!(out[g].is_some(), "no extraspecial pair found");
    }
    out
}

/// On-demand computation of the integer constants `N_{a,b}`, memoised over
/// root-index pairs.
struct ConstantBuilder<'a> {
    rs: &'a RootSystem,
    roots: &'a [Vec<i64>],
    root_idx: &'a HashMap<Vec<i64>, usize>,
    num_pos: usize,
    extraspecial: Vec<Option<(usize, usize)>>,
    memo: HashMap<(usize, usize), i64>,
}

impl ConstantBuilder<'_> {
    fn neg(&self, a: usize) -> usize {
        if a < self.num_pos {
            a + self.num_pos
        } else {
            a - self.num_pos
        }
    }

    fn sum_idx(&self, a: usize, b: usize) -> Option<usize> {
        let s: Vec<i64> = self.roots[a]
            .iter()
            .zip(self.roots[b].iter())
            .map(|(x, y)| x + y)
            .collect();
        self.root_idx.get(&s).copied()
    }

    fn len_sq(&self, a: usize) -> i64 {
        self.rs.length_sq(&self.roots[a])
    }

    fn string_q(&self, a: usize, b: usize) -> i64 {
        let alpha = &self.roots[a];
        let beta = &self.roots[b];
        let mut q = 0;
        loop {
            let cand: Vec<i64> = beta
                .iter()
                .zip(alpha.iter())
                .map(|(bb, aa)| bb - (q + 1) * aa)
                .collect();
            if self.root_idx.contains_key(&cand) {
                q += 1;
            } else {
                return q;
            }
        }
    }

    /// `N_{a,b}` for root indices with `a + b` a root.
    fn n_const(&mut self, a: usize, b: usize) -> i64 {
        if let Some(&v) = self.memo.get(&(a, b)) {
            return v;
        }
        let v = self.n_const_inner(a, b);
        self.memo.insert((a, b), v);
        self.memo.insert((b, a), -v);
        v
    }

    fn n_const_inner(&mut self, a: usize, b: usize) -> i64 {
        let n = self.num_pos;
        let g = self.sum_idx(a, b).expect("n_const on a non-root sum");
        match (a < n, b < n) {
            (true, true) => {
                if a > b {
                    return -self.n_const(b, a);
                }
                let (ea, eb) = self.extraspecial[g].expect("positive sum must have a pair");
                if (ea, eb) == (a, b) {
                    return self.string_q(a, b) + 1;
                }
                // Jacobi against the extraspecial pair (ea, eb):
                //   N_{ea,eb} N_{g,-a} + [eb-a root] N_{eb,-a} N_{eb-a,ea}
                //                      + [ea-a root] N_{-a,ea} N_{ea-a,eb} = 0
                // together with N_{g,-a} = -(|b|^2/|g|^2) N_{a,b}.
                let neg_a = self.neg(a);
                let mut t = 0i64;
                if let Some(d) = self.sum_idx(eb, neg_a) {
                    t += self.n_const(eb, neg_a) * self.n_const(d, ea);
                }
                if let Some(d) = self.sum_idx(ea, neg_a) {
                    t += self.n_const(neg_a, ea) * self.n_const(d, eb);
                }
                let n_extra = self.n_const(ea, eb);
                let num = self.len_sq(g) * t;
                let den = self.len_sq(b) * n_extra;
                assert!(den != 0 && num % den == 0, "non-integral structure constant");
                num / den
            }
            (false, false) => -self.n_const(a - n, b - n),
            (false, true) => -self.n_const(b, a),
            (true, false) => {
                if g < n {
                    // positive sum: N_{a,b} = (|g|^2/|a|^2) N_{g, -b}
                    let num = self.len_sq(g) * self.n_const(g, self.neg(b));
                    let den = self.len_sq(a);
                    assert_eq!(num % den, 0);
                    num / den
                } else {
                    // negative sum: N_{a,b} = -(|g|^2/|b|^2) N_{a, -g}
                    let ng = self.neg(g);
                    let num = self.len_sq(g) * self.n_const(a, ng);
                    let den = self.len_sq(b);
                    assert_eq!(num % den, 0);
                    -num / den
                }
            }
        }
    }
}

/// Convenience constructor used across tests and the CLI.
pub fn build_algebra(t: SimpleType, rank: usize, p: u64) -> Result<ChevalleyAlgebra, Error> {
    let rs = RootSystem::build(t, rank)?;
    ChevalleyAlgebra::build(rs, p)
}

/// Formats an element as a sum of labelled basis vectors.
pub fn format_element(alg: &ChevalleyAlgebra, v: &LieElement) -> String {
    let terms: Vec<String> = v
        .support()
        .into_iter()
        .map(|i| {
            let c = v.coeffs[i];
            if c == 1 {
                alg.basis_label(i)
            } else {
                format!("{c}*{}", alg.basis_label(i))
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::SimpleType as T;

    #[test]
    fn sl2_relations() {
        let alg = build_algebra(T::A, 1, 3).unwrap();
        assert_eq!(alg.dim(), 3);
        let e = alg.element_from_root_terms(&[(1, vec![1])]).unwrap();
        let f = alg.element_from_root_terms(&[(1, vec![-1])]).unwrap();
        let h = alg.bracket(&e, &f).unwrap();
        assert_eq!(h, alg.cartan_element(&[1]));
        let he = alg.bracket(&h, &e).unwrap();
        assert_eq!(he, alg.scale(&e, 2));
        let hf = alg.bracket(&h, &f).unwrap();
        assert_eq!(hf, alg.scale(&f, 3 - 2));
    }

    #[test]
    fn coroot_brackets_hold_everywhere() {
        for (t, n, p) in [
            (T::A, 3, 5),
            (T::B, 3, 7),
            (T::C, 3, 5),
            (T::D, 4, 3),
            (T::G, 2, 3),
            (T::F, 4, 5),
        ] {
            let alg = build_algebra(t, n, p).unwrap();
            for i in 0..alg.num_positive() {
                let root = alg.basis_root(i).unwrap().to_vec();
                let e = alg.basis_element(i);
                let f = alg.basis_element(i + alg.num_positive());
                let h = alg.bracket(&e, &f).unwrap();
                assert_eq!(h, alg.coroot_element(&root), "{t}{n} root {i}");
            }
        }
    }

    #[test]
    fn jacobi_exhaustive_small_types() {
        for (t, n) in [(T::A, 1), (T::A, 2), (T::A, 3), (T::G, 2), (T::B, 3)] {
            let alg = build_algebra(t, n, 5).unwrap();
            assert!(alg.jacobi_scan_exhaustive(), "Jacobi failed for {t}{n}");
        }
    }

    #[test]
    fn jacobi_sampled_exceptional() {
        let alg = build_algebra(T::E, 6, 5).unwrap();
        assert!(alg.jacobi_scan_sampled(20_000, 0xfeed));
    }

    #[test]
    fn p2_rejected() {
        assert!(matches!(
            build_algebra(T::A, 1, 2),
            Err(Error::BadPrime(_))
        ));
    }

    #[test]
    fn g2_h10_bracket_matches_weights() {
        // [h_{10}, e_{-10}] = -2 e_{-10} = e_{-10} mod 3
        let alg = build_algebra(T::G, 2, 3).unwrap();
        let h = alg.coroot_element(&[1, 0]);
        let f = alg.element_from_root_terms(&[(1, vec![-1, 0])]).unwrap();
        let hf = alg.bracket(&h, &f).unwrap();
        assert_eq!(hf, f);
    }

    #[test]
    fn ad_of_zero_is_zero() {
        let alg = build_algebra(T::G, 2, 3).unwrap();
        assert!(alg.ad_matrix(&alg.zero()).is_zero());
    }

    #[test]
    fn g2_short_root_ad_squared_rank_one() {
        // x = e_{01} (long); rank(ad(x)^2) = 1 mod 3
        let alg = build_algebra(T::G, 2, 3).unwrap();
        let e = alg.element_from_root_terms(&[(1, vec![0, 1])]).unwrap();
        let ad2 = alg.ad_matrix(&e).pow(2);
        assert_eq!(ad2.rank(), 1);
    }

    #[test]
    fn root_vector_ad_nilpotency_bound() {
        // ad(e_alpha)^4 = 0 in every type except G2, where the bound is 5.
        for (t, n, p, bound) in [
            (T::A, 3, 5, 4u64),
            (T::B, 3, 5, 4),
            (T::C, 3, 7, 4),
            (T::D, 4, 3, 4),
            (T::F, 4, 5, 4),
            (T::G, 2, 5, 5),
        ] {
            let alg = build_algebra(t, n, p).unwrap();
            for i in 0..2 * alg.num_positive() {
                let ad = alg.ad_matrix(&alg.basis_element(i));
                assert!(ad.pow(bound).is_zero(), "{t}{n} basis {i}");
            }
        }
    }

    #[test]
    fn exp_action_is_automorphism() {
        let alg = build_algebra(T::G, 2, 3).unwrap();
        let mut rng: u64 = 0xabcdef;
        let mut next = || {
            rng ^= rng >> 12;
            rng ^= rng << 25;
            rng ^= rng >> 27;
            rng.wrapping_mul(0x2545F4914F6CDD1D)
        };
        for beta in 0..2 * alg.num_positive() {
            let ops = alg.root_group_ops(beta);
            for _ in 0..4 {
                let mut v = alg.zero();
                let mut w = alg.zero();
                for i in 0..alg.dim() {
                    v.coeffs[i] = next() % 3;
                    w.coeffs[i] = next() % 3;
                }
                let t = 1 + next() % 2;
                let lhs = alg
                    .exp_root_action_with(&ops, t, &alg.bracket(&v, &w).unwrap());
                let rhs = alg
                    .bracket(
                        &alg.exp_root_action_with(&ops, t, &v),
                        &alg.exp_root_action_with(&ops, t, &w),
                    )
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn exp_action_composition_law() {
        let alg = build_algebra(T::G, 2, 5).unwrap();
        let beta = alg.root_vector_index(&[1, 0]).unwrap();
        let ops = alg.root_group_ops(beta);
        let v = alg.element_from_root_terms(&[(1, vec![-1, -1]), (2, vec![0, 1])]).unwrap();
        for s in 0..5 {
            for t in 0..5 {
                let a = alg.exp_root_action_with(&ops, s, &alg.exp_root_action_with(&ops, t, &v));
                let b = alg.exp_root_action_with(&ops, (s + t) % 5, &v);
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn exp_action_at_zero_is_identity() {
        let alg = build_algebra(T::G, 2, 3).unwrap();
        let beta = alg.root_vector_index(&[0, -1]).unwrap();
        let v = alg.element_from_root_terms(&[(1, vec![-1, 0]), (1, vec![2, 1])]).unwrap();
        assert_eq!(alg.exp_root_action(beta, 0, &v), v);
    }

    #[test]
    fn grading_blocks_partition_basis() {
        let alg = build_algebra(T::G, 2, 3).unwrap();
        let g = alg.grading(&[1, 1]);
        let total: usize = g.blocks.values().map(|b| b.len()).sum();
        assert_eq!(total, alg.dim());
        // all-zero weights: one block of full dimension
        let g0 = alg.grading(&[0, 0]);
        assert_eq!(g0.blocks.len(), 1);
        assert_eq!(g0.block(0).len(), alg.dim());
    }

    #[test]
    fn grading_respects_bracket() {
        // exhaustive at G2 scale: [g(i), g(j)] <= g(i+j)
        let alg = build_algebra(T::G, 2, 3).unwrap();
        let g = alg.grading(&[2, -3]);
        for a in 0..alg.dim() {
            for b in 0..alg.dim() {
                let br = alg
                    .bracket(&alg.basis_element(a), &alg.basis_element(b))
                    .unwrap();
                for k in br.support() {
                    assert_eq!(g.degrees[k], g.degrees[a] + g.degrees[b]);
                }
            }
        }
    }

    #[test]
    fn centralizer_dimensions() {
        let alg = build_algebra(T::A, 1, 5).unwrap();
        assert_eq!(alg.centralizer_dimension(&alg.zero()), 3);
        let e = alg.element_from_root_terms(&[(1, vec![1])]).unwrap();
        assert_eq!(alg.centralizer_dimension(&e), 1);
    }

    #[test]
    fn centralizer_matches_rank_nullity() {
        // subregular representative at p = 3: kernel dimension equals
        // dim - rank(ad), and the value is the recorded 5
        let alg = build_algebra(T::G, 2, 3).unwrap();
        let x = alg
            .element_from_root_terms(&[(1, vec![0, 1]), (1, vec![3, 1])])
            .unwrap();
        let rank = alg.ad_matrix(&x).rank();
        assert_eq!(alg.centralizer_dimension(&x), alg.dim() - rank);
        assert_eq!(alg.centralizer_dimension(&x), 5);
    }

    #[test]
    fn bracket_rejects_dimension_mismatch() {
        let alg = build_algebra(T::A, 1, 3).unwrap();
        let good = alg.zero();
        let bad = LieElement { coeffs: vec![0; 5] };
        assert!(matches!(
            alg.bracket(&good, &bad),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn algebra_is_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<ChevalleyAlgebra>();
        assert_send_sync::<LieElement>();
    }
}
