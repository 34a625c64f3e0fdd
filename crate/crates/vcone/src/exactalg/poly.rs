//! Sparse multivariate polynomials over `F_p`.
//!
//! A monomial is nibble-packed into a `u128`: variable `i` occupies bits
//! `4i..4i+4`, so up to 32 named variables with individual exponents up to
//! 15. The largest family in scope has 27 variables (eliminated while still
//! linear) and Step-3 matrix powers stay below total degree `p-1 <= 10`, so
//! the packing never saturates; it is asserted anyway.

use super::fp;
use std::collections::BTreeMap;
use std::fmt;

pub const MAX_VARS: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mono(u128);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn var(i: usize) -> Mono {
        assert!(i < MAX_VARS, "variable index out of range");
        Mono(1u128 << (4 * i))
    }

    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> (4 * i)) & 0xf) as u32
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn total_degree(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exp(i)).sum()
    }

    /// Product of monomials; panics if any exponent would exceed 15.
    pub fn mul(self, other: Mono) -> Mono {
        for i in 0..MAX_VARS {
            assert!(
                self.exp(i) + other.exp(i) <= 15,
                "monomial exponent overflow"
            );
        }
        Mono(self.0 + other.0)
    }

    pub fn pow(self, e: u32) -> Mono {
        let mut m = Mono::ONE;
        for _ in 0..e {
            m = m.mul(self);
        }
        m
    }

    /// Indices of variables that occur with positive exponent.
    pub fn vars(self) -> Vec<usize> {
        (0..MAX_VARS).filter(|&i| self.exp(i) > 0).collect()
    }
}

/// A polynomial in `x_0..x_{MAX_VARS-1}` with coefficients in `F_p`.
/// Terms are kept sorted by monomial with nonzero coefficients only, so
/// equality of representations is equality of polynomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyFp {
    p: u64,
    terms: Vec<(Mono, u64)>,
}

impl PolyFp {
    pub fn zero(p: u64) -> Self {
        PolyFp { p, terms: vec![] }
    }

    pub fn constant(p: u64, c: u64) -> Self {
        let c = c % p;
        if c == 0 {
            Self::zero(p)
        } else {
            PolyFp {
                p,
                terms: vec![(Mono::ONE, c)],
            }
        }
    }

    pub fn constant_i64(p: u64, c: i64) -> Self {
        Self::constant(p, fp::reduce_i64(p, c))
    }

    pub fn var(p: u64, i: usize) -> Self {
        PolyFp {
            p,
            terms: vec![(Mono::var(i), 1)],
        }
    }

    pub fn from_terms(p: u64, terms: Vec<(Mono, u64)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            let c = c % p;
            if c != 0 {
                let e = map.entry(m).or_insert(0);
                *e = fp::add(p, *e, c);
            }
        }
        PolyFp {
            p,
            terms: map.into_iter().filter(|&(_, c)| c != 0).collect(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> &[(Mono, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` if the polynomial is the constant `c` (including 0).
    pub fn as_constant(&self) -> Option<u64> {
        match self.terms.len() {
            0 => Some(0),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1),
            _ => None,
        }
    }

    pub fn coeff(&self, m: Mono) -> u64 {
        match self.terms.binary_search_by_key(&m, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Variables occurring in the polynomial, ascending.
    pub fn variables(&self) -> Vec<usize> {
        let mut seen = [false; MAX_VARS];
        for (m, _) in &self.terms {
            for v in m.vars() {
                seen[v] = true;
            }
        }
        (0..MAX_VARS).filter(|&i| seen[i]).collect()
    }

    pub fn add(&self, other: &PolyFp) -> PolyFp {
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = self.terms[i];
            let (mb, cb) = other.terms[j];
            match ma.cmp(&mb) {
                std::cmp::Ordering::Less => {
                    out.push((ma, ca));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((mb, cb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = fp::add(p, ca, cb);
                    if c != 0 {
                        out.push((ma, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        PolyFp { p, terms: out }
    }

    pub fn neg(&self) -> PolyFp {
        PolyFp {
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|&(m, c)| (m, fp::neg(self.p, c)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &PolyFp) -> PolyFp {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> PolyFp {
        let c = c % self.p;
        if c == 0 {
            return PolyFp::zero(self.p);
        }
        PolyFp {
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|&(m, a)| (m, fp::mul(self.p, a, c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &PolyFp) -> PolyFp {
        assert_eq!(self.p, other.p);
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return PolyFp::zero(p);
        }
        let mut acc: BTreeMap<Mono, u64> = BTreeMap::new();
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let e = acc.entry(m).or_insert(0);
                *e = fp::add(p, *e, fp::mul(p, ca, cb));
            }
        }
        PolyFp {
            p,
            terms: acc.into_iter().filter(|&(_, c)| c != 0).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> PolyFp {
        let mut out = PolyFp::constant(self.p, 1);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Evaluates at a point; `point` must cover every occurring variable.
    pub fn eval(&self, point: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for &(m, c) in &self.terms {
            let mut t = c;
            for v in m.vars() {
                t = fp::mul(p, t, fp::pow(p, point[v], m.exp(v) as u64));
            }
            acc = fp::add(p, acc, t);
        }
        acc
    }

    /// Substitutes `replacement` for variable `var`.
    pub fn substitute(&self, var: usize, replacement: &PolyFp) -> PolyFp {
        assert_eq!(self.p, replacement.p);
        let p = self.p;
        let mut out = PolyFp::zero(p);
        for &(m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                out = out.add(&PolyFp {
                    p,
                    terms: vec![(m, c)],
                });
            } else {
                let rest = Mono(m.0 - ((e as u128) << (4 * var)));
                let base = PolyFp {
                    p,
                    terms: vec![(rest, c)],
                };
                out = out.add(&base.mul(&replacement.pow(e)));
            }
        }
        out
    }

    /// Applies a set of substitutions `var -> poly` simultaneously. The
    /// replacement polynomials must not mention any substituted variable.
    pub fn substitute_map(&self, map: &BTreeMap<usize, PolyFp>) -> PolyFp {
        let mut out = self.clone();
        for (&v, r) in map {
            out = out.substitute(v, r);
        }
        out
    }

    /// For a polynomial of total degree <= 1, returns `(coeffs, constant)`
    /// with `coeffs` the list of `(variable, coefficient)` pairs.
    pub fn as_linear(&self) -> Option<(Vec<(usize, u64)>, u64)> {
        let mut coeffs = Vec::new();
        let mut konst = 0;
        for &(m, c) in &self.terms {
            match m.total_degree() {
                0 => konst = c,
                1 => {
                    let v = m.vars()[0];
                    coeffs.push((v, c));
                }
                _ => return None,
            }
        }
        Some((coeffs, konst))
    }

    /// `Some((var, coeff, exp))` if the polynomial is a single term in one
    /// variable, e.g. `3*x_2^4`. Such a constraint forces the variable to 0.
    pub fn as_univariate_monomial(&self) -> Option<(usize, u64, u32)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms[0];
        let vars = m.vars();
        if vars.len() != 1 {
            return None;
        }
        Some((vars[0], c, m.exp(vars[0])))
    }
}

impl fmt::Display for PolyFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for &(m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                if c != 1 {
                    write!(f, "{c}*")?;
                }
                let mut firstv = true;
                for v in m.vars() {
                    if !firstv {
                        write!(f, "*")?;
                    }
                    firstv = false;
                    let e = m.exp(v);
                    if e == 1 {
                        write!(f, "x{v}")?;
                    } else {
                        write!(f, "x{v}^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_roundtrip() {
        let p = 5;
        let x = PolyFp::var(p, 0);
        let y = PolyFp::var(p, 1);
        let f = x.add(&y).mul(&x.sub(&y)); // x^2 - y^2
        assert_eq!(f.eval(&[3, 2]), (9u64 + 5 - 4) % 5);
        assert_eq!(f.coeff(Mono::var(0).pow(2)), 1);
        assert_eq!(f.coeff(Mono::var(1).pow(2)), 4);
    }

    #[test]
    fn substitution_is_evaluation_compatible() {
        let p = 7;
        let x = PolyFp::var(p, 0);
        let y = PolyFp::var(p, 1);
        let f = x.mul(&x).add(&y.scale(3)).add(&PolyFp::constant(p, 2));
        let g = f.substitute(0, &y.add(&PolyFp::constant(p, 1)));
        for b in 0..7 {
            assert_eq!(g.eval(&[0, b]), f.eval(&[(b + 1) % 7, b]));
        }
    }

    #[test]
    fn linear_extraction() {
        let p = 5;
        let f = PolyFp::var(p, 2)
            .scale(3)
            .add(&PolyFp::constant(p, 4))
            .add(&PolyFp::var(p, 0));
        let (coeffs, c) = f.as_linear().unwrap();
        assert_eq!(c, 4);
        assert_eq!(coeffs, vec![(0, 1), (2, 3)]);
        let q = PolyFp::var(p, 0).mul(&PolyFp::var(p, 1));
        assert!(q.as_linear().is_none());
        assert!(q.as_univariate_monomial().is_none());
        let m = PolyFp::var(p, 3).pow(2).scale(2);
        assert_eq!(m.as_univariate_monomial(), Some((3, 2, 2)));
    }
}
