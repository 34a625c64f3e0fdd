//! Root systems of the simple types in Bourbaki numbering.
//!
//! Roots are stored as integer coefficient vectors over the simple roots,
//! never as Euclidean vectors, so that all downstream arithmetic stays
//! integral. The Cartan matrix convention is
//!
//! ```text
//! cartan[i][j] = <alpha_j, alpha_i^vee> = 2(alpha_j, alpha_i)/(alpha_i, alpha_i)
//! ```
//!
//! so row `i` lists the pairings against the i-th simple coroot, and
//! `[h_i, e_alpha] = pairing(alpha, i) * e_alpha` in the Chevalley basis.

use crate::Error;
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SimpleType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SimpleType::A => "A",
            SimpleType::B => "B",
            SimpleType::C => "C",
            SimpleType::D => "D",
            SimpleType::E => "E",
            SimpleType::F => "F",
            SimpleType::G => "G",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for SimpleType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "A" | "a" => Ok(SimpleType::A),
            "B" | "b" => Ok(SimpleType::B),
            "C" | "c" => Ok(SimpleType::C),
            "D" | "d" => Ok(SimpleType::D),
            "E" | "e" => Ok(SimpleType::E),
            "F" | "f" => Ok(SimpleType::F),
            "G" | "g" => Ok(SimpleType::G),
            _ => Err(Error::InvalidType(format!("unknown simple type `{s}`"))),
        }
    }
}

/// Parses labels like "G2", "E7", "A5" into (type, rank).
pub fn parse_group_label(s: &str) -> Result<(SimpleType, usize), Error> {
    if s.is_empty() {
        return Err(Error::InvalidType("empty group label".into()));
    }
    let (head, tail) = s.split_at(1);
    let t: SimpleType = head.parse()?;
    let rank: usize = tail
        .parse()
        .map_err(|_| Error::InvalidType(format!("bad rank in group label `{s}`")))?;
    Ok((t, rank))
}

/// A root together with its sign and height. `coeffs` are coordinates over
/// the simple roots; negation flips both sign and coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Root {
    pub coeffs: Vec<i64>,
}

impl Root {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Root { coeffs }
    }

    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.height() > 0
    }

    pub fn neg(&self) -> Root {
        Root {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub type_label: SimpleType,
    pub rank: usize,
    /// `cartan[i][j] = <alpha_j, alpha_i^vee>`.
    pub cartan: Vec<Vec<i64>>,
    /// Half squared lengths of the simple roots, short roots normalised
    /// to 1 (`(alpha_i, alpha_i) = 2 d[i]`).
    pub d: Vec<i64>,
    /// Positive roots ordered by height, then lexicographically.
    pub positive_roots: Vec<Root>,
    pub coxeter_number: usize,
    index: HashMap<Vec<i64>, usize>,
}

fn expected_positive_count(t: SimpleType, n: usize) -> Option<usize> {
    match (t, n) {
        (SimpleType::A, n) if n >= 1 => Some(n * (n + 1) / 2),
        (SimpleType::B, n) if n >= 2 => Some(n * n),
        (SimpleType::C, n) if n >= 2 => Some(n * n),
        (SimpleType::D, n) if n >= 3 => Some(n * (n - 1)),
        (SimpleType::E, 6) => Some(36),
        (SimpleType::E, 7) => Some(63),
        (SimpleType::E, 8) => Some(120),
        (SimpleType::F, 4) => Some(24),
        (SimpleType::G, 2) => Some(6),
        _ => None,
    }
}

fn cartan_data(t: SimpleType, n: usize) -> (Vec<Vec<i64>>, Vec<i64>) {
    let mut c = vec![vec![0i64; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let link = |c: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    let mut d = vec![1i64; n];
    match t {
        SimpleType::A => {
            for i in 0..n - 1 {
                link(&mut c, i, i + 1);
            }
        }
        SimpleType::B => {
            for i in 0..n - 1 {
                link(&mut c, i, i + 1);
            }
            // alpha_n short: <alpha_{n-1}, alpha_n^vee> = -2
            c[n - 1][n - 2] = -2;
            for di in d.iter_mut().take(n - 1) {
                *di = 2;
            }
        }
        SimpleType::C => {
            for i in 0..n - 1 {
                link(&mut c, i, i + 1);
            }
            // alpha_n long: <alpha_n, alpha_{n-1}^vee> = -2
            c[n - 2][n - 1] = -2;
            d[n - 1] = 2;
        }
        SimpleType::D => {
            for i in 0..n - 2 {
                link(&mut c, i, i + 1);
            }
            link(&mut c, n - 3, n - 1);
        }
        SimpleType::E => {
            // Bourbaki: chain 1-3-4-5-6(-7(-8)), branch node 2 attached to 4.
            link(&mut c, 0, 2);
            link(&mut c, 2, 3);
            link(&mut c, 3, 4);
            link(&mut c, 4, 5);
            if n >= 7 {
                link(&mut c, 5, 6);
            }
            if n >= 8 {
                link(&mut c, 6, 7);
            }
            link(&mut c, 1, 3);
        }
        SimpleType::F => {
            link(&mut c, 0, 1);
            link(&mut c, 1, 2);
            link(&mut c, 2, 3);
            // alpha_1, alpha_2 long; alpha_3, alpha_4 short
            c[2][1] = -2;
            d[0] = 2;
            d[1] = 2;
        }
        SimpleType::G => {
            // alpha_1 short, alpha_2 long
            c[0][1] = -3;
            c[1][0] = -1;
            d[1] = 3;
        }
    }
    (c, d)
}

impl RootSystem {
    /// Constructs the root system by closing the simple roots under simple
    /// reflections. Rejects invalid (type, rank) combinations.
    pub fn build(t: SimpleType, rank: usize) -> Result<RootSystem, Error> {
        let expected = expected_positive_count(t, rank).ok_or_else(|| {
            Error::InvalidType(format!("invalid simple type/rank combination {t}{rank}"))
        })?;
        let (cartan, d) = cartan_data(t, rank);
        // Symmetry of (alpha_i, alpha_j) is a structural sanity check.
        for i in 0..rank {
            for j in 0..rank {
                assert_eq!(d[i] * cartan[i][j], d[j] * cartan[j][i]);
            }
        }

        let mut all: Vec<Vec<i64>> = Vec::new();
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        for i in 0..rank {
            let mut v = vec![0i64; rank];
            v[i] = 1;
            seen.insert(v.clone(), ());
            all.push(v);
        }
        let pairing = |root: &[i64], i: usize| -> i64 {
            (0..rank).map(|j| cartan[i][j] * root[j]).sum()
        };
        let mut frontier = all.clone();
        while let Some(r) = frontier.pop() {
            for i in 0..rank {
                let k = pairing(&r, i);
                let mut refl = r.clone();
                refl[i] -= k;
                if !seen.contains_key(&refl) {
                    seen.insert(refl.clone(), ());
                    all.push(refl.clone());
                    frontier.push(refl);
                }
            }
        }
        let mut positive: Vec<Root> = all
            .into_iter()
            .filter(|r| r.iter().sum::<i64>() > 0)
            .map(Root::new)
            .collect();
        positive.sort_by(|a, b| (a.height(), &a.coeffs).cmp(&(b.height(), &b.coeffs)));
        if positive.len() != expected {
            return Err(Error::Validation(format!(
                "{t}{rank}: generated {} positive roots, expected {expected}",
                positive.len()
            )));
        }
        let max_height = positive.last().unwrap().height() as usize;
        let coxeter = max_height + 1;
        // Cross-check against 2|Phi+|/rank.
        if coxeter * rank != 2 * expected {
            return Err(Error::Validation(format!(
                "{t}{rank}: Coxeter number mismatch ({coxeter} vs {})",
                2 * expected / rank
            )));
        }
        let index = positive
            .iter()
            .enumerate()
            .map(|(i, r)| (r.coeffs.clone(), i))
            .collect();
        Ok(RootSystem {
            type_label: t,
            rank,
            cartan,
            d,
            positive_roots: positive,
            coxeter_number: coxeter,
            index,
        })
    }

    pub fn num_positive(&self) -> usize {
        self.positive_roots.len()
    }

    /// Dimension of the corresponding Lie algebra.
    pub fn algebra_dim(&self) -> usize {
        2 * self.num_positive() + self.rank
    }

    /// `<root, alpha_i^vee>`.
    pub fn pairing(&self, root: &[i64], i: usize) -> i64 {
        (0..self.rank).map(|j| self.cartan[i][j] * root[j]).sum()
    }

    /// Index of a positive root, if `coeffs` is one.
    pub fn positive_index(&self, coeffs: &[i64]) -> Option<usize> {
        self.index.get(coeffs).copied()
    }

    pub fn is_root(&self, coeffs: &[i64]) -> bool {
        if coeffs.iter().sum::<i64>() > 0 {
            self.index.contains_key(coeffs)
        } else {
            let neg: Vec<i64> = coeffs.iter().map(|c| -c).collect();
            self.index.contains_key(&neg)
        }
    }

    /// Simple reflection `s_i(root)`.
    pub fn reflect(&self, root: &[i64], i: usize) -> Vec<i64> {
        let k = self.pairing(root, i);
        let mut out = root.to_vec();
        out[i] -= k;
        out
    }

    /// `(root, root)` with short simple roots of squared length 2.
    pub fn length_sq(&self, root: &[i64]) -> i64 {
        let mut acc = 0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                acc += root[i] * root[j] * self.d[i] * self.cartan[i][j];
            }
        }
        acc
    }

    /// Coefficients of the coroot `root^vee` over the simple coroots; these
    /// are always integers.
    pub fn coroot_coefficients(&self, root: &[i64]) -> Vec<i64> {
        let d_root = self.length_sq(root) / 2;
        (0..self.rank)
            .map(|i| {
                let num = root[i] * self.d[i];
                assert_eq!(num % d_root, 0, "non-integral coroot coefficient");
                num / d_root
            })
            .collect()
    }

    pub fn highest_root(&self) -> &Root {
        self.positive_roots.last().unwrap()
    }

    /// Solves for `c` with `h = sum c_i h_i` satisfying
    /// `[h, e_alpha] = (sum_j weights[j] * alpha_j-coefficient) e_alpha`,
    /// i.e. the linear system `A^T c = weights` over the rationals, and
    /// reduces the (necessarily integral) solution mod `p`.
    pub fn inverse_cartan_combine(&self, weights: &[i64], p: u64) -> Result<Vec<u64>, Error> {
        assert_eq!(weights.len(), self.rank);
        let n = self.rank;
        // Transposed system: row j of A^T is column j of cartan.
        let a: Vec<Vec<i64>> = (0..n)
            .map(|j| (0..n).map(|i| self.cartan[i][j]).collect())
            .collect();
        let sol = solve_rational(&a, weights).ok_or_else(|| {
            Error::InconsistentSystem("singular Cartan system".into())
        })?;
        let mut out = Vec::with_capacity(n);
        for (num, den) in sol {
            if num % den != 0 {
                return Err(Error::InconsistentSystem(
                    "inverse-Cartan solution is not integral; invalid weight data".into(),
                ));
            }
            out.push(crate::exactalg::fp::reduce_i64(p, (num / den) as i64));
        }
        Ok(out)
    }
}

/// Exact Gaussian elimination over Q for the tiny Cartan systems (rank <=
/// 8). Returns reduced fractions `(num, den)` with `den > 0`.
fn solve_rational(a: &[Vec<i64>], b: &[i64]) -> Option<Vec<(i128, i128)>> {
    fn gcd(mut a: i128, mut b: i128) -> i128 {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    #[derive(Clone, Copy)]
    struct Q(i128, i128);
    impl Q {
        fn norm(self) -> Q {
            let Q(mut n, mut d) = self;
            assert!(d != 0);
            if d < 0 {
                n = -n;
                d = -d;
            }
            let g = gcd(n, d).max(1);
            Q(n / g, d / g)
        }
        fn add(self, o: Q) -> Q {
            Q(self.0 * o.1 + o.0 * self.1, self.1 * o.1).norm()
        }
        fn mul(self, o: Q) -> Q {
            Q(self.0 * o.0, self.1 * o.1).norm()
        }
        fn sub(self, o: Q) -> Q {
            self.add(Q(-o.0, o.1))
        }
        fn div(self, o: Q) -> Q {
            assert!(o.0 != 0);
            self.mul(Q(o.1, o.0))
        }
        fn is_zero(self) -> bool {
            self.0 == 0
        }
    }

    let n = a.len();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = a[i].iter().map(|&x| Q(x as i128, 1)).collect();
            row.push(Q(b[i] as i128, 1));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let pv = m[col][col];
        for c in col..=n {
            m[col][c] = m[col][c].div(pv);
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                for c in col..=n {
                    m[r][c] = m[r][c].sub(f.mul(m[col][c]));
                }
            }
        }
    }
    Some((0..n).map(|i| (m[i][n].0, m[i][n].1)).collect())
}
