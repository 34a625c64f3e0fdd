//! sl2-triples: verification, completion from `(e, h)`, restrictedness,
//! the rank-of-ad^(p-1) partial order, and the p-dimensional module
//! realising a non-completely-reducible triple.

use crate::chevalley::{ChevalleyAlgebra, LieElement};
use crate::exactalg::{fp, MatrixFp};
use crate::Error;
use serde::{Deserialize, Serialize};

/// `(e, h, f)` with `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
#[derive(Clone, Debug)]
pub struct Sl2Triple {
    pub e: LieElement,
    pub h: LieElement,
    pub f: LieElement,
}

/// Integer weights on the simple roots determining a toral element
/// `h = sum c_i h_i` through the inverse Cartan matrix. For good
/// characteristic this is the differential of a cocharacter acting on `e`
/// with weight 2; in bad characteristic it simply records the toral `h` of
/// the triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauData {
    pub weights: Vec<i64>,
    pub source_label: String,
}

impl TauData {
    /// The Cartan element determined by the weights, reduced mod p.
    pub fn cartan_element(&self, alg: &ChevalleyAlgebra) -> Result<LieElement, Error> {
        let coeffs = alg.rs.inverse_cartan_combine(&self.weights, alg.p)?;
        Ok(alg.cartan_element(&coeffs))
    }
}

/// Checks the three defining relations. `(0,0,0)` passes (degenerate
/// homomorphic image).
pub fn verify_triple(alg: &ChevalleyAlgebra, t: &Sl2Triple) -> bool {
    let two_e = alg.scale(&t.e, 2);
    let minus_two_f = alg.scale(&t.f, alg.p - 2);
    alg.bracket(&t.h, &t.e).map(|v| v == two_e).unwrap_or(false)
        && alg
            .bracket(&t.h, &t.f)
            .map(|v| v == minus_two_f)
            .unwrap_or(false)
        && alg.bracket(&t.e, &t.f).map(|v| v == t.h).unwrap_or(false)
}

/// Completes `(e, h)` with `[h,e] = 2e` to a triple by solving the exact
/// affine system `f in ker(ad h + 2I)`, `[e, f] = h`. Returns the solution
/// with all free coordinates zero, or `None` when the system is
/// inconsistent (no triple through this pair).
pub fn complete_triple(
    alg: &ChevalleyAlgebra,
    e: &LieElement,
    h: &LieElement,
) -> Result<Option<Sl2Triple>, Error> {
    let he = alg.bracket(h, e)?;
    if he != alg.scale(e, 2) {
        return Err(Error::InconsistentSystem(
            "[h,e] != 2e: not a candidate pair".into(),
        ));
    }
    let p = alg.p;
    let dim = alg.dim();
    // Stack ad(h) + 2I (kernel condition) over ad(e) (bracket condition).
    let adh = alg.ad_matrix(h);
    let ade = alg.ad_matrix(e);
    let mut m = MatrixFp::zeros(p, 2 * dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let mut v = adh.get(r, c);
            if r == c {
                v = fp::add(p, v, 2 % p);
            }
            m.set(r, c, v);
            // [e, f] = h  <=>  ad(e) f = h
            m.set(dim + r, c, ade.get(r, c));
        }
    }
    let mut rhs = vec![0u64; 2 * dim];
    rhs[dim..].copy_from_slice(&h.coeffs);
    Ok(m.solve(&rhs).map(|f| Sl2Triple {
        e: e.clone(),
        h: h.clone(),
        f: LieElement { coeffs: f },
    }))
}

/// `ad(x)^p = 0`. For the nilpotent elements in scope this is equivalent
/// to vanishing of the p-power map: the p-th power of a nilpotent element
/// is central, and the centre of these algebras (trivial except for A-type
/// with p | rank+1 and E6/E7 at their torsion primes, where it is toral)
/// contains no nonzero nilpotents.
pub fn is_restricted(alg: &ChevalleyAlgebra, x: &LieElement) -> bool {
    alg.ad_matrix(x).pow(alg.p).is_zero()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RankOrder {
    Lower,
    Equal,
    Higher,
}

impl std::fmt::Display for RankOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RankOrder::Lower => "<",
            RankOrder::Equal => "=",
            RankOrder::Higher => ">",
        };
        write!(f, "{s}")
    }
}

/// `rank(ad(x)^(p-1))` — the invariant behind the partial order.
pub fn ad_power_rank(alg: &ChevalleyAlgebra, x: &LieElement) -> usize {
    alg.ad_matrix(x).pow(alg.p - 1).rank()
}

/// Compares two elements in the rank-of-ad^(p-1) order, returning the
/// comparison together with the two ranks.
pub fn compare_rank_order(
    alg: &ChevalleyAlgebra,
    x: &LieElement,
    y: &LieElement,
) -> (RankOrder, usize, usize) {
    let rx = ad_power_rank(alg, x);
    let ry = ad_power_rank(alg, y);
    let ord = match rx.cmp(&ry) {
        std::cmp::Ordering::Less => RankOrder::Lower,
        std::cmp::Ordering::Equal => RankOrder::Equal,
        std::cmp::Ordering::Greater => RankOrder::Higher,
    };
    (ord, rx, ry)
}

/// The p-dimensional highest-weight-zero module for sl2 as a matrix triple
/// `(E, H, F)` over `F_p`, in the basis `v_0..v_{p-1}`:
/// `H v_i = -2i v_i`, `F v_i = v_{i+1}` (one full Jordan block), and
/// `E v_i = i(1-i) v_{i-1}`. The module is a non-split extension of the
/// (p-1)-dimensional simple by the trivial module.
pub fn baby_verma_triple(p: u64) -> Result<(MatrixFp, MatrixFp, MatrixFp), Error> {
    if !fp::is_odd_prime(p) {
        return Err(Error::BadPrime(format!("{p} is not an odd prime")));
    }
    let n = p as usize;
    let mut e = MatrixFp::zeros(p, n, n);
    let mut h = MatrixFp::zeros(p, n, n);
    let mut f = MatrixFp::zeros(p, n, n);
    for i in 0..n {
        h.set(i, i, fp::reduce_i64(p, -2 * i as i64));
        if i + 1 < n {
            f.set(i + 1, i, 1);
        }
        if i > 0 {
            let c = fp::reduce_i64(p, (i as i64) * (1 - i as i64));
            e.set(i - 1, i, c);
        }
    }
    Ok((e, h, f))
}
