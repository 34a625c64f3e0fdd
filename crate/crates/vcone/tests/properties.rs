//! Property suites for the exact-arithmetic layer: polynomial ring laws,
//! substitution as a ring homomorphism, rank double-checks under random
//! change of basis, and the linear-constraint postcondition.

use proptest::prelude::*;
use vcone::exactalg::{fp, linear_constraints, LinearOutcome, MatrixFp, PolyFp};

const P: u64 = 5;

fn arb_poly() -> impl Strategy<Value = PolyFp> {
    // up to 6 terms in 4 variables with exponents <= 2
    prop::collection::vec(
        (
            prop::collection::vec(0u32..3, 4),
            1u64..P,
        ),
        0..6,
    )
    .prop_map(|terms| {
        let mut f = PolyFp::zero(P);
        for (exps, c) in terms {
            let mut t = PolyFp::constant(P, c);
            for (v, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&PolyFp::var(P, v));
                }
            }
            f = f.add(&t);
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn poly_distributivity(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        let lhs = a.add(&b).mul(&c);
        let rhs = a.mul(&c).add(&b.mul(&c));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn poly_mul_commutes_and_associates(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(
        a in arb_poly(),
        b in arb_poly(),
        r in arb_poly(),
        var in 0usize..4,
    ) {
        // r must not mention the substituted variable
        let r = r.substitute(var, &PolyFp::constant(P, 1));
        let sub = |f: &PolyFp| f.substitute(var, &r);
        prop_assert_eq!(sub(&a.add(&b)), sub(&a).add(&sub(&b)));
        prop_assert_eq!(sub(&a.mul(&b)), sub(&a).mul(&sub(&b)));
    }

    #[test]
    fn substitution_commutes_with_evaluation(
        a in arb_poly(),
        r in arb_poly(),
        var in 0usize..4,
        point in prop::collection::vec(0u64..P, 4),
    ) {
        let r = r.substitute(var, &PolyFp::constant(P, 1));
        let mut full = vec![0u64; 32];
        full[..4].copy_from_slice(&point);
        let mut moved = full.clone();
        moved[var] = r.eval(&full);
        prop_assert_eq!(a.substitute(var, &r).eval(&full), a.eval(&moved));
    }

    #[test]
    fn linear_constraints_postcondition(
        rows in prop::collection::vec(
            (prop::collection::vec(0u64..P, 5), 0u64..P),
            0..5,
        )
    ) {
        // random affine forms sum(c_i x_i) + k; when consistent, the
        // returned substitution zeroes every input identically
        let eqs: Vec<PolyFp> = rows
            .iter()
            .map(|(coeffs, k)| {
                let mut f = PolyFp::constant(P, *k);
                for (v, &c) in coeffs.iter().enumerate() {
                    f = f.add(&PolyFp::var(P, v).scale(c));
                }
                f
            })
            .collect();
        if let LinearOutcome::Consistent { assignments } = linear_constraints(P, &eqs) {
            for eq in &eqs {
                prop_assert!(eq.substitute_map(&assignments).is_zero());
            }
        }
    }
}

/// Elimination rank agrees with the rank after a random invertible change
/// of basis on both sides, and with the transpose, on 100+ matrices per
/// size class.
#[test]
fn rank_random_projection_double_check() {
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = move || {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        state.wrapping_mul(0x2545F4914F6CDD1D)
    };
    for n in 1..=8usize {
        for _ in 0..120 {
            let p = 7;
            let mut m = MatrixFp::zeros(p, n, n);
            for r in 0..n {
                for c in 0..n {
                    m.set(r, c, next() % p);
                }
            }
            let r = m.rank();
            assert_eq!(r, m.transpose().rank());
            // random invertible P, Q: product of unit-diagonal triangular
            // matrices with a permutation
            let mut lower = MatrixFp::identity(p, n);
            let mut upper = MatrixFp::identity(p, n);
            for i in 0..n {
                for j in 0..i {
                    lower.set(i, j, next() % p);
                    upper.set(j, i, next() % p);
                }
            }
            let projected = lower.mul(&m).mul(&upper);
            assert_eq!(projected.rank(), r, "n={n}");
        }
    }
}

/// Exact scalar arithmetic is a field for several odd primes.
#[test]
fn fp_field_axioms_spotcheck() {
    for p in [3u64, 5, 7, 11, 13] {
        for a in 1..p {
            assert_eq!(fp::mul(p, a, fp::inv(p, a)), 1);
            assert_eq!(fp::add(p, a, fp::neg(p, a)), 0);
        }
    }
}
