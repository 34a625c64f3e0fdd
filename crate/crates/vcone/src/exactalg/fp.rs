//! Scalar arithmetic in the prime field `F_p`.
//!
//! Scalars are canonical residues `0..p-1` stored as `u64`. All arithmetic
//! is exact; there are no tolerances anywhere in this crate. The modulus is
//! passed explicitly so that values of different characteristic cannot be
//! mixed silently (callers that own an algebra carry `p` with it).

/// Returns true if `p` is an odd prime. Trial division; every modulus in
/// scope is tiny (p <= 31 for the bundled data, a few hundred in tests).
pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[inline]
pub fn add(p: u64, a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(p: u64, a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn neg(p: u64, a: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub fn mul(p: u64, a: u64, b: u64) -> u64 {
    // p < 2^32 is enforced at algebra construction, so the product fits.
    a * b % p
}

pub fn pow(p: u64, mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(p, acc, base);
        }
        base = mul(p, base, base);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse via Fermat's little theorem. Panics on 0.
pub fn inv(p: u64, a: u64) -> u64 {
    assert!(a % p != 0, "division by zero in F_{p}");
    pow(p, a, p - 2)
}

/// Reduces a signed integer to its canonical residue.
#[inline]
pub fn reduce_i64(p: u64, v: i64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_odd_prime(3));
        assert!(is_odd_prime(31));
        assert!(!is_odd_prime(2));
        assert!(!is_odd_prime(9));
        assert!(!is_odd_prime(1));
    }

    #[test]
    fn field_ops() {
        let p = 7;
        assert_eq!(add(p, 5, 4), 2);
        assert_eq!(sub(p, 2, 5), 4);
        assert_eq!(neg(p, 0), 0);
        assert_eq!(mul(p, 3, 5), 1);
        for a in 1..p {
            assert_eq!(mul(p, a, inv(p, a)), 1);
        }
        assert_eq!(reduce_i64(p, -9), 5);
    }
}
