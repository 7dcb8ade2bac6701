//! Integer number theory helpers shared across modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

pub fn valuation_i128(mut x: i128, p: i128) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

/// Valuation of a rational number; `None` for zero.
pub fn valuation_rational(x: &BigRational, p: u64) -> Option<i64> {
    let num = valuation(x.numer(), p)? as i64;
    let den = valuation(x.denom(), p).unwrap_or(0) as i64;
    Some(num - den)
}

pub fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.mod_floor(m).extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Residue in `[0, modulus)` of a rational whose denominator is a unit mod `modulus`.
pub fn rational_residue(x: &BigRational, modulus: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(x.denom(), modulus)?;
    Some((x.numer() * inv).mod_floor(modulus))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = 41u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes up to and including `limit` (sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Prime factorisation of a nonzero integer by trial division, as (prime, exponent).
pub fn factorize(n: &BigInt) -> Vec<(u64, u32)> {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return out;
    }
    let mut d: u64 = 2;
    loop {
        let dd = BigInt::from(d);
        if &dd * &dd > m {
            break;
        }
        let mut e = 0;
        while (&m % &dd).is_zero() {
            m /= &dd;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() {
        out.push((m.to_u64().expect("prime factor exceeds u64"), 1));
    }
    out
}

/// Integer square root of a nonnegative integer.
pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Solutions of `c*y ≡ d (mod m)` as a residue class `y ≡ y0 (mod step)`, or `None`.
pub fn solve_linear_congruence(c: i128, d: i128, m: i128) -> Option<(i128, i128)> {
    debug_assert!(m > 0);
    let c = c.rem_euclid(m);
    let d = d.rem_euclid(m);
    let g = gcd_i128(c, m);
    if g == 0 {
        return if d == 0 { Some((0, 1)) } else { None };
    }
    if d % g != 0 {
        return None;
    }
    let step = m / g;
    if step == 1 {
        return Some((0, 1));
    }
    let inv = mod_inverse_i128(c / g, step)?;
    Some(((d / g).rem_euclid(step) * inv % step, step))
}

pub fn mod_inverse_i128(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

/// Intersection of two residue classes `y ≡ r1 (mod m1)` and `y ≡ r2 (mod m2)`.
pub fn intersect_classes(c1: (i128, i128), c2: (i128, i128)) -> Option<(i128, i128)> {
    let (r1, m1) = c1;
    let (r2, m2) = c2;
    let g = gcd_i128(m1, m2);
    if (r2 - r1) % g != 0 {
        return None;
    }
    let l = m1 / g * m2;
    // r1 + m1 * t ≡ r2 (mod m2)
    let (t0, _) = solve_linear_congruence(m1, r2 - r1, m2)?;
    Some(((r1 + m1 * t0).rem_euclid(l), l))
}

/// Number of integers in `[0, bound)` in the class `y ≡ r (mod m)`.
pub fn class_count_below(class: (i128, i128), bound: i128) -> i128 {
    let (r, m) = class;
    let r = r.rem_euclid(m);
    if r >= bound {
        0
    } else {
        (bound - 1 - r) / m + 1
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn congruence_solutions_enumerate_correctly() {
        for m in [1i128, 2, 4, 8, 9, 27, 25] {
            for c in -10..10 {
                for d in -10..10 {
                    let brute: Vec<i128> = (0..m).filter(|y| (c * y - d).rem_euclid(m) == 0).collect();
                    match solve_linear_congruence(c, d, m) {
                        None => assert!(brute.is_empty(), "c={c} d={d} m={m}"),
                        Some(cls) => {
                            let got: Vec<i128> = (0..m).filter(|y| (y - cls.0).rem_euclid(cls.1) == 0).collect();
                            assert_eq!(got, brute, "c={c} d={d} m={m}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn class_intersection_matches_scan() {
        for m1 in [1i128, 2, 4, 3, 9] {
            for m2 in [1i128, 2, 8, 3] {
                for r1 in 0..m1 {
                    for r2 in 0..m2 {
                        let brute: Vec<i128> = (0..72).filter(|y| y % m1 == r1 && y % m2 == r2).collect();
                        match intersect_classes((r1, m1), (r2, m2)) {
                            None => assert!(brute.is_empty()),
                            Some(c) => {
                                let got: Vec<i128> = (0..72).filter(|y| (y - c.0).rem_euclid(c.1) == 0).collect();
                                assert_eq!(got, brute);
                                assert_eq!(class_count_below(c, 72) as usize, brute.len());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn factorization_round_trips() {
        let n = BigInt::from(-2i64 * 2 * 3 * 3 * 3 * 101);
        assert_eq!(factorize(&n), vec![(2, 2), (3, 3), (101, 1)]);
        assert_eq!(valuation(&n, 3), Some(3));
        assert_eq!(valuation(&BigInt::zero(), 3), None);
    }

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001));
    }
}
