//! Exact local densities, brute-force oracles for them, and Euler products.

pub mod euler;
pub mod measure;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::pencil_det;
use crate::algebra::Matrix;
use crate::reduction::local::projective_mod_p_n1;

pub use euler::{euler_product, EulerFamily, EulerProduct, Interval};
pub use measure::{verify_change_of_variables, MeasureReport};

fn q(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn inv_power(p: u64, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(e))
}

/// `1 − p^{−i}`.
fn one_minus(p: u64, i: u32) -> BigRational {
    BigRational::one() - inv_power(p, i)
}

/// An exact local quantity with a label naming the formula.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalDensity {
    pub p: u64,
    pub n: usize,
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    pub description: &'static str,
}

pub fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `(1 − p⁻¹)(1 − p^{−n−1}) ∏_{i=2}^{n} (1 − p^{−i})²`.
pub fn vol_gn(p: u64, n: usize) -> BigRational {
    let mut v = one_minus(p, 1) * one_minus(p, n as u32 + 1);
    for i in 2..=n as u32 {
        let t = one_minus(p, i);
        v = v * &t * &t;
    }
    v
}

/// Reciprocal of [`vol_gn`].
pub fn xi(p: u64, n: usize) -> BigRational {
    vol_gn(p, n).recip()
}

/// `(1 − p^{−n−1}) ∏_{i=2}^{n} (1 − p^{−i})²`.
pub fn vol_sl_sl(p: u64, n: usize) -> BigRational {
    vol_gn(p, n) / one_minus(p, 1)
}

/// Closed forms `(c″(k), c′(k), c(k))` for 2×2 matrices over `Z/p^k`: determinant zero;
/// determinant of valuation exactly `k−1`; the latter with `M ≢ 0 mod p`.
pub fn count_cpp(p: u64, k: u32) -> (BigInt, BigInt, BigInt) {
    let pb = BigInt::from(p);
    let c2 = |k: u32| pb.pow(2 * k - 1) * (pb.pow(k) * (&pb + 1u32) - 1u32);
    let c1 = |k: u32| pb.pow(2 * k - 1) * (&pb * &pb - 1u32) * (pb.pow(k) - 1u32);
    let c = if k <= 2 { c1(k) } else { c1(k) - pb.pow(4) * c1(k - 2) };
    (c2(k), c1(k), c)
}

/// Brute-force version of [`count_cpp`], scanning all `p^{4k}` matrices.
pub fn brute_matrix_counts(p: u64, k: u32) -> (u64, u64, u64) {
    let q = p.pow(k);
    let near = p.pow(k - 1);
    let (mut c2, mut c1, mut c) = (0, 0, 0);
    for a in 0..q {
        for b in 0..q {
            for cc in 0..q {
                for d in 0..q {
                    let det = ((a * d) as i128 - (b * cc) as i128).rem_euclid(q as i128) as u64;
                    if det == 0 {
                        c2 += 1;
                    } else if det % near == 0 {
                        c1 += 1;
                        if [a, b, cc, d].iter().any(|x| x % p != 0) {
                            c += 1;
                        }
                    }
                }
            }
        }
    }
    (c2, c1, c)
}

/// Closed form for the number of projective pairs in `W₃⁰(F_p)` with prescribed
/// `(A₁₂, A₁₃, B₁₂, B₁₃) = (a, b, c, d)`.
pub fn s_mass(p: u64, a: u64, b: u64, c: u64, d: u64) -> u64 {
    let det = ((a * d) as i128 - (b * c) as i128).rem_euclid(p as i128);
    if det != 0 {
        p.pow(6)
    } else if [a, b, c, d].iter().all(|x| x % p == 0) {
        0
    } else {
        p.pow(5) * (p - 1)
    }
}

/// Exhaustive scan of `W₃⁰(F_p)`: projective counts keyed by `(A₁₂, A₁₃, B₁₂, B₁₃)`.
pub fn brute_s_masses(p: u64) -> BTreeMap<[u64; 4], u64> {
    let pi = p as i64;
    let mut out = BTreeMap::new();
    let mut digits = [0i64; 10];
    let total = p.pow(10);
    for _ in 0..total {
        let [a12, a13, a22, a23, a33, b12, b13, b22, b23, b33] = digits;
        let am = [[0, a12, a13], [a12, a22, a23], [a13, a23, a33]];
        let bm = [[0, b12, b13], [b12, b22, b23], [b13, b23, b33]];
        let key = [a12 as u64, a13 as u64, b12 as u64, b13 as u64];
        let f = inv_small(&am, &bm);
        let proj = projective_mod_p_n1(&to128(&am), &to128(&bm), f[1] as i128, f[2] as i128, pi as i128);
        *out.entry(key).or_insert(0) += u64::from(proj);
        for d in digits.iter_mut() {
            *d += 1;
            if *d < pi {
                break;
            }
            *d = 0;
        }
    }
    out
}

fn to128(m: &[[i64; 3]; 3]) -> [[i128; 3]; 3] {
    m.map(|r| r.map(|x| x as i128))
}

/// `inv` of a small ternary pair.
pub fn inv_small(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [i64; 4] {
    let am = Matrix::from_rows(a.iter().map(|r| r.to_vec()).collect()).expect("3x3");
    let bm = Matrix::from_rows(b.iter().map(|r| r.to_vec()).collect()).expect("3x3");
    let c = pencil_det(&am, &bm).expect("square");
    [-c[0], -c[1], -c[2], -c[3]]
}

/// Sums `Σ_k coef · base^k` symbolically.
#[derive(Clone, Debug, Default)]
struct ExpSum(Vec<(BigRational, BigRational)>);

impl ExpSum {
    fn term(coef: BigRational, base: BigRational) -> Self {
        ExpSum(vec![(coef, base)])
    }
    fn add(mut self, other: ExpSum) -> Self {
        self.0.extend(other.0);
        self
    }
    fn scale(self, c: &BigRational) -> Self {
        ExpSum(self.0.into_iter().map(|(a, r)| (a * c, r)).collect())
    }
    /// Multiply every summand by `r^k`.
    fn twist(self, r: &BigRational) -> Self {
        ExpSum(self.0.into_iter().map(|(a, b)| (a, b * r)).collect())
    }
    /// Replace `k` by `k − s`.
    fn shift(self, s: u32) -> Self {
        ExpSum(self.0.into_iter().map(|(a, b)| (a / num_traits::pow(b.clone(), s as usize), b)).collect())
    }
    #[cfg(test)]
    fn eval(&self, k: u32) -> BigRational {
        self.0.iter().map(|(a, b)| a * num_traits::pow(b.clone(), k as usize)).sum()
    }
    /// `Σ_{k ≥ start}`, requiring every base to be below 1 in absolute value.
    fn sum_from(&self, start: u32) -> BigRational {
        self.0
            .iter()
            .map(|(a, b)| {
                assert!(b < &BigRational::one(), "divergent geometric series");
                a * num_traits::pow(b.clone(), start as usize) / (BigRational::one() - b)
            })
            .sum()
    }
}

/// `c′(k)` as an exponential sum in `k`.
fn c_prime_series(p: u64) -> ExpSum {
    let pq = q(p as i64);
    let lead = (&pq * &pq - q(1)) / &pq;
    ExpSum::term(lead.clone(), num_traits::pow(pq.clone(), 3)).add(ExpSum::term(-lead, &pq * &pq))
}

/// Mass of the `k`-th projective slice: `p^{1−5k} c(1)` for `k = 1`, else `p^{1−5k}(1 − p⁻¹) c(k)`.
pub fn projective_slice_mass(p: u64, k: u32) -> BigRational {
    let (_, _, c) = count_cpp(p, k);
    let scale = BigRational::new(BigInt::from(p), BigInt::from(p).pow(5 * k));
    let c = BigRational::from_integer(c);
    if k == 1 {
        scale * c
    } else {
        scale * one_minus(p, 1) * c
    }
}

/// `ξ · Σ_k` (projective slice masses), with the tail `k ≥ 3` summed as geometric series.
pub fn projective_local_mass(p: u64) -> BigRational {
    let pq = q(p as i64);
    let five = num_traits::pow(pq.clone(), 5).recip();
    let cp = c_prime_series(p);
    // c(k) = c′(k) − p⁴ c′(k−2) for k ≥ 3
    let ck = cp.clone().add(cp.shift(2).scale(&-num_traits::pow(pq.clone(), 4)));
    let tail = ck.twist(&five).scale(&(&pq * one_minus(p, 1))).sum_from(3);
    let head = projective_slice_mass(p, 1) + projective_slice_mass(p, 2);
    (head + tail) * xi(p, 1)
}

/// Slice mass `Vol(G_N) ∏ p^{−(2n+3−2i)aᵢ} p^{−2i·bᵢ}` (1-based `i`).
pub fn slice_mass(p: u64, avec: &[u32], bvec: &[u32]) -> BigRational {
    let n = avec.len();
    let mut exp = 0u32;
    for i in 1..=n {
        exp += (2 * n as u32 + 3 - 2 * i as u32) * avec[i - 1] + 2 * i as u32 * bvec[i - 1];
    }
    vol_gn(p, n) * inv_power(p, exp)
}

/// `ξ · Σ_{a⃗,b⃗}` slice masses, each coordinate summed as a geometric series.
pub fn full_local_mass(p: u64, n: usize) -> BigRational {
    let mut total = vol_gn(p, n);
    for i in 1..=n as u32 {
        let ra = inv_power(p, 2 * n as u32 + 3 - 2 * i);
        let rb = inv_power(p, 2 * i);
        total = total * ExpSum::term(q(1), ra).sum_from(0) * ExpSum::term(q(1), rb).sum_from(0);
    }
    total * xi(p, n)
}

/// `∏_{i=2}^{2n+1} (1 − p^{−i})^{−1}`.
pub fn zeta_product_factor(p: u64, n: usize) -> BigRational {
    (2..=2 * n as u32 + 1).map(|i| one_minus(p, i).recip()).fold(BigRational::one(), |a, b| a * b)
}

/// `ξ · Σ` of slice masses with `Σ(aᵢ + bᵢ) ≤ depth`, and a rigorous bound on the remainder.
pub fn truncated_full_mass(p: u64, n: usize, depth: u32) -> (BigRational, BigRational) {
    let dims = 2 * n;
    let mut partial = BigRational::zero();
    let mut vec = vec![0u32; dims];
    fn rec(idx: usize, left: u32, p: u64, n: usize, vec: &mut Vec<u32>, acc: &mut BigRational) {
        if idx == vec.len() {
            *acc += slice_mass(p, &vec[..n], &vec[n..]);
            return;
        }
        for v in 0..=left {
            vec[idx] = v;
            rec(idx + 1, left - v, p, n, vec, acc);
        }
        vec[idx] = 0;
    }
    rec(0, depth, p, n, &mut vec, &mut partial);
    partial *= xi(p, n);
    // Each slice with Σ = T has ξ·mass ≤ p^{−2T}; there are C(T+2n−1, 2n−1) of them. Successive
    // bounds shrink by at most ρ = (depth+1+2n)/(depth+1)·p⁻², so the tail is a geometric series.
    let t0 = depth + 1;
    let m = dims as u32 - 1;
    let first = BigRational::from_integer(crate::algebra::intmath::binomial((t0 + m) as u64, m as u64)) * inv_power(p, 2 * t0);
    let rho = BigRational::new(BigInt::from(t0 + 1 + m), BigInt::from(t0 + 1)) * inv_power(p, 2);
    let bound = first / (BigRational::one() - rho);
    (partial, bound)
}

/// `vol(L_{a,b})` at `n = 1` by scanning the top entries mod `p^k`, where `a = min ν(A₁₂, A₁₃)`
/// and `a + b = ν(λ)`; complete for `a + b < k`. The closed form is
/// `Vol(G₃) p^{−2a−b}`.
pub fn brute_lambda_slice_volumes(p: u64, k: u32) -> BTreeMap<(u32, u32), BigRational> {
    let q = p.pow(k) as i64;
    let val = |x: i64| -> Option<u32> {
        if x.rem_euclid(q) == 0 {
            return None;
        }
        let mut x = x.rem_euclid(q);
        let mut v = 0;
        while x % p as i64 == 0 {
            x /= p as i64;
            v += 1;
        }
        Some(v)
    };
    let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for a12 in 0..q {
        for a13 in 0..q {
            let Some(a) = [val(a12), val(a13)].into_iter().flatten().min() else { continue };
            for b12 in 0..q {
                for b13 in 0..q {
                    let Some(e) = val(a13 * b12 - a12 * b13) else { continue };
                    *counts.entry((a, e - a)).or_insert(0) += 1;
                }
            }
        }
    }
    let cells = BigRational::from_integer(BigInt::from(q).pow(4));
    counts.into_iter().map(|(key, c)| (key, BigRational::from_integer(c.into()) / &cells)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn volumes() {
        assert_eq!(vol_gn(2, 1), r(3, 8));
        assert_eq!(vol_gn(3, 1), r(16, 27));
        assert_eq!(vol_sl_sl(2, 1), r(3, 4));
        assert_eq!(vol_gn(5, 2) * xi(5, 2), q(1));
    }

    #[test]
    fn matrix_counts_small() {
        let (c2, c1, c) = count_cpp(2, 1);
        assert_eq!((c2, c1, c), (10.into(), 6.into(), 6.into()));
        for (p, k) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
            let (a, b, c) = count_cpp(p, k);
            let brute = brute_matrix_counts(p, k);
            assert_eq!((a, b, c), (brute.0.into(), brute.1.into(), brute.2.into()), "p={p} k={k}");
        }
    }

    #[test]
    fn projective_mass_values() {
        assert_eq!(projective_local_mass(2), r(5, 4));
        assert_eq!(projective_local_mass(3), r(10, 9));
        assert_eq!(projective_slice_mass(2, 1) * xi(2, 1), q(1));
    }

    #[test]
    fn tail_series_matches_direct_slices() {
        let pq = q(3);
        let five = num_traits::pow(pq.clone(), 5).recip();
        let cp = c_prime_series(3);
        let ck = cp.clone().add(cp.shift(2).scale(&-num_traits::pow(pq.clone(), 4)));
        let series = ck.twist(&five).scale(&(&pq * one_minus(3, 1)));
        for k in 3..7 {
            assert_eq!(series.eval(k), projective_slice_mass(3, k));
        }
    }

    #[test]
    fn full_mass_values() {
        assert_eq!(full_local_mass(2, 1), r(32, 21));
        assert_eq!(full_local_mass(3, 2), zeta_product_factor(3, 2));
        let (partial, bound) = truncated_full_mass(2, 1, 6);
        let gap = full_local_mass(2, 1) - partial;
        assert!(gap > BigRational::zero() && gap <= bound);
    }

    #[test]
    fn lambda_slice_volumes_match_closed_form() {
        let vols = brute_lambda_slice_volumes(2, 3);
        assert_eq!(vols.len(), 6);
        for ((a, b), v) in vols {
            assert_eq!(v, vol_gn(2, 1) * inv_power(2, 2 * a + b), "a={a} b={b}");
        }
    }
}
