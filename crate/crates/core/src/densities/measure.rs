//! Finite-precision check of the change-of-variables identity at `n = 1`: integrating
//! local orbit counts over binary cubics equals `ξ ∫ |λ|` over `W₃⁰(Z_p)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::{ser_rational, xi};
use crate::reduction::local::count_cubic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeasureMode {
    Exhaustive,
    Sampling { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureRow {
    pub e: u32,
    /// `Σ_{f mod p^{2e}} #orbits_e(f) · p^{−8e}`.
    #[serde(serialize_with = "ser_rational")]
    pub lhs: BigRational,
    /// `p^{−3e}(p^{e+1} − 1)/(p − 1)`.
    #[serde(serialize_with = "ser_rational")]
    pub closed_form: BigRational,
    /// `ξ p^{−e} vol{ν(λ) = e}`, exact in exhaustive mode.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt")]
    pub rhs_exact: Option<BigRational>,
    pub rhs_estimate: f64,
    pub rhs_sigma: f64,
    pub agrees: bool,
}

fn ser_opt<S: serde::Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_rational(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub p: u64,
    pub k: u32,
    pub mode: MeasureMode,
    pub cells: u64,
    pub rows: Vec<MeasureRow>,
    /// `ξ p^{−k} vol{λ ≡ 0 mod p^k}`, an upper bound for the right side on boundary cells.
    #[serde(serialize_with = "ser_rational")]
    pub boundary_bound: BigRational,
    /// `Σ_{e ≥ k}` of the closed form, the left side's share beyond precision `k`.
    #[serde(serialize_with = "ser_rational")]
    pub lhs_tail: BigRational,
    pub passed: bool,
}

/// Closed form for the `e`-th term.
pub fn per_e_closed_form(p: u64, e: u32) -> BigRational {
    let pb = BigInt::from(p);
    BigRational::new(pb.pow(e + 1) - 1u32, pb.pow(3 * e) * (&pb - 1u32))
}

/// `Σ_{e ≥ start}` of [`per_e_closed_form`].
pub fn closed_form_tail(p: u64, start: u32) -> BigRational {
    let pq = BigRational::from_integer(p.into());
    let one = BigRational::from_integer(1.into());
    let r2 = (&pq * &pq).recip();
    let r3 = num_traits::pow(pq.clone(), 3).recip();
    // p·Σ p^{−2e} − Σ p^{−3e}, over p − 1
    let a = &pq * num_traits::pow(r2.clone(), start as usize) / (&one - &r2);
    let b = num_traits::pow(r3.clone(), start as usize) / (&one - &r3);
    (a - b) / (pq - one)
}

/// Exact left side for one `e`, enumerating cubics modulo `p^{2e}`.
pub fn lhs_exact(p: u64, e: u32) -> BigRational {
    let q = p.pow(2 * e) as i128;
    let mut total = 0u64;
    for f0 in 0..q {
        for f1 in 0..q {
            for f2 in 0..q {
                for f3 in 0..q {
                    total += count_cubic(&[f0, f1, f2, f3], p, e, false).0;
                }
            }
        }
    }
    BigRational::new(total.into(), BigInt::from(p).pow(8 * e))
}

fn lambda_valuation(digits: &[u64; 10], p: u64, k: u32) -> Option<u32> {
    // W⁰ coordinates (A₁₂, A₁₃, A₂₂, A₂₃, A₃₃, B₁₂, …); λ = A₁₃B₁₂ − A₁₂B₁₃
    let q = p.pow(k) as i128;
    let mut lam = (digits[1] as i128 * digits[5] as i128 - digits[0] as i128 * digits[6] as i128).rem_euclid(q);
    if lam == 0 {
        return None;
    }
    let mut v = 0;
    while lam % p as i128 == 0 {
        lam /= p as i128;
        v += 1;
    }
    Some(v)
}

/// Histogram of `ν(λ)` over cells of `W₃⁰(Z/p^k)`; the last slot counts `λ ≡ 0`.
fn histogram(p: u64, k: u32, mode: MeasureMode) -> (Vec<u64>, u64) {
    let q = p.pow(k);
    let mut hist = vec![0u64; k as usize + 1];
    let mut digits = [0u64; 10];
    let mut bump = |digits: &[u64; 10]| match lambda_valuation(digits, p, k) {
        Some(v) => hist[v as usize] += 1,
        None => hist[k as usize] += 1,
    };
    let cells = match mode {
        MeasureMode::Exhaustive => {
            let total = q.pow(10);
            for _ in 0..total {
                bump(&digits);
                for d in digits.iter_mut() {
                    *d += 1;
                    if *d < q {
                        break;
                    }
                    *d = 0;
                }
            }
            total
        }
        MeasureMode::Sampling { samples, seed } => {
            let mut rng = StdRng::seed_from_u64(seed);
            for _ in 0..samples {
                for d in digits.iter_mut() {
                    *d = rng.gen_range(0..q);
                }
                bump(&digits);
            }
            samples
        }
    };
    (hist, cells)
}

/// Compares both sides for `e < k`; exhaustive mode needs equality, sampling mode 3σ.
pub fn verify_change_of_variables(p: u64, k: u32, mode: MeasureMode) -> MeasureReport {
    assert!(k >= 1);
    let (hist, cells) = histogram(p, k, mode);
    let xi = xi(p, 1);
    let pb = BigInt::from(p);
    let mut rows = Vec::new();
    let mut passed = true;
    for e in 0..k {
        let lhs = lhs_exact(p, e);
        let closed_form = per_e_closed_form(p, e);
        let freq = BigRational::new(hist[e as usize].into(), cells.into());
        let weight = &xi / BigRational::from_integer(pb.pow(e));
        let rhs = &weight * &freq;
        let rhs_estimate = rhs.to_f64().unwrap_or(f64::NAN);
        let (rhs_exact, rhs_sigma, agrees) = match mode {
            MeasureMode::Exhaustive => {
                let ok = rhs == lhs && lhs == closed_form;
                (Some(rhs), 0.0, ok)
            }
            MeasureMode::Sampling { .. } => {
                let fr = freq.to_f64().unwrap_or(f64::NAN);
                let sigma = weight.to_f64().unwrap_or(f64::NAN) * (fr * (1.0 - fr) / cells as f64).sqrt();
                let target = lhs.to_f64().unwrap_or(f64::NAN);
                let ok = lhs == closed_form && (rhs_estimate - target).abs() <= 3.0 * sigma.max(1e-12);
                (None, sigma, ok)
            }
        };
        passed &= agrees;
        rows.push(MeasureRow { e, lhs, closed_form, rhs_exact, rhs_estimate, rhs_sigma, agrees });
    }
    let boundary_bound = &xi * BigRational::new(hist[k as usize].into(), BigInt::from(cells) * pb.pow(k));
    let lhs_tail = closed_form_tail(p, k);
    if matches!(mode, MeasureMode::Exhaustive) {
        passed &= lhs_tail <= boundary_bound && !lhs_tail.is_zero();
    }
    MeasureReport { p, k, mode, cells, rows, boundary_bound, lhs_tail, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_tail_sums_to_full_mass() {
        for p in [2u64, 3, 5] {
            assert_eq!(closed_form_tail(p, 0), super::super::full_local_mass(p, 1));
            let head: BigRational = (0..3).map(|e| per_e_closed_form(p, e)).sum();
            assert_eq!(head + closed_form_tail(p, 3), closed_form_tail(p, 0));
        }
    }

    #[test]
    fn exhaustive_p2_k1() {
        let r = verify_change_of_variables(2, 1, MeasureMode::Exhaustive);
        assert!(r.passed, "{r:?}");
    }
}
