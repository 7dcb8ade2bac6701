//! Euler products with directed-rounding interval enclosures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{full_local_mass, projective_local_mass};
use crate::algebra::intmath::primes_up_to;

#[derive(Debug, Error, PartialEq)]
pub enum EulerError {
    #[error("local factors of {0} are not 1 + O(p^-2); the product diverges")]
    Divergent(String),
    #[error("cutoff {cutoff} is below the minimum {minimum} needed for the tail bound")]
    CutoffTooSmall { cutoff: u64, minimum: u64 },
}

/// Closed interval `[lo, hi]` of doubles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Encloses an exact rational, widened by one ulp each way.
    pub fn from_rational(x: &BigRational) -> Self {
        let v = x.to_f64().expect("finite");
        match BigRational::from_float(v) {
            Some(exact) if &exact == x => Interval::point(v),
            _ => Interval { lo: v.next_down(), hi: v.next_up() },
        }
    }

    /// Product of two intervals with nonnegative endpoints.
    pub fn mul_pos(self, other: Interval) -> Self {
        debug_assert!(self.lo >= 0.0 && other.lo >= 0.0);
        Interval { lo: round_product(self.lo, other.lo, false), hi: round_product(self.hi, other.hi, true) }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_within(&self, outer: &Interval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    pub fn lo_rational(&self) -> BigRational {
        BigRational::from_float(self.lo).expect("finite")
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::from_float(self.hi).expect("finite")
    }
}

/// `x·y` rounded toward `+∞` when `up`, else toward `−∞`, using the exact fma residual.
fn round_product(x: f64, y: f64, up: bool) -> f64 {
    let prod = x * y;
    let residual = x.mul_add(y, -prod);
    match (up, residual.partial_cmp(&0.0)) {
        (true, Some(std::cmp::Ordering::Greater)) => prod.next_up(),
        (false, Some(std::cmp::Ordering::Less)) => prod.next_down(),
        _ => prod,
    }
}

/// A family of local factors `p ↦ F(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EulerFamily {
    /// [`full_local_mass`] at the given `n`; the product is `∏_{i=2}^{2n+1} ζ(i)`.
    Full { n: usize },
    /// [`projective_local_mass`]; the product is `ζ(2)/ζ(4)`.
    Projective,
    /// `(1 − p^{−s})^{−1}`; the product is `ζ(s)`.
    Zeta { s: u32 },
    Trivial,
}

impl EulerFamily {
    pub fn name(&self) -> String {
        match self {
            EulerFamily::Full { n } => format!("full(n={n})"),
            EulerFamily::Projective => "projective".into(),
            EulerFamily::Zeta { s } => format!("zeta({s})"),
            EulerFamily::Trivial => "trivial".into(),
        }
    }

    pub fn local_factor(&self, p: u64) -> BigRational {
        match *self {
            EulerFamily::Full { n } => full_local_mass(p, n),
            EulerFamily::Projective => projective_local_mass(p),
            EulerFamily::Zeta { s } => {
                (BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(p).pow(s))).recip()
            }
            EulerFamily::Trivial => BigRational::one(),
        }
    }

    /// `(c, P₀)` with `1 ≤ F(p) ≤ (1 − p⁻²)^{−c}` for every prime `p > P₀`.
    fn tail_exponent(&self) -> Result<(f64, u64), EulerError> {
        match *self {
            // ln ∏_{i≥3}(1−p^{−i})^{−1} ≤ p^{−2}/((p−1)(1−p^{−3})) ≤ 0.04·p^{−2} once p ≥ 29
            EulerFamily::Full { .. } => Ok((1.04, 28)),
            // 1 + p⁻² ≤ (1 − p⁻²)⁻¹
            EulerFamily::Projective => Ok((1.0, 5)),
            EulerFamily::Zeta { s } if s >= 2 => Ok((1.0, 5)),
            EulerFamily::Zeta { .. } => Err(EulerError::Divergent(self.name())),
            EulerFamily::Trivial => Ok((0.0, 0)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerProduct {
    pub family: EulerFamily,
    pub cutoff: u64,
    pub primes: usize,
    /// Enclosure of `∏_{p ≤ P} F(p)`.
    pub partial: Interval,
    /// Enclosure of `∏_{p > P} F(p)`.
    pub tail: Interval,
    pub value: Interval,
}

/// Upper bound for `Σ_{p > P} p⁻²` given `π(P)`. Partial summation gives
/// `−π(P)/P² + 2∫_P^∞ π(t) t⁻³ dt`, and `π(t) ≤ (t/ln t)(1 + 1.2762/ln t)` (Dusart) bounds the integral
/// by `(2/ln P + 2.5524/ln² P)/P`.
fn inverse_square_tail(cutoff: u64, prime_count: usize) -> f64 {
    let x = cutoff as f64;
    let ln = x.ln().next_down();
    let integral = ((2.0 / ln).next_up() + (2.5524 / (ln * ln).next_down()).next_up()).next_up() / x;
    let counted = (prime_count as f64 / (x * x).next_up()).next_down();
    (integral.next_up() - counted).next_up().max(0.0)
}

/// Encloses `∏_p F(p)` by exact factors up to `cutoff` and a tail bound beyond it.
pub fn euler_product(family: EulerFamily, cutoff: u64) -> Result<EulerProduct, EulerError> {
    let (c, minimum) = family.tail_exponent()?;
    if cutoff < minimum {
        return Err(EulerError::CutoffTooSmall { cutoff, minimum });
    }
    let primes = primes_up_to(cutoff);
    let factors: Vec<Interval> = primes.par_iter().map(|&p| Interval::from_rational(&family.local_factor(p))).collect();
    let partial = factors.iter().fold(Interval::point(1.0), |acc, &f| acc.mul_pos(f));
    let tail = if c == 0.0 {
        Interval::point(1.0)
    } else {
        // −ln(1 − p⁻²) ≤ κ p⁻² for p ≥ 7
        let kappa = (49.0f64 / 48.0).next_up();
        let exponent = ((c * kappa).next_up() * inverse_square_tail(cutoff, primes.len())).next_up();
        Interval { lo: 1.0, hi: exponent.next_up().exp().next_up().next_up() }
    };
    Ok(EulerProduct { family, cutoff, primes: primes.len(), partial, value: partial.mul_pos(tail), tail })
}
