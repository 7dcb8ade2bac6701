//! Binary forms of odd degree: discriminant, height, signature, irreducibility, enumeration.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{sturm_real_roots, Matrix, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("degree must be odd and at least 3, got {0}")]
    BadDegree(usize),
    #[error("zero discriminant")]
    ZeroDiscriminant,
    #[error("cannot parse form: {0}")]
    Parse(String),
}

/// `f(x,y) = Σ f_i x^{N−i} y^i` with `N` odd.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

/// Outcome of the irreducibility test; `exact` is false when only a necessary filter ran.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Irreducibility {
    pub irreducible: bool,
    pub exact: bool,
}

/// Homogeneous polynomial of degree `len − 1`, entry `j` the `x^{deg−j} y^j` coefficient.
fn homog_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl BinaryForm {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, FormError> {
        let degree = coeffs.len().saturating_sub(1);
        if degree < 3 || degree % 2 == 0 {
            return Err(FormError::BadDegree(degree));
        }
        Ok(BinaryForm { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, FormError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `n` with degree `2n+1`.
    pub fn half_degree(&self) -> usize {
        self.degree() / 2
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let n = self.degree();
        let mut acc = BigInt::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c * num_traits::pow(x.clone(), n - i) * num_traits::pow(y.clone(), i);
        }
        acc
    }

    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// `f(ax + cy, bx + dy)` for `gamma = [[a, b], [c, d]]`.
    pub fn transform(&self, gamma: [[i64; 2]; 2]) -> BinaryForm {
        let n = self.degree();
        let u = [BigInt::from(gamma[0][0]), BigInt::from(gamma[1][0])];
        let v = [BigInt::from(gamma[0][1]), BigInt::from(gamma[1][1])];
        let mut u_pows = vec![vec![BigInt::one()]];
        let mut v_pows = vec![vec![BigInt::one()]];
        for k in 1..=n {
            u_pows.push(homog_mul(&u_pows[k - 1], &u));
            v_pows.push(homog_mul(&v_pows[k - 1], &v));
        }
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, t) in homog_mul(&u_pows[n - i], &v_pows[i]).into_iter().enumerate() {
                out[j] += c * t;
            }
        }
        BinaryForm { coeffs: out }
    }

    /// Discriminant, normalized so that a cubic gets `b²c² − 4ac³ − 4b³d − 27a²d² + 18abcd`.
    pub fn discriminant(&self) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        // Move to a nonzero leading coefficient with a unipotent substitution; disc is SL₂-invariant.
        let mut f = self.clone();
        let mut t = 1i64;
        while f.coeffs[0].is_zero() {
            f = self.transform([[1, t], [0, 1]]);
            t += 1;
        }
        let n = f.degree();
        let p = Poly::new(f.coeffs.iter().rev().cloned().collect());
        let dp = p.derivative();
        let res = resultant(&p, &dp, n, n - 1);
        let sign = if (n * (n - 1) / 2) % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        sign * res / &f.coeffs[0]
    }

    /// Number of real roots in P¹(R).
    pub fn signature(&self) -> Result<usize, FormError> {
        if self.discriminant().is_zero() {
            return Err(FormError::ZeroDiscriminant);
        }
        let p = Poly::new(self.coeffs.iter().rev().cloned().collect());
        let affine = sturm_real_roots(&p).map_err(|_| FormError::ZeroDiscriminant)?;
        Ok(affine + usize::from(self.coeffs[0].is_zero()))
    }

    /// A rational root `(x : y)` of the form, if one exists.
    pub fn rational_root(&self) -> Option<(BigInt, BigInt)> {
        let n = self.degree();
        if self.coeffs[0].is_zero() {
            return Some((BigInt::one(), BigInt::zero()));
        }
        if self.coeffs[n].is_zero() {
            return Some((BigInt::zero(), BigInt::one()));
        }
        let lead = divisors(&self.coeffs[0]);
        let tail = divisors(&self.coeffs[n]);
        for q in &lead {
            for p in &tail {
                if !p.gcd(q).is_one() {
                    continue;
                }
                for s in [p.clone(), -p.clone()] {
                    if self.eval(&s, q).is_zero() {
                        return Some((s, q.clone()));
                    }
                }
            }
        }
        None
    }

    pub fn is_irreducible(&self) -> Irreducibility {
        let filter = !self.discriminant().is_zero() && self.rational_root().is_none();
        Irreducibility { irreducible: filter, exact: self.degree() == 3 || !filter }
    }

    pub fn is_primitive(&self) -> bool {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c)).is_one()
    }
}

/// Positive divisors of a nonzero integer, by trial division.
fn divisors(x: &BigInt) -> Vec<BigInt> {
    let x = x.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= x {
        if (&x % &d).is_zero() {
            let q = &x / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Sylvester resultant of polynomials of formal degrees `m` and `k`.
fn resultant(p: &Poly<BigInt>, q: &Poly<BigInt>, m: usize, k: usize) -> BigInt {
    let size = m + k;
    let sylvester = Matrix::from_fn(size, size, |i, j| {
        if i < k {
            j.checked_sub(i).filter(|&d| d <= m).map(|d| p.coeff(m - d)).unwrap_or_default()
        } else {
            let r = i - k;
            j.checked_sub(r).filter(|&d| d <= k).map(|d| q.coeff(k - d)).unwrap_or_default()
        }
    });
    sylvester.det_bareiss().expect("square")
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for BinaryForm {
    type Err = FormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs = s
            .split(',')
            .map(|t| t.trim().parse::<BigInt>().map_err(|_| FormError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        BinaryForm::new(coeffs)
    }
}

/// Discriminant of a binary cubic by the classical closed form.
pub fn cubic_disc_i64(f: &[i64; 4]) -> i64 {
    let [a, b, c, d] = *f;
    b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d
}

/// Visits every coefficient vector with `1 ≤ max|f_i| ≤ X`, grouped by height and
/// lexicographic within each height, so a smaller bound yields a prefix.
pub fn for_each_graded(degree: usize, bound: i64, mut visit: impl FnMut(&[i64])) {
    let len = degree + 1;
    let mut v = vec![0i64; len];
    for h in 1..=bound {
        v.iter_mut().for_each(|x| *x = -h);
        loop {
            if v.iter().any(|x| x.abs() == h) {
                visit(&v);
            }
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if v[i] < h {
                    v[i] += 1;
                    break;
                }
                v[i] = -h;
            }
            if i == 0 && v.iter().all(|&x| x == -h) {
                break;
            }
        }
    }
}

/// Forms with height at most `bound`, nonzero discriminant, signature `r`, and optionally
/// passing the irreducibility filter.
pub fn enumerate_forms(degree: usize, bound: i64, signature: usize, require_irreducible: bool) -> Vec<BinaryForm> {
    let mut out = Vec::new();
    for_each_graded(degree, bound, |c| {
        let f = BinaryForm::from_i64(c).expect("odd degree");
        if f.discriminant().is_zero() {
            return;
        }
        if f.signature().ok() != Some(signature) {
            return;
        }
        if require_irreducible && !f.is_irreducible().irreducible {
            return;
        }
        out.push(f);
    });
    out
}

/// Irreducibility of an integral cubic over Q: nonzero disc and no rational root.
pub fn cubic_irreducible_i64(f: &[i64; 4], divisor_table: &[Vec<i64>]) -> bool {
    let [a, _, _, d] = *f;
    if a == 0 || d == 0 {
        return false;
    }
    for &q in &divisor_table[a.unsigned_abs() as usize] {
        for &p in &divisor_table[d.unsigned_abs() as usize] {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            for s in [p, -p] {
                let v = f[0] * s * s * s + f[1] * s * s * q + f[2] * s * q * q + f[3] * q * q * q;
                if v == 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Positive divisors of each integer in `0..=limit` (entry 0 unused).
pub fn divisor_table(limit: usize) -> Vec<Vec<i64>> {
    let mut table = vec![Vec::new(); limit + 1];
    for d in 1..=limit {
        for m in (d..=limit).step_by(d) {
            table[m].push(d as i64);
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(f(&[1, 0, 0, -2]).discriminant(), BigInt::from(-108));
        assert_eq!(f(&[1, 0, -3, -1]).discriminant(), BigInt::from(81));
        assert_eq!(f(&[1, 0, 0, 0]).discriminant(), BigInt::zero());
        assert_eq!(f(&[0, 1, 0, -1]).discriminant(), BigInt::from(cubic_disc_i64(&[0, 1, 0, -1])));
    }

    #[test]
    fn signature_and_height() {
        assert_eq!(f(&[1, 0, -3, -1]).signature().unwrap(), 3);
        assert_eq!(f(&[1, 0, 0, -2]).signature().unwrap(), 1);
        assert_eq!(f(&[1, 0, -1, 0]).signature().unwrap(), 3);
        assert_eq!(f(&[0, 1, 0, -1]).signature().unwrap(), 3);
        assert!(f(&[1, 0, 0, 0]).signature().is_err());
        assert_eq!(f(&[5, -4, 0, 0]).height(), BigInt::from(5));
        assert_eq!(f(&[0, 0, 0, 0]).height(), BigInt::zero());
    }

    #[test]
    fn irreducibility_examples() {
        assert!(f(&[1, 0, 0, -2]).is_irreducible().irreducible);
        assert!(!f(&[1, 0, -1, 0]).is_irreducible().irreducible);
        assert!(!f(&[1, 1, 1, 1]).is_irreducible().irreducible);
        let table = divisor_table(10);
        assert!(cubic_irreducible_i64(&[1, 0, 0, -2], &table));
        assert!(!cubic_irreducible_i64(&[1, 1, 1, 1], &table));
    }

    #[test]
    fn graded_enumeration_is_a_prefix() {
        let mut small = Vec::new();
        for_each_graded(3, 1, |c| small.push(c.to_vec()));
        let mut big = Vec::new();
        for_each_graded(3, 2, |c| big.push(c.to_vec()));
        assert_eq!(small.len(), 80);
        assert_eq!(big.len(), 624);
        assert_eq!(&big[..80], &small[..]);
        let mut none = 0;
        for_each_graded(3, 0, |_| none += 1);
        assert_eq!(none, 0);
    }

    #[test]
    fn parse_round_trip() {
        let g: BinaryForm = "1,0,0,-2".parse().unwrap();
        assert_eq!(g.to_string(), "1,0,0,-2");
        assert!("1,2".parse::<BinaryForm>().is_err());
    }
}
