use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::matrix::Matrix;
use super::ring::Ring;
use super::AlgebraError;

/// Dense univariate polynomial, coefficients indexed by degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| super::ring::from_i64::<T>(i as i64) * c.clone())
            .collect();
        Poly::new(coeffs)
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl Poly<BigRational> {
    /// Remainder of Euclidean division over Q.
    pub fn rem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let q = r.last().unwrap().clone() / lead.clone();
            for (i, c) in divisor.coeffs.iter().enumerate() {
                r[shift + i] = r[shift + i].clone() - q.clone() * c.clone();
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Poly::new(r)
    }
}

fn sign_changes(signs: &[i8]) -> usize {
    let nonzero: Vec<i8> = signs.iter().copied().filter(|&s| s != 0).collect();
    nonzero.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots, from sign variations of the Sturm chain at ±∞.
pub fn sturm_real_roots(p: &Poly<BigInt>) -> Result<usize, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let q = p.map(|c| BigRational::from_integer(c.clone()));
    let mut chain = vec![q.clone(), q.derivative()];
    while !chain.last().unwrap().is_zero() {
        let k = chain.len();
        let r = chain[k - 2].rem(&chain[k - 1]).neg();
        chain.push(r);
    }
    chain.pop();
    let sign = |c: &BigRational| -> i8 {
        if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        }
    };
    let at_pos: Vec<i8> = chain.iter().map(|f| sign(f.leading().unwrap())).collect();
    let at_neg: Vec<i8> = chain
        .iter()
        .map(|f| {
            let s = sign(f.leading().unwrap());
            if f.degree().unwrap() % 2 == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    Ok(sign_changes(&at_neg) - sign_changes(&at_pos))
}

/// Coefficients of `det(xA − yB)`, listed as the `x^{N−i} y^i` coefficient for `i = 0..=N`.
///
/// Symbolic expansion over subsets of columns, so only ring operations are used.
pub fn pencil_det<T: Ring>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Vec<T>, AlgebraError> {
    if !a.is_square() {
        return Err(AlgebraError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(AlgebraError::DimensionMismatch {
            expected: (a.rows(), a.cols()),
            found: (b.rows(), b.cols()),
        });
    }
    let n = a.rows();
    assert!(n <= 20, "pencil_det supports N ≤ 20");
    // dp[mask]: homogeneous polynomial of degree popcount(mask), coefficient of y^i at index i.
    let mut dp: Vec<Option<Vec<T>>> = vec![None; 1 << n];
    dp[0] = Some(vec![T::one()]);
    for mask in 0usize..(1 << n) {
        let Some(cur) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            dp[mask] = Some(cur);
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 {
                continue;
            }
            let ea = a.get(row, col).clone();
            let eb = b.get(row, col).clone();
            if ea.is_zero() && eb.is_zero() {
                continue;
            }
            let above = (mask >> (col + 1)).count_ones();
            let mut term = vec![T::zero(); cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                term[i] = term[i].clone() + c.clone() * ea.clone();
                term[i + 1] = term[i + 1].clone() - c.clone() * eb.clone();
            }
            if above % 2 == 1 {
                term.iter_mut().for_each(|t| *t = -t.clone());
            }
            let slot = &mut dp[mask | (1 << col)];
            match slot {
                Some(acc) => {
                    for (x, t) in acc.iter_mut().zip(term) {
                        *x = x.clone() + t;
                    }
                }
                None => *slot = Some(term),
            }
        }
    }
    Ok(dp[(1 << n) - 1].take().unwrap_or_else(|| vec![T::zero(); n + 1]))
}

/// Same coefficients as [`pencil_det`], from exact evaluations of `det(xA − B)` at
/// `x ∈ {0, 1, −1, 2, −2, …}` with the leading term taken from `det A`.
pub fn pencil_det_interpolated(a: &Matrix<BigInt>, b: &Matrix<BigInt>) -> Result<Vec<BigInt>, AlgebraError> {
    if !a.is_square() {
        return Err(AlgebraError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(AlgebraError::DimensionMismatch {
            expected: (a.rows(), a.cols()),
            found: (b.rows(), b.cols()),
        });
    }
    let n = a.rows();
    let lead = a.det_bareiss()?;
    let nodes: Vec<i64> = (0..n as i64).map(|k| if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) }).collect();
    let mut values = Vec::with_capacity(n);
    for &s in &nodes {
        let sb = BigInt::from(s);
        let m = Matrix::from_fn(n, n, |i, j| a.get(i, j) * &sb - b.get(i, j));
        let v = m.det_bareiss()? - &lead * num_traits::pow(sb.clone(), n);
        values.push(BigRational::from_integer(v));
    }
    // Newton divided differences for the degree < n remainder.
    let xs: Vec<BigRational> = nodes.iter().map(|&s| BigRational::from_integer(s.into())).collect();
    let mut diff = values;
    for level in 1..n {
        for i in (level..n).rev() {
            diff[i] = (diff[i].clone() - diff[i - 1].clone()) / (xs[i].clone() - xs[i - level].clone());
        }
    }
    let mut poly = Poly::<BigRational>::zero();
    for i in (0..n).rev() {
        poly = poly.mul(&Poly::new(vec![-xs[i].clone(), BigRational::from_integer(1.into())]));
        poly = poly.add(&Poly::new(vec![diff[i].clone()]));
    }
    let mut out = vec![lead];
    for i in 1..=n {
        let c = poly.coeff(n - i);
        if !c.is_integer() {
            return Err(AlgebraError::NonIntegral);
        }
        out.push(c.to_integer());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly<BigInt> {
        Poly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_real_roots(&p(&[-1, -3, 0, 1])).unwrap(), 3);
        assert_eq!(sturm_real_roots(&p(&[-2, 0, 0, 1])).unwrap(), 1);
        assert_eq!(sturm_real_roots(&p(&[0, 1])).unwrap(), 1);
        assert!(sturm_real_roots(&p(&[])).is_err());
    }

    #[test]
    fn pencil_det_trivial_cases() {
        let id = Matrix::<i64>::identity(3);
        let z = Matrix::<i64>::zeros(3, 3);
        assert_eq!(pencil_det(&id, &z).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(pencil_det(&z, &id).unwrap(), vec![0, 0, 0, -1]);
    }
}
