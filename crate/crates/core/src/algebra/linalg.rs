use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::Matrix;
use super::AlgebraError;

/// Reduced row echelon form over Q; returns the pivot columns.
pub fn rref(m: &mut Matrix<BigRational>) -> Vec<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
        if p != r {
            for j in 0..cols {
                let t = m.get(r, j).clone();
                m.set(r, j, m.get(p, j).clone());
                m.set(p, j, t);
            }
        }
        let inv = m.get(r, c).recip();
        for j in 0..cols {
            m.set(r, j, m.get(r, j) * &inv);
        }
        for i in 0..rows {
            if i != r && !m.get(i, c).is_zero() {
                let f = m.get(i, c).clone();
                for j in 0..cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right nullspace over Q.
pub fn nullspace(m: &Matrix<BigRational>) -> Vec<Vec<BigRational>> {
    let mut work = m.clone();
    let pivots = rref(&mut work);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -work.get(r, f).clone();
            }
            v
        })
        .collect()
}

pub fn rank(m: &Matrix<BigRational>) -> usize {
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Solve `m x = rhs` for square nonsingular `m`.
pub fn solve(m: &Matrix<BigRational>, rhs: &[BigRational]) -> Result<Vec<BigRational>, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut aug = Matrix::from_fn(n, n + 1, |i, j| if j < n { m.get(i, j).clone() } else { rhs[i].clone() });
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(AlgebraError::Singular);
    }
    Ok((0..n).map(|i| aug.get(i, n).clone()).collect())
}

pub fn inverse(m: &Matrix<BigRational>) -> Result<Matrix<BigRational>, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else if j - n == i {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    });
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(AlgebraError::Singular);
    }
    Ok(Matrix::from_fn(n, n, |i, j| aug.get(i, j + n).clone()))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// gcd of all `size × size` minors.
pub fn minor_gcd(m: &Matrix<BigInt>, size: usize) -> Result<BigInt, AlgebraError> {
    if size == 0 || size > m.rows().min(m.cols()) {
        return Err(AlgebraError::MinorSizeOutOfRange { size, rows: m.rows(), cols: m.cols() });
    }
    let mut g = BigInt::zero();
    for rs in combinations(m.rows(), size) {
        for cs in combinations(m.cols(), size) {
            let d = m.submatrix(&rs, &cs).det_bareiss()?;
            g = g.gcd(&d);
            if g.is_one() {
                return Ok(g);
            }
        }
    }
    Ok(g.abs())
}

pub fn to_rational(m: &Matrix<BigInt>) -> Matrix<BigRational> {
    m.map(|x| BigRational::from_integer(x.clone()))
}

/// Integer matrix when every entry is integral.
pub fn to_integer(m: &Matrix<BigRational>) -> Option<Matrix<BigInt>> {
    if m.entries().iter().all(|x| x.is_integer()) {
        Some(m.map(|x| x.to_integer()))
    } else {
        None
    }
}
