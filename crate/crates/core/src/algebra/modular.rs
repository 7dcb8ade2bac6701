use num_bigint::BigInt;
use num_integer::Integer;

use super::matrix::Matrix;
use super::AlgebraError;

/// Matrix over Z/qZ, entries always stored reduced to `[0, q)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModMatrix {
    modulus: BigInt,
    inner: Matrix<BigInt>,
}

impl ModMatrix {
    pub fn new(inner: &Matrix<BigInt>, modulus: &BigInt) -> Self {
        ModMatrix { modulus: modulus.clone(), inner: inner.map(|x| x.mod_floor(modulus)) }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn matrix(&self) -> &Matrix<BigInt> {
        &self.inner
    }

    fn reduce(&self, x: BigInt) -> BigInt {
        x.mod_floor(&self.modulus)
    }

    /// Division-free determinant, reducing after every ring operation.
    pub fn det(&self) -> Result<BigInt, AlgebraError> {
        let q = self.modulus.clone();
        self.inner.det_reduced(&move |x: BigInt| x.mod_floor(&q))
    }

    pub fn mul(&self, rhs: &ModMatrix) -> Result<ModMatrix, AlgebraError> {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let m = self.inner.checked_mul(&rhs.inner)?;
        Ok(ModMatrix { modulus: self.modulus.clone(), inner: m.map(|x| self.reduce(x.clone())) })
    }

    pub fn adjugate(&self) -> Result<ModMatrix, AlgebraError> {
        let adj = self.inner.adjugate()?;
        Ok(ModMatrix::new(&adj, &self.modulus))
    }

    pub fn transpose(&self) -> ModMatrix {
        ModMatrix { modulus: self.modulus.clone(), inner: self.inner.transpose() }
    }
}

/// Rank of an integer matrix modulo a prime.
pub fn rank_mod_p(m: &Matrix<i64>, p: i64) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<i64>> = (0..rows).map(|i| m.row(i).iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else { continue };
        a.swap(rank, piv);
        let inv = inverse_mod_prime(a[rank][col], p);
        for j in col..cols {
            a[rank][j] = a[rank][j] * inv % p;
        }
        for r in 0..rows {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                for j in col..cols {
                    a[r][j] = (a[r][j] - f * a[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn inverse_mod_prime(a: i64, p: i64) -> i64 {
    let mut result = 1i64;
    let mut base = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = (result as i128 * base as i128 % p as i128) as i64;
        }
        base = (base as i128 * base as i128 % p as i128) as i64;
        e >>= 1;
    }
    result
}
