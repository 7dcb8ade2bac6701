use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use super::ring::{ExactDiv, Ring};
use super::AlgebraError;

/// Dense row-major matrix over a commutative ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, AlgebraError> {
        if data.len() != rows * cols {
            return Err(AlgebraError::DimensionMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::Ragged);
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if self.cols != rhs.rows {
            return Err(AlgebraError::DimensionMismatch {
                expected: (self.cols, rhs.cols),
                found: (rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j).clone() + a.clone() * rhs.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// `self · m · selfᵀ`, the congruence action on a square matrix.
    pub fn congruence(&self, m: &Self) -> Self {
        &(self * m) * &self.transpose()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// The matrix with row `i` and column `j` removed.
    pub fn minor_matrix(&self, i: usize, j: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        self.submatrix(&rows, &cols)
    }

    fn require_square(&self) -> Result<(), AlgebraError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(AlgebraError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Determinant without any division, valid over every commutative ring
    /// (including residue rings with zero divisors).
    pub fn det_division_free(&self) -> Result<T, AlgebraError> {
        self.require_square()?;
        Ok(berkowitz_det(self, &|x| x))
    }

    /// Determinant with every intermediate product passed through `reduce`.
    pub fn det_reduced(&self, reduce: &dyn Fn(T) -> T) -> Result<T, AlgebraError> {
        self.require_square()?;
        Ok(berkowitz_det(self, reduce))
    }

    /// Classical adjugate: `self · adj = det · I`, valid for singular input.
    pub fn adjugate(&self) -> Result<Self, AlgebraError> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        if n == 1 {
            return Ok(Self::identity(1));
        }
        let mut adj = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = berkowitz_det(&self.minor_matrix(i, j), &|x| x);
                let c = if (i + j) % 2 == 0 { c } else { -c };
                adj.set(j, i, c);
            }
        }
        Ok(adj)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }
}

impl<T: ExactDiv> Matrix<T> {
    /// Fraction-free Gaussian elimination (Bareiss), exact over Z and over fields.
    pub fn det_bareiss(&self) -> Result<T, AlgebraError> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(T::one());
        }
        let mut m = self.data.clone();
        let mut negate = false;
        let mut prev = T::one();
        for k in 0..n - 1 {
            if m[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m[i * n + k].is_zero()) else {
                    return Ok(T::zero());
                };
                for j in 0..n {
                    m.swap(k * n + j, swap * n + j);
                }
                negate = !negate;
            }
            let pivot = m[k * n + k].clone();
            for i in k + 1..n {
                let lead = m[i * n + k].clone();
                for j in k + 1..n {
                    let v = m[i * n + j].clone() * pivot.clone() - lead.clone() * m[k * n + j].clone();
                    m[i * n + j] = v.exact_div(&prev);
                }
            }
            prev = pivot;
        }
        let d = m[n * n - 1].clone();
        Ok(if negate { -d } else { d })
    }
}

fn berkowitz_det<T: Ring>(a: &Matrix<T>, reduce: &dyn Fn(T) -> T) -> T {
    let n = a.rows;
    // Characteristic polynomial coefficients, highest degree first.
    let mut v: Vec<T> = vec![T::one()];
    for r in 0..n {
        // q = [1, -a_rr, -R C, -R A C, ..., -R A^{r-1} C]
        let mut q: Vec<T> = Vec::with_capacity(r + 2);
        q.push(T::one());
        q.push(reduce(-a.get(r, r).clone()));
        let mut col: Vec<T> = (0..r).map(|i| a.get(i, r).clone()).collect();
        for _ in 0..r {
            let rc = (0..r).fold(T::zero(), |acc, j| acc + a.get(r, j).clone() * col[j].clone());
            q.push(reduce(-rc));
            col = (0..r)
                .map(|i| reduce((0..r).fold(T::zero(), |acc, j| acc + a.get(i, j).clone() * col[j].clone())))
                .collect();
        }
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut acc = T::zero();
            for j in 0..=i.min(r) {
                if i - j < q.len() {
                    acc = acc + q[i - j].clone() * v[j].clone();
                }
            }
            next.push(reduce(acc));
        }
        v = next;
    }
    let d = v[n].clone();
    if n % 2 == 1 {
        reduce(-d)
    } else {
        d
    }
}

impl<'a, T: Ring> Mul for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl<'a, T: Ring> Add for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix dimension mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<'a, T: Ring> Sub for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix dimension mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

/// Rows separated by `;`, entries by `,`, e.g. `0,0,1;0,1,0;1,0,0`.
impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ";")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ";")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

impl<T: Ring + FromStr> FromStr for Matrix<T> {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows = s
            .trim()
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|e| e.trim().parse::<T>().map_err(|_| AlgebraError::Parse(format!("bad entry {e:?}"))))
                    .collect::<Result<Vec<T>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn m(s: &str) -> Matrix<i64> {
        s.parse().unwrap()
    }

    #[test]
    fn trivial_determinants() {
        assert_eq!(m("7").det_bareiss().unwrap(), 7);
        assert_eq!(m("0,0,1;0,1,0;1,0,0").det_bareiss().unwrap(), -1);
        assert_eq!(m("0,0,1;0,1,0;1,0,0").det_division_free().unwrap(), -1);
        assert!(m("1,2,3;4,5,6").det_bareiss().is_err());
    }

    #[test]
    fn adjugate_closed_forms() {
        assert_eq!(Matrix::<i64>::identity(3).adjugate().unwrap(), Matrix::identity(3));
        assert_eq!(m("2,3;5,7").adjugate().unwrap(), m("7,-3;-5,2"));
        let s = m("1,2,3;2,4,6;0,1,1");
        assert_eq!(&s * &s.adjugate().unwrap(), Matrix::zeros(3, 3));
    }

    #[test]
    fn format_round_trip() {
        let a: Matrix<BigInt> = "0,0,1;0,-1,0;1,0,0".parse().unwrap();
        assert_eq!(a.to_string(), "0,0,1;0,-1,0;1,0,0");
        assert!("1,2;3".parse::<Matrix<i64>>().is_err());
    }
}
