//! The binary form `inv(A, B)`, the hyperdeterminant `λ`, explicit sections, and projectivity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::intmath::factorize;
use crate::algebra::linalg::minor_gcd;
use crate::algebra::ring::from_i64;
use crate::algebra::{pencil_det, AlgebraError, Matrix, Ring};
use crate::forms::BinaryForm;
use crate::pencils::{PencilError, Space, SymPair};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("λ is only defined on Wtop or W0, got {0:?}")]
    WrongSpace(Space),
    #[error("λ must be nonzero")]
    ZeroLambda,
    #[error("operation only defined for N = 3")]
    NotTernary,
    #[error("diagonal solve failed: {0}")]
    Solve(&'static str),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Coefficients of `(−1)ⁿ det(xA − yB)` in any ring.
pub fn inv_coeffs<T: Ring>(w: &SymPair<T>) -> Vec<T> {
    let c = pencil_det(w.a(), w.b()).expect("pairs are square of equal size");
    if w.n() % 2 == 1 {
        c.into_iter().map(|x| -x).collect()
    } else {
        c
    }
}

pub fn inv(w: &SymPair<BigInt>) -> BinaryForm {
    BinaryForm::new(inv_coeffs(w)).expect("odd size")
}

/// Hyperdeterminant of the top-right blocks (the projection onto `Wtop` for `W0` pairs).
pub fn hyperdeterminant<T: Ring>(w: &SymPair<T>) -> Result<T, InvariantError> {
    if w.space() == Space::W {
        return Err(InvariantError::WrongSpace(w.space()));
    }
    let (top_a, top_b) = w.top_blocks();
    Ok(lambda_of_blocks(&top_a, &top_b))
}

/// `λ` from `n × (n+1)` blocks: row `i` of the coefficient matrix holds the coefficients of
/// `(−1)^{i} det(xA⁽ⁱ⁾ − yB⁽ⁱ⁾)`, where column `i` is deleted.
pub fn lambda_of_blocks<T: Ring>(top_a: &Matrix<T>, top_b: &Matrix<T>) -> T {
    let n = top_a.rows();
    let rows: Vec<usize> = (0..n).collect();
    let mut coeff = Matrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let cols: Vec<usize> = (0..=n).filter(|&c| c != i).collect();
        let g = pencil_det(&top_a.submatrix(&rows, &cols), &top_b.submatrix(&rows, &cols)).expect("square");
        for (j, c) in g.into_iter().enumerate() {
            coeff.set(i, j, if i % 2 == 1 { -c } else { c });
        }
    }
    coeff.det_division_free().expect("square")
}

/// Position (0-based, within the top-right block) of the `A` antidiagonal entry in row `i`.
pub fn a_shape_col(n: usize, i: usize) -> usize {
    n - i
}

/// Position of the `B` shifted-antidiagonal entry in row `i`; row 0 holds the corner.
pub fn b_shape_col(n: usize, i: usize) -> usize {
    n - 1 - i
}

/// Top blocks with the given antidiagonal entries and zeros elsewhere.
pub fn shape_blocks<T: Ring>(alphas: &[T], betas: &[T]) -> (Matrix<T>, Matrix<T>) {
    let n = alphas.len();
    let mut a = Matrix::zeros(n, n + 1);
    let mut b = Matrix::zeros(n, n + 1);
    for i in 0..n {
        a.set(i, a_shape_col(n, i), alphas[i].clone());
        b.set(i, b_shape_col(n, i), betas[i].clone());
    }
    (a, b)
}

/// `λ` of the all-ones shape; `±1` depending on `n`.
pub fn shape_sign(n: usize) -> i64 {
    let ones = vec![1i64; n];
    let (a, b) = shape_blocks(&ones, &ones);
    lambda_of_blocks(&a, &b)
}

fn embed_top<T: Ring>(top_a: &Matrix<T>, top_b: &Matrix<T>, space: Space) -> Result<SymPair<T>, PencilError> {
    let n = top_a.rows();
    let z = Matrix::zeros(n + 1, n + 1);
    SymPair::from_blocks(top_a, top_b, &z, &z, space)
}

/// Shape pair with unit antidiagonals and corner `±q0`, chosen so that `λ = q0`.
pub fn section_q<T: Ring>(n: usize, q0: &T) -> Result<SymPair<T>, InvariantError> {
    if q0.is_zero() {
        return Err(InvariantError::ZeroLambda);
    }
    let alphas = vec![T::one(); n];
    let mut betas = vec![T::one(); n];
    betas[0] = q0.clone() * from_i64::<T>(shape_sign(n));
    let (a, b) = shape_blocks(&alphas, &betas);
    Ok(embed_top(&a, &b, Space::Wtop0)?)
}

/// Positions of the diagonal unknowns, in solve order: `(block index k, is_b)`.
fn diagonal_unknowns(n: usize) -> Vec<(usize, bool)> {
    (0..=n).flat_map(|k| [(k, false), (k, true)]).collect()
}

fn with_diagonal(template: &SymPair<BigRational>, values: &[BigRational]) -> SymPair<BigRational> {
    let n = template.n();
    let mut a = template.a().clone();
    let mut b = template.b().clone();
    for (idx, &(k, is_b)) in diagonal_unknowns(n).iter().enumerate() {
        let m = if is_b { &mut b } else { &mut a };
        m.set(n + k, n + k, values.get(idx).cloned().unwrap_or_default());
    }
    SymPair::new(a, b, template.space()).expect("diagonal entries are never constrained")
}

/// Solve for the `2n+2` lower-right diagonal entries so that `inv = f`, keeping every other
/// entry of `template`. Each coefficient `f_i` is affine in the `i`-th unknown once the earlier
/// ones are fixed, and does not depend on later ones.
pub fn solve_diagonal(template: &SymPair<BigRational>, f: &[BigRational]) -> Result<SymPair<BigRational>, InvariantError> {
    let n = template.n();
    let count = 2 * n + 2;
    if f.len() != count {
        return Err(InvariantError::Solve("coefficient count"));
    }
    let mut values: Vec<BigRational> = Vec::with_capacity(count);
    for i in 0..count {
        let mut trial = values.clone();
        trial.push(BigRational::zero());
        let base = inv_coeffs(&with_diagonal(template, &trial))[i].clone();
        trial[i] = BigRational::one();
        let pivot = inv_coeffs(&with_diagonal(template, &trial))[i].clone() - &base;
        if pivot.is_zero() {
            return Err(InvariantError::Solve("zero pivot"));
        }
        values.push((f[i].clone() - base) / pivot);
    }
    let result = with_diagonal(template, &values);
    if inv_coeffs(&result) != f {
        return Err(InvariantError::Solve("not triangular"));
    }
    Ok(result)
}

/// Pair in `W00` with `inv = f` and `λ = 1`: canonical top blocks and a diagonal
/// lower-right block solved from `f`.
pub fn section_inv_rational(n: usize, f: &[BigRational]) -> Result<SymPair<BigRational>, InvariantError> {
    let template = section_q(n, &BigRational::one())?.with_space(Space::W00)?;
    solve_diagonal(&template, f)
}

pub fn section_inv(f: &BinaryForm) -> Result<SymPair<BigInt>, InvariantError> {
    let target: Vec<BigRational> = f.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let solved = section_inv_rational(f.half_degree(), &target)?;
    solved.to_integer().ok_or(InvariantError::Solve("non-integral pivot"))
}

fn upper_entries<T: Ring>(m: &Matrix<T>) -> [T; 6] {
    [
        m.get(0, 0).clone(),
        m.get(0, 1).clone(),
        m.get(0, 2).clone(),
        m.get(1, 1).clone(),
        m.get(1, 2).clone(),
        m.get(2, 2).clone(),
    ]
}

/// The `3 × 6` matrix with rows `C⁽⁰⁾ = −B·adj(A)·B + f₁B + f₂A`, `C⁽¹⁾ = B`, `C⁽²⁾ = A`.
pub fn projectivity_matrix<T: Ring>(w: &SymPair<T>) -> Result<Matrix<T>, InvariantError> {
    if w.n() != 1 {
        return Err(InvariantError::NotTernary);
    }
    let f = inv_coeffs(w);
    let (a, b) = (w.a(), w.b());
    let bab = b.checked_mul(&a.adjugate()?)?.checked_mul(b)?;
    let c0 = &(&b.scale(&f[1]) + &a.scale(&f[2])) - &bab;
    let rows = vec![upper_entries(&c0).to_vec(), upper_entries(b).to_vec(), upper_entries(a).to_vec()];
    Ok(Matrix::from_rows(rows)?)
}

/// gcd of the `3 × 3` minors of the projectivity matrix.
pub fn projectivity_gcd(w: &SymPair<BigInt>) -> Result<BigInt, InvariantError> {
    Ok(minor_gcd(&projectivity_matrix(w)?, 3)?)
}

pub fn is_projective(w: &SymPair<BigInt>) -> Result<bool, InvariantError> {
    Ok(projectivity_gcd(w)?.is_one())
}

/// Primes at which `w` fails to be projective; `None` when every minor vanishes.
pub fn non_projective_primes(w: &SymPair<BigInt>) -> Result<Option<Vec<u64>>, InvariantError> {
    let g = projectivity_gcd(w)?;
    if g.is_zero() {
        return Ok(None);
    }
    Ok(Some(factorize(&g).into_iter().map(|(p, _)| p).collect()))
}

/// Projectivity over `Z_p`, which only depends on `w mod p`.
pub fn is_projective_at(w: &SymPair<BigInt>, p: u64) -> Result<bool, InvariantError> {
    let g = projectivity_gcd(w)?;
    Ok(!g.is_multiple_of(&BigInt::from(p)))
}

/// Projectivity mod `p` for a small pair given as `i64` entries.
pub fn is_projective_mod_p_i64(w: &SymPair<i64>, p: i64) -> bool {
    let m = projectivity_matrix(w).expect("N = 3");
    crate::algebra::modular::rank_mod_p(&m.map(|x| x.rem_euclid(p)), p) == 3
}

/// Sign of `λ`, or 0.
pub fn lambda_sign(w: &SymPair<BigInt>) -> Result<i32, InvariantError> {
    let l = hyperdeterminant(w)?;
    Ok(if l.is_positive() {
        1
    } else if l.is_negative() {
        -1
    } else {
        0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_at_n1_is_a_two_by_two_determinant() {
        let w = SymPair::from_i64(&[&[0, 2, 3], &[2, 0, 0], &[3, 0, 0]], &[&[0, 5, 7], &[5, 0, 0], &[7, 0, 0]], Space::Wtop)
            .unwrap();
        assert_eq!(hyperdeterminant(&w).unwrap(), BigInt::from(3 * 5 - 2 * 7));
    }

    #[test]
    fn sections_have_the_requested_invariants() {
        for n in 1..=3 {
            for q in [1i64, 5, -4, 7] {
                let w = section_q(n, &BigInt::from(q)).unwrap();
                assert_eq!(hyperdeterminant(&w).unwrap(), BigInt::from(q));
            }
        }
        assert!(section_q(1, &BigInt::zero()).is_err());
        let f = BinaryForm::from_i64(&[1, 0, 0, -2]).unwrap();
        let w = section_inv(&f).unwrap();
        assert_eq!(inv(&w), f);
        assert_eq!(hyperdeterminant(&w).unwrap(), BigInt::one());
    }

    #[test]
    fn section_inv_matches_closed_form() {
        let f = BinaryForm::from_i64(&[3, -1, 4, 1, -5, 9]).unwrap();
        let w = section_inv(&f).unwrap();
        let n = 2;
        for k in 0..=n {
            assert_eq!(w.a().get(n + k, n + k), f.coeff(2 * k));
            assert_eq!(*w.b().get(n + k, n + k), -f.coeff(2 * k + 1).clone());
        }
    }

    #[test]
    fn projectivity_examples() {
        let w = section_inv(&BinaryForm::from_i64(&[1, 0, 0, -2]).unwrap()).unwrap();
        assert!(is_projective(&w).unwrap());
        let even = SymPair::from_i64(&[&[0, 2, 0], &[2, 1, 3], &[0, 3, 1]], &[&[0, 0, 2], &[0, 1, 1], &[2, 1, 0]], Space::W0)
            .unwrap();
        assert!(!is_projective_at(&even, 2).unwrap());
    }
}
