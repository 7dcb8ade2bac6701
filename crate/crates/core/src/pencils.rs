//! Pairs of symmetric matrices, the block subgroups acting on them, and the actions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::linalg::{inverse, to_integer, to_rational};
use crate::algebra::{AlgebraError, Matrix, Ring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PencilError {
    #[error("size must be odd and at least 3, got {0}")]
    BadSize(usize),
    #[error("matrices are not symmetric")]
    NotSymmetric,
    #[error("pair does not lie in {0:?}")]
    NotInSpace(Space),
    #[error("matrix is not an element of {0:?}")]
    NotInGroup(GroupKind),
    #[error("{group:?} does not preserve {space:?}")]
    Incompatible { group: GroupKind, space: Space },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("operation only defined for N = 3")]
    NotTernary,
    #[error("twist matrix is singular")]
    SingularTwist,
    #[error("factorization is not integral")]
    NonIntegral,
    #[error("cannot parse pair: {0}")]
    Parse(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum Space {
    W,
    W0,
    W00,
    Wtop,
    Wtop0,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum GroupKind {
    SL,
    G,
    L,
    H1,
    H2,
    SLnxSLn1,
}

impl GroupKind {
    pub const ALL: [GroupKind; 6] =
        [GroupKind::SL, GroupKind::G, GroupKind::L, GroupKind::H1, GroupKind::H2, GroupKind::SLnxSLn1];

    pub fn preserves(self, space: Space) -> bool {
        use GroupKind::*;
        match space {
            Space::W => true,
            Space::W0 => self != SL,
            Space::Wtop => matches!(self, H2 | SLnxSLn1 | L),
            Space::Wtop0 => self == L,
            Space::W00 => false,
        }
    }
}

/// Zero pattern of a space, 0-based indices, for a pair of size `2n+1`.
fn forced_zero(space: Space, n: usize, i: usize, j: usize, is_b: bool) -> bool {
    let top_left = i < n && j < n;
    let bottom_right = i >= n && j >= n;
    let shape = if is_b { i + j + 2 <= 2 * n } else { i + j + 2 <= 2 * n + 1 };
    match space {
        Space::W => false,
        Space::W0 => top_left,
        Space::Wtop => top_left || bottom_right,
        Space::Wtop0 => top_left || bottom_right || shape,
        Space::W00 => top_left || shape,
    }
}

pub fn in_space<T: Ring>(space: Space, n: usize, a: &Matrix<T>, b: &Matrix<T>) -> bool {
    let size = 2 * n + 1;
    (0..size).all(|i| {
        (0..size).all(|j| {
            (!forced_zero(space, n, i, j, false) || a.get(i, j).is_zero())
                && (!forced_zero(space, n, i, j, true) || b.get(i, j).is_zero())
        })
    })
}

/// A pair `(A, B)` of symmetric `N × N` matrices, `N = 2n+1`, tagged with a validated space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymPair<T = BigInt> {
    n: usize,
    a: Matrix<T>,
    b: Matrix<T>,
    space: Space,
}

impl<T: Ring> SymPair<T> {
    pub fn new(a: Matrix<T>, b: Matrix<T>, space: Space) -> Result<Self, PencilError> {
        if !a.is_square() {
            return Err(AlgebraError::NotSquare { rows: a.rows(), cols: a.cols() }.into());
        }
        let size = a.rows();
        if (b.rows(), b.cols()) != (size, size) {
            return Err(PencilError::SizeMismatch(size, b.rows()));
        }
        if size < 3 || size % 2 == 0 {
            return Err(PencilError::BadSize(size));
        }
        if !a.is_symmetric() || !b.is_symmetric() {
            return Err(PencilError::NotSymmetric);
        }
        let n = size / 2;
        if !in_space(space, n, &a, &b) {
            return Err(PencilError::NotInSpace(space));
        }
        Ok(SymPair { n, a, b, space })
    }

    /// Tag with the most specific space the pair lies in.
    pub fn inferred(a: Matrix<T>, b: Matrix<T>) -> Result<Self, PencilError> {
        let w = Self::new(a, b, Space::W)?;
        let space = [Space::Wtop0, Space::Wtop, Space::W00, Space::W0]
            .into_iter()
            .find(|&s| in_space(s, w.n, &w.a, &w.b))
            .unwrap_or(Space::W);
        Ok(SymPair { space, ..w })
    }

    pub fn zero(n: usize, space: Space) -> Self {
        let size = 2 * n + 1;
        SymPair { n, a: Matrix::zeros(size, size), b: Matrix::zeros(size, size), space }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        2 * self.n + 1
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn with_space(self, space: Space) -> Result<Self, PencilError> {
        Self::new(self.a, self.b, space)
    }

    /// Entry-wise map, revalidated in the same space.
    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Result<SymPair<U>, PencilError> {
        SymPair::new(self.a.map(&f), self.b.map(&f), self.space)
    }

    /// Top-right `n × (n+1)` blocks of `A` and `B`.
    pub fn top_blocks(&self) -> (Matrix<T>, Matrix<T>) {
        let rows: Vec<usize> = (0..self.n).collect();
        let cols: Vec<usize> = (self.n..self.size()).collect();
        (self.a.submatrix(&rows, &cols), self.b.submatrix(&rows, &cols))
    }

    /// Projection onto `Wtop`: the lower-right blocks are zeroed.
    pub fn project_top(&self) -> SymPair<T> {
        let size = self.size();
        let n = self.n;
        let keep = |m: &Matrix<T>| Matrix::from_fn(size, size, |i, j| {
            if (i < n) != (j < n) {
                m.get(i, j).clone()
            } else {
                T::zero()
            }
        });
        SymPair { n, a: keep(&self.a), b: keep(&self.b), space: Space::Wtop }
    }

    /// Rebuild a symmetric pair from top-right blocks and lower-right blocks.
    pub fn from_blocks(
        top_a: &Matrix<T>,
        top_b: &Matrix<T>,
        low_a: &Matrix<T>,
        low_b: &Matrix<T>,
        space: Space,
    ) -> Result<Self, PencilError> {
        let n = top_a.rows();
        let size = 2 * n + 1;
        let build = |top: &Matrix<T>, low: &Matrix<T>| {
            Matrix::from_fn(size, size, |i, j| match (i < n, j < n) {
                (true, true) => T::zero(),
                (true, false) => top.get(i, j - n).clone(),
                (false, true) => top.get(j, i - n).clone(),
                (false, false) => low.get(i - n, j - n).clone(),
            })
        };
        SymPair::new(build(top_a, low_a), build(top_b, low_b), space)
    }
}

impl<T: Ring> SymPair<T> {
    /// In place `g · w` for `g = I + t·E_ij`: row `i` += t·row `j`, then the same on columns.
    pub fn transvect(&mut self, i: usize, j: usize, t: &T) {
        for m in [&mut self.a, &mut self.b] {
            let size = m.rows();
            for c in 0..size {
                let v = m.get(i, c).clone() + t.clone() * m.get(j, c).clone();
                m.set(i, c, v);
            }
            for r in 0..size {
                let v = m.get(r, i).clone() + t.clone() * m.get(r, j).clone();
                m.set(r, i, v);
            }
        }
        debug_assert!(in_space(self.space, self.n, &self.a, &self.b));
    }

    /// In place `g · w` for diagonal `g`.
    pub fn scale_diagonal(&mut self, d: &[T]) {
        for m in [&mut self.a, &mut self.b] {
            let size = m.rows();
            for r in 0..size {
                for c in 0..size {
                    let v = d[r].clone() * m.get(r, c).clone() * d[c].clone();
                    m.set(r, c, v);
                }
            }
        }
    }

    /// In place entry-wise map; the caller guarantees zeros stay zero.
    pub fn map_in_place(&mut self, f: impl Fn(&T) -> T) {
        self.a = self.a.map(&f);
        self.b = self.b.map(&f);
        debug_assert!(in_space(self.space, self.n, &self.a, &self.b));
    }

    /// Retag without revalidation failure reporting; panics if the pair is outside `space`.
    pub fn retag(&mut self, space: Space) {
        assert!(in_space(space, self.n, &self.a, &self.b), "pair is not in {space:?}");
        self.space = space;
    }

    pub fn set_pair_entry(&mut self, is_b: bool, i: usize, j: usize, value: T) {
        let m = if is_b { &mut self.b } else { &mut self.a };
        m.set(i, j, value.clone());
        m.set(j, i, value);
        debug_assert!(in_space(self.space, self.n, &self.a, &self.b));
    }
}

impl SymPair<BigInt> {
    pub fn from_i64(a: &[&[i64]], b: &[&[i64]], space: Space) -> Result<Self, PencilError> {
        let conv = |rows: &[&[i64]]| {
            Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
        };
        SymPair::new(conv(a)?, conv(b)?, space)
    }

    pub fn reduce_mod(&self, modulus: &BigInt) -> SymPair<BigInt> {
        self.map(|x| x.mod_floor(modulus)).expect("reduction preserves zero patterns")
    }

    pub fn to_rational(&self) -> SymPair<BigRational> {
        self.map(|x| BigRational::from_integer(x.clone())).expect("same pattern")
    }
}

impl SymPair<BigRational> {
    pub fn to_integer(&self) -> Option<SymPair<BigInt>> {
        let a = to_integer(&self.a)?;
        let b = to_integer(&self.b)?;
        SymPair::new(a, b, self.space).ok()
    }
}

impl<T: fmt::Display> fmt::Display for SymPair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={};B={}", self.a, self.b)
    }
}

impl<T: fmt::Debug> fmt::Debug for SymPair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{{A={:?} B={:?}}}", self.space, self.a, self.b)
    }
}

impl<T: Ring + FromStr> FromStr for SymPair<T> {
    type Err = PencilError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let rest = s.strip_prefix("A=").ok_or_else(|| PencilError::Parse(s.to_string()))?;
        let (a, b) = rest.split_once(";B=").ok_or_else(|| PencilError::Parse(s.to_string()))?;
        SymPair::inferred(a.parse()?, b.parse()?)
    }
}

/// An element of one of the block subgroups of `SL_N`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockGroupElement<T = BigInt> {
    n: usize,
    matrix: Matrix<T>,
    kind: GroupKind,
}

/// Block-structure predicate, ignoring the determinant.
pub fn has_block_shape<T: Ring>(kind: GroupKind, n: usize, m: &Matrix<T>) -> bool {
    let size = 2 * n + 1;
    let zero = |i: usize, j: usize| m.get(i, j).is_zero();
    let one = |i: usize, j: usize| m.get(i, j).is_one();
    let upper_right_zero = || (0..n).all(|i| (n..size).all(|j| zero(i, j)));
    let lower_left_zero = || (n..size).all(|i| (0..n).all(|j| zero(i, j)));
    let lower_triangular = || (0..size).all(|i| (i + 1..size).all(|j| zero(i, j)));
    match kind {
        GroupKind::SL => true,
        GroupKind::G => upper_right_zero(),
        GroupKind::H2 | GroupKind::SLnxSLn1 => upper_right_zero() && lower_left_zero(),
        GroupKind::L => upper_right_zero() && lower_left_zero() && lower_triangular(),
        GroupKind::H1 => (0..size).all(|i| {
            (0..size).all(|j| {
                if i == j {
                    one(i, j)
                } else if i >= n && j < n {
                    true
                } else {
                    zero(i, j)
                }
            })
        }),
    }
}

fn block_dets<T: Ring>(n: usize, m: &Matrix<T>, reduce: &dyn Fn(T) -> T) -> Result<(T, T), AlgebraError> {
    let size = 2 * n + 1;
    let top: Vec<usize> = (0..n).collect();
    let bottom: Vec<usize> = (n..size).collect();
    Ok((m.submatrix(&top, &top).det_reduced(reduce)?, m.submatrix(&bottom, &bottom).det_reduced(reduce)?))
}

impl<T: Ring> BlockGroupElement<T> {
    fn validate(kind: GroupKind, matrix: &Matrix<T>, reduce: &dyn Fn(T) -> T) -> Result<usize, PencilError> {
        if !matrix.is_square() {
            return Err(AlgebraError::NotSquare { rows: matrix.rows(), cols: matrix.cols() }.into());
        }
        let size = matrix.rows();
        if size < 3 || size % 2 == 0 {
            return Err(PencilError::BadSize(size));
        }
        let n = size / 2;
        if !has_block_shape(kind, n, matrix) {
            return Err(PencilError::NotInGroup(kind));
        }
        let ok = if kind == GroupKind::SLnxSLn1 {
            let (d1, d2) = block_dets(n, matrix, reduce)?;
            d1.is_one() && d2.is_one()
        } else {
            matrix.det_reduced(reduce)?.is_one()
        };
        if !ok {
            return Err(PencilError::NotInGroup(kind));
        }
        Ok(n)
    }

    pub fn new(kind: GroupKind, matrix: Matrix<T>) -> Result<Self, PencilError> {
        let n = Self::validate(kind, &matrix, &|x| x)?;
        Ok(BlockGroupElement { n, matrix, kind })
    }

    pub fn identity(kind: GroupKind, n: usize) -> Self {
        BlockGroupElement { n, matrix: Matrix::identity(2 * n + 1), kind }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Regard as an element of a larger group.
    pub fn widen(&self, kind: GroupKind) -> Result<Self, PencilError> {
        Self::new(kind, self.matrix.clone())
    }

    /// Product `self · other`, tagged with `kind` and revalidated.
    pub fn compose(&self, other: &Self, kind: GroupKind) -> Result<Self, PencilError> {
        Self::new(kind, self.matrix.checked_mul(&other.matrix)?)
    }

    pub fn top_block(&self) -> Matrix<T> {
        let idx: Vec<usize> = (0..self.n).collect();
        self.matrix.submatrix(&idx, &idx)
    }

    pub fn bottom_block(&self) -> Matrix<T> {
        let idx: Vec<usize> = (self.n..2 * self.n + 1).collect();
        self.matrix.submatrix(&idx, &idx)
    }

    pub fn lower_left_block(&self) -> Matrix<T> {
        let rows: Vec<usize> = (self.n..2 * self.n + 1).collect();
        let cols: Vec<usize> = (0..self.n).collect();
        self.matrix.submatrix(&rows, &cols)
    }
}

impl BlockGroupElement<BigInt> {
    /// Element over `Z/qZ`: entries reduced and the determinant conditions checked mod `q`.
    pub fn new_mod(kind: GroupKind, matrix: &Matrix<BigInt>, modulus: &BigInt) -> Result<Self, PencilError> {
        let matrix = matrix.map(|x| x.mod_floor(modulus));
        let q = modulus.clone();
        let n = Self::validate(kind, &matrix, &move |x: BigInt| x.mod_floor(&q))?;
        Ok(BlockGroupElement { n, matrix, kind })
    }

    pub fn to_rational(&self) -> BlockGroupElement<BigRational> {
        BlockGroupElement { n: self.n, matrix: to_rational(&self.matrix), kind: self.kind }
    }
}

fn check_action<T: Ring>(g: &BlockGroupElement<T>, w: &SymPair<T>) -> Result<(), PencilError> {
    if g.n != w.n {
        return Err(PencilError::SizeMismatch(g.matrix.rows(), w.size()));
    }
    if !g.kind.preserves(w.space) {
        return Err(PencilError::Incompatible { group: g.kind, space: w.space });
    }
    Ok(())
}

/// `g · (A, B) = (g A gᵀ, g B gᵀ)`.
pub fn act<T: Ring>(g: &BlockGroupElement<T>, w: &SymPair<T>) -> Result<SymPair<T>, PencilError> {
    check_action(g, w)?;
    SymPair::new(g.matrix.congruence(&w.a), g.matrix.congruence(&w.b), w.space)
}

/// The action over `Z/qZ`.
pub fn act_mod(
    g: &BlockGroupElement<BigInt>,
    w: &SymPair<BigInt>,
    modulus: &BigInt,
) -> Result<SymPair<BigInt>, PencilError> {
    check_action(g, w)?;
    let red = |m: Matrix<BigInt>| m.map(|x| x.mod_floor(modulus));
    SymPair::new(red(g.matrix.congruence(&w.a)), red(g.matrix.congruence(&w.b)), w.space)
}

/// `(g(aA − bB)gᵀ, g(cA − dB)gᵀ)` for `gamma = [[a, b], [c, d]]`, `N = 3` only.
pub fn act_gl2_twist<T: Ring>(
    gamma: [[T; 2]; 2],
    g: &BlockGroupElement<T>,
    w: &SymPair<T>,
) -> Result<SymPair<T>, PencilError> {
    if w.n != 1 {
        return Err(PencilError::NotTernary);
    }
    let [[a, b], [c, d]] = gamma;
    if (a.clone() * d.clone() - b.clone() * c.clone()).is_zero() {
        return Err(PencilError::SingularTwist);
    }
    let new_a = &w.a.scale(&a) - &w.b.scale(&b);
    let new_b = &w.a.scale(&c) - &w.b.scale(&d);
    act(g, &SymPair::new(new_a, new_b, w.space)?)
}

/// Factor `g ∈ G_N(Q)` as `h1 · h2` with `h1 ∈ H1`, `h2 ∈ H2`.
pub fn split_frobenius(
    g: &BlockGroupElement<BigRational>,
) -> Result<(BlockGroupElement<BigRational>, BlockGroupElement<BigRational>), PencilError> {
    if !has_block_shape(GroupKind::G, g.n, &g.matrix) {
        return Err(PencilError::NotInGroup(GroupKind::G));
    }
    let n = g.n;
    let size = 2 * n + 1;
    let x = g.lower_left_block().checked_mul(&inverse(&g.top_block())?)?;
    let h1 = Matrix::from_fn(size, size, |i, j| {
        if i == j {
            BigRational::one()
        } else if i >= n && j < n {
            x.get(i - n, j).clone()
        } else {
            BigRational::zero()
        }
    });
    let h2 = Matrix::from_fn(size, size, |i, j| if (i < n) == (j < n) { g.matrix.get(i, j).clone() } else { BigRational::zero() });
    Ok((BlockGroupElement::new(GroupKind::H1, h1)?, BlockGroupElement::new(GroupKind::H2, h2)?))
}

/// Integral version of [`split_frobenius`]; fails when the unipotent factor is not integral.
pub fn split_frobenius_integral(
    g: &BlockGroupElement<BigInt>,
) -> Result<(BlockGroupElement<BigInt>, BlockGroupElement<BigInt>), PencilError> {
    let (h1, h2) = split_frobenius(&g.to_rational())?;
    let lift = |h: &BlockGroupElement<BigRational>| -> Result<BlockGroupElement<BigInt>, PencilError> {
        let m = to_integer(&h.matrix).ok_or(PencilError::NonIntegral)?;
        BlockGroupElement::new(h.kind, m)
    };
    Ok((lift(&h1)?, lift(&h2)?))
}

/// The conjugated unipotent `h1′ = h2⁻¹ h1 h2`, whose lower block is `g″⁻¹ X g′`.
pub fn conjugated_unipotent(
    h1: &BlockGroupElement<BigRational>,
    h2: &BlockGroupElement<BigRational>,
) -> Result<BlockGroupElement<BigRational>, PencilError> {
    let n = h1.n;
    let size = 2 * n + 1;
    let x = h1.lower_left_block();
    let lower = inverse(&h2.bottom_block())?.checked_mul(&x)?.checked_mul(&h2.top_block())?;
    let m = Matrix::from_fn(size, size, |i, j| {
        if i == j {
            BigRational::one()
        } else if i >= n && j < n {
            lower.get(i - n, j).clone()
        } else {
            BigRational::zero()
        }
    });
    BlockGroupElement::new(GroupKind::H1, m)
}

/// Checks `h1 · h2 = h2 · h1′` with `h1′` from [`conjugated_unipotent`].
pub fn commute_identity_check(h1: &BlockGroupElement<BigRational>, h2: &BlockGroupElement<BigRational>) -> bool {
    if h1.kind != GroupKind::H1 || h2.kind != GroupKind::H2 || h1.n != h2.n {
        return false;
    }
    let Ok(h1p) = conjugated_unipotent(h1, h2) else { return false };
    let left = h1.matrix.checked_mul(&h2.matrix);
    let right = h2.matrix.checked_mul(&h1p.matrix);
    matches!((left, right), (Ok(l), Ok(r)) if l == r)
}

/// Order of the finite group `kind(F_p)`, by enumerating every `N × N` matrix mod `p`.
pub fn brute_force_group_order(kind: GroupKind, n: usize, p: u64) -> u64 {
    let size = 2 * n + 1;
    let cells = size * size;
    let total = p.checked_pow(cells as u32).expect("enumeration too large");
    let q = BigInt::from(p);
    let mut count = 0;
    let mut digits = vec![0u64; cells];
    for _ in 0..total {
        let m = Matrix::from_fn(size, size, |i, j| BigInt::from(digits[i * size + j]));
        if BlockGroupElement::new_mod(kind, &m, &q).is_ok() {
            count += 1;
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < p {
                break;
            }
            *d = 0;
        }
    }
    count
}

/// Whether an elementary transvection `I + t·E_ij` lies in the group.
fn transvection_allowed(kind: GroupKind, n: usize, i: usize, j: usize) -> bool {
    let same_block = (i < n) == (j < n);
    match kind {
        GroupKind::SL => true,
        GroupKind::G => !(i < n && j >= n),
        GroupKind::H1 => i >= n && j < n,
        GroupKind::H2 | GroupKind::SLnxSLn1 => same_block,
        GroupKind::L => same_block && i > j,
    }
}

/// Random integral element: a product of transvections with entries in `[-bound, bound]`,
/// and for groups that allow it a sign flip of one coordinate in each block.
pub fn random_integral_element(
    kind: GroupKind,
    n: usize,
    steps: usize,
    bound: i64,
    rng: &mut impl rand::Rng,
) -> BlockGroupElement<BigInt> {
    let size = 2 * n + 1;
    let mut m = Matrix::<BigInt>::identity(size);
    let moves: Vec<(usize, usize)> = (0..size)
        .flat_map(|i| (0..size).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && transvection_allowed(kind, n, i, j))
        .collect();
    for _ in 0..steps {
        if moves.is_empty() {
            break;
        }
        let (i, j) = moves[rng.gen_range(0..moves.len())];
        let t = BigInt::from(rng.gen_range(-bound..=bound));
        for c in 0..size {
            let v = m.get(i, c) + &t * m.get(j, c);
            m.set(i, c, v);
        }
    }
    let flip = matches!(kind, GroupKind::G | GroupKind::H2) || (kind == GroupKind::SL && n > 0);
    if flip && rng.gen_bool(0.5) {
        let (r1, r2) = if kind == GroupKind::SL { (0, 1) } else { (rng.gen_range(0..n), rng.gen_range(n..size)) };
        for r in [r1, r2] {
            for c in 0..size {
                let v = -m.get(r, c).clone();
                m.set(r, c, v);
            }
        }
    }
    BlockGroupElement::new(kind, m).expect("generated inside the group")
}

fn random_rational(rng: &mut impl rand::Rng, bound: i64, nonzero: bool) -> BigRational {
    loop {
        let num = rng.gen_range(-bound..=bound);
        let den = rng.gen_range(1..=bound);
        if !nonzero || num != 0 {
            return BigRational::new(num.into(), den.into());
        }
    }
}

/// Random rational element of `L_N`, `SL_n × SL_{n+1}`, `H1`, `H2`, `G_N` or `SL_N`.
pub fn random_rational_element(
    kind: GroupKind,
    n: usize,
    bound: i64,
    rng: &mut impl rand::Rng,
) -> BlockGroupElement<BigRational> {
    let size = 2 * n + 1;
    loop {
        let mut m = Matrix::from_fn(size, size, |i, j| {
            if i == j && kind == GroupKind::H1 {
                BigRational::one()
            } else if has_block_shape(kind, n, &single_entry(size, i, j)) {
                random_rational(rng, bound, i == j)
            } else {
                BigRational::zero()
            }
        });
        // Rescale one row per block so the determinant conditions hold.
        match kind {
            GroupKind::H1 => {}
            GroupKind::L | GroupKind::SLnxSLn1 => {
                let (d1, d2) = block_dets(n, &m, &|x| x).expect("square");
                if d1.is_zero() || d2.is_zero() {
                    continue;
                }
                scale_row(&mut m, 0, &d1.recip());
                scale_row(&mut m, size - 1, &d2.recip());
            }
            _ => {
                let d = m.det_bareiss().expect("square");
                if d.is_zero() {
                    continue;
                }
                scale_row(&mut m, size - 1, &d.recip());
            }
        }
        if let Ok(g) = BlockGroupElement::new(kind, m) {
            return g;
        }
    }
}

fn single_entry(size: usize, i: usize, j: usize) -> Matrix<BigRational> {
    Matrix::from_fn(size, size, |r, c| {
        if (r, c) == (i, j) || r == c {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    })
}

fn scale_row(m: &mut Matrix<BigRational>, r: usize, t: &BigRational) {
    for c in 0..m.cols() {
        let v = m.get(r, c) * t;
        m.set(r, c, v);
    }
}

/// Random integral symmetric pair in the given space with entries in `[-bound, bound]`.
pub fn random_pair(space: Space, n: usize, bound: i64, rng: &mut impl rand::Rng) -> SymPair<BigInt> {
    let size = 2 * n + 1;
    let mut a = Matrix::zeros(size, size);
    let mut b = Matrix::zeros(size, size);
    for i in 0..size {
        for j in i..size {
            if !forced_zero(space, n, i, j, false) {
                let v = BigInt::from(rng.gen_range(-bound..=bound));
                a.set(i, j, v.clone());
                a.set(j, i, v);
            }
            if !forced_zero(space, n, i, j, true) {
                let v = BigInt::from(rng.gen_range(-bound..=bound));
                b.set(i, j, v.clone());
                b.set(j, i, v);
            }
        }
    }
    SymPair::new(a, b, space).expect("pattern respected")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn space_patterns_at_n1() {
        let w = SymPair::from_i64(&[&[0, 0, 1], &[0, 0, 0], &[1, 0, 0]], &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 0]], Space::Wtop0);
        assert!(w.is_ok());
        let bad = SymPair::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 0]], &[&[0; 3], &[0; 3], &[0; 3]], Space::Wtop0);
        assert_eq!(bad.unwrap_err(), PencilError::NotInSpace(Space::Wtop0));
        let not_sym = SymPair::from_i64(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]], &[&[0; 3], &[0; 3], &[0; 3]], Space::W);
        assert_eq!(not_sym.unwrap_err(), PencilError::NotSymmetric);
    }

    #[test]
    fn group_orders_over_f2() {
        assert_eq!(brute_force_group_order(GroupKind::G, 1, 2), 24);
        assert_eq!(brute_force_group_order(GroupKind::SLnxSLn1, 1, 2), 6);
        assert_eq!(brute_force_group_order(GroupKind::H1, 1, 2), 4);
    }

    #[test]
    fn frobenius_split_recomposes() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for n in 1..=2 {
            let g = random_rational_element(GroupKind::G, n, 5, &mut rng);
            let (h1, h2) = split_frobenius(&g).unwrap();
            assert_eq!(h1.matrix().checked_mul(h2.matrix()).unwrap(), *g.matrix());
            assert!(commute_identity_check(&h1, &h2));
        }
    }

    #[test]
    fn pair_text_round_trip() {
        let text = "A=0,0,1;0,1,0;1,0,0;B=0,1,0;1,0,0;0,0,0";
        let w: SymPair = text.parse().unwrap();
        assert_eq!(w.to_string(), text);
        assert_eq!(w.space(), Space::W00);
    }
}
