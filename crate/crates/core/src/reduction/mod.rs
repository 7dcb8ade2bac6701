//! Canonical forms over Q and Z_p, local orbit representatives, and local orbit counts.

pub mod field;
pub mod local;
pub mod padic;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::intmath::{pow_big, rational_residue, valuation_rational};
use crate::algebra::{AlgebraError, Matrix};
use crate::invariants::{a_shape_col, b_shape_col, InvariantError};
use crate::pencils::{BlockGroupElement, GroupKind, PencilError, SymPair};

pub use field::{reduce_gn_field, reduce_ln_field};
pub use local::{enumerate_local_reps, local_orbit_count, LocalCount};
pub use padic::{canonicalize_padic, canonicalize_padic_w0, orbit_equivalent_padic, PadicCanonical, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("λ vanishes; no canonical form")]
    ZeroLambda,
    #[error("zero discriminant")]
    ZeroDiscriminant,
    #[error("λ ≡ 0 mod p^{0}: precision insufficient")]
    Precision(u32),
    #[error("pair is not in the required space")]
    WrongSpace,
    #[error("degenerate pair: {0}")]
    Degenerate(&'static str),
    #[error("internal consistency failure: {0}")]
    Internal(&'static str),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// One elementary move, acting on pairs by congruence.
#[derive(Clone, Debug, PartialEq)]
pub enum Elementary {
    /// `I + t·E_ij`.
    Transvection { i: usize, j: usize, t: BigRational },
    Diagonal(Vec<BigRational>),
    General(Matrix<BigRational>),
}

impl Elementary {
    pub fn matrix(&self, size: usize) -> Matrix<BigRational> {
        match self {
            Elementary::Transvection { i, j, t } => {
                let mut m = Matrix::identity(size);
                m.set(*i, *j, t.clone());
                m
            }
            Elementary::Diagonal(d) => Matrix::from_fn(size, size, |r, c| if r == c { d[r].clone() } else { BigRational::zero() }),
            Elementary::General(m) => m.clone(),
        }
    }

    pub fn apply(&self, w: &mut SymPair<BigRational>) {
        match self {
            Elementary::Transvection { i, j, t } => w.transvect(*i, *j, t),
            Elementary::Diagonal(d) => w.scale_diagonal(d),
            Elementary::General(m) => {
                let a = m.congruence(w.a());
                let b = m.congruence(w.b());
                *w = SymPair::new(a, b, w.space()).expect("general moves preserve the space");
            }
        }
    }
}

/// Applied moves in order, each tagged with the subgroup it lies in.
#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub start: SymPair<BigRational>,
    pub end: SymPair<BigRational>,
    pub steps: Vec<(GroupKind, Elementary)>,
}

impl ReductionTrace {
    fn new(start: SymPair<BigRational>) -> Self {
        ReductionTrace { end: start.clone(), start, steps: Vec::new() }
    }

    fn push(&mut self, kind: GroupKind, step: Elementary) {
        step.apply(&mut self.end);
        self.steps.push((kind, step));
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Product of the moves, last move on the left.
    pub fn total_matrix(&self) -> Matrix<BigRational> {
        let size = self.start.size();
        self.steps.iter().fold(Matrix::identity(size), |acc, (_, s)| s.matrix(size).checked_mul(&acc).expect("square"))
    }

    pub fn total(&self, kind: GroupKind) -> Result<BlockGroupElement<BigRational>, PencilError> {
        BlockGroupElement::new(kind, self.total_matrix())
    }

    /// Re-apply every move to the start pair.
    pub fn replay(&self) -> SymPair<BigRational> {
        let mut w = self.start.clone();
        for (_, s) in &self.steps {
            s.apply(&mut w);
        }
        w
    }
}

/// How a clearing step picks its multiplier.
#[derive(Clone, Copy, Debug)]
pub(crate) enum ClearMode {
    /// Kill the entry: `t = −E / pivot`.
    Field,
    /// Reduce the entry into `[0, p^v)` with `v = ν_p(pivot)`.
    Padic(u64),
}

impl ClearMode {
    fn multiplier(self, entry: &BigRational, pivot: &BigRational) -> BigRational {
        match self {
            ClearMode::Field => -entry / pivot,
            ClearMode::Padic(p) => {
                let v = valuation_rational(pivot, p).expect("nonzero pivot");
                let r = rational_residue(entry, &pow_big(p, v as u32)).expect("p-integral entry");
                -(entry - BigRational::from_integer(r)) / pivot
            }
        }
    }
}

/// Clear (or box-reduce) the off-shape top entries of a pair whose top blocks are in the
/// `Wtop0` shape: row by row, `A` entries by increasing column, then `B` entries.
pub(crate) fn clear_top(trace: &mut ReductionTrace, mode: ClearMode) {
    let n = trace.end.n();
    for i in 0..n {
        for c in 0..=n {
            if i + c >= n + 1 {
                let r = n - c;
                let entry = trace.end.a().get(i, n + c).clone();
                let pivot = trace.end.a().get(r, n + a_shape_col(n, r)).clone();
                let t = mode.multiplier(&entry, &pivot);
                if !t.is_zero() {
                    trace.push(GroupKind::L, Elementary::Transvection { i, j: r, t });
                }
            }
        }
        for c in 0..=n {
            if i + c >= n {
                let d = b_shape_col(n, i);
                let entry = trace.end.b().get(i, n + c).clone();
                let pivot = trace.end.b().get(i, n + d).clone();
                let t = mode.multiplier(&entry, &pivot);
                if !t.is_zero() {
                    trace.push(GroupKind::L, Elementary::Transvection { i: n + c, j: n + d, t });
                }
            }
        }
    }
}

/// Clear (or box-reduce) the off-diagonal lower-right entries with unipotent moves from `H1`,
/// assuming the top blocks are in shape.
pub(crate) fn clear_lower(trace: &mut ReductionTrace, mode: ClearMode) {
    let n = trace.end.n();
    for r0 in 0..n {
        for c in r0 + 1..=n {
            let s = n - c;
            let entry = trace.end.a().get(n + r0, n + c).clone();
            let pivot = trace.end.a().get(s, n + c).clone();
            let t = mode.multiplier(&entry, &pivot);
            if !t.is_zero() {
                trace.push(GroupKind::H1, Elementary::Transvection { i: n + r0, j: s, t });
            }
        }
        for c0 in r0 + 1..=n {
            let s = n - 1 - r0;
            let entry = trace.end.b().get(n + r0, n + c0).clone();
            let pivot = trace.end.b().get(s, n + r0).clone();
            let t = mode.multiplier(&entry, &pivot);
            if !t.is_zero() {
                trace.push(GroupKind::H1, Elementary::Transvection { i: n + c0, j: s, t });
            }
        }
    }
}

/// `c · s^x · t^y` for the torus solve.
#[derive(Clone, Debug)]
struct Mono {
    c: BigRational,
    s: i64,
    t: i64,
}

impl Mono {
    fn var_s() -> Self {
        Mono { c: BigRational::one(), s: 1, t: 0 }
    }
    fn var_t() -> Self {
        Mono { c: BigRational::one(), s: 0, t: 1 }
    }
    fn scaled_inverse(&self, num: &BigRational) -> Self {
        Mono { c: num / &self.c, s: -self.s, t: -self.t }
    }
    fn mul(&self, o: &Mono) -> Mono {
        Mono { c: &self.c * &o.c, s: self.s + o.s, t: self.t + o.t }
    }
    fn eval(&self, s: &BigRational, t: &BigRational) -> BigRational {
        &self.c * rpow(s, self.s) * rpow(t, self.t)
    }
}

fn rpow(x: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Diagonal torus element of `SL_n × SL_{n+1}` sending the shape entries to the targets; the
/// corner `B` entry (row 0) is left free.
pub(crate) fn shape_torus(w: &SymPair<BigRational>, target_a: &[BigRational], target_b: &[BigRational]) -> Vec<BigRational> {
    let n = w.n();
    let alpha = |i: usize| w.a().get(i, n + a_shape_col(n, i)).clone();
    let beta = |i: usize| w.b().get(i, n + b_shape_col(n, i)).clone();
    let mut top: Vec<Option<Mono>> = vec![None; n];
    let mut bottom: Vec<Option<Mono>> = vec![None; n + 1];
    bottom[n] = Some(Mono::var_s());
    bottom[n - 1] = Some(Mono::var_t());
    let m0 = bottom[n].as_ref().unwrap().mul(&Mono { c: alpha(0), s: 0, t: 0 });
    top[0] = Some(m0.scaled_inverse(&target_a[0]));
    for i in 1..n {
        let denom = bottom[n - i].as_ref().unwrap().mul(&Mono { c: alpha(i), s: 0, t: 0 });
        top[i] = Some(denom.scaled_inverse(&target_a[i]));
        let denom = top[i].as_ref().unwrap().mul(&Mono { c: beta(i), s: 0, t: 0 });
        bottom[n - 1 - i] = Some(denom.scaled_inverse(&target_b[i]));
    }
    let top: Vec<Mono> = top.into_iter().map(Option::unwrap).collect();
    let bottom: Vec<Mono> = bottom.into_iter().map(Option::unwrap).collect();
    let one = Mono { c: BigRational::one(), s: 0, t: 0 };
    let p1 = top.iter().fold(one.clone(), |acc, m| acc.mul(m));
    let p2 = bottom.iter().fold(one, |acc, m| acc.mul(m));
    // p1 = c1 s^{-1} t^{-(n-1)}, p2 = c2 s t^n: t = 1/(c1 c2), s = 1/(c2 t^n).
    debug_assert_eq!((p1.s, p1.t, p2.s, p2.t), (-1, -(n as i64 - 1), 1, n as i64));
    let t = (&p1.c * &p2.c).recip();
    let s = (&p2.c * rpow(&t, n as i64)).recip();
    top.iter().chain(bottom.iter()).map(|m| m.eval(&s, &t)).collect()
}

/// Replace p-integral rational entries by their residues in `[0, q)`.
pub(crate) fn reduce_rational_pair(w: &mut SymPair<BigRational>, modulus: &BigInt) {
    w.map_in_place(|x| BigRational::from_integer(rational_residue(x, modulus).expect("p-integral")));
}

/// Solve `P · T0 = T̃ · K` for both blocks at once; the solution space is expected to be a
/// line when `λ(T̃) ≠ 0`.
pub(crate) fn match_top(
    tilde: (&Matrix<BigRational>, &Matrix<BigRational>),
    target: (&Matrix<BigRational>, &Matrix<BigRational>),
) -> Result<(Matrix<BigRational>, Matrix<BigRational>), ReductionError> {
    let n = tilde.0.rows();
    let np = n * n;
    let unknowns = np + (n + 1) * (n + 1);
    let mut rows = Vec::new();
    for (tt, t0) in [(tilde.0, target.0), (tilde.1, target.1)] {
        for i in 0..n {
            for c in 0..=n {
                let mut row = vec![BigRational::zero(); unknowns];
                for j in 0..n {
                    row[i * n + j] += t0.get(j, c);
                }
                for d in 0..=n {
                    row[np + d * (n + 1) + c] -= tt.get(i, d);
                }
                rows.push(row);
            }
        }
    }
    let system = Matrix::from_rows(rows)?;
    let null = crate::algebra::linalg::nullspace(&system);
    if null.len() != 1 {
        return Err(ReductionError::Degenerate("stabilizer is not one-dimensional"));
    }
    let v = &null[0];
    let p = Matrix::from_fn(n, n, |i, j| v[i * n + j].clone());
    let k = Matrix::from_fn(n + 1, n + 1, |d, c| v[np + d * (n + 1) + c].clone());
    Ok((p, k))
}

/// Block-diagonal matrix `diag(top, bottom)`.
pub(crate) fn block_diag(top: &Matrix<BigRational>, bottom: &Matrix<BigRational>) -> Matrix<BigRational> {
    let n = top.rows();
    let size = 2 * n + 1;
    Matrix::from_fn(size, size, |i, j| match (i < n, j < n) {
        (true, true) => top.get(i, j).clone(),
        (false, false) => bottom.get(i - n, j - n).clone(),
        _ => BigRational::zero(),
    })
}
