use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{
    block_diag, clear_lower, clear_top, match_top, reduce_rational_pair, shape_torus, ClearMode, Elementary,
    ReductionError, ReductionTrace,
};
use crate::algebra::intmath::{pow_big, rational_residue, valuation, valuation_rational};
use crate::algebra::linalg::inverse;
use crate::algebra::Matrix;
use crate::invariants::{a_shape_col, b_shape_col, hyperdeterminant, section_q};
use crate::pencils::{in_space, BlockGroupElement, GroupKind, Space, SymPair};

use super::local::LocalOrbitRep;

/// Fundamental-domain representative of a pair over `Z/p^k`.
#[derive(Clone, Debug)]
pub struct PadicCanonical {
    pub p: u64,
    /// Precision at which `rep` is an orbit invariant.
    pub precision: u32,
    pub avec: Vec<u32>,
    pub bvec: Vec<u32>,
    pub lambda_val: u32,
    pub rep: SymPair<BigInt>,
    /// Group element over `Z/p^k` carrying the input to `rep` (mod `p^precision`).
    pub certificate: BlockGroupElement<BigInt>,
}

impl PadicCanonical {
    pub fn key(&self) -> (Vec<u32>, Vec<u32>, SymPair<BigInt>) {
        (self.avec.clone(), self.bvec.clone(), self.rep.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Equivalent,
    Distinct,
    Inconclusive,
}

/// `U ∈ SL(Z_(p))` with `U · m` lower-triangular: column by column from the right, the entry of
/// least valuation is swapped into place (with a sign) and used to clear the entries above it.
pub(crate) fn iwasawa(m: &Matrix<BigRational>, p: u64) -> Result<Matrix<BigRational>, ReductionError> {
    let size = m.rows();
    let mut work = m.clone();
    let mut u = Matrix::<BigRational>::identity(size);
    let row_op = |x: &mut Matrix<BigRational>, target: usize, src: usize, t: &BigRational| {
        for c in 0..size {
            let v = x.get(target, c) + t * x.get(src, c);
            x.set(target, c, v);
        }
    };
    let swap = |x: &mut Matrix<BigRational>, r1: usize, r2: usize| {
        for c in 0..size {
            let v1 = x.get(r1, c).clone();
            let v2 = x.get(r2, c).clone();
            x.set(r1, c, v2);
            x.set(r2, c, -v1);
        }
    };
    for j in (0..size).rev() {
        let best = (0..=j)
            .filter(|&r| !work.get(r, j).is_zero())
            .min_by_key(|&r| valuation_rational(work.get(r, j), p).unwrap())
            .ok_or(ReductionError::Degenerate("singular matrix in Iwasawa step"))?;
        if best != j {
            swap(&mut work, best, j);
            swap(&mut u, best, j);
        }
        let pivot = work.get(j, j).clone();
        for r in 0..j {
            if work.get(r, j).is_zero() {
                continue;
            }
            let t = -work.get(r, j) / &pivot;
            row_op(&mut work, r, j, &t);
            row_op(&mut u, r, j, &t);
        }
    }
    Ok(u)
}

fn top_in_shape(w: &SymPair<BigRational>) -> bool {
    let t = w.project_top();
    in_space(Space::Wtop0, w.n(), t.a(), t.b())
}

/// Steps shared by both canonicalizations: Iwasawa move into the shape, torus to exact prime
/// powers (corner left free), then box reduction of the top blocks.
fn canonical_top(trace: &mut ReductionTrace, p: u64, modulus: &BigInt) -> Result<(Vec<u32>, Vec<u32>), ReductionError> {
    let n = trace.end.n();
    let target = section_q(n, &BigRational::one())?;
    let (t0a, t0b) = target.top_blocks();
    let (ta, tb) = trace.end.top_blocks();
    let (pm, km) = match_top((&ta, &tb), (&t0a, &t0b))?;
    let u_top = iwasawa(&pm, p)?;
    let u_bottom = iwasawa(&inverse(&km)?.transpose(), p)?;
    let g = block_diag(&u_top, &u_bottom);
    if g != Matrix::identity(2 * n + 1) {
        trace.push(GroupKind::SLnxSLn1, Elementary::General(g));
    }
    if !top_in_shape(&trace.end) {
        return Err(ReductionError::Internal("Iwasawa step left the shape"));
    }
    reduce_rational_pair(&mut trace.end, modulus);
    let w = &trace.end;
    let val = |x: &BigRational| valuation_rational(x, p).map(|v| v as u32);
    let mut avec = Vec::with_capacity(n);
    let mut bvec = Vec::with_capacity(n);
    for i in 0..n {
        avec.push(val(w.a().get(i, n + a_shape_col(n, i))).ok_or(ReductionError::Internal("vanishing pivot"))?);
        bvec.push(val(w.b().get(i, n + b_shape_col(n, i))).ok_or(ReductionError::Internal("vanishing pivot"))?);
    }
    let powers = |v: &[u32]| -> Vec<BigRational> { v.iter().map(|&e| BigRational::from_integer(pow_big(p, e))).collect() };
    let d = shape_torus(w, &powers(&avec), &powers(&bvec));
    if d.iter().any(|x| !x.is_one()) {
        trace.push(GroupKind::L, Elementary::Diagonal(d));
    }
    clear_top(trace, ClearMode::Padic(p));
    reduce_rational_pair(&mut trace.end, modulus);
    Ok((avec, bvec))
}

fn lift(w: &SymPair<BigInt>, p: u64, k: u32) -> Result<(SymPair<BigRational>, u32, BigInt), ReductionError> {
    let modulus = pow_big(p, k);
    let lifted = w.reduce_mod(&modulus).to_rational();
    let lambda = hyperdeterminant(&lifted)?.to_integer();
    let nu = valuation(&lambda, p).filter(|&v| v < k).ok_or(ReductionError::Precision(k))?;
    Ok((lifted, nu, modulus))
}

fn integral_residues(w: &SymPair<BigRational>, modulus: &BigInt) -> SymPair<BigInt> {
    w.map(|x| rational_residue(x, modulus).expect("p-integral")).expect("pattern preserved")
}

/// Canonical representative of the `(SL_n × SL_{n+1})(Z/p^k)`-orbit of a `Wtop` pair; an
/// invariant modulo `p^{k−ν_p(λ)}`.
pub fn canonicalize_padic(w: &SymPair<BigInt>, p: u64, k: u32) -> Result<PadicCanonical, ReductionError> {
    if !in_space(Space::Wtop, w.n(), w.a(), w.b()) {
        return Err(ReductionError::WrongSpace);
    }
    let (lifted, nu, modulus) = lift(w, p, k)?;
    let mut trace = ReductionTrace::new(lifted.with_space(Space::Wtop)?);
    let (avec, bvec) = canonical_top(&mut trace, p, &modulus)?;
    let precision = k - nu;
    let rep = integral_residues(&trace.end, &pow_big(p, precision));
    let cert = trace.total_matrix().map(|x| rational_residue(x, &modulus).expect("p-integral"));
    let certificate = BlockGroupElement::new_mod(GroupKind::SLnxSLn1, &cert, &modulus)?;
    Ok(PadicCanonical { p, precision, avec, bvec, lambda_val: nu, rep, certificate })
}

/// Canonical representative of the `G_N(Z/p^k)`-orbit of a `W0` pair, normalized so that the
/// corner is an exact prime power and the lower block is box-reduced; an invariant modulo
/// `p^{k−2ν_p(λ)}`.
pub fn canonicalize_padic_w0(w: &SymPair<BigInt>, p: u64, k: u32) -> Result<PadicCanonical, ReductionError> {
    let n = w.n();
    if !in_space(Space::W0, n, w.a(), w.b()) {
        return Err(ReductionError::WrongSpace);
    }
    let (lifted, nu, modulus) = lift(w, p, k)?;
    if 2 * nu >= k {
        return Err(ReductionError::Precision(k));
    }
    let mut trace = ReductionTrace::new(lifted.with_space(Space::W0)?);
    let (avec, bvec) = canonical_top(&mut trace, p, &modulus)?;
    let corner = trace.end.b().get(0, n + b_shape_col(n, 0)).clone();
    let unit = corner / BigRational::from_integer(pow_big(p, bvec[0]));
    if !unit.is_one() {
        let size = 2 * n + 1;
        let mut d = vec![BigRational::one(); size];
        d[0] = unit.recip();
        d[size - 1] = unit;
        trace.push(GroupKind::H2, Elementary::Diagonal(d));
        clear_top(&mut trace, ClearMode::Padic(p));
    }
    clear_lower(&mut trace, ClearMode::Padic(p));
    reduce_rational_pair(&mut trace.end, &modulus);
    let precision = k - 2 * nu;
    let rep = integral_residues(&trace.end, &pow_big(p, precision));
    let cert = trace.total_matrix().map(|x| rational_residue(x, &modulus).expect("p-integral"));
    let certificate = BlockGroupElement::new_mod(GroupKind::G, &cert, &modulus)?;
    Ok(PadicCanonical { p, precision, avec, bvec, lambda_val: nu, rep, certificate })
}

/// Decide whether two local representatives lie in one `G_N(Z_p)`-orbit by comparing canonical
/// forms at depth `m`; the comparison is only meaningful once `m ≥ 3e + 1`.
pub fn orbit_equivalent_padic(r1: &LocalOrbitRep, r2: &LocalOrbitRep, m: u32) -> Result<Verdict, ReductionError> {
    if r1.p != r2.p || r1.entries.n() != r2.entries.n() {
        return Ok(Verdict::Distinct);
    }
    if r1.lambda_val != r2.lambda_val || r1.avec != r2.avec || r1.bvec != r2.bvec {
        return Ok(Verdict::Distinct);
    }
    if m < 3 * r1.lambda_val + 1 {
        return Ok(Verdict::Inconclusive);
    }
    let c1 = canonicalize_padic_w0(&r1.entries, r1.p, m)?;
    let c2 = canonicalize_padic_w0(&r2.entries, r2.p, m)?;
    Ok(if c1.key() == c2.key() { Verdict::Equivalent } else { Verdict::Distinct })
}
