use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{block_diag, clear_lower, clear_top, match_top, shape_torus, ClearMode, Elementary, ReductionError, ReductionTrace};
use crate::algebra::linalg::inverse;
use crate::algebra::Matrix;
use crate::forms::BinaryForm;
use crate::invariants::{hyperdeterminant, inv_coeffs, section_inv_rational, section_q};
use crate::pencils::{in_space, GroupKind, Space, SymPair};

/// Rational form with denominators cleared; the discriminant only changes by a nonzero factor.
fn integral_multiple(f: &[BigRational]) -> BinaryForm {
    let den = f.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
    let coeffs = f.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    BinaryForm::new(coeffs).expect("odd degree")
}

/// Reduce a `Wtop0` pair with `λ ≠ 0` to `section_q(n, λ)` using `L_N(Q)`.
pub fn reduce_ln_field(w: &SymPair<BigRational>) -> Result<(SymPair<BigRational>, ReductionTrace), ReductionError> {
    if !in_space(Space::Wtop0, w.n(), w.a(), w.b()) {
        return Err(ReductionError::WrongSpace);
    }
    let start = w.clone().with_space(Space::Wtop0)?;
    let lambda = hyperdeterminant(&start)?;
    if lambda.is_zero() {
        return Err(ReductionError::ZeroLambda);
    }
    let n = w.n();
    let mut trace = ReductionTrace::new(start);
    clear_top(&mut trace, ClearMode::Field);
    let ones = vec![BigRational::one(); n];
    let d = shape_torus(&trace.end, &ones, &ones);
    if d.iter().any(|x| !x.is_one()) {
        trace.push(GroupKind::L, Elementary::Diagonal(d));
    }
    let canonical = section_q(n, &lambda)?;
    if trace.end != canonical {
        return Err(ReductionError::Internal("L_N reduction did not reach the section"));
    }
    Ok((canonical, trace))
}

/// Reduce a `W0` pair with nonzero discriminant to `section_inv(inv(w))` using `G_N(Q)`:
/// one `H2` move fixing the top blocks, then unipotent `H1` moves.
pub fn reduce_gn_field(w: &SymPair<BigRational>) -> Result<(SymPair<BigRational>, ReductionTrace), ReductionError> {
    let n = w.n();
    if !in_space(Space::W0, n, w.a(), w.b()) {
        return Err(ReductionError::WrongSpace);
    }
    let start = w.clone().with_space(Space::W0)?;
    let f = inv_coeffs(&start);
    if integral_multiple(&f).discriminant().is_zero() {
        return Err(ReductionError::ZeroDiscriminant);
    }
    if hyperdeterminant(&start)?.is_zero() {
        return Err(ReductionError::ZeroLambda);
    }
    let mut trace = ReductionTrace::new(start);
    let target = section_q(n, &BigRational::one())?;
    let (target_a, target_b) = target.top_blocks();
    let (tilde_a, tilde_b) = trace.end.top_blocks();
    let (p, k) = match_top((&tilde_a, &tilde_b), (&target_a, &target_b))?;
    let scale = p.det_bareiss()? / k.det_bareiss()?;
    let top = inverse(&p.scale(&scale))?;
    let bottom = k.scale(&scale).transpose();
    let g = block_diag(&top, &bottom);
    if g != Matrix::identity(2 * n + 1) {
        trace.push(GroupKind::H2, Elementary::General(g));
    }
    clear_lower(&mut trace, ClearMode::Field);
    let canonical = section_inv_rational(n, &f)?;
    if trace.end.a() != canonical.a() || trace.end.b() != canonical.b() {
        return Err(ReductionError::Internal("G_N reduction did not reach the section"));
    }
    let canonical = canonical.with_space(Space::W0)?;
    Ok((canonical, trace))
}
