//! Cubic rings attached to binary cubic forms, their fractional ideals, and the 2-torsion
//! ideal classes `I² = R`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::hnf::{hnf, hnf_coords};
use crate::algebra::intmath::{factorize, gcd_i128};
use crate::forms::BinaryForm;

#[derive(Debug, Error, PartialEq)]
pub enum RingError {
    #[error("cubic rings need a form of degree 3, got {0}")]
    NotCubic(usize),
    #[error("coefficients too large for the ring kernel")]
    Overflow,
    #[error("the form has zero discriminant")]
    ZeroDiscriminant,
    #[error("lattice is not of full rank")]
    Degenerate,
    #[error("found {0} two-torsion ideals, which is not a power of 2")]
    NotPowerOfTwo(usize),
}

pub type Elt = [i128; 3];

/// `Z⟨1, ω, θ⟩` with `ωθ = −ad`, `ω² = −ac + bω − aθ`, `θ² = −bd + dω − cθ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubicRing {
    pub form: [i128; 4],
    /// `table[i][j]` is the product of basis elements `i` and `j`.
    pub table: [[Elt; 3]; 3],
}

impl CubicRing {
    pub fn from_form(f: &BinaryForm) -> Result<Self, RingError> {
        if f.degree() != 3 {
            return Err(RingError::NotCubic(f.degree()));
        }
        let c: Vec<i128> = f.coeffs().iter().map(|x| x.to_i64().map(i128::from)).collect::<Option<_>>().ok_or(RingError::Overflow)?;
        Ok(Self::from_coeffs([c[0], c[1], c[2], c[3]]))
    }

    pub fn from_coeffs(form: [i128; 4]) -> Self {
        let [a, b, c, d] = form;
        let one = [1, 0, 0];
        let w = [0, 1, 0];
        let t = [0, 0, 1];
        let ww = [-a * c, b, -a];
        let wt = [-a * d, 0, 0];
        let tt = [-b * d, d, -c];
        CubicRing { form, table: [[one, w, t], [w, ww, wt], [t, wt, tt]] }
    }

    pub fn one(&self) -> Elt {
        [1, 0, 0]
    }

    pub fn mul(&self, x: &Elt, y: &Elt) -> Elt {
        let mut out = [0i128; 3];
        for i in 0..3 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..3 {
                if y[j] == 0 {
                    continue;
                }
                let s = x[i] * y[j];
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    *o += s * t;
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `x`; row `i` is `x · eᵢ`.
    pub fn mul_matrix(&self, x: &Elt) -> [[i128; 3]; 3] {
        let basis = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        basis.map(|e| self.mul(x, &e))
    }

    pub fn trace(&self, x: &Elt) -> i128 {
        let m = self.mul_matrix(x);
        m[0][0] + m[1][1] + m[2][2]
    }

    pub fn norm(&self, x: &Elt) -> i128 {
        det3(&self.mul_matrix(x))
    }

    /// `det(Tr(eᵢeⱼ))`.
    pub fn discriminant(&self) -> i128 {
        let basis: [Elt; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        let mut m = [[0i128; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.trace(&self.mul(&basis[i], &basis[j]));
            }
        }
        det3(&m)
    }

    /// Commutativity and associativity on all basis triples.
    pub fn check_axioms(&self) -> bool {
        let basis: [Elt; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        for x in &basis {
            for y in &basis {
                if self.mul(x, y) != self.mul(y, x) {
                    return false;
                }
                for z in &basis {
                    if self.mul(&self.mul(x, y), z) != self.mul(x, &self.mul(y, z)) {
                        return false;
                    }
                }
            }
        }
        self.mul(&self.one(), &[3, -5, 7]) == [3, -5, 7]
    }
}

fn det3(m: &[[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `(1/denom) · L` with `L ⊆ R` a full lattice in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FracIdeal {
    pub denom: i128,
    pub basis: [[i128; 3]; 3],
}

impl FracIdeal {
    pub fn unit() -> Self {
        FracIdeal { denom: 1, basis: [[1, 0, 0], [0, 1, 0], [0, 0, 1]] }
    }

    /// The lattice spanned by `gens / denom`, normalized.
    pub fn from_generators(gens: &[Elt], denom: i128) -> Result<Self, RingError> {
        let rows: Vec<Vec<i128>> = gens.iter().map(|g| g.to_vec()).collect();
        let h = hnf(&rows, 3).ok_or(RingError::Degenerate)?;
        let basis = [0, 1, 2].map(|i| [h[i][0], h[i][1], h[i][2]]);
        Ok(FracIdeal { denom, basis }.normalized())
    }

    /// The principal ideal `(x)`.
    pub fn principal(ring: &CubicRing, x: &Elt) -> Result<Self, RingError> {
        Self::from_generators(&ring.mul_matrix(x), 1)
    }

    fn normalized(mut self) -> Self {
        let mut g = self.denom;
        for row in &self.basis {
            for &x in row {
                g = gcd_i128(g, x);
            }
        }
        let g = g.abs();
        if g > 1 {
            self.denom /= g;
            for row in self.basis.iter_mut() {
                row.iter_mut().for_each(|x| *x /= g);
            }
        }
        self
    }

    /// `[R : L]` for the numerator lattice.
    pub fn numerator_index(&self) -> i128 {
        self.basis[0][0] * self.basis[1][1] * self.basis[2][2]
    }

    pub fn contains_numerator(&self, v: &Elt) -> bool {
        let rows: Vec<Vec<i128>> = self.basis.iter().map(|r| r.to_vec()).collect();
        hnf_coords(&rows, v).is_some()
    }

    /// Closed under multiplication by `ω` and `θ`.
    pub fn is_ideal(&self, ring: &CubicRing) -> bool {
        self.basis.iter().all(|b| [[0, 1, 0], [0, 0, 1]].iter().all(|g| self.contains_numerator(&ring.mul(b, g))))
    }
}

/// HNF of the nine basis products.
pub fn ideal_mul(x: &FracIdeal, y: &FracIdeal, ring: &CubicRing) -> Result<FracIdeal, RingError> {
    let mut gens = Vec::with_capacity(9);
    for a in &x.basis {
        for b in &y.basis {
            gens.push(ring.mul(a, b));
        }
    }
    FracIdeal::from_generators(&gens, x.denom * y.denom)
}

/// `R_p` is maximal iff `f ≢ 0 mod p` and no point of `P¹(F_p)` is a root of `f` mod `p²`
/// with vanishing derivative mod `p`.
pub fn is_maximal_at(f: &[i128; 4], p: u64) -> bool {
    let p = p as i128;
    if f.iter().all(|c| c % p == 0) {
        return false;
    }
    let [a, b, c, d] = *f;
    let p2 = p * p;
    // the point (1:0)
    if a % p2 == 0 && b % p == 0 {
        return false;
    }
    for r in 0..p {
        let val = ((a * r + b) * r + c) * r + d;
        let deriv_x = (3 * a * r + 2 * b) * r + c;
        // f(x, y) ↦ f(y + r x, x) puts (r:1) at (1:0); its first two coefficients are f(r,1) and ∂ₓf(r,1)
        if val.rem_euclid(p2) == 0 && deriv_x.rem_euclid(p) == 0 {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoTorsion {
    pub count: usize,
    pub ideals: Vec<FracIdeal>,
    /// Per prime `(p, local count)`.
    pub local: Vec<(u64, usize)>,
    /// The search bound covered every `m` with `m² | disc` and no prime hit the lifting budget.
    pub complete: bool,
}

/// Candidate budget per lifting level.
const LIFT_BUDGET: usize = 4_000_000;

/// Local 2-torsion ideals `I = (αR + p^{2j}R)/p^j` with `α ∉ pR` and `α² ∈ p^{2j}R_p^×`.
fn local_two_torsion(ring: &CubicRing, p: u64, jmax: u32) -> (Vec<FracIdeal>, bool) {
    let p = p as i128;
    let mut found: BTreeSet<FracIdeal> = BTreeSet::new();
    found.insert(FracIdeal::unit());
    let mut complete = true;
    for j in 1..=jmax {
        let top = 2 * j;
        let mut level: Vec<Elt> = Vec::new();
        for a0 in 0..p {
            for a1 in 0..p {
                for a2 in 0..p {
                    let x = [a0, a1, a2];
                    if x != [0, 0, 0] && ring.mul(&x, &x).iter().all(|c| c % p == 0) {
                        level.push(x);
                    }
                }
            }
        }
        let mut modulus = p;
        for _ in 1..top {
            let next_mod = modulus * p;
            let mut next = Vec::new();
            for base in &level {
                for d0 in 0..p {
                    for d1 in 0..p {
                        for d2 in 0..p {
                            let x = [base[0] + modulus * d0, base[1] + modulus * d1, base[2] + modulus * d2];
                            if ring.mul(&x, &x).iter().all(|c| c % next_mod == 0) {
                                next.push(x);
                            }
                        }
                    }
                }
                if next.len() > LIFT_BUDGET {
                    complete = false;
                    break;
                }
            }
            if !complete {
                break;
            }
            level = next;
            modulus = next_mod;
        }
        if !complete {
            break;
        }
        let pj = p.pow(j);
        let p2j = pj * pj;
        for alpha in level {
            let sq = ring.mul(&alpha, &alpha);
            let unit = sq.map(|c| c / p2j);
            if ring.norm(&unit) % p == 0 {
                continue;
            }
            let mut gens: Vec<Elt> = ring.mul_matrix(&alpha).to_vec();
            gens.extend([[p2j, 0, 0], [0, p2j, 0], [0, 0, p2j]]);
            if let Ok(ideal) = FracIdeal::from_generators(&gens, pj) {
                if ideal.denom == pj && ideal.numerator_index() == pj * pj * pj {
                    found.insert(ideal);
                }
            }
        }
    }
    (found.into_iter().collect(), complete)
}

/// All `I` with `I² = R` whose denominator `m` satisfies `m ≤ bound` and `m² | disc`.
pub fn two_torsion_ideals(ring: &CubicRing, bound: i128) -> Result<TwoTorsion, RingError> {
    let disc = ring.discriminant();
    if disc == 0 {
        return Err(RingError::ZeroDiscriminant);
    }
    let mut locals: Vec<(u64, Vec<FracIdeal>)> = Vec::new();
    let mut complete = true;
    let mut largest_m: i128 = 1;
    for (p, v) in factorize(&BigInt::from(disc)) {
        if v < 2 {
            continue;
        }
        let full = v / 2;
        largest_m *= (p as i128).pow(full);
        let mut jmax = full;
        while jmax > 0 && (p as i128).pow(jmax) > bound {
            jmax -= 1;
        }
        let (ideals, ok) = local_two_torsion(ring, p, jmax);
        complete &= ok;
        locals.push((p, ideals));
    }
    complete &= bound >= largest_m;
    let mut products = vec![FracIdeal::unit()];
    for (_, ideals) in &locals {
        let mut next = Vec::new();
        for a in &products {
            for b in ideals {
                let c = ideal_mul(a, b, ring)?;
                if c.denom <= bound {
                    next.push(c);
                }
            }
        }
        products = next;
    }
    let unit = FracIdeal::unit();
    let mut ideals = BTreeSet::new();
    for i in products {
        if ideal_mul(&i, &i, ring)? == unit && i.is_ideal(ring) {
            ideals.insert(i);
        }
    }
    let count = ideals.len();
    if !count.is_power_of_two() {
        return Err(RingError::NotPowerOfTwo(count));
    }
    Ok(TwoTorsion { count, ideals: ideals.into_iter().collect(), local: locals.iter().map(|(p, v)| (*p, v.len())).collect(), complete })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(c: [i128; 4]) -> CubicRing {
        CubicRing::from_coeffs(c)
    }

    #[test]
    fn axioms_and_discriminant() {
        for c in [[1, 0, 0, -2], [1, 0, 1, 1], [2, -3, 5, 7], [0, 1, 1, 0], [3, 0, 0, 0]] {
            let r = ring(c);
            assert!(r.check_axioms(), "{c:?}");
            let f = BinaryForm::from_i64(&c.map(|x| x as i64)).unwrap();
            assert_eq!(BigInt::from(r.discriminant()), f.discriminant(), "{c:?}");
        }
        assert_eq!(ring([1, 0, 0, -2]).discriminant(), -108);
    }

    #[test]
    fn cube_root_of_two() {
        let r = ring([1, 0, 0, -2]);
        let w = [0, 1, 0];
        let cube = r.mul(&w, &r.mul(&w, &w));
        assert!(cube == [2, 0, 0] || cube == [-2, 0, 0], "{cube:?}");
    }

    #[test]
    fn ideal_products() {
        let r = ring([1, 0, 1, 1]);
        let two = FracIdeal::principal(&r, &[2, 0, 0]).unwrap();
        let four = FracIdeal::principal(&r, &[4, 0, 0]).unwrap();
        let unit = FracIdeal::unit();
        assert_eq!(ideal_mul(&unit, &two, &r).unwrap(), two);
        assert_eq!(ideal_mul(&two, &two, &r).unwrap(), four);
        let a = [1, 2, -1];
        let b = [3, 0, 1];
        let pa = FracIdeal::principal(&r, &a).unwrap();
        let pb = FracIdeal::principal(&r, &b).unwrap();
        assert_eq!(ideal_mul(&pa, &pb, &r).unwrap(), FracIdeal::principal(&r, &r.mul(&a, &b)).unwrap());
        assert!(pa.is_ideal(&r));
    }

    #[test]
    fn maximal_ring_has_trivial_two_torsion() {
        let r = ring([1, 0, 1, 1]);
        assert_eq!(r.discriminant(), -31);
        let t = two_torsion_ideals(&r, 100).unwrap();
        assert_eq!(t.count, 1);
        assert!(t.complete);
    }

    #[test]
    fn maximality_criterion() {
        assert!(is_maximal_at(&[1, 0, 0, -2], 2));
        assert!(is_maximal_at(&[1, 0, 0, -2], 3));
        assert!(!is_maximal_at(&[1, 0, 0, -4], 2));
        assert!(!is_maximal_at(&[1, 0, 0, -8], 2));
    }
}
