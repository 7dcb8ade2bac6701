use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::padic::canonicalize_padic_w0;
use super::ReductionError;
use crate::algebra::intmath::{intersect_classes, mod_inverse_i128, pow_big, solve_linear_congruence, valuation};
use crate::forms::BinaryForm;
use crate::invariants::{a_shape_col, b_shape_col, is_projective_at, solve_diagonal, InvariantError};
use crate::pencils::{Space, SymPair};

/// A representative of one `G_N(Z_p)`-orbit on `W0(Z_p)` above a fixed form, given by an
/// integral pair in the reduced shape.
#[derive(Clone, Debug)]
pub struct LocalOrbitRep {
    pub p: u64,
    /// Working precision used for the duplicate check.
    pub k: u32,
    pub avec: Vec<u32>,
    pub bvec: Vec<u32>,
    pub lambda_val: u32,
    pub entries: SymPair<BigInt>,
    pub projective: Option<bool>,
}

impl LocalOrbitRep {
    pub fn residues(&self) -> SymPair<BigInt> {
        self.entries.reduce_mod(&pow_big(self.p, self.k))
    }
}

/// Valuation vectors `(a⃗, b⃗)` with `Σ (n−i)·aᵢ + (i+1)·bᵢ = e` (0-based `i`).
pub fn valuation_vectors(n: usize, e: u32) -> Vec<(Vec<u32>, Vec<u32>)> {
    let weights: Vec<u32> = (0..n).map(|i| (n - i) as u32).chain((0..n).map(|i| i as u32 + 1)).collect();
    let mut out = Vec::new();
    let mut cur = vec![0u32; 2 * n];
    fn rec(idx: usize, left: u32, w: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if idx == w.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut v = 0;
        while v * w[idx] <= left {
            cur[idx] = v;
            rec(idx + 1, left - v * w[idx], w, cur, out);
            v += 1;
        }
        cur[idx] = 0;
    }
    let mut flat = Vec::new();
    rec(0, e, &weights, &mut cur, &mut flat);
    for v in flat {
        out.push((v[..n].to_vec(), v[n..].to_vec()));
    }
    out
}

/// Free entries of the reduced shape: `(is_b, row, col, exponent)` in full 0-based coordinates,
/// meaning the entry ranges over `[0, p^exponent)`.
pub fn box_entries(n: usize, avec: &[u32], bvec: &[u32]) -> Vec<(bool, usize, usize, u32)> {
    let mut out = Vec::new();
    for i in 0..n {
        for c in 0..=n {
            if i + c > n {
                out.push((false, i, n + c, avec[n - c]));
            }
        }
        for c in 0..=n {
            if i + c >= n && c != b_shape_col(n, i) {
                out.push((true, i, n + c, bvec[i]));
            }
        }
    }
    for r in 0..n {
        for c in r + 1..=n {
            out.push((false, n + r, n + c, avec[n - c]));
        }
        for c in r + 1..=n {
            out.push((true, n + r, n + c, bvec[n - 1 - r]));
        }
    }
    out
}

fn shape_skeleton(n: usize, p: u64, avec: &[u32], bvec: &[u32]) -> SymPair<BigRational> {
    let mut w = SymPair::<BigRational>::zero(n, Space::W0);
    for i in 0..n {
        w.set_pair_entry(false, i, n + a_shape_col(n, i), BigRational::from_integer(pow_big(p, avec[i])));
        w.set_pair_entry(true, i, n + b_shape_col(n, i), BigRational::from_integer(pow_big(p, bvec[i])));
    }
    w
}

/// All reduced-shape representatives above `f` with `ν_p(λ) = e`, found by running every box
/// entry through its residue range and solving the diagonal exactly.
pub fn enumerate_local_reps(f: &BinaryForm, p: u64, e: u32, k: u32) -> Result<Vec<LocalOrbitRep>, ReductionError> {
    let n = f.half_degree();
    if f.discriminant().is_zero() {
        return Err(ReductionError::ZeroDiscriminant);
    }
    let k = k.max(3 * e + 1);
    let target: Vec<BigRational> = f.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let mut reps = Vec::new();
    let mut seen = BTreeSet::new();
    for (avec, bvec) in valuation_vectors(n, e) {
        let skeleton = shape_skeleton(n, p, &avec, &bvec);
        let boxes = box_entries(n, &avec, &bvec);
        let sizes: Vec<u64> = boxes.iter().map(|b| p.pow(b.3)).collect();
        let mut digits = vec![0u64; boxes.len()];
        loop {
            let mut template = skeleton.clone();
            for (d, &(is_b, i, j, _)) in digits.iter().zip(&boxes) {
                if *d != 0 {
                    template.set_pair_entry(is_b, i, j, BigRational::from_integer((*d).into()));
                }
            }
            match solve_diagonal(&template, &target) {
                Ok(solved) => {
                    if let Some(entries) = solved.to_integer() {
                        let projective = if n == 1 { Some(is_projective_at(&entries, p)?) } else { None };
                        let key = canonicalize_padic_w0(&entries, p, k)?.key();
                        if seen.insert(format!("{key:?}")) {
                            reps.push(LocalOrbitRep {
                                p,
                                k,
                                avec: avec.clone(),
                                bvec: bvec.clone(),
                                lambda_val: e,
                                entries,
                                projective,
                            });
                        }
                    }
                }
                Err(InvariantError::Solve(_)) => return Err(ReductionError::Internal("diagonal solve")),
                Err(other) => return Err(other.into()),
            }
            let mut idx = 0;
            while idx < digits.len() {
                digits[idx] += 1;
                if digits[idx] < sizes[idx] {
                    break;
                }
                digits[idx] = 0;
                idx += 1;
            }
            if idx == digits.len() {
                break;
            }
        }
    }
    Ok(reps)
}

/// Orbit counts above one form at one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalCount {
    pub p: u64,
    /// `(e, orbits, projective orbits)`; projective counts are only defined for cubics.
    pub per_e: Vec<(u32, u64, Option<u64>)>,
    pub total: u64,
    pub projective_total: Option<u64>,
    /// True when every `e` that can carry an orbit was examined.
    pub complete: bool,
    /// Precision `p^{2e_max+1}` beyond which the counts no longer depend on `f`.
    pub precision: u32,
}

/// Largest `e` that can carry an orbit: `λ²` divides the discriminant of `inv`.
pub fn support_bound(f: &BinaryForm, p: u64) -> u32 {
    valuation(&f.discriminant(), p).map(|v| v / 2).unwrap_or(u32::MAX)
}

/// Orbit counts for `e = 0..=e_max`, using the closed-form cubic path when the coefficients fit.
pub fn local_orbit_count(f: &BinaryForm, p: u64, e_max: u32) -> Result<LocalCount, ReductionError> {
    let disc = f.discriminant();
    if disc.is_zero() {
        return Err(ReductionError::ZeroDiscriminant);
    }
    let bound = support_bound(f, p);
    let top = e_max.min(bound);
    let mut per_e = Vec::new();
    let small: Option<Vec<i128>> = f.coeffs().iter().map(|c| c.to_i128()).collect();
    for e in 0..=top {
        let (count, proj) = match (f.degree(), &small) {
            (3, Some(c)) if fits_fast_path(c, p, e) => {
                let (c, pc) = count_cubic(&[c[0], c[1], c[2], c[3]], p, e, true);
                (c, Some(pc))
            }
            _ => {
                let reps = enumerate_local_reps(f, p, e, 3 * e + 1)?;
                let proj = if f.degree() == 3 {
                    Some(reps.iter().filter(|r| r.projective == Some(true)).count() as u64)
                } else {
                    None
                };
                (reps.len() as u64, proj)
            }
        };
        per_e.push((e, count, proj));
    }
    let total = per_e.iter().map(|x| x.1).sum();
    let projective_total = per_e.iter().map(|x| x.2).sum::<Option<u64>>();
    Ok(LocalCount { p, per_e, total, projective_total, complete: e_max >= bound, precision: 2 * top + 1 })
}

fn fits_fast_path(c: &[i128], p: u64, e: u32) -> bool {
    let limit = 1i128 << 40;
    let pe = (p as i128).checked_pow(2 * e + 2);
    c.iter().all(|x| x.abs() < limit) && pe.is_some_and(|v| v < 1i128 << 60)
}

/// Projectivity mod `p` of a small cubic pair.
pub fn projective_mod_p_n1(a: &[[i128; 3]; 3], b: &[[i128; 3]; 3], f1: i128, f2: i128, p: i128) -> bool {
    let m = |x: i128| x.rem_euclid(p);
    let am = a.map(|r| r.map(m));
    let bm = b.map(|r| r.map(m));
    // adjugate of A: adj[i][j] is the (j, i) cofactor
    let mut adj = [[0i128; 3]; 3];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let d = am[r0][c0] * am[r1][c1] - am[r0][c1] * am[r1][c0];
            *entry = m(if (i + j) % 2 == 0 { d } else { -d });
        }
    }
    let mut adj_b = [[0i128; 3]; 3];
    for k in 0..3 {
        for j in 0..3 {
            adj_b[k][j] = m(adj[k][0] * bm[0][j] + adj[k][1] * bm[1][j] + adj[k][2] * bm[2][j]);
        }
    }
    let (f1, f2) = (m(f1), m(f2));
    let mut c0 = [[0i128; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let s = m(bm[i][0] * adj_b[0][j] + bm[i][1] * adj_b[1][j] + bm[i][2] * adj_b[2][j]);
            c0[i][j] = m(-s + f1 * bm[i][j] + f2 * am[i][j]);
        }
    }
    let flat = |x: &[[i128; 3]; 3]| [x[0][0], x[0][1], x[0][2], x[1][1], x[1][2], x[2][2]];
    rank3x6_mod_p([flat(&c0), flat(&bm), flat(&am)], p) == 3
}

fn rank3x6_mod_p(mut rows: [[i128; 6]; 3], p: i128) -> usize {
    let mut rank = 0;
    for col in 0..6 {
        let Some(pivot) = (rank..3).find(|&r| rows[r][col] % p != 0) else { continue };
        rows.swap(rank, pivot);
        let inv = mod_inverse_i128(rows[rank][col], p).expect("p prime");
        for r in 0..3 {
            if r != rank && rows[r][col] != 0 {
                let factor = (rows[r][col] * inv).rem_euclid(p);
                for c in 0..6 {
                    rows[r][c] = (rows[r][c] - factor * rows[rank][c]).rem_euclid(p);
                }
            }
        }
        rank += 1;
        if rank == 3 {
            break;
        }
    }
    rank
}

/// Number of orbits (and projective orbits) with `ν_p(λ) = e` above an integral cubic, from
/// the explicit reduced shape: `A = [[0,0,α],[0,a₀,X],[α,X,a₁]]`, `B = [[0,β,γ],[β,b₀,Y],[γ,Y,b₁]]`
/// with `α = p^a`, `β = p^b`, `a + b = e`, `γ, Y < β`, `X < α`.
pub fn count_cubic(f: &[i128; 4], p: u64, e: u32, with_projective: bool) -> (u64, u64) {
    let [f0, f1, f2, f3] = *f;
    let p = p as i128;
    let mut count = 0u64;
    let mut proj = 0u64;
    for a in 0..=e {
        let b = e - a;
        let alpha = p.pow(a);
        let beta = p.pow(b);
        let beta2 = beta * beta;
        if f0 % (alpha * alpha) != 0 || f1 % alpha != 0 {
            continue;
        }
        let a0 = f0 / (alpha * alpha);
        let f1p = f1 / alpha;
        for gamma in 0..beta {
            let Some((x0, xstep)) = solve_linear_congruence(2 * beta, f1p + 2 * a0 * gamma, alpha) else { continue };
            let mut x = x0;
            while x < alpha {
                let b0_num = -f1p - 2 * a0 * gamma + 2 * x * beta;
                debug_assert_eq!(b0_num % alpha, 0);
                let b0 = b0_num / alpha;
                let c3 = f2 - a0 * gamma * gamma - 2 * alpha * b0 * gamma + 2 * x * beta * gamma;
                let class_a = solve_linear_congruence(2 * alpha * beta, -c3, beta2);
                let class_b = solve_linear_congruence(2 * beta * gamma, f3 + b0 * gamma * gamma, beta2);
                if let Some((y0, ystep)) = class_a.zip(class_b).and_then(|(c1, c2)| intersect_classes(c1, c2)) {
                    let mut y = y0;
                    while y < beta {
                        count += 1;
                        if with_projective {
                            let a1 = (c3 + 2 * y * alpha * beta) / beta2;
                            let b1 = (-f3 - b0 * gamma * gamma + 2 * y * beta * gamma) / beta2;
                            let am = [[0, 0, alpha], [0, a0, x], [alpha, x, a1]];
                            let bm = [[0, beta, gamma], [beta, b0, y], [gamma, y, b1]];
                            if projective_mod_p_n1(&am, &bm, f1, f2, p) {
                                proj += 1;
                            }
                        }
                        y += ystep;
                    }
                }
                x += xstep;
            }
        }
    }
    (count, proj)
}
