//! The full oracle battery: every closed form against its brute-force or independent check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::algebra::intmath::factorize;
use crate::cubic_rings::{two_torsion_ideals, CubicRing};
use crate::densities::measure::MeasureMode;
use crate::densities::*;
use crate::forms::BinaryForm;
use crate::invariants::{section_inv, section_q};
use crate::pencils::{act, brute_force_group_order, random_rational_element, GroupKind, Space};
use crate::reduction::{local_orbit_count, reduce_gn_field, reduce_ln_field};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Profile {
    Quick,
    Full,
}

/// Deliberate corruptions used to confirm that the battery notices a wrong formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Adds one to the closed-form `c′(k)`.
    MatrixCount,
    /// Replaces `1 + p⁻²` by `1 + p⁻³` as the projective target.
    ProjectiveMass,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub anchor: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub profile: Profile,
    pub fault: Option<Fault>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: &'static str, anchor: &'static str, passed: bool, detail: String) -> Check {
    Check { name, anchor, passed, detail }
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn matrix_counts(fault: Option<Fault>) -> Check {
    let mut bad = Vec::new();
    for (p, k) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let (c2, mut c1, c) = count_cpp(p, k);
        if fault == Some(Fault::MatrixCount) {
            c1 += 1u32;
        }
        let brute = brute_matrix_counts(p, k);
        if (c2, c1, c) != (brute.0.into(), brute.1.into(), brute.2.into()) {
            bad.push(format!("p={p} k={k}"));
        }
    }
    check("matrix-counts", "2x2 matrices over Z/p^k by determinant valuation", bad.is_empty(), bad.join("; "))
}

fn group_volumes() -> Check {
    let g3 = brute_force_group_order(GroupKind::G, 1, 2);
    let slsl = brute_force_group_order(GroupKind::SLnxSLn1, 1, 2);
    let mut ok = BigRational::from_integer(g3.into()) / r(64, 1) == vol_gn(2, 1);
    ok &= BigRational::from_integer(slsl.into()) / r(8, 1) == vol_sl_sl(2, 1);
    for p in [2u64, 3, 5, 7, 11] {
        for n in 1..=4 {
            ok &= vol_gn(p, n) * xi(p, n) == BigRational::one();
        }
    }
    check("group-volumes", "finite group orders against the volume product formula", ok, format!("#G3(F2)={g3} #SL1xSL2(F2)={slsl}"))
}

fn s_masses(profile: Profile) -> Check {
    let primes: &[u64] = if profile == Profile::Full { &[2, 3] } else { &[2] };
    let mut bad = 0;
    for &p in primes {
        for ([a, b, c, d], count) in brute_s_masses(p) {
            bad += usize::from(count != s_mass(p, a, b, c, d));
        }
    }
    let unit_slice = projective_slice_mass(2, 1) * xi(2, 1) == BigRational::one();
    check("projective-fibres", "projective pairs over F_p by top-corner quadruple", bad == 0 && unit_slice, format!("{bad} mismatched quadruples"))
}

fn local_masses(profile: Profile, fault: Option<Fault>) -> Check {
    let bound = if profile == Profile::Full { 100 } else { 30 };
    let mut bad = Vec::new();
    for p in crate::algebra::intmath::primes_up_to(bound) {
        let pq = BigRational::from_integer(p.into());
        let exponent = if fault == Some(Fault::ProjectiveMass) { 3 } else { 2 };
        let target = BigRational::one() + num_traits::pow(pq.clone(), exponent).recip();
        if projective_local_mass(p) != target {
            bad.push(format!("projective p={p}"));
        }
        for n in [1usize, 2] {
            if full_local_mass(p, n) != zeta_product_factor(p, n) {
                bad.push(format!("full p={p} n={n}"));
            }
        }
    }
    let (partial, tail) = truncated_full_mass(2, 1, 6);
    let gap = full_local_mass(2, 1) - partial;
    if gap < BigRational::zero() || gap > tail {
        bad.push("truncation tail".into());
    }
    check("local-masses", "slice sums against the zeta-factor and 1+p^-2 closed forms", bad.is_empty(), bad.join("; "))
}

fn lambda_volumes() -> Check {
    let vols = brute_lambda_slice_volumes(2, 3);
    let ok = vols.iter().all(|(&(a, b), v)| *v == vol_gn(2, 1) * BigRational::new(BigInt::one(), BigInt::from(2).pow(2 * a + b)));
    check("lambda-slices", "volume of top-corner slices with fixed valuations", ok && vols.len() == 6, format!("{} slices", vols.len()))
}

fn measure(profile: Profile) -> Check {
    let k = if profile == Profile::Full { 2 } else { 1 };
    let rep = verify_change_of_variables(2, k, MeasureMode::Exhaustive);
    check("measure-identity", "orbit counts over cubic cells against xi times |lambda| over pair cells", rep.passed, format!("p=2 k={k} boundary<={}", rep.boundary_bound))
}

fn euler(profile: Profile) -> Check {
    let cutoff = if profile == Profile::Full { 1_000_000 } else { 10_000 };
    let full = euler_product(EulerFamily::Full { n: 1 }, cutoff);
    let proj = euler_product(EulerFamily::Projective, cutoff);
    let ok = match (&full, &proj) {
        (Ok(f), Ok(p)) => f.value.contains(1.977_304_350_297_296) && p.value.contains(1.519_817_754_635_066),
        _ => false,
    };
    check("euler-products", "enclosures of zeta(2)zeta(3) and zeta(2)/zeta(4)", ok, format!("cutoff {cutoff}"))
}

fn reductions(profile: Profile) -> Check {
    let reps = if profile == Profile::Full { 40 } else { 8 };
    let mut rng = StdRng::seed_from_u64(2024);
    let mut failures = 0;
    for n in [1usize, 2] {
        let canonical = section_q(n, &r(6, 1)).expect("nonzero");
        for _ in 0..reps {
            let g = random_rational_element(GroupKind::L, n, 5, &mut rng);
            let ok = act(&g, &canonical).ok().and_then(|w| reduce_ln_field(&w).ok()).is_some_and(|(c, _)| c == canonical);
            failures += usize::from(!ok);
        }
        let f = BinaryForm::from_i64(if n == 1 { &[1, 2, -3, 5] } else { &[1, 0, 2, -1, 3, 1] }).expect("odd");
        let canonical = section_inv(&f).expect("section").to_rational().with_space(Space::W0).expect("in W0");
        for _ in 0..reps {
            let g = random_rational_element(GroupKind::G, n, 5, &mut rng);
            let ok = act(&g, &canonical).ok().and_then(|w| reduce_gn_field(&w).ok()).is_some_and(|(c, _)| c == canonical);
            failures += usize::from(!ok);
        }
    }
    check("field-reduction", "random translates of canonical pairs reduce back", failures == 0, format!("{failures} failures"))
}

fn two_torsion() -> Check {
    let mut bad = Vec::new();
    for c in [[1i64, 0, 0, -2], [1, 0, 1, 1], [1, 0, 0, -4], [1, -3, 3, 7], [1, 0, 4, 4]] {
        let f = BinaryForm::from_i64(&c).expect("cubic");
        let ring = CubicRing::from_form(&f).expect("cubic");
        let brute = two_torsion_ideals(&ring, 1_000).map(|t| t.count as u64);
        let local: u64 = factorize(&f.discriminant())
            .into_iter()
            .filter(|&(_, v)| v >= 2)
            .map(|(p, v)| local_orbit_count(&f, p, v / 2).ok().and_then(|l| l.projective_total).unwrap_or(0))
            .product();
        if brute != Ok(local) || !ring.check_axioms() || BigInt::from(ring.discriminant()) != f.discriminant() {
            bad.push(format!("{c:?}"));
        }
    }
    check("two-torsion", "ideals squaring to the unit ideal against projective local orbit counts", bad.is_empty(), bad.join("; "))
}

pub fn verify_all(profile: Profile, fault: Option<Fault>) -> VerifyReport {
    let checks = vec![
        matrix_counts(fault),
        group_volumes(),
        s_masses(profile),
        local_masses(profile, fault),
        lambda_volumes(),
        measure(profile),
        euler(profile),
        reductions(profile),
        two_torsion(),
    ];
    let passed = checks.iter().all(|c| c.passed);
    VerifyReport { profile, fault, checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_profile_passes_and_faults_are_caught() {
        assert!(verify_all(Profile::Quick, None).passed);
        let bad = verify_all(Profile::Quick, Some(Fault::MatrixCount));
        assert!(!bad.passed);
        assert_eq!(bad.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect::<Vec<_>>(), vec!["matrix-counts"]);
        assert!(!verify_all(Profile::Quick, Some(Fault::ProjectiveMass)).passed);
    }
}
