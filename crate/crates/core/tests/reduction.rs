use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pencil_core::algebra::intmath::{pow_big, valuation};
use pencil_core::forms::BinaryForm;
use pencil_core::invariants::{hyperdeterminant, inv, section_inv, section_q};
use pencil_core::pencils::{act, act_mod, random_integral_element, random_pair, random_rational_element, GroupKind, Space};
use pencil_core::reduction::local::count_cubic;
use pencil_core::reduction::{
    canonicalize_padic, canonicalize_padic_w0, enumerate_local_reps, reduce_gn_field, reduce_ln_field,
};

fn random_form(rng: &mut StdRng, degree: usize, bound: i64) -> BinaryForm {
    loop {
        let c: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-bound..=bound)).collect();
        let f = BinaryForm::from_i64(&c).unwrap();
        if !f.discriminant().is_zero() {
            return f;
        }
    }
}

#[test]
fn ln_reduction_round_trips() {
    let mut rng = StdRng::seed_from_u64(11);
    for n in [1usize, 2] {
        for q in [5i64, 6, -4] {
            let canonical = section_q(n, &BigRational::from_integer(q.into())).unwrap();
            let (c, trace) = reduce_ln_field(&canonical).unwrap();
            assert_eq!(c, canonical);
            assert!(trace.is_empty());
            for _ in 0..20 {
                let g = random_rational_element(GroupKind::L, n, 6, &mut rng);
                let w = act(&g, &canonical).unwrap();
                let (c, trace) = reduce_ln_field(&w).unwrap();
                assert_eq!(c, canonical);
                assert_eq!(trace.replay(), c);
                trace.total(GroupKind::L).unwrap();
            }
        }
    }
}

#[test]
fn gn_reduction_round_trips() {
    let mut rng = StdRng::seed_from_u64(12);
    for degree in [3usize, 5] {
        for _ in 0..5 {
            let f = random_form(&mut rng, degree, 9);
            let canonical = section_inv(&f).unwrap().to_rational().with_space(Space::W0).unwrap();
            let (c, trace) = reduce_gn_field(&canonical).unwrap();
            assert_eq!(c, canonical);
            assert!(trace.is_empty());
            for _ in 0..10 {
                let g = random_rational_element(GroupKind::G, degree / 2, 5, &mut rng);
                let w = act(&g, &canonical).unwrap();
                let (c, trace) = reduce_gn_field(&w).unwrap();
                assert_eq!(c, canonical);
                let total = trace.total(GroupKind::G).unwrap();
                assert_eq!(act(&total, &w).unwrap(), c);
            }
        }
    }
}

#[test]
fn padic_top_canonical_form_is_orbit_invariant() {
    let mut rng = StdRng::seed_from_u64(13);
    for (n, p, k) in [(1usize, 2u64, 4u32), (1, 3, 3), (2, 2, 5), (2, 3, 4)] {
        let modulus = pow_big(p, k);
        let mut tested = 0;
        while tested < 30 {
            let w = random_pair(Space::Wtop, n, 40, &mut rng).reduce_mod(&modulus);
            let lam = hyperdeterminant(&w).unwrap();
            let Some(nu) = valuation(&(lam % &modulus), p) else { continue };
            if nu >= k {
                continue;
            }
            tested += 1;
            let c = canonicalize_padic(&w, p, k).unwrap();
            let again = canonicalize_padic(&c.rep.reduce_mod(&modulus), p, k);
            if c.lambda_val == 0 {
                assert_eq!(again.unwrap().key(), c.key());
            }
            let moved = act_mod(&c.certificate, &w, &modulus).unwrap().reduce_mod(&pow_big(p, c.precision));
            assert_eq!(moved, c.rep);
            for _ in 0..5 {
                let g = random_integral_element(GroupKind::SLnxSLn1, n, 12, 3, &mut rng);
                let w2 = act(&g, &w).unwrap().reduce_mod(&modulus);
                let c2 = canonicalize_padic(&w2, p, k).unwrap();
                assert_eq!(c2.key(), c.key(), "n={n} p={p} k={k} w={w:?}");
            }
        }
    }
}

#[test]
fn padic_w0_canonical_form_is_orbit_invariant() {
    let mut rng = StdRng::seed_from_u64(14);
    for (n, p, k) in [(1usize, 2u64, 6u32), (1, 3, 4), (2, 2, 6), (2, 3, 4)] {
        let modulus = pow_big(p, k);
        let mut tested = 0;
        while tested < 20 {
            let w = random_pair(Space::W0, n, 30, &mut rng).reduce_mod(&modulus);
            let lam = hyperdeterminant(&w).unwrap();
            let Some(nu) = valuation(&(lam % &modulus), p) else { continue };
            if 2 * nu >= k {
                continue;
            }
            tested += 1;
            let c = canonicalize_padic_w0(&w, p, k).unwrap();
            for _ in 0..5 {
                let g = random_integral_element(GroupKind::G, n, 15, 3, &mut rng);
                let w2 = act(&g, &w).unwrap().reduce_mod(&modulus);
                let c2 = canonicalize_padic_w0(&w2, p, k).unwrap();
                assert_eq!(c2.key(), c.key(), "n={n} p={p} k={k}");
            }
        }
    }
}

#[test]
fn cubic_fast_path_matches_generic_enumeration() {
    let mut rng = StdRng::seed_from_u64(15);
    let mut nontrivial = 0;
    for _ in 0..60 {
        let mut c: Vec<i64> = (0..4).map(|_| rng.gen_range(-12..=12)).collect();
        // bias toward high 2-adic and 3-adic valuation of the discriminant
        if rng.gen_bool(0.5) {
            c[0] *= 4;
            c[1] *= 2;
        }
        let f = BinaryForm::from_i64(&c).unwrap();
        if f.discriminant().is_zero() {
            continue;
        }
        for p in [2u64, 3] {
            for e in 0..=3u32 {
                let reps = enumerate_local_reps(&f, p, e, 0).unwrap();
                let proj = reps.iter().filter(|r| r.projective == Some(true)).count() as u64;
                let ci: [i128; 4] = [c[0] as i128, c[1] as i128, c[2] as i128, c[3] as i128];
                assert_eq!(count_cubic(&ci, p, e, true), (reps.len() as u64, proj), "f={f} p={p} e={e}");
                if e > 0 && !reps.is_empty() {
                    nontrivial += 1;
                }
            }
        }
    }
    assert!(nontrivial > 10);
}

#[test]
fn lambda_squared_divides_disc_at_n2() {
    let mut rng = StdRng::seed_from_u64(16);
    for _ in 0..200 {
        let w = random_pair(Space::W0, 2, 6, &mut rng);
        let lam = hyperdeterminant(&w).unwrap();
        let d = inv(&w).discriminant();
        if lam.is_zero() {
            assert!(d.is_zero());
            continue;
        }
        assert!((d % (&lam * &lam)).is_zero());
    }
    let _ = BigInt::one();
}
