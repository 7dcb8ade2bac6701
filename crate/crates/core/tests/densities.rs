use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use pencil_core::densities::measure::MeasureMode;
use pencil_core::densities::*;

#[test]
fn s_mass_formula_matches_exhaustive_scan() {
    for p in [2u64, 3] {
        let t = Instant::now();
        let table = brute_s_masses(p);
        assert_eq!(table.len() as u64, p.pow(4));
        for ([a, b, c, d], count) in table {
            assert_eq!(count, s_mass(p, a, b, c, d), "p={p} quad={:?}", [a, b, c, d]);
        }
        eprintln!("p={p} scan {:?}", t.elapsed());
    }
    assert_eq!(s_mass(2, 1, 0, 0, 1), 64);
    assert_eq!(s_mass(2, 0, 1, 0, 0), 32);
}

#[test]
fn measure_identity_exhaustive_p2_k2() {
    let t = Instant::now();
    let r = verify_change_of_variables(2, 2, MeasureMode::Exhaustive);
    eprintln!("{:?} {}", t.elapsed(), serde_json_lite(&r));
    assert!(r.passed);
}

#[test]
fn measure_identity_sampling_p3_k2() {
    let r = verify_change_of_variables(3, 2, MeasureMode::Sampling { samples: 1_000_000, seed: 7 });
    assert!(r.passed, "{r:?}");
}

fn serde_json_lite(r: &MeasureReport) -> String {
    format!("{:?}", r.rows.iter().map(|x| (x.e, x.lhs.to_string(), x.rhs_estimate)).collect::<Vec<_>>())
}

#[test]
fn euler_products_enclose_zeta_values() {
    let t = Instant::now();
    let full = euler_product(EulerFamily::Full { n: 1 }, 1_000_000).unwrap();
    let proj = euler_product(EulerFamily::Projective, 1_000_000).unwrap();
    eprintln!("{:?} {:?} {:?}", t.elapsed(), full.value, proj.value);
    assert!(full.value.contains(1.977_304_350_297_296));
    assert!(proj.value.contains(1.519_817_754_635_066));
    for (iv, digits) in [(full.value, "1.977304"), (proj.value, "1.519818")] {
        assert_eq!(format!("{:.6}", iv.lo), digits);
        assert_eq!(format!("{:.6}", iv.hi), digits);
    }
    let coarse = euler_product(EulerFamily::Projective, 10_000).unwrap();
    assert!(proj.value.is_within(&coarse.value));
    let _ = BigRational::from_integer(BigInt::from(1));
}
