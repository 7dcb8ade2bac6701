use std::time::Instant;

use pencil_core::algebra::intmath::factorize;
use pencil_core::cubic_rings::*;
use pencil_core::forms::{cubic_disc_i64, for_each_graded, BinaryForm};
use pencil_core::reduction::local_orbit_count;

fn projective_product(f: &BinaryForm) -> u64 {
    factorize(&f.discriminant())
        .into_iter()
        .filter(|&(_, v)| v >= 2)
        .map(|(p, v)| local_orbit_count(f, p, v / 2).unwrap().projective_total.unwrap())
        .product()
}

fn to128(c: &[i64]) -> [i128; 4] {
    [c[0] as i128, c[1] as i128, c[2] as i128, c[3] as i128]
}

/// Forms of height ≤ 3 with `0 < |disc| ≤ 2000` and a square factor in the discriminant,
/// split into non-maximal and maximal orders.
fn corpus() -> (Vec<[i64; 4]>, Vec<[i64; 4]>) {
    let (mut nonmax, mut max) = (Vec::new(), Vec::new());
    for_each_graded(3, 3, |c| {
        let c = [c[0], c[1], c[2], c[3]];
        let d = cubic_disc_i64(&c);
        if d == 0 || d.abs() > 2000 {
            return;
        }
        let square = factorize(&d.into()).iter().any(|&(_, v)| v >= 2);
        if !square {
            return;
        }
        let maximal = factorize(&d.into()).iter().all(|&(p, _)| is_maximal_at(&to128(&c), p));
        if maximal && max.len() < 12 {
            max.push(c);
        } else if !maximal && nonmax.len() < 24 {
            nonmax.push(c);
        }
    });
    (nonmax, max)
}

#[test]
fn two_torsion_matches_projective_local_counts() {
    let t0 = Instant::now();
    let (nonmax, max) = corpus();
    assert!(nonmax.len() >= 20);
    for c in nonmax.iter().chain(&max) {
        let f = BinaryForm::from_i64(c).unwrap();
        let ring = CubicRing::from_form(&f).unwrap();
        let t = two_torsion_ideals(&ring, 1_000).unwrap();
        assert!(t.complete, "{c:?}");
        assert_eq!(t.count as u64, projective_product(&f), "{c:?}");
        for i in &t.ideals {
            assert_eq!(ideal_mul(i, i, &ring).unwrap(), FracIdeal::unit());
        }
    }
    for c in &max {
        let ring = CubicRing::from_coeffs(to128(c));
        assert_eq!(two_torsion_ideals(&ring, 1_000).unwrap().count, 1, "{c:?}");
    }
    eprintln!("{} forms in {:?}", nonmax.len() + max.len(), t0.elapsed());
}

#[test]
fn named_examples() {
    for (c, expected) in [([1i64, 0, 0, -2], 1usize), ([1, 0, 1, 1], 1), ([1, 0, 0, -4], 2)] {
        let f = BinaryForm::from_i64(&c).unwrap();
        let ring = CubicRing::from_form(&f).unwrap();
        assert_eq!(two_torsion_ideals(&ring, 100).unwrap().count, expected);
        assert_eq!(projective_product(&f), expected as u64);
    }
}

#[test]
fn equivalent_forms_give_equal_discriminants() {
    let f = BinaryForm::from_i64(&[2, -3, 5, 7]).unwrap();
    for g in [[[1, 1], [0, 1]], [[0, 1], [-1, 0]], [[2, 1], [1, 1]]] {
        let h = f.transform(g);
        let a = CubicRing::from_form(&f).unwrap().discriminant();
        let b = CubicRing::from_form(&h).unwrap().discriminant();
        assert_eq!(a, b);
    }
}
