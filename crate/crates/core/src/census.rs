//! Height-ordered census of binary cubic forms and their reducible orbit counts.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::intmath::{isqrt_u64, primes_up_to};
use crate::cubic_rings::is_maximal_at;
use crate::densities::{euler_product, EulerFamily, Interval};
use crate::forms::{cubic_disc_i64, cubic_irreducible_i64, divisor_table};
use crate::reduction::local::count_cubic;

/// Largest height bound accepted without an override.
pub const DEFAULT_CEILING: i64 = 40;

#[derive(Debug, Error, PartialEq)]
pub enum CensusError {
    #[error("height bound {0} exceeds the ceiling {1}")]
    AboveCeiling(i64, i64),
    #[error("signature must be 1 or 3 for cubics, got {0}")]
    BadSignature(u8),
    #[error("height bound must be at least 2")]
    EmptyRange,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalEntry {
    pub p: u64,
    pub nu: u32,
    /// Orbit counts for `e = 0, 1, …`.
    pub orbits: Vec<u64>,
    pub projective: Vec<u64>,
    pub total: u64,
    pub projective_total: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub coeffs: [i64; 4],
    pub disc: i64,
    pub signature: u8,
    pub height: i64,
    pub local: Vec<LocalEntry>,
    pub global: u64,
    pub projective: u64,
    pub maximal: bool,
    /// Primes with `ν_p(disc) = 1` whose local count was recomputed and found to be 1.
    pub double_checked: Vec<u64>,
    pub complete: bool,
}

pub const CSV_HEADER: &str = "f0,f1,f2,f3,disc,signature,height,global,projective,maximal,complete,local";

impl CensusRow {
    /// One CSV line; `local` is `p:ν:total:projective` joined by `|`.
    pub fn to_csv(&self) -> String {
        let local: Vec<String> =
            self.local.iter().map(|l| format!("{}:{}:{}:{}", l.p, l.nu, l.total, l.projective_total)).collect();
        let [a, b, c, d] = self.coeffs;
        format!(
            "{a},{b},{c},{d},{},{},{},{},{},{},{},{}",
            self.disc,
            self.signature,
            self.height,
            self.global,
            self.projective,
            self.maximal,
            self.complete,
            local.join("|")
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
struct Tally {
    forms: u64,
    global_sum: u64,
    global_sq: u64,
    projective_sum: u64,
    projective_sq: u64,
    maximal_forms: u64,
    maximal_projective_sum: u64,
    excluded: u64,
}

impl Tally {
    fn add(&mut self, row: &CensusRow) {
        if !row.complete {
            self.excluded += 1;
            return;
        }
        self.forms += 1;
        self.global_sum += row.global;
        self.global_sq += row.global * row.global;
        self.projective_sum += row.projective;
        self.projective_sq += row.projective * row.projective;
        if row.maximal {
            self.maximal_forms += 1;
            self.maximal_projective_sum += row.projective;
        }
    }

    fn merge(&mut self, o: &Tally) {
        self.forms += o.forms;
        self.global_sum += o.global_sum;
        self.global_sq += o.global_sq;
        self.projective_sum += o.projective_sum;
        self.projective_sq += o.projective_sq;
        self.maximal_forms += o.maximal_forms;
        self.maximal_projective_sum += o.maximal_projective_sum;
        self.excluded += o.excluded;
    }
}

/// Averages over forms of height below `height_bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub height_bound: i64,
    pub forms: u64,
    pub excluded: u64,
    /// Exact averages as `numerator/denominator`.
    pub average_global: String,
    pub average_projective: String,
    pub average_global_decimal: f64,
    pub average_projective_decimal: f64,
    /// Standard errors of the two averages.
    pub stderr_global: f64,
    pub stderr_projective: f64,
    /// Average projective count over rows whose ring is maximal.
    pub average_projective_maximal: String,
}

impl Checkpoint {
    fn from_tally(height_bound: i64, t: &Tally) -> Self {
        let ratio = |num: u64, den: u64| -> (String, f64) {
            if den == 0 {
                return ("0".into(), 0.0);
            }
            let r = BigRational::new(BigInt::from(num), BigInt::from(den));
            (r.to_string(), num as f64 / den as f64)
        };
        let stderr = |sum: u64, sq: u64, n: u64| -> f64 {
            if n < 2 {
                return 0.0;
            }
            let mean = sum as f64 / n as f64;
            let var = (sq as f64 / n as f64 - mean * mean).max(0.0);
            (var / n as f64).sqrt()
        };
        let (g, gd) = ratio(t.global_sum, t.forms);
        let (p, pd) = ratio(t.projective_sum, t.forms);
        let (pm, _) = ratio(t.maximal_projective_sum, t.maximal_forms);
        Checkpoint {
            height_bound,
            forms: t.forms,
            excluded: t.excluded,
            average_global: g,
            average_projective: p,
            average_global_decimal: gd,
            average_projective_decimal: pd,
            stderr_global: stderr(t.global_sum, t.global_sq, t.forms),
            stderr_projective: stderr(t.projective_sum, t.projective_sq, t.forms),
            average_projective_maximal: pm,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub name: &'static str,
    pub enclosure: Interval,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusSummary {
    pub height_bound: i64,
    pub signature: u8,
    pub final_checkpoint: Checkpoint,
    pub trajectory: Vec<Checkpoint>,
    pub exclusion_rate: f64,
    pub references: Vec<Reference>,
}

#[derive(Clone, Debug)]
pub struct CensusConfig {
    /// Forms of height strictly below this bound are counted.
    pub height_bound: i64,
    pub signature: u8,
    /// Recompute local counts at primes `p ≤ bound` with `ν_p(disc) = 1`.
    pub double_check: Option<u64>,
    /// Height bounds at which running averages are recorded.
    pub checkpoints: Vec<i64>,
    pub ceiling: i64,
}

impl CensusConfig {
    pub fn new(height_bound: i64, signature: u8) -> Self {
        CensusConfig { height_bound, signature, double_check: None, checkpoints: vec![], ceiling: DEFAULT_CEILING }
    }
}

struct Context {
    primes: Vec<u64>,
    divisors: Vec<Vec<i64>>,
    signature: u8,
    double_check: Option<u64>,
}

/// Primes `p` with `p² | d`, plus the multiplicities of every prime factor found.
fn square_primes(d: i64, primes: &[u64]) -> Vec<(u64, u32)> {
    let mut m = d.unsigned_abs();
    let mut out = Vec::new();
    for &p in primes {
        if p * p * p > m {
            break;
        }
        if m % p == 0 {
            let mut v = 0;
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            out.push((p, v));
        }
    }
    // every remaining prime factor exceeds the cube root, so at most two remain
    if m > 1 {
        let r = isqrt_u64(m);
        if r * r == m {
            out.push((r, 2));
        } else {
            out.push((m, 1));
        }
    }
    out
}

fn local_entry(f: &[i128; 4], p: u64, nu: u32) -> LocalEntry {
    let mut orbits = Vec::new();
    let mut projective = Vec::new();
    for e in 0..=nu / 2 {
        let (c, pc) = count_cubic(f, p, e, true);
        orbits.push(c);
        projective.push(pc);
    }
    LocalEntry { p, nu, total: orbits.iter().sum(), projective_total: projective.iter().sum(), orbits, projective }
}

fn analyze(c: [i64; 4], height: i64, ctx: &Context) -> Option<CensusRow> {
    let disc = cubic_disc_i64(&c);
    if disc == 0 {
        return None;
    }
    let signature = if disc > 0 { 3 } else { 1 };
    if signature != ctx.signature || !cubic_irreducible_i64(&c, &ctx.divisors) {
        return None;
    }
    let f = c.map(i128::from);
    let mut local = Vec::new();
    let mut double_checked = Vec::new();
    let mut complete = true;
    let mut maximal = true;
    for (p, nu) in square_primes(disc, &ctx.primes) {
        if nu >= 2 {
            let entry = local_entry(&f, p, nu);
            maximal &= is_maximal_at(&f, p);
            local.push(entry);
        } else if ctx.double_check.is_some_and(|b| p <= b) {
            let entry = local_entry(&f, p, 2);
            complete &= entry.total == 1 && entry.orbits[1] == 0;
            double_checked.push(p);
        }
    }
    let global = local.iter().map(|l| l.total).product();
    let projective = local.iter().map(|l| l.projective_total).product();
    Some(CensusRow { coeffs: c, disc, signature, height, local, global, projective, maximal, double_checked, complete })
}

/// Coefficient vectors of height exactly `h` with leading coefficient `lead`, lexicographic.
fn shell_slice(h: i64, lead: i64, mut visit: impl FnMut([i64; 4])) {
    for b in -h..=h {
        for c in -h..=h {
            for d in -h..=h {
                let v = [lead, b, c, d];
                if v.iter().any(|x| x.abs() == h) {
                    visit(v);
                }
            }
        }
    }
}

/// Runs the census, handing rows to `sink` in the deterministic height-then-lexicographic order.
pub fn census(config: &CensusConfig, mut sink: impl FnMut(&CensusRow)) -> Result<CensusSummary, CensusError> {
    if config.height_bound > config.ceiling {
        return Err(CensusError::AboveCeiling(config.height_bound, config.ceiling));
    }
    if config.signature != 1 && config.signature != 3 {
        return Err(CensusError::BadSignature(config.signature));
    }
    if config.height_bound < 2 {
        return Err(CensusError::EmptyRange);
    }
    let top = config.height_bound - 1;
    let max_disc = 54 * (top as u64).pow(4);
    let cube_root = (max_disc as f64).cbrt() as u64 + 2;
    let ctx = Context {
        primes: primes_up_to(cube_root),
        divisors: divisor_table(top as usize),
        signature: config.signature,
        double_check: config.double_check,
    };
    let mut tally = Tally::default();
    let mut trajectory = Vec::new();
    for h in 1..=top {
        let slices: Vec<(Vec<CensusRow>, Tally)> = (-h..=h)
            .into_par_iter()
            .map(|lead| {
                let mut rows = Vec::new();
                let mut t = Tally::default();
                shell_slice(h, lead, |c| {
                    if let Some(row) = analyze(c, h, &ctx) {
                        t.add(&row);
                        rows.push(row);
                    }
                });
                (rows, t)
            })
            .collect();
        for (rows, t) in &slices {
            rows.iter().for_each(&mut sink);
            tally.merge(t);
        }
        if config.checkpoints.contains(&(h + 1)) {
            trajectory.push(Checkpoint::from_tally(h + 1, &tally));
        }
    }
    let final_checkpoint = Checkpoint::from_tally(config.height_bound, &tally);
    let seen = tally.forms + tally.excluded;
    let exclusion_rate = if seen == 0 { 0.0 } else { tally.excluded as f64 / seen as f64 };
    let references = vec![
        Reference { name: "zeta(2)zeta(3)", enclosure: euler_product(EulerFamily::Zeta { s: 2 }, 10_000).expect("convergent").value.mul_pos(euler_product(EulerFamily::Zeta { s: 3 }, 10_000).expect("convergent").value) },
        Reference { name: "zeta(2)/zeta(4)", enclosure: euler_product(EulerFamily::Projective, 10_000).expect("convergent").value },
    ];
    Ok(CensusSummary { height_bound: config.height_bound, signature: config.signature, final_checkpoint, trajectory, exclusion_rate, references })
}

/// The census row of a single form, regardless of signature filters.
pub fn analyze_form(c: [i64; 4], double_check: Option<u64>) -> Option<CensusRow> {
    let height = c.iter().map(|x| x.abs()).max().unwrap_or(0);
    let d = cubic_disc_i64(&c).unsigned_abs();
    let ctx = Context {
        primes: primes_up_to((d as f64).cbrt() as u64 + 2),
        divisors: divisor_table(height.max(1) as usize),
        signature: if cubic_disc_i64(&c) > 0 { 3 } else { 1 },
        double_check,
    };
    analyze(c, height, &ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_prime_detection() {
        assert_eq!(square_primes(-432, &primes_up_to(10)), vec![(2, 4), (3, 3)]);
        assert_eq!(square_primes(2 * 101 * 101, &primes_up_to(30)), vec![(2, 1), (101, 2)]);
        assert_eq!(square_primes(-31, &primes_up_to(5)), vec![(31, 1)]);
    }

    #[test]
    fn small_census() {
        let mut cfg = CensusConfig::new(6, 1);
        cfg.checkpoints = vec![3, 4, 5];
        cfg.double_check = Some(50);
        let mut rows = Vec::new();
        let s = census(&cfg, |r| rows.push(r.clone())).unwrap();
        assert_eq!(s.final_checkpoint.excluded, 0);
        for r in &rows {
            assert!(r.global >= 1 && r.projective <= r.global);
            if r.local.is_empty() {
                assert_eq!(r.global, 1);
            }
            if r.maximal {
                assert_eq!(r.projective, 1);
            }
        }
        assert_eq!(s.trajectory.len(), 3);
        let mut prefix = Vec::new();
        let mut small = CensusConfig::new(5, 1);
        small.double_check = Some(50);
        census(&small, |r| prefix.push(r.clone())).unwrap();
        assert_eq!(&rows[..prefix.len()], &prefix[..]);
    }
}
