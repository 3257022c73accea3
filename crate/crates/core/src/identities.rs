//! Structural identities of `R_A` and a runnable suite over them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backend::Backend;
use crate::error::Result;
use crate::oracles::{covering_expansion_check, decomposition_check_with};
use crate::report::{CheckOutcome, CheckStatus};
use crate::residue::{gcd, reduce, RepFn, ResidueSet};
use crate::search::units;

/// Default seed for randomized identity runs.
pub const DEFAULT_SEED: u64 = 0x5eed_2020;

/// `sum_n R_A(n) = |A|^2`.
pub fn mass_check(a: &ResidueSet, backend: Backend) -> Result<bool> {
    Ok(mass_holds(a, &backend.repfn(a)?))
}

fn mass_holds(a: &ResidueSet, ra: &RepFn) -> bool {
    let k = a.cardinality() as u64;
    ra.total() == k * k
}

/// `R_A(n) = #{a in A : 2a = n} (mod 2)`.
pub fn parity_check(a: &ResidueSet, backend: Backend) -> Result<bool> {
    Ok(parity_holds(a, &backend.repfn(a)?))
}

fn parity_holds(a: &ResidueSet, ra: &RepFn) -> bool {
    let m = a.modulus();
    let mut diag = vec![0u32; m];
    for x in a.iter() {
        diag[(2 * x) % m] += 1;
    }
    ra.counts().iter().zip(&diag).all(|(x, y)| x % 2 == y % 2)
}

/// `R_{A+c}(n) = R_A(n - 2c)`.
pub fn shift_covariance_check(a: &ResidueSet, c: i64, backend: Backend) -> Result<bool> {
    shift_holds(a, &backend.repfn(a)?, c, backend)
}

fn shift_holds(a: &ResidueSet, ra: &RepFn, c: i64, backend: Backend) -> Result<bool> {
    let m = a.modulus();
    let moved = backend.repfn(&a.shift(c))?;
    let two_c = reduce(2 * reduce(c, m) as i64, m);
    Ok((0..m).all(|n| moved.counts()[n] == ra.counts()[(n + m - two_c) % m]))
}

/// `R_{-A}(n) = R_A(-n)`.
pub fn reflect_covariance_check(a: &ResidueSet, backend: Backend) -> Result<bool> {
    reflect_holds(a, &backend.repfn(a)?, backend)
}

fn reflect_holds(a: &ResidueSet, ra: &RepFn, backend: Backend) -> Result<bool> {
    let m = a.modulus();
    let refl = backend.repfn(&a.reflect())?;
    Ok((0..m).all(|n| refl.counts()[n] == ra.counts()[(m - n) % m]))
}

fn inverse_mod(u: usize, m: usize) -> Option<usize> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (u % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as usize)
}

/// `R_{uA}(n) = R_A(u^{-1} n)` for a unit `u`.
pub fn scale_covariance_check(a: &ResidueSet, u: i64, backend: Backend) -> Result<bool> {
    scale_holds(a, &backend.repfn(a)?, u, backend)
}

fn scale_holds(a: &ResidueSet, ra: &RepFn, u: i64, backend: Backend) -> Result<bool> {
    let m = a.modulus();
    let scaled = backend.repfn(&a.scale_unit(u)?)?;
    let inv = inverse_mod(reduce(u, m), m).expect("scale_unit accepted a unit");
    Ok((0..m).all(|n| {
        let src = ((n as u128 * inv as u128) % m as u128) as usize;
        scaled.counts()[n] == ra.counts()[src]
    }))
}

/// `R_{A + m/2} = R_A` for even `m`.
pub fn half_shift_invariance_check(a: &ResidueSet, backend: Backend) -> Result<bool> {
    half_shift_holds(a, &backend.repfn(a)?, backend)
}

fn half_shift_holds(a: &ResidueSet, ra: &RepFn, backend: Backend) -> Result<bool> {
    debug_assert!(a.modulus().is_multiple_of(2));
    Ok(backend.repfn(&a.shift((a.modulus() / 2) as i64))? == *ra)
}

/// `R_{Z_m \ A}(n) = m - 2|A| + R_A(n)`, against a precomputed `R_A`.
fn complement_holds(a: &ResidueSet, ra: &RepFn, backend: Backend) -> Result<bool> {
    let offset = a.modulus() as i64 - 2 * a.cardinality() as i64;
    let rc = backend.repfn(&a.complement())?;
    Ok(ra
        .counts()
        .iter()
        .zip(rc.counts())
        .all(|(&x, &y)| i64::from(y) == offset + i64::from(x)))
}

struct Tally {
    name: &'static str,
    cases: u64,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failure: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn outcome(self, input: &str) -> CheckOutcome {
        CheckOutcome {
            name: self.name.to_string(),
            input: input.to_string(),
            status: if self.failure.is_some() {
                CheckStatus::Fails
            } else {
                CheckStatus::Holds
            },
            cases: self.cases,
            detail: self.failure.map(|f| format!("first counterexample: {f}")),
        }
    }
}

/// Tallies for every identity, in a fixed order.
struct Suite {
    mass: Tally,
    parity: Tally,
    complement: Tally,
    shift: Tally,
    reflect: Tally,
    scale: Tally,
    half_shift: Tally,
    decomposition: Tally,
    covering: Tally,
}

impl Suite {
    fn new() -> Self {
        Self {
            mass: Tally::new("mass"),
            parity: Tally::new("diagonal-parity"),
            complement: Tally::new("complement"),
            shift: Tally::new("shift-covariance"),
            reflect: Tally::new("reflection-covariance"),
            scale: Tally::new("unit-scaling-covariance"),
            half_shift: Tally::new("half-shift-invariance"),
            decomposition: Tally::new("disjoint-decomposition"),
            covering: Tally::new("covering-expansion"),
        }
    }

    fn single_set(&mut self, a: &ResidueSet, shifts: &[i64], scales: &[i64], backend: Backend) -> Result<()> {
        let ra = backend.repfn(a)?;
        let show = || a.to_string();
        self.mass.record(mass_holds(a, &ra), show);
        self.parity.record(parity_holds(a, &ra), show);
        self.complement.record(complement_holds(a, &ra, backend)?, show);
        for &c in shifts {
            self.shift
                .record(shift_holds(a, &ra, c, backend)?, || format!("{a} shifted by {c}"));
        }
        self.reflect.record(reflect_holds(a, &ra, backend)?, show);
        for &u in scales {
            self.scale
                .record(scale_holds(a, &ra, u, backend)?, || format!("{a} scaled by {u}"));
        }
        if a.modulus().is_multiple_of(2) {
            self.half_shift.record(half_shift_holds(a, &ra, backend)?, show);
        }
        Ok(())
    }

    fn outcomes(self, input: &str) -> Vec<CheckOutcome> {
        [
            self.mass,
            self.parity,
            self.complement,
            self.shift,
            self.reflect,
            self.scale,
            self.half_shift,
            self.decomposition,
            self.covering,
        ]
        .into_iter()
        .map(|t| t.outcome(input))
        .collect()
    }
}

/// Every identity on every subset of `Z_m`, `1 <= m <= max_m`: all shifts,
/// all units, and (through the three-way split of `Z_m`) every disjoint pair
/// `(T, S)` and every covering pair `(A, B)`.
pub fn exhaustive_identity_suite(max_m: usize, backend: Backend) -> Result<Vec<CheckOutcome>> {
    let mut suite = Suite::new();
    for m in 1..=max_m {
        let shifts: Vec<i64> = (0..m as i64).collect();
        let scales: Vec<i64> = units(m).into_iter().map(|u| u as i64).collect();
        for mask in 0u64..(1 << m) {
            let a = ResidueSet::from_u64(m, mask)?;
            suite.single_set(&a, &shifts, &scales, backend)?;
        }
        // Each residue goes to T only, S only, or neither: disjoint (T, S).
        // Reading "T only" as "A only", "S only" as "B only" and "neither"
        // as "both" gives every covering pair.
        let full = (1u64 << m) - 1;
        for code in 0..3u64.pow(m as u32) {
            let (mut t, mut s, mut c) = (0u64, 0u64, code);
            for i in 0..m {
                match c % 3 {
                    1 => t |= 1 << i,
                    2 => s |= 1 << i,
                    _ => {}
                }
                c /= 3;
            }
            let (ts, ss) = (ResidueSet::from_u64(m, t)?, ResidueSet::from_u64(m, s)?);
            suite
                .decomposition
                .record(decomposition_check_with(&ts, &ss, backend)?, || {
                    format!("T = {ts}, S = {ss}")
                });
            let neither = full & !(t | s);
            let a = ResidueSet::from_u64(m, t | neither)?;
            let b = ResidueSet::from_u64(m, s | neither)?;
            suite
                .covering
                .record(covering_expansion_check(&a, &b)?, || format!("A = {a}, B = {b}"));
        }
    }
    Ok(suite.outcomes(&format!("all subsets, m = 1..={max_m}")))
}

/// The same identities on `count` seeded random sets with `1 <= m <= max_m`.
pub fn random_identity_suite(count: usize, max_m: usize, seed: u64, backend: Backend) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suite = Suite::new();
    for _ in 0..count {
        let m = rng.gen_range(1..=max_m);
        let density: f64 = rng.gen();
        let a = ResidueSet::new(m, (0..m as i64).filter(|_| rng.gen_bool(density)))?;
        let c = rng.gen_range(0..m as i64);
        let u = loop {
            let u = rng.gen_range(0..m);
            if gcd(u, m) == 1 {
                break u as i64;
            }
        };
        suite.single_set(&a, &[c], &[u], backend)?;

        // split A into disjoint T, S
        let (mut t, mut s) = (ResidueSet::empty(m)?, ResidueSet::empty(m)?);
        for x in a.iter() {
            if rng.gen_bool(0.5) {
                t.insert(x);
            } else {
                s.insert(x);
            }
        }
        suite
            .decomposition
            .record(decomposition_check_with(&t, &s, backend)?, || {
                format!("T = {t}, S = {s}")
            });

        // B covers the complement of A and some of A
        let mut b = a.complement();
        for x in a.iter() {
            if rng.gen_bool(0.5) {
                b.insert(x);
            }
        }
        suite
            .covering
            .record(covering_expansion_check(&a, &b)?, || format!("A = {a}, B = {b}"));
    }
    Ok(suite.outcomes(&format!("{count} random sets, m <= {max_m}, seed {seed}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses() {
        assert_eq!(inverse_mod(5, 6), Some(5));
        assert_eq!(inverse_mod(3, 10), Some(7));
        assert_eq!(inverse_mod(2, 4), None);
        assert_eq!(inverse_mod(0, 1), Some(0));
    }

    #[test]
    fn small_exhaustive_suite_holds() {
        let out = exhaustive_identity_suite(5, Backend::Auto).unwrap();
        assert_eq!(out.len(), 9);
        for o in out {
            assert_eq!(o.status, CheckStatus::Holds, "{o:?}");
            assert!(o.cases > 0 || o.name == "half-shift-invariance");
        }
    }

    #[test]
    fn random_suite_is_seeded() {
        let a = random_identity_suite(20, 100, 7, Backend::Auto).unwrap();
        let b = random_identity_suite(20, 100, 7, Backend::Auto).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|o| o.status == CheckStatus::Holds));
    }
}
