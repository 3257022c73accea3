//! Executable predicates for the partition lemmas, the explicit exotic
//! constructions for `4 | m`, and the structural identities of `R`.
//!
//! Predicates whose statement carries hypotheses return
//! `Err(Error::Hypothesis(..))` when the hypotheses fail. `Ok(false)` always
//! means the hypotheses held and the conclusion did not.

use serde::{Deserialize, Serialize};

use crate::backend::{Backend, BackendKind};
use crate::error::{Error, Result};
use crate::residue::{half_shift_equal, RepFn, ResidueSet};

fn hypothesis(msg: impl Into<String>) -> Error {
    Error::Hypothesis(msg.into())
}

fn same_modulus(a: &ResidueSet, b: &ResidueSet) -> Result<usize> {
    if a.modulus() != b.modulus() {
        return Err(Error::ModulusMismatch {
            left: a.modulus(),
            right: b.modulus(),
        });
    }
    Ok(a.modulus())
}

/// The intersection `A ∩ B = {r_1, ..., r_2t}` with its labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionData {
    modulus: usize,
    residues: Vec<usize>,
}

impl IntersectionData {
    /// Residues are reduced mod `m` and must be distinct and of even count.
    pub fn new(m: usize, residues: impl IntoIterator<Item = i64>) -> Result<Self> {
        let residues: Vec<usize> = residues.into_iter().map(|r| r.rem_euclid(m as i64) as usize).collect();
        let distinct = ResidueSet::new(m, residues.iter().map(|&r| r as i64))?;
        if distinct.cardinality() != residues.len() {
            return Err(hypothesis("intersection residues must be distinct"));
        }
        if !residues.len().is_multiple_of(2) {
            return Err(hypothesis(format!(
                "intersection size {} is odd, expected 2t",
                residues.len()
            )));
        }
        Ok(Self { modulus: m, residues })
    }

    /// `A ∩ B` labelled in increasing order.
    pub fn from_sets(a: &ResidueSet, b: &ResidueSet) -> Result<Self> {
        let c = a.intersection(b)?;
        Self::new(c.modulus(), c.iter().map(|r| r as i64))
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn residues(&self) -> &[usize] {
        &self.residues
    }

    pub fn t(&self) -> usize {
        self.residues.len() / 2
    }

    pub fn as_set(&self) -> ResidueSet {
        ResidueSet::new(self.modulus, self.residues.iter().map(|&r| r as i64))
            .expect("modulus validated at construction")
    }
}

/// Size condition for equal representation functions of a covering pair:
/// if `A ∪ B = Z_m`, `|A ∩ B| = 2t` with `0 < t < m/2` and `R_A = R_B`, then
/// `|A| = |B| = m/2 + t`.
pub fn lemma21_check(a: &ResidueSet, b: &ResidueSet) -> Result<bool> {
    let m = same_modulus(a, b)?;
    if m % 2 != 0 {
        return Err(hypothesis(format!("modulus {m} is odd")));
    }
    if !a.union(b)?.is_full() {
        return Err(hypothesis("A ∪ B is not all of Z_m"));
    }
    let s = a.intersection(b)?.cardinality();
    if s % 2 != 0 {
        return Err(hypothesis(format!("|A ∩ B| = {s} is odd")));
    }
    let t = s / 2;
    if t == 0 || 2 * t >= m {
        return Err(hypothesis(format!("t = {t} outside 0 < t < m/2 for m = {m}")));
    }
    let backend = Backend::Auto;
    if backend.repfn(a)? != backend.repfn(b)? {
        return Err(hypothesis("R_A != R_B"));
    }
    let want = m / 2 + t;
    Ok(a.cardinality() == want && b.cardinality() == want)
}

/// Intersection identity for equal representation functions:
/// `sum_i chi_A(n - r_i) = t + R_C(n) / 2` for every `n`, where `C = {r_i}`.
///
/// The half is handled exactly: any odd `R_C(n)` makes the identity false.
pub fn eq21_check(a: &ResidueSet, inter: &IntersectionData) -> Result<bool> {
    let m = a.modulus();
    if inter.modulus() != m {
        return Err(Error::ModulusMismatch {
            left: m,
            right: inter.modulus(),
        });
    }
    if !m.is_multiple_of(2) {
        return Err(hypothesis(format!("modulus {m} is odd")));
    }
    if inter.t() == 0 {
        return Err(hypothesis("intersection is empty (t = 0)"));
    }
    if let Some(r) = inter.residues().iter().find(|&&r| !a.contains_index(r)) {
        return Err(hypothesis(format!("r = {r} is not in A")));
    }
    let c = inter.as_set();
    let rc = Backend::Auto.repfn(&c)?;
    let t = inter.t() as u32;
    for n in 0..m {
        let rcn = rc.counts()[n];
        if rcn % 2 != 0 {
            return Ok(false);
        }
        let lhs: u32 = inter
            .residues()
            .iter()
            .map(|&r| u32::from(a.contains_index((n + m - r) % m)))
            .sum();
        if lhs != t + rcn / 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `R_{Z_m \ A}(n) = m - 2|A| + R_A(n)` for every `n`.
pub fn complement_identity_check(a: &ResidueSet) -> Result<bool> {
    complement_identity_check_with(a, Backend::Auto)
}

pub fn complement_identity_check_with(a: &ResidueSet, backend: Backend) -> Result<bool> {
    let m = a.modulus() as i64;
    let ra = backend.repfn(a)?;
    let rc = backend.repfn(&a.complement())?;
    let offset = m - 2 * a.cardinality() as i64;
    Ok(ra
        .counts()
        .iter()
        .zip(rc.counts())
        .all(|(&x, &y)| i64::from(y) == offset + i64::from(x)))
}

/// `R_{T ∪ S} = R_T + 2 R_{T,S} + R_S` for disjoint `T`, `S`.
pub fn decomposition_check(t: &ResidueSet, attach: &ResidueSet) -> Result<bool> {
    decomposition_check_with(t, attach, Backend::Auto)
}

pub fn decomposition_check_with(t: &ResidueSet, attach: &ResidueSet, backend: Backend) -> Result<bool> {
    if !t.is_disjoint(attach)? {
        return Err(Error::NotDisjoint);
    }
    let whole = backend.repfn(&t.union(attach)?)?;
    let rt = backend.repfn(t)?;
    let rs = backend.repfn(attach)?;
    let cross = backend.cross(t, attach)?;
    Ok((0..t.modulus()).all(|n| whole.counts()[n] == rt.counts()[n] + 2 * cross.counts()[n] + rs.counts()[n]))
}

/// Expansion of `R_B` through the complement of `A` for any covering pair,
/// without assuming `R_A = R_B`. With `C = A ∩ B`:
///
/// `R_B(n) = (m - 2|A| + 2|C|) + R_A(n) - 2 sum_{c in C} chi_A(n - c) + R_C(n)`.
pub fn covering_expansion_check(a: &ResidueSet, b: &ResidueSet) -> Result<bool> {
    let m = same_modulus(a, b)?;
    if !a.union(b)?.is_full() {
        return Err(hypothesis("A ∪ B is not all of Z_m"));
    }
    let c = a.intersection(b)?;
    let backend = Backend::Auto;
    let ra = backend.repfn(a)?;
    let rb = backend.repfn(b)?;
    let rc = backend.repfn(&c)?;
    let base = m as i64 - 2 * a.cardinality() as i64 + 2 * c.cardinality() as i64;
    // sum_{c in C} chi_A(n - c) = R_{A,C}(n)
    let hits = backend.cross(a, &c)?;
    Ok((0..m).all(|n| {
        let rhs = base + i64::from(ra.counts()[n]) - 2 * i64::from(hits.counts()[n]) + i64::from(rc.counts()[n]);
        i64::from(rb.counts()[n]) == rhs
    }))
}

/// Which explicit exotic pair to build for `m = 4k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstructionCase {
    /// `|A ∩ B| = 4`, needs `k >= 2`.
    IntersectionFour,
    /// `|A ∩ B| = m - 4`.
    IntersectionCoFour,
}

impl ConstructionCase {
    pub fn from_number(case: u8) -> Result<Self> {
        match case {
            1 => Ok(Self::IntersectionFour),
            2 => Ok(Self::IntersectionCoFour),
            other => Err(Error::Construction(format!("case must be 1 or 2, got {other}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::IntersectionFour => 1,
            Self::IntersectionCoFour => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    m: usize,
    k: usize,
    case: ConstructionCase,
}

impl ConstructionParams {
    pub fn new(m: usize, case: ConstructionCase) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(4) {
            return Err(Error::Construction(format!("m = {m} is not a positive multiple of 4")));
        }
        crate::residue::check_modulus(m)?;
        let k = m / 4;
        if case == ConstructionCase::IntersectionFour && k < 2 {
            return Err(Error::Construction(format!(
                "the |A ∩ B| = 4 construction needs k = m/4 >= 2, got k = {k}"
            )));
        }
        Ok(Self { m, k, case })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn case(&self) -> ConstructionCase {
        self.case
    }

    /// The intersection size the construction guarantees.
    pub fn intersection_size(&self) -> usize {
        match self.case {
            ConstructionCase::IntersectionFour => 4,
            ConstructionCase::IntersectionCoFour => self.m - 4,
        }
    }
}

fn interval_set(m: usize, ranges: &[std::ops::RangeInclusive<usize>]) -> ResidueSet {
    ResidueSet::new(m, ranges.iter().cloned().flatten().map(|x| x as i64))
        .expect("modulus validated by ConstructionParams")
}

/// `A = [0, k] ∪ [2k, 3k]`, `B = [k, 2k] ∪ [3k, 4k - 1] ∪ {0}`.
pub fn construct_thm2_case1(params: &ConstructionParams) -> Result<(ResidueSet, ResidueSet)> {
    if params.case != ConstructionCase::IntersectionFour {
        return Err(Error::Construction("parameters are not for case 1".into()));
    }
    let (m, k) = (params.m, params.k);
    let a = interval_set(m, &[0..=k, 2 * k..=3 * k]);
    let b = interval_set(m, &[k..=2 * k, 3 * k..=4 * k - 1, 0..=0]);
    Ok((a, b))
}

/// `k = 1`: `A = {0, 2}`, `B = {1, 3}`. Otherwise
/// `A = [0, k-1] ∪ [k+1, 3k-1] ∪ [3k+1, 4k-1]`, `B = [1, 2k-1] ∪ [2k+1, 4k-1]`.
pub fn construct_thm2_case2(params: &ConstructionParams) -> Result<(ResidueSet, ResidueSet)> {
    if params.case != ConstructionCase::IntersectionCoFour {
        return Err(Error::Construction("parameters are not for case 2".into()));
    }
    let (m, k) = (params.m, params.k);
    if k == 1 {
        return Ok((interval_set(m, &[0..=0, 2..=2]), interval_set(m, &[1..=1, 3..=3])));
    }
    let a = interval_set(m, &[0..=k - 1, k + 1..=3 * k - 1, 3 * k + 1..=4 * k - 1]);
    let b = interval_set(m, &[1..=2 * k - 1, 2 * k + 1..=4 * k - 1]);
    Ok((a, b))
}

pub fn construct_thm2(params: &ConstructionParams) -> Result<(ResidueSet, ResidueSet)> {
    match params.case {
        ConstructionCase::IntersectionFour => construct_thm2_case1(params),
        ConstructionCase::IntersectionCoFour => construct_thm2_case2(params),
    }
}

/// Verification summary for a constructed exotic pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSummary {
    pub m: usize,
    pub case: u8,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub covers: bool,
    pub intersection_size: usize,
    pub claimed_intersection_size: usize,
    pub half_shift: bool,
    pub equal_under: Vec<BackendKind>,
    pub passed: bool,
}

pub fn verify_construction(params: &ConstructionParams) -> Result<ConstructionSummary> {
    let (a, b) = construct_thm2(params)?;
    let covers = a.union(&b)?.is_full();
    let intersection_size = a.intersection(&b)?.cardinality();
    let half_shift = half_shift_equal(&a, &b)?.holds;
    let mut equal_under = Vec::new();
    for kind in BackendKind::ALL {
        let ra: RepFn = crate::backend::repfn_with(&a, kind)?;
        if ra == crate::backend::repfn_with(&b, kind)? {
            equal_under.push(kind);
        }
    }
    let claimed = params.intersection_size();
    let passed =
        covers && intersection_size == claimed && !half_shift && a != b && equal_under.len() == BackendKind::ALL.len();
    Ok(ConstructionSummary {
        m: params.m,
        case: params.case.number(),
        a: a.elements(),
        b: b.elements(),
        covers,
        intersection_size,
        claimed_intersection_size: claimed,
        half_shift,
        equal_under,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::repfn_naive;

    fn set(m: usize, e: &[i64]) -> ResidueSet {
        ResidueSet::new(m, e.iter().copied()).unwrap()
    }

    /// Both sides of the intersection identity, evaluated straight from
    /// the definitions (pair enumeration for R_C).
    fn eq21_brute(m: usize, a: &[i64], c: &[i64]) -> bool {
        let in_a = |x: i64| a.iter().any(|&y| (y - x).rem_euclid(m as i64) == 0);
        let t = c.len() as i64 / 2;
        (0..m as i64).all(|n| {
            let lhs: i64 = c.iter().map(|&r| i64::from(in_a(n - r))).sum();
            let mut rc = 0i64;
            for &x in c {
                for &y in c {
                    if (x + y - n).rem_euclid(m as i64) == 0 {
                        rc += 1;
                    }
                }
            }
            2 * lhs == 2 * t + rc
        })
    }

    #[test]
    fn lemma21_examples() {
        let err = lemma21_check(&set(4, &[0, 2]), &set(4, &[1, 3])).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
        let a = set(8, &[0, 1, 2, 4, 5, 6]);
        let b = set(8, &[2, 3, 4, 6, 7, 0]);
        assert!(lemma21_check(&a, &b).unwrap());
        let z = ResidueSet::full(6).unwrap();
        assert!(matches!(lemma21_check(&z, &z), Err(Error::Hypothesis(_))));
        // unequal R is a hypothesis failure, not a false conclusion
        let (a, b) = (set(6, &[0, 1, 2, 4]), set(6, &[0, 2, 3, 5]));
        assert_ne!(repfn_naive(&a), repfn_naive(&b));
        assert!(matches!(lemma21_check(&a, &b), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn eq21_examples() {
        assert!(eq21_brute(8, &[0, 1, 2, 4, 5, 6], &[0, 2, 4, 6]));
        let a = set(8, &[0, 1, 2, 4, 5, 6]);
        let c = IntersectionData::new(8, [0, 2, 4, 6]).unwrap();
        assert!(eq21_check(&a, &c).unwrap());

        // n = 0 balances (2 = 1 + 2/2) but n = 1 does not (0 != 1 + 0).
        assert!(!eq21_brute(4, &[0, 2], &[0, 2]));
        let c = IntersectionData::new(4, [0, 2]).unwrap();
        assert!(!eq21_check(&set(4, &[0, 2]), &c).unwrap());

        // {0,1,2,3} and {0,3} in Z_6 form a half-shift witness, so the identity holds.
        assert!(eq21_brute(6, &[0, 1, 2, 3], &[0, 3]));
        let c = IntersectionData::new(6, [0, 3]).unwrap();
        assert!(eq21_check(&set(6, &[0, 1, 2, 3]), &c).unwrap());

        // Non-witnesses: one fails the evenness sub-check, one the count.
        assert!(!eq21_brute(6, &[0, 1, 2, 4], &[0, 2]));
        let c = IntersectionData::new(6, [0, 2]).unwrap();
        assert!(!eq21_check(&set(6, &[0, 1, 2, 4]), &c).unwrap());
        assert!(!eq21_brute(6, &[0, 1, 3, 4], &[0, 3]));
        let c = IntersectionData::new(6, [0, 3]).unwrap();
        assert!(!eq21_check(&set(6, &[0, 1, 3, 4]), &c).unwrap());
    }

    #[test]
    fn eq21_gates() {
        let c = IntersectionData::new(8, [0, 3]).unwrap();
        assert!(matches!(eq21_check(&set(8, &[0, 1]), &c), Err(Error::Hypothesis(_))));
        assert!(matches!(IntersectionData::new(8, [0, 8]), Err(Error::Hypothesis(_))));
        assert!(matches!(IntersectionData::new(8, [0, 1, 2]), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn complement_identity_examples() {
        assert!(complement_identity_check(&set(4, &[0, 2])).unwrap());
        assert_eq!(repfn_naive(&set(2, &[1])).counts(), &[1, 0]);
        assert!(complement_identity_check(&set(2, &[0])).unwrap());
    }

    #[test]
    fn decomposition_examples() {
        let e = ResidueSet::empty(7).unwrap();
        assert!(decomposition_check(&e, &set(7, &[1, 5])).unwrap());
        assert!(decomposition_check(&set(4, &[1, 2]), &set(4, &[0])).unwrap());
        assert!(matches!(
            decomposition_check(&set(4, &[1, 2]), &set(4, &[2])),
            Err(Error::NotDisjoint)
        ));
    }

    #[test]
    fn case1_sets() {
        let p = ConstructionParams::new(8, ConstructionCase::IntersectionFour).unwrap();
        let (a, b) = construct_thm2_case1(&p).unwrap();
        assert_eq!(a, set(8, &[0, 1, 2, 4, 5, 6]));
        assert_eq!(b, set(8, &[2, 3, 4, 6, 7, 0]));
        assert_eq!(repfn_naive(&a), repfn_naive(&b));
        assert!(!half_shift_equal(&a, &b).unwrap().holds);

        let p = ConstructionParams::new(12, ConstructionCase::IntersectionFour).unwrap();
        let (a, b) = construct_thm2_case1(&p).unwrap();
        assert_eq!(a, set(12, &[0, 1, 2, 3, 6, 7, 8, 9]));
        assert_eq!(b, set(12, &[3, 4, 5, 6, 9, 10, 11, 0]));
    }

    #[test]
    fn case2_sets() {
        let p = ConstructionParams::new(4, ConstructionCase::IntersectionCoFour).unwrap();
        assert_eq!(construct_thm2_case2(&p).unwrap(), (set(4, &[0, 2]), set(4, &[1, 3])));
        let p = ConstructionParams::new(8, ConstructionCase::IntersectionCoFour).unwrap();
        let (a, b) = construct_thm2_case2(&p).unwrap();
        assert_eq!(a, set(8, &[0, 1, 3, 4, 5, 7]));
        assert_eq!(b, set(8, &[1, 2, 3, 5, 6, 7]));
        assert_eq!(a.intersection(&b).unwrap().cardinality(), 4);
        assert_eq!(repfn_naive(&a), repfn_naive(&b));
    }

    #[test]
    fn construction_parameter_gates() {
        assert!(matches!(
            ConstructionParams::new(4, ConstructionCase::IntersectionFour),
            Err(Error::Construction(_))
        ));
        assert!(matches!(
            ConstructionParams::new(6, ConstructionCase::IntersectionCoFour),
            Err(Error::Construction(_))
        ));
        let p = ConstructionParams::new(8, ConstructionCase::IntersectionCoFour).unwrap();
        assert!(construct_thm2_case1(&p).is_err());
    }

    #[test]
    fn constructions_verify() {
        for m in (4..=40).step_by(4) {
            for case in [ConstructionCase::IntersectionFour, ConstructionCase::IntersectionCoFour] {
                let Ok(p) = ConstructionParams::new(m, case) else {
                    assert_eq!((m, case), (4, ConstructionCase::IntersectionFour));
                    continue;
                };
                let s = verify_construction(&p).unwrap();
                assert!(s.passed, "{s:?}");
            }
        }
    }
}
