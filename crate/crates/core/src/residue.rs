//! Subsets of Z_m and their exact representation functions.
//!
//! Throughout the crate, `R_A(n)` counts **ordered** pairs `(a, a')` in
//! `A x A` with `a + a' = n (mod m)`. In particular `(a, a')` and `(a', a)`
//! are counted separately when `a != a'`, and `(a, a)` is counted once.
//! `R_{A,B}(n)` counts ordered pairs `(a, b)` in `A x B`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits;
use crate::error::{Error, Result};

/// Default upper bound on the modulus.
pub const DEFAULT_MAX_MODULUS: usize = 1 << 20;

/// Environment variable overriding [`DEFAULT_MAX_MODULUS`].
pub const MAX_MODULUS_ENV: &str = "REPCLASS_MAX_M";

/// The modulus cap in effect for this process.
pub fn max_modulus() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_MODULUS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_MODULUS)
    })
}

pub(crate) fn check_modulus(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    let cap = max_modulus();
    if m > cap {
        return Err(Error::ModulusTooLarge { m, cap });
    }
    Ok(())
}

#[inline]
pub(crate) fn reduce(n: i64, m: usize) -> usize {
    n.rem_euclid(m as i64) as usize
}

/// A subset of Z_m, stored as an m-bit membership mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: usize,
    words: Vec<u64>,
}

impl ResidueSet {
    /// Builds the set of residues of `elements` modulo `m`. Duplicates collapse.
    pub fn new<I>(m: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = i64>,
    {
        let mut set = Self::empty(m)?;
        for e in elements {
            bits::set(&mut set.words, reduce(e, m));
        }
        Ok(set)
    }

    pub fn empty(m: usize) -> Result<Self> {
        check_modulus(m)?;
        Ok(Self::zeroed(m))
    }

    pub fn full(m: usize) -> Result<Self> {
        check_modulus(m)?;
        Ok(Self::full_unchecked(m))
    }

    /// Builds a set of modulus `m <= 64` from the low `m` bits of `mask`.
    pub fn from_u64(m: usize, mask: u64) -> Result<Self> {
        check_modulus(m)?;
        if m > 64 {
            return Err(Error::InvalidSpec(format!("from_u64 needs m <= 64, got {m}")));
        }
        Ok(Self {
            modulus: m,
            words: vec![mask & bits::tail_mask(m)],
        })
    }

    pub(crate) fn zeroed(m: usize) -> Self {
        Self {
            modulus: m,
            words: vec![0; bits::word_count(m)],
        }
    }

    pub(crate) fn full_unchecked(m: usize) -> Self {
        let mut words = vec![u64::MAX; bits::word_count(m)];
        bits::clear_tail(&mut words, m);
        Self { modulus: m, words }
    }

    pub(crate) fn from_words(m: usize, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), bits::word_count(m));
        bits::clear_tail(&mut words, m);
        Self { modulus: m, words }
    }

    pub(crate) fn insert(&mut self, n: usize) {
        bits::set(&mut self.words, n % self.modulus);
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The mask as a single word, when `m <= 64`.
    pub fn as_u64(&self) -> Option<u64> {
        (self.modulus <= 64).then(|| self.words[0])
    }

    pub fn cardinality(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.cardinality() == self.modulus
    }

    /// Membership of `n mod m`.
    pub fn contains(&self, n: i64) -> bool {
        bits::get(&self.words, reduce(n, self.modulus))
    }

    /// The characteristic function: 1 if `n mod m` is a member, else 0.
    pub fn chi(&self, n: i64) -> u32 {
        u32::from(self.contains(n))
    }

    #[inline]
    pub(crate) fn contains_index(&self, n: usize) -> bool {
        bits::get(&self.words, n)
    }

    /// Members in increasing order of their least non-negative residue.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        bits::ones(&self.words)
    }

    pub fn elements(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// The translate `c + A`.
    pub fn shift(&self, c: i64) -> Self {
        let k = reduce(c, self.modulus);
        Self {
            modulus: self.modulus,
            words: bits::rotate(&self.words, self.modulus, k),
        }
    }

    /// `Z_m \ A`.
    pub fn complement(&self) -> Self {
        let words = self.words.iter().map(|w| !w).collect();
        Self::from_words(self.modulus, words)
    }

    /// `-A`.
    pub fn reflect(&self) -> Self {
        let m = self.modulus;
        let mut out = Self::zeroed(m);
        for a in self.iter() {
            out.insert((m - a) % m);
        }
        out
    }

    /// `uA` for a unit `u` of Z_m.
    pub fn scale_unit(&self, u: i64) -> Result<Self> {
        let m = self.modulus;
        let ur = reduce(u, m);
        if gcd(ur, m) != 1 {
            return Err(Error::NotAUnit { u, m });
        }
        Ok(self.scale_unchecked(ur))
    }

    pub(crate) fn scale_unchecked(&self, u: usize) -> Self {
        let m = self.modulus;
        let mut out = Self::zeroed(m);
        for a in self.iter() {
            out.insert(((a as u128 * u as u128) % m as u128) as usize);
        }
        out
    }

    fn same_modulus(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        self.same_modulus(other)?;
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_words(self.modulus, words))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        Ok(self.intersection(other)?.is_empty())
    }
}

/// Numeric order of the mask (bit `n` has weight `2^n`), after the modulus.
impl Ord for ResidueSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.modulus
            .cmp(&other.modulus)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for ResidueSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Set-literal form `m:{e1,e2,...}`.
impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{{", self.modulus)?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for ResidueSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        crate::report::parse_set_literal(s)
    }
}

#[derive(Serialize, Deserialize)]
struct SetRepr {
    m: usize,
    elements: Vec<usize>,
}

/// Serialized as `{"m": 4, "elements": [0, 2]}` with sorted elements.
impl Serialize for ResidueSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SetRepr {
            m: self.modulus,
            elements: self.elements(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ResidueSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SetRepr::deserialize(deserializer)?;
        if let Some(e) = repr.elements.iter().find(|&&e| e >= repr.m) {
            return Err(D::Error::custom(format!("element {e} out of range for m = {}", repr.m)));
        }
        ResidueSet::new(repr.m, repr.elements.iter().map(|&e| e as i64)).map_err(D::Error::custom)
    }
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact count vector of a representation function.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepFn {
    modulus: usize,
    counts: Vec<u32>,
}

impl RepFn {
    pub fn from_counts(counts: Vec<u32>) -> Result<Self> {
        check_modulus(counts.len())?;
        Ok(Self {
            modulus: counts.len(),
            counts,
        })
    }

    pub(crate) fn from_counts_unchecked(counts: Vec<u32>) -> Self {
        Self {
            modulus: counts.len(),
            counts,
        }
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.counts
    }

    /// `R(n mod m)`.
    pub fn at(&self, n: i64) -> u32 {
        self.counts[reduce(n, self.modulus)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }
}

impl Serialize for RepFn {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.counts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RepFn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let counts = Vec::<u32>::deserialize(deserializer)?;
        RepFn::from_counts(counts).map_err(D::Error::custom)
    }
}

impl fmt::Display for RepFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for RepFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Reference `R_A` by direct enumeration of ordered pairs.
pub fn repfn_naive(a: &ResidueSet) -> RepFn {
    cross_naive(a, a)
}

/// Reference `R_{A,B}` by direct enumeration of ordered pairs.
pub fn cross_repfn(a: &ResidueSet, b: &ResidueSet) -> Result<RepFn> {
    a.same_modulus(b)?;
    Ok(cross_naive(a, b))
}

pub(crate) fn cross_naive(a: &ResidueSet, b: &ResidueSet) -> RepFn {
    let m = a.modulus;
    let mut counts = vec![0u32; m];
    let bs: Vec<usize> = b.iter().collect();
    for x in a.iter() {
        let wrap = bs.partition_point(|&y| y < m - x);
        let upper = &mut counts[x..];
        for &y in &bs[..wrap] {
            upper[y] += 1;
        }
        let lower = &mut counts[..x];
        for &y in &bs[wrap..] {
            lower[y + x - m] += 1;
        }
    }
    RepFn::from_counts_unchecked(counts)
}

/// Whether `B = A + m/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfShiftRelation {
    pub holds: bool,
    pub shift: usize,
}

pub fn half_shift_equal(a: &ResidueSet, b: &ResidueSet) -> Result<HalfShiftRelation> {
    a.same_modulus(b)?;
    let m = a.modulus;
    if !m.is_multiple_of(2) {
        return Err(Error::OddModulus(m));
    }
    let shift = m / 2;
    Ok(HalfShiftRelation {
        holds: a.shift(shift as i64) == *b,
        shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: usize, e: &[i64]) -> ResidueSet {
        ResidueSet::new(m, e.iter().copied()).unwrap()
    }

    #[test]
    fn make_set_reduces_and_collapses() {
        assert_eq!(set(4, &[0, 2]).elements(), vec![0, 2]);
        assert!(set(5, &[]).is_empty());
        assert_eq!(set(5, &[]).modulus(), 5);
        assert_eq!(set(4, &[6, 2, -2]).elements(), vec![2]);
        assert!(matches!(ResidueSet::new(0, [1]), Err(Error::ZeroModulus)));
    }

    #[test]
    fn modulus_cap_enforced() {
        let cap = max_modulus();
        assert!(matches!(ResidueSet::empty(cap + 1), Err(Error::ModulusTooLarge { .. })));
    }

    #[test]
    fn membership() {
        let a = set(4, &[0, 2]);
        assert_eq!(a.chi(2), 1);
        assert_eq!(a.chi(3), 0);
        assert_eq!(a.chi(6), 1);
        assert_eq!(a.chi(-2), 1);
    }

    #[test]
    fn shifts() {
        assert_eq!(set(4, &[0, 2]).shift(2), set(4, &[0, 2]));
        assert_eq!(set(4, &[0, 1]).shift(1), set(4, &[1, 2]));
        assert_eq!(set(6, &[0, 1, 3]).shift(3), set(6, &[3, 4, 0]));
        assert_eq!(set(6, &[0, 1, 3]).shift(-3), set(6, &[3, 4, 0]));
    }

    #[test]
    fn complement_reflect_scale() {
        assert_eq!(set(4, &[0, 2]).complement(), set(4, &[1, 3]));
        assert_eq!(set(6, &[1, 2]).reflect(), set(6, &[5, 4]));
        assert_eq!(set(6, &[1, 2]).scale_unit(5).unwrap(), set(6, &[5, 4]));
        assert!(matches!(
            set(6, &[1, 2]).scale_unit(4),
            Err(Error::NotAUnit { u: 4, m: 6 })
        ));
        assert_eq!(
            ResidueSet::full(70).unwrap().complement(),
            ResidueSet::empty(70).unwrap()
        );
    }

    #[test]
    fn naive_repfn_examples() {
        assert_eq!(repfn_naive(&set(4, &[0, 2])).counts(), &[2, 0, 2, 0]);
        assert_eq!(repfn_naive(&set(4, &[1, 3])).counts(), &[2, 0, 2, 0]);
        assert_eq!(repfn_naive(&set(5, &[])).counts(), &[0; 5]);
        assert_eq!(repfn_naive(&set(6, &[0, 1, 3])).counts(), &[2, 2, 1, 2, 2, 0]);
    }

    #[test]
    fn cross_repfn_examples() {
        let a = set(4, &[0, 2]);
        assert_eq!(cross_repfn(&a, &a).unwrap(), repfn_naive(&a));
        assert_eq!(
            cross_repfn(&set(4, &[0]), &set(4, &[1, 3])).unwrap().counts(),
            &[0, 1, 0, 1]
        );
        assert_eq!(
            cross_repfn(&set(6, &[0, 1]), &set(6, &[1, 2])).unwrap().counts(),
            &[0, 1, 2, 1, 0, 0]
        );
        assert!(matches!(
            cross_repfn(&set(4, &[0]), &set(6, &[0])),
            Err(Error::ModulusMismatch { left: 4, right: 6 })
        ));
    }

    #[test]
    fn half_shift_examples() {
        assert!(half_shift_equal(&set(4, &[0, 1]), &set(4, &[2, 3])).unwrap().holds);
        assert!(!half_shift_equal(&set(4, &[0, 2]), &set(4, &[1, 3])).unwrap().holds);
        let z2 = ResidueSet::full(2).unwrap();
        let r = half_shift_equal(&z2, &z2).unwrap();
        assert!(r.holds);
        assert_eq!(r.shift, 1);
        assert!(matches!(
            half_shift_equal(&set(5, &[0]), &set(5, &[1])),
            Err(Error::OddModulus(5))
        ));
    }

    #[test]
    fn ordering_is_numeric_mask_order() {
        let mut v = vec![set(4, &[3]), set(4, &[0, 1]), set(4, &[2]), set(4, &[])];
        v.sort();
        assert_eq!(v, vec![set(4, &[]), set(4, &[0, 1]), set(4, &[2]), set(4, &[3])]);
        assert!(set(130, &[129]) > set(130, &[0, 1, 2, 64]));
    }

    #[test]
    fn display_round_trip() {
        let a = set(4, &[0, 2]);
        assert_eq!(a.to_string(), "4:{0,2}");
        assert_eq!("4:{0,2}".parse::<ResidueSet>().unwrap(), a);
        assert_eq!(set(5, &[]).to_string(), "5:{}");
        assert_eq!(repfn_naive(&a).to_string(), "(2,0,2,0)");
    }
}
