//! Exact convolution backends for representation functions.
//!
//! Every backend returns the same `RepFn` as [`repfn_naive`]; they differ
//! only in cost. The bitset backend accumulates cyclic rotations of the
//! membership mask into bit-sliced counters, O(|A| m / 64) word operations.
//! The NTT backend convolves the indicator vectors exactly modulo
//! [`NTT_PRIME`] at a power-of-two length and folds the linear result
//! cyclically.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};
use crate::residue::{cross_naive, repfn_naive, RepFn, ResidueSet};

/// 119 * 2^23 + 1.
pub const NTT_PRIME: u64 = 998_244_353;
/// Primitive root modulo [`NTT_PRIME`].
pub const NTT_PRIMITIVE_ROOT: u64 = 3;
/// Longest supported transform (the 2-adic order of `NTT_PRIME - 1`).
pub const NTT_MAX_LEN: usize = 1 << 23;

/// Largest modulus for which `auto` picks the naive backend.
pub const AUTO_NAIVE_MAX: usize = 64;
/// Largest modulus for which `auto` picks the bitset backend.
pub const AUTO_BITSET_MAX: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Naive,
    Bitset,
    Ntt,
}

impl BackendKind {
    pub const ALL: [BackendKind; 3] = [BackendKind::Naive, BackendKind::Bitset, BackendKind::Ntt];

    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Naive => "naive",
            BackendKind::Bitset => "bitset",
            BackendKind::Ntt => "ntt",
        }
    }
}

/// A backend request: a fixed kind, or automatic selection by modulus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Auto,
    Naive,
    Bitset,
    Ntt,
}

impl Backend {
    pub fn resolve(self, m: usize) -> BackendKind {
        match self {
            Backend::Naive => BackendKind::Naive,
            Backend::Bitset => BackendKind::Bitset,
            Backend::Ntt => BackendKind::Ntt,
            Backend::Auto if m <= AUTO_NAIVE_MAX => BackendKind::Naive,
            Backend::Auto if m <= AUTO_BITSET_MAX => BackendKind::Bitset,
            Backend::Auto => BackendKind::Ntt,
        }
    }

    pub fn repfn(self, a: &ResidueSet) -> Result<RepFn> {
        repfn_with(a, self.resolve(a.modulus()))
    }

    pub fn cross(self, a: &ResidueSet, b: &ResidueSet) -> Result<RepFn> {
        cross_repfn_backend(a, b, self.resolve(a.modulus()))
    }
}

impl From<BackendKind> for Backend {
    fn from(k: BackendKind) -> Self {
        match k {
            BackendKind::Naive => Backend::Naive,
            BackendKind::Bitset => Backend::Bitset,
            BackendKind::Ntt => Backend::Ntt,
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Auto => "auto",
            Backend::Naive => "naive",
            Backend::Bitset => "bitset",
            Backend::Ntt => "ntt",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "naive" => Ok(Backend::Naive),
            "bitset" => Ok(Backend::Bitset),
            "ntt" => Ok(Backend::Ntt),
            other => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown backend {other:?}"),
            }),
        }
    }
}

/// Reproducibility metadata recorded in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendInfo {
    pub requested: Backend,
    pub ntt_prime: u64,
    pub ntt_primitive_root: u64,
    pub auto_naive_max: usize,
    pub auto_bitset_max: usize,
}

impl BackendInfo {
    pub fn new(requested: Backend) -> Self {
        Self {
            requested,
            ntt_prime: NTT_PRIME,
            ntt_primitive_root: NTT_PRIMITIVE_ROOT,
            auto_naive_max: AUTO_NAIVE_MAX,
            auto_bitset_max: AUTO_BITSET_MAX,
        }
    }
}

pub fn repfn_with(a: &ResidueSet, kind: BackendKind) -> Result<RepFn> {
    match kind {
        BackendKind::Naive => Ok(repfn_naive(a)),
        BackendKind::Bitset => Ok(repfn_bitset(a)),
        BackendKind::Ntt => repfn_ntt(a),
    }
}

pub fn cross_repfn_backend(a: &ResidueSet, b: &ResidueSet, kind: BackendKind) -> Result<RepFn> {
    if a.modulus() != b.modulus() {
        return Err(Error::ModulusMismatch {
            left: a.modulus(),
            right: b.modulus(),
        });
    }
    match kind {
        BackendKind::Naive => Ok(cross_naive(a, b)),
        BackendKind::Bitset => Ok(cross_bitset(a, b)),
        BackendKind::Ntt => cross_ntt(a, b),
    }
}

pub fn repfn_bitset(a: &ResidueSet) -> RepFn {
    cross_bitset(a, a)
}

pub fn repfn_ntt(a: &ResidueSet) -> Result<RepFn> {
    cross_ntt(a, a)
}

/// Bit-sliced counters: `cells[w * depth + j]` holds bit `j` of the counts
/// at the 64 positions of word `w`.
struct SlicedCounter {
    m: usize,
    depth: usize,
    cells: Vec<u64>,
}

impl SlicedCounter {
    /// `max_count` bounds every count that will be reached.
    fn new(m: usize, max_count: usize) -> Self {
        let depth = (usize::BITS - max_count.leading_zeros()).max(1) as usize;
        Self {
            m,
            depth,
            cells: vec![0; bits::word_count(m) * depth],
        }
    }

    /// Adds 1 at every position set in `carry`.
    fn add(&mut self, carry: &[u64]) {
        for (w, &c) in carry.iter().enumerate() {
            let mut c = c;
            let mut cell = w * self.depth;
            while c != 0 {
                let p = &mut self.cells[cell];
                let out = *p & c;
                *p ^= c;
                c = out;
                cell += 1;
            }
        }
    }

    fn into_counts(self) -> Vec<u32> {
        let mut counts = vec![0u32; self.m];
        for (i, chunk) in self.cells.chunks(self.depth).enumerate() {
            for (j, &plane) in chunk.iter().enumerate() {
                let mut bitsleft = plane;
                while bitsleft != 0 {
                    let b = bitsleft.trailing_zeros() as usize;
                    counts[i * bits::WORD + b] |= 1 << j;
                    bitsleft &= bitsleft - 1;
                }
            }
        }
        counts
    }
}

fn cross_bitset(a: &ResidueSet, b: &ResidueSet) -> RepFn {
    let m = a.modulus();
    let (a, b) = if a.cardinality() <= b.cardinality() {
        (a, b)
    } else {
        (b, a)
    };
    if 8 * a.cardinality() >= 3 * m {
        cross_bitset_popcount(a, b)
    } else {
        cross_bitset_accumulate(a, b)
    }
}

/// Sums the rotations `x + B` over `x in A` in bit-sliced counters.
fn cross_bitset_accumulate(a: &ResidueSet, b: &ResidueSet) -> RepFn {
    let m = a.modulus();
    let mut acc = SlicedCounter::new(m, a.cardinality().min(b.cardinality()));
    let mut rotated = vec![0u64; b.words().len()];
    for x in a.iter() {
        bits::rotate_into(b.words(), m, x, &mut rotated);
        acc.add(&rotated);
    }
    RepFn::from_counts_unchecked(acc.into_counts())
}

/// `R_{A,B}(n) = |A ∩ (n - B)|`, one popcount pass per `n`.
fn cross_bitset_popcount(a: &ResidueSet, b: &ResidueSet) -> RepFn {
    let m = a.modulus();
    let doubled = bits::doubled(b.reflect().words(), m);
    let counts = (0..m)
        .map(|n| bits::and_popcount_window(a.words(), &doubled, m - n))
        .collect();
    RepFn::from_counts_unchecked(counts)
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    base %= NTT_PRIME;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % NTT_PRIME;
        }
        base = base * base % NTT_PRIME;
        exp >>= 1;
    }
    acc
}

/// In-place iterative radix-2 transform; `invert` applies the inverse including 1/n.
fn ntt(values: &mut [u64], invert: bool) {
    let n = values.len();
    debug_assert!(n.is_power_of_two() && n <= NTT_MAX_LEN);

    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            values.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let mut w_len = pow_mod(NTT_PRIMITIVE_ROOT, (NTT_PRIME - 1) / len as u64);
        if invert {
            w_len = pow_mod(w_len, NTT_PRIME - 2);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut w = 1u64;
        for _ in 0..half {
            twiddles.push(w);
            w = w * w_len % NTT_PRIME;
        }
        for chunk in values.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let x = *u;
                let y = *v * tw % NTT_PRIME;
                *u = if x + y >= NTT_PRIME { x + y - NTT_PRIME } else { x + y };
                *v = if x >= y { x - y } else { x + NTT_PRIME - y };
            }
        }
        len <<= 1;
    }

    if invert {
        let n_inv = pow_mod(n as u64, NTT_PRIME - 2);
        for v in values.iter_mut() {
            *v = *v * n_inv % NTT_PRIME;
        }
    }
}

fn transform_len(m: usize) -> Result<usize> {
    let len = (2 * m).next_power_of_two();
    if len > NTT_MAX_LEN {
        return Err(Error::TransformTooLarge { m, cap: NTT_MAX_LEN });
    }
    Ok(len)
}

fn indicator(a: &ResidueSet, len: usize) -> Vec<u64> {
    let mut v = vec![0u64; len];
    for x in a.iter() {
        v[x] = 1;
    }
    v
}

fn cross_ntt(a: &ResidueSet, b: &ResidueSet) -> Result<RepFn> {
    let m = a.modulus();
    let len = transform_len(m)?;
    let mut fa = indicator(a, len);
    ntt(&mut fa, false);
    if a == b {
        for v in fa.iter_mut() {
            *v = *v * *v % NTT_PRIME;
        }
    } else {
        let mut fb = indicator(b, len);
        ntt(&mut fb, false);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = *x * y % NTT_PRIME;
        }
    }
    ntt(&mut fa, true);
    // Linear convolution has support 0..2m-1; fold index i + m onto i.
    let counts = (0..m)
        .map(|i| (fa[i] + fa.get(i + m).copied().unwrap_or(0)) as u32)
        .collect();
    Ok(RepFn::from_counts_unchecked(counts))
}
