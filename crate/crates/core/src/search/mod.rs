//! Exhaustive search over covering pairs and equal-size subsets.
//!
//! Two modes:
//!
//! * **partition**: every unordered pair `{A, B}` with `A ∪ B = Z_m` and
//!   `|A ∩ B| = s`, reporting those with `R_A = R_B`. Work units are the
//!   intersection sets `C`, indexed by lexicographic rank.
//! * **equal-repfn**: every k-subset of `Z_m`, grouped into classes of equal
//!   representation function.
//!
//! Reports are sorted before emission, so their content depends only on the
//! search parameters, never on the thread count or on checkpoint resumption.

mod canonical;
mod checkpoint;
mod collisions;
mod combinatorics;
mod partitions;
mod verify;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::backend::{Backend, BackendInfo};
use crate::residue::{RepFn, ResidueSet};

pub use canonical::{canonicalize, canonicalize_pair, units};
pub use collisions::{run_equal_repfn, search_equal_repfn};
pub use combinatorics::{binomial, next_combination, unrank_lex};
pub use partitions::{enumerate_partitions, find_equal_partitions, EnumerationStats};
pub use verify::{half_shift_pairs, verify_theorem, RunOutcome, Theorem, VerificationReport, VerifyOptions};

/// Partition mode refuses more than this many ordered assignments.
pub const PARTITION_CAP: u128 = 1 << 40;
/// Equal-repfn mode refuses more than this many k-subsets.
pub const EQUAL_REPFN_CAP: u128 = 1 << 28;

/// Tag describing the sort applied to every emitted list.
pub const ORDERING_TAG: &str = "mask-asc";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SearchMode {
    Partition { s: usize },
    EqualRepfn { k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub m: usize,
    pub mode: SearchMode,
    pub exclude_half_shift: bool,
    pub up_to_symmetry: bool,
    pub prune: bool,
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    pub backend: Backend,
    /// Stop after this many work units complete in this run (simulated kill).
    pub halt_after_units: Option<usize>,
}

impl SearchSpec {
    fn with_mode(m: usize, mode: SearchMode) -> Self {
        Self {
            m,
            mode,
            exclude_half_shift: false,
            up_to_symmetry: false,
            prune: true,
            jobs: 1,
            checkpoint: None,
            backend: Backend::Auto,
            halt_after_units: None,
        }
    }

    pub fn partition(m: usize, s: usize) -> Self {
        Self::with_mode(m, SearchMode::Partition { s })
    }

    pub fn equal_repfn(m: usize, k: usize) -> Self {
        Self::with_mode(m, SearchMode::EqualRepfn { k })
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn prune(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }

    pub fn backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint = Some(path.into());
        self
    }

    pub fn exclude_half_shift(mut self, yes: bool) -> Self {
        self.exclude_half_shift = yes;
        self
    }

    pub fn up_to_symmetry(mut self, yes: bool) -> Self {
        self.up_to_symmetry = yes;
        self
    }

    pub fn halt_after_units(mut self, units: usize) -> Self {
        self.halt_after_units = Some(units);
        self
    }

    /// The part of the spec that determines results (no jobs, paths or backend).
    pub fn echo(&self) -> SpecEcho {
        SpecEcho {
            m: self.m,
            mode: self.mode,
            prune: self.prune,
            exclude_half_shift: self.exclude_half_shift,
            up_to_symmetry: self.up_to_symmetry,
        }
    }

    pub(crate) fn thread_pool(&self) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.max(1))
            .build()
            .expect("failed to build search thread pool")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecEcho {
    pub m: usize,
    #[serde(flatten)]
    pub mode: SearchMode,
    pub prune: bool,
    pub exclude_half_shift: bool,
    pub up_to_symmetry: bool,
}

/// A covering pair with equal representation functions, `A <= B`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionWitness {
    pub a: ResidueSet,
    pub b: ResidueSet,
    pub intersection: ResidueSet,
    pub intersection_size: usize,
    pub half_shift: bool,
    pub degenerate: bool,
    /// The pair is the least member of its joint affine orbit.
    pub canonical: bool,
}

impl PartitionWitness {
    pub(crate) fn new(a: ResidueSet, b: ResidueSet) -> Self {
        let m = a.modulus();
        let intersection = a.intersection(&b).expect("same modulus");
        let half_shift = m.is_multiple_of(2) && a.shift((m / 2) as i64) == b;
        let (ca, cb) = canonicalize_pair(&a, &b);
        let canonical = ca == a && cb == b;
        Self {
            intersection_size: intersection.cardinality(),
            degenerate: a == b,
            a,
            b,
            intersection,
            half_shift,
            canonical,
        }
    }
}

/// Witnesses sharing one joint canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryClass {
    pub representative_a: ResidueSet,
    pub representative_b: ResidueSet,
    pub size: usize,
    pub half_shift: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub spec: SpecEcho,
    pub total_candidates: u64,
    pub witnesses: Vec<PartitionWitness>,
    pub witness_count: usize,
    pub exotic_count: usize,
    pub half_shift_count: usize,
    pub degenerate_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_classes: Option<Vec<SymmetryClass>>,
    pub elapsed_ms: u64,
    pub backend: BackendInfo,
    pub ordering: String,
}

impl SearchReport {
    pub fn exotic(&self) -> impl Iterator<Item = &PartitionWitness> {
        self.witnesses.iter().filter(|w| !w.half_shift)
    }

    pub fn contains_pair(&self, a: &ResidueSet, b: &ResidueSet) -> bool {
        let (x, y) = if b < a { (b, a) } else { (a, b) };
        self.witnesses.iter().any(|w| &w.a == x && &w.b == y)
    }
}

/// k-subsets sharing one exact representation function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionClass {
    pub repfn_key: RepFn,
    pub members: Vec<ResidueSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub spec: SpecEcho,
    pub total_candidates: u64,
    pub class_count: usize,
    pub classes: Vec<CollisionClass>,
    pub elapsed_ms: u64,
    pub backend: BackendInfo,
    pub ordering: String,
}
