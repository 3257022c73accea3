//! Exact representation functions over the residue ring Z_m.
//!
//! For `A ⊆ Z_m`, `R_A(n)` is the number of **ordered** pairs `(a, a')` in
//! `A x A` with `a + a' ≡ n (mod m)`. The crate provides
//!
//! * [`ResidueSet`] / [`RepFn`] value types and reference computations,
//! * three interchangeable exact backends (naive, bit-sliced rotation,
//!   number-theoretic transform),
//! * oracles for the structural identities of `R` and the explicit exotic
//!   constructions for `4 | m`,
//! * an exhaustive, parallel, resumable search over covering pairs
//!   `A ∪ B = Z_m` and over equal-size subsets,
//! * a versioned JSON/CSV report format.
//!
//! ```
//! use repclass::{repfn_naive, ResidueSet};
//!
//! let a: ResidueSet = "4:{0,2}".parse().unwrap();
//! let b: ResidueSet = "4:{1,3}".parse().unwrap();
//! assert_eq!(repfn_naive(&a), repfn_naive(&b));
//! assert_eq!(repfn_naive(&a).counts(), &[2, 0, 2, 0]);
//! ```

mod bits;

pub mod backend;
pub mod error;
pub mod identities;
pub mod oracles;
pub mod report;
pub mod residue;
pub mod search;

pub use backend::{cross_repfn_backend, repfn_bitset, repfn_ntt, repfn_with, Backend, BackendKind};
pub use error::{Error, Result};
pub use residue::{cross_repfn, half_shift_equal, repfn_naive, HalfShiftRelation, RepFn, ResidueSet};
