//! Canonical forms under the affine maps `x -> u x + c` (u a unit of Z_m).
//!
//! Reflection `x -> -x` is the unit `u = m - 1`, so it is covered by the
//! same orbit. Canonical means least in the numeric mask order of
//! [`ResidueSet`]'s `Ord`.

use crate::residue::{gcd, ResidueSet};

pub fn units(m: usize) -> Vec<usize> {
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|&u| gcd(u, m) == 1).collect()
}

pub fn canonicalize(a: &ResidueSet) -> ResidueSet {
    let m = a.modulus();
    let mut best = a.clone();
    for u in units(m) {
        let scaled = a.scale_unchecked(u);
        for c in 0..m {
            let cand = scaled.shift(c as i64);
            if cand < best {
                best = cand;
            }
        }
    }
    best
}

fn ordered(a: ResidueSet, b: ResidueSet) -> (ResidueSet, ResidueSet) {
    if b < a {
        (b, a)
    } else {
        (a, b)
    }
}

/// Least image of the unordered pair `{A, B}` under a joint affine map.
pub fn canonicalize_pair(a: &ResidueSet, b: &ResidueSet) -> (ResidueSet, ResidueSet) {
    let m = a.modulus();
    let mut best = ordered(a.clone(), b.clone());
    for u in units(m) {
        let (sa, sb) = (a.scale_unchecked(u), b.scale_unchecked(u));
        for c in 0..m {
            let cand = ordered(sa.shift(c as i64), sb.shift(c as i64));
            if cand < best {
                best = cand;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: usize, e: &[i64]) -> ResidueSet {
        ResidueSet::new(m, e.iter().copied()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(canonicalize(&set(4, &[1, 3])), canonicalize(&set(4, &[0, 2])));
        assert_eq!(canonicalize(&set(4, &[1, 3])), set(4, &[0, 2]));
        let e = ResidueSet::empty(9).unwrap();
        assert_eq!(canonicalize(&e), e);
        assert_eq!(units(1), vec![0]);
        assert_eq!(units(12), vec![1, 5, 7, 11]);
    }

    #[test]
    fn idempotent_and_orbit_invariant_on_z8() {
        for mask in 0u64..256 {
            let a = ResidueSet::from_u64(8, mask).unwrap();
            let c = canonicalize(&a);
            assert_eq!(canonicalize(&c), c);
            assert!(c <= a);
            assert_eq!(canonicalize(&a.reflect()), c);
            assert_eq!(canonicalize(&a.shift(3).scale_unit(5).unwrap()), c);
        }
    }

    #[test]
    fn pair_canonical_form_is_joint() {
        let a = set(8, &[0, 1, 2, 4, 5, 6]);
        let b = set(8, &[2, 3, 4, 6, 7, 0]);
        let (x, y) = canonicalize_pair(&a, &b);
        assert!(x <= y);
        assert_eq!(canonicalize_pair(&b.shift(1), &a.shift(1)), (x.clone(), y.clone()));
        assert_eq!(canonicalize_pair(&a.reflect(), &b.reflect()), (x, y));
    }
}
