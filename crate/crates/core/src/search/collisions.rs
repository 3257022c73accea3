use std::time::Instant;

use rayon::prelude::*;

use super::combinatorics::{binomial, next_combination, unrank_lex};
use super::{CollisionClass, CollisionReport, SearchMode, SearchSpec, EQUAL_REPFN_CAP, ORDERING_TAG};
use crate::backend::BackendInfo;
use crate::error::{Error, Result};
use crate::residue::{check_modulus, RepFn, ResidueSet};

const CHUNK: u64 = 1 << 14;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 128-bit fingerprint of a count vector. Only used for bucketing; bucket
/// members are compared exactly afterwards.
fn fingerprint(r: &RepFn) -> u128 {
    let (mut h1, mut h2) = (0x9e37_79b9_7f4a_7c15u64, 0xd1b5_4a32_d192_ed03u64);
    for (i, &c) in r.counts().iter().enumerate() {
        let v = u64::from(c) | (i as u64) << 32;
        h1 = mix64(h1 ^ v);
        h2 = mix64(h2.rotate_left(17) ^ v.wrapping_mul(0xff51_afd7_ed55_8ccd));
    }
    (u128::from(h1) << 64) | u128::from(h2)
}

fn set_of(m: usize, comb: &[usize]) -> Result<ResidueSet> {
    ResidueSet::new(m, comb.iter().map(|&x| x as i64))
}

/// Groups all k-subsets of `Z_m` by exact representation function and
/// returns the groups with at least two members.
///
/// With `exclude_half_shift` (even `m`), each set is replaced by the lesser
/// of `A` and `A + m/2`, duplicates are removed, and only classes that keep
/// two or more members are reported.
pub fn search_equal_repfn(spec: &SearchSpec) -> Result<Vec<CollisionClass>> {
    let SearchMode::EqualRepfn { k } = spec.mode else {
        return Err(Error::InvalidSpec("search_equal_repfn needs equal-repfn mode".into()));
    };
    let m = spec.m;
    check_modulus(m)?;
    if k == 0 || k > m {
        return Err(Error::InvalidSpec(format!("subset size k = {k} outside 1..={m}")));
    }
    let total = binomial(m, k);
    if total > EQUAL_REPFN_CAP {
        return Err(Error::CapExceeded {
            count: total,
            cap: EQUAL_REPFN_CAP,
        });
    }
    let total = total as u64;
    let backend = spec.backend;

    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let mut keyed: Vec<(u128, u64)> = spec.thread_pool().install(|| {
        chunks
            .par_iter()
            .map(|&chunk| -> Result<Vec<(u128, u64)>> {
                let start = chunk * CHUNK;
                let end = (start + CHUNK).min(total);
                let mut comb = unrank_lex(m, k, start as u128);
                let mut out = Vec::with_capacity((end - start) as usize);
                for rank in start..end {
                    let r = backend.repfn(&set_of(m, &comb)?)?;
                    out.push((fingerprint(&r), rank));
                    next_combination(&mut comb, m);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().flatten().collect())
    })?;
    keyed.par_sort_unstable();

    let half = (spec.exclude_half_shift && m.is_multiple_of(2)).then_some((m / 2) as i64);
    let mut classes = Vec::new();
    for bucket in keyed.chunk_by(|x, y| x.0 == y.0).filter(|b| b.len() >= 2) {
        let mut exact: Vec<(RepFn, ResidueSet)> = bucket
            .iter()
            .map(|&(_, rank)| {
                let set = set_of(m, &unrank_lex(m, k, rank as u128))?;
                Ok((backend.repfn(&set)?, set))
            })
            .collect::<Result<_>>()?;
        exact.sort();
        for group in exact.chunk_by(|x, y| x.0 == y.0) {
            let mut members: Vec<ResidueSet> = group
                .iter()
                .map(|(_, a)| match half {
                    Some(h) => a.clone().min(a.shift(h)),
                    None => a.clone(),
                })
                .collect();
            members.sort();
            members.dedup();
            if members.len() >= 2 {
                classes.push(CollisionClass {
                    repfn_key: group[0].0.clone(),
                    members,
                });
            }
        }
    }
    classes.sort_by(|x, y| x.members.cmp(&y.members));
    Ok(classes)
}

pub fn run_equal_repfn(spec: &SearchSpec) -> Result<CollisionReport> {
    let started = Instant::now();
    let classes = search_equal_repfn(spec)?;
    let SearchMode::EqualRepfn { k } = spec.mode else {
        unreachable!("mode checked by search_equal_repfn");
    };
    Ok(CollisionReport {
        spec: spec.echo(),
        total_candidates: binomial(spec.m, k) as u64,
        class_count: classes.len(),
        classes,
        elapsed_ms: started.elapsed().as_millis() as u64,
        backend: BackendInfo::new(spec.backend),
        ordering: ORDERING_TAG.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::repfn_naive;

    fn set(m: usize, e: &[i64]) -> ResidueSet {
        ResidueSet::new(m, e.iter().copied()).unwrap()
    }

    #[test]
    fn z4_pairs() {
        let classes = search_equal_repfn(&SearchSpec::equal_repfn(4, 2).exclude_half_shift(true)).unwrap();
        assert!(classes
            .iter()
            .any(|c| c.members == vec![set(4, &[0, 2]), set(4, &[1, 3])]));
    }

    #[test]
    fn singletons_never_collide_for_odd_m() {
        assert!(search_equal_repfn(&SearchSpec::equal_repfn(5, 1)).unwrap().is_empty());
    }

    #[test]
    fn classes_are_exact_and_complete_on_z8() {
        for k in 1..=8 {
            let classes = search_equal_repfn(&SearchSpec::equal_repfn(8, k).jobs(3)).unwrap();
            let mut by_r = std::collections::BTreeMap::<RepFn, Vec<ResidueSet>>::new();
            for mask in 0u64..256 {
                if mask.count_ones() as usize == k {
                    let a = ResidueSet::from_u64(8, mask).unwrap();
                    by_r.entry(repfn_naive(&a)).or_default().push(a);
                }
            }
            let mut want: Vec<CollisionClass> = by_r
                .into_iter()
                .filter(|(_, v)| v.len() >= 2)
                .map(|(repfn_key, mut members)| {
                    members.sort();
                    CollisionClass { repfn_key, members }
                })
                .collect();
            want.sort_by(|x, y| x.members.cmp(&y.members));
            assert_eq!(classes, want, "k = {k}");
        }
    }

    #[test]
    fn rejects_bad_k_and_cap() {
        assert!(search_equal_repfn(&SearchSpec::equal_repfn(5, 0)).is_err());
        assert!(search_equal_repfn(&SearchSpec::equal_repfn(5, 6)).is_err());
        assert!(matches!(
            search_equal_repfn(&SearchSpec::equal_repfn(64, 32)),
            Err(Error::CapExceeded { cap, .. }) if cap == EQUAL_REPFN_CAP
        ));
    }
}
