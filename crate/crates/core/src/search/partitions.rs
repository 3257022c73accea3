use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::checkpoint::CheckpointLog;
use super::combinatorics::{binomial, next_combination, unrank_lex};
use super::{
    canonicalize_pair, PartitionWitness, SearchMode, SearchReport, SearchSpec, SymmetryClass, ORDERING_TAG,
    PARTITION_CAP,
};
use crate::backend::{Backend, BackendInfo};
use crate::error::{Error, Result};
use crate::residue::{check_modulus, ResidueSet};

/// Counts from one full enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    /// Ordered assignments `(A, B)` accounted for; each unordered pair with
    /// `A != B` stands for two.
    pub ordered_assignments: u128,
    pub unordered_pairs: u128,
}

/// Number of ordered assignments `C(m, s) * 2^(m - s)`, saturating.
pub(crate) fn assignment_count(m: usize, s: usize) -> u128 {
    let free = m - s;
    if free >= 128 {
        return u128::MAX;
    }
    binomial(m, s).saturating_mul(1u128 << free)
}

fn check_partition_args(m: usize, s: usize) -> Result<()> {
    check_modulus(m)?;
    if s > m {
        return Err(Error::InvalidSpec(format!("intersection size {s} exceeds m = {m}")));
    }
    if m - s > 63 {
        return Err(Error::InvalidSpec(format!(
            "m - s = {} free residues is beyond the enumerable range",
            m - s
        )));
    }
    Ok(())
}

/// Visits the unordered pairs of one intersection set `C` (the unit `rank`).
///
/// With `C` fixed, the rest `R = Z_m \ C` is split between `A \ C` and
/// `B \ C`. The pair is oriented so that `B` holds the largest element of
/// `R`, which makes `A < B` in mask order. With `size = Some(j)` only pairs
/// with `|A \ C| = j` are visited.
fn for_each_pair_in_unit<F>(m: usize, s: usize, rank: u128, size: Option<usize>, mut f: F) -> Result<u128>
where
    F: FnMut(ResidueSet, ResidueSet) -> Result<()>,
{
    let c_elems = unrank_lex(m, s, rank);
    let c = ResidueSet::new(m, c_elems.iter().map(|&x| x as i64))?;
    let rest: Vec<usize> = c.complement().iter().collect();
    let Some((&top, free)) = rest.split_last() else {
        f(c.clone(), c)?;
        return Ok(1);
    };

    let build = |chosen: &mut dyn Iterator<Item = usize>| {
        let mut a = c.clone();
        let mut b = c.clone();
        let mut in_a = vec![false; free.len()];
        for i in chosen {
            in_a[i] = true;
        }
        for (i, &x) in free.iter().enumerate() {
            if in_a[i] {
                a.insert(x);
            } else {
                b.insert(x);
            }
        }
        b.insert(top);
        (a, b)
    };

    let mut visited = 0u128;
    match size {
        None => {
            for mask in 0u64..(1u64 << free.len()) {
                let (a, b) = build(&mut (0..free.len()).filter(|i| mask >> i & 1 == 1));
                f(a, b)?;
                visited += 2;
            }
        }
        Some(j) if j <= free.len() => {
            let mut comb: Vec<usize> = (0..j).collect();
            loop {
                let (a, b) = build(&mut comb.iter().copied());
                f(a, b)?;
                visited += 2;
                if !next_combination(&mut comb, free.len()) {
                    break;
                }
            }
        }
        Some(_) => {}
    }
    Ok(visited)
}

/// Visits every unordered pair `{A, B}` with `A ∪ B = Z_m` and `|A ∩ B| = s`
/// exactly once, as `(A, B)` with `A <= B`.
pub fn enumerate_partitions<F>(m: usize, s: usize, mut visitor: F) -> Result<EnumerationStats>
where
    F: FnMut(&ResidueSet, &ResidueSet),
{
    check_partition_args(m, s)?;
    let mut stats = EnumerationStats::default();
    for rank in 0..binomial(m, s) {
        stats.ordered_assignments += for_each_pair_in_unit(m, s, rank, None, |a, b| {
            visitor(&a, &b);
            stats.unordered_pairs += 1;
            Ok(())
        })?;
    }
    Ok(stats)
}

struct Filters {
    /// `|A| = m/2 + s/2`.
    size_target: Option<usize>,
    /// `R_C(n)` even for every `n`.
    parity: bool,
}

impl Filters {
    fn for_search(m: usize, s: usize, prune: bool) -> Self {
        let applies = prune && m.is_multiple_of(2) && s.is_multiple_of(2) && s > 0 && s < m;
        Self {
            size_target: applies.then(|| (m - s) / 2),
            parity: applies,
        }
    }
}

fn search_unit(m: usize, s: usize, rank: u64, filters: &Filters, backend: Backend) -> Result<Vec<PartitionWitness>> {
    if filters.parity {
        let c = ResidueSet::new(m, unrank_lex(m, s, rank as u128).into_iter().map(|x| x as i64))?;
        if backend.repfn(&c)?.counts().iter().any(|&r| r % 2 == 1) {
            return Ok(Vec::new());
        }
    }
    let mut found = Vec::new();
    for_each_pair_in_unit(m, s, rank as u128, filters.size_target, |a, b| {
        if backend.repfn(&a)? == backend.repfn(&b)? {
            found.push(PartitionWitness::new(a, b));
        }
        Ok(())
    })?;
    Ok(found)
}

/// Every covering pair with `|A ∩ B| = s` and `R_A = R_B`, classified as
/// half-shift or exotic.
///
/// With `prune` set and `m`, `s` even, `0 < s < m`, two sound filters apply:
/// assignments with `|A| != m/2 + s/2` are skipped, and intersection sets
/// `C` with some odd `R_C(n)` are skipped whole.
pub fn find_equal_partitions(spec: &SearchSpec) -> Result<SearchReport> {
    let started = Instant::now();
    let SearchMode::Partition { s } = spec.mode else {
        return Err(Error::InvalidSpec("find_equal_partitions needs partition mode".into()));
    };
    let m = spec.m;
    check_partition_args(m, s)?;
    let total = assignment_count(m, s);
    if total > PARTITION_CAP {
        return Err(Error::CapExceeded {
            count: total,
            cap: PARTITION_CAP,
        });
    }
    let units = binomial(m, s) as u64;
    let filters = Filters::for_search(m, s, spec.prune);
    let echo = spec.echo();

    let (log, completed) = match &spec.checkpoint {
        Some(path) => {
            let (log, done) = CheckpointLog::open(path, &echo)?;
            (Some(log), done)
        }
        None => (None, Default::default()),
    };

    let started_units = AtomicUsize::new(0);
    let per_unit: Vec<Option<Vec<PartitionWitness>>> = spec.thread_pool().install(|| {
        (0..units)
            .into_par_iter()
            .map(|u| -> Result<Option<Vec<PartitionWitness>>> {
                if let Some(done) = completed.get(&u) {
                    return Ok(Some(done.clone()));
                }
                if let Some(limit) = spec.halt_after_units {
                    if started_units.fetch_add(1, Ordering::SeqCst) >= limit {
                        return Ok(None);
                    }
                }
                let found = search_unit(m, s, u, &filters, spec.backend)?;
                if let Some(log) = &log {
                    log.record(u, &found)?;
                }
                Ok(Some(found))
            })
            .collect::<Result<_>>()
    })?;

    let missing = per_unit.iter().filter(|u| u.is_none()).count();
    if missing > 0 {
        return Err(Error::Interrupted {
            completed: per_unit.len() - missing,
        });
    }

    let mut witnesses: Vec<PartitionWitness> = per_unit.into_iter().flatten().flatten().collect();
    witnesses.sort();

    let symmetry_classes = spec.up_to_symmetry.then(|| symmetry_classes(&witnesses));
    let half_shift_count = witnesses.iter().filter(|w| w.half_shift).count();
    Ok(SearchReport {
        spec: echo,
        total_candidates: total as u64,
        witness_count: witnesses.len(),
        exotic_count: witnesses.len() - half_shift_count,
        half_shift_count,
        degenerate_count: witnesses.iter().filter(|w| w.degenerate).count(),
        witnesses,
        symmetry_classes,
        elapsed_ms: started.elapsed().as_millis() as u64,
        backend: BackendInfo::new(spec.backend),
        ordering: ORDERING_TAG.to_string(),
    })
}

fn symmetry_classes(witnesses: &[PartitionWitness]) -> Vec<SymmetryClass> {
    let mut groups: BTreeMap<(ResidueSet, ResidueSet), (usize, bool)> = BTreeMap::new();
    for w in witnesses {
        let entry = groups.entry(canonicalize_pair(&w.a, &w.b)).or_insert((0, w.half_shift));
        entry.0 += 1;
    }
    groups
        .into_iter()
        .map(|((a, b), (size, half_shift))| SymmetryClass {
            representative_a: a,
            representative_b: b,
            size,
            half_shift,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::repfn_naive;

    #[test]
    fn forced_pairs() {
        let mut seen = Vec::new();
        let stats = enumerate_partitions(2, 2, |a, b| seen.push((a.clone(), b.clone()))).unwrap();
        let z2 = ResidueSet::full(2).unwrap();
        assert_eq!(seen, vec![(z2.clone(), z2)]);
        assert_eq!(stats.ordered_assignments, 1);

        let stats = enumerate_partitions(6, 6, |a, b| assert!(a.is_full() && b.is_full())).unwrap();
        assert_eq!(stats.unordered_pairs, 1);
    }

    #[test]
    fn count_matches_formula_and_brute_force_on_z4() {
        let mut pairs = std::collections::BTreeSet::new();
        let stats = enumerate_partitions(4, 2, |a, b| {
            assert!(a < b);
            assert!(pairs.insert((a.clone(), b.clone())));
        })
        .unwrap();
        assert_eq!(stats.unordered_pairs, 12);
        assert_eq!(stats.ordered_assignments, 6 * 4);

        let mut brute = std::collections::BTreeSet::new();
        for x in 0u64..16 {
            for y in 0u64..16 {
                if x | y == 15 && (x & y).count_ones() == 2 && x < y {
                    brute.insert((ResidueSet::from_u64(4, x).unwrap(), ResidueSet::from_u64(4, y).unwrap()));
                }
            }
        }
        assert_eq!(pairs, brute);
    }

    #[test]
    fn small_search_examples() {
        let r = find_equal_partitions(&SearchSpec::partition(6, 2)).unwrap();
        assert!(r.witness_count > 0);
        assert_eq!(r.exotic_count, 0);

        let r = find_equal_partitions(&SearchSpec::partition(6, 3).prune(false)).unwrap();
        assert!(r.witnesses.is_empty());

        let r = find_equal_partitions(&SearchSpec::partition(8, 4)).unwrap();
        assert!(r.exotic_count >= 1);
        for w in &r.witnesses {
            assert_eq!(repfn_naive(&w.a), repfn_naive(&w.b));
            assert_eq!(w.a.union(&w.b).unwrap().cardinality(), 8);
        }
    }

    #[test]
    fn cap_and_mode_checks() {
        assert!(matches!(
            find_equal_partitions(&SearchSpec::partition(48, 4)),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            find_equal_partitions(&SearchSpec::partition(6, 7)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            find_equal_partitions(&SearchSpec::equal_repfn(6, 2)),
            Err(Error::InvalidSpec(_))
        ));
        // s = m on a large modulus is a single pair and within the cap.
        let r = find_equal_partitions(&SearchSpec::partition(200, 200)).unwrap();
        assert_eq!(r.witness_count, 1);
        assert_eq!(r.degenerate_count, 1);
    }
}
