//! Word-array helpers for m-bit masks stored little-endian in `u64` words.

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn word_count(m: usize) -> usize {
    m.div_ceil(WORD)
}

/// Mask of valid bits in the last word of an m-bit array.
#[inline]
pub(crate) fn tail_mask(m: usize) -> u64 {
    match m % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

#[inline]
pub(crate) fn get(words: &[u64], i: usize) -> bool {
    words[i / WORD] >> (i % WORD) & 1 == 1
}

#[inline]
pub(crate) fn set(words: &mut [u64], i: usize) {
    words[i / WORD] |= 1 << (i % WORD);
}

pub(crate) fn clear_tail(words: &mut [u64], m: usize) {
    if let Some(last) = words.last_mut() {
        *last &= tail_mask(m);
    }
}

/// `dst = src << k`, truncated to `dst.len()` words.
fn shl_into(src: &[u64], k: usize, dst: &mut [u64]) {
    let (ws, bs) = (k / WORD, k % WORD);
    for (i, d) in dst.iter_mut().enumerate() {
        *d = if i < ws {
            0
        } else {
            let lo = src.get(i - ws).copied().unwrap_or(0);
            if bs == 0 {
                lo
            } else {
                let carry = if i > ws {
                    src.get(i - ws - 1).copied().unwrap_or(0)
                } else {
                    0
                };
                (lo << bs) | (carry >> (WORD - bs))
            }
        };
    }
}

/// `dst |= src >> k`.
fn shr_or_into(src: &[u64], k: usize, dst: &mut [u64]) {
    let (ws, bs) = (k / WORD, k % WORD);
    for (i, d) in dst.iter_mut().enumerate() {
        let Some(&lo) = src.get(i + ws) else { break };
        let v = if bs == 0 {
            lo
        } else {
            let hi = src.get(i + ws + 1).copied().unwrap_or(0);
            (lo >> bs) | (hi << (WORD - bs))
        };
        *d |= v;
    }
}

/// Cyclic rotation of an m-bit mask: bit `(i + k) mod m` of the result is bit `i` of `src`.
pub(crate) fn rotate_into(src: &[u64], m: usize, k: usize, dst: &mut [u64]) {
    debug_assert_eq!(src.len(), word_count(m));
    debug_assert_eq!(dst.len(), src.len());
    let k = k % m;
    if k == 0 {
        dst.copy_from_slice(src);
        return;
    }
    shl_into(src, k, dst);
    clear_tail(dst, m);
    shr_or_into(src, m - k, dst);
}

pub(crate) fn rotate(src: &[u64], m: usize, k: usize) -> Vec<u64> {
    let mut dst = vec![0; src.len()];
    rotate_into(src, m, k, &mut dst);
    dst
}

/// The `2m`-bit concatenation of an m-bit mask with itself, plus one spare
/// zero word so that any 64-bit window starting below `2m` can be read.
pub(crate) fn doubled(src: &[u64], m: usize) -> Vec<u64> {
    let mut out = vec![0u64; word_count(2 * m) + 1];
    out[..src.len()].copy_from_slice(src);
    shl_or_into(src, m, &mut out);
    out
}

/// `dst |= src << k` (no truncation beyond `dst.len()`).
fn shl_or_into(src: &[u64], k: usize, dst: &mut [u64]) {
    let (ws, bs) = (k / WORD, k % WORD);
    for (i, &w) in src.iter().enumerate() {
        dst[i + ws] |= w << bs;
        if bs != 0 && i + ws + 1 < dst.len() {
            dst[i + ws + 1] |= w >> (WORD - bs);
        }
    }
}

/// `popcount(mask & window)` where word `i` of the window is bits
/// `offset + 64 i ..` of `src`.
pub(crate) fn and_popcount_window(mask: &[u64], src: &[u64], offset: usize) -> u32 {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports popcnt.
        return unsafe { and_popcount_window_popcnt(mask, src, offset) };
    }
    and_popcount_window_generic(mask, src, offset)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn and_popcount_window_popcnt(mask: &[u64], src: &[u64], offset: usize) -> u32 {
    and_popcount_window_generic(mask, src, offset)
}

#[inline(always)]
fn and_popcount_window_generic(mask: &[u64], src: &[u64], offset: usize) -> u32 {
    let (ws, bs) = (offset / WORD, offset % WORD);
    let mut total = 0;
    if bs == 0 {
        for (i, &w) in mask.iter().enumerate() {
            total += (w & src[ws + i]).count_ones();
        }
    } else {
        let window = &src[ws..ws + mask.len() + 1];
        for (i, &w) in mask.iter().enumerate() {
            let win = (window[i] >> bs) | (window[i + 1] << (WORD - bs));
            total += (w & win).count_ones();
        }
    }
    total
}

pub(crate) fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * WORD + b)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_elems(m: usize, e: &[usize]) -> Vec<u64> {
        let mut w = vec![0; word_count(m)];
        for &i in e {
            set(&mut w, i);
        }
        w
    }

    #[test]
    fn rotation_matches_elementwise_shift() {
        for m in [1usize, 5, 63, 64, 65, 127, 128, 130, 200] {
            let elems: Vec<usize> = (0..m).filter(|i| (i * 7 + 3) % 5 < 2).collect();
            let src = from_elems(m, &elems);
            for k in [0, 1, 2, 31, 63, 64, 65, m - 1, m, m + 3] {
                let want: Vec<usize> = {
                    let mut v: Vec<usize> = elems.iter().map(|&i| (i + k) % m).collect();
                    v.sort_unstable();
                    v
                };
                let got: Vec<usize> = ones(&rotate(&src, m, k)).collect();
                assert_eq!(got, want, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn windows_of_doubled_mask_are_rotations() {
        for m in [1usize, 5, 63, 64, 65, 128, 130, 200] {
            let elems: Vec<usize> = (0..m).filter(|i| (i * 5 + 1) % 3 == 0).collect();
            let src = from_elems(m, &elems);
            let full = from_elems(m, &(0..m).collect::<Vec<_>>());
            let d = doubled(&src, m);
            for k in 0..m {
                let want = rotate(&src, m, k).iter().map(|w| w.count_ones()).sum::<u32>();
                assert_eq!(and_popcount_window(&full, &d, m - k), want, "m={m} k={k}");
            }
        }
    }
}
