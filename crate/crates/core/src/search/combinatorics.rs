//! Binomials and lexicographic ranking of k-combinations of `0..n`.

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        let Some(v) = a.checked_mul(num / d) else {
            return u128::MAX;
        };
        acc = v;
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The combination of lexicographic rank `rank` among the k-subsets of `0..n`.
pub fn unrank_lex(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    debug_assert!(rank < binomial(n, k));
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    while out.len() < k {
        let remaining = k - out.len() - 1;
        let with_x = binomial(n - x - 1, remaining);
        if rank < with_x {
            out.push(x);
        } else {
            rank -= with_x;
        }
        x += 1;
    }
    out
}

/// Advances `c` to the next k-combination of `0..n` in lexicographic order.
pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}
