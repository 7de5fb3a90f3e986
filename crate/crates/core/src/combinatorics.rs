//! Lexicographic k-combinations with ranking, and integer compositions.

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The combination of rank `rank` among the `k`-subsets of `0..n` in
/// lexicographic order.
pub fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            let block = binomial(n - next - 1, remaining);
            if rank < block {
                break;
            }
            rank -= block;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Advances `comb` to its lexicographic successor among subsets of `0..n`.
/// Returns the first position that changed, or `None` after the last one.
pub fn next_combination(comb: &mut [usize], n: usize) -> Option<usize> {
    let k = comb.len();
    let mut pos = k;
    while pos > 0 {
        pos -= 1;
        if comb[pos] < n - k + pos {
            comb[pos] += 1;
            for t in pos + 1..k {
                comb[t] = comb[t - 1] + 1;
            }
            return Some(pos);
        }
    }
    None
}

/// All ordered ways of writing `total` as `parts` positive integers.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if parts == 0 || total < parts {
        return out;
    }
    let mut current = Vec::with_capacity(parts);
    fill(total, parts, &mut current, &mut out);
    out
}

fn fill(left: usize, parts: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        current.push(left);
        out.push(current.clone());
        current.pop();
        return;
    }
    for first in 1..=left - (parts - 1) {
        current.push(first);
        fill(left - first, parts - 1, current, out);
        current.pop();
    }
}
