//! Brute-force oracles, kept independent of the library's enumeration code.
#![allow(dead_code)]

use tpd_core::{Rational, SelfMap, Space};

pub fn s_naive(space: &Space, tuple: &[usize]) -> Rational {
    let mut sum = Rational::from_integer(0.into());
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            sum += space.d(tuple[i], tuple[j]);
        }
    }
    sum
}

fn tuples(points: &[usize], k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    let from = prefix.last().map_or(0, |&last| points.iter().position(|&p| p == last).unwrap() + 1);
    for idx in from..points.len() {
        prefix.push(points[idx]);
        tuples(points, k, prefix, out);
        prefix.pop();
    }
}

/// All strictly increasing `k`-tuples of `points` (assumed ascending).
pub fn all_tuples(points: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    tuples(points, k, &mut Vec::new(), &mut out);
    out
}

/// Max ratio and first maximizer, recomputing both sums from scratch per tuple.
pub fn naive_coefficient(space: &Space, map: &SelfMap, points: &[usize], k: usize) -> (Rational, Vec<usize>) {
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for t in all_tuples(points, k) {
        let image: Vec<usize> = t.iter().map(|&x| map.apply(x)).collect();
        let ratio = s_naive(space, &image) / s_naive(space, &t);
        if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
            best = Some((ratio, t));
        }
    }
    best.unwrap()
}

/// Shortest path by enumerating every simple path (small N only).
pub fn shortest_path_oracle(w: &[Vec<Rational>], from: usize, to: usize) -> Rational {
    fn dfs(w: &[Vec<Rational>], at: usize, to: usize, used: &mut Vec<bool>, acc: Rational, best: &mut Option<Rational>) {
        if at == to {
            if best.as_ref().is_none_or(|b| acc < *b) {
                *best = Some(acc);
            }
            return;
        }
        for next in 0..w.len() {
            if !used[next] {
                used[next] = true;
                dfs(w, next, to, used, acc.clone() + &w[at][next], best);
                used[next] = false;
            }
        }
    }
    let mut used = vec![false; w.len()];
    used[from] = true;
    let mut best = None;
    dfs(w, from, to, &mut used, Rational::from_integer(0.into()), &mut best);
    best.unwrap()
}

pub fn is_metric_oracle(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    let zero = Rational::from_integer(0.into());
    for i in 0..n {
        for j in 0..n {
            if i == j && m[i][j] != zero {
                return false;
            }
            if i != j && (m[i][j] <= zero || m[i][j] != m[j][i]) {
                return false;
            }
            for k in 0..n {
                if m[i][j] > m[i][k].clone() + &m[k][j] {
                    return false;
                }
            }
        }
    }
    true
}

/// Prime period by iterating T up to N times from `x`.
pub fn periodic_oracle(map: &SelfMap) -> Vec<(usize, usize)> {
    let n = map.len();
    (0..n)
        .filter_map(|x| {
            let mut y = x;
            for k in 1..=n {
                y = map.apply(y);
                if y == x {
                    return Some((x, k));
                }
            }
            None
        })
        .collect()
}
