//! Total pairwise distance and the exact contraction coefficient of a
//! self-map on `n`-point tuples.
//!
//! The coefficient of `T` at arity `n` is the largest ratio
//! `S(Tx_1, ..., Tx_n) / S(x_1, ..., x_n)` over pairwise distinct tuples,
//! where `S` sums all pairwise distances. A map belongs to the contracting
//! class at arity `n` exactly when an exhaustive scan finds this maximum
//! below one.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, compositions, next_combination, unrank_combination};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::scalar::Scalar;

/// Tuple count above which [`contraction_coefficient`] falls back to sampling.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Sum of `d(x_i, x_j)` over all `i < j`. Repeated indices are allowed.
pub fn total_pairwise_distance<S: Scalar>(space: &FiniteMetricSpace<S>, points: &[usize]) -> Result<S> {
    if points.len() < 2 {
        return Err(Error::Domain(format!(
            "total pairwise distance needs at least 2 points, got {}",
            points.len()
        )));
    }
    for &p in points {
        space.check_index(p)?;
    }
    Ok(tpd_unchecked(space, points.iter().copied()))
}

pub(crate) fn tpd_unchecked<S: Scalar>(space: &FiniteMetricSpace<S>, points: impl IntoIterator<Item = usize>) -> S {
    let pts: Vec<usize> = points.into_iter().collect();
    let mut sum = S::zero();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            sum = sum + space.d(a, b).clone();
        }
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    /// `alpha_hat` is only a lower bound on the true coefficient.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport<S> {
    pub arity: usize,
    pub alpha_hat: S,
    /// Lexicographically smallest tuple attaining `alpha_hat` (point indices,
    /// ascending).
    pub witness: Vec<usize>,
    pub tuples_examined: u64,
    pub mode: Mode,
}

impl<S: Scalar> ContractionReport<S> {
    /// Membership in the contracting class; never true for sampled reports.
    pub fn certified(&self) -> bool {
        self.mode == Mode::Exhaustive && self.alpha_hat < S::one()
    }
}

/// Options for [`contraction_coefficient`].
#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Restricts the quantifier to tuples drawn from these points.
    pub domain: Option<Vec<usize>>,
    pub budget: u64,
    /// Number of contiguous rank ranges scanned in parallel. Defaults to the
    /// size of the current rayon pool. Does not affect the result.
    pub partitions: Option<usize>,
    pub sample_seed: u64,
}

impl Default for Enumeration {
    fn default() -> Self {
        Self {
            domain: None,
            budget: DEFAULT_BUDGET,
            partitions: None,
            sample_seed: 0,
        }
    }
}

impl Enumeration {
    pub fn within(mut self, domain: &[usize]) -> Self {
        self.domain = Some(domain.to_vec());
        self
    }

    pub fn partitions(mut self, partitions: usize) -> Self {
        self.partitions = Some(partitions);
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Never samples.
    pub fn exhaustive() -> Self {
        Self::default().budget(u64::MAX)
    }
}

/// Sorted, deduplicated, bounds-checked set of points.
fn resolve_domain<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    domain: Option<&[usize]>,
    arity: usize,
) -> Result<Vec<usize>> {
    let mut points: Vec<usize> = match domain {
        Some(d) => d.to_vec(),
        None => (0..space.len()).collect(),
    };
    points.sort_unstable();
    points.dedup();
    for &p in &points {
        space.check_index(p)?;
    }
    if arity < 2 {
        return Err(Error::Domain(format!("arity must be at least 2, got {arity}")));
    }
    if points.len() < arity {
        return Err(Error::Domain(format!(
            "domain has {} points, fewer than arity {arity}",
            points.len()
        )));
    }
    Ok(points)
}

fn check_map<S: Scalar>(space: &FiniteMetricSpace<S>, map: &SelfMap) -> Result<()> {
    if map.len() != space.len() {
        return Err(Error::MapLength {
            map_len: map.len(),
            points: space.len(),
        });
    }
    Ok(())
}

/// `a_num / a_den` against `b_num / b_den` for positive denominators.
fn cmp_ratio<S: Scalar>(a_num: &S, a_den: &S, b_num: &S, b_den: &S) -> Ordering {
    let lhs = a_num.clone() * b_den.clone();
    let rhs = b_num.clone() * a_den.clone();
    lhs.partial_cmp(&rhs).unwrap_or(Ordering::Equal)
}

/// Walks strictly increasing tuples of `points` in lexicographic order,
/// keeping prefix sums of `S` for the tuple and its image so each step only
/// pays for the positions that changed.
struct Scan<'a, S> {
    space: &'a FiniteMetricSpace<S>,
    map: &'a SelfMap,
    points: &'a [usize],
    comb: Vec<usize>,
    tuple: Vec<usize>,
    image: Vec<usize>,
    // prefix[t] = S of the first t entries
    prefix: Vec<S>,
    prefix_image: Vec<S>,
}

impl<'a, S: Scalar> Scan<'a, S> {
    fn at_rank(
        space: &'a FiniteMetricSpace<S>,
        map: &'a SelfMap,
        points: &'a [usize],
        arity: usize,
        rank: u128,
    ) -> Self {
        let comb = unrank_combination(points.len(), arity, rank);
        let mut scan = Self {
            space,
            map,
            points,
            comb,
            tuple: vec![0; arity],
            image: vec![0; arity],
            prefix: vec![S::zero(); arity + 1],
            prefix_image: vec![S::zero(); arity + 1],
        };
        scan.refresh(0);
        scan
    }

    fn refresh(&mut self, from: usize) {
        for t in from..self.comb.len() {
            let x = self.points[self.comb[t]];
            let tx = self.map.apply(x);
            self.tuple[t] = x;
            self.image[t] = tx;
            let mut add = self.prefix[t].clone();
            let mut add_image = self.prefix_image[t].clone();
            for u in 0..t {
                add = add + self.space.d(self.tuple[u], x).clone();
                add_image = add_image + self.space.d(self.image[u], tx).clone();
            }
            self.prefix[t + 1] = add;
            self.prefix_image[t + 1] = add_image;
        }
    }

    fn advance(&mut self) -> bool {
        match next_combination(&mut self.comb, self.points.len()) {
            Some(pos) => {
                self.refresh(pos);
                true
            }
            None => false,
        }
    }

    fn sum(&self) -> &S {
        &self.prefix[self.comb.len()]
    }

    fn image_sum(&self) -> &S {
        &self.prefix_image[self.comb.len()]
    }
}

#[derive(Debug, Clone)]
struct Best<S> {
    num: S,
    den: S,
    witness: Vec<usize>,
}

impl<S: Scalar> Best<S> {
    /// Keeps `self` on ties, so folding left-to-right over lexicographically
    /// ordered ranges yields the first maximizer.
    fn merge(self, other: Best<S>) -> Best<S> {
        match cmp_ratio(&other.num, &other.den, &self.num, &self.den) {
            Ordering::Greater => other,
            Ordering::Equal if other.witness < self.witness => other,
            _ => self,
        }
    }
}

fn scan_range<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    points: &[usize],
    arity: usize,
    start: u128,
    count: u128,
) -> Best<S> {
    let mut scan = Scan::at_rank(space, map, points, arity, start);
    let mut best = Best {
        num: scan.image_sum().clone(),
        den: scan.sum().clone(),
        witness: scan.tuple.clone(),
    };
    for _ in 1..count {
        let more = scan.advance();
        debug_assert!(more, "range runs past the last combination");
        if cmp_ratio(scan.image_sum(), scan.sum(), &best.num, &best.den) == Ordering::Greater {
            best = Best {
                num: scan.image_sum().clone(),
                den: scan.sum().clone(),
                witness: scan.tuple.clone(),
            };
        }
    }
    best
}

fn split_ranges(total: u128, parts: u128) -> Vec<(u128, u128)> {
    let parts = parts.clamp(1, total.max(1));
    let base = total / parts;
    let extra = total % parts;
    let mut start = 0;
    (0..parts)
        .map(|p| {
            let len = base + u128::from(p < extra);
            let range = (start, len);
            start += len;
            range
        })
        .filter(|&(_, len)| len > 0)
        .collect()
}

/// Exact (or, above the budget, sampled) contraction coefficient at `arity`.
pub fn contraction_coefficient<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    arity: usize,
    options: &Enumeration,
) -> Result<ContractionReport<S>> {
    check_map(space, map)?;
    let points = resolve_domain(space, options.domain.as_deref(), arity)?;
    let total = binomial(points.len(), arity);

    if total > u128::from(options.budget) {
        return Ok(sampled_coefficient(space, map, &points, arity, options));
    }

    let parts = options
        .partitions
        .unwrap_or_else(rayon::current_num_threads)
        .max(1) as u128;
    let ranges = split_ranges(total, parts);
    let bests: Vec<Best<S>> = ranges
        .into_par_iter()
        .map(|(start, count)| scan_range(space, map, &points, arity, start, count))
        .collect();
    let best = bests
        .into_iter()
        .reduce(Best::merge)
        .expect("at least one tuple");

    Ok(ContractionReport {
        arity,
        alpha_hat: best.num / best.den,
        witness: best.witness,
        tuples_examined: total as u64,
        mode: Mode::Exhaustive,
    })
}

fn sampled_coefficient<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    points: &[usize],
    arity: usize,
    options: &Enumeration,
) -> ContractionReport<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.sample_seed);
    let mut best: Option<Best<S>> = None;
    for _ in 0..options.budget.max(1) {
        let mut picks = rand::seq::index::sample(&mut rng, points.len(), arity).into_vec();
        picks.sort_unstable();
        let tuple: Vec<usize> = picks.iter().map(|&p| points[p]).collect();
        let den = tpd_unchecked(space, tuple.iter().copied());
        let num = tpd_unchecked(space, tuple.iter().map(|&x| map.apply(x)));
        let candidate = Best {
            num,
            den,
            witness: tuple,
        };
        best = Some(match best {
            Some(b) => b.merge(candidate),
            None => candidate,
        });
    }
    let best = best.expect("budget >= 1");
    ContractionReport {
        arity,
        alpha_hat: best.num / best.den,
        witness: best.witness,
        tuples_examined: options.budget.max(1),
        mode: Mode::Sampled,
    }
}

/// Sequential lexicographic scan that stops as soon as `stop` returns true.
/// Returns the tuple it stopped at and the number of tuples visited.
fn scan_until<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    points: &[usize],
    arity: usize,
    mut stop: impl FnMut(&S, &S) -> bool,
) -> (Option<Vec<usize>>, u64) {
    let mut scan = Scan::at_rank(space, map, points, arity, 0);
    let mut visited = 0u64;
    loop {
        visited += 1;
        if stop(scan.image_sum(), scan.sum()) {
            return (Some(scan.tuple.clone()), visited);
        }
        if !scan.advance() {
            return (None, visited);
        }
    }
}

/// First tuple (lexicographically) whose ratio is at least `threshold`,
/// i.e. a proof that `alpha_hat >= threshold`.
pub fn find_ratio_at_least<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    arity: usize,
    domain: Option<&[usize]>,
    threshold: &S,
) -> Result<Option<Vec<usize>>> {
    check_map(space, map)?;
    let points = resolve_domain(space, domain, arity)?;
    let (hit, _) = scan_until(space, map, &points, arity, |img, s| {
        *img >= threshold.clone() * s.clone()
    });
    Ok(hit)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub holds: bool,
    /// First tuple with `S(T·) > alpha · S(·)`, when the inequality fails.
    pub counterexample: Option<Vec<usize>>,
    pub tuples_examined: u64,
}

/// Checks `S(Tx_1..Tx_n) <= alpha · S(x_1..x_n)` on every distinct tuple.
pub fn certify<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    arity: usize,
    alpha: &S,
    domain: Option<&[usize]>,
) -> Result<Certificate> {
    if *alpha < S::zero() || *alpha >= S::one() {
        return Err(Error::Domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    check_map(space, map)?;
    let points = resolve_domain(space, domain, arity)?;
    let (counterexample, tuples_examined) = scan_until(space, map, &points, arity, |img, s| {
        *img > alpha.clone() * s.clone()
    });
    Ok(Certificate {
        holds: counterexample.is_none(),
        counterexample,
        tuples_examined,
    })
}

/// Largest ratio over `n`-point multisets with exactly `k` distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct MultisetReport<S> {
    pub coefficient: S,
    pub support: Vec<usize>,
    pub multiplicities: Vec<usize>,
}

impl<S> MultisetReport<S> {
    /// The maximizing multiset written out as a tuple.
    pub fn tuple(&self) -> Vec<usize> {
        self.support
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&p, &m)| std::iter::repeat_n(p, m))
            .collect()
    }
}

/// Maximum of `S(T·)/S(·)` over `n`-tuples whose support has exactly `k`
/// points. Since `S` ignores order, a tuple is a support set plus a
/// multiplicity vector, and only those are enumerated.
pub fn multiset_coefficient<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    n: usize,
    k: usize,
) -> Result<MultisetReport<S>> {
    check_map(space, map)?;
    if k < 2 || k + 1 > n {
        return Err(Error::Domain(format!(
            "multiset support k must satisfy 2 <= k <= n-1, got n={n}, k={k}"
        )));
    }
    if space.len() < k {
        return Err(Error::Domain(format!(
            "space has {} points, fewer than k = {k}",
            space.len()
        )));
    }
    let patterns = compositions(n, k);
    let weights: Vec<Vec<S>> = patterns
        .iter()
        .map(|p| p.iter().map(|&m| S::from_usize(m).expect("small integer")).collect())
        .collect();

    let mut best: Option<(S, S, Vec<usize>, usize)> = None;
    let mut support: Vec<usize> = (0..k).collect();
    loop {
        let image: Vec<usize> = support.iter().map(|&x| map.apply(x)).collect();
        for (pi, w) in weights.iter().enumerate() {
            let mut den = S::zero();
            let mut num = S::zero();
            for a in 0..k {
                for b in a + 1..k {
                    let wab = w[a].clone() * w[b].clone();
                    den = den + wab.clone() * space.d(support[a], support[b]).clone();
                    num = num + wab * space.d(image[a], image[b]).clone();
                }
            }
            let better = match &best {
                None => true,
                Some((bn, bd, _, _)) => cmp_ratio(&num, &den, bn, bd) == Ordering::Greater,
            };
            if better {
                best = Some((num, den, support.clone(), pi));
            }
        }
        if next_combination(&mut support, space.len()).is_none() {
            break;
        }
    }
    let (num, den, support, pi) = best.expect("at least one support set");
    Ok(MultisetReport {
        coefficient: num / den,
        support,
        multiplicities: patterns[pi].clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzViolation<S> {
    pub y: usize,
    pub image_distance: S,
    pub bound: S,
}

/// Every `y` with `d(Tx, Ty) > alpha · d(x, y)`.
pub fn pointwise_lipschitz_check<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    x: usize,
    alpha: &S,
) -> Result<Vec<LipschitzViolation<S>>> {
    check_map(space, map)?;
    space.check_index(x)?;
    if *alpha < S::zero() {
        return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
    }
    let tx = map.apply(x);
    Ok((0..space.len())
        .filter(|&y| y != x)
        .filter_map(|y| {
            let image_distance = space.d(tx, map.apply(y)).clone();
            let bound = alpha.clone() * space.d(x, y).clone();
            (image_distance > bound).then_some(LipschitzViolation {
                y,
                image_distance,
                bound,
            })
        })
        .collect())
}
