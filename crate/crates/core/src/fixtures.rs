//! Exact constructions of three example spaces, truncated to finite size.
//!
//! - The ladder: columns of `n - 1` mutually equidistant points marching
//!   toward an accumulation point `x*`, with cross-column distances halving
//!   at every step. Its shift map contracts `n`-point sums but not
//!   `(n-1)`-point sums.
//! - The two-cycle line `{0, 1} ∪ [3, grid_max]` sampled on a grid, with
//!   `0 <-> 1` and the grid sent to `1`.
//! - A random space whose map lands in a proper subset.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::metric::{default_labels, from_u64, random_space, validate_metric, FiniteMetricSpace, SelfMap};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LadderParams<S> {
    /// Arity at which the shift contracts; columns hold `n - 1` points.
    pub n: usize,
    pub eps: S,
    pub a: S,
    /// Number of materialized columns.
    pub depth: usize,
}

impl<S: Scalar> LadderParams<S> {
    pub fn new(n: usize, eps: S, a: S, depth: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("ladder needs n >= 3, got {n}")));
        }
        if depth < 2 {
            return Err(Error::Domain(format!("ladder needs depth >= 2, got {depth}")));
        }
        if !(eps > S::zero()) || !(a > S::zero()) {
            return Err(Error::Domain("ladder needs eps > 0 and a > 0".into()));
        }
        Ok(Self { n, eps, a, depth })
    }

    /// Side length inside column `i` (1-based).
    pub fn within_column(&self, i: usize) -> S {
        let shift = if i % 2 == 1 { i - 1 } else { i - 2 };
        self.eps.halve_n(shift as u32)
    }

    /// Distance between any point of column `i` and any point of column `i + 1`.
    pub fn adjacent_columns(&self, i: usize) -> S {
        self.a.halve_n((i - 1) as u32)
    }

    /// `d(x_i^l, x_j^m)` for `i < j`: the chain of adjacent-column distances.
    pub fn across_columns(&self, i: usize, j: usize) -> S {
        (i..j).fold(S::zero(), |acc, k| acc + self.adjacent_columns(k))
    }

    /// Largest `s(eps) / s(a)` over tuples whose lowest column is odd:
    /// `C(n-1, 2) eps / (a (n-1))`.
    pub fn odd_split_ratio(&self) -> S {
        let pairs = S::from_u128(binomial(self.n - 1, 2)).expect("small integer");
        let side = from_u64::<S>((self.n - 1) as u64);
        pairs * self.eps.clone() / (self.a.clone() * side)
    }

    /// Same for an even lowest column: twice the odd value.
    pub fn even_split_ratio(&self) -> S {
        self.odd_split_ratio() * from_u64::<S>(2)
    }
}

/// Materialized ladder with its shift map.
///
/// Index 0 is `x*`; `x_i^l` sits at `1 + (i - 1)(n - 1) + (l - 1)`. The
/// deepest column has no materialized successor, so the map sends it to `x*`
/// and it is left out of `analysis_domain`.
#[derive(Debug, Clone)]
pub struct Ladder<S> {
    pub params: LadderParams<S>,
    pub space: FiniteMetricSpace<S>,
    pub map: SelfMap,
    pub analysis_domain: Vec<usize>,
}

impl<S: Scalar> Ladder<S> {
    pub const ACCUMULATION: usize = 0;

    pub fn column_size(&self) -> usize {
        self.params.n - 1
    }

    /// Index of `x_column^level` (both 1-based).
    pub fn point(&self, column: usize, level: usize) -> usize {
        1 + (column - 1) * self.column_size() + (level - 1)
    }

    /// Column of a point, `None` for `x*`.
    pub fn column_of(&self, index: usize) -> Option<usize> {
        (index != Self::ACCUMULATION).then(|| (index - 1) / self.column_size() + 1)
    }

    pub fn column(&self, column: usize) -> Vec<usize> {
        (1..=self.column_size()).map(|l| self.point(column, l)).collect()
    }

    /// Splits `S(tuple)` into the part made of same-column distances and the
    /// part made of cross-column distances. Pairs involving `x*` count as
    /// cross-column.
    pub fn split_sum(&self, tuple: &[usize]) -> (S, S) {
        let mut same = S::zero();
        let mut cross = S::zero();
        for (k, &x) in tuple.iter().enumerate() {
            for &y in &tuple[k + 1..] {
                let d = self.space.d(x, y).clone();
                match (self.column_of(x), self.column_of(y)) {
                    (Some(i), Some(j)) if i == j => same = same + d,
                    _ => cross = cross + d,
                }
            }
        }
        (same, cross)
    }
}

pub fn build_ladder_space<S: Scalar>(params: LadderParams<S>) -> Result<Ladder<S>> {
    let LadderParams { n, depth, .. } = params;
    let per = n - 1;
    let total = 1 + depth * per;
    let locate = |idx: usize| -> Option<(usize, usize)> {
        (idx != 0).then(|| ((idx - 1) / per + 1, (idx - 1) % per + 1))
    };

    let mut labels = vec!["x*".to_string()];
    for i in 1..=depth {
        for l in 1..=per {
            labels.push(format!("x_{i}^{l}"));
        }
    }

    let between = |p: (usize, usize), q: (usize, usize)| -> S {
        let ((i, l), (j, m)) = if p.0 <= q.0 { (p, q) } else { (q, p) };
        if i == j {
            if l == m {
                S::zero()
            } else {
                params.within_column(i)
            }
        } else {
            params.across_columns(i, j)
        }
    };
    let two_a = params.a.clone() + params.a.clone();
    let to_star = |p: (usize, usize)| two_a.clone() - between((1, 1), p);

    let mut dist = vec![vec![S::zero(); total]; total];
    for x in 0..total {
        for y in 0..total {
            if x == y {
                continue;
            }
            dist[x][y] = match (locate(x), locate(y)) {
                (Some(p), Some(q)) => between(p, q),
                (Some(p), None) | (None, Some(p)) => to_star(p),
                (None, None) => unreachable!(),
            };
        }
    }

    // Cross-column distances do not depend on the representatives chosen.
    debug_assert!((1..depth).all(|i| {
        let first = &dist[1 + (i - 1) * per][1 + i * per];
        (1..=per).all(|l| (1..=per).all(|m| &dist[(i - 1) * per + l][i * per + m] == first))
    }));

    let report = validate_metric(&dist)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidMetric(format!(
            "ladder with n={n}, eps={}, a={}, depth={depth}: {}",
            params.eps,
            params.a,
            v.describe(&labels)
        )));
    }
    let space = FiniteMetricSpace::new(labels, dist)?;

    let image = (0..total)
        .map(|idx| match locate(idx) {
            Some((i, _)) if i < depth => idx + per,
            _ => 0,
        })
        .collect();
    let map = SelfMap::new(image)?;
    let analysis_domain = (0..1 + (depth - 1) * per).collect();

    Ok(Ladder {
        params,
        space,
        map,
        analysis_domain,
    })
}

/// Points `0, 1, 3, 3 + step, ...` up to `grid_max` on the line, with
/// `0 -> 1`, `1 -> 0` and every grid point sent to `1`.
pub fn build_two_cycle_space<S: Scalar>(grid_max: S, grid_step: S) -> Result<(FiniteMetricSpace<S>, SelfMap)> {
    let three = from_u64::<S>(3);
    if !(grid_step > S::zero()) {
        return Err(Error::Domain(format!("grid step must be positive, got {grid_step}")));
    }
    if grid_max < three {
        return Err(Error::Domain(format!(
            "grid is empty: grid_max {grid_max} is below 3"
        )));
    }
    let mut values = vec![S::zero(), S::one()];
    let mut v = three;
    while v <= grid_max {
        values.push(v.clone());
        v = v + grid_step.clone();
    }
    let dist = values
        .iter()
        .map(|x| {
            values
                .iter()
                .map(|y| if x > y { x.clone() - y.clone() } else { y.clone() - x.clone() })
                .collect()
        })
        .collect();
    let labels = values.iter().map(|v| v.to_string()).collect();
    let space = FiniteMetricSpace::new(labels, dist)?;
    let image = (0..values.len()).map(|i| usize::from(i != 1)).collect();
    Ok((space, SelfMap::new(image)?))
}

/// Random space whose map takes values in a fixed subset `subset`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetMap<S> {
    pub space: FiniteMetricSpace<S>,
    pub map: SelfMap,
    pub subset: Vec<usize>,
}

pub const SUBSET_SCALE: u64 = 10;

pub fn build_subset_map_space<S: Scalar>(seed: u64, n_points: usize, subset_size: usize) -> Result<SubsetMap<S>> {
    if n_points < 2 || subset_size < 1 || subset_size >= n_points {
        return Err(Error::Domain(format!(
            "need 1 <= subset_size <= n_points - 1 with n_points >= 2, got n_points={n_points}, subset_size={subset_size}"
        )));
    }
    let (space, _) = random_space::<S>(seed, n_points, SUBSET_SCALE)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed_5eed_5eed);
    let mut subset = sample(&mut rng, n_points, subset_size).into_vec();
    subset.sort_unstable();
    let image = (0..n_points)
        .map(|_| subset[rng.random_range(0..subset_size)])
        .collect();
    debug_assert_eq!(space.labels(), default_labels(n_points).as_slice());
    Ok(SubsetMap {
        space,
        map: SelfMap::new(image)?,
        subset,
    })
}
