//! Picard orbits, periodic points and the checks that tie them to the
//! contraction coefficient.

use serde::Serialize;

use crate::contraction::{contraction_coefficient, tpd_unchecked, Enumeration};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::scalar::Scalar;

/// Record of `x_0, x_1 = T x_0, ...` up to the first revisited point.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace<S> {
    pub start: usize,
    pub arity: usize,
    /// `x_0 ..= x_{tail + cycle}`; the last entry repeats `x_tail`.
    pub visited: Vec<usize>,
    pub tail_length: usize,
    pub cycle_length: usize,
    /// `s_i = S(x_i, ..., x_{i+arity-1})` for the leading run of windows whose
    /// points are pairwise distinct.
    pub tuple_sums: Vec<S>,
}

impl<S> OrbitTrace<S> {
    /// `x_i` for any `i`, following the cycle past the recorded prefix.
    pub fn point(&self, i: usize) -> usize {
        if i < self.visited.len() {
            self.visited[i]
        } else {
            self.visited[self.tail_length + (i - self.tail_length) % self.cycle_length]
        }
    }

    pub fn window(&self, i: usize) -> Vec<usize> {
        (i..i + self.arity).map(|j| self.point(j)).collect()
    }
}

/// First-revisit bookkeeping on the functional graph of `map`.
fn orbit_shape(map: &SelfMap, start: usize) -> (Vec<usize>, usize, usize) {
    let mut first_seen: Vec<Option<usize>> = vec![None; map.len()];
    let mut visited = Vec::new();
    let mut x = start;
    loop {
        if let Some(i) = first_seen[x] {
            let step = visited.len();
            visited.push(x);
            return (visited, i, step - i);
        }
        first_seen[x] = Some(visited.len());
        visited.push(x);
        x = map.apply(x);
    }
}

fn pairwise_distinct(points: &[usize]) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, p)| !points[i + 1..].contains(p))
}

pub fn iterate_orbit<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    start: usize,
    arity: usize,
    max_steps: usize,
) -> Result<OrbitTrace<S>> {
    iterate_orbit_within(space, map, start, arity, max_steps, None)
}

/// Like [`iterate_orbit`], but when `domain` is given a window `s_{i+1}` is
/// only recorded if the previous window lies inside `domain`. On a truncated
/// space this keeps every recorded window equal to the image of its
/// predecessor under the untruncated map.
pub fn iterate_orbit_within<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    start: usize,
    arity: usize,
    max_steps: usize,
    domain: Option<&[usize]>,
) -> Result<OrbitTrace<S>> {
    space.check_index(start)?;
    if map.len() != space.len() {
        return Err(Error::MapLength {
            map_len: map.len(),
            points: space.len(),
        });
    }
    if arity < 2 {
        return Err(Error::Domain(format!("arity must be at least 2, got {arity}")));
    }
    if max_steps < 1 {
        return Err(Error::Domain("max_steps must be at least 1".into()));
    }
    let (visited, tail_length, cycle_length) = orbit_shape(map, start);
    if tail_length + cycle_length > max_steps {
        return Err(Error::OrbitNotClosed {
            start,
            steps: max_steps,
        });
    }
    let mut trace = OrbitTrace {
        start,
        arity,
        visited,
        tail_length,
        cycle_length,
        tuple_sums: Vec::new(),
    };

    // Window tail+cycle repeats window tail, so nothing new lies beyond it.
    let mut previous: Option<Vec<usize>> = None;
    for i in 0..=tail_length + cycle_length {
        let window = trace.window(i);
        if !pairwise_distinct(&window) {
            break;
        }
        if let (Some(domain), Some(prev)) = (domain, &previous) {
            if !prev.iter().all(|p| domain.contains(p)) {
                break;
            }
        }
        trace.tuple_sums.push(tpd_unchecked(space, window.iter().copied()));
        previous = Some(window);
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PeriodicPoint {
    pub index: usize,
    pub prime_period: usize,
}

/// Points lying on cycles of the functional graph, ascending by index, each
/// with the length of its cycle. Linear time.
pub fn periodic_points(map: &SelfMap) -> Vec<PeriodicPoint> {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Unvisited,
        OnPath(usize),
        Done,
    }
    let n = map.len();
    let mut state = vec![State::Unvisited; n];
    let mut period = vec![0usize; n];
    let mut path = Vec::new();
    for s in 0..n {
        if state[s] != State::Unvisited {
            continue;
        }
        path.clear();
        let mut x = s;
        while state[x] == State::Unvisited {
            state[x] = State::OnPath(path.len());
            path.push(x);
            x = map.apply(x);
        }
        if let State::OnPath(at) = state[x] {
            let cycle = &path[at..];
            for &c in cycle {
                period[c] = cycle.len();
            }
        }
        for &p in &path {
            state[p] = State::Done;
        }
    }
    (0..n)
        .filter(|&i| period[i] > 0)
        .map(|index| PeriodicPoint {
            index,
            prime_period: period[index],
        })
        .collect()
}

/// Outcome of checking the periodic-point theorem on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck<S> {
    pub arity: usize,
    pub alpha_hat: S,
    pub certified: bool,
    pub periodic_points: Vec<PeriodicPoint>,
    /// Vacuously true when the map is not certified.
    pub conclusion_holds: bool,
}

/// Certifies `map` at `arity` exhaustively; when certified, requires every
/// prime period to lie in `1..arity` and at most `arity - 1` periodic points.
pub fn verify_theorem<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    map: &SelfMap,
    arity: usize,
) -> Result<TheoremCheck<S>> {
    let report = contraction_coefficient(space, map, arity, &Enumeration::exhaustive())?;
    let certified = report.certified();
    let periodic = periodic_points(map);
    let conclusion_holds = !certified
        || (periodic.len() < arity
            && periodic
                .iter()
                .all(|p| (1..arity).contains(&p.prime_period)));
    Ok(TheoremCheck {
        arity,
        alpha_hat: report.alpha_hat,
        certified,
        periodic_points: periodic,
        conclusion_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailBoundFailure {
    /// `d(x_i, x_{i+1}) > s_i`
    Step { i: usize },
    /// `s_i > alpha^i s_0`
    Decay { i: usize },
    /// `d(x_n, x_{n+p}) >= alpha^n s_0 / (1 - alpha)`
    Cauchy { n: usize, p: usize },
}

/// Checks the geometric bounds along an orbit:
///
/// - `d(x_i, x_{i+1}) <= s_i <= alpha^i s_0` for every recorded window, and
/// - `d(x_n, x_{n+p}) < alpha^n s_0 / (1 - alpha)` (strict) whenever every
///   step from `x_n` to `x_{n+p}` is covered by a recorded window that has a
///   recorded successor.
pub fn tail_bound_check<S: Scalar>(
    trace: &OrbitTrace<S>,
    space: &FiniteMetricSpace<S>,
    alpha: &S,
) -> Result<bool> {
    Ok(first_tail_bound_failure(trace, space, alpha)?.is_none())
}

pub fn first_tail_bound_failure<S: Scalar>(
    trace: &OrbitTrace<S>,
    space: &FiniteMetricSpace<S>,
    alpha: &S,
) -> Result<Option<TailBoundFailure>> {
    if *alpha < S::zero() || *alpha >= S::one() {
        return Err(Error::Domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    let sums = &trace.tuple_sums;
    let m = sums.len();
    if m == 0 {
        return Ok(None);
    }
    let s0 = &sums[0];
    let x = |i: usize| trace.point(i);

    let mut powers = Vec::with_capacity(m);
    let mut pw = S::one();
    for _ in 0..m {
        powers.push(pw.clone());
        pw = pw * alpha.clone();
    }

    for i in 0..m {
        if space.d(x(i), x(i + 1)) > &sums[i] {
            return Ok(Some(TailBoundFailure::Step { i }));
        }
        if sums[i] > powers[i].clone() * s0.clone() {
            return Ok(Some(TailBoundFailure::Decay { i }));
        }
    }

    let slack = S::one() - alpha.clone();
    for n in 0..m.saturating_sub(1) {
        let bound = powers[n].clone() * s0.clone() / slack.clone();
        for p in 1..m - n {
            if !(space.d(x(n), x(n + p)) < &bound) {
                return Ok(Some(TailBoundFailure::Cauchy { n, p }));
            }
        }
    }
    Ok(None)
}

/// Fixed point reached from `start` and the number of steps to reach it, or
/// `None` when the orbit ends in a longer cycle.
pub fn picard_fixed_point(map: &SelfMap, start: usize) -> Option<(usize, usize)> {
    if start >= map.len() {
        return None;
    }
    let (visited, tail, cycle) = orbit_shape(map, start);
    (cycle == 1).then(|| (visited[tail], tail))
}
