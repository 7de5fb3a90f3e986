//! Seeded fuzz corpus and the per-instance property checks run over it.

use rayon::prelude::*;
use serde::Serialize;

use crate::contraction::{contraction_coefficient, multiset_coefficient, Enumeration};
use crate::dynamics::{
    iterate_orbit, periodic_points, picard_fixed_point, tail_bound_check, PeriodicPoint,
};
use crate::error::Result;
use crate::metric::{random_space, FiniteMetricSpace, SelfMap};
use crate::scalar::{format_rational, Rational};

pub const CORPUS_SCALE: u64 = 10;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed derived from the master seed.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial))
}

/// Corpus instance `trial`: between 2 and `max_points` points.
pub fn corpus_instance(master: u64, trial: u64, max_points: usize) -> Result<(FiniteMetricSpace<Rational>, SelfMap)> {
    let seed = trial_seed(master, trial);
    let span = max_points.saturating_sub(1).max(1) as u64;
    let n_points = 2 + (splitmix64(seed) % span) as usize;
    random_space(seed, n_points.min(max_points.max(2)), CORPUS_SCALE)
}

/// `x` is periodic iff `T^k(x) = x` for some `1 <= k <= N`; the least such
/// `k` is its prime period.
pub fn brute_force_periodic_points(map: &SelfMap) -> Vec<PeriodicPoint> {
    let n = map.len();
    (0..n)
        .filter_map(|x| {
            (1..=n)
                .find(|&k| map.iterate(x, k) == x)
                .map(|k| PeriodicPoint {
                    index: x,
                    prime_period: k,
                })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArityRecord {
    pub arity: usize,
    pub alpha_hat: String,
    pub witness: Vec<usize>,
    pub certified: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Violations {
    pub theorem: usize,
    pub monotonicity: usize,
    pub multiset: usize,
    pub banach: usize,
    pub tail_bound: usize,
    pub periodic_oracle: usize,
}

impl Violations {
    pub fn total(&self) -> usize {
        self.theorem + self.monotonicity + self.multiset + self.banach + self.tail_bound + self.periodic_oracle
    }

    fn add(&mut self, other: &Violations) {
        self.theorem += other.theorem;
        self.monotonicity += other.monotonicity;
        self.multiset += other.multiset;
        self.banach += other.banach;
        self.tail_bound += other.tail_bound;
        self.periodic_oracle += other.periodic_oracle;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub points: usize,
    pub map: Vec<usize>,
    pub coefficients: Vec<ArityRecord>,
    pub periodic_points: Vec<PeriodicPoint>,
    pub multiset_checks: usize,
    pub violations: Violations,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub master_seed: u64,
    pub trials: u64,
    pub max_points: usize,
    pub certified_instances: usize,
    pub violations: Violations,
    pub records: Vec<TrialRecord>,
}

/// Largest arity whose coefficient is computed; also the largest `n` in
/// the multiset check.
pub const MAX_ARITY: usize = 5;
/// Largest arity at which the periodic-point theorem is checked.
pub const MAX_THEOREM_ARITY: usize = 4;
/// Largest space on which the multiset check runs.
pub const MULTISET_MAX_POINTS: usize = 6;

pub fn check_instance(trial: u64, seed: u64, space: &FiniteMetricSpace<Rational>, map: &SelfMap) -> Result<TrialRecord> {
    let n_points = space.len();
    let one = Rational::from_integer(1.into());
    let mut violations = Violations::default();

    let periodic = periodic_points(map);
    if periodic != brute_force_periodic_points(map) {
        violations.periodic_oracle += 1;
    }

    let mut alphas: Vec<Option<Rational>> = vec![None; MAX_ARITY + 1];
    let mut coefficients = Vec::new();
    for arity in 2..=n_points.min(MAX_ARITY) {
        let report = contraction_coefficient(space, map, arity, &Enumeration::exhaustive())?;
        let certified = report.certified();
        if certified && arity <= MAX_THEOREM_ARITY {
            let periods_ok = periodic.iter().all(|p| p.prime_period < arity);
            if !(periods_ok && periodic.len() < arity) {
                violations.theorem += 1;
            }
        }
        if certified {
            for start in 0..n_points {
                let trace = iterate_orbit(space, map, start, arity, n_points)?;
                if !tail_bound_check(&trace, space, &report.alpha_hat)? {
                    violations.tail_bound += 1;
                }
            }
        }
        coefficients.push(ArityRecord {
            arity,
            alpha_hat: format_rational(&report.alpha_hat),
            witness: report.witness.clone(),
            certified,
        });
        alphas[arity] = Some(report.alpha_hat);
    }

    for n in 3..=n_points.min(MAX_ARITY) {
        if alphas[n] > alphas[n - 1] {
            violations.monotonicity += 1;
        }
    }

    let mut multiset_checks = 0;
    if n_points <= MULTISET_MAX_POINTS {
        for n in 3..=MAX_ARITY {
            for k in 2..n {
                if k > n_points {
                    continue;
                }
                let multi = multiset_coefficient(space, map, n, k)?;
                multiset_checks += 1;
                if let Some(alpha_k) = &alphas[k] {
                    if &multi.coefficient < alpha_k {
                        violations.multiset += 1;
                    }
                }
            }
        }
    }

    if let Some(alpha2) = &alphas[2] {
        if alpha2 < &one {
            let unique = periodic.len() == 1 && periodic[0].prime_period == 1;
            let all_reach = unique
                && (0..n_points).all(|s| picard_fixed_point(map, s).map(|(p, _)| p) == Some(periodic[0].index));
            if !all_reach {
                violations.banach += 1;
            }
        }
    }

    Ok(TrialRecord {
        trial,
        seed,
        points: n_points,
        map: map.image().to_vec(),
        coefficients,
        periodic_points: periodic,
        multiset_checks,
        violations,
    })
}

/// Runs [`check_instance`] on `trials` corpus instances. Trials run in
/// parallel on the current rayon pool; records come back in trial order.
pub fn run_fuzz(master_seed: u64, trials: u64, max_points: usize) -> Result<FuzzSummary> {
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (space, map) = corpus_instance(master_seed, trial, max_points)?;
            check_instance(trial, trial_seed(master_seed, trial), &space, &map)
        })
        .collect::<Result<_>>()?;
    let mut violations = Violations::default();
    for r in &records {
        violations.add(&r.violations);
    }
    let certified_instances = records
        .iter()
        .filter(|r| r.coefficients.iter().any(|c| c.certified))
        .count();
    Ok(FuzzSummary {
        master_seed,
        trials,
        max_points,
        certified_instances,
        violations,
        records,
    })
}
