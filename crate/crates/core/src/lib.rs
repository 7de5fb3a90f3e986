//! Certification of self-maps that contract total pairwise distance on
//! finite metric spaces.
//!
//! A self-map `T` of a metric space contracts total pairwise distance on `n`
//! points when there is `alpha < 1` with
//! `S(Tx_1, ..., Tx_n) <= alpha * S(x_1, ..., x_n)` for every `n` pairwise
//! distinct points, `S` being the sum of all pairwise distances. On a finite
//! space the least such `alpha` is a maximum over finitely many tuples, so
//! membership can be decided exactly; this crate does that with exact
//! rational arithmetic and checks what membership implies for periodic
//! points.
//!
//! Everything numeric is generic over [`Scalar`]; [`Space`] and
//! [`SpaceF64`] fix the two instantiations used in practice.

pub mod combinatorics;
pub mod contraction;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod io;
pub mod metric;
pub mod scalar;

pub use contraction::{
    certify, contraction_coefficient, find_ratio_at_least, multiset_coefficient,
    pointwise_lipschitz_check, total_pairwise_distance, Certificate, ContractionReport,
    Enumeration, LipschitzViolation, Mode, MultisetReport,
};
pub use dynamics::{
    iterate_orbit, iterate_orbit_within, periodic_points, picard_fixed_point, tail_bound_check,
    verify_theorem, OrbitTrace, PeriodicPoint, TheoremCheck,
};
pub use error::{Error, Result};
pub use fixtures::{build_ladder_space, build_subset_map_space, build_two_cycle_space, Ladder, LadderParams, SubsetMap};
pub use metric::{metric_closure, random_space, validate_metric, Axiom, FiniteMetricSpace, SelfMap, ValidationReport, Violation};
pub use scalar::{format_rational, parse_rational, Rational, Scalar};

/// Exact space, used on every certification path.
pub type Space = FiniteMetricSpace<Rational>;
/// Float view of a space, for numeric spot checks only.
pub type SpaceF64 = FiniteMetricSpace<f64>;
pub type ExactReport = ContractionReport<Rational>;
pub type ExactLadder = Ladder<Rational>;
