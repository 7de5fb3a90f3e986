mod common;

use common::*;
use tpd_core::fixtures::SUBSET_SCALE;
use tpd_core::io::{RawSpace, SpaceDocument};
use tpd_core::scalar::{integer, rational};
use tpd_core::*;

fn ladder() -> ExactLadder {
    build_ladder_space(LadderParams::new(4, rational(1, 100), integer(10), 6).unwrap()).unwrap()
}

fn on_domain(l: &ExactLadder, arity: usize) -> ExactReport {
    let e = Enumeration::exhaustive().within(&l.analysis_domain);
    contraction_coefficient(&l.space, &l.map, arity, &e).unwrap()
}

fn labels(space: &Space, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| space.label(i).to_string()).collect()
}

#[test]
fn ladder_is_a_metric_space() {
    let l = ladder();
    assert!(validate_metric(l.space.matrix()).unwrap().valid());
    let row0: Vec<String> = l.space.matrix()[0].iter().map(format_rational).collect();
    assert_eq!(&row0[..4], ["0", "20", "1999/100", "1999/100"]);
    assert_eq!(row0[4..7], ["10"; 3]);
    assert_eq!(row0[16..], ["5/8"; 3]);
}

#[test]
fn ladder_fails_below_the_contracting_arity() {
    let l = ladder();
    for arity in [2, 3] {
        let r = on_domain(&l, arity);
        assert_eq!(r.alpha_hat, integer(1));
        assert!(!r.certified());
        // the witness sits inside the first (odd) column
        assert!(r.witness.iter().all(|&x| l.column_of(x) == Some(1)), "{:?}", r.witness);
        let image: Vec<usize> = r.witness.iter().map(|&x| l.map.apply(x)).collect();
        assert_eq!(s_naive(&l.space, &image), s_naive(&l.space, &r.witness));
    }
    let r3 = on_domain(&l, 3);
    assert_eq!(labels(&l.space, &r3.witness), ["x_1^1", "x_1^2", "x_1^3"]);
    assert_eq!(r3.tuples_examined, 560);
}

#[test]
fn ladder_contracts_at_its_arity() {
    let l = ladder();
    let r4 = on_domain(&l, 4);
    assert_eq!(r4.alpha_hat, rational(501, 1001));
    assert!(r4.certified());
    assert_eq!(r4.tuples_examined, 1820);
    assert_eq!(labels(&l.space, &r4.witness), ["x_1^1", "x_1^2", "x_1^3", "x_2^1"]);
    assert!(certify(&l.space, &l.map, 4, &rational(3, 4), Some(&l.analysis_domain)).unwrap().holds);
    assert!(!certify(&l.space, &l.map, 4, &rational(1, 2), Some(&l.analysis_domain)).unwrap().holds);

    let r5 = on_domain(&l, 5);
    assert_eq!(r5.alpha_hat, rational(5003, 10001));
    assert!(r5.alpha_hat <= r4.alpha_hat);

    // the brute-force oracle agrees on the domain
    let (ratio, witness) = naive_coefficient(&l.space, &l.map, &l.analysis_domain, 4);
    assert_eq!((ratio, witness), (r4.alpha_hat.clone(), r4.witness.clone()));
}

#[test]
fn ladder_split_ratios() {
    let l = ladder();
    assert_eq!(l.params.odd_split_ratio(), rational(1, 1000));
    assert_eq!(l.params.even_split_ratio(), rational(1, 500));
    let (same, cross) = l.split_sum(&r_witness(&l));
    assert_eq!(same, rational(3, 100));
    assert_eq!(cross, integer(30));
}

fn r_witness(l: &ExactLadder) -> Vec<usize> {
    on_domain(l, 4).witness
}

#[test]
fn ladder_map_halves_cross_column_distances() {
    let l = ladder();
    for i in 1..l.params.depth - 1 {
        for j in i + 1..l.params.depth {
            let (x, y) = (l.point(i, 1), l.point(j, 2));
            let two = integer(2);
            assert_eq!(l.space.d(l.map.apply(x), l.map.apply(y)).clone() * &two, *l.space.d(x, y));
        }
    }
    // odd column to the next even column keeps the same side
    for i in (1..l.params.depth).step_by(2) {
        let col = l.column(i);
        let image: Vec<usize> = col.iter().map(|&x| l.map.apply(x)).collect();
        assert_eq!(s_naive(&l.space, &image), s_naive(&l.space, &col));
    }
}

#[test]
fn pointwise_check_at_the_accumulation_point() {
    let l = ladder();
    let x_star = ExactLadder::ACCUMULATION;
    let y = l.point(2, 1);
    // equality case: d(Tx*, Ty) = d(x*, y) / 2
    assert_eq!(l.space.d(l.map.apply(x_star), l.map.apply(y)).clone() * integer(2), *l.space.d(x_star, y));
    // only the off-spine points of the first column exceed the halving ratio,
    // and only by the eps term: d(x*, x_1^l) = 2a - eps
    let v = pointwise_lipschitz_check(&l.space, &l.map, x_star, &rational(1, 2)).unwrap();
    let ys: Vec<usize> = v.iter().map(|v| v.y).collect();
    assert_eq!(ys, [l.point(1, 2), l.point(1, 3)]);
    assert!(pointwise_lipschitz_check(&l.space, &l.map, x_star, &rational(1000, 1999)).unwrap().is_empty());
    let bad = pointwise_lipschitz_check(&l.space, &l.map, x_star, &rational(1, 4)).unwrap();
    assert!(bad.iter().any(|v| v.y == y));
}

#[test]
fn ladder_orbit_obeys_the_tail_bound() {
    let l = ladder();
    let alpha = on_domain(&l, 4).alpha_hat;
    let trace = iterate_orbit_within(&l.space, &l.map, 1, 4, 20, Some(&l.analysis_domain)).unwrap();
    assert_eq!(trace.visited, [1, 4, 7, 10, 13, 16, 0, 0]);
    let sums: Vec<String> = trace.tuple_sums.iter().map(format_rational).collect();
    assert_eq!(sums, ["115/2", "115/4", "115/8"]);
    assert!(tail_bound_check(&trace, &l.space, &alpha).unwrap());
    let half = alpha / integer(2);
    assert!(!tail_bound_check(&trace, &l.space, &half).unwrap());
}

#[test]
fn float_view_is_continuous_at_the_accumulation_point() {
    let l = ladder();
    let f: SpaceF64 = l.space.map_scalar(|q| q.numer().to_string().parse::<f64>().unwrap() / q.denom().to_string().parse::<f64>().unwrap());
    let x_star = ExactLadder::ACCUMULATION;
    let mut last = f64::INFINITY;
    for i in 1..=l.params.depth {
        let x = l.point(i, 1);
        let d = f.d(x, x_star);
        let image = f.d(l.map.apply(x), l.map.apply(x_star));
        assert!(*d < last);
        assert!(*image <= *d);
        last = *d;
    }
    assert!(last < 1.0);
}

#[test]
fn two_cycle_grid() {
    let (space, map) = build_two_cycle_space(integer(10), integer(1)).unwrap();
    assert_eq!(space.len(), 10);
    let r3 = contraction_coefficient(&space, &map, 3, &Enumeration::exhaustive()).unwrap();
    assert_eq!(r3.alpha_hat, rational(1, 3));
    assert_eq!(labels(&space, &r3.witness), ["0", "1", "3"]);
    let r2 = contraction_coefficient(&space, &map, 2, &Enumeration::exhaustive()).unwrap();
    assert!(!r2.certified());
    let periodic = periodic_points(&map);
    assert_eq!(periodic.iter().map(|p| (p.index, p.prime_period)).collect::<Vec<_>>(), [(0, 2), (1, 2)]);
    assert!(verify_theorem(&space, &map, 3).unwrap().conclusion_holds);

    let (small, small_map) = build_two_cycle_space(integer(4), integer(1)).unwrap();
    assert_eq!(labels(&small, &[0, 1, 2, 3]), ["0", "1", "3", "4"]);
    let r = contraction_coefficient(&small, &small_map, 3, &Enumeration::exhaustive()).unwrap();
    assert_eq!(r.witness, [0, 1, 2]);
}

#[test]
fn subset_map_periodic_points_stay_in_the_subset() {
    for seed in 0..30 {
        for (n, k) in [(4, 1), (5, 2), (6, 3), (8, 4), (6, 5)] {
            let s: SubsetMap<Rational> = build_subset_map_space(seed, n, k).unwrap();
            assert!(s.map.image().iter().all(|x| s.subset.contains(x)));
            for p in periodic_points(&s.map) {
                assert!(s.subset.contains(&p.index));
            }
        }
    }
}

#[test]
fn subset_map_certified_examples() {
    for (n, k) in [(4, 1), (5, 2), (6, 3), (8, 4), (6, 5)] {
        let s: SubsetMap<Rational> = build_subset_map_space(0, n, k).unwrap();
        let r = contraction_coefficient(&s.space, &s.map, n, &Enumeration::exhaustive()).unwrap();
        assert!(r.certified(), "n={n} k={k}: {}", r.alpha_hat);
    }
    // a single image point is always a contraction with one fixed point
    for seed in 0..20 {
        let s: SubsetMap<Rational> = build_subset_map_space(seed, 4, 1).unwrap();
        let r = contraction_coefficient(&s.space, &s.map, 4, &Enumeration::exhaustive()).unwrap();
        assert_eq!(r.alpha_hat, integer(0));
        let periodic = periodic_points(&s.map);
        assert_eq!(periodic.len(), 1);
        assert_eq!(periodic[0].prime_period, 1);
    }
}

#[test]
fn subset_map_need_not_contract() {
    // mapping into a proper subset does not by itself force contraction
    let s: SubsetMap<Rational> = build_subset_map_space(1, 6, 5).unwrap();
    let r = contraction_coefficient(&s.space, &s.map, 6, &Enumeration::exhaustive()).unwrap();
    assert_eq!(r.alpha_hat, rational(61, 54));
    assert!(!r.certified());
    assert_eq!(SUBSET_SCALE, 10);
}

#[test]
fn golden_random_space() {
    let (space, map): (Space, SelfMap) = random_space(7, 4, 10).unwrap();
    let text = include_str!("golden/random_space_seed7.json");
    let (golden, golden_map, _) = RawSpace::parse(text).unwrap().into_space().unwrap();
    assert_eq!(space, golden);
    assert_eq!(Some(map.clone()), golden_map);
    // and the document round-trips
    let doc = SpaceDocument::from_space(&space, Some(&map), None).to_json();
    let (back, back_map, _) = RawSpace::parse(&doc).unwrap().into_space().unwrap();
    assert_eq!((back, back_map), (space, Some(map)));
}
