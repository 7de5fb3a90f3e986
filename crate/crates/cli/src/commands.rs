use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use tpd_core::fixtures::SubsetMap;
use tpd_core::harness::{run_fuzz, trial_seed};
use tpd_core::io::{RawSpace, SpaceDocument};
use tpd_core::{
    build_ladder_space, build_subset_map_space, build_two_cycle_space, certify,
    contraction_coefficient, format_rational, iterate_orbit_within, periodic_points,
    validate_metric, verify_theorem, Enumeration, ExactLadder, ExactReport, LadderParams, Mode,
    PeriodicPoint, Rational, SelfMap, Space,
};

use crate::report::{sha256_hex, Failure, Outcome};
use crate::{BudgetArg, Command, SpaceArg};

type Run = Result<Outcome, Failure>;

/// Violations listed in a `validate` report; the total is always given.
const MAX_LISTED_VIOLATIONS: usize = 64;

fn q(value: &Rational) -> Value {
    Value::String(format_rational(value))
}

fn labels_of(space: &Space, points: &[usize]) -> Vec<String> {
    points.iter().map(|&p| space.label(p).to_string()).collect()
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exhaustive => "exhaustive",
        Mode::Sampled => "sampled",
    }
}

fn coefficient_json(space: &Space, r: &ExactReport) -> Value {
    json!({
        "arity": r.arity,
        "alpha_hat": q(&r.alpha_hat),
        "witness": r.witness,
        "witness_labels": labels_of(space, &r.witness),
        "tuples_examined": r.tuples_examined,
        "mode": mode_name(r.mode),
        "certified": r.certified(),
    })
}

fn periodic_json(space: &Space, points: &[PeriodicPoint]) -> Value {
    points
        .iter()
        .map(|p| json!({"index": p.index, "label": space.label(p.index), "prime_period": p.prime_period}))
        .collect()
}

struct Loaded {
    digest: String,
    space: Space,
    map: Option<SelfMap>,
    domain: Option<Vec<usize>>,
}

impl Loaded {
    fn map(&self) -> Result<&SelfMap, Failure> {
        self.map
            .as_ref()
            .ok_or_else(|| Failure::Input("space file has no \"map\"".into()))
    }

    fn enumeration(&self, budget: u64) -> Enumeration {
        let e = Enumeration::default().budget(budget);
        match &self.domain {
            Some(d) => e.within(d),
            None => e,
        }
    }
}

fn read(path: &Path) -> Result<(Vec<u8>, RawSpace), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Failure::Input(format!("{} is not UTF-8", path.display())))?;
    let raw = RawSpace::parse(text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((bytes, raw))
}

fn load(arg: &SpaceArg) -> Result<Loaded, Failure> {
    let (bytes, raw) = read(&arg.space)?;
    let (space, map, domain) = raw
        .into_space()
        .map_err(|e| Failure::Input(format!("{}: {e}", arg.space.display())))?;
    eprintln!("loaded {} points from {}", space.len(), arg.space.display());
    Ok(Loaded {
        digest: sha256_hex(&bytes),
        space,
        map,
        domain,
    })
}

fn emit(path: &Path, doc: &SpaceDocument) -> Result<(), Failure> {
    fs::write(path, doc.to_json() + "\n")
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

pub fn run(command: &Command) -> Run {
    match command {
        Command::Validate { space } => validate(space),
        Command::Alpha { space, arity, budget } => alpha(space, *arity, budget),
        Command::Certify { space, arity, alpha } => certify_cmd(space, *arity, alpha),
        Command::Orbit {
            space,
            start,
            arity,
            alpha,
        } => orbit(space, *start, *arity, alpha.as_ref()),
        Command::Periodic { space } => periodic(space),
        Command::Theorem { space, arity } => theorem(space, *arity),
        Command::Ladder {
            n,
            eps,
            a,
            depth,
            arity,
            emit,
            budget,
        } => ladder(*n, eps, a, *depth, *arity, emit.as_deref(), budget),
        Command::Twocycle {
            grid_max,
            grid_step,
            arity,
            emit,
        } => twocycle(grid_max, grid_step, *arity, emit.as_deref()),
        Command::Subsetmap {
            seed,
            trials,
            max_points,
            emit,
        } => subsetmap(*seed, *trials, *max_points, emit.as_deref()),
        Command::Fuzz {
            seed,
            trials,
            max_points,
        } => fuzz(*seed, *trials, *max_points),
    }
}

fn validate(arg: &SpaceArg) -> Run {
    let (bytes, raw) = read(&arg.space)?;
    let report = validate_metric(&raw.dist)?;
    let violations: Vec<Value> = report
        .violations
        .iter()
        .take(MAX_LISTED_VIOLATIONS)
        .map(|v| {
            json!({
                "axiom": v.axiom.to_string(),
                "indices": v.indices,
                "values": v.values.iter().map(q).collect::<Vec<_>>(),
                "message": v.describe(&raw.labels),
            })
        })
        .collect();
    for v in &violations {
        eprintln!("violation: {}", v["message"].as_str().unwrap_or_default());
    }
    let map_error = raw.map.as_ref().and_then(|m| {
        let checked = SelfMap::new(m.clone()).and_then(|map| {
            if map.len() == raw.dist.len() {
                Ok(())
            } else {
                Err(tpd_core::Error::MapLength {
                    map_len: map.len(),
                    points: raw.dist.len(),
                })
            }
        });
        checked.err().map(|e| e.to_string())
    });
    let passed = report.valid() && map_error.is_none();
    Ok(Outcome {
        result: json!({
            "valid": report.valid(),
            "points": raw.dist.len(),
            "violation_count": report.violations.len(),
            "violations": violations,
            "map_present": raw.map.is_some(),
            "map_error": map_error,
        }),
        passed,
        input_digest: Some(sha256_hex(&bytes)),
        mode: None,
    })
}

fn alpha(arg: &SpaceArg, arity: usize, budget: &BudgetArg) -> Run {
    let loaded = load(arg)?;
    let r = contraction_coefficient(&loaded.space, loaded.map()?, arity, &loaded.enumeration(budget.budget))?;
    if r.mode == Mode::Sampled {
        eprintln!("tuple count exceeds the budget; alpha_hat is a sampled lower bound and certifies nothing");
    }
    Ok(Outcome {
        result: coefficient_json(&loaded.space, &r),
        passed: true,
        input_digest: Some(loaded.digest),
        mode: Some(mode_name(r.mode)),
    })
}

fn certify_cmd(arg: &SpaceArg, arity: usize, alpha: &Rational) -> Run {
    let loaded = load(arg)?;
    let c = certify(&loaded.space, loaded.map()?, arity, alpha, loaded.domain.as_deref())?;
    let counterexample_labels = c.counterexample.as_ref().map(|t| labels_of(&loaded.space, t));
    Ok(Outcome {
        result: json!({
            "arity": arity,
            "alpha": q(alpha),
            "holds": c.holds,
            "counterexample": c.counterexample,
            "counterexample_labels": counterexample_labels,
            "tuples_examined": c.tuples_examined,
        }),
        passed: c.holds,
        input_digest: Some(loaded.digest),
        mode: Some("exhaustive"),
    })
}

fn orbit(arg: &SpaceArg, start: usize, arity: usize, alpha: Option<&Rational>) -> Run {
    let loaded = load(arg)?;
    let (space, map) = (&loaded.space, loaded.map()?);
    let trace = iterate_orbit_within(space, map, start, arity, space.len(), loaded.domain.as_deref())?;
    let r = contraction_coefficient(space, map, arity, &loaded.enumeration(u64::MAX))?;
    let alpha = match alpha {
        Some(a) => Some(a.clone()),
        None if r.certified() => Some(r.alpha_hat.clone()),
        None => None,
    };
    let tail_bound = match &alpha {
        Some(a) => {
            let failure = tpd_core::dynamics::first_tail_bound_failure(&trace, space, a)?;
            json!({"alpha": q(a), "holds": failure.is_none(), "failure": failure})
        }
        None => Value::Null,
    };
    let passed = tail_bound.is_null() || tail_bound["holds"] == Value::Bool(true);
    Ok(Outcome {
        result: json!({
            "start": start,
            "arity": arity,
            "visited": trace.visited,
            "visited_labels": labels_of(space, &trace.visited),
            "tail_length": trace.tail_length,
            "cycle_length": trace.cycle_length,
            "tuple_sums": trace.tuple_sums.iter().map(q).collect::<Vec<_>>(),
            "alpha_hat": q(&r.alpha_hat),
            "certified": r.certified(),
            "tail_bound": tail_bound,
        }),
        passed,
        input_digest: Some(loaded.digest),
        mode: Some("exhaustive"),
    })
}

fn periodic(arg: &SpaceArg) -> Run {
    let loaded = load(arg)?;
    let points = periodic_points(loaded.map()?);
    let fixed = points.iter().filter(|p| p.prime_period == 1).count();
    let mut periods: Vec<usize> = points.iter().map(|p| p.prime_period).collect();
    periods.sort_unstable();
    periods.dedup();
    Ok(Outcome {
        result: json!({
            "periodic_points": periodic_json(&loaded.space, &points),
            "fixed_points": fixed,
            "prime_periods": periods,
        }),
        passed: true,
        input_digest: Some(loaded.digest),
        mode: None,
    })
}

fn theorem_json(space: &Space, map: &SelfMap, arity: usize) -> Result<(Value, bool), Failure> {
    let t = verify_theorem(space, map, arity)?;
    let value = json!({
        "arity": t.arity,
        "alpha_hat": q(&t.alpha_hat),
        "certified": t.certified,
        "periodic_points": periodic_json(space, &t.periodic_points),
        "conclusion_holds": t.conclusion_holds,
    });
    Ok((value, t.conclusion_holds))
}

fn theorem(arg: &SpaceArg, arity: usize) -> Run {
    let loaded = load(arg)?;
    if loaded.domain.is_some() {
        eprintln!("note: theorem checks the whole space; the file's domain is ignored");
    }
    let (result, passed) = theorem_json(&loaded.space, loaded.map()?, arity)?;
    Ok(Outcome {
        result,
        passed,
        input_digest: Some(loaded.digest),
        mode: Some("exhaustive"),
    })
}

/// Largest `s(eps) / s(a)` over the two witness families whose lowest column
/// is `i`, split by the parity of `i`: the column plus one point of the next
/// column, and one point plus the whole next column.
fn family_maxima(l: &ExactLadder) -> (Option<Rational>, Option<Rational>) {
    let (mut odd, mut even): (Option<Rational>, Option<Rational>) = (None, None);
    let size = l.column_size();
    for i in 1..l.params.depth {
        let mut tuples = Vec::new();
        for k in 1..=size {
            let mut t = l.column(i);
            t.push(l.point(i + 1, k));
            tuples.push(t);
            let mut t = vec![l.point(i, k)];
            t.extend(l.column(i + 1));
            tuples.push(t);
        }
        let slot = if i % 2 == 1 { &mut odd } else { &mut even };
        for t in tuples {
            let (same, cross) = l.split_sum(&t);
            let ratio = same / cross;
            if slot.as_ref().is_none_or(|best| ratio > *best) {
                *slot = Some(ratio);
            }
        }
    }
    (odd, even)
}

fn ladder(
    n: usize,
    eps: &Rational,
    a: &Rational,
    depth: usize,
    arity: Option<usize>,
    emit_to: Option<&Path>,
    budget: &BudgetArg,
) -> Run {
    let params = LadderParams::new(n, eps.clone(), a.clone(), depth)?;
    let l = build_ladder_space(params)?;
    let doc = SpaceDocument::from_space(&l.space, Some(&l.map), Some(&l.analysis_domain));
    if let Some(path) = emit_to {
        emit(path, &doc)?;
    }
    let arity = arity.unwrap_or(n);
    let e = Enumeration::default().budget(budget.budget).within(&l.analysis_domain);
    let r = contraction_coefficient(&l.space, &l.map, arity, &e)?;
    let (odd_max, even_max) = family_maxima(&l);
    let witness_columns: Vec<Option<usize>> = r.witness.iter().map(|&x| l.column_of(x)).collect();
    let mut result = coefficient_json(&l.space, &r);
    let fields = json!({
        "n": n,
        "eps": q(eps),
        "a": q(a),
        "depth": depth,
        "points": l.space.len(),
        "domain_size": l.analysis_domain.len(),
        "valid": validate_metric(l.space.matrix())?.valid(),
        "witness_columns": witness_columns,
        "split_ratios": {
            "odd": q(&l.params.odd_split_ratio()),
            "even": q(&l.params.even_split_ratio()),
            "odd_family_max": odd_max.as_ref().map(q),
            "even_family_max": even_max.as_ref().map(q),
        },
    });
    merge(&mut result, fields);
    Ok(Outcome {
        result,
        passed: true,
        input_digest: Some(sha256_hex(doc.to_json().as_bytes())),
        mode: Some(mode_name(r.mode)),
    })
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(dst), Value::Object(src)) = (into, from) {
        dst.extend(src);
    }
}

fn twocycle(grid_max: &Rational, grid_step: &Rational, arity: usize, emit_to: Option<&Path>) -> Run {
    let (space, map) = build_two_cycle_space(grid_max.clone(), grid_step.clone())?;
    let doc = SpaceDocument::from_space(&space, Some(&map), None);
    if let Some(path) = emit_to {
        emit(path, &doc)?;
    }
    let r = contraction_coefficient(&space, &map, arity, &Enumeration::exhaustive())?;
    let (theorem, conclusion_holds) = theorem_json(&space, &map, arity)?;
    let points = periodic_points(&map);
    let fixed = points.iter().filter(|p| p.prime_period == 1).count();
    let two_cycle = points.iter().any(|p| p.prime_period == 2);
    // a certified perimeter contraction has a fixed point or a 2-cycle, never both
    let dichotomy_holds = !(arity == 3 && r.certified()) || ((fixed > 0) != two_cycle);

    let triple: Vec<usize> = ["0", "1", "3"].iter().filter_map(|l| space.index_of(l)).collect();
    let image: Vec<usize> = triple.iter().map(|&x| map.apply(x)).collect();
    let s = tpd_core::total_pairwise_distance(&space, &triple)?;
    let s_image = tpd_core::total_pairwise_distance(&space, &image)?;

    let mut result = coefficient_json(&space, &r);
    merge(
        &mut result,
        json!({
            "points": space.len(),
            "labels": space.labels(),
            "periodic_points": periodic_json(&space, &points),
            "fixed_points": fixed,
            "triple": {"points": triple, "sum": q(&s), "image_sum": q(&s_image), "ratio": q(&(s_image.clone() / s.clone()))},
            "conclusion_holds": conclusion_holds,
            "dichotomy_holds": dichotomy_holds,
            "theorem": theorem,
        }),
    );
    Ok(Outcome {
        result,
        passed: conclusion_holds && dichotomy_holds,
        input_digest: Some(sha256_hex(doc.to_json().as_bytes())),
        mode: Some("exhaustive"),
    })
}

/// Size and subset size of subset-map instance `seed`, drawn from
/// `2..=max_points` and `1..points`.
fn subset_shape(seed: u64, max_points: usize) -> (usize, usize) {
    let h = trial_seed(seed, 0);
    let points = 2 + (h % (max_points as u64 - 1)) as usize;
    let subset = 1 + ((h >> 32) % (points as u64 - 1)) as usize;
    (points, subset)
}

fn subsetmap(seed: u64, trials: u64, max_points: usize, emit_to: Option<&Path>) -> Run {
    if max_points < 2 {
        return Err(Failure::Input(format!("--max-points must be at least 2, got {max_points}")));
    }
    if trials == 0 {
        return Err(Failure::Input("--trials must be at least 1".into()));
    }
    if emit_to.is_some() && trials != 1 {
        return Err(Failure::Input("--emit needs --trials 1".into()));
    }
    let mut digest_input = String::new();
    let mut instances = Vec::new();
    let (mut all_inside, mut all_hold, mut certified) = (true, true, 0usize);
    for t in 0..trials {
        let s = seed.wrapping_add(t);
        let (n_points, subset_size) = subset_shape(s, max_points);
        let inst: SubsetMap<Rational> = build_subset_map_space(s, n_points, subset_size)?;
        let doc = SpaceDocument::from_space(&inst.space, Some(&inst.map), None);
        if let Some(path) = emit_to {
            emit(path, &doc)?;
        }
        digest_input.push_str(&doc.to_json());
        let periodic = periodic_points(&inst.map);
        let inside = periodic.iter().all(|p| inst.subset.contains(&p.index));
        let (theorem, holds) = theorem_json(&inst.space, &inst.map, n_points)?;
        if theorem["certified"] == Value::Bool(true) {
            certified += 1;
        }
        all_inside &= inside;
        all_hold &= holds;
        instances.push(json!({
            "seed": s,
            "points": n_points,
            "subset": inst.subset,
            "map": inst.map.image(),
            "periodic_in_subset": inside,
            "theorem": theorem,
        }));
    }
    eprintln!("{certified} of {trials} subset maps certified at arity = number of points");
    Ok(Outcome {
        result: json!({
            "instances": instances.len(),
            "certified": certified,
            "all_periodic_in_subset": all_inside,
            "all_conclusions_hold": all_hold,
            "records": instances,
        }),
        passed: all_inside && all_hold,
        input_digest: Some(sha256_hex(digest_input.as_bytes())),
        mode: Some("exhaustive"),
    })
}

fn fuzz(seed: u64, trials: u64, max_points: usize) -> Run {
    if max_points < 2 {
        return Err(Failure::Input(format!("--max-points must be at least 2, got {max_points}")));
    }
    let summary = run_fuzz(seed, trials, max_points)?;
    let total = summary.violations.total();
    eprintln!(
        "{} trials, {} with a certified arity, {} violations",
        summary.trials, summary.certified_instances, total
    );
    Ok(Outcome {
        result: serde_json::to_value(&summary).expect("fuzz summaries serialize"),
        passed: total == 0,
        input_digest: None,
        mode: Some("exhaustive"),
    })
}
