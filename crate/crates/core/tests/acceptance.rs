//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails. Run with `--nocapture` to see the lines.

use std::sync::Arc;
use std::time::{Duration, Instant};

use hasse_cones::cones::{
    chain_report, hasse_coordinates, in_hasse_cone, in_min_cone, in_std_cone, min_cone_rays,
    min_cone_slacks, orbit_modulus,
};
use hasse_cones::oracle::{box_search, check_decomposition, confluence_sweep, hilbert_basis, BoxSpec, DEFAULT_CEILING};
use hasse_cones::reduction::{reduce, step_bound, ReductionOutcome, StepStrategy, VanishingWitness};
use hasse_cones::{hasse_weight, Rational, RationalVector, SplittingType, WeightVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_2016;
const RANDOM_VECTORS: usize = 10_000;
const ENTRY_RANGE: i64 = 50;
const CHAIN_BUDGET: Duration = Duration::from_secs(5);
const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(60);
const RAY_SAMPLES: usize = 1_000;

fn st(p: u64, degrees: &[usize]) -> Arc<SplittingType> {
    Arc::new(SplittingType::new(p, degrees).unwrap())
}

fn listed_types() -> Vec<Arc<SplittingType>> {
    vec![st(2, &[2]), st(3, &[3]), st(2, &[1, 2]), st(5, &[1, 1]), st(3, &[2, 2])]
}

fn w(st: &Arc<SplittingType>, xs: &[i64]) -> WeightVector {
    WeightVector::from_i64(st, xs).unwrap()
}

fn random_weight(st: &Arc<SplittingType>, rng: &mut ChaCha8Rng) -> WeightVector {
    let xs: Vec<i64> = (0..st.d()).map(|_| rng.gen_range(-ENTRY_RANGE..=ENTRY_RANGE)).collect();
    w(st, &xs)
}

fn grid(st: &Arc<SplittingType>, lo: i64, hi: i64) -> Vec<WeightVector> {
    BoxSpec::new(st, lo, hi).unwrap().points(DEFAULT_CEILING).unwrap().collect()
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn criterion_1_cone_chain() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = 0;
    let mut counts = [0usize; 3];
    for s in listed_types() {
        for _ in 0..RANDOM_VECTORS {
            let x = random_weight(&s, &mut rng).to_rational();
            let (m, t, h) = (in_min_cone(&x), in_std_cone(&x), in_hasse_cone(&x));
            counts[0] += usize::from(m);
            counts[1] += usize::from(t);
            counts[2] += usize::from(h);
            violations += usize::from(m && !t) + usize::from(t && !h);
        }
    }
    let elapsed = start.elapsed();
    verdict(
        violations == 0 && elapsed < CHAIN_BUDGET,
        format!(
            "{violations} violations over 5 x {RANDOM_VECTORS} vectors \
             (min/std/hasse hits {counts:?}) in {elapsed:.2?}"
        ),
    )
}

fn criterion_2_split_equality() -> Verdict {
    let start = Instant::now();
    let split = st(5, &[1, 1]);
    let mut disagreements = 0;
    for k in grid(&split, -10, 10) {
        let x = k.to_rational();
        let m = in_min_cone(&x);
        disagreements += usize::from(m != in_std_cone(&x) || m != in_hasse_cone(&x));
    }
    let split_report = chain_report(&split);
    let mut ok = disagreements == 0 && split_report.splits_completely && split_report.witnesses.is_none();

    let mut strict = 0;
    for s in listed_types().into_iter().filter(|s| !s.splits_completely()) {
        let report = chain_report(&s);
        let Some(wit) = report.witnesses else {
            ok = false;
            continue;
        };
        let a = wit.std_not_min.to_rational();
        let b = wit.hasse_not_std.to_rational();
        let confirmed = !report.splits_completely
            && in_std_cone(&a)
            && !in_min_cone(&a)
            && in_hasse_cone(&b)
            && !in_std_cone(&b);
        ok &= confirmed;
        strict += usize::from(confirmed);
    }
    let elapsed = start.elapsed();
    verdict(
        ok && elapsed < CHAIN_BUDGET,
        format!(
            "{disagreements} disagreements on [-10,10]^2 for p=5;f=1,1; \
             {strict}/4 non-split types have confirmed strict witnesses; {elapsed:.2?}"
        ),
    )
}

/// `sum_beta y_beta h_beta`, built from the `h_beta` vectors directly.
fn rebuild(st: &Arc<SplittingType>, y: &[Rational]) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); st.d()];
    for (beta, y_beta) in st.embeddings().zip(y) {
        let h = hasse_weight(st, beta).unwrap();
        for (a, h_i) in acc.iter_mut().zip(h.entries()) {
            *a += y_beta * Rational::from_integer(h_i.clone());
        }
    }
    acc
}

fn criterion_3_hasse_round_trip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let mut failures = 0;
    for s in listed_types() {
        for _ in 0..RANDOM_VECTORS {
            let k = random_weight(&s, &mut rng);
            let y = hasse_coordinates(&k.to_rational());
            let back = rebuild(&s, y.entries());
            let exact = back
                .iter()
                .zip(k.entries())
                .all(|(b, k_i)| *b == Rational::from_integer(k_i.clone()));
            let denominators = (0..s.orbit_count()).all(|o| {
                let modulus = orbit_modulus(&s, s.degrees()[o]);
                s.orbit_range(o).all(|i| modulus.is_multiple_of(y.entries()[i].denom()))
            });
            failures += usize::from(!exact || !denominators);
        }
    }
    verdict(failures == 0, format!("{failures} failures over 5 x {RANDOM_VECTORS} vectors"))
}

#[derive(Default)]
struct SweepStats {
    checked: usize,
    minimal: usize,
    existence_mismatches: Vec<String>,
    endpoint_mismatches: Vec<String>,
    multiplicities: Vec<String>,
    greatest_differs: usize,
    bound_violations: Vec<String>,
    decrement_failures: Vec<String>,
}

fn y_sum(k: &WeightVector) -> Rational {
    hasse_coordinates(&k.to_rational()).entries().iter().sum()
}

fn sweep(types: &[Arc<SplittingType>]) -> SweepStats {
    let mut stats = SweepStats::default();
    for s in types {
        for k in grid(s, -6, 6) {
            stats.checked += 1;
            let out = reduce(&k, StepStrategy::FirstViolated).unwrap();
            let search = box_search(&k, DEFAULT_CEILING).unwrap();
            let least = search.minimal_elements();
            let greatest = search.maximal_elements();
            if least.len() > 1 || greatest.len() > 1 {
                stats.multiplicities.push(format!("{s} {k}"));
            }
            if out.is_minimal() == search.is_empty() {
                stats.existence_mismatches.push(format!("{s} {k}"));
            }
            if let ReductionOutcome::Minimal { n, .. } = &out {
                stats.minimal += 1;
                if least.first() != Some(n) {
                    stats.endpoint_mismatches.push(format!("{s} {k}"));
                }
                stats.greatest_differs += usize::from(greatest.first() != Some(n));
            }
            let bound = step_bound(&hasse_coordinates(&k.to_rational()));
            if BigInt::from(out.trace().len()) > bound {
                stats.bound_violations.push(format!("{s} {k}"));
            }
            for step in out.trace() {
                if y_sum(&step.before) - y_sum(&step.after) != Rational::one() {
                    stats.decrement_failures.push(format!("{s} {k}"));
                }
            }
        }
    }
    stats
}

fn criterion_4_oracle_equivalence(stats: &SweepStats, elapsed: Duration) -> Verdict {
    let pass = stats.existence_mismatches.is_empty()
        && stats.endpoint_mismatches.is_empty()
        && stats.multiplicities.is_empty()
        && elapsed < EQUIVALENCE_BUDGET;
    verdict(
        pass,
        format!(
            "{} weights, {} minimal; existence mismatches {:?}, endpoint mismatches {:?}, \
             non-unique extrema {:?}; {elapsed:.2?}",
            stats.checked,
            stats.minimal,
            stats.existence_mismatches,
            stats.endpoint_mismatches,
            stats.multiplicities
        ),
    )
}

fn criterion_5_golden() -> Verdict {
    let inert = st(2, &[2]);
    let split = st(5, &[1, 1]);
    let mut failures = Vec::new();

    match reduce(&w(&inert, &[0, 3]), StepStrategy::FirstViolated).unwrap() {
        ReductionOutcome::Minimal { k_min, n, trace }
            if k_min == w(&inert, &[1, 1]) && n == w(&inert, &[1, 0]) && trace.len() == 1 => {}
        other => failures.push(format!("(0,3): {other:?}")),
    }
    match reduce(&w(&inert, &[1, 1]), StepStrategy::FirstViolated).unwrap() {
        ReductionOutcome::Minimal { k_min, n, trace }
            if k_min == w(&inert, &[1, 1]) && n.is_zero() && trace.is_empty() => {}
        other => failures.push(format!("(1,1): {other:?}")),
    }
    match reduce(&w(&inert, &[0, 1]), StepStrategy::FirstViolated).unwrap() {
        ReductionOutcome::Vanishing {
            trace,
            witness: VanishingWitness::NegativeHasseCoordinate { value, .. },
        } if trace.len() <= 2 && value.is_negative() && trace[0].after == w(&inert, &[1, -1]) => {}
        other => failures.push(format!("(0,1): {other:?}")),
    }
    match reduce(&w(&split, &[-1, 7]), StepStrategy::FirstViolated).unwrap() {
        ReductionOutcome::Vanishing {
            trace,
            witness: VanishingWitness::DegreeOneNegative { beta, value },
        } if trace.is_empty() && beta.orbit == 0 && value == BigInt::from(-1) => {}
        other => failures.push(format!("(-1,7): {other:?}")),
    }

    // Remaining derived values from the operation examples.
    let y = hasse_coordinates(&w(&inert, &[0, 3]).to_rational());
    if y.y() != &w(&inert, &[2, 1]).to_rational() {
        failures.push(format!("y(0,3) = {}", y.y()));
    }
    let y = hasse_coordinates(&w(&inert, &[0, 1]).to_rational());
    let expected = RationalVector::new(
        &inert,
        vec![Rational::new(2.into(), 3.into()), Rational::new(1.into(), 3.into())],
    )
    .unwrap();
    if y.y() != &expected {
        failures.push(format!("y(0,1) = {}", y.y()));
    }
    if !in_min_cone(&w(&inert, &[1, 1]).to_rational()) || in_min_cone(&w(&inert, &[0, 3]).to_rational()) {
        failures.push("min cone examples".into());
    }
    if min_cone_rays(&inert) != vec![w(&inert, &[2, 1]), w(&inert, &[1, 2])] {
        failures.push("rays of p=2;f=2".into());
    }
    let search = box_search(&w(&inert, &[0, 3]), DEFAULT_CEILING).unwrap();
    if search.least().unique() != Some(&w(&inert, &[1, 0])) {
        failures.push("box_search (0,3)".into());
    }
    if !box_search(&w(&inert, &[0, 1]), DEFAULT_CEILING).unwrap().is_empty() {
        failures.push("box_search (0,1)".into());
    }
    verdict(failures.is_empty(), format!("failures: {failures:?}"))
}

fn criterion_6_rays() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut failures = Vec::new();
    for s in listed_types() {
        let rays = min_cone_rays(&s);
        if rays.len() != s.d() {
            failures.push(format!("{s}: {} rays", rays.len()));
        }
        for (i, ray) in rays.iter().enumerate() {
            let orbit = s.embedding_at(i).unwrap().orbit;
            let range = s.orbit_range(orbit);
            let x = ray.to_rational();
            let slacks = min_cone_slacks(&x);
            let tight = range.clone().filter(|&j| slacks[j].is_zero()).count();
            let support_ok = ray
                .entries()
                .iter()
                .enumerate()
                .all(|(j, v)| if range.contains(&j) { v.is_positive() } else { v.is_zero() });
            if !in_min_cone(&x) || tight != range.len() - 1 || !support_ok || !in_std_cone(&x) {
                failures.push(format!("{s} ray {ray}"));
            }
        }
        for _ in 0..RAY_SAMPLES {
            let mut x = RationalVector::zero(&s);
            for ray in &rays {
                let c = Rational::new(rng.gen_range(0..=20).into(), rng.gen_range(1..=7).into());
                x = x.add(&ray.to_rational().scale(&c)).unwrap();
            }
            if !in_min_cone(&x) {
                failures.push(format!("{s} combination {x}"));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!("5 types, {RAY_SAMPLES} combinations each; failures: {failures:?}"),
    )
}

fn criterion_7_termination(stats: &SweepStats) -> Verdict {
    verdict(
        stats.bound_violations.is_empty() && stats.decrement_failures.is_empty(),
        format!(
            "{} weights; step-bound violations {:?}; sum(y) decrement failures {:?}",
            stats.checked, stats.bound_violations, stats.decrement_failures
        ),
    )
}

fn criterion_8_confluence() -> Verdict {
    let mut ok = true;
    let mut details = Vec::new();
    for s in [st(2, &[2]), st(2, &[1, 2])] {
        let bx = BoxSpec::new(&s, -4, 4).unwrap();
        let first = serde_json::to_string(&confluence_sweep(&bx, DEFAULT_CEILING).unwrap()).unwrap();
        let second = serde_json::to_string(&confluence_sweep(&bx, DEFAULT_CEILING).unwrap()).unwrap();
        let report = confluence_sweep(&bx, DEFAULT_CEILING).unwrap();
        ok &= first == second;
        details.push(format!(
            "{s}: {} weights, {} counterexamples, stable={}",
            report.weights_checked,
            report.counterexamples.len(),
            first == second
        ));
    }
    verdict(ok, details.join("; "))
}

fn criterion_9_hilbert() -> Verdict {
    let s = st(2, &[2]);
    let basis = hilbert_basis(&s, 6, DEFAULT_CEILING).unwrap();
    let check = check_decomposition(&s, 6, &basis.elements, DEFAULT_CEILING).unwrap();
    let expected = vec![w(&s, &[1, 1]), w(&s, &[1, 2]), w(&s, &[2, 1])];
    let confirmed = basis.elements == expected;
    verdict(
        check.undecomposed.is_empty(),
        format!(
            "{} cone points in [0,6]^2 all decompose over {:?}; expected set {}",
            check.cone_points,
            basis.elements.iter().map(ToString::to_string).collect::<Vec<_>>(),
            if confirmed { "confirmed" } else { "refuted" }
        ),
    )
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let stats = sweep(&[st(2, &[2]), st(3, &[3]), st(2, &[1, 2])]);
    let sweep_time = start.elapsed();

    let results = [
        ("1 cone chain", criterion_1_cone_chain()),
        ("2 split-completely equality", criterion_2_split_equality()),
        ("3 Hasse round trip", criterion_3_hasse_round_trip()),
        ("4 oracle equivalence", criterion_4_oracle_equivalence(&stats, sweep_time)),
        ("5 golden examples", criterion_5_golden()),
        ("6 rays", criterion_6_rays()),
        ("7 termination bound", criterion_7_termination(&stats)),
        ("8 confluence sweep", criterion_8_confluence()),
        ("9 Hilbert basis", criterion_9_hilbert()),
    ];
    for (name, v) in &results {
        println!("{} criterion {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!(
        "info: reduction exponent equals the greatest feasible exponent for {}/{} minimal outcomes",
        stats.minimal - stats.greatest_differs,
        stats.minimal
    );
    let failed: Vec<_> = results.iter().filter(|(_, v)| !v.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
