//! Exhaustive oracles over guarded integer boxes.
//!
//! Nothing here is randomized. Per-weight work is independent, so box sweeps
//! run in parallel and are merged in index order; results do not depend on
//! scheduling.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cones::{in_hasse_cone, weight_hasse_coordinates, weight_in_min_cone};
use crate::error::{Error, Result};
use crate::reduction::{reachable_endpoints, reduce, step_bound, Endpoint, ReductionOutcome, StepStrategy};
use crate::splitting::SplittingType;
use crate::weights::{combine, WeightVector};

/// Default cap on the number of candidates any oracle enumerates.
pub const DEFAULT_CEILING: u64 = 10_000_000;

fn guard(size: &BigInt, ceiling: u64) -> Result<u64> {
    match size.to_u64() {
        Some(n) if n <= ceiling => Ok(n),
        _ => Err(Error::GuardExceeded {
            size: size.to_string(),
            ceiling,
        }),
    }
}

/// Decodes `index` as a mixed-radix number, most significant digit first.
fn mixed_radix(mut index: u64, radices: &[u64]) -> Vec<u64> {
    let mut digits = vec![0; radices.len()];
    for (digit, &radix) in digits.iter_mut().zip(radices).rev() {
        *digit = index % radix;
        index /= radix;
    }
    digits
}

/// The integer box `[lo, hi]^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSpec {
    st: Arc<SplittingType>,
    lo: i64,
    hi: i64,
}

impl BoxSpec {
    pub fn new(st: &Arc<SplittingType>, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidBox { lo, hi });
        }
        Ok(Self {
            st: Arc::clone(st),
            lo,
            hi,
        })
    }

    pub fn splitting(&self) -> &Arc<SplittingType> {
        &self.st
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    fn side(&self) -> u64 {
        (self.hi as i128 - self.lo as i128 + 1) as u64
    }

    /// Number of lattice points, `(hi - lo + 1)^d`.
    pub fn size(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.side()), self.st.d())
    }

    /// The `index`-th point in lexicographic order.
    pub fn point(&self, index: u64) -> WeightVector {
        let radices = vec![self.side(); self.st.d()];
        let entries = mixed_radix(index, &radices)
            .into_iter()
            .map(|x| BigInt::from(self.lo) + x)
            .collect();
        WeightVector::new(&self.st, entries).expect("length matches d")
    }

    /// All points in lexicographic order, after checking the guard.
    pub fn points(&self, ceiling: u64) -> Result<impl Iterator<Item = WeightVector> + '_> {
        let n = guard(&self.size(), ceiling)?;
        Ok((0..n).map(move |i| self.point(i)))
    }

    fn par_map<T: Send>(
        &self,
        ceiling: u64,
        f: impl Fn(WeightVector) -> Result<T> + Sync,
    ) -> Result<Vec<T>> {
        let n = guard(&self.size(), ceiling)?;
        (0..n)
            .into_par_iter()
            .map(|i| f(self.point(i)))
            .collect()
    }
}

/// Result of an extremal-element query on a finite poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extremum {
    Empty,
    Unique(WeightVector),
    Multiple(Vec<WeightVector>),
}

impl Extremum {
    fn from_vec(mut v: Vec<WeightVector>) -> Self {
        match v.len() {
            0 => Self::Empty,
            1 => Self::Unique(v.pop().expect("one element")),
            _ => Self::Multiple(v),
        }
    }

    pub fn unique(&self) -> Option<&WeightVector> {
        match self {
            Self::Unique(n) => Some(n),
            _ => None,
        }
    }

    pub fn multiplicity(&self) -> usize {
        match self {
            Self::Empty => 0,
            Self::Unique(_) => 1,
            Self::Multiple(v) => v.len(),
        }
    }
}

/// All exponent vectors `0 <= n <= floor(y(k))` with `k - sum n_beta h_beta`
/// in the minimal cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSearch {
    pub bounds: WeightVector,
    pub feasible: Vec<WeightVector>,
}

fn total(n: &WeightVector) -> BigInt {
    n.entries().iter().sum()
}

impl BoxSearch {
    pub fn is_empty(&self) -> bool {
        self.feasible.is_empty()
    }

    /// Minimal elements under the componentwise order, ascending by total.
    pub fn minimal_elements(&self) -> Vec<WeightVector> {
        let mut sorted: Vec<&WeightVector> = self.feasible.iter().collect();
        sorted.sort_by_key(|n| total(n));
        let mut kept: Vec<WeightVector> = Vec::new();
        for n in sorted {
            if !kept.iter().any(|m| m.le(n) == Some(true)) {
                kept.push(n.clone());
            }
        }
        kept
    }

    /// Maximal elements under the componentwise order, descending by total.
    pub fn maximal_elements(&self) -> Vec<WeightVector> {
        let mut sorted: Vec<&WeightVector> = self.feasible.iter().collect();
        sorted.sort_by_key(|n| std::cmp::Reverse(total(n)));
        let mut kept: Vec<WeightVector> = Vec::new();
        for n in sorted {
            if !kept.iter().any(|m| n.le(m) == Some(true)) {
                kept.push(n.clone());
            }
        }
        kept
    }

    /// The least feasible exponent: the forced division that reduction performs.
    pub fn least(&self) -> Extremum {
        Extremum::from_vec(self.minimal_elements())
    }

    pub fn maximal(&self) -> Extremum {
        Extremum::from_vec(self.maximal_elements())
    }
}

/// Enumerates every `n` with `0 <= n_beta <= max(0, floor(y(k)_beta))` and keeps
/// those whose endpoint `k - sum n_beta h_beta` lies in `C^min`.
///
/// The bound holds because `C^min` sits inside `C^Hasse` and `y(k - sum n h) = y(k) - n`.
pub fn box_search(k: &WeightVector, ceiling: u64) -> Result<BoxSearch> {
    let st = k.splitting();
    let y = weight_hasse_coordinates(k);
    let bounds: Vec<BigInt> = y
        .entries()
        .iter()
        .map(|v| {
            if v.is_positive() {
                v.numer().div_floor(v.denom())
            } else {
                BigInt::zero()
            }
        })
        .collect();
    let size = bounds.iter().fold(BigInt::from(1), |acc, b| acc * (b + 1u32));
    let count = guard(&size, ceiling)?;
    let radices: Vec<u64> = bounds
        .iter()
        .map(|b| b.to_u64().expect("guarded") + 1)
        .collect();

    let mut feasible = Vec::new();
    for index in 0..count {
        let n: Vec<BigInt> = mixed_radix(index, &radices).into_iter().map(BigInt::from).collect();
        let n = WeightVector::new(st, n)?;
        let endpoint = k.sub(&combine(&n)?)?;
        if weight_in_min_cone(&endpoint) {
            feasible.push(n);
        }
    }
    Ok(BoxSearch {
        bounds: WeightVector::new(st, bounds)?,
        feasible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingKind {
    /// The weight is outside the Hasse cone.
    Hasse,
    /// Inside the Hasse cone, but every reduction chain leaves it.
    Chain,
}

/// Trichotomy produced by reduction for an integer weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    MinimalAlready,
    ReducesToMinimal(WeightVector),
    ProvablyVanishing(VanishingKind),
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Self::MinimalAlready => "minimal_already",
            Self::ReducesToMinimal(_) => "reduces",
            Self::ProvablyVanishing(VanishingKind::Hasse) => "vanishing_by_hasse",
            Self::ProvablyVanishing(VanishingKind::Chain) => "vanishing_by_chain",
        }
    }
}

pub fn classify(k: &WeightVector) -> Result<Classification> {
    Ok(match reduce(k, StepStrategy::FirstViolated)? {
        ReductionOutcome::Minimal { n, trace, .. } if trace.is_empty() => {
            debug_assert!(n.is_zero());
            Classification::MinimalAlready
        }
        ReductionOutcome::Minimal { n, .. } => Classification::ReducesToMinimal(n),
        ReductionOutcome::Vanishing { trace, .. } if trace.is_empty() => {
            Classification::ProvablyVanishing(VanishingKind::Hasse)
        }
        ReductionOutcome::Vanishing { .. } => Classification::ProvablyVanishing(VanishingKind::Chain),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossChecks {
    pub minimal_already_in_min_cone: bool,
    pub outside_hasse_tagged_vanishing: bool,
    pub hasse_tag_matches_predicate: bool,
}

impl CrossChecks {
    pub fn all_pass(&self) -> bool {
        self.minimal_already_in_min_cone
            && self.outside_hasse_tagged_vanishing
            && self.hasse_tag_matches_predicate
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub splitting: String,
    pub lo: i64,
    pub hi: i64,
    pub total: u64,
    pub minimal_already: u64,
    pub reduces: u64,
    pub vanishing_by_hasse: u64,
    pub vanishing_by_chain: u64,
    pub cross_checks: CrossChecks,
    #[serde(skip)]
    pub entries: Vec<(WeightVector, Classification)>,
}

pub fn classify_box(bx: &BoxSpec, ceiling: u64) -> Result<Census> {
    let rows = bx.par_map(ceiling, |k| {
        let class = classify(&k)?;
        let in_min = weight_in_min_cone(&k);
        let in_hasse = in_hasse_cone(&k.to_rational());
        Ok((k, class, in_min, in_hasse))
    })?;

    let mut census = Census {
        splitting: bx.st.to_string(),
        lo: bx.lo,
        hi: bx.hi,
        total: rows.len() as u64,
        minimal_already: 0,
        reduces: 0,
        vanishing_by_hasse: 0,
        vanishing_by_chain: 0,
        cross_checks: CrossChecks {
            minimal_already_in_min_cone: true,
            outside_hasse_tagged_vanishing: true,
            hasse_tag_matches_predicate: true,
        },
        entries: Vec::with_capacity(rows.len()),
    };
    for (k, class, in_min, in_hasse) in rows {
        let checks = &mut census.cross_checks;
        match &class {
            Classification::MinimalAlready => {
                census.minimal_already += 1;
                checks.minimal_already_in_min_cone &= in_min;
            }
            Classification::ReducesToMinimal(_) => census.reduces += 1,
            Classification::ProvablyVanishing(VanishingKind::Hasse) => census.vanishing_by_hasse += 1,
            Classification::ProvablyVanishing(VanishingKind::Chain) => census.vanishing_by_chain += 1,
        }
        let vanishing = matches!(class, Classification::ProvablyVanishing(_));
        checks.outside_hasse_tagged_vanishing &= in_hasse || vanishing;
        checks.hasse_tag_matches_predicate &=
            (class == Classification::ProvablyVanishing(VanishingKind::Hasse)) == !in_hasse;
        census.entries.push((k, class));
    }
    Ok(census)
}

/// Per-weight classifications as CSV with columns `k,class,n`.
pub fn census_csv(census: &Census) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    writer.write_record(["k", "class", "n"]).map_err(io)?;
    for (k, class) in &census.entries {
        let n = match class {
            Classification::ReducesToMinimal(n) => serde_json::to_string(n).expect("serializable"),
            Classification::MinimalAlready => {
                serde_json::to_string(&WeightVector::zero(k.splitting())).expect("serializable")
            }
            Classification::ProvablyVanishing(_) => String::new(),
        };
        let k = serde_json::to_string(k).expect("serializable");
        writer.write_record([k.as_str(), class.label(), n.as_str()]).map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(format!("csv: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonConfluentWeight {
    pub k: WeightVector,
    pub endpoints: Vec<Endpoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfluenceReport {
    pub splitting: String,
    pub lo: i64,
    pub hi: i64,
    pub weights_checked: u64,
    /// Weights whose every chain is empty (already minimal or outside `C^Hasse`).
    pub empty_traces: u64,
    pub counterexamples: Vec<NonConfluentWeight>,
}

/// Explores every step order for every weight of the box and reports the
/// weights where different orders end differently.
pub fn confluence_sweep(bx: &BoxSpec, ceiling: u64) -> Result<ConfluenceReport> {
    let rows = bx.par_map(ceiling, |k| {
        let endpoints = reachable_endpoints(&k)?;
        let empty = reduce(&k, StepStrategy::FirstViolated)?.trace().is_empty();
        Ok((k, endpoints, empty))
    })?;
    let mut report = ConfluenceReport {
        splitting: bx.st.to_string(),
        lo: bx.lo,
        hi: bx.hi,
        weights_checked: rows.len() as u64,
        empty_traces: 0,
        counterexamples: Vec::new(),
    };
    for (k, endpoints, empty) in rows {
        report.empty_traces += u64::from(empty);
        if endpoints.len() > 1 {
            report.counterexamples.push(NonConfluentWeight {
                k,
                endpoints: endpoints.into_iter().collect(),
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub splitting: String,
    pub lo: i64,
    pub hi: i64,
    pub checked: u64,
    pub minimal: u64,
    pub vanishing: u64,
    /// `reduce` and `box_search` disagree on whether the minimal cone is reachable.
    pub existence_mismatches: Vec<WeightVector>,
    /// `reduce` reaches the minimal cone with an `n` other than the least feasible one.
    pub endpoint_mismatches: Vec<WeightVector>,
    pub multiple_least: Vec<WeightVector>,
    pub multiple_maximal: Vec<WeightVector>,
    pub step_bound_violations: Vec<WeightVector>,
    /// Informational: minimal outcomes whose `n` is not the greatest feasible one.
    pub differs_from_greatest: u64,
}

impl EquivalenceReport {
    pub fn is_consistent(&self) -> bool {
        self.existence_mismatches.is_empty()
            && self.endpoint_mismatches.is_empty()
            && self.multiple_least.is_empty()
            && self.multiple_maximal.is_empty()
            && self.step_bound_violations.is_empty()
    }
}

/// Compares `reduce` against `box_search` on every weight of the box.
pub fn equivalence_sweep(bx: &BoxSpec, ceiling: u64) -> Result<EquivalenceReport> {
    struct Row {
        k: WeightVector,
        minimal: bool,
        existence: bool,
        endpoint: bool,
        multi_least: bool,
        multi_max: bool,
        bound_ok: bool,
        is_greatest: bool,
    }
    let rows = bx.par_map(ceiling, |k| {
        let out = reduce(&k, StepStrategy::FirstViolated)?;
        let search = box_search(&k, ceiling)?;
        let least = search.least();
        let maximal = search.maximal();
        let bound_ok = BigInt::from(out.trace().len()) <= step_bound(&weight_hasse_coordinates(&k));
        let (endpoint, is_greatest) = match &out {
            ReductionOutcome::Minimal { n, .. } => (
                least.unique() == Some(n),
                maximal.unique() == Some(n),
            ),
            ReductionOutcome::Vanishing { .. } => (true, true),
        };
        Ok(Row {
            minimal: out.is_minimal(),
            existence: out.is_minimal() == !search.is_empty(),
            endpoint,
            multi_least: least.multiplicity() > 1,
            multi_max: maximal.multiplicity() > 1,
            bound_ok,
            is_greatest,
            k,
        })
    })?;

    let mut report = EquivalenceReport {
        splitting: bx.st.to_string(),
        lo: bx.lo,
        hi: bx.hi,
        checked: rows.len() as u64,
        minimal: 0,
        vanishing: 0,
        existence_mismatches: Vec::new(),
        endpoint_mismatches: Vec::new(),
        multiple_least: Vec::new(),
        multiple_maximal: Vec::new(),
        step_bound_violations: Vec::new(),
        differs_from_greatest: 0,
    };
    for row in rows {
        if row.minimal {
            report.minimal += 1;
        } else {
            report.vanishing += 1;
        }
        if !row.existence {
            report.existence_mismatches.push(row.k.clone());
        }
        if !row.endpoint {
            report.endpoint_mismatches.push(row.k.clone());
        }
        if row.multi_least {
            report.multiple_least.push(row.k.clone());
        }
        if row.multi_max {
            report.multiple_maximal.push(row.k.clone());
        }
        if !row.bound_ok {
            report.step_bound_violations.push(row.k.clone());
        }
        report.differs_from_greatest += u64::from(!row.is_greatest);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertBasis {
    pub splitting: String,
    pub bound: i64,
    pub elements: Vec<WeightVector>,
    /// Every element has all entries at most `bound / 2`.
    pub certified_complete: bool,
    pub status: &'static str,
}

/// Irreducible lattice points of `C^min` inside `[0, bound]^d`.
///
/// Points are visited by increasing entry sum. A point is reducible exactly
/// when it is `b + c` for an already found irreducible `b` and a cone point
/// `c`; refining any decomposition down to irreducibles shows this matches
/// "sum of two nonzero cone points".
pub fn hilbert_basis(st: &Arc<SplittingType>, bound: i64, ceiling: u64) -> Result<HilbertBasis> {
    if bound < 0 {
        return Err(Error::InvalidBox { lo: 0, hi: bound });
    }
    let bx = BoxSpec::new(st, 0, bound)?;
    let mut cone_points: Vec<WeightVector> = bx
        .points(ceiling)?
        .filter(|x| !x.is_zero() && weight_in_min_cone(x))
        .collect();
    cone_points.sort_by_key(total);

    let mut elements: Vec<WeightVector> = Vec::new();
    for x in cone_points {
        let reducible = elements.iter().any(|b| {
            b.le(&x) == Some(true)
                && weight_in_min_cone(&x.sub(b).expect("same splitting"))
        });
        if !reducible {
            elements.push(x);
        }
    }
    elements.sort_by(|a, b| a.entries().cmp(b.entries()));

    let half = BigInt::from(bound) / 2;
    let certified_complete = elements.iter().all(|e| e.entries().iter().all(|x| *x <= half));
    Ok(HilbertBasis {
        splitting: st.to_string(),
        bound,
        elements,
        certified_complete,
        status: if certified_complete {
            "complete"
        } else {
            "within box only"
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionCheck {
    pub cone_points: u64,
    pub undecomposed: Vec<WeightVector>,
}

/// Checks by dynamic programming that every cone lattice point of
/// `[0, bound]^d` is a sum of `generators`.
pub fn check_decomposition(
    st: &Arc<SplittingType>,
    bound: i64,
    generators: &[WeightVector],
    ceiling: u64,
) -> Result<DecompositionCheck> {
    let bx = BoxSpec::new(st, 0, bound.max(0))?;
    let side = bx.side();
    let count = guard(&bx.size(), ceiling)? as usize;
    let index_of = |x: &[BigInt]| -> Option<usize> {
        x.iter().try_fold(0usize, |acc, v| {
            let v = v.to_u64().filter(|&v| v < side)?;
            Some(acc * side as usize + v as usize)
        })
    };
    // Points are visited in lexicographic order; x - g precedes x for g >= 0, g != 0.
    let mut reachable = vec![false; count];
    let mut check = DecompositionCheck {
        cone_points: 0,
        undecomposed: Vec::new(),
    };
    for i in 0..count {
        let x = bx.point(i as u64);
        if i == 0 {
            reachable[0] = true;
        } else {
            reachable[i] = generators.iter().any(|g| {
                !g.is_zero()
                    && g.le(&x) == Some(true)
                    && index_of(x.sub(g).expect("same splitting").entries())
                        .is_some_and(|j| reachable[j])
            });
        }
        if weight_in_min_cone(&x) {
            check.cone_points += 1;
            if !reachable[i] {
                check.undecomposed.push(x);
            }
        }
    }
    Ok(check)
}
