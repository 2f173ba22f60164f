//! Weight reduction by partial Hasse invariants.
//!
//! While some `beta` satisfies `p k_beta < k_{sigma^-1 beta}`, every form of
//! weight `k` is `H_beta` times a form of weight `k - h_beta`, so the weight is
//! replaced by `k - h_beta`. In Hasse coordinates each such step subtracts
//! `e_beta`, so coordinates never increase along a chain. The loop stops when
//!
//! * no `beta` is reducible, in which case the weight lies in `C^min`, or
//! * some Hasse coordinate is negative, which certifies that no chain
//!   extension can reach `C^min` (a subset of `C^Hasse`) and hence that the
//!   original space of forms is zero. A negative entry on a degree-one orbit
//!   is the same condition there and is reported as such.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::rc::Rc;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::cones::{hasse_coordinates, in_min_cone, weight_hasse_coordinates, HasseCoordinates};
use crate::error::{Error, Result};
use crate::splitting::{Embedding, SplittingType};
use crate::weights::{json_integer, Rational, WeightVector};

/// Which reducible embedding to divide by when several qualify.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStrategy {
    /// Smallest flat index. Canonical output.
    #[default]
    FirstViolated,
    /// Largest flat index.
    LastViolated,
    /// Explore every order; fails with [`Error::NonConfluent`] if the
    /// endpoints differ, otherwise returns the `FirstViolated` outcome.
    AllStrategies,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub beta: Embedding,
    pub before: WeightVector,
    pub after: WeightVector,
}

impl Serialize for ReductionStep {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ReductionStep", 3)?;
        s.serialize_field("beta", &[self.beta.orbit, self.beta.position])?;
        s.serialize_field("before", &self.before)?;
        s.serialize_field("after", &self.after)?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VanishingWitness {
    /// `y_beta < 0` at the final weight of the trace.
    NegativeHasseCoordinate { beta: Embedding, value: Rational },
    /// `k_beta < 0` with `beta` on a degree-one orbit.
    DegreeOneNegative { beta: Embedding, value: BigInt },
}

impl VanishingWitness {
    pub fn beta(&self) -> Embedding {
        match self {
            Self::NegativeHasseCoordinate { beta, .. } | Self::DegreeOneNegative { beta, .. } => *beta,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::NegativeHasseCoordinate { .. } => "negative_hasse_coordinate",
            Self::DegreeOneNegative { .. } => "degree_one_negative",
        }
    }

    pub fn value_string(&self) -> String {
        match self {
            Self::NegativeHasseCoordinate { value, .. } => value.to_string(),
            Self::DegreeOneNegative { value, .. } => value.to_string(),
        }
    }
}

impl Serialize for VanishingWitness {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let beta = self.beta();
        let mut s = serializer.serialize_struct("VanishingWitness", 3)?;
        s.serialize_field("kind", self.kind())?;
        s.serialize_field("beta", &[beta.orbit, beta.position])?;
        s.serialize_field("value", &self.value_string())?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionOutcome {
    Minimal {
        k_min: WeightVector,
        n: WeightVector,
        trace: Vec<ReductionStep>,
    },
    Vanishing {
        trace: Vec<ReductionStep>,
        witness: VanishingWitness,
    },
}

impl ReductionOutcome {
    pub fn trace(&self) -> &[ReductionStep] {
        match self {
            Self::Minimal { trace, .. } | Self::Vanishing { trace, .. } => trace,
        }
    }

    pub fn is_minimal(&self) -> bool {
        matches!(self, Self::Minimal { .. })
    }

    pub fn status(&self) -> &'static str {
        match self {
            Self::Minimal { .. } => "minimal",
            Self::Vanishing { .. } => "vanishing",
        }
    }
}

/// `{status, k_min?, n?, witness?, trace}`.
impl Serialize for ReductionOutcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Minimal { k_min, n, trace } => {
                let mut s = serializer.serialize_struct("ReductionOutcome", 4)?;
                s.serialize_field("status", self.status())?;
                s.serialize_field("k_min", k_min)?;
                s.serialize_field("n", n)?;
                s.serialize_field("trace", trace)?;
                s.end()
            }
            Self::Vanishing { trace, witness } => {
                let mut s = serializer.serialize_struct("ReductionOutcome", 3)?;
                s.serialize_field("status", self.status())?;
                s.serialize_field("witness", witness)?;
                s.serialize_field("trace", trace)?;
                s.end()
            }
        }
    }
}

/// `p k_beta < k_{sigma^-1 beta}`.
pub fn reducible_at(k: &WeightVector, beta: Embedding) -> Result<bool> {
    let st = k.splitting();
    let i = st.flat_index(beta)?;
    Ok(reducible_index(st, k.entries(), i))
}

fn reducible_index(st: &SplittingType, k: &[BigInt], i: usize) -> bool {
    BigInt::from(st.p()) * &k[i] < k[st.prev_index(i)]
}

/// Maximum number of steps any chain from a weight with these coordinates can take:
/// `1 + sum_beta max(0, floor(y_beta))`.
pub fn step_bound(y: &HasseCoordinates) -> BigInt {
    y.entries()
        .iter()
        .filter(|v| v.is_positive())
        .fold(BigInt::from(1), |acc, v| acc + v.numer().div_floor(v.denom()))
}

fn vanishing_witness(st: &SplittingType, k: &[BigInt], y: &[Rational]) -> Result<Option<VanishingWitness>> {
    if let Some(i) = (0..st.d()).find(|&i| st.degree_at(i) == 1 && k[i].is_negative()) {
        return Ok(Some(VanishingWitness::DegreeOneNegative {
            beta: st.embedding_at(i)?,
            value: k[i].clone(),
        }));
    }
    match y.iter().position(Signed::is_negative) {
        Some(i) => Ok(Some(VanishingWitness::NegativeHasseCoordinate {
            beta: st.embedding_at(i)?,
            value: y[i].clone(),
        })),
        None => Ok(None),
    }
}

pub fn reduce(k: &WeightVector, strategy: StepStrategy) -> Result<ReductionOutcome> {
    match strategy {
        StepStrategy::FirstViolated | StepStrategy::LastViolated => reduce_chain(k, strategy),
        StepStrategy::AllStrategies => {
            let endpoints = reachable_endpoints(k)?;
            if endpoints.len() > 1 {
                return Err(Error::NonConfluent {
                    weight: k.to_string(),
                    endpoints: endpoints.len(),
                });
            }
            reduce_chain(k, StepStrategy::FirstViolated)
        }
    }
}

fn reduce_chain(k: &WeightVector, strategy: StepStrategy) -> Result<ReductionOutcome> {
    let st = Arc::clone(k.splitting());
    let y0 = weight_hasse_coordinates(k);
    let bound = step_bound(&y0);
    let p = BigInt::from(st.p());

    let mut y: Vec<Rational> = y0.into_vector().entries().to_vec();
    let mut current = k.clone();
    let mut n = vec![BigInt::zero(); st.d()];
    let mut trace = Vec::new();

    loop {
        if let Some(witness) = vanishing_witness(&st, current.entries(), &y)? {
            return Ok(ReductionOutcome::Vanishing { trace, witness });
        }

        let mut reducible = (0..st.d()).filter(|&i| reducible_index(&st, current.entries(), i));
        let chosen = match strategy {
            StepStrategy::LastViolated => reducible.next_back(),
            _ => reducible.next(),
        };
        let Some(i) = chosen else {
            if !in_min_cone(&current.to_rational()) {
                return Err(Error::Internal(format!(
                    "irreducible weight {current} is not in the minimal cone"
                )));
            }
            return Ok(ReductionOutcome::Minimal {
                k_min: current,
                n: WeightVector::new(&st, n)?,
                trace,
            });
        };

        if BigInt::from(trace.len()) >= bound {
            return Err(Error::Internal(format!(
                "reduction of {k} exceeded its step bound {bound}"
            )));
        }

        let mut next = current.clone().into_entries();
        next[st.prev_index(i)] -= &p;
        next[i] += 1;
        let after = WeightVector::new(&st, next)?;
        y[i] -= Rational::from_integer(BigInt::from(1));
        n[i] += 1;
        trace.push(ReductionStep {
            beta: st.embedding_at(i)?,
            before: current,
            after: after.clone(),
        });
        current = after;
    }
}

/// Terminal state of one reduction chain, ignoring the witness details.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Minimal(Vec<BigInt>),
    Vanishing,
}

impl Endpoint {
    pub fn of(outcome: &ReductionOutcome) -> Self {
        match outcome {
            ReductionOutcome::Minimal { k_min, .. } => Self::Minimal(k_min.entries().to_vec()),
            ReductionOutcome::Vanishing { .. } => Self::Vanishing,
        }
    }
}

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Endpoint", 2)?;
        match self {
            Self::Minimal(k_min) => {
                s.serialize_field("status", "minimal")?;
                let k: Vec<_> = k_min.iter().map(json_integer).collect();
                s.serialize_field("k_min", &k)?;
            }
            Self::Vanishing => {
                s.serialize_field("status", "vanishing")?;
                s.skip_field("k_min")?;
            }
        }
        s.end()
    }
}

/// Every endpoint reachable from `k` over all choices of reducible embedding.
///
/// Weights are memoized, so shared suffixes of different step orders are
/// explored once. The exponent vector of a minimal endpoint is determined by
/// `k_min` because the `h_beta` are linearly independent.
pub fn reachable_endpoints(k: &WeightVector) -> Result<BTreeSet<Endpoint>> {
    let st = Arc::clone(k.splitting());
    let bound = step_bound(&weight_hasse_coordinates(k));
    let mut memo = HashMap::new();
    let set = explore(&st, k.entries().to_vec(), 0, &bound, &mut memo)?;
    Ok((*set).clone())
}

type Memo = HashMap<Vec<BigInt>, Rc<BTreeSet<Endpoint>>>;

fn explore(
    st: &Arc<SplittingType>,
    k: Vec<BigInt>,
    depth: usize,
    bound: &BigInt,
    memo: &mut Memo,
) -> Result<Rc<BTreeSet<Endpoint>>> {
    if let Some(hit) = memo.get(&k) {
        return Ok(Rc::clone(hit));
    }
    if BigInt::from(depth) > *bound {
        return Err(Error::Internal("endpoint search exceeded the step bound".into()));
    }
    let weight = WeightVector::new(st, k.clone())?;
    let y = hasse_coordinates(&weight.to_rational());
    let result = if vanishing_witness(st, &k, y.entries())?.is_some() {
        BTreeSet::from([Endpoint::Vanishing])
    } else {
        let reducible: Vec<usize> = (0..st.d()).filter(|&i| reducible_index(st, &k, i)).collect();
        if reducible.is_empty() {
            BTreeSet::from([Endpoint::Minimal(k.clone())])
        } else {
            let mut all = BTreeSet::new();
            for i in reducible {
                let mut next = k.clone();
                next[st.prev_index(i)] -= BigInt::from(st.p());
                next[i] += 1;
                all.extend(explore(st, next, depth + 1, bound, memo)?.iter().cloned());
            }
            all
        }
    };
    let result = Rc::new(result);
    memo.insert(k, Rc::clone(&result));
    Ok(result)
}

/// Human-readable narration of a reduction outcome.
pub fn explain(outcome: &ReductionOutcome) -> String {
    let mut out = String::new();
    let trace = outcome.trace();
    for (idx, step) in trace.iter().enumerate() {
        let st = step.before.splitting();
        let prev = st
            .frobenius_inverse(step.beta)
            .expect("trace embeddings are valid");
        let k_beta = step.before.get(step.beta).expect("valid embedding");
        let k_prev = step.before.get(prev).expect("valid embedding");
        let _ = writeln!(
            out,
            "step {}: divide by H_{}: p*k_{} = {}*{} = {} < {} = k_{}; {} -> {}",
            idx + 1,
            step.beta,
            step.beta,
            st.p(),
            k_beta,
            BigInt::from(st.p()) * k_beta,
            k_prev,
            prev,
            step.before,
            step.after,
        );
    }
    match outcome {
        ReductionOutcome::Minimal { k_min, n, .. } => {
            if trace.is_empty() {
                let _ = writeln!(out, "already in minimal cone: {k_min}");
            } else {
                let _ = writeln!(out, "minimal weight {k_min} reached with exponents n = {n}");
            }
        }
        ReductionOutcome::Vanishing { witness, .. } => {
            let at = trace
                .last()
                .map_or_else(|| "the input weight".to_string(), |s| s.after.to_string());
            match witness {
                VanishingWitness::NegativeHasseCoordinate { beta, value } => {
                    let _ = writeln!(
                        out,
                        "vanishing: Hasse coordinate y_{beta} = {value} < 0 at {at}; \
                         no further division reaches the minimal cone, so the space of forms is zero"
                    );
                }
                VanishingWitness::DegreeOneNegative { beta, value } => {
                    let _ = writeln!(
                        out,
                        "vanishing: k_{beta} = {value} < 0 at {at} on a degree-one orbit, \
                         so the space of forms is zero"
                    );
                }
            }
        }
    }
    out
}
