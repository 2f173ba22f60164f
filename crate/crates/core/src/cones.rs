//! Exact membership tests for the minimal, standard and Hasse cones.
//!
//! * `C^min`: `p x_beta >= x_{sigma^-1 beta}` for every `beta`.
//! * `C^st`: the nonnegative orthant.
//! * `C^Hasse`: nonnegative rational combinations of the `h_beta`.
//!
//! Positions within an orbit follow `sigma o beta_j = beta_{j+1}`, so
//! `h_{beta_j}` carries `+p` at position `j - 1 (mod f)`. Writing
//! `k = sum y_beta h_beta`, the orbit equations read `k_j = p y_{j+1} - y_j`
//! and are solved in closed form by
//! `y_j = (sum_{t<f} p^t k_{j+t}) / (p^f - 1)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::splitting::{Embedding, SplittingType};
use crate::weights::{hasse_weight, Rational, RationalVector, WeightVector};

/// Coordinates `y` with `k = sum_beta y_beta h_beta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct HasseCoordinates {
    y: RationalVector,
}

impl HasseCoordinates {
    pub fn y(&self) -> &RationalVector {
        &self.y
    }

    pub fn entries(&self) -> &[Rational] {
        self.y.entries()
    }

    pub fn into_vector(self) -> RationalVector {
        self.y
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries().iter().all(|y| !y.is_negative())
    }

    /// First flat index with a negative coordinate.
    pub fn first_negative(&self) -> Option<usize> {
        self.entries().iter().position(Signed::is_negative)
    }

    /// Checks that every denominator divides `p^f - 1` for its orbit.
    pub fn denominators_divide_orbit_moduli(&self) -> bool {
        let st = self.y.splitting();
        (0..st.orbit_count()).all(|o| {
            let modulus = orbit_modulus(st, st.degrees()[o]);
            st.orbit_range(o)
                .all(|i| modulus.is_multiple_of(self.entries()[i].denom()))
        })
    }
}

/// `p^f - 1`.
pub fn orbit_modulus(st: &SplittingType, f: usize) -> BigInt {
    num_traits::pow(BigInt::from(st.p()), f) - 1
}

/// Slack `p x_beta - x_{sigma^-1 beta}` of every defining inequality of `C^min`.
pub fn min_cone_slacks(x: &RationalVector) -> Vec<Rational> {
    let st = x.splitting();
    let p = Rational::from_integer(BigInt::from(st.p()));
    let e = x.entries();
    (0..st.d()).map(|i| &p * &e[i] - &e[st.prev_index(i)]).collect()
}

pub fn in_min_cone(x: &RationalVector) -> bool {
    let st = x.splitting();
    let p = Rational::from_integer(BigInt::from(st.p()));
    let e = x.entries();
    (0..st.d()).all(|i| &p * &e[i] >= e[st.prev_index(i)])
}

pub fn in_std_cone(x: &RationalVector) -> bool {
    x.entries().iter().all(|v| !v.is_negative())
}

pub fn in_hasse_cone(x: &RationalVector) -> bool {
    hasse_coordinates(x).is_nonnegative()
}

/// Integer fast path of [`in_min_cone`].
pub fn weight_in_min_cone(k: &WeightVector) -> bool {
    let st = k.splitting();
    let p = BigInt::from(st.p());
    let e = k.entries();
    (0..st.d()).all(|i| &p * &e[i] >= e[st.prev_index(i)])
}

/// Solves `x = sum y_beta h_beta` orbit by orbit.
///
/// Panics if the solution fails the round-trip check, which would indicate an
/// indexing bug rather than bad input.
pub fn hasse_coordinates(x: &RationalVector) -> HasseCoordinates {
    let st = x.splitting();
    let p = Rational::from_integer(BigInt::from(st.p()));
    let e = x.entries();
    let mut y = vec![Rational::zero(); st.d()];
    for o in 0..st.orbit_count() {
        let range = st.orbit_range(o);
        let f = range.len();
        let start = range.start;
        let modulus = Rational::from_integer(orbit_modulus(st, f));
        for j in 0..f {
            // Horner from the far end: sum_t p^t x_{j+t}.
            let mut acc = Rational::zero();
            for t in (0..f).rev() {
                acc = acc * &p + &e[start + (j + t) % f];
            }
            y[start + j] = acc / &modulus;
        }
    }
    let y = RationalVector::new(st, y).expect("length matches d");
    assert!(
        reconstruct(&y) == *x,
        "hasse coordinates failed the round trip for {x}"
    );
    HasseCoordinates { y }
}

pub fn weight_hasse_coordinates(k: &WeightVector) -> HasseCoordinates {
    hasse_coordinates(&k.to_rational())
}

/// `sum_beta y_beta h_beta`, evaluated as `x_i = p y_{sigma i} - y_i`.
fn reconstruct(y: &RationalVector) -> RationalVector {
    let st = y.splitting();
    let p = Rational::from_integer(BigInt::from(st.p()));
    let e = y.entries();
    let entries = (0..st.d())
        .map(|i| &p * &e[st.next_index(i)] - &e[i])
        .collect();
    RationalVector::new(st, entries).expect("length matches d")
}

/// Primitive integer generators of `C^min`, one per embedding in flat order.
///
/// The generator attached to orbit position `c` has entry
/// `p^(f - 1 - ((j - c) mod f))` at position `j` of its orbit and zero elsewhere.
pub fn min_cone_rays(st: &Arc<SplittingType>) -> Vec<WeightVector> {
    let p = BigInt::from(st.p());
    let mut rays = Vec::with_capacity(st.d());
    for o in 0..st.orbit_count() {
        let range = st.orbit_range(o);
        let f = range.len();
        for c in 0..f {
            let mut entries = vec![BigInt::zero(); st.d()];
            for j in 0..f {
                let exponent = f - 1 - (j + f - c) % f;
                entries[range.start + j] = num_traits::pow(p.clone(), exponent);
            }
            rays.push(WeightVector::new(st, entries).expect("length matches d"));
        }
    }
    rays
}

/// Greatest common divisor of the entries (zero for the zero vector).
pub fn content(k: &WeightVector) -> BigInt {
    k.entries()
        .iter()
        .fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainWitnesses {
    /// Embedding on a non-degree-one orbit used to build both witnesses.
    pub beta: Embedding,
    /// `e_beta`: nonnegative but fails the `C^min` inequality at `sigma o beta`.
    pub std_not_min: WeightVector,
    /// `h_beta`: Hasse coordinates `e_beta`, with a `-1` entry.
    pub hasse_not_std: WeightVector,
}

/// Containment facts `C^min <= C^st <= C^Hasse` for one splitting type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub splits_completely: bool,
    pub witnesses: Option<ChainWitnesses>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn chain_report(st: &Arc<SplittingType>) -> ChainReport {
    let Some(orbit) = st.degrees().iter().position(|&f| f > 1) else {
        return ChainReport {
            splits_completely: true,
            witnesses: None,
            note: Some(
                "every orbit has length 1: p x_beta >= x_beta, x_beta >= 0 and \
                 y_beta = x_beta / (p - 1) >= 0 are the same orthant test"
                    .to_string(),
            ),
        };
    };
    let beta = Embedding::new(orbit, 0);
    let std_not_min = WeightVector::unit(st, beta).expect("embedding is in range");
    let hasse_not_std = hasse_weight(st, beta).expect("embedding is in range");
    ChainReport {
        splits_completely: false,
        witnesses: Some(ChainWitnesses {
            beta,
            std_not_min,
            hasse_not_std,
        }),
        note: None,
    }
}
