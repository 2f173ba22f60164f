//! Exact weight-cone calculus for mod-p Hilbert modular forms.
//!
//! A weight is an integer vector indexed by the embeddings of a totally real
//! field, which only matter through the Frobenius orbits above `p`. This crate
//! provides the partial Hasse weights, membership in the minimal, standard and
//! Hasse cones, the reduction of a weight into the minimal cone by division
//! by partial Hasse invariants (with vanishing certificates), and exhaustive
//! oracles that cross-check all of it on small boxes.

pub mod cli;
pub mod cones;
pub mod error;
pub mod oracle;
pub mod reduction;
pub mod splitting;
pub mod weights;

pub use cones::{
    chain_report, hasse_coordinates, in_hasse_cone, in_min_cone, in_std_cone, min_cone_rays,
    ChainReport, HasseCoordinates,
};
pub use error::{Error, Result};
pub use reduction::{explain, reduce, reducible_at, ReductionOutcome, ReductionStep, StepStrategy};
pub use splitting::{Embedding, SplittingType};
pub use weights::{combine, hasse_weight, Rational, RationalVector, WeightVector};
