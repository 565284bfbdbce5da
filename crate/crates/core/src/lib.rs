//! Star-shaped Markov chains whose excursions are time-changed by
//! inverse subordinators chosen per excursion class.
//!
//! The crate is generic over the scalar type through [`Real`] (implemented
//! for `f32` and `f64`); the aliases at the root fix `f64`. The statistics
//! toolkit in [`stat_tests`] works in `f64` only.

// `!(x > 0)` is how NaN is rejected throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod format;
pub mod ledger;
pub mod limit_laws;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod star_chain;
pub mod stepped;
pub mod subordinator;
pub mod time_change;

pub use error::{Error, Result};
pub use rng::{derive_stream, RngStream};
pub use scalar::Real;

pub type SubordinatorSpec = subordinator::SubordinatorSpec<f64>;
pub type RaySpec = star_chain::RaySpec<f64>;
pub type StarChainModel = star_chain::StarChainModel<f64>;
pub type Path = star_chain::Path<f64>;
pub type Sojourn = star_chain::Sojourn<f64>;
pub type StopRule = star_chain::StopRule<f64>;
pub type ExcursionAtom = ledger::ExcursionAtom<f64>;
pub type ExcursionLedger = ledger::ExcursionLedger<f64>;
pub type SteppedProcess = stepped::SteppedProcess<f64>;
pub type ClassMap = time_change::ClassMap<f64>;
pub type GammaFamily = time_change::GammaFamily<f64>;
pub type Timeline = time_change::Timeline<f64>;
pub type OccupationCurves = time_change::OccupationCurves<f64>;
pub type ScalingSpec = limit_laws::ScalingSpec<f64>;
