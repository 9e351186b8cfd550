//! Outage-constrained transmit power and energy efficiency of
//! nearest-neighbor cooperative communication (NNCC) uplinks.
//!
//! Two mobile stations, U1 at a fixed distance `r1` from the base station and
//! its nearest neighbour U2 drawn from a homogeneous Poisson point process,
//! exchange their packets over a short-range link and then each uplink both
//! packets in orthogonal cellular slots. This crate provides
//!
//! * [`params`]: system constants and their validated linear-scale form,
//! * [`geometry`]: nearest-neighbour placement under the PPP,
//! * [`powermodel`]: per-link outage inversions and scheme power totals,
//! * [`distribution`]: the CDF/PDF and expectation of the cooperative total
//!   power over the PPP, plus energy efficiency,
//! * [`montecarlo`]: an independent protocol simulator used as ground truth,
//! * [`quadrature`]: the adaptive integrators the analytic side relies on.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the tolerances in the
//! test-suite are calibrated for.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distribution;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod params;
pub mod powermodel;
pub mod quadrature;
pub mod roots;
mod scalar;

pub use error::{Error, ParamViolation, Result};
pub use scalar::Real;

pub type SystemParams = params::SystemParams<f64>;
pub type LinearParams = params::LinearParams<f64>;
pub type Geometry = geometry::Geometry<f64>;
pub type OutageTargets = powermodel::OutageTargets<f64>;
pub type PowerCoefficients = powermodel::PowerCoefficients<f64>;
pub type PowerBreakdown = powermodel::PowerBreakdown<f64>;
pub type PowerModel = powermodel::PowerModel<f64>;
pub type QuadraticForm = distribution::QuadraticForm<f64>;
pub type RootPair = distribution::RootPair<f64>;
pub type DistributionContext = distribution::DistributionContext<f64>;
pub type DistributionResult = distribution::DistributionResult<f64>;
pub type TrialOutcome = montecarlo::TrialOutcome<f64>;
pub type McReport = montecarlo::McReport<f64>;

pub type SystemParamsF32 = params::SystemParams<f32>;
pub type LinearParamsF32 = params::LinearParams<f32>;
pub type PowerModelF32 = powermodel::PowerModel<f32>;

pub use montecarlo::RandomStream;
