//! Worst-case chain instances for finding stationary points with
//! first-order methods.
//!
//! The crate builds the hard functions (a convex quadratic chain, a
//! non-convex chain augmented with a separable rational non-convexity, a
//! distance-bounded variant with a planted bump, and a geometric chain),
//! the scaling planners that instantiate them for a prescribed smoothness
//! class together with the predicted iteration lower bound, reference
//! optimizers (gradient descent, constant-momentum AGD, proximally
//! regularized AGD), and numeric verifiers for the constructions' key
//! properties: zero-chain structure, gradient floors, smoothness
//! membership, and suboptimality resistance.
//!
//! Core math is generic over the scalar type via [`scalar::Real`]
//! (f32 or f64); the aliases below fix f64 for ordinary use.

// validation uses !(x > bound) on purpose: unlike x <= bound it also
// rejects NaN inputs
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod instances;
pub mod numdiff;
pub mod optimizers;
pub mod rng;
pub mod scalar;
pub mod scaling;
pub mod upsilon;
pub mod verifiers;

pub use error::Error;
pub use scalar::Real;

/// f64 chain parameters.
pub type ChainParams64 = instances::ChainParams<f64>;
/// f64 scaled instance.
pub type ScaledInstance64 = instances::ScaledInstance<f64>;
/// f64 distance-bounded instance.
pub type DistanceBoundedInstance64 = instances::DistanceBoundedInstance<f64>;
/// f64 geometric chain.
pub type GeometricChainParams64 = instances::GeometricChainParams<f64>;
/// f64 instance enum.
pub type Instance64 = instances::Instance<f64>;
/// f64 non-convexity parameters.
pub type UpsilonParams64 = upsilon::UpsilonParams<f64>;
/// f64 problem class.
pub type ProblemClassSpec64 = scaling::ProblemClassSpec<f64>;
/// f64 scaling plan.
pub type ScalingPlan64 = scaling::ScalingPlan<f64>;
/// f64 iterate trace.
pub type IterateTrace64 = optimizers::IterateTrace<f64>;
