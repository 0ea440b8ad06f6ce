//! Numerical laboratory for the small-data blow-up of `u_tt - Δu = |u|^p`.
//!
//! The crate has two halves that meet in the lifespan `T(ε)`:
//!
//! * [`proof`] replays the slicing iteration that bounds `T(ε)` from above
//!   at the critical power `p = p_0(n)`, `n = 2, 3`. Every constant of the
//!   argument is computed, and each step of the induction is checked by
//!   quadrature of the integral inequality it rests on.
//! * [`wave`] and [`sweep`] integrate the equation with finite differences,
//!   measure numerical lifespans and regress them against the laws
//!   tabulated in [`exponents`].
//!
//! All numerical kernels are generic over a [`Real`] scalar (`f32` or `f64`).
//! The slicing sequences additionally accept any exact field such as
//! [`Rational`], which is how their identities are checked without rounding.
//! The `*F64` aliases below are what the command line front end uses.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exponents;
pub mod free;
pub mod profile;
pub mod proof;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod sweep;
pub mod wave;

pub use error::{Error, Result};
pub use profile::Profile;
pub use scalar::{Rational, Real};

pub type LifespanLawF64 = exponents::LifespanLaw<f64>;
pub type SlicingConstantsF64 = proof::SlicingConstants<f64>;
pub type IterationStateF64 = proof::IterationState<f64>;
pub type StepVerdictF64 = proof::StepVerdict<f64>;
pub type ProblemSpecF64 = wave::ProblemSpec<f64>;
pub type SetupF64 = wave::Setup<f64>;
pub type RunRecordF64 = wave::RunRecord<f64>;
pub type SweepConfigF64 = sweep::SweepConfig<f64>;
pub type SweepRecordF64 = sweep::SweepRecord<f64>;
pub type FitReportF64 = sweep::FitReport<f64>;
pub type ProfileF64 = Profile<f64>;
