//! Robust stability analysis under simultaneous gain and phase uncertainty.
//!
//! The uncertainty class is the *sectored disk*: matrices (or, frequency by
//! frequency, transfer matrices) whose largest singular value is at most γ
//! and whose phases lie in an interval [α, β]. The crate provides
//!
//! - [`matrix`]: dense complex linear algebra helpers,
//! - [`gainphase`]: numerical ranges, sectoriality and matrix phases,
//! - [`dwshell`]: Davis-Wielandt shell geometry and separation certificates,
//! - [`lmi`]: a small dense LMI feasibility solver,
//! - [`sectored`]: matrix-level robust stability tests and μ bounds,
//! - [`ltisys`]: state-space models, frequency sweeps and H∞ norms,
//! - [`kyp`]: state-space LMI conditions for constant sector bounds,
//! - [`fixtures`] and [`repro`]: bundled worked examples.

// Negated comparisons such as `!(x > 0.0)` are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dwshell;
pub mod fixtures;
pub mod gainphase;
pub mod kyp;
pub mod lmi;
pub mod ltisys;
pub mod matrix;
pub mod repro;
pub mod sectored;

pub use gainphase::{PhaseClass, PhaseInfo, SectorSpec};
pub use lmi::{FeasibilityCertificate, LmiProblem, SolveOptions, SolveOutcome};
pub use ltisys::StateSpaceModel;
pub use matrix::CMatrix;
