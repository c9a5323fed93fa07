//! Spin-1/2 kinematics built up from the z basis.
//!
//! * [`spin`]: states, operators, inner products, expectation values and the
//!   Bloch correspondence, in units of ħ.
//! * [`deduction`]: derives the x and y bases from normalization,
//!   zero expectation along perpendicular axes, Hilbert-space orthogonality and
//!   the sign of `[S_x, S_y]`.
//! * [`measurement`]: Born probabilities, projective measurement with collapse
//!   and seeded Stern-Gerlach analyzer chains.
//! * [`weyl`]: exact normal ordering in the Weyl algebra of `x, y, z, px, py, pz`,
//!   used to check the orbital angular momentum commutators for both handedness
//!   choices.
//! * [`api`]: the command layer shared by the CLI and the HTTP service.

pub mod api;
pub mod deduction;
pub mod error;
pub mod measurement;
pub mod notation;
pub mod phase;
pub mod spin;
pub mod weyl;

pub use error::{Error, Result};
pub use phase::PhaseAngle;
pub use spin::{Axis, AxisLabel, SpinOperator, SpinState, EPS};
