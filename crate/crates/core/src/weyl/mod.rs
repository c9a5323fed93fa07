//! Exact computer algebra for the Weyl algebra over `x, y, z, px, py, pz`.
//!
//! Canonical commutation relations: `[q_i, p_j] = i·hbar·δ_ij`, all other
//! generator pairs commute. Expressions are kept normal ordered (positions to
//! the left of momenta) with gaussian-rational coefficients and a symbolic
//! `hbar`; there is no floating point anywhere in this module.

mod angular;
mod coeff;
mod expr;
mod parse;
mod rewrite;

pub use angular::{angular_momentum, verify_cyclic, verify_orbital_commutator, Component, Handedness, OrbitalCheck};
pub use coeff::{GaussianRational, WeylCoefficient};
pub use expr::{Generator, WeylExpression, WeylMonomial, MAX_DEGREE};
pub use parse::{parse, parse_ast, Ast};
pub use rewrite::{normal_order, normal_order_with, RawTerm, Strategy};

use crate::error::Result;

/// `[a, b] = ab - ba`, normal ordered.
pub fn commute(a: &WeylExpression, b: &WeylExpression) -> Result<WeylExpression> {
    Ok(a.mul(b)?.sub(&b.mul(a)?))
}
