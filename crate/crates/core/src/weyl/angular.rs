//! Orbital angular momentum `L = r × p` and its commutators.
//!
//! A left-handed frame evaluated with the right-handed cross-product formulas
//! is modeled as a global sign on all three components: `L^(-) = -L^(+)`.
//! Since commutators are bilinear, `[L_x, L_y]` is unchanged while `L_z` flips,
//! so the relation picks up a minus sign.

use serde::{Deserialize, Serialize};

use super::coeff::GaussianRational;
use super::commute;
use super::expr::{Generator, WeylExpression};
use crate::deduction::Chirality;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    pub fn sign(self) -> i8 {
        match self {
            Handedness::Right => 1,
            Handedness::Left => -1,
        }
    }
}

impl From<Chirality> for Handedness {
    fn from(c: Chirality) -> Self {
        match c {
            Chirality::RightHanded => Handedness::Right,
            Chirality::LeftHanded => Handedness::Left,
        }
    }
}

/// Component index 0, 1, 2 for x, y, z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    X,
    Y,
    Z,
}

impl Component {
    fn index(self) -> usize {
        self as usize
    }

    /// The next component in cyclic order.
    pub fn next(self) -> Component {
        match self {
            Component::X => Component::Y,
            Component::Y => Component::Z,
            Component::Z => Component::X,
        }
    }
}

fn product(a: Generator, b: Generator) -> WeylExpression {
    WeylExpression::generator(a)
        .mul(&WeylExpression::generator(b))
        .expect("degree 2 is within the limit")
}

/// `(L_x, L_y, L_z)` for the given handedness.
pub fn angular_momentum(h: Handedness) -> [WeylExpression; 3] {
    use Generator::*;
    let sign = GaussianRational::from_int(h.sign() as i64);
    [
        product(Y, Pz).sub(&product(Z, Py)),
        product(Z, Px).sub(&product(X, Pz)),
        product(X, Py).sub(&product(Y, Px)),
    ]
    .map(|l| l.scale(&sign))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitalCheck {
    /// The sign `s` tested in `[L_a, L_b] = s·i·hbar·L_c`.
    pub sign: i8,
    pub commutator: WeylExpression,
    /// `[L_a, L_b] - s·i·hbar·L_c`; zero when the relation holds exactly.
    pub residual: WeylExpression,
}

/// Checks `[L_x, L_y] = sign·i·hbar·L_z` with `sign = h.sign()`.
pub fn verify_orbital_commutator(h: Handedness) -> OrbitalCheck {
    verify_cyclic(h, Component::X)
}

/// Checks `[L_a, L_b] = sign·i·hbar·L_c` where `(a, b, c)` is the cyclic
/// sequence starting at `first`.
pub fn verify_cyclic(h: Handedness, first: Component) -> OrbitalCheck {
    let l = angular_momentum(h);
    let (a, b) = (first, first.next());
    let c = b.next();
    let commutator = commute(&l[a.index()], &l[b.index()]).expect("degree 4 is within the limit");
    let i_hbar = WeylExpression::i().mul(&WeylExpression::hbar()).expect("constant");
    let rhs = i_hbar
        .mul(&l[c.index()])
        .expect("degree 2 is within the limit")
        .scale(&GaussianRational::from_int(h.sign() as i64));
    let residual = commutator.sub(&rhs);
    OrbitalCheck {
        sign: h.sign(),
        commutator,
        residual,
    }
}
