//! Step-by-step deduction of the x and y bases from the z basis.
//!
//! Each basis state starts as a general superposition of `|up_z>` and
//! `|down_z>` and is pinned down by constraints that all have closed-form
//! solutions:
//!
//! 1. zero `<S_z>` with unit norm forces `|A| = |B| = 1/sqrt 2`, leaving two phases;
//! 2. a zero inner product with a partner state fixes their phase difference;
//! 3. zero `<S_x>` leaves two relative phases for the y states;
//! 4. the sign of `[S_x, S_y]` picks one of them (`+i S_z` is right-handed).
//!
//! Every phase that is only an overall factor (or the choice of x direction)
//! is set by a convention, zero unless overridden.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhaseAngle;
use crate::spin::{
    basis_operator, commutator, expectation, inner_product, projector, spin_operator, AxisLabel, SpinOperator,
    SpinState, EPS,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// One phase of an unbiased family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseSlot {
    Free {
        symbol: String,
    },
    Fixed {
        symbol: String,
        angle: PhaseAngle,
    },
    /// This phase equals the other slot's phase plus `offset`.
    ConstrainedRelative {
        symbol: String,
        offset: PhaseAngle,
    },
}

impl PhaseSlot {
    pub fn free(symbol: &str) -> Self {
        PhaseSlot::Free {
            symbol: symbol.to_owned(),
        }
    }

    pub fn fixed(symbol: &str, angle: PhaseAngle) -> Self {
        PhaseSlot::Fixed {
            symbol: symbol.to_owned(),
            angle,
        }
    }

    pub fn symbol(&self) -> &str {
        match self {
            PhaseSlot::Free { symbol }
            | PhaseSlot::Fixed { symbol, .. }
            | PhaseSlot::ConstrainedRelative { symbol, .. } => symbol,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, PhaseSlot::Free { .. })
    }
}

/// `magnitude·(e^{i phi_up}|up_z> + e^{i phi_down}|down_z>)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFamily {
    pub magnitude: f64,
    pub slot_up: PhaseSlot,
    pub slot_down: PhaseSlot,
}

impl PhaseFamily {
    /// The z-unbiased family with two free phases.
    pub fn unbiased(up_symbol: &str, down_symbol: &str) -> Self {
        PhaseFamily {
            magnitude: FRAC_1_SQRT_2,
            slot_up: PhaseSlot::free(up_symbol),
            slot_down: PhaseSlot::free(down_symbol),
        }
    }

    pub fn free_symbols(&self) -> Vec<&str> {
        [&self.slot_up, &self.slot_down]
            .into_iter()
            .filter(|s| s.is_free())
            .map(PhaseSlot::symbol)
            .collect()
    }

    /// Replaces every assigned free slot by a fixed one.
    pub fn assign(&self, assignments: &BTreeMap<String, PhaseAngle>) -> PhaseFamily {
        let fix = |slot: &PhaseSlot| match slot {
            PhaseSlot::Free { symbol } => match assignments.get(symbol) {
                Some(a) => PhaseSlot::fixed(symbol, *a),
                None => slot.clone(),
            },
            other => other.clone(),
        };
        PhaseFamily {
            magnitude: self.magnitude,
            slot_up: fix(&self.slot_up),
            slot_down: fix(&self.slot_down),
        }
    }

    /// Resolves both phases under `assignments`.
    pub fn phases(&self, assignments: &BTreeMap<String, PhaseAngle>) -> Result<(PhaseAngle, PhaseAngle)> {
        let direct = |slot: &PhaseSlot| -> Result<Option<PhaseAngle>> {
            match slot {
                PhaseSlot::Fixed { angle, .. } => Ok(Some(*angle)),
                PhaseSlot::Free { symbol } => assignments
                    .get(symbol)
                    .copied()
                    .map(Some)
                    .ok_or_else(|| Error::UnresolvedSlot(symbol.clone())),
                PhaseSlot::ConstrainedRelative { .. } => Ok(None),
            }
        };
        let offset = |slot: &PhaseSlot| match slot {
            PhaseSlot::ConstrainedRelative { offset, .. } => *offset,
            _ => unreachable!("only called on constrained slots"),
        };
        match (direct(&self.slot_up)?, direct(&self.slot_down)?) {
            (Some(u), Some(d)) => Ok((u, d)),
            (Some(u), None) => Ok((u, u + offset(&self.slot_down))),
            (None, Some(d)) => Ok((d + offset(&self.slot_up), d)),
            (None, None) => Err(Error::ConstraintInfeasible(
                "both phases are constrained relative to each other".into(),
            )),
        }
    }

    /// The state obtained by substituting `assignments` for the free phases.
    pub fn instantiate(&self, assignments: &BTreeMap<String, PhaseAngle>) -> Result<SpinState> {
        let (u, d) = self.phases(assignments)?;
        let m = Complex64::new(self.magnitude, 0.0);
        Ok(SpinState::new(m * u.unit(), m * d.unit()))
    }
}

impl fmt::Display for PhaseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |slot: &PhaseSlot, other: &PhaseSlot| match slot {
            PhaseSlot::Free { symbol } => symbol.clone(),
            PhaseSlot::Fixed { angle, .. } => angle.to_string(),
            PhaseSlot::ConstrainedRelative { offset, .. } => format!("{} + {}", other.symbol(), offset),
        };
        write!(
            f,
            "{}·(e^(i·{})|up_z> + e^(i·{})|down_z>)",
            self.magnitude,
            show(&self.slot_up, &self.slot_down),
            show(&self.slot_down, &self.slot_up)
        )
    }
}

/// A coefficient of the general ansatz: unknown, or supplied by the caller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coefficient {
    Unknown,
    Known(Complex64),
}

/// `A|up_z> + B|down_z>` before any constraint, with the names of the phases
/// the unbiased family will carry.
#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    pub coeff_up: Coefficient,
    pub coeff_down: Coefficient,
    pub phase_up: String,
    pub phase_down: String,
}

impl Ansatz {
    /// Both coefficients unknown.
    pub fn general(phase_up: &str, phase_down: &str) -> Self {
        Ansatz {
            coeff_up: Coefficient::Unknown,
            coeff_down: Coefficient::Unknown,
            phase_up: phase_up.to_owned(),
            phase_down: phase_down.to_owned(),
        }
    }

    /// Both coefficients given.
    pub fn known(a: Complex64, b: Complex64) -> Self {
        Ansatz {
            coeff_up: Coefficient::Known(a),
            coeff_down: Coefficient::Known(b),
            phase_up: "phi_up".into(),
            phase_down: "phi_down".into(),
        }
    }
}

/// Imposes zero expectation of the spin component along `measured_axis`.
///
/// Unknown coefficients become free phases of magnitude `1/sqrt 2`; known ones
/// are checked and their phases extracted as fixed slots.
pub fn enforce_unbiased(ansatz: &Ansatz, measured_axis: AxisLabel) -> Result<PhaseFamily> {
    if measured_axis != AxisLabel::Z {
        return Err(Error::ConstraintInfeasible(format!(
            "unbiased families are parametrized over the z basis; cannot impose <S_{measured_axis}> = 0"
        )));
    }
    let target = 0.5;
    let slot = |c: Coefficient, symbol: &str| -> Result<PhaseSlot> {
        match c {
            Coefficient::Unknown => Ok(PhaseSlot::free(symbol)),
            Coefficient::Known(v) => {
                if (v.norm_sqr() - target).abs() > EPS {
                    return Err(Error::ConstraintInfeasible(format!(
                        "|{symbol}| coefficient has |c|^2 = {} but <S_z> = 0 with unit norm needs 1/2",
                        v.norm_sqr()
                    )));
                }
                Ok(PhaseSlot::fixed(symbol, PhaseAngle::snap(v.arg(), EPS)))
            }
        }
    };
    if let (Coefficient::Known(a), Coefficient::Known(b)) = (ansatz.coeff_up, ansatz.coeff_down) {
        let psi = SpinState::new(a, b);
        psi.require_normalized()?;
        let sz = expectation(&spin_operator(AxisLabel::Z), &psi)?;
        if sz.abs() > EPS {
            return Err(Error::ConstraintInfeasible(format!("<S_z> = {sz}, not 0")));
        }
    }
    Ok(PhaseFamily {
        magnitude: FRAC_1_SQRT_2,
        slot_up: slot(ansatz.coeff_up, &ansatz.phase_up)?,
        slot_down: slot(ansatz.coeff_down, &ansatz.phase_down)?,
    })
}

/// Instantiates `family` with the chosen values for its free phases.
pub fn fix_convention(family: &PhaseFamily, assignments: &BTreeMap<String, PhaseAngle>) -> Result<SpinState> {
    family.instantiate(assignments)
}

/// Ties the two phases of `family` so every instantiation is orthogonal to
/// `reference`.
///
/// `<r|psi> ∝ conj(r_a)e^{iu} + conj(r_b)e^{id}` vanishes iff `|r_a| = |r_b|`
/// and `d - u = pi + arg r_b - arg r_a`.
pub fn enforce_hilbert_orthogonal(family: &PhaseFamily, reference: &SpinState) -> Result<PhaseFamily> {
    reference.require_normalized()?;
    let (ra, rb) = (reference.a(), reference.b());
    if (ra.norm() - rb.norm()).abs() > EPS {
        return Err(Error::ConstraintInfeasible(
            "an unbiased family can only be orthogonal to an unbiased reference".into(),
        ));
    }
    let offset = PhaseAngle::snap(std::f64::consts::PI + rb.arg() - ra.arg(), EPS);
    let mut out = family.clone();
    match (&family.slot_up, &family.slot_down) {
        (_, PhaseSlot::Free { symbol }) if !matches!(family.slot_up, PhaseSlot::ConstrainedRelative { .. }) => {
            out.slot_down = PhaseSlot::ConstrainedRelative {
                symbol: symbol.clone(),
                offset,
            };
        }
        (PhaseSlot::Free { symbol }, PhaseSlot::Fixed { .. }) => {
            out.slot_up = PhaseSlot::ConstrainedRelative {
                symbol: symbol.clone(),
                offset: -offset,
            };
        }
        _ => {
            // Already a single state or a one-parameter family: check it as is.
            let (u, d) = family.phases(&pin_free(family))?;
            if !(d - u).approx_eq(offset, EPS) {
                return Err(Error::ConstraintInfeasible(
                    "family cannot be made orthogonal to the reference".into(),
                ));
            }
        }
    }
    Ok(out)
}

/// Assigns zero to every free slot; used where the result does not depend on it.
fn pin_free(family: &PhaseFamily) -> BTreeMap<String, PhaseAngle> {
    family
        .free_symbols()
        .into_iter()
        .map(|s| (s.to_owned(), PhaseAngle::ZERO))
        .collect()
}

// ---------------------------------------------------------------------------
// y candidates and handedness
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YPair {
    pub y_up: SpinState,
    pub y_down: SpinState,
}

/// The two y bases that are unbiased with respect to both z and x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YCandidatePair {
    /// Relative phase `+pi/2` (for the standard x basis).
    pub upper: YPair,
    /// Relative phase `-pi/2`.
    pub lower: YPair,
}

impl YCandidatePair {
    pub fn swapped(&self) -> YCandidatePair {
        YCandidatePair {
            upper: self.lower,
            lower: self.upper,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chirality {
    #[default]
    RightHanded,
    LeftHanded,
}

impl Chirality {
    /// +1 for right-handed, −1 for left-handed.
    pub fn sign(self) -> i8 {
        match self {
            Chirality::RightHanded => 1,
            Chirality::LeftHanded => -1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Chirality::RightHanded => "right-handed",
            Chirality::LeftHanded => "left-handed",
        }
    }
}

/// Outcome of the commutator test on a candidate pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandednessChoice {
    pub chirality: Chirality,
    pub chosen: YPair,
    /// Sign `s` in `[S_x, S_y] = s·i·S_z` for the chosen pair.
    pub chosen_sign: i8,
    pub rejected: YPair,
    /// The same sign for the rejected pair (0 if it matched neither).
    pub rejected_sign: i8,
}

/// Relative phases `delta = phi_down - phi_up` that make an unbiased family
/// have zero expectation of `op`, as (upper, lower).
///
/// `<op> = tr(op)/2 + Re(op_01 e^{i delta})`.
fn unbiased_relative_phases(op: &SpinOperator) -> Result<(PhaseAngle, PhaseAngle)> {
    let off = op.entry(0, 1);
    if off.norm() <= EPS {
        return Err(Error::ConstraintInfeasible(
            "operator has no off-diagonal part; relative phase is unconstrained".into(),
        ));
    }
    let ratio = -0.5 * op.trace().re / off.norm();
    if ratio.abs() > 1.0 + EPS {
        return Err(Error::ConstraintInfeasible(
            "no relative phase gives zero expectation".into(),
        ));
    }
    let spread = ratio.clamp(-1.0, 1.0).acos();
    let base = -off.arg();
    Ok((
        PhaseAngle::snap(base + spread, EPS),
        PhaseAngle::snap(base - spread, EPS),
    ))
}

/// Sign `s` with `[s_x, s_y] = s·i·s_z` within `tol`, or 0 if neither sign fits.
fn commutator_sign(s_x: &SpinOperator, s_y: &SpinOperator, s_z: &SpinOperator, tol: f64) -> i8 {
    let c = commutator(s_x, s_y);
    if c.approx_eq(&s_z.scale(I), tol) {
        1
    } else if c.approx_eq(&s_z.scale(-I), tol) {
        -1
    } else {
        0
    }
}

/// Steps shared by [`candidate_y_pairs`] and the full pipeline.
struct YCandidateDerivation {
    pair: YCandidatePair,
    up_family: PhaseFamily,
    down_family: PhaseFamily,
    upper_families: (PhaseFamily, PhaseFamily),
    lower_families: (PhaseFamily, PhaseFamily),
}

fn derive_y_candidates(s_x: &SpinOperator, phi5: PhaseAngle, phi7: PhaseAngle) -> Result<YCandidateDerivation> {
    let up_family = enforce_unbiased(&Ansatz::general("phi5", "phi6"), AxisLabel::Z)?;
    let down_family = enforce_unbiased(&Ansatz::general("phi7", "phi8"), AxisLabel::Z)?;
    let (d_upper, d_lower) = unbiased_relative_phases(s_x)?;

    let conv_down: BTreeMap<String, PhaseAngle> = [("phi7".to_owned(), phi7)].into();
    let build = |delta: PhaseAngle| -> Result<(YPair, PhaseFamily, PhaseFamily)> {
        let up_fam = PhaseFamily {
            magnitude: up_family.magnitude,
            slot_up: PhaseSlot::fixed("phi5", phi5),
            slot_down: PhaseSlot::fixed("phi6", phi5 + delta),
        };
        let y_up = up_fam.instantiate(&BTreeMap::new())?;
        let down_fam = enforce_hilbert_orthogonal(&down_family, &y_up)?;
        let y_down = fix_convention(&down_fam, &conv_down)?;
        Ok((YPair { y_up, y_down }, up_fam, down_fam))
    };
    let (upper, uf, udf) = build(d_upper)?;
    let (lower, lf, ldf) = build(d_lower)?;
    Ok(YCandidateDerivation {
        pair: YCandidatePair { upper, lower },
        up_family,
        down_family,
        upper_families: (uf, udf),
        lower_families: (lf, ldf),
    })
}

/// Both y bases compatible with the standard x basis (all conventions zero).
pub fn candidate_y_pairs() -> YCandidatePair {
    let b = canonical_basis();
    let s_x = basis_operator(&b.x_up, &b.x_down).expect("canonical x states are normalized");
    derive_y_candidates(&s_x, PhaseAngle::ZERO, PhaseAngle::ZERO)
        .expect("y candidates exist for the canonical x basis")
        .pair
}

/// Picks the right-handed candidate: the one whose `S_y` satisfies
/// `[S_x, S_y] = +i S_z`.
pub fn select_handedness(pair: &YCandidatePair) -> Result<HandednessChoice> {
    select_handedness_with(
        pair,
        &spin_operator(AxisLabel::X),
        &spin_operator(AxisLabel::Z),
        Chirality::RightHanded,
        EPS,
    )
}

fn select_handedness_with(
    pair: &YCandidatePair,
    s_x: &SpinOperator,
    s_z: &SpinOperator,
    want: Chirality,
    tol: f64,
) -> Result<HandednessChoice> {
    let sign_of = |p: &YPair| -> Result<i8> {
        let s_y = basis_operator(&p.y_up, &p.y_down)?;
        Ok(commutator_sign(s_x, &s_y, s_z, tol))
    };
    let (su, sl) = (sign_of(&pair.upper)?, sign_of(&pair.lower)?);
    let target = want.sign();
    let (chosen, chosen_sign, rejected, rejected_sign) = if su == target {
        (pair.upper, su, pair.lower, sl)
    } else if sl == target {
        (pair.lower, sl, pair.upper, su)
    } else {
        return Err(Error::NoRightHandedCandidate);
    };
    Ok(HandednessChoice {
        chirality: want,
        chosen,
        chosen_sign,
        rejected,
        rejected_sign,
    })
}

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

/// Values for every phase that is fixed by convention.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Conventions {
    pub phi1: PhaseAngle,
    pub phi2: PhaseAngle,
    pub phi3: PhaseAngle,
    pub phi5: PhaseAngle,
    pub phi7: PhaseAngle,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            phi1: PhaseAngle::ZERO,
            phi2: PhaseAngle::ZERO,
            phi3: PhaseAngle::ZERO,
            phi5: PhaseAngle::ZERO,
            phi7: PhaseAngle::ZERO,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeductionConfig {
    pub conventions: Conventions,
    pub handedness: Chirality,
    pub tolerance: f64,
}

impl Default for DeductionConfig {
    fn default() -> Self {
        DeductionConfig {
            conventions: Conventions::default(),
            handedness: Chirality::RightHanded,
            tolerance: EPS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeductionStep {
    pub name: String,
    /// Topic the step belongs to.
    pub section: String,
    pub constraint: String,
    pub family_before: BTreeMap<String, PhaseFamily>,
    pub family_after: BTreeMap<String, PhaseFamily>,
    pub conventions: BTreeMap<String, PhaseAngle>,
    pub states: BTreeMap<String, SpinState>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalStates {
    pub x_up: SpinState,
    pub x_down: SpinState,
    pub y_up: SpinState,
    pub y_down: SpinState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeductionReport {
    pub steps: Vec<DeductionStep>,
    pub final_states: FinalStates,
    pub chirality: Chirality,
    /// Sign of `[S_x, S_y] = s·i·S_z` for the candidate that was not chosen.
    pub rejected_commutator_sign: i8,
    pub verification: Vec<Check>,
}

impl DeductionReport {
    pub fn all_checks_pass(&self) -> bool {
        self.verification.iter().all(|c| c.passed)
    }
}

fn conv(pairs: &[(&str, PhaseAngle)]) -> BTreeMap<String, PhaseAngle> {
    pairs.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect()
}

fn fams(pairs: &[(&str, &PhaseFamily)]) -> BTreeMap<String, PhaseFamily> {
    pairs.iter().map(|(k, v)| ((*k).to_owned(), (*v).clone())).collect()
}

fn states(pairs: &[(&str, SpinState)]) -> BTreeMap<String, SpinState> {
    pairs.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect()
}

/// Runs the whole deduction with the standard conventions.
pub fn deduce_all() -> Result<DeductionReport> {
    deduce_with(&DeductionConfig::default())
}

pub fn deduce_with(config: &DeductionConfig) -> Result<DeductionReport> {
    let c = &config.conventions;
    let tol = config.tolerance;
    let s_z = spin_operator(AxisLabel::Z);
    let mut steps = Vec::with_capacity(5);

    // x_up: unbiased with respect to z.
    let x_up_family = enforce_unbiased(&Ansatz::general("phi1", "phi2"), AxisLabel::Z)?;
    steps.push(DeductionStep {
        name: "x-unbiased".into(),
        section: "orthogonality".into(),
        constraint: "<x_up|S_z|x_up> = (|A|^2 - |B|^2)/2 = 0 with |A|^2 + |B|^2 = 1, so |A| = |B| = 1/sqrt(2)".into(),
        family_before: BTreeMap::new(),
        family_after: fams(&[("x_up", &x_up_family)]),
        conventions: BTreeMap::new(),
        states: BTreeMap::new(),
    });

    let x_conv = conv(&[("phi1", c.phi1), ("phi2", c.phi2)]);
    let x_up = fix_convention(&x_up_family, &x_conv)?;
    steps.push(DeductionStep {
        name: "x-convention".into(),
        section: "orthogonality".into(),
        constraint: "overall phase and direction of x within the equatorial plane are free choices".into(),
        family_before: fams(&[("x_up", &x_up_family)]),
        family_after: fams(&[("x_up", &x_up_family.assign(&x_conv))]),
        conventions: x_conv,
        states: states(&[("x_up", x_up)]),
    });

    // x_down: unbiased, and orthogonal to x_up in Hilbert space.
    let x_down_free = enforce_unbiased(&Ansatz::general("phi3", "phi4"), AxisLabel::Z)?;
    let x_down_family = enforce_hilbert_orthogonal(&x_down_free, &x_up)?;
    let x_down_conv = conv(&[("phi3", c.phi3)]);
    let x_down = fix_convention(&x_down_family, &x_down_conv)?;
    steps.push(DeductionStep {
        name: "x-down-orthogonality".into(),
        section: "linear-independence".into(),
        constraint: "<x_up|x_down> = 0 fixes the phase difference of x_down".into(),
        family_before: fams(&[("x_down", &x_down_free)]),
        family_after: fams(&[("x_down", &x_down_family)]),
        conventions: x_down_conv,
        states: states(&[("x_down", x_down)]),
    });

    // y candidates: unbiased with respect to z and to the x just built.
    let s_x = basis_operator(&x_up, &x_down)?;
    let y = derive_y_candidates(&s_x, c.phi5, c.phi7)?;
    steps.push(DeductionStep {
        name: "y-candidates".into(),
        section: "y-basis".into(),
        constraint: "<y_up|S_x|y_up> = 0 leaves two relative phases; <y_up|y_down> = 0 fixes each partner".into(),
        family_before: fams(&[("y_up", &y.up_family), ("y_down", &y.down_family)]),
        family_after: fams(&[
            ("y_up_upper", &y.upper_families.0),
            ("y_down_upper", &y.upper_families.1),
            ("y_up_lower", &y.lower_families.0),
            ("y_down_lower", &y.lower_families.1),
        ]),
        conventions: conv(&[("phi5", c.phi5), ("phi7", c.phi7)]),
        states: states(&[
            ("y_up_upper", y.pair.upper.y_up),
            ("y_down_upper", y.pair.upper.y_down),
            ("y_up_lower", y.pair.lower.y_up),
            ("y_down_lower", y.pair.lower.y_down),
        ]),
    });

    // Handedness from the commutator sign.
    let choice = select_handedness_with(&y.pair, &s_x, &s_z, config.handedness, tol)?;
    let chosen_families = if choice.chosen == y.pair.upper {
        &y.upper_families
    } else {
        &y.lower_families
    };
    steps.push(DeductionStep {
        name: "handedness".into(),
        section: "coordinate-system-handedness".into(),
        constraint: format!(
            "[S_x, S_y] = {}i S_z selects the {} candidate",
            if config.handedness.sign() > 0 { "+" } else { "-" },
            config.handedness.as_str()
        ),
        family_before: fams(&[("y_up_upper", &y.upper_families.0), ("y_up_lower", &y.lower_families.0)]),
        family_after: fams(&[("y_up", &chosen_families.0), ("y_down", &chosen_families.1)]),
        conventions: BTreeMap::new(),
        states: states(&[("y_up", choice.chosen.y_up), ("y_down", choice.chosen.y_down)]),
    });

    let final_states = FinalStates {
        x_up,
        x_down,
        y_up: choice.chosen.y_up,
        y_down: choice.chosen.y_down,
    };
    let verification = verify(&final_states, config.handedness, tol)?;
    Ok(DeductionReport {
        steps,
        final_states,
        chirality: choice.chirality,
        rejected_commutator_sign: choice.rejected_sign,
        verification,
    })
}

fn verify(f: &FinalStates, handedness: Chirality, tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut push = |name: String, residual: f64| {
        out.push(Check {
            check: name,
            passed: residual <= tol,
            residual,
        });
    };
    let named = [
        ("x_up", &f.x_up),
        ("x_down", &f.x_down),
        ("y_up", &f.y_up),
        ("y_down", &f.y_down),
    ];
    let s_z = spin_operator(AxisLabel::Z);
    let s_x = basis_operator(&f.x_up, &f.x_down)?;
    let s_y = basis_operator(&f.y_up, &f.y_down)?;

    for (n, s) in named {
        push(format!("normalized:{n}"), (s.norm_sqr() - 1.0).abs());
    }
    for (n, s) in named {
        push(format!("unbiased_z:{n}"), expectation(&s_z, s)?.abs());
    }
    for (n, s) in &named[2..] {
        push(format!("unbiased_x:{n}"), expectation(&s_x, s)?.abs());
    }
    push("orthogonal:x".into(), inner_product(&f.x_up, &f.x_down).norm());
    push("orthogonal:y".into(), inner_product(&f.y_up, &f.y_down).norm());
    let id = SpinOperator::identity();
    let up_z = SpinState::up_z();
    let down_z = SpinState::down_z();
    for (n, u, d) in [
        ("x", &f.x_up, &f.x_down),
        ("y", &f.y_up, &f.y_down),
        ("z", &up_z, &down_z),
    ] {
        let sum = projector(u)? + projector(d)?;
        push(format!("completeness:{n}"), sum.max_abs_diff(&id));
    }
    let s = Complex64::new(0.0, handedness.sign() as f64);
    for (n, a, b, c) in [
        ("commutator:[Sx,Sy]", &s_x, &s_y, &s_z),
        ("commutator:[Sy,Sz]", &s_y, &s_z, &s_x),
        ("commutator:[Sz,Sx]", &s_z, &s_x, &s_y),
    ] {
        push(n.to_owned(), commutator(a, b).max_abs_diff(&c.scale(s)));
    }
    push(
        "commutator:[Sz,Sz]".into(),
        commutator(&s_z, &s_z).max_abs_diff(&SpinOperator::zero()),
    );
    Ok(out)
}

/// The standard right-handed x and y bases and the S_y they define.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalBasis {
    pub x_up: SpinState,
    pub x_down: SpinState,
    pub y_up: SpinState,
    pub y_down: SpinState,
    pub s_y: SpinOperator,
}

/// Result of [`deduce_all`], computed once.
pub fn canonical_basis() -> &'static CanonicalBasis {
    static BASIS: OnceLock<CanonicalBasis> = OnceLock::new();
    BASIS.get_or_init(|| {
        let r = deduce_all().expect("default deduction succeeds");
        let f = r.final_states;
        CanonicalBasis {
            x_up: f.x_up,
            x_down: f.x_down,
            y_up: f.y_up,
            y_down: f.y_down,
            s_y: basis_operator(&f.y_up, &f.y_down).expect("deduced y states are normalized"),
        }
    })
}
