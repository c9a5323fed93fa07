//! Two-dimensional Hilbert space of a spin-1/2 particle.
//!
//! States and operators are written over the ordered z basis
//! `{|up_z>, |down_z>}`; matrices are stored row-major in that order.
//! All spin values are in units of ħ (ħ = 1).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::deduction;
use crate::error::{Error, Result};
use crate::phase::PhaseAngle;

/// Default equality tolerance for all floating point checks.
pub const EPS: f64 = 1e-12;

/// A complex amplitude. Only finite values are ever constructed.
pub type ComplexAmplitude = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);

/// Absolute tolerance used by the checks that accept one explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance(pub f64);

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(EPS)
    }
}

pub(crate) mod amp_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: c.re, im: c.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let v = ReIm::deserialize(d)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(serde::de::Error::custom("amplitude must be finite"));
        }
        Ok(Complex64::new(v.re, v.im))
    }
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// `a|up_z> + b|down_z>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState {
    a: Complex64,
    b: Complex64,
    normalized: bool,
}

impl SpinState {
    /// Builds a state from its z-basis amplitudes. The normalized flag is set
    /// when `|a|^2 + |b|^2` is within [`EPS`] of one.
    ///
    /// Panics on non-finite amplitudes.
    pub fn new(a: Complex64, b: Complex64) -> Self {
        assert!(a.is_finite() && b.is_finite(), "spin state amplitudes must be finite");
        let n = a.norm_sqr() + b.norm_sqr();
        SpinState {
            a,
            b,
            normalized: (n - 1.0).abs() <= EPS,
        }
    }

    pub fn from_real(a: f64, b: f64) -> Self {
        SpinState::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn up_z() -> Self {
        SpinState::new(ONE, ZERO)
    }

    pub fn down_z() -> Self {
        SpinState::new(ZERO, ONE)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized {
                norm_sq: self.norm_sqr(),
            })
        }
    }

    /// Multiplies both amplitudes by `c`.
    pub fn scale(&self, c: Complex64) -> SpinState {
        SpinState::new(self.a * c, self.b * c)
    }

    /// Component-wise equality within `tol` (no global phase freedom).
    pub fn approx_eq(&self, other: &SpinState, tol: f64) -> bool {
        (self.a - other.a).norm() <= tol && (self.b - other.b).norm() <= tol
    }
}

impl fmt::Display for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}{:+}i)|up_z> + ({}{:+}i)|down_z>",
            self.a.re, self.a.im, self.b.re, self.b.im
        )
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    #[serde(with = "amp_serde")]
    a: Complex64,
    #[serde(with = "amp_serde")]
    b: Complex64,
}

impl Serialize for SpinState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr { a: self.a, b: self.b }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpinState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = StateRepr::deserialize(d)?;
        Ok(SpinState::new(r.a, r.b))
    }
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// A 2×2 complex matrix over the z basis, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinOperator {
    m: [[Complex64; 2]; 2],
    hermitian: bool,
}

impl SpinOperator {
    /// An operator with the hermitian flag unset.
    pub fn general(m: [[Complex64; 2]; 2]) -> Self {
        SpinOperator { m, hermitian: false }
    }

    /// An observable; fails unless `m` equals its conjugate transpose within [`EPS`].
    pub fn observable(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let op = SpinOperator::general(m);
        if op.max_abs_diff(&op.dagger()) <= EPS {
            Ok(SpinOperator { m, hermitian: true })
        } else {
            Err(Error::NonHermitianObservable)
        }
    }

    pub fn zero() -> Self {
        SpinOperator {
            m: [[ZERO; 2]; 2],
            hermitian: true,
        }
    }

    pub fn identity() -> Self {
        SpinOperator {
            m: [[ONE, ZERO], [ZERO, ONE]],
            hermitian: true,
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dagger(&self) -> SpinOperator {
        let m = self.m;
        SpinOperator {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, c: Complex64) -> SpinOperator {
        let m = self.m;
        SpinOperator {
            m: [[m[0][0] * c, m[0][1] * c], [m[1][0] * c, m[1][1] * c]],
            hermitian: self.hermitian && c.im == 0.0,
        }
    }

    /// `op|psi>` as a raw amplitude pair.
    pub fn apply(&self, psi: &SpinState) -> (Complex64, Complex64) {
        let m = self.m;
        (m[0][0] * psi.a + m[0][1] * psi.b, m[1][0] * psi.a + m[1][1] * psi.b)
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &SpinOperator) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        d
    }

    pub fn approx_eq(&self, other: &SpinOperator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Eigenvalues of a hermitian operator, larger first.
    pub fn eigenvalues(&self) -> Result<(f64, f64)> {
        if !self.hermitian {
            return Err(Error::NonHermitianObservable);
        }
        let (p, q) = (self.m[0][0].re, self.m[1][1].re);
        let mean = 0.5 * (p + q);
        let radius = (0.25 * (p - q) * (p - q) + self.m[0][1].norm_sqr()).sqrt();
        Ok((mean + radius, mean - radius))
    }
}

impl Add for SpinOperator {
    type Output = SpinOperator;
    fn add(self, rhs: SpinOperator) -> SpinOperator {
        let mut m = self.m;
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v += rhs.m[r][c];
            }
        }
        SpinOperator {
            m,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Sub for SpinOperator {
    type Output = SpinOperator;
    fn sub(self, rhs: SpinOperator) -> SpinOperator {
        self + rhs.scale(-ONE)
    }
}

impl Mul for SpinOperator {
    type Output = SpinOperator;
    fn mul(self, rhs: SpinOperator) -> SpinOperator {
        let (a, b) = (self.m, rhs.m);
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        SpinOperator::general(m)
    }
}

#[derive(Serialize)]
struct OperatorRepr {
    matrix: [[AmpRef; 2]; 2],
    hermitian: bool,
}

#[derive(Serialize, Clone, Copy)]
struct AmpRef {
    re: f64,
    im: f64,
}

impl Serialize for SpinOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let a = |c: Complex64| AmpRef { re: c.re, im: c.im };
        let m = self.m;
        OperatorRepr {
            matrix: [[a(m[0][0]), a(m[0][1])], [a(m[1][0]), a(m[1][1])]],
            hermitian: self.hermitian,
        }
        .serialize(s)
    }
}

// ---------------------------------------------------------------------------
// Axes
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisLabel {
    X,
    Y,
    Z,
}

impl AxisLabel {
    pub const ALL: [AxisLabel; 3] = [AxisLabel::X, AxisLabel::Y, AxisLabel::Z];

    pub fn as_str(self) -> &'static str {
        match self {
            AxisLabel::X => "x",
            AxisLabel::Y => "y",
            AxisLabel::Z => "z",
        }
    }

    /// Polar and azimuthal angles of the labeled axis.
    pub fn direction(self) -> (f64, f64) {
        match self {
            AxisLabel::X => (PI / 2.0, 0.0),
            AxisLabel::Y => (PI / 2.0, PI / 2.0),
            AxisLabel::Z => (0.0, 0.0),
        }
    }
}

impl fmt::Display for AxisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A measurement axis: one of the labeled axes or a direction on the sphere.
///
/// Serializes as `"x"` or `{"theta": .., "phi": ..}`; see [`crate::notation`]
/// for the accepted input forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Axis {
    Label(AxisLabel),
    Direction { theta: f64, phi: f64 },
}

impl Axis {
    /// A direction with polar angle in [0, π]; the azimuth is wrapped into [0, 2π).
    pub fn direction(theta: f64, phi: f64) -> Result<Axis> {
        if !(theta.is_finite() && phi.is_finite()) || !(0.0..=PI).contains(&theta) {
            return Err(Error::Usage(format!(
                "invalid axis direction (theta={theta}, phi={phi}); theta must lie in [0, pi]"
            )));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Axis::Direction { theta, phi })
    }

    pub fn angles(&self) -> (f64, f64) {
        match *self {
            Axis::Label(l) => l.direction(),
            Axis::Direction { theta, phi } => (theta, phi),
        }
    }

    pub fn operator(&self) -> SpinOperator {
        match *self {
            Axis::Label(l) => spin_operator(l),
            Axis::Direction { theta, phi } => axis_operator(theta, phi),
        }
    }

    /// The (up, down) eigenstates of the spin component along this axis.
    ///
    /// Labeled axes return the canonical deduced basis states.
    pub fn eigenstates(&self) -> (SpinState, SpinState) {
        match *self {
            Axis::Label(AxisLabel::Z) => (SpinState::up_z(), SpinState::down_z()),
            Axis::Label(AxisLabel::X) => {
                let b = deduction::canonical_basis();
                (b.x_up, b.x_down)
            }
            Axis::Label(AxisLabel::Y) => {
                let b = deduction::canonical_basis();
                (b.y_up, b.y_down)
            }
            Axis::Direction { theta, phi } => {
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let e = Complex64::new(phi.cos(), phi.sin());
                (
                    SpinState::new(Complex64::new(c, 0.0), e * s),
                    SpinState::new(Complex64::new(s, 0.0), -e * c),
                )
            }
        }
    }
}

impl From<AxisLabel> for Axis {
    fn from(l: AxisLabel) -> Self {
        Axis::Label(l)
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// `<bra|ket>`.
pub fn inner_product(bra: &SpinState, ket: &SpinState) -> Complex64 {
    bra.a.conj() * ket.a + bra.b.conj() * ket.b
}

/// `<psi|op|psi>` for a hermitian operator and a normalized state.
pub fn expectation(op: &SpinOperator, psi: &SpinState) -> Result<f64> {
    if !op.hermitian {
        return Err(Error::NonHermitianObservable);
    }
    psi.require_normalized()?;
    let (a, b) = op.apply(psi);
    let v = psi.a.conj() * a + psi.b.conj() * b;
    debug_assert!(
        v.im.abs() < 1e-9,
        "expectation of a hermitian operator has Im = {}",
        v.im
    );
    Ok(v.re)
}

/// `ab - ba`, with the hermitian flag unset.
pub fn commutator(a: &SpinOperator, b: &SpinOperator) -> SpinOperator {
    let c = (*a * *b) - (*b * *a);
    SpinOperator::general(c.m)
}

/// `|psi><psi|`.
pub fn projector(psi: &SpinState) -> Result<SpinOperator> {
    psi.require_normalized()?;
    Ok(outer(psi, psi).with_hermitian())
}

fn outer(ket: &SpinState, bra: &SpinState) -> SpinOperator {
    SpinOperator::general([
        [ket.a * bra.a.conj(), ket.a * bra.b.conj()],
        [ket.b * bra.a.conj(), ket.b * bra.b.conj()],
    ])
}

impl SpinOperator {
    fn with_hermitian(mut self) -> Self {
        self.hermitian = true;
        self
    }
}

/// The spin component whose eigenstates are `up` (value +1/2) and `down` (−1/2):
/// `(|up><up| - |down><down|) / 2`.
pub fn basis_operator(up: &SpinState, down: &SpinState) -> Result<SpinOperator> {
    let p = projector(up)? - projector(down)?;
    Ok(p.scale(HALF))
}

/// S_x, S_y or S_z in units of ħ.
///
/// S_z and S_x are the fixed matrices; S_y is assembled from the deduced
/// right-handed y basis.
pub fn spin_operator(axis: AxisLabel) -> SpinOperator {
    match axis {
        AxisLabel::Z => SpinOperator {
            m: [[HALF, ZERO], [ZERO, -HALF]],
            hermitian: true,
        },
        AxisLabel::X => SpinOperator {
            m: [[ZERO, HALF], [HALF, ZERO]],
            hermitian: true,
        },
        AxisLabel::Y => deduction::canonical_basis().s_y,
    }
}

/// `n·S` for the unit vector with polar angle `theta` and azimuth `phi`.
pub fn axis_operator(theta: f64, phi: f64) -> SpinOperator {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let c = |x: f64| Complex64::new(x, 0.0);
    spin_operator(AxisLabel::X).scale(c(st * cp))
        + spin_operator(AxisLabel::Y).scale(c(st * sp))
        + spin_operator(AxisLabel::Z).scale(c(ct))
}

/// `(2<S_x>, 2<S_y>, 2<S_z>)`.
pub fn bloch_vector(psi: &SpinState) -> Result<[f64; 3]> {
    psi.require_normalized()?;
    let mut v = [0.0; 3];
    for (slot, label) in v.iter_mut().zip(AxisLabel::ALL) {
        *slot = 2.0 * expectation(&spin_operator(label), psi)?;
    }
    Ok(v)
}

/// `(|up_z> + e^{i theta}|down_z>) / sqrt 2`, a state on the equator of the Bloch sphere.
pub fn equatorial_state(theta: PhaseAngle) -> SpinState {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    SpinState::new(h, h * theta.unit())
}

/// Whether two normalized states differ only by a global phase.
pub fn same_ray(a: &SpinState, b: &SpinState) -> Result<bool> {
    same_ray_within(a, b, EPS)
}

pub fn same_ray_within(a: &SpinState, b: &SpinState, tol: f64) -> Result<bool> {
    a.require_normalized()?;
    b.require_normalized()?;
    Ok((inner_product(a, b).norm() - 1.0).abs() <= tol)
}

/// Rescales to unit norm.
pub fn normalize(psi: &SpinState) -> Result<SpinState> {
    let n = psi.norm_sqr().sqrt();
    if n.is_nan() || n < 1e-300 {
        return Err(Error::ZeroVector);
    }
    let s = SpinState::new(psi.a / n, psi.b / n);
    Ok(SpinState { normalized: true, ..s })
}
