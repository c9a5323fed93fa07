//! Phase angles with an exact `(num/den)·π` form alongside free radians.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Largest denominator tried when snapping a float angle onto an exact multiple of π.
const SNAP_MAX_DENOMINATOR: u64 = 12;

/// A phase angle in the canonical range (−π, π].
///
/// `Exact` stores a reduced rational multiple of π. `Free` holds arbitrary
/// radians, typically user supplied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseAngle {
    Exact { num: i64, den: u64 },
    Free(f64),
}

impl PhaseAngle {
    pub const ZERO: PhaseAngle = PhaseAngle::Exact { num: 0, den: 1 };

    /// `(num/den)·π`, reduced and wrapped into (−π, π].
    ///
    /// Panics if `den` is zero.
    pub fn pi_fraction(num: i64, den: u64) -> Self {
        assert!(den > 0, "phase denominator must be positive");
        let den_i = den as i64;
        let g = num.gcd(&den_i).max(1);
        let (mut num, den_i) = (num / g, den_i / g);
        // wrap num/den into (-1, 1]
        let period = 2 * den_i;
        num = num.rem_euclid(period);
        if num > den_i {
            num -= period;
        }
        PhaseAngle::Exact { num, den: den_i as u64 }
    }

    /// Free radians wrapped into (−π, π].
    pub fn radians(r: f64) -> Self {
        if r > -PI && r <= PI {
            return PhaseAngle::Free(r);
        }
        let mut m = r.rem_euclid(TAU);
        if m > PI {
            m -= TAU;
        }
        PhaseAngle::Free(m)
    }

    /// Float radians, snapped to an exact multiple of π when one with a small
    /// denominator lies within `tol`.
    pub fn snap(r: f64, tol: f64) -> Self {
        for den in 1..=SNAP_MAX_DENOMINATOR {
            let num = (r / PI * den as f64).round();
            if (r - num * PI / den as f64).abs() < tol {
                return PhaseAngle::pi_fraction(num as i64, den);
            }
        }
        PhaseAngle::radians(r)
    }

    pub fn to_radians(self) -> f64 {
        match self {
            PhaseAngle::Exact { num, den } => num as f64 * PI / den as f64,
            PhaseAngle::Free(r) => r,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, PhaseAngle::Exact { .. })
    }

    /// e^{iφ}. Multiples of π/4 are produced without trigonometric rounding.
    pub fn unit(self) -> Complex64 {
        if let PhaseAngle::Exact { num, den } = self {
            let eighths = match den {
                1 => Some(num * 4),
                2 => Some(num * 2),
                4 => Some(num),
                _ => None,
            };
            if let Some(k) = eighths {
                let h = FRAC_1_SQRT_2;
                return match k.rem_euclid(8) {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(h, h),
                    2 => Complex64::new(0.0, 1.0),
                    3 => Complex64::new(-h, h),
                    4 => Complex64::new(-1.0, 0.0),
                    5 => Complex64::new(-h, -h),
                    6 => Complex64::new(0.0, -1.0),
                    _ => Complex64::new(h, -h),
                };
            }
        }
        let r = self.to_radians();
        Complex64::new(r.cos(), r.sin())
    }

    /// Equality on the unit circle.
    pub fn approx_eq(self, other: PhaseAngle, tol: f64) -> bool {
        (self.unit() - other.unit()).norm() <= tol
    }
}

impl Default for PhaseAngle {
    fn default() -> Self {
        PhaseAngle::ZERO
    }
}

impl fmt::Display for PhaseAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PhaseAngle::Exact { num: 0, .. } => f.write_str("0"),
            PhaseAngle::Exact { num, den } => {
                match num {
                    1 => {}
                    -1 => f.write_str("-")?,
                    n => write!(f, "{n}")?,
                }
                f.write_str("pi")?;
                if den != 1 {
                    write!(f, "/{den}")?;
                }
                Ok(())
            }
            PhaseAngle::Free(r) => write!(f, "{r:?}"),
        }
    }
}

enum RawAngle {
    PiMultiple(i64, u64),
    Decimal { value: f64, integer: bool },
}

fn parse_raw(s: &str) -> Result<RawAngle, Error> {
    let bad = || Error::Usage(format!("malformed angle `{s}`"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    if let Some(idx) = t.find("pi") {
        let (head, tail) = (&t[..idx], &t[idx + 2..]);
        let head = head.strip_suffix('*').unwrap_or(head);
        let num: i64 = match head {
            "" | "+" => 1,
            "-" => -1,
            h => h.parse().map_err(|_| bad())?,
        };
        let den: u64 = match tail {
            "" => 1,
            _ => {
                let d = tail.strip_prefix('/').ok_or_else(bad)?;
                d.parse().map_err(|_| bad())?
            }
        };
        if den == 0 {
            return Err(bad());
        }
        return Ok(RawAngle::PiMultiple(num, den));
    }
    let integer = t.trim_start_matches(['+', '-']).chars().all(|c| c.is_ascii_digit());
    let value: f64 = t.parse().map_err(|_| bad())?;
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(RawAngle::Decimal { value, integer })
}

/// Parses an angle in the [`PhaseAngle`] grammar to radians without wrapping.
pub fn parse_radians(s: &str) -> Result<f64, Error> {
    Ok(match parse_raw(s)? {
        RawAngle::PiMultiple(num, den) => num as f64 * PI / den as f64,
        RawAngle::Decimal { value, .. } => value,
    })
}

/// Exact when both operands are exact.
impl Add for PhaseAngle {
    type Output = PhaseAngle;
    fn add(self, other: PhaseAngle) -> PhaseAngle {
        match (self, other) {
            (PhaseAngle::Exact { num: n1, den: d1 }, PhaseAngle::Exact { num: n2, den: d2 }) => {
                let l = d1.lcm(&d2);
                PhaseAngle::pi_fraction(n1 * (l / d1) as i64 + n2 * (l / d2) as i64, l)
            }
            _ => PhaseAngle::radians(self.to_radians() + other.to_radians()),
        }
    }
}

impl Neg for PhaseAngle {
    type Output = PhaseAngle;
    fn neg(self) -> PhaseAngle {
        match self {
            PhaseAngle::Exact { num, den } => PhaseAngle::pi_fraction(-num, den),
            PhaseAngle::Free(r) => PhaseAngle::radians(-r),
        }
    }
}

impl Sub for PhaseAngle {
    type Output = PhaseAngle;
    fn sub(self, other: PhaseAngle) -> PhaseAngle {
        self + -other
    }
}

impl FromStr for PhaseAngle {
    type Err = Error;

    /// Accepts `0`, decimal radians (`0.25`, `-1e-3`), or multiples of π in the
    /// forms `pi`, `-pi/2`, `2pi/3`, `2*pi/3`, `3*pi`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match parse_raw(s)? {
            RawAngle::PiMultiple(num, den) => PhaseAngle::pi_fraction(num, den),
            RawAngle::Decimal {
                value: 0.0,
                integer: true,
            } => PhaseAngle::ZERO,
            RawAngle::Decimal { value, .. } => PhaseAngle::radians(value),
        })
    }
}

impl Serialize for PhaseAngle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            PhaseAngle::Exact { .. } => serializer.serialize_str(&self.to_string()),
            PhaseAngle::Free(r) => serializer.serialize_f64(*r),
        }
    }
}

impl<'de> Deserialize<'de> for PhaseAngle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(r) if r.is_finite() => Ok(PhaseAngle::radians(r)),
            Repr::Num(_) => Err(serde::de::Error::custom("angle must be finite")),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
