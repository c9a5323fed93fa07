//! Text forms for states, axes and analyzer stages.
//!
//! ```text
//! state  := "z+" | "z-" | "x+" | "x-" | "y+" | "y-"
//!         | "equatorial:" angle
//!         | re "," im ";" re "," im
//! axis   := "x" | "y" | "z" | "n(" angle "," angle ")"      polar, azimuth
//! stage  := axis ":" ("up" | "down")
//! stages := stage ("," stage)*
//! ```
//!
//! Angles use the [`PhaseAngle`] grammar (`pi/3`, `-pi/2`, `0.25`, ...).

use num_complex::Complex64;
use serde::{Deserialize, Deserializer};

use crate::deduction::canonical_basis;
use crate::error::{Error, Result};
use crate::measurement::{Port, Stage};
use crate::phase::{parse_radians, PhaseAngle};
use crate::spin::{equatorial_state, Axis, AxisLabel, SpinState};

pub const STATE_TOKENS: [&str; 6] = ["z+", "z-", "x+", "x-", "y+", "y-"];

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

/// One of the six named basis states.
pub fn named_state(token: &str) -> Option<SpinState> {
    let b = canonical_basis();
    Some(match token {
        "z+" => SpinState::up_z(),
        "z-" => SpinState::down_z(),
        "x+" => b.x_up,
        "x-" => b.x_down,
        "y+" => b.y_up,
        "y-" => b.y_down,
        _ => return None,
    })
}

/// Parses a state string. The result is not required to be normalized.
pub fn parse_state(s: &str) -> Result<SpinState> {
    let t = s.trim();
    if let Some(state) = named_state(t) {
        return Ok(state);
    }
    if let Some(angle) = t.strip_prefix("equatorial:") {
        let a: PhaseAngle = angle.parse()?;
        return Ok(equatorial_state(a));
    }
    let (first, second) = t
        .split_once(';')
        .ok_or_else(|| usage(format!("malformed state `{s}`: expected a token or `re,im;re,im`")))?;
    let amp = |part: &str| -> Result<Complex64> {
        let (re, im) = part
            .split_once(',')
            .ok_or_else(|| usage(format!("malformed amplitude `{part}` in state `{s}`")))?;
        let num = |x: &str| -> Result<f64> {
            let v: f64 = x
                .trim()
                .parse()
                .map_err(|_| usage(format!("malformed number `{x}` in state `{s}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(usage(format!("non-finite number in state `{s}`")))
            }
        };
        Ok(Complex64::new(num(re)?, num(im)?))
    };
    Ok(SpinState::new(amp(first)?, amp(second)?))
}

/// The raw `re,im;re,im` form, with shortest round-trip decimals.
pub fn format_state(s: &SpinState) -> String {
    let (a, b) = (s.a(), s.b());
    format!("{},{};{},{}", a.re, a.im, b.re, b.im)
}

/// The token naming `s` if it is bit-identical to a named basis state.
pub fn state_token(s: &SpinState) -> Option<&'static str> {
    STATE_TOKENS.into_iter().find(|t| {
        named_state(t)
            .map(|n| n.a() == s.a() && n.b() == s.b())
            .unwrap_or(false)
    })
}

pub fn parse_axis(s: &str) -> Result<Axis> {
    let t = s.trim();
    match t {
        "x" => return Ok(Axis::Label(AxisLabel::X)),
        "y" => return Ok(Axis::Label(AxisLabel::Y)),
        "z" => return Ok(Axis::Label(AxisLabel::Z)),
        _ => {}
    }
    let inner = t
        .strip_prefix("n(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| usage(format!("malformed axis `{s}`: expected x, y, z or n(theta,phi)")))?;
    let (theta, phi) = inner
        .split_once(',')
        .ok_or_else(|| usage(format!("malformed axis `{s}`: expected n(theta,phi)")))?;
    Axis::direction(parse_radians(theta)?, parse_radians(phi)?)
}

pub fn format_axis(a: &Axis) -> String {
    match a {
        Axis::Label(l) => l.as_str().to_owned(),
        Axis::Direction { theta, phi } => format!("n({theta:?},{phi:?})"),
    }
}

pub fn parse_port(s: &str) -> Result<Port> {
    match s.trim() {
        "up" | "+" => Ok(Port::Up),
        "down" | "-" => Ok(Port::Down),
        other => Err(usage(format!("malformed port `{other}`: expected up or down"))),
    }
}

pub fn parse_stage(s: &str) -> Result<Stage> {
    let (axis, port) = s
        .trim()
        .rsplit_once(':')
        .ok_or_else(|| usage(format!("malformed stage `{s}`: expected axis:port")))?;
    Ok(Stage {
        axis: parse_axis(axis)?,
        port: parse_port(port)?,
    })
}

pub fn format_stage(s: &Stage) -> String {
    format!("{}:{}", format_axis(&s.axis), s.port.as_str())
}

/// Splits on commas outside parentheses.
pub fn parse_stages(s: &str) -> Result<Vec<Stage>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(parse_stage(&s[start..i])?);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() || !out.is_empty() {
        out.push(parse_stage(&s[start..])?);
    }
    Ok(out)
}

impl<'de> Deserialize<'de> for Axis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Dir { theta: f64, phi: f64 },
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => parse_axis(&s).map_err(serde::de::Error::custom),
            Repr::Dir { theta, phi } => Axis::direction(theta, phi).map_err(serde::de::Error::custom),
        }
    }
}
