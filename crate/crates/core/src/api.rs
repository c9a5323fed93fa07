//! Command layer shared by the CLI and the HTTP service.
//!
//! Every command maps to one [`CommandRequest`] variant and produces an
//! [`ApiEnvelope`]. Both front-ends serialize the envelope with
//! [`ApiEnvelope::to_json`], so their payloads are byte-identical for the
//! same request.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::deduction::{deduce_with, Chirality, Conventions, DeductionConfig};
use crate::error::{Error, Result};
use crate::measurement::{self, measure_once, probabilities, run_chain, ChainSpec, Preparation};
use crate::notation::{self, STATE_TOKENS};
use crate::spin::{basis_operator, bloch_vector, commutator, spin_operator, Axis, AxisLabel, SpinState, EPS};
use crate::weyl::{self, verify_orbital_commutator, Handedness};

/// Version reported in every envelope.
pub const API_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeduceOptions {
    pub conventions: Conventions,
    pub handedness: Option<Handedness>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilitiesOptions {
    pub state: Preparation,
    pub axis: Axis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureOptions {
    pub state: Preparation,
    pub axis: Axis,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    Spin,
    Orbital,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutatorOptions {
    pub algebra: Algebra,
    #[serde(default = "right")]
    pub handedness: Handedness,
    /// Optional operands for an arbitrary orbital commutator `[a, b]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
}

fn right() -> Handedness {
    Handedness::Right
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochOptions {
    pub state: Preparation,
}

/// A validated command with its options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "options", rename_all = "snake_case")]
pub enum CommandRequest {
    Version,
    Basis,
    Deduce(DeduceOptions),
    Probabilities(ProbabilitiesOptions),
    Measure(MeasureOptions),
    Chain(ChainSpec),
    Commutator(CommutatorOptions),
    Bloch(BlochOptions),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApiEnvelope {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ApiError>,
    pub version: String,
}

impl ApiEnvelope {
    pub fn success(result: Value) -> Self {
        ApiEnvelope {
            ok: true,
            result: Some(result),
            error: None,
            version: API_VERSION.to_owned(),
        }
    }

    pub fn failure(err: &Error) -> Self {
        ApiEnvelope {
            ok: false,
            result: None,
            error: Some(ApiError {
                code: err.code().to_owned(),
                message: err.to_string(),
                position: err.position(),
            }),
            version: API_VERSION.to_owned(),
        }
    }

    pub fn is_usage_error(&self) -> bool {
        self.error.as_ref().is_some_and(|e| e.code == "usage_error")
    }

    /// 0 on success, 1 on a domain error, 2 on a usage error.
    pub fn exit_code(&self) -> i32 {
        match (self.ok, self.is_usage_error()) {
            (true, _) => 0,
            (false, false) => 1,
            (false, true) => 2,
        }
    }

    /// 200 on success, 400 on a usage error, 422 on a domain error.
    pub fn http_status(&self) -> u16 {
        match (self.ok, self.is_usage_error()) {
            (true, _) => 200,
            (false, true) => 400,
            (false, false) => 422,
        }
    }

    /// Compact JSON, the wire format of both front-ends.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("envelope serializes")
    }
}

/// Runs a command and wraps the outcome.
pub fn execute_command(req: &CommandRequest) -> ApiEnvelope {
    match run(req) {
        Ok(v) => ApiEnvelope::success(v),
        Err(e) => ApiEnvelope::failure(&e),
    }
}

/// Builds a request from a command name and its JSON options, reporting
/// malformed options as usage errors.
pub fn request_from_json(command: &str, options: Value) -> Result<CommandRequest> {
    let body = json!({ "command": command, "options": options });
    let body = match command {
        "version" | "basis" => json!({ "command": command }),
        _ => body,
    };
    serde_json::from_value(body).map_err(|e| Error::Usage(format!("invalid {command} options: {e}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn state_json(s: &SpinState) -> Value {
    json!({ "a": amp(s.a()), "b": amp(s.b()), "text": notation::format_state(s) })
}

fn amp(c: Complex64) -> Value {
    json!({ "re": c.re, "im": c.im })
}

fn run(req: &CommandRequest) -> Result<Value> {
    match req {
        CommandRequest::Version => Ok(json!({ "name": env!("CARGO_PKG_NAME"), "version": API_VERSION })),
        CommandRequest::Basis => basis(),
        CommandRequest::Deduce(o) => {
            let config = DeductionConfig {
                conventions: o.conventions,
                handedness: chirality(o.handedness.unwrap_or(Handedness::Right)),
                tolerance: tolerance(o.tolerance)?,
            };
            Ok(to_value(&deduce_with(&config)?))
        }
        CommandRequest::Probabilities(o) => {
            let psi = o.state.resolve()?;
            let (p_up, p_down) = probabilities(&psi, &o.axis)?;
            Ok(json!({
                "state": state_json(&psi),
                "axis": to_value(&o.axis),
                "p_up": p_up,
                "p_down": p_down,
            }))
        }
        CommandRequest::Measure(o) => {
            let psi = o.state.resolve()?;
            let mut rng = measurement::seeded_rng(o.seed);
            let out = measure_once(&psi, &o.axis, &mut rng)?;
            Ok(json!({
                "state": state_json(&psi),
                "axis": to_value(&o.axis),
                "seed": o.seed,
                "port": out.port,
                "value": out.value,
                "probability": out.probability,
                "post_state": state_json(&out.post_state),
            }))
        }
        CommandRequest::Chain(spec) => Ok(to_value(&run_chain(spec)?)),
        CommandRequest::Commutator(o) => commutator_cmd(o),
        CommandRequest::Bloch(o) => {
            let psi = o.state.resolve()?;
            Ok(json!({ "state": state_json(&psi), "bloch": bloch_vector(&psi)? }))
        }
    }
}

fn chirality(h: Handedness) -> Chirality {
    match h {
        Handedness::Right => Chirality::RightHanded,
        Handedness::Left => Chirality::LeftHanded,
    }
}

fn tolerance(t: Option<f64>) -> Result<f64> {
    match t {
        None => Ok(EPS),
        Some(t) if t.is_finite() && t > 0.0 => Ok(t),
        Some(t) => Err(Error::Usage(format!("tolerance must be a positive number, got {t}"))),
    }
}

fn basis() -> Result<Value> {
    let states = STATE_TOKENS
        .iter()
        .map(|t| {
            let s = notation::named_state(t).expect("listed tokens resolve");
            let mut v = state_json(&s);
            let obj = v.as_object_mut().expect("state_json builds an object");
            obj.shift_insert(0, "token".into(), json!(t));
            obj.insert("bloch".into(), json!(bloch_vector(&s)?));
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "states": states }))
}

fn commutator_cmd(o: &CommutatorOptions) -> Result<Value> {
    match (o.algebra, &o.a, &o.b) {
        (Algebra::Orbital, Some(a), Some(b)) => {
            let (ea, eb) = (weyl::parse(a)?, weyl::parse(b)?);
            let c = weyl::commute(&ea, &eb)?;
            Ok(json!({ "algebra": "orbital", "a": ea, "b": eb, "commutator": c }))
        }
        (_, Some(_), None) | (_, None, Some(_)) => Err(Error::Usage("operands a and b must be given together".into())),
        (Algebra::Spin, Some(_), Some(_)) => Err(Error::Usage(
            "custom operands are only supported for the orbital algebra".into(),
        )),
        (Algebra::Orbital, None, None) => {
            let check = verify_orbital_commutator(o.handedness);
            Ok(json!({
                "algebra": "orbital",
                "handedness": o.handedness,
                "relation": "[Lx,Ly] = sign*i*hbar*Lz",
                "sign": check.sign,
                "commutator": check.commutator,
                "residual": check.residual,
            }))
        }
        (Algebra::Spin, None, None) => {
            let config = DeductionConfig {
                handedness: chirality(o.handedness),
                ..DeductionConfig::default()
            };
            let f = deduce_with(&config)?.final_states;
            let s_x = spin_operator(AxisLabel::X);
            let s_z = spin_operator(AxisLabel::Z);
            let s_y = basis_operator(&f.y_up, &f.y_down)?;
            let c = commutator(&s_x, &s_y);
            let sign = o.handedness.sign();
            let expected = s_z.scale(Complex64::new(0.0, sign as f64));
            Ok(json!({
                "algebra": "spin",
                "handedness": o.handedness,
                "relation": "[Sx,Sy] = sign*i*Sz",
                "sign": sign,
                "y_up": state_json(&f.y_up),
                "y_down": state_json(&f.y_down),
                "commutator": to_value(&c),
                "residual": c.max_abs_diff(&expected),
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(command: &str, options: Value) -> ApiEnvelope {
        match request_from_json(command, options) {
            Ok(r) => execute_command(&r),
            Err(e) => ApiEnvelope::failure(&e),
        }
    }

    #[test]
    fn version_and_basis() {
        let v = exec("version", Value::Null);
        assert!(v.ok);
        assert_eq!(v.result.unwrap()["version"], API_VERSION);
        let b = exec("basis", Value::Null).result.unwrap();
        let states = b["states"].as_array().unwrap();
        assert_eq!(states.len(), 6);
        assert_eq!(states[4]["token"], "y+");
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((states[4]["b"]["im"].as_f64().unwrap() - h).abs() < EPS);
        assert!((states[4]["a"]["re"].as_f64().unwrap() - h).abs() < EPS);
    }

    #[test]
    fn probabilities_command() {
        let e = exec("probabilities", json!({ "state": "z+", "axis": "x" }));
        let r = e.result.unwrap();
        assert!((r["p_up"].as_f64().unwrap() - 0.5).abs() < EPS);
        assert!((r["p_down"].as_f64().unwrap() - 0.5).abs() < EPS);
    }

    #[test]
    fn chain_command() {
        let e = exec(
            "chain",
            json!({ "preparation": "z+", "stages": [{"axis": "x", "port": "up"}, {"axis": "z", "port": "up"}], "shots": 100000, "seed": 42 }),
        );
        let p = e.result.unwrap()["final_probability_exact"].as_f64().unwrap();
        assert!((p - 0.25).abs() < EPS);
    }

    #[test]
    fn zero_shots_is_a_usage_error() {
        let e = exec(
            "chain",
            json!({ "preparation": "z+", "stages": [{"axis": "x", "port": "up"}], "shots": 0, "seed": 1 }),
        );
        assert_eq!(e.http_status(), 400);
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn empty_chain_is_a_domain_error() {
        let e = exec(
            "chain",
            json!({ "preparation": "z+", "stages": [], "shots": 5, "seed": 1 }),
        );
        assert_eq!(e.error.as_ref().unwrap().code, "empty_chain");
        assert_eq!(e.http_status(), 422);
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn orbital_commutator_left() {
        let e = exec("commutator", json!({ "algebra": "orbital", "handedness": "left" }));
        let r = e.result.unwrap();
        assert_eq!(r["sign"], -1);
        assert_eq!(r["residual"], "0");
    }

    #[test]
    fn spin_commutator_both_signs() {
        for (h, s) in [("right", 1), ("left", -1)] {
            let r = exec("commutator", json!({ "algebra": "spin", "handedness": h }))
                .result
                .unwrap();
            assert_eq!(r["sign"], s);
            assert!(r["residual"].as_f64().unwrap() <= EPS);
        }
    }

    #[test]
    fn custom_orbital_operands() {
        let r = exec("commutator", json!({ "algebra": "orbital", "a": "z", "b": "pz" }))
            .result
            .unwrap();
        assert_eq!(r["commutator"], "i*hbar");
        let e = exec("commutator", json!({ "algebra": "orbital", "a": "z*", "b": "pz" }));
        let err = e.error.unwrap();
        assert_eq!(err.code, "syntax_error");
        assert_eq!(err.position, Some(2));
    }

    #[test]
    fn malformed_options_are_usage_errors() {
        for (cmd, opts) in [
            ("probabilities", json!({ "state": "q+", "axis": "x" })),
            ("probabilities", json!({ "state": "z+" })),
            ("bloch", json!({ "state": "z+", "extra": 1 })),
            ("measure", json!({ "state": "z+", "axis": "w", "seed": 1 })),
            ("deduce", json!({ "tolerance": -1.0 })),
            ("teleport", json!({})),
        ] {
            let e = exec(cmd, opts);
            assert_eq!(e.exit_code(), 2, "{cmd}: {:?}", e.error);
        }
    }

    #[test]
    fn unnormalized_state_is_a_domain_error() {
        let e = exec("bloch", json!({ "state": "1,0;1,0" }));
        assert_eq!(e.error.unwrap().code, "not_normalized");
    }

    #[test]
    fn envelope_has_exactly_one_of_result_and_error() {
        let ok: Value = serde_json::from_str(&exec("version", Value::Null).to_json()).unwrap();
        assert!(ok.get("result").is_some() && ok.get("error").is_none());
        let bad: Value = serde_json::from_str(&exec("bloch", json!({})).to_json()).unwrap();
        assert!(bad.get("result").is_none() && bad.get("error").is_some());
    }
}
