//! Command line and HTTP front-ends for `spinbasis`.
//!
//! Both front-ends translate their input into a JSON options object, build a
//! [`CommandRequest`] through [`request_from_json`] and serialize the
//! resulting envelope with [`ApiEnvelope::to_json`]. The JSON printed by
//! `--json` is therefore byte-identical to the HTTP response body.

pub mod args;
pub mod http;
pub mod render;

use serde_json::Value;
use spinbasis::api::{execute_command, request_from_json, ApiEnvelope};

/// Validates `options` for `command` and runs it.
pub fn dispatch(command: &str, options: Value) -> ApiEnvelope {
    match request_from_json(command, options) {
        Ok(req) => execute_command(&req),
        Err(e) => ApiEnvelope::failure(&e),
    }
}
