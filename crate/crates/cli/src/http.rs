//! JSON-over-HTTP service.
//!
//! Every response body is an `ApiEnvelope`. Handlers are pure functions of
//! the request, so the router holds no state.

use axum::body::Bytes;
use axum::extract::Path;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde_json::Value;
use spinbasis::api::ApiEnvelope;
use spinbasis::Error;

use crate::dispatch;

/// Commands reachable with `POST /api/<command>`.
pub const POST_COMMANDS: [&str; 6] = ["deduce", "probabilities", "measure", "chain", "commutator", "bloch"];

pub fn router() -> Router {
    Router::new()
        .route("/api/version", get(|| run("version", Value::Null)))
        .route("/api/basis", get(|| run("basis", Value::Null)))
        .route("/api/{command}", post(post_command).options(preflight))
        .fallback(not_found)
        .layer(axum::middleware::map_response(allow_any_origin))
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}

async fn post_command(Path(command): Path<String>, body: Bytes) -> Response {
    if !POST_COMMANDS.contains(&command.as_str()) {
        return not_found().await;
    }
    let options = if body.iter().all(u8::is_ascii_whitespace) {
        // An empty body means "all defaults", which only some commands accept.
        Value::Object(Default::default())
    } else {
        match serde_json::from_slice::<Value>(&body) {
            Ok(v) => v,
            Err(e) => return reply(ApiEnvelope::failure(&Error::Usage(format!("invalid JSON body: {e}")))),
        }
    };
    run(&command, options).await
}

async fn run(command: &str, options: Value) -> Response {
    let command = command.to_owned();
    match tokio::task::spawn_blocking(move || dispatch(&command, options)).await {
        Ok(env) => reply(env),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

fn reply(env: ApiEnvelope) -> Response {
    let status = StatusCode::from_u16(env.http_status()).expect("envelope statuses are valid");
    (status, [(header::CONTENT_TYPE, "application/json")], env.to_json()).into_response()
}

async fn not_found() -> Response {
    let mut r = reply(ApiEnvelope::failure(&Error::Usage("unknown endpoint".into())));
    *r.status_mut() = StatusCode::NOT_FOUND;
    r
}

async fn preflight() -> StatusCode {
    StatusCode::NO_CONTENT
}

async fn allow_any_origin(mut r: Response) -> Response {
    let h = r.headers_mut();
    h.insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    h.insert(
        header::ACCESS_CONTROL_ALLOW_METHODS,
        HeaderValue::from_str(&format!("{}, {}, {}", Method::GET, Method::POST, Method::OPTIONS))
            .expect("method names are valid header text"),
    );
    h.insert(
        header::ACCESS_CONTROL_ALLOW_HEADERS,
        HeaderValue::from_static("content-type"),
    );
    r
}
