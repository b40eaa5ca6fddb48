//! HTTP/JSON front end over the cut-tree operations.
//!
//! | method | path           | body                | reply            |
//! |--------|----------------|---------------------|------------------|
//! | GET    | `/health`      |                     | `{"status":"ok"}`|
//! | POST   | `/v1/build`    | `BuildRequest`      | `BuildResponse`  |
//! | POST   | `/v1/query`    | `QueryRequest`      | `QueryResponse`  |
//! | POST   | `/v1/verify`   | `VerifyRequest`     | `VerifyReport`   |
//! | POST   | `/v1/generate` | `GenerateRequest`   | `GenerateResponse` |
//! | POST   | `/v1/bench`    | `{"suite": ...}`    | `BenchReport`    |
//!
//! Failures reply with an `ApiError` carrying the command-line exit code.

use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use surfcut_core::api::{self, ApiError, BenchSuite};
use surfcut_core::Error;

pub struct Failure(StatusCode, ApiError);

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.exit_code() {
            2 => StatusCode::BAD_REQUEST,
            3 | 4 => StatusCode::UNPROCESSABLE_ENTITY,
            _ => match e {
                Error::InvalidArgument(_) => StatusCode::BAD_REQUEST,
                _ => StatusCode::INTERNAL_SERVER_ERROR,
            },
        };
        Failure(status, ApiError::from(&e))
    }
}

impl From<JsonRejection> for Failure {
    fn from(r: JsonRejection) -> Self {
        Failure(
            r.status(),
            ApiError {
                error: r.body_text(),
                exit_code: 2,
            },
        )
    }
}

type Reply<T> = Result<Json<T>, Failure>;

/// Runs a CPU-bound operation off the async workers.
async fn offload<Q, T>(req: Q, op: fn(&Q) -> surfcut_core::Result<T>) -> Reply<T>
where
    Q: Send + 'static,
    T: Send + 'static,
{
    match tokio::task::spawn_blocking(move || op(&req)).await {
        Ok(r) => Ok(Json(r?)),
        Err(e) => Err(Failure(
            StatusCode::INTERNAL_SERVER_ERROR,
            ApiError {
                error: format!("worker failed: {e}"),
                exit_code: 1,
            },
        )),
    }
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
}

#[derive(Deserialize, Default)]
struct BenchRequest {
    #[serde(default)]
    suite: BenchSuite,
}

async fn health() -> Json<Health> {
    Json(Health { status: "ok" })
}

async fn build(req: Result<Json<api::BuildRequest>, JsonRejection>) -> Reply<api::BuildResponse> {
    offload(req?.0, api::build).await
}

async fn query(req: Result<Json<api::QueryRequest>, JsonRejection>) -> Reply<api::QueryResponse> {
    offload(req?.0, api::query).await
}

async fn verify(
    req: Result<Json<api::VerifyRequest>, JsonRejection>,
) -> Reply<surfcut_core::pipeline::VerifyReport> {
    offload(req?.0, api::verify).await
}

async fn generate(
    req: Result<Json<api::GenerateRequest>, JsonRejection>,
) -> Reply<api::GenerateResponse> {
    offload(req?.0, api::generate_graph).await
}

async fn bench(req: Result<Json<BenchRequest>, JsonRejection>) -> Reply<api::BenchReport> {
    offload(req?.0.suite, |s| api::bench(*s)).await
}

pub fn router() -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/v1/build", post(build))
        .route("/v1/query", post(query))
        .route("/v1/verify", post(verify))
        .route("/v1/generate", post(generate))
        .route("/v1/bench", post(bench))
}

/// Serves the router on an already bound listener until the task is dropped.
pub async fn serve(listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router()).await
}
