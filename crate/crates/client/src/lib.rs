//! Thin async client for the surfcut HTTP service.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use surfcut_core::api::{
    ApiError, BenchReport, BenchSuite, BuildRequest, BuildResponse, GenerateRequest,
    GenerateResponse, QueryRequest, QueryResponse, VerifyRequest,
};
use surfcut_core::pipeline::VerifyReport;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("server rejected request ({status}): {}", .body.error)]
    Api { status: u16, body: ApiError },
}

impl ClientError {
    /// Exit code the command line should use for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ClientError::Transport(_) => 1,
            ClientError::Api { body, .. } => body.exit_code,
        }
    }
}

#[derive(Serialize)]
struct BenchBody {
    suite: BenchSuite,
}

#[derive(Deserialize)]
struct Health {
    status: String,
}

#[derive(Clone, Debug)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Client {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    async fn post<B: Serialize, T: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<T, ClientError> {
        let resp = self
            .http
            .post(format!("{}{path}", self.base))
            .json(body)
            .send()
            .await?;
        let status = resp.status();
        if status.is_success() {
            Ok(resp.json().await?)
        } else {
            let body = resp.json::<ApiError>().await.unwrap_or_else(|e| ApiError {
                error: format!("unreadable error body: {e}"),
                exit_code: 1,
            });
            Err(ClientError::Api {
                status: status.as_u16(),
                body,
            })
        }
    }

    pub async fn health(&self) -> Result<bool, ClientError> {
        let h: Health = self
            .http
            .get(format!("{}/health", self.base))
            .send()
            .await?
            .json()
            .await?;
        Ok(h.status == "ok")
    }

    pub async fn build(&self, req: &BuildRequest) -> Result<BuildResponse, ClientError> {
        self.post("/v1/build", req).await
    }

    pub async fn query(&self, req: &QueryRequest) -> Result<QueryResponse, ClientError> {
        self.post("/v1/query", req).await
    }

    pub async fn verify(&self, req: &VerifyRequest) -> Result<VerifyReport, ClientError> {
        self.post("/v1/verify", req).await
    }

    pub async fn generate(&self, req: &GenerateRequest) -> Result<GenerateResponse, ClientError> {
        self.post("/v1/generate", req).await
    }

    pub async fn bench(&self, suite: BenchSuite) -> Result<BenchReport, ClientError> {
        self.post("/v1/bench", &BenchBody { suite }).await
    }
}
