//! Typed client for the HTTP service. Requests are the structs from
//! [`obrauer_core::api`]; responses are the canonical JSON values.

use obrauer_core::api::{BasisRequest, ComposeRequest, NormalizeRequest, RankRequest, StructRequest, VerifyRequest};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    /// The server rejected the request as malformed or unsupported.
    #[error("{0}")]
    Usage(String),
    #[error("server error ({status}): {message}")]
    Server { status: u16, message: String },
    #[error("cannot reach the server: {0}")]
    Transport(#[from] reqwest::Error),
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the server root, e.g. `http://127.0.0.1:8417`.
    pub fn new(base: impl Into<String>) -> Client {
        Client {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    async fn post<B: Serialize>(&self, route: &str, body: &B) -> Result<Value, ClientError> {
        let resp = self.http.post(format!("{}/v1/{route}", self.base)).json(body).send().await?;
        Self::decode(resp).await
    }

    async fn decode(resp: reqwest::Response) -> Result<Value, ClientError> {
        let status = resp.status();
        let text = resp.text().await?;
        let parsed: Option<Value> = serde_json::from_str(&text).ok();
        if status.is_success() {
            return parsed.ok_or_else(|| ClientError::Server {
                status: status.as_u16(),
                message: format!("response is not JSON: {text}"),
            });
        }
        let message = parsed
            .as_ref()
            .and_then(|v| v.get("error"))
            .and_then(Value::as_str)
            .map_or(text.clone(), str::to_string);
        if status.is_client_error() {
            Err(ClientError::Usage(message))
        } else {
            Err(ClientError::Server { status: status.as_u16(), message })
        }
    }

    pub async fn health(&self) -> Result<Value, ClientError> {
        let resp = self.http.get(format!("{}/v1/health", self.base)).send().await?;
        Self::decode(resp).await
    }

    pub async fn normalize(&self, req: &NormalizeRequest) -> Result<Value, ClientError> {
        self.post("normalize", req).await
    }

    pub async fn compose(&self, req: &ComposeRequest) -> Result<Value, ClientError> {
        self.post("compose", req).await
    }

    pub async fn basis(&self, req: &BasisRequest) -> Result<Value, ClientError> {
        self.post("basis", req).await
    }

    pub async fn dims(&self, req: &BasisRequest) -> Result<Value, ClientError> {
        self.post("dims", req).await
    }

    pub async fn structconst(&self, req: &StructRequest) -> Result<Value, ClientError> {
        self.post("structconst", req).await
    }

    pub async fn verify(&self, req: &VerifyRequest) -> Result<Value, ClientError> {
        self.post("verify", req).await
    }

    pub async fn rank(&self, req: &RankRequest) -> Result<Value, ClientError> {
        self.post("rank", req).await
    }
}
