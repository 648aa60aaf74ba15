//! HTTP/JSON front end. Every endpoint takes a JSON body from
//! [`obrauer_core::api`] and answers with the canonical schema; usage errors
//! come back as `400 {"error": ...}`.
//!
//! | route | body |
//! |---|---|
//! | `GET /v1/health` | |
//! | `POST /v1/normalize` | `NormalizeRequest` |
//! | `POST /v1/compose` | `ComposeRequest` |
//! | `POST /v1/basis` | `BasisRequest` |
//! | `POST /v1/dims` | `BasisRequest` |
//! | `POST /v1/structconst` | `StructRequest` |
//! | `POST /v1/verify` | `VerifyRequest` |
//! | `POST /v1/rank` | `RankRequest` |

use std::sync::Arc;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use obrauer_core::api::{
    ApiError, BasisRequest, ComposeRequest, NormalizeRequest, RankRequest, StructRequest, VerifyRequest, Workspace,
};
use serde_json::{json, Value};
use tokio::net::TcpListener;

pub struct Failure(ApiError);

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        let status = match self.0 {
            ApiError::Usage(_) => StatusCode::BAD_REQUEST,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({"error": self.0.to_string()}))).into_response()
    }
}

type Reply = Result<Json<Value>, Failure>;

/// Runs a handler off the async workers; the computations are CPU bound.
async fn blocking<R: Send + 'static>(
    ws: Arc<Workspace>,
    req: R,
    f: fn(&Workspace, &R) -> Result<Value, ApiError>,
) -> Reply {
    tokio::task::spawn_blocking(move || f(&ws, &req))
        .await
        .map_err(|e| Failure(ApiError::Internal(e.to_string())))?
        .map(Json)
        .map_err(Failure)
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok", "version": env!("CARGO_PKG_VERSION")}))
}

async fn normalize(State(ws): State<Arc<Workspace>>, Json(req): Json<NormalizeRequest>) -> Reply {
    blocking(ws, req, Workspace::normalize).await
}

async fn compose(State(ws): State<Arc<Workspace>>, Json(req): Json<ComposeRequest>) -> Reply {
    blocking(ws, req, Workspace::compose).await
}

async fn basis(State(ws): State<Arc<Workspace>>, Json(req): Json<BasisRequest>) -> Reply {
    blocking(ws, req, Workspace::basis).await
}

async fn dims(State(ws): State<Arc<Workspace>>, Json(req): Json<BasisRequest>) -> Reply {
    blocking(ws, req, Workspace::dims).await
}

async fn structconst(State(ws): State<Arc<Workspace>>, Json(req): Json<StructRequest>) -> Reply {
    blocking(ws, req, Workspace::structconst).await
}

async fn verify(State(ws): State<Arc<Workspace>>, Json(req): Json<VerifyRequest>) -> Reply {
    blocking(ws, req, Workspace::verify).await
}

async fn rank(State(ws): State<Arc<Workspace>>, Json(req): Json<RankRequest>) -> Reply {
    blocking(ws, req, Workspace::rank).await
}

pub fn router(ws: Arc<Workspace>) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/normalize", post(normalize))
        .route("/v1/compose", post(compose))
        .route("/v1/basis", post(basis))
        .route("/v1/dims", post(dims))
        .route("/v1/structconst", post(structconst))
        .route("/v1/verify", post(verify))
        .route("/v1/rank", post(rank))
        .with_state(ws)
}

/// Serves until the future completes or the listener fails.
pub async fn serve(listener: TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(Arc::new(Workspace::new()))).await
}
