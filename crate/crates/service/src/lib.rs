//! HTTP front end for kinetic queries.
//!
//! | Method | Path | |
//! |---|---|---|
//! | GET | `/api/health` | liveness |
//! | POST | `/api/datasets` | upload JSONL; returns `{dataset_id, summary}` |
//! | GET | `/api/datasets` | stored datasets |
//! | GET | `/api/datasets/{id}/parameters` | parameter registry |
//! | POST | `/api/evaluate` | per-frame point colors |
//! | POST | `/api/render` | APNG of the animation |

mod api;
mod store;

use std::future::Future;

use tokio::net::TcpListener;

pub use api::{router, AppState, ServiceConfig, DEFAULT_UPLOAD_LIMIT, MAX_FRAMES};
pub use store::{dataset_id, DatasetSummary, Entry, Store};

/// Serve until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    config: &ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state, config)).with_graceful_shutdown(shutdown).await
}

/// Resolves on Ctrl-C.
pub async fn ctrl_c() {
    if let Err(e) = tokio::signal::ctrl_c().await {
        log::error!("cannot listen for Ctrl-C: {e}");
        std::future::pending::<()>().await;
    }
}
