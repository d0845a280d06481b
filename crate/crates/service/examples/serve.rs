//! Run the HTTP API on an ephemeral port with one synthetic dataset
//! preloaded, then print a few curl commands to try.

use kinetiq::data::{generate_synthetic, serialize_dataset, SimConfig};
use kinetiq_service::{serve, AppState, ServiceConfig, Store};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let store = Store::in_memory();
    let jsonl = serialize_dataset(&generate_synthetic(&SimConfig::new(42, 20, 10, 4)).expect("valid config"));
    let (entry, _) = store.insert(jsonl.as_bytes()).expect("generated data parses");

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    println!("listening on http://{addr}");
    println!("  curl http://{addr}/api/datasets");
    println!("  curl http://{addr}/api/datasets/{}/parameters", entry.id);
    println!("Ctrl-C to stop");
    serve(listener, AppState::new(store), &ServiceConfig::default(), kinetiq_service::ctrl_c()).await
}
