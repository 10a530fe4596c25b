//! Trial-monitoring service. Replays the seven-responder trial that stops
//! on enrollment 15 through the session store, then serves the HTTP API
//! when run with `serve`.
//!
//! ```text
//! cargo run --example monitor_service
//! cargo run --example monitor_service -- serve
//! curl -X POST localhost:8080/api/trials -d '{"s":7,"t":11,"prior":{"alpha":0.5,"beta":0.5}}'
//! ```

use std::net::SocketAddr;
use std::sync::Arc;

use snb::service::{self, ResponseModel, TrialStore};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let store = Arc::new(TrialStore::in_memory());
    let trial = store.create(7, 11, ResponseModel::Beta { alpha: 0.5, beta: 0.5 })?;
    for o in [0, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 1] {
        let r = store.record(&trial.id, o == 1)?;
        println!(
            "enrolled {:>2}  responders {}  status {:?}  P[success] {:.4}",
            r.enrolled, r.s_obs, r.status, r.predicted_success_probability
        );
    }
    println!("{}", serde_json::to_string_pretty(&store.state(&trial.id)?)?);

    if std::env::args().nth(1).as_deref() == Some("serve") {
        let addr = SocketAddr::from(([127, 0, 0, 1], service::DEFAULT_PORT));
        service::serve(addr, store).await?;
    }
    Ok(())
}
