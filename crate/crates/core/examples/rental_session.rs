//! End-to-end scripted sessions from the bundled scenario files.
//!
//! ```text
//! cargo run --example rental_session
//! cargo run --example rental_session -- fixtures/scenarios/payment_refused.json
//! ```

use std::path::PathBuf;

use zkagree::orchestrator::{run_session, Scenario};

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenarios");
    let paths: Vec<PathBuf> = match std::env::args().nth(1) {
        Some(p) => vec![PathBuf::from(p)],
        None => ["rental_approve.json", "rental_dispute.json", "rental_forged_arbitration.json"]
            .iter()
            .map(|n| dir.join(n))
            .collect(),
    };
    for path in paths {
        let scenario = Scenario::load(&path).unwrap();
        match run_session(&scenario) {
            Ok(r) => {
                println!("== {} ==", r.name);
                println!("outcome   {}", r.outcome);
                println!("lifecycle {}", r.lifecycle_trace.iter().map(|s| format!("{}/{:?}", s.lifecycle, s.phase)).collect::<Vec<_>>().join(" -> "));
                println!("balances  {:?}", r.balances);
                println!("escrow    {}", r.escrow_pool);
                println!("published {}", r.transcript.iter().map(|e| e.label.as_str()).collect::<Vec<_>>().join(", "));
            }
            Err(e) => println!("{}: {e}", path.display()),
        }
    }
}
