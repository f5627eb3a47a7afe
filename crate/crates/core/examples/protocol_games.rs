//! The security games run against real sessions: unlinkability of two
//! private contracts, random mutations of a settlement, non-repudiation, and
//! a short multi-session conservation run.
//!
//! ```text
//! cargo run --example protocol_games
//! ```

use std::path::PathBuf;

use zkagree::crypto::keygen_from_seed;
use zkagree::orchestrator::{conservation_stress, execute, forged_half, non_repudiation_check, privacy_game, soundness_game, Scenario};
use zkagree::proofsys::default_srs;

fn main() {
    let srs = default_srs();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenarios/rental_dispute.json");
    let base = Scenario::load(&path).unwrap();

    let mut other = base.clone();
    other.seed += 1;
    other.term_overrides.insert("propertyId".into(), serde_json::json!("FLAT-9-RIVERSIDE"));
    let (_, _, privacy) = privacy_game(&base, &other, &srs).unwrap();
    println!("privacy: passed={} differing={:?}", privacy.passed(), privacy.differing);

    let run = execute(&base, &srs).unwrap();
    let soundness = soundness_game(&run, 300, 1).unwrap();
    println!("soundness: {} mutations, {} accepted, reverts {:?}", soundness.trials, soundness.accepted, soundness.by_error);

    let nr = run.non_repudiation();
    println!("non-repudiation (honest): holds={}", nr.holds());
    let forged = forged_half(&run.contract, &keygen_from_seed(666));
    let nr = non_repudiation_check(&run.contract.doc, Some(&run.contract.sigma_buy), Some(&forged), run.clc_comm, run.ledger.tx_log());
    println!("non-repudiation (forged seller half): holds={} seller={:?}", nr.holds(), nr.seller);

    let stress = conservation_stress(&srs, 25, 2);
    println!("conservation: {stress:?}");
}
