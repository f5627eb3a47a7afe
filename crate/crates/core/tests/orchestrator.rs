use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use zkagree::clc::{Lifecycle, LifecycleEvent, LifecycleState, Outcome, Phase};
use zkagree::crypto::keygen_from_seed;
use zkagree::fixtures::ETH;
use zkagree::ledger::{Ledger, LedgerError, TxPayload};
use zkagree::orchestrator::{
    check_lifecycle_trace, conservation_stress, execute, forged_half, non_repudiation_check, privacy_game,
    run_session, run_session_on, soundness_game, PrivacyError, Scenario, SignatureStatus, Step, EVENTS,
};
use zkagree::proofsys::{default_srs, EvalStatement};

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenarios").join(name)
}

fn scenario(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name)).unwrap()
}

fn balance(report: &zkagree::orchestrator::SessionReport, role: &str) -> u128 {
    report.balances[role].parse().unwrap()
}

#[test]
fn approve_scenario_completes() {
    let r = run_session(&scenario("rental_approve.json")).unwrap();
    assert_eq!(r.lifecycle.lifecycle, Lifecycle::Completed);
    assert_eq!(r.outcome, Outcome::ApproveFull);
    assert_eq!(balance(&r, "tenant"), 2 * ETH);
    assert_eq!(balance(&r, "landlord"), 0);
    assert_eq!(r.escrow_pool, 0);
}

#[test]
fn dispute_scenario_splits() {
    let r = run_session(&scenario("rental_dispute.json")).unwrap();
    assert_eq!(r.lifecycle.lifecycle, Lifecycle::Completed);
    assert_eq!(balance(&r, "tenant"), 3 * ETH / 2);
    assert_eq!(balance(&r, "landlord"), ETH / 2);
}

#[test]
fn forged_arbitration_halts_in_evaluation() {
    let r = run_session(&scenario("rental_forged_arbitration.json")).unwrap();
    assert_eq!(r.outcome, Outcome::Reject);
    assert_eq!(r.lifecycle, LifecycleState { lifecycle: Lifecycle::Evaluation, phase: Phase::Disputed });
    assert_eq!(r.escrow_pool, 2 * ETH);
    assert!(!r.settled);
    assert!(r.eval_statement.is_none());
}

#[test]
fn payment_scenario_refunds_buyer() {
    let r = run_session(&scenario("payment_refused.json")).unwrap();
    assert_eq!(r.outcome, Outcome::Ratio { numerator: 0 });
    assert_eq!(balance(&r, "buyer"), 1500);
    assert_eq!(balance(&r, "seller"), 0);
}

#[test]
fn fixed_seed_reports_are_identical() {
    for name in ["rental_approve.json", "rental_dispute.json", "rental_forged_arbitration.json"] {
        let a = serde_json::to_string(&run_session(&scenario(name)).unwrap()).unwrap();
        let b = serde_json::to_string(&run_session(&scenario(name)).unwrap()).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn nullifier_never_published() {
    let run = execute(&scenario("rental_dispute.json"), &default_srs()).unwrap();
    let k = run.nullifier.to_hex();
    let k_plain = k.trim_start_matches("0x");
    let report = serde_json::to_string(&run.report).unwrap();
    let ledger = run.ledger.to_json();
    for text in [&report, &ledger] {
        assert!(!text.contains(k_plain));
    }
}

#[test]
fn reports_pass_the_trace_checker() {
    for name in ["rental_approve.json", "rental_dispute.json", "rental_forged_arbitration.json", "payment_refused.json"] {
        let r = run_session(&scenario(name)).unwrap();
        check_lifecycle_trace(&r.lifecycle_trace).unwrap();
    }
    let ok = run_session(&scenario("rental_approve.json")).unwrap().lifecycle_trace;
    let mut skipped = ok.clone();
    skipped.remove(1);
    assert!(check_lifecycle_trace(&skipped).is_err());
    let mut swapped = ok.clone();
    swapped.swap(1, 2);
    assert!(check_lifecycle_trace(&swapped).is_err());
    let mut repeated = ok.clone();
    repeated.push(*ok.last().unwrap());
    assert!(check_lifecycle_trace(&repeated).is_err());
    assert!(check_lifecycle_trace(&ok[1..]).is_err());
}

#[test]
fn errors_carry_their_step() {
    let mut s = scenario("rental_approve.json");
    s.signatures.seller = Some("arbitrator".into());
    assert_eq!(run_session(&s).unwrap_err().step, Step::Sign);

    let mut s = scenario("rental_approve.json");
    s.funding.insert("tenant".into(), "1 ETH".into());
    assert_eq!(run_session(&s).unwrap_err().step, Step::Submit);

    let mut s = scenario("rental_approve.json");
    s.inputs.remove("tenantDecision");
    assert_eq!(run_session(&s).unwrap_err().step, Step::Evaluate);

    let mut s = scenario("rental_approve.json");
    s.expect.balances.insert("landlord".into(), "1 ETH".into());
    let e = run_session(&s).unwrap_err();
    assert_eq!(e.step, Step::Expectation);
    assert!(e.to_string().contains("landlord"));

    let mut s = scenario("rental_approve.json");
    s.template = "nope".into();
    assert_eq!(run_session(&s).unwrap_err().step, Step::Load);

    let mut s = scenario("rental_approve.json");
    s.term_overrides.insert("depositValue".into(), serde_json::json!("many"));
    assert_eq!(run_session(&s).unwrap_err().step, Step::Compile);
}

#[test]
fn scenario_with_file_template() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t.toml"), zkagree::fixtures::RENTAL_TEMPLATE).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(scenario_path("rental_approve.json")).unwrap()).unwrap();
    json["template"] = "t.toml".into();
    let path = dir.path().join("s.json");
    std::fs::write(&path, json.to_string()).unwrap();
    let s = Scenario::load(&path).unwrap();
    assert!(run_session(&s).unwrap().completed());
}

#[test]
fn sessions_share_a_ledger() {
    let mut ledger = Ledger::new(default_srs());
    run_session_on(&scenario("rental_dispute.json"), &mut ledger).unwrap();
    let mut second = scenario("rental_approve.json");
    second.expect.balances.clear();
    let r = run_session_on(&second, &mut ledger).unwrap();
    assert_eq!(balance(&r, "tenant"), 3 * ETH / 2 + 2 * ETH);
    assert_eq!(ledger.tree().next_index(), 2);
    assert!(ledger.is_conserved());
    assert!(r.transcript.iter().all(|e| e.label != "tx_1"));
}

fn private_variant(base: &Scenario, i: u64) -> Scenario {
    let mut s = base.clone();
    s.seed = base.seed * 1000 + i;
    s.term_overrides.insert("propertyId".into(), serde_json::json!(format!("UNIT-{i:04}-HARBOUR-VIEW")));
    s.term_overrides.insert("tenant".into(), serde_json::json!(format!("Tenant Number {i}")));
    s.term_overrides.insert("startDate".into(), serde_json::json!(format!("2024-{:02}-01T00:00:00Z", 1 + i % 12)));
    s
}

#[test]
fn privacy_pairs_differ_only_in_hash_fields() {
    let srs = default_srs();
    let base = scenario("rental_dispute.json");
    for i in 0..4 {
        let (_, _, report) = privacy_game(&private_variant(&base, 2 * i), &private_variant(&base, 2 * i + 1), &srs).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.differing.iter().any(|p| p.ends_with(".clc_comm")));
        assert!(report.differing.iter().any(|p| p.ends_with(".h")));
    }
}

#[test]
fn same_contract_new_nullifier_changes_commitment() {
    let srs = default_srs();
    let a = scenario("rental_approve.json");
    let mut b = a.clone();
    b.seed += 1;
    let (ra, rb, report) = privacy_game(&a, &b, &srs).unwrap();
    assert!(report.passed());
    assert_ne!(ra.clc_comm, rb.clc_comm);
    assert_ne!(ra.report.eval_statement.unwrap().h, rb.report.eval_statement.unwrap().h);
}

#[test]
fn privacy_game_rejects_public_differences() {
    let srs = default_srs();
    let a = scenario("rental_approve.json");
    let mut b = a.clone();
    b.term_overrides.insert("depositValue".into(), serde_json::json!("1 ETH"));
    assert!(matches!(privacy_game(&a, &b, &srs), Err(PrivacyError::ParameterMismatch(_))));
    let mut c = a.clone();
    c.keys.insert("landlord".into(), 999);
    assert!(matches!(privacy_game(&a, &c, &srs), Err(PrivacyError::ParameterMismatch(_))));
}

#[test]
fn leaked_terms_are_detected() {
    let srs = default_srs();
    let base = scenario("rental_approve.json");
    let mut a = execute(&private_variant(&base, 1), &srs).unwrap();
    let b = execute(&private_variant(&base, 2), &srs).unwrap();
    a.report.transcript.push(zkagree::orchestrator::TranscriptEntry {
        label: "oops".into(),
        data: serde_json::json!({ "note": "UNIT-0001-HARBOUR-VIEW" }),
    });
    let report = zkagree::orchestrator::privacy_diff(&a, &b);
    assert!(!report.passed());
    assert!(!report.leaks.is_empty());
    assert!(report.disallowed.iter().any(|p| p.starts_with("oops")));
}

#[test]
fn soundness_mutations_never_settle() {
    let run = execute(&scenario("rental_dispute.json"), &default_srs()).unwrap();
    let report = soundness_game(&run, 300, 5).unwrap();
    assert_eq!(report.accepted, 0);
    assert_eq!(report.state_changed, 0);
    assert_eq!(report.by_target.len(), 6);
}

#[test]
fn targeted_mutations() {
    let srs = default_srs();
    let run = execute(&scenario("rental_dispute.json"), &srs).unwrap();
    let st = run.settlement.as_ref().unwrap();
    let bumped = EvalStatement { rat_numerator: st.statement.rat_numerator + 1, ..st.statement };
    let mut l = st.ledger_before.clone();
    assert_eq!(l.settle(&st.proof, &bumped, &st.payee_ratio, &st.payee_complement), Err(LedgerError::InvalidProof));

    // a nullifier already spent by another session on this ledger
    let mut shared = Ledger::new(srs.clone());
    let first = zkagree::orchestrator::execute_on(&scenario("rental_approve.json"), &mut shared).unwrap();
    let spent_h = first.report.eval_statement.unwrap().h;
    let second = zkagree::orchestrator::execute_on(&scenario("rental_forged_arbitration.json"), &mut shared).unwrap();
    assert!(second.settlement.is_none());
    let replay = EvalStatement { h: spent_h, ..st.statement };
    assert_eq!(shared.settle(&st.proof, &replay, &st.payee_ratio, &st.payee_complement), Err(LedgerError::NullifierSpent));

    // root of an unrelated ledger
    let other = execute(&scenario("rental_approve.json"), &srs).unwrap();
    let foreign = EvalStatement { rt: other.ledger.root(), ..st.statement };
    let mut l = st.ledger_before.clone();
    assert_eq!(l.settle(&st.proof, &foreign, &st.payee_ratio, &st.payee_complement), Err(LedgerError::StaleRoot));
}

#[test]
fn non_repudiation() {
    let run = execute(&scenario("rental_approve.json"), &default_srs()).unwrap();
    assert!(run.non_repudiation().holds());
    let doc = &run.contract.doc;
    let log = run.ledger.tx_log();

    let stripped = non_repudiation_check(doc, None, Some(&run.contract.sigma_sel), run.clc_comm, log);
    assert_eq!(stripped.buyer, SignatureStatus::Missing);
    assert!(!stripped.holds());

    let outsider = keygen_from_seed(4242);
    let forged = forged_half(&run.contract, &outsider);
    let r = non_repudiation_check(doc, Some(&forged), Some(&run.contract.sigma_sel), run.clc_comm, log);
    assert_eq!(r.buyer, SignatureStatus::Invalid);

    let mut altered = log.to_vec();
    for tx in &mut altered {
        if let TxPayload::Commit { v, .. } = &mut tx.payload {
            *v -= 1;
        }
    }
    let r = non_repudiation_check(doc, Some(&run.contract.sigma_buy), Some(&run.contract.sigma_sel), run.clc_comm, &altered);
    assert!(r.chain_broken_at.is_some());
    assert!(!r.commit_recorded);
}

#[test]
fn small_stress_run_conserves() {
    let r = conservation_stress(&default_srs(), 60, 3);
    assert_eq!(r.conservation_violations, 0);
    assert!(r.settlements > 0 && r.rejected_outcomes > 0);
    assert!(r.conservation_checks as u64 >= r.transactions);
}

#[test]
fn random_event_sequences_stay_on_the_fsm() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let mut s = LifecycleState::init();
        let mut trace = vec![s];
        for _ in 0..rng.gen_range(1..12) {
            let ev: LifecycleEvent = EVENTS[rng.gen_range(0..EVENTS.len())];
            let before = s;
            if s.apply(ev).is_ok() {
                trace.push(s);
            } else {
                assert_eq!(s, before);
            }
        }
        check_lifecycle_trace(&trace).unwrap();
    }
}
