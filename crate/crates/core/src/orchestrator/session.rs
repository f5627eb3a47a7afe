use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::clc::amount::{parse_amount, serde_u128};
use crate::clc::logic::message_digest;
use crate::clc::{
    compile_contract, sign_half, ExternalInputs, KeyBindings, Lifecycle, LifecycleEvent, LifecycleState, Outcome,
    SignedContract,
};
use crate::crypto::{keygen_from_seed, sign, FieldElement, KeyPair, PublicKey};
use crate::enclave::{AttestationRecord, EnclaveInstance};
use crate::ledger::Ledger;
use crate::proofsys::{self, CommitStatement, CommitWitness, EvalStatement, ProofBundle, Srs};

use super::scenario::{apply_term_overrides, Scenario};
use super::{SessionError, Step};

/// Outcome of a scripted run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionReport {
    pub name: String,
    pub contract_digest: String,
    pub outcome: Outcome,
    pub lifecycle: LifecycleState,
    pub lifecycle_trace: Vec<LifecycleState>,
    /// Final balance of every party, in base units.
    pub balances: BTreeMap<String, String>,
    #[serde(with = "serde_u128")]
    pub escrow_pool: u128,
    pub settled: bool,
    pub state_hash: String,
    pub attestation: AttestationRecord,
    pub eval_statement: Option<EvalStatement>,
    /// Every value published during the run, in order.
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub label: String,
    pub data: Json,
}

/// Material a settlement was (or would be) made from.
#[derive(Clone, Debug)]
pub struct Settlement {
    pub statement: EvalStatement,
    pub proof: ProofBundle,
    pub payee_ratio: PublicKey,
    pub payee_complement: PublicKey,
    /// Ledger immediately before the settle call.
    pub ledger_before: Ledger,
}

/// Everything a run produced, for the protocol games.
#[derive(Clone, Debug)]
pub struct SessionRun {
    pub report: SessionReport,
    pub contract: SignedContract,
    pub keys: BTreeMap<String, KeyPair>,
    pub ledger: Ledger,
    pub settlement: Option<Settlement>,
    pub clc_comm: FieldElement,
    /// The nullifier; held by the parties and the enclave, never published.
    pub nullifier: FieldElement,
}

/// A uniformly random field element from `rng`.
pub fn random_field(rng: &mut impl RngCore) -> FieldElement {
    let mut bytes = [0u8; 64];
    rng.fill_bytes(&mut bytes);
    FieldElement::from_le_bytes_mod_order(&bytes)
}

fn amount(step: Step, text: &str) -> Result<u128, SessionError> {
    parse_amount(text).map_err(|e| SessionError::new(step, e.to_string()))
}

fn role_key<'a>(keys: &'a BTreeMap<String, KeyPair>, role: &str, step: Step) -> Result<&'a KeyPair, SessionError> {
    keys.get(role).ok_or_else(|| SessionError::new(step, format!("no key for role `{role}`")))
}

fn build_inputs(scenario: &Scenario, contract: &SignedContract, keys: &BTreeMap<String, KeyPair>) -> Result<ExternalInputs, SessionError> {
    let doc = &contract.doc;
    let err = |m: String| SessionError::new(Step::Evaluate, m);
    let mut inputs = ExternalInputs::new();
    for (name, raw) in &scenario.inputs {
        inputs.insert(name.clone(), ExternalInputs::coerce(doc, name, raw).map_err(|e| err(e.to_string()))?);
    }
    for si in &scenario.signed_inputs {
        let items = si
            .items
            .iter()
            .map(|n| inputs.get(n).cloned().ok_or_else(|| err(format!("signed input `{}` refers to missing `{n}`", si.name))))
            .collect::<Result<Vec<_>, _>>()?;
        let digest = message_digest(&items).ok_or_else(|| err(format!("signed input `{}` has unencodable items", si.name)))?;
        let signer = role_key(keys, &si.signer, Step::Evaluate)?;
        let sig = sign(&signer.sk, &digest);
        inputs.insert(si.name.clone(), crate::clc::Value::Bytes(sig.as_bytes().to_vec()));
    }
    Ok(inputs)
}

fn advance(state: &mut LifecycleState, trace: &mut Vec<LifecycleState>, event: LifecycleEvent, step: Step) -> Result<(), SessionError> {
    state.apply(event).map_err(|e| SessionError::new(step, e.to_string()))?;
    trace.push(*state);
    Ok(())
}

fn check_conservation(ledger: &Ledger, step: Step) -> Result<(), SessionError> {
    if ledger.is_conserved() {
        Ok(())
    } else {
        Err(SessionError::new(step, "conservation violated".into()))
    }
}

/// Runs `scenario` end to end against a fresh ledger, then checks its
/// expectations.
pub fn run_session(scenario: &Scenario) -> Result<SessionReport, SessionError> {
    let mut ledger = Ledger::new(proofsys::default_srs());
    run_session_on(scenario, &mut ledger)
}

/// Like `run_session`, against an existing ledger and its Srs.
pub fn run_session_on(scenario: &Scenario, ledger: &mut Ledger) -> Result<SessionReport, SessionError> {
    let run = execute_on(scenario, ledger)?;
    check_expectations(scenario, &run.report)?;
    Ok(run.report)
}

/// Runs `scenario` on a fresh ledger without checking expectations.
pub fn execute(scenario: &Scenario, srs: &Srs) -> Result<SessionRun, SessionError> {
    let mut ledger = Ledger::new(srs.clone());
    execute_on(scenario, &mut ledger)
}

/// Runs `scenario` on `ledger`, keeping every artifact. On error the ledger
/// keeps whatever transactions already went through.
pub fn execute_on(scenario: &Scenario, ledger: &mut Ledger) -> Result<SessionRun, SessionError> {
    let srs = &ledger.srs().clone();
    let log_start = ledger.tx_log().len();
    let mut rng = ChaCha20Rng::seed_from_u64(scenario.seed);

    let keys: BTreeMap<String, KeyPair> = scenario.keys.iter().map(|(role, seed)| (role.clone(), keygen_from_seed(*seed))).collect();
    let bindings: KeyBindings = keys.iter().map(|(r, kp)| (r.clone(), kp.pk)).collect();

    let source = apply_term_overrides(&scenario.template_text()?, &scenario.term_overrides)?;
    let compiled = compile_contract(&source, &bindings).map_err(|e| SessionError::new(Step::Compile, e.to_string()))?;
    let doc = compiled.document;
    let mut state = compiled.state;
    let mut trace = vec![state];

    let buyer_signer = scenario.signatures.buyer.as_deref().unwrap_or(&doc.signers.buyer);
    let seller_signer = scenario.signatures.seller.as_deref().unwrap_or(&doc.signers.seller);
    let sigma_buy = sign_half(&role_key(&keys, buyer_signer, Step::Sign)?.sk, &doc);
    let sigma_sel = sign_half(&role_key(&keys, seller_signer, Step::Sign)?.sk, &doc);
    let contract = SignedContract::from_parts(doc, sigma_buy, sigma_sel);
    contract.verify_signatures().map_err(|e| SessionError::new(Step::Sign, e.to_string()))?;
    let doc = &contract.doc;
    let mut transcript = Vec::new();
    let mut publish = |label: &str, data: Json| transcript.push(TranscriptEntry { label: label.to_string(), data });

    for (role, amt) in &scenario.funding {
        let pk = role_key(&keys, role, Step::Fund)?.pk;
        ledger.deposit(&pk, amount(Step::Fund, amt)?).map_err(|e| SessionError::new(Step::Fund, e.to_string()))?;
        check_conservation(ledger, Step::Fund)?;
    }

    let k = random_field(&mut rng);
    let witness = CommitWitness { k, pd: contract.program_digest().element() };
    let (commit, commit_proof) = proofsys::prove_commit(srs, &witness).map_err(|e| SessionError::new(Step::Commit, e.to_string()))?;
    if !proofsys::verify_commit(srs, &commit, &commit_proof) {
        return Err(SessionError::new(Step::Commit, "commitment proof does not verify".into()));
    }

    let depositor = role_key(&keys, &scenario.depositor, Step::Submit)?.pk;
    let CommitStatement { clc_comm, .. } = commit;
    let commit_tx = ledger
        .submit_commitment(clc_comm, doc.value_v, &depositor)
        .map_err(|e| SessionError::new(Step::Submit, e.to_string()))?;
    check_conservation(ledger, Step::Submit)?;
    let leaf_index = match commit_tx.payload {
        crate::ledger::TxPayload::Commit { leaf_index, .. } => leaf_index,
        _ => unreachable!("submit_commitment returns a commit transaction"),
    };
    advance(&mut state, &mut trace, LifecycleEvent::CommitmentRegistered, Step::Submit)?;

    let mut enclave = EnclaveInstance::install(contract.clone(), &mut rng).map_err(|e| SessionError::new(Step::Install, e.to_string()))?;
    let inputs = build_inputs(scenario, &contract, &keys)?;
    let attested = enclave.execute_evaluation(&inputs).map_err(|e| SessionError::new(Step::Evaluate, e.to_string()))?;
    advance(&mut state, &mut trace, LifecycleEvent::EvidenceSubmitted, Step::Evaluate)?;
    let outcome = attested.outcome;
    let decision = match outcome {
        Outcome::ApproveFull => LifecycleEvent::Approved,
        Outcome::Ratio { .. } | Outcome::Reject => LifecycleEvent::Disputed,
    };
    advance(&mut state, &mut trace, decision, Step::Evaluate)?;
    let mut attestation = attested.record(&enclave.attestation_pk());

    let mut settlement = None;
    let mut settled = false;
    if !outcome.is_reject() {
        let path = ledger.inclusion_proof(leaf_index).map_err(|e| SessionError::new(Step::Prove, e.to_string()))?;
        let (statement, proof, attested) = enclave
            .generate_settlement_proof(srs, k, path.root, &path.siblings, &path.dirs)
            .map_err(|e| SessionError::new(Step::Prove, e.to_string()))?;
        if Some(statement.rat_numerator) != outcome.numerator(doc.value_v) {
            return Err(SessionError::new(Step::Prove, "statement ratio differs from the attested outcome".into()));
        }
        attestation = attested.record(&enclave.attestation_pk());
        let payee_ratio = doc.ratio_payee_pk().map_err(|e| SessionError::new(Step::Settle, e.to_string()))?;
        let payee_complement = doc.complement_payee_pk().map_err(|e| SessionError::new(Step::Settle, e.to_string()))?;
        publish("eval_statement", serde_json::to_value(statement).expect("serializes"));
        let ledger_before = ledger.clone();
        ledger
            .settle(&proof, &statement, &payee_ratio, &payee_complement)
            .map_err(|e| SessionError::new(Step::Settle, e.to_string()))?;
        check_conservation(ledger, Step::Settle)?;
        advance(&mut state, &mut trace, LifecycleEvent::Settled, Step::Settle)?;
        settled = true;
        settlement = Some(Settlement { statement, proof, payee_ratio, payee_complement, ledger_before });
    }
    publish("attestation", serde_json::to_value(&attestation).expect("serializes"));
    for tx in &ledger.tx_log()[log_start..] {
        publish(&format!("tx_{}", tx.height), serde_json::to_value(tx).expect("serializes"));
    }

    let report = SessionReport {
        name: scenario.name.clone(),
        contract_digest: contract.contract_digest().to_hex(),
        outcome,
        lifecycle: state,
        lifecycle_trace: trace,
        balances: keys.iter().map(|(role, kp)| (role.clone(), ledger.balance(&kp.pk).to_string())).collect(),
        escrow_pool: ledger.escrow_pool(),
        settled,
        state_hash: ledger.state_hash(),
        attestation,
        eval_statement: settlement.as_ref().map(|s| s.statement),
        transcript,
    };
    Ok(SessionRun { report, contract, keys, ledger: ledger.clone(), settlement, clc_comm, nullifier: k })
}

/// Compares a report with the scenario's `expect` block.
pub fn check_expectations(scenario: &Scenario, report: &SessionReport) -> Result<(), SessionError> {
    let exp = &scenario.expect;
    let fail = |m: String| Err(SessionError::new(Step::Expectation, m));
    if let Some(lc) = exp.lifecycle {
        if report.lifecycle.lifecycle != lc {
            return fail(format!("lifecycle {} != expected {lc}", report.lifecycle.lifecycle));
        }
    }
    if let Some(o) = &exp.outcome {
        if report.outcome.to_string() != *o {
            return fail(format!("outcome {} != expected {o}", report.outcome));
        }
    }
    for (role, want) in &exp.balances {
        let want = amount(Step::Expectation, want)?;
        let got: u128 = report.balances.get(role).and_then(|b| b.parse().ok()).unwrap_or(0);
        if got != want {
            return fail(format!("balance of {role} is {got}, expected {want}"));
        }
    }
    if let Some(pool) = &exp.escrow_pool {
        let want = amount(Step::Expectation, pool)?;
        if report.escrow_pool != want {
            return fail(format!("escrow pool is {}, expected {want}", report.escrow_pool));
        }
    }
    Ok(())
}

impl SessionReport {
    pub fn completed(&self) -> bool {
        self.lifecycle.lifecycle == Lifecycle::Completed
    }
}
