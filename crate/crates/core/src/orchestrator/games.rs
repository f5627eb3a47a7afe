use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use thiserror::Error;

use crate::clc::{ContractDocument, LifecycleEvent, LifecycleState, SignedContract, TermValue};
use crate::crypto::{sign, verify, FieldElement, KeyPair, PublicKey, Signature};
use crate::enclave::EnclaveInstance;
use crate::fixtures::{self, RentalParties};
use crate::ledger::{verify_tx_chain, Ledger, LedgerError, Transaction, TxPayload};
use crate::proofsys::{self, CommitWitness, EvalStatement, ProofBundle, Srs};

use super::session::{execute, random_field, SessionRun};
use super::{Scenario, SessionError};

/// Transcript fields allowed to differ between two runs that agree on all
/// public parameters. Roots and digests listed here are functions of the
/// commitment or the nullifier hash.
pub const ALLOWED_DIFF_FIELDS: &[&str] =
    &["clc_comm", "h", "rt", "root", "quote", "output_digest", "attestation_pk", "proof_digest", "prev_digest"];

/// Shortest run of contract bytes treated as a leak when found in a transcript.
pub const LEAK_WINDOW: usize = 16;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivacyReport {
    /// Transcript paths whose values differ.
    pub differing: Vec<String>,
    /// Differing paths outside `ALLOWED_DIFF_FIELDS`.
    pub disallowed: Vec<String>,
    /// Private contract content found in either transcript.
    pub leaks: Vec<String>,
}

impl PrivacyReport {
    pub fn passed(&self) -> bool {
        self.disallowed.is_empty() && self.leaks.is_empty()
    }
}

fn flatten(prefix: &str, value: &Json, out: &mut BTreeMap<String, String>) {
    match value {
        Json::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{prefix}.{k}"), v, out);
            }
        }
        Json::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

fn flat_transcript(run: &SessionRun) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for entry in &run.report.transcript {
        flatten(&entry.label, &entry.data, &mut out);
    }
    out
}

/// Serialized public transcript of a run.
pub fn transcript_text(run: &SessionRun) -> String {
    run.report.transcript.iter().map(|e| format!("{}={}\n", e.label, e.data)).collect()
}

fn field_name(path: &str) -> &str {
    let last = path.rsplit('.').find(|seg| seg.parse::<usize>().is_err()).unwrap_or(path);
    last.strip_suffix("_hex").unwrap_or(last)
}

/// Private content of `contract` found in `transcript`, ignoring values the
/// protocol publishes anyway (keys and the escrow value).
pub fn scan_for_leaks(contract: &SignedContract, transcript: &str) -> Vec<String> {
    let doc = &contract.doc;
    let mut leaks = Vec::new();
    for (name, term) in &doc.terms {
        if let TermValue::String(s) = term {
            if s.len() >= 4 && transcript.contains(s.as_str()) {
                leaks.push(format!("term `{name}` value appears in transcript"));
            }
        }
    }
    let mut canonical = String::from_utf8_lossy(&doc.canonical()).into_owned();
    let mut public: Vec<String> = doc.parties.values().map(|p| p.pk.to_hex()).collect();
    public.push(doc.value_v.to_string());
    for p in public {
        canonical = canonical.replace(&p, "\u{0}");
    }
    let bytes = canonical.as_bytes();
    let mut seen = BTreeSet::new();
    for w in bytes.windows(LEAK_WINDOW) {
        if w.contains(&0) {
            continue;
        }
        if let Ok(s) = std::str::from_utf8(w) {
            if transcript.contains(s) && seen.insert(s.to_string()) {
                leaks.push(format!("contract bytes {s:?} appear in transcript"));
            }
        }
    }
    leaks
}

/// Diffs the public transcripts of two runs.
pub fn privacy_diff(a: &SessionRun, b: &SessionRun) -> PrivacyReport {
    let fa = flat_transcript(a);
    let fb = flat_transcript(b);
    let keys: BTreeSet<&String> = fa.keys().chain(fb.keys()).collect();
    let mut report = PrivacyReport::default();
    for k in keys {
        if fa.get(k) != fb.get(k) {
            report.differing.push(k.clone());
            if !ALLOWED_DIFF_FIELDS.contains(&field_name(k)) {
                report.disallowed.push(k.clone());
            }
        }
    }
    for run in [a, b] {
        report.leaks.extend(scan_for_leaks(&run.contract, &transcript_text(run)));
    }
    report
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PrivacyError {
    #[error("public parameters differ: {0}")]
    ParameterMismatch(String),
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// Public parameters of a contract that both runs of a privacy pair share.
fn public_parameters(contract: &SignedContract) -> Json {
    let doc = &contract.doc;
    serde_json::json!({
        "v": doc.value_v.to_string(),
        "parties": doc.parties.iter().map(|(r, p)| (r.clone(), p.pk.to_hex())).collect::<BTreeMap<_, _>>(),
        "signers": doc.signers,
        "payout": doc.payout,
        "measurement": doc.logic.digest().to_hex(),
    })
}

/// Runs two scenarios that must agree on everything public and diffs their
/// transcripts.
pub fn privacy_game(a: &Scenario, b: &Scenario, srs: &Srs) -> Result<(SessionRun, SessionRun, PrivacyReport), PrivacyError> {
    let ra = execute(a, srs)?;
    let rb = execute(b, srs)?;
    let (pa, pb) = (public_parameters(&ra.contract), public_parameters(&rb.contract));
    if pa != pb {
        return Err(PrivacyError::ParameterMismatch(format!("{pa} vs {pb}")));
    }
    if ra.report.outcome != rb.report.outcome {
        return Err(PrivacyError::ParameterMismatch(format!("outcomes {} vs {}", ra.report.outcome, rb.report.outcome)));
    }
    let report = privacy_diff(&ra, &rb);
    Ok((ra, rb, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationTarget {
    ProofBytes,
    Rt,
    H,
    RatNumerator,
    PartiesDigest,
    V,
}

impl MutationTarget {
    pub const ALL: [MutationTarget; 6] = [
        MutationTarget::ProofBytes,
        MutationTarget::Rt,
        MutationTarget::H,
        MutationTarget::RatNumerator,
        MutationTarget::PartiesDigest,
        MutationTarget::V,
    ];
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub trials: usize,
    pub accepted: usize,
    /// Reverts whose ledger state differed from the pre-call state.
    pub state_changed: usize,
    pub by_target: BTreeMap<String, usize>,
    pub by_error: BTreeMap<String, usize>,
}

/// One random single-field change to an honest settlement.
pub fn mutate(rng: &mut impl RngCore, ledger: &Ledger, statement: &EvalStatement, proof: &ProofBundle, target: MutationTarget) -> (EvalStatement, ProofBundle) {
    let mut s = *statement;
    let mut p = proof.clone();
    match target {
        MutationTarget::ProofBytes => {
            let i = rng.gen_range(0..p.proof.len());
            p.proof[i] ^= 1 << rng.gen_range(0..8);
        }
        MutationTarget::Rt => {
            let others: Vec<FieldElement> = ledger.recent_roots().copied().filter(|r| *r != s.rt).collect();
            s.rt = if !others.is_empty() && rng.gen_bool(0.5) {
                others[rng.gen_range(0..others.len())]
            } else {
                random_field(rng)
            };
        }
        MutationTarget::H => s.h = random_field(rng),
        MutationTarget::RatNumerator => {
            let old = s.rat_numerator;
            while s.rat_numerator == old {
                s.rat_numerator = rng.gen_range(0..=s.v);
            }
        }
        MutationTarget::PartiesDigest => s.parties_digest = random_field(rng),
        MutationTarget::V => {
            let old = s.v;
            while s.v == old || s.v < s.rat_numerator {
                s.v = s.rat_numerator + rng.gen_range(0..=old);
            }
        }
    }
    (s, p)
}

/// Applies `trials` random mutations to a settlement and tries each one
/// against a copy of the pre-settlement ledger.
pub fn soundness_game(run: &SessionRun, trials: usize, seed: u64) -> Option<SoundnessReport> {
    let st = run.settlement.as_ref()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let before = st.ledger_before.snapshot();
    let mut report = SoundnessReport { trials, ..Default::default() };
    for i in 0..trials {
        let target = MutationTarget::ALL[i % MutationTarget::ALL.len()];
        let (s, p) = mutate(&mut rng, &st.ledger_before, &st.statement, &st.proof, target);
        let mut ledger = st.ledger_before.clone();
        *report.by_target.entry(format!("{target:?}")).or_default() += 1;
        match ledger.settle(&p, &s, &st.payee_ratio, &st.payee_complement) {
            Ok(_) => report.accepted += 1,
            Err(e) => {
                *report.by_error.entry(error_name(&e)).or_default() += 1;
                if ledger.snapshot() != before {
                    report.state_changed += 1;
                }
            }
        }
    }
    Some(report)
}

fn error_name(e: &LedgerError) -> String {
    format!("{e:?}").split([' ', '{', '(']).next().unwrap_or_default().to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureStatus {
    Valid,
    Invalid,
    Missing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonRepudiation {
    pub buyer: SignatureStatus,
    pub seller: SignatureStatus,
    /// A COMMIT record for the contract's commitment is in the log.
    pub commit_recorded: bool,
    /// First log record whose digest chain breaks, if any.
    pub chain_broken_at: Option<usize>,
}

impl NonRepudiation {
    pub fn holds(&self) -> bool {
        self.buyer == SignatureStatus::Valid
            && self.seller == SignatureStatus::Valid
            && self.commit_recorded
            && self.chain_broken_at.is_none()
    }
}

/// Checks the stored signatures against the contract digest and the
/// registration record against the log's digest chain.
pub fn non_repudiation_check(
    doc: &ContractDocument,
    sigma_buy: Option<&Signature>,
    sigma_sel: Option<&Signature>,
    clc_comm: FieldElement,
    tx_log: &[Transaction],
) -> NonRepudiation {
    let digest = doc.digest();
    let status = |pk: Result<PublicKey, _>, sig: Option<&Signature>| match (pk, sig) {
        (_, None) => SignatureStatus::Missing,
        (Ok(pk), Some(sig)) if verify(&pk, &digest, sig) => SignatureStatus::Valid,
        _ => SignatureStatus::Invalid,
    };
    NonRepudiation {
        buyer: status(doc.buyer_pk(), sigma_buy),
        seller: status(doc.seller_pk(), sigma_sel),
        commit_recorded: tx_log
            .iter()
            .any(|tx| matches!(&tx.payload, TxPayload::Commit { clc_comm: c, v, .. } if *c == clc_comm && *v == doc.value_v)),
        chain_broken_at: verify_tx_chain(tx_log).err(),
    }
}

impl SessionRun {
    pub fn non_repudiation(&self) -> NonRepudiation {
        non_repudiation_check(
            &self.contract.doc,
            Some(&self.contract.sigma_buy),
            Some(&self.contract.sigma_sel),
            self.clc_comm,
            self.ledger.tx_log(),
        )
    }
}

/// A signature on `contract`'s digest by `outsider`, which must not pass for
/// either signer's.
pub fn forged_half(contract: &SignedContract, outsider: &KeyPair) -> Signature {
    sign(&outsider.sk, &contract.contract_digest())
}

/// Whether `trace` starts at `INIT` and each step is a legal transition.
pub fn check_lifecycle_trace(trace: &[LifecycleState]) -> Result<(), String> {
    let Some(first) = trace.first() else { return Ok(()) };
    if *first != LifecycleState::init() {
        return Err(format!("trace starts at {first:?}"));
    }
    for pair in trace.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let legal = EVENTS.iter().any(|e| a.next(*e) == Some(b));
        if !legal || !b.is_consistent() || b.lifecycle.rank() > a.lifecycle.rank() + 1 || b.lifecycle < a.lifecycle {
            return Err(format!("illegal step {a:?} -> {b:?}"));
        }
    }
    Ok(())
}

pub const EVENTS: [LifecycleEvent; 5] = [
    LifecycleEvent::CommitmentRegistered,
    LifecycleEvent::EvidenceSubmitted,
    LifecycleEvent::Approved,
    LifecycleEvent::Disputed,
    LifecycleEvent::Settled,
];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StressReport {
    pub sessions: usize,
    pub transactions: u64,
    pub settlements: usize,
    pub rejected_outcomes: usize,
    pub replays_reverted: usize,
    pub conservation_checks: usize,
    pub conservation_violations: usize,
}

struct Pending {
    index: usize,
    parties: RentalParties,
    contract: SignedContract,
    k: FieldElement,
    leaf_index: u64,
}

/// Many rental sessions interleaved on one ledger, checking conservation
/// after every transaction.
pub fn conservation_stress(srs: &Srs, sessions: usize, seed: u64) -> StressReport {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut ledger = Ledger::new(srs.clone());
    let mut report = StressReport { sessions, ..Default::default() };
    let mut pending: Vec<Pending> = Vec::new();
    let mut settled: Vec<(EvalStatement, ProofBundle, PublicKey, PublicKey)> = Vec::new();
    let mut started = 0usize;

    let audit = |ledger: &Ledger, report: &mut StressReport| {
        report.conservation_checks += 1;
        if !ledger.is_conserved() {
            report.conservation_violations += 1;
        }
    };

    while started < sessions || !pending.is_empty() {
        let roll = rng.gen_range(0..10);
        if started < sessions && (pending.is_empty() || roll < 4) {
            let parties = RentalParties::from_seed(seed.wrapping_mul(1_000_003).wrapping_add(4 * started as u64));
            let doc = fixtures::rental_contract(&parties);
            let contract = crate::clc::sign_contract(&parties.tenant.sk, &parties.landlord.sk, doc);
            let v = contract.doc.value_v;
            let extra = rng.gen_range(0..=v);
            ledger.deposit(&parties.tenant.pk, v + extra).expect("deposit");
            audit(&ledger, &mut report);
            let k = random_field(&mut rng);
            let (commit, _) = proofsys::prove_commit(srs, &CommitWitness { k, pd: contract.program_digest().element() }).expect("prove_commit");
            let tx = ledger.submit_commitment(commit.clc_comm, v, &parties.tenant.pk).expect("commit");
            audit(&ledger, &mut report);
            let leaf_index = match tx.payload {
                crate::ledger::TxPayload::Commit { leaf_index, .. } => leaf_index,
                _ => unreachable!(),
            };
            pending.push(Pending { index: started, parties, contract, k, leaf_index });
            started += 1;
        } else if roll < 9 && !pending.is_empty() {
            let p = pending.swap_remove(rng.gen_range(0..pending.len()));
            let mut enclave = EnclaveInstance::install(p.contract.clone(), &mut rng).expect("install");
            let v = p.contract.doc.value_v;
            let report_hash: [u8; 32] = rng.gen();
            let inputs = match rng.gen_range(0..4) {
                0 => fixtures::approve_inputs(report_hash),
                1 => fixtures::dispute_inputs(&p.parties.tenant.sk, report_hash, v / 2, v - v / 2),
                _ => {
                    let t = rng.gen_range(0..=v);
                    fixtures::dispute_inputs(&p.parties.arbitrator.sk, report_hash, t, v - t)
                }
            };
            let attested = enclave.execute_evaluation(&inputs).expect("evaluation");
            if attested.outcome.is_reject() {
                report.rejected_outcomes += 1;
                continue;
            }
            let path = ledger.inclusion_proof(p.leaf_index).expect("path");
            let (statement, proof, _) =
                enclave.generate_settlement_proof(srs, p.k, path.root, &path.siblings, &path.dirs).expect("prove");
            let (ratio, complement) = (p.contract.doc.ratio_payee_pk().unwrap(), p.contract.doc.complement_payee_pk().unwrap());
            ledger.settle(&proof, &statement, &ratio, &complement).unwrap_or_else(|e| panic!("session {} settle: {e}", p.index));
            audit(&ledger, &mut report);
            report.settlements += 1;
            settled.push((statement, proof, ratio, complement));
        } else if !settled.is_empty() {
            let (s, pr, a, b) = &settled[rng.gen_range(0..settled.len())];
            if ledger.settle(pr, s, a, b) == Err(LedgerError::NullifierSpent) {
                report.replays_reverted += 1;
            }
            audit(&ledger, &mut report);
        }
    }
    report.transactions = ledger.height();
    report
}
