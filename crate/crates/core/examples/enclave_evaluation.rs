//! Installing a signed contract in an enclave instance, evaluating it, and
//! producing the attested settlement proof.
//!
//! ```text
//! cargo run --example enclave_evaluation
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use zkagree::clc::sign_contract;
use zkagree::crypto::hash_fields;
use zkagree::enclave::EnclaveInstance;
use zkagree::fixtures::{dispute_inputs, rental_contract, RentalParties, ETH};
use zkagree::ledger::{Ledger, TxPayload};
use zkagree::orchestrator::random_field;
use zkagree::proofsys::{default_srs, verify_eval};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let parties = RentalParties::from_seed(20);
    let contract = sign_contract(&parties.tenant.sk, &parties.landlord.sk, rental_contract(&parties));

    let srs = default_srs();
    let mut ledger = Ledger::new(srs.clone());
    let k = random_field(&mut rng);
    let comm = hash_fields(&[k, contract.program_digest().element()]).unwrap();
    ledger.deposit(&parties.tenant.pk, 2 * ETH).unwrap();
    let tx = ledger.submit_commitment(comm, contract.doc.value_v, &parties.tenant.pk).unwrap();
    let TxPayload::Commit { leaf_index, .. } = tx.payload else { unreachable!() };

    let ratio = contract.doc.ratio_payee_pk().unwrap();
    let complement = contract.doc.complement_payee_pk().unwrap();
    let mut enclave = EnclaveInstance::install(contract, &mut rng).unwrap();
    println!("measurement    {}", enclave.measurement());
    println!("attestation pk {}", enclave.attestation_pk().to_hex());

    let inputs = dispute_inputs(&parties.arbitrator.sk, [9; 32], ETH / 4, 7 * ETH / 4);
    let attested = enclave.execute_evaluation(&inputs).unwrap();
    println!("outcome {} (quote verifies: {})", attested.outcome, attested.verify(&enclave.attestation_pk()));

    let path = ledger.inclusion_proof(leaf_index).unwrap();
    let (statement, proof, bound) = enclave.generate_settlement_proof(&srs, k, path.root, &path.siblings, &path.dirs).unwrap();
    println!("statement rat/v = {}/{}", statement.rat_numerator, statement.v);
    println!("proof verifies: {}; bound fields after proving: {}", verify_eval(&srs, &statement, &proof), bound.bound_fields.len());

    ledger.settle(&proof, &statement, &ratio, &complement).unwrap();
    println!("tenant {} wei, landlord {} wei", ledger.balance(&parties.tenant.pk), ledger.balance(&parties.landlord.pk));
}

