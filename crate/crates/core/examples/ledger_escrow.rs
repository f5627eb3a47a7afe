//! The escrow ledger on its own: deposits, a commitment, settlement gated by
//! an evaluation proof, a replay, and snapshot/restore.
//!
//! ```text
//! cargo run --example ledger_escrow
//! ```

use zkagree::crypto::{hash_fields, keygen_from_seed, FieldElement};
use zkagree::ledger::{Ledger, TxPayload};
use zkagree::proofsys::{default_srs, prove_eval, EvalStatement, EvalWitness};

fn main() {
    let mut ledger = Ledger::new(default_srs());
    let (buyer, seller) = (keygen_from_seed(1).pk, keygen_from_seed(2).pk);

    ledger.deposit(&buyer, 1_000).unwrap();
    let (k, pd) = (FieldElement::from_u64(11), FieldElement::from_u64(22));
    let tx = ledger.submit_commitment(hash_fields(&[k, pd]).unwrap(), 800, &buyer).unwrap();
    let TxPayload::Commit { leaf_index, .. } = tx.payload else { unreachable!() };
    println!("committed leaf {leaf_index}; buyer {} pool {}", ledger.balance(&buyer), ledger.escrow_pool());

    let path = ledger.inclusion_proof(leaf_index).unwrap();
    let statement = EvalStatement {
        rt: path.root,
        h: hash_fields(&[k]).unwrap(),
        parties_digest: FieldElement::from_u64(5),
        rat_numerator: 600,
        v: 800,
    };
    let witness = EvalWitness { k, pd, merkle_path: path.siblings, merkle_dirs: path.dirs };
    let proof = prove_eval(ledger.srs(), &witness, &statement).unwrap();

    ledger.settle(&proof, &statement, &seller, &buyer).unwrap();
    println!("settled 600/200: seller {} buyer {} pool {}", ledger.balance(&seller), ledger.balance(&buyer), ledger.escrow_pool());
    println!("replay: {:?}", ledger.settle(&proof, &statement, &seller, &buyer));
    println!("conserved: {}", ledger.is_conserved());

    let json = ledger.to_json();
    let restored = Ledger::from_json(&json).unwrap();
    println!("snapshot {} bytes, state hash preserved: {}", json.len(), restored.state_hash() == ledger.state_hash());
    print!("{}", ledger.tx_log_ldjson());
}
