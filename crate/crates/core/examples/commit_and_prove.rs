//! The two relations: prove and verify a commitment, then an evaluation
//! statement against a Merkle root.
//!
//! ```text
//! cargo run --example commit_and_prove
//! ```

use zkagree::crypto::{hash_fields, FieldElement};
use zkagree::ledger::MerkleTree;
use zkagree::proofsys::{
    default_srs, prove_commit, prove_eval, setup, verify_commit, verify_eval, CommitWitness, EvalStatement, EvalWitness,
};

fn main() {
    let srs = default_srs();
    println!("backend {} (max relation size {})", srs.backend_id, srs.max_relation_size);

    let k = FieldElement::from_u64(0xdead_beef);
    let pd = FieldElement::from_u64(0x5eed);
    let (commit, proof) = prove_commit(&srs, &CommitWitness { k, pd }).unwrap();
    println!("h        = {}", commit.h);
    println!("clc_comm = {}", commit.clc_comm);
    println!("commit proof: {} bytes, verifies: {}", proof.to_bytes().len(), verify_commit(&srs, &commit, &proof));

    let mut tree = MerkleTree::new();
    tree.insert(FieldElement::from_u64(1)).unwrap();
    let (index, root) = tree.insert(commit.clc_comm).unwrap();
    let path = tree.inclusion_proof(index).unwrap();

    let statement = EvalStatement {
        rt: root,
        h: commit.h,
        parties_digest: hash_fields(&[FieldElement::from_u64(3)]).unwrap(),
        rat_numerator: 750,
        v: 1000,
    };
    let witness = EvalWitness { k, pd, merkle_path: path.siblings, merkle_dirs: path.dirs };
    let eval = prove_eval(&srs, &witness, &statement).unwrap();
    println!("eval proof: {} bytes, verifies: {}", eval.to_bytes().len(), verify_eval(&srs, &statement, &eval));

    let inflated = EvalStatement { rat_numerator: 1001, ..statement };
    println!("prove with rat > v: {:?}", prove_eval(&srs, &witness, &inflated).err());
    let lied = EvalStatement { rat_numerator: 900, ..statement };
    println!("honest proof, edited statement, verifies: {}", verify_eval(&srs, &lied, &eval));

    let other = setup(128, 8192).unwrap();
    println!("verifies under a different setup: {}", verify_eval(&other, &statement, &eval));
}
