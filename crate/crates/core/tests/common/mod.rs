#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use zkagree::crypto::{hash_fields, keygen_from_seed, FieldElement, KeyPair};
use zkagree::ledger::{Ledger, TxPayload};
use zkagree::orchestrator::random_field;
use zkagree::proofsys::{prove_eval, EvalStatement, EvalWitness, ProofBundle, TREE_DEPTH};

/// Root of the depth-20 tree over `leaves`, rebuilt level by level.
pub fn oracle_root(leaves: &[FieldElement]) -> FieldElement {
    let h = |a: FieldElement, b: FieldElement| hash_fields(&[a, b]).unwrap();
    let mut zero = FieldElement::ZERO;
    let mut layer: Vec<FieldElement> = leaves.to_vec();
    for _ in 0..TREE_DEPTH {
        if layer.is_empty() {
            layer.push(zero);
        }
        if layer.len() % 2 == 1 {
            layer.push(zero);
        }
        layer = layer.chunks(2).map(|p| h(p[0], p[1])).collect();
        zero = h(zero, zero);
    }
    layer[0]
}

/// A committed leaf the test knows the opening of.
pub struct Opening {
    pub k: FieldElement,
    pub pd: FieldElement,
    pub leaf_index: u64,
    pub v: u128,
}

pub fn commit(ledger: &mut Ledger, rng: &mut ChaCha20Rng, depositor: &KeyPair, v: u128) -> Opening {
    let k = random_field(rng);
    let pd = random_field(rng);
    ledger.deposit(&depositor.pk, v).unwrap();
    let tx = ledger.submit_commitment(hash_fields(&[k, pd]).unwrap(), v, &depositor.pk).unwrap();
    let TxPayload::Commit { leaf_index, .. } = tx.payload else { panic!("not a commit") };
    Opening { k, pd, leaf_index, v }
}

/// Settlement material for `o` against the ledger's current root.
pub fn settlement(ledger: &Ledger, o: &Opening, rat: u128) -> (EvalStatement, ProofBundle) {
    let path = ledger.inclusion_proof(o.leaf_index).unwrap();
    let st = EvalStatement {
        rt: path.root,
        h: hash_fields(&[o.k]).unwrap(),
        parties_digest: FieldElement::from_u64(77),
        rat_numerator: rat,
        v: o.v,
    };
    let w = EvalWitness { k: o.k, pd: o.pd, merkle_path: path.siblings, merkle_dirs: path.dirs };
    let proof = prove_eval(ledger.srs(), &w, &st).unwrap();
    (st, proof)
}

pub fn accounts(base: u64) -> (KeyPair, KeyPair, KeyPair) {
    (keygen_from_seed(base), keygen_from_seed(base + 1), keygen_from_seed(base + 2))
}

pub fn random_leaves(rng: &mut ChaCha20Rng, n: usize) -> Vec<FieldElement> {
    (0..n).map(|_| FieldElement::from_u128(rng.gen())).collect()
}
