//! Relation sizes and prove/verify timings of the transparent backend.
//!
//! The timings describe this backend only. They are not comparable with
//! timings of a succinct proof system.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::crypto::{hash_fields, FieldElement};
use crate::ledger::MerkleTree;
use crate::proofsys::{
    self, relation_metrics, CommitStatement, CommitWitness, EvalStatement, EvalWitness, RelationId, RelationMetrics, Srs,
};

pub const DEFAULT_ITERATIONS: usize = 100;

pub const NOT_COMPARABLE: &str =
    "transparent backend: proofs carry the witness and are re-executed by the verifier; timings are not comparable to a succinct proof system";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationBench {
    pub relation: RelationId,
    pub hash_invocations: u64,
    pub gadget_ops: u64,
    pub field_ops: u64,
    pub relation_size: u64,
    pub public_inputs: usize,
    pub iterations: usize,
    pub prove_median_us: f64,
    pub verify_median_us: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub backend_id: String,
    pub note: String,
    pub relations: Vec<RelationBench>,
}

impl BenchReport {
    pub fn relation(&self, id: RelationId) -> Option<&RelationBench> {
        self.relations.iter().find(|r| r.relation == id)
    }

    pub fn table(&self) -> String {
        let mut out = format!("backend: {}\nnote: {}\n\n", self.backend_id, self.note);
        out.push_str(&format!(
            "{:<12} {:>8} {:>10} {:>12} {:>8} {:>8} {:>14} {:>14}\n",
            "relation", "hashes", "gadget_ops", "field_ops", "size", "inputs", "prove_med_us", "verify_med_us"
        ));
        for r in &self.relations {
            out.push_str(&format!(
                "{:<12} {:>8} {:>10} {:>12} {:>8} {:>8} {:>14.1} {:>14.1}\n",
                format!("{:?}", r.relation).to_lowercase(),
                r.hash_invocations,
                r.gadget_ops,
                r.field_ops,
                r.relation_size,
                r.public_inputs,
                r.prove_median_us,
                r.verify_median_us
            ));
        }
        out
    }
}

fn median_us(mut samples: Vec<Duration>) -> f64 {
    samples.sort();
    let n = samples.len();
    let mid = if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2
    };
    mid.as_secs_f64() * 1e6
}

fn time<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().max(Duration::from_nanos(1)))
}

fn entry(relation: RelationId, m: RelationMetrics, iterations: usize, prove: Vec<Duration>, verify: Vec<Duration>) -> RelationBench {
    RelationBench {
        relation,
        hash_invocations: m.hash_invocations,
        gadget_ops: m.gadget_ops,
        field_ops: m.field_ops,
        relation_size: m.size(),
        public_inputs: relation.statement_len(),
        iterations,
        prove_median_us: median_us(prove),
        verify_median_us: median_us(verify),
    }
}

/// Proves and verifies each relation `iterations` times on a fixed instance.
pub fn run(srs: &Srs, iterations: usize) -> BenchReport {
    let iterations = iterations.max(1);
    let k = FieldElement::from_u64(0x5eed);
    let pd = hash_fields(&[FieldElement::from_u64(7)]).expect("arity 1");

    let cw = CommitWitness { k, pd };
    let cs = CommitStatement::from_witness(&cw);
    let (ok, cm) = relation_metrics(RelationId::Commitment, &cs.fields(), &cw.fields());
    assert!(ok, "benchmark commitment instance satisfies the relation");
    let (mut prove, mut verify) = (Vec::new(), Vec::new());
    for _ in 0..iterations {
        let ((_, bundle), dp) = time(|| proofsys::prove_commit(srs, &cw).expect("prove"));
        let (accepted, dv) = time(|| proofsys::verify_commit(srs, &cs, &bundle));
        assert!(accepted);
        prove.push(dp);
        verify.push(dv);
    }
    let commit = entry(RelationId::Commitment, cm, iterations, prove, verify);

    let mut tree = MerkleTree::new();
    for i in 0..5 {
        tree.insert(FieldElement::from_u64(1000 + i)).expect("capacity");
    }
    let (leaf_index, _) = tree.insert(cs.clc_comm).expect("capacity");
    let path = tree.inclusion_proof(leaf_index).expect("inserted");
    let v = 2_000_000_000_000_000_000u128;
    let es = EvalStatement { rt: path.root, h: cs.h, parties_digest: FieldElement::from_u64(9), rat_numerator: v / 4 * 3, v };
    let ew = EvalWitness { k, pd, merkle_path: path.siblings, merkle_dirs: path.dirs };
    let (ok, em) = relation_metrics(RelationId::Evaluation, &es.fields(), &ew.fields());
    assert!(ok, "benchmark evaluation instance satisfies the relation");
    let (mut prove, mut verify) = (Vec::new(), Vec::new());
    for _ in 0..iterations {
        let (bundle, dp) = time(|| proofsys::prove_eval(srs, &ew, &es).expect("prove"));
        let (accepted, dv) = time(|| proofsys::verify_eval(srs, &es, &bundle));
        assert!(accepted);
        prove.push(dp);
        verify.push(dv);
    }
    let eval = entry(RelationId::Evaluation, em, iterations, prove, verify);

    BenchReport { backend_id: srs.backend_id.clone(), note: NOT_COMPARABLE.to_string(), relations: vec![commit, eval] }
}
