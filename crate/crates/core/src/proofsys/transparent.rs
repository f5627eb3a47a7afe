use sha2::{Digest as _, Sha256};

use super::bundle::{decode_fields, encode_fields};
use super::relation::{self, RelationId, RelationMetrics};
use super::{ProofBackend, ProofBundle, ProofError, Srs};
use crate::crypto::{hash_fields, hash_pair, FieldElement};

pub const TRANSPARENT_BACKEND_ID: &str = "transparent-v1";

const MIN_SECURITY_PARAM: u32 = 80;
const TAG_BYTES: usize = 32;

/// Proof = relation tag, witness encodings, binding tag.
///
/// The binding tag is SHA-256 over the Srs parameters, relation, statement
/// and witness, so any change to the statement or to the proof bytes, or a
/// switch of Srs, is caught by the verifier.
#[derive(Clone, Copy, Debug, Default)]
pub struct TransparentBackend;

fn binding_tag(srs: &Srs, relation: RelationId, statement: &[FieldElement], witness: &[FieldElement]) -> [u8; TAG_BYTES] {
    let mut h = Sha256::new();
    h.update(b"zkagree/transparent/bind");
    h.update((srs.parameters.len() as u32).to_be_bytes());
    h.update(&srs.parameters);
    h.update([relation.tag()]);
    h.update((statement.len() as u32).to_be_bytes());
    h.update(encode_fields(statement));
    h.update((witness.len() as u32).to_be_bytes());
    h.update(encode_fields(witness));
    h.finalize().into()
}

/// Cost of a satisfying evaluation instance with an all-zero witness.
fn largest_relation() -> RelationMetrics {
    let zero = FieldElement::ZERO;
    let witness = vec![zero; RelationId::Evaluation.witness_len()];
    let root = (0..relation::TREE_DEPTH).fold(hash_pair(zero, zero), |node, _| hash_pair(node, zero));
    let statement = [root, hash_fields(&[zero]).expect("arity 1"), zero, zero, zero];
    let (res, metrics) = relation::check(RelationId::Evaluation, &statement, &witness);
    debug_assert!(res.is_ok());
    metrics
}

impl TransparentBackend {
    /// Assembles a proof without checking the relation.
    ///
    /// For tests that need proofs of false statements; `prove` is the
    /// honest entry point.
    pub fn assemble(
        &self,
        srs: &Srs,
        relation: RelationId,
        statement: &[FieldElement],
        witness: &[FieldElement],
    ) -> ProofBundle {
        let mut proof = Vec::with_capacity(1 + 32 * witness.len() + TAG_BYTES);
        proof.push(relation.tag());
        proof.extend(encode_fields(witness));
        proof.extend(binding_tag(srs, relation, statement, witness));
        ProofBundle {
            backend_id: srs.backend_id.clone(),
            statement: encode_fields(statement),
            proof,
        }
    }

    /// Splits proof bytes into the relation and witness they carry.
    pub fn open(&self, proof: &ProofBundle) -> Option<(RelationId, Vec<FieldElement>)> {
        let bytes = &proof.proof;
        if bytes.len() < 1 + TAG_BYTES {
            return None;
        }
        let relation = RelationId::from_tag(bytes[0])?;
        let witness = decode_fields(&bytes[1..bytes.len() - TAG_BYTES])?;
        (witness.len() == relation.witness_len()).then_some((relation, witness))
    }
}

impl ProofBackend for TransparentBackend {
    fn id(&self) -> &'static str {
        TRANSPARENT_BACKEND_ID
    }

    fn setup(&self, security_param: u32, max_relation_size: u64) -> Result<Srs, ProofError> {
        if security_param < MIN_SECURITY_PARAM {
            return Err(ProofError::UnsupportedBackend(format!(
                "security parameter {security_param} below {MIN_SECURITY_PARAM}"
            )));
        }
        let needed = largest_relation().size();
        if max_relation_size < needed {
            return Err(ProofError::UnsupportedBackend(format!(
                "max_relation_size {max_relation_size} smaller than required {needed}"
            )));
        }
        let mut h = Sha256::new();
        h.update(b"zkagree/transparent/setup");
        h.update(security_param.to_be_bytes());
        h.update(max_relation_size.to_be_bytes());
        Ok(Srs {
            backend_id: TRANSPARENT_BACKEND_ID.to_string(),
            parameters: h.finalize().to_vec(),
            max_relation_size,
        })
    }

    fn prove(
        &self,
        srs: &Srs,
        relation: RelationId,
        statement: &[FieldElement],
        witness: &[FieldElement],
    ) -> Result<ProofBundle, ProofError> {
        if srs.backend_id != TRANSPARENT_BACKEND_ID {
            return Err(ProofError::UnsupportedBackend(srs.backend_id.clone()));
        }
        let (res, metrics) = relation::check(relation, statement, witness);
        res.map_err(|u| ProofError::RelationUnsatisfied(u.0.to_string()))?;
        if metrics.size() > srs.max_relation_size {
            return Err(ProofError::UnsupportedBackend("relation exceeds Srs size".into()));
        }
        Ok(self.assemble(srs, relation, statement, witness))
    }

    fn verify(&self, srs: &Srs, relation: RelationId, statement: &[FieldElement], proof: &ProofBundle) -> bool {
        if srs.backend_id != TRANSPARENT_BACKEND_ID || proof.backend_id != srs.backend_id {
            return false;
        }
        if statement.len() != relation.statement_len() || proof.statement != encode_fields(statement) {
            return false;
        }
        let Some((proof_relation, witness)) = self.open(proof) else { return false };
        if proof_relation != relation {
            return false;
        }
        let tag = &proof.proof[proof.proof.len() - TAG_BYTES..];
        if tag != binding_tag(srs, relation, statement, &witness) {
            return false;
        }
        let (res, metrics) = relation::check(relation, statement, &witness);
        res.is_ok() && metrics.size() <= srs.max_relation_size
    }
}
