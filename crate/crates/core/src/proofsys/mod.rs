//! Setup/prove/verify boundary for the commitment and evaluation relations.
//!
//! Only the transparent backend ships. Its proofs carry the witness in the
//! clear, so they give completeness and soundness but hide nothing.

mod bundle;
pub mod relation;
mod transparent;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{hash_fields, public_key_field, FieldElement, PublicKey};

pub use bundle::ProofBundle;
pub use relation::{RelationId, RelationMetrics, TREE_DEPTH};
pub use transparent::{TransparentBackend, TRANSPARENT_BACKEND_ID};

/// Default relation-size budget; both relations fit with room to spare.
pub const DEFAULT_MAX_RELATION_SIZE: u64 = 1 << 12;

pub const DEFAULT_SECURITY_PARAM: u32 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofError {
    #[error("unsupported backend configuration: {0}")]
    UnsupportedBackend(String),
    #[error("relation unsatisfied: {0}")]
    RelationUnsatisfied(String),
    #[error("malformed proof bundle: {0}")]
    Malformed(String),
}

/// Public parameters produced by `setup`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Srs {
    pub backend_id: String,
    #[serde(with = "hex_bytes")]
    pub parameters: Vec<u8>,
    pub max_relation_size: u64,
}

pub trait ProofBackend {
    fn id(&self) -> &'static str;
    fn setup(&self, security_param: u32, max_relation_size: u64) -> Result<Srs, ProofError>;
    fn prove(
        &self,
        srs: &Srs,
        relation: RelationId,
        statement: &[FieldElement],
        witness: &[FieldElement],
    ) -> Result<ProofBundle, ProofError>;
    fn verify(&self, srs: &Srs, relation: RelationId, statement: &[FieldElement], proof: &ProofBundle) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitStatement {
    pub h: FieldElement,
    pub clc_comm: FieldElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommitWitness {
    pub k: FieldElement,
    pub pd: FieldElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalStatement {
    pub rt: FieldElement,
    pub h: FieldElement,
    pub parties_digest: FieldElement,
    #[serde(with = "crate::clc::amount::serde_u128")]
    pub rat_numerator: u128,
    #[serde(with = "crate::clc::amount::serde_u128")]
    pub v: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalWitness {
    pub k: FieldElement,
    pub pd: FieldElement,
    pub merkle_path: [FieldElement; TREE_DEPTH],
    pub merkle_dirs: [bool; TREE_DEPTH],
}

impl CommitStatement {
    pub fn from_witness(w: &CommitWitness) -> Self {
        Self {
            h: hash_fields(&[w.k]).expect("arity 1"),
            clc_comm: hash_fields(&[w.k, w.pd]).expect("arity 2"),
        }
    }

    pub fn fields(&self) -> Vec<FieldElement> {
        vec![self.h, self.clc_comm]
    }
}

impl CommitWitness {
    pub fn fields(&self) -> Vec<FieldElement> {
        vec![self.k, self.pd]
    }
}

impl EvalStatement {
    pub fn fields(&self) -> Vec<FieldElement> {
        vec![
            self.rt,
            self.h,
            self.parties_digest,
            FieldElement::from_u128(self.rat_numerator),
            FieldElement::from_u128(self.v),
        ]
    }

    /// Inverse of `fields`; `None` unless exactly five elements with the
    /// last two below 2^128.
    pub fn from_fields(fields: &[FieldElement]) -> Option<Self> {
        let [rt, h, parties_digest, rat, v] = fields else { return None };
        Some(Self {
            rt: *rt,
            h: *h,
            parties_digest: *parties_digest,
            rat_numerator: rat.to_u128()?,
            v: v.to_u128()?,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        bundle::encode_fields(&self.fields())
    }
}

impl EvalWitness {
    pub fn fields(&self) -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(RelationId::Evaluation.witness_len());
        out.push(self.k);
        out.push(self.pd);
        out.extend_from_slice(&self.merkle_path);
        out.extend(self.merkle_dirs.iter().map(|&b| if b { FieldElement::ONE } else { FieldElement::ZERO }));
        out
    }
}

/// `hash_fields` over the field encodings of the buyer, seller and evaluator keys.
pub fn parties_digest(pk_buy: &PublicKey, pk_sel: &PublicKey, pk_eva: &PublicKey) -> FieldElement {
    hash_fields(&[public_key_field(pk_buy), public_key_field(pk_sel), public_key_field(pk_eva)]).expect("arity 3")
}

/// Transparent setup with the given parameters.
pub fn setup(security_param: u32, max_relation_size: u64) -> Result<Srs, ProofError> {
    TransparentBackend.setup(security_param, max_relation_size)
}

/// Transparent setup with default parameters.
pub fn default_srs() -> Srs {
    setup(DEFAULT_SECURITY_PARAM, DEFAULT_MAX_RELATION_SIZE).expect("default parameters are supported")
}

fn backend_for(srs: &Srs) -> Option<TransparentBackend> {
    (srs.backend_id == TRANSPARENT_BACKEND_ID).then_some(TransparentBackend)
}

pub fn prove_commit(srs: &Srs, witness: &CommitWitness) -> Result<(CommitStatement, ProofBundle), ProofError> {
    let backend = backend_for(srs).ok_or_else(|| ProofError::UnsupportedBackend(srs.backend_id.clone()))?;
    let statement = CommitStatement::from_witness(witness);
    let bundle = backend.prove(srs, RelationId::Commitment, &statement.fields(), &witness.fields())?;
    Ok((statement, bundle))
}

pub fn prove_eval(srs: &Srs, witness: &EvalWitness, statement: &EvalStatement) -> Result<ProofBundle, ProofError> {
    let backend = backend_for(srs).ok_or_else(|| ProofError::UnsupportedBackend(srs.backend_id.clone()))?;
    backend.prove(srs, RelationId::Evaluation, &statement.fields(), &witness.fields())
}

/// Verifies `proof` against a statement given as concatenated 32-byte
/// big-endian field encodings. Malformed input of any kind rejects.
pub fn verify(srs: &Srs, relation: RelationId, statement: &[u8], proof: &ProofBundle) -> bool {
    let Some(fields) = bundle::decode_fields(statement) else { return false };
    match backend_for(srs) {
        Some(b) => b.verify(srs, relation, &fields, proof),
        None => false,
    }
}

pub fn verify_commit(srs: &Srs, statement: &CommitStatement, proof: &ProofBundle) -> bool {
    verify(srs, RelationId::Commitment, &bundle::encode_fields(&statement.fields()), proof)
}

pub fn verify_eval(srs: &Srs, statement: &EvalStatement, proof: &ProofBundle) -> bool {
    verify(srs, RelationId::Evaluation, &statement.to_bytes(), proof)
}

/// Runs a relation outside any backend and reports its cost.
pub fn relation_metrics(relation: RelationId, statement: &[FieldElement], witness: &[FieldElement]) -> (bool, RelationMetrics) {
    let (res, metrics) = relation::check(relation, statement, witness);
    (res.is_ok(), metrics)
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}
