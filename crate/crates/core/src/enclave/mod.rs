//! Simulated trusted execution: a sealed contract, a measurement of its
//! logic, and signed attestations over whatever leaves the enclave.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clc::{evaluate_checked, ClcError, ExternalInputs, Outcome, SignedContract};
use crate::crypto::{hash_fields, keygen_from_rng, sign, verify, Digest, FieldElement, KeyPair, PublicKey, Signature};
use crate::ledger::root_from_path;
use crate::proofsys::{self, parties_digest, EvalStatement, EvalWitness, ProofBundle, ProofError, Srs, TREE_DEPTH};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnclaveError {
    #[error("installation refused: {0}")]
    BadSignature(String),
    #[error(transparent)]
    Contract(ClcError),
    #[error("inputs rejected: {0}")]
    SchemaViolation(String),
    #[error("no evaluation has run yet")]
    NoOutcome,
    #[error("the evaluation rejected; nothing to settle")]
    OutcomeRejected,
    #[error("merkle path does not lead to the given root")]
    StaleRoot,
    #[error(transparent)]
    Proof(#[from] ProofError),
}

impl From<ClcError> for EnclaveError {
    fn from(e: ClcError) -> Self {
        match e {
            ClcError::BadSignature(role) => EnclaveError::BadSignature(role),
            ClcError::SchemaViolation(m) => EnclaveError::SchemaViolation(m),
            other => EnclaveError::Contract(other),
        }
    }
}

/// An outcome together with the public fields it is bound to, signed by the
/// enclave's attestation key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttestedOutcome {
    pub measurement: Digest,
    pub outcome: Outcome,
    /// `[v, parties_digest]` after evaluation, followed by `[rt, h]` once a
    /// settlement proof exists.
    pub bound_fields: Vec<FieldElement>,
    pub output_digest: Digest,
    pub quote: Signature,
}

/// JSON form of an attestation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttestationRecord {
    pub measurement_hex: String,
    pub attestation_pk_hex: String,
    pub outcome: Outcome,
    pub output_digest_hex: String,
    pub quote_hex: String,
}

fn output_digest(measurement: &Digest, outcome: &Outcome, bound: &[FieldElement]) -> Digest {
    let numerator = match outcome {
        Outcome::Ratio { numerator } => *numerator,
        _ => 0,
    };
    let mut items = vec![measurement.element(), FieldElement::from_u64(outcome.tag()), FieldElement::from_u128(numerator)];
    items.extend_from_slice(bound);
    Digest(hash_fields(&items).expect("attestation digest has at most 7 inputs"))
}

impl AttestedOutcome {
    /// Recomputes the output digest and checks the quote under `attestation_pk`.
    pub fn verify(&self, attestation_pk: &PublicKey) -> bool {
        self.bound_fields.len() <= 4
            && output_digest(&self.measurement, &self.outcome, &self.bound_fields) == self.output_digest
            && verify(attestation_pk, &self.output_digest, &self.quote)
    }

    pub fn record(&self, attestation_pk: &PublicKey) -> AttestationRecord {
        AttestationRecord {
            measurement_hex: self.measurement.to_hex(),
            attestation_pk_hex: attestation_pk.to_hex(),
            outcome: self.outcome,
            output_digest_hex: self.output_digest.to_hex(),
            quote_hex: self.quote.to_hex(),
        }
    }
}

pub struct EnclaveInstance {
    measurement: Digest,
    attestation: KeyPair,
    sealed: SignedContract,
    outcome: Option<Outcome>,
}

impl std::fmt::Debug for EnclaveInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnclaveInstance")
            .field("measurement", &self.measurement)
            .field("attestation_pk", &self.attestation.pk)
            .finish_non_exhaustive()
    }
}

impl EnclaveInstance {
    /// Seals `contract` after checking both party signatures.
    pub fn install<R: RngCore + CryptoRng>(contract: SignedContract, rng: &mut R) -> Result<Self, EnclaveError> {
        contract.verify_signatures()?;
        contract.doc.validate()?;
        Ok(Self {
            measurement: contract.doc.logic.digest(),
            attestation: keygen_from_rng(rng),
            sealed: contract,
            outcome: None,
        })
    }

    pub fn measurement(&self) -> Digest {
        self.measurement
    }

    pub fn attestation_pk(&self) -> PublicKey {
        self.attestation.pk
    }

    fn parties_digest(&self) -> Result<FieldElement, EnclaveError> {
        let doc = &self.sealed.doc;
        Ok(parties_digest(&doc.buyer_pk()?, &doc.seller_pk()?, &doc.evaluator_pk()?))
    }

    fn attest(&self, outcome: Outcome, bound: Vec<FieldElement>) -> AttestedOutcome {
        let output_digest = output_digest(&self.measurement, &outcome, &bound);
        AttestedOutcome {
            measurement: self.measurement,
            outcome,
            bound_fields: bound,
            output_digest,
            quote: sign(&self.attestation.sk, &output_digest),
        }
    }

    /// Runs the sealed logic on `inputs`. `Reject` is an ordinary result.
    pub fn execute_evaluation(&mut self, inputs: &ExternalInputs) -> Result<AttestedOutcome, EnclaveError> {
        let outcome = evaluate_checked(&self.sealed.doc, inputs)?;
        self.outcome = Some(outcome);
        let bound = vec![FieldElement::from_u128(self.sealed.doc.value_v), self.parties_digest()?];
        Ok(self.attest(outcome, bound))
    }

    /// Builds the evaluation statement from sealed data and proves it.
    pub fn generate_settlement_proof(
        &self,
        srs: &Srs,
        k: FieldElement,
        rt: FieldElement,
        merkle_path: &[FieldElement; TREE_DEPTH],
        merkle_dirs: &[bool; TREE_DEPTH],
    ) -> Result<(EvalStatement, ProofBundle, AttestedOutcome), EnclaveError> {
        let outcome = self.outcome.ok_or(EnclaveError::NoOutcome)?;
        let v = self.sealed.doc.value_v;
        let rat_numerator = outcome.numerator(v).ok_or(EnclaveError::OutcomeRejected)?;
        let pd = self.sealed.program_digest().element();
        let leaf = hash_fields(&[k, pd]).expect("arity 2");
        if root_from_path(leaf, merkle_path, merkle_dirs) != rt {
            return Err(EnclaveError::StaleRoot);
        }
        let statement = EvalStatement {
            rt,
            h: hash_fields(&[k]).expect("arity 1"),
            parties_digest: self.parties_digest()?,
            rat_numerator,
            v,
        };
        let witness = EvalWitness { k, pd, merkle_path: *merkle_path, merkle_dirs: *merkle_dirs };
        let proof = proofsys::prove_eval(srs, &witness, &statement)?;
        debug_assert_eq!(statement.rat_numerator, outcome.numerator(v).unwrap_or_default());
        let bound = vec![FieldElement::from_u128(v), statement.parties_digest, statement.rt, statement.h];
        let attested = self.attest(outcome, bound);
        Ok((statement, proof, attested))
    }
}
