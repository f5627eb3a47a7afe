//! Field arithmetic, the protocol hash, document digests and signatures.

pub mod field;
pub mod golden;
pub mod poseidon;
mod signature;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::FieldElement;
pub use signature::{keygen, keygen_from_rng, keygen_from_seed, sign, verify, KeyPair, PublicKey, SecretKey, Signature};

/// Largest number of elements `hash_fields` accepts in one call.
pub const MAX_HASH_INPUTS: usize = poseidon::MAX_WIDTH - 1;

/// Bytes packed into each field element by `digest_document`.
pub const CHUNK_BYTES: usize = 31;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CryptoError {
    #[error("hash_fields called with no inputs")]
    EmptyInput,
    #[error("hash_fields called with {0} inputs, at most {MAX_HASH_INPUTS} allowed")]
    TooManyInputs(usize),
    #[error("field encoding is not reduced modulo p")]
    NonCanonicalField,
    #[error("invalid hex: {0}")]
    BadHex(String),
    #[error("malformed key")]
    MalformedKey,
    #[error("entropy source failed: {0}")]
    EntropyFailure(String),
}

/// Compresses 1..=16 field elements into one.
pub fn hash_fields(inputs: &[FieldElement]) -> Result<FieldElement, CryptoError> {
    match inputs.len() {
        0 => Err(CryptoError::EmptyInput),
        n if n > MAX_HASH_INPUTS => Err(CryptoError::TooManyInputs(n)),
        _ => Ok(poseidon::hash(inputs)),
    }
}

/// Two-to-one compression used for Merkle nodes and folds.
pub fn hash_pair(left: FieldElement, right: FieldElement) -> FieldElement {
    poseidon::hash(&[left, right])
}

/// A field-typed digest of a byte string.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Digest(pub FieldElement);

impl Digest {
    pub fn element(&self) -> FieldElement {
        self.0
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_be_bytes()
    }

    pub fn to_hex(&self) -> String {
        self.0.to_hex()
    }
}

impl std::fmt::Display for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Splits `doc` into 31-byte little-endian chunks and folds them left with
/// `hash([acc, chunk])`, starting from `hash([chunk_0])`.
///
/// The empty document is treated as a single zero chunk.
pub fn digest_document(doc: &[u8]) -> Digest {
    let mut chunks = doc.chunks(CHUNK_BYTES).map(FieldElement::from_le_bytes_mod_order);
    let first = chunks.next().unwrap_or(FieldElement::ZERO);
    let acc = chunks.fold(poseidon::hash(&[first]), hash_pair);
    Digest(acc)
}

/// Field encoding of a public key, as it enters proof statements.
pub fn public_key_field(pk: &PublicKey) -> FieldElement {
    digest_document(pk.as_bytes()).element()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_fields_rejects_bad_arity() {
        assert_eq!(hash_fields(&[]), Err(CryptoError::EmptyInput));
        let many = vec![FieldElement::ONE; 17];
        assert_eq!(hash_fields(&many), Err(CryptoError::TooManyInputs(17)));
        assert!(hash_fields(&many[..16]).is_ok());
    }

    #[test]
    fn empty_document_digest_is_hash_of_zero() {
        let expected = hash_fields(&[FieldElement::ZERO]).unwrap();
        assert_eq!(digest_document(b"").element(), expected);
    }

    #[test]
    fn single_chunk_document() {
        let doc = b"abc";
        let chunk = FieldElement::from_le_bytes_mod_order(doc);
        assert_eq!(digest_document(doc).element(), hash_fields(&[chunk]).unwrap());
    }

    #[test]
    fn chunk_boundary_changes_fold_depth() {
        let a = vec![7u8; 31];
        let b = vec![7u8; 32];
        let c0 = FieldElement::from_le_bytes_mod_order(&b[..31]);
        let c1 = FieldElement::from_le_bytes_mod_order(&b[31..]);
        let expect_b = hash_pair(hash_fields(&[c0]).unwrap(), c1);
        assert_eq!(digest_document(&b).element(), expect_b);
        assert_ne!(digest_document(&a), digest_document(&b));
    }

    #[test]
    fn order_matters() {
        let a = FieldElement::from_u64(1);
        let b = FieldElement::from_u64(2);
        assert_ne!(hash_fields(&[a, b]).unwrap(), hash_fields(&[b, a]).unwrap());
    }
}
