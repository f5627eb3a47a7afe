use serde::{Deserialize, Serialize};

use super::ProofError;
use crate::crypto::FieldElement;

/// A proof together with the statement it was produced for.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProofBundle {
    pub backend_id: String,
    #[serde(with = "super::hex_bytes")]
    pub statement: Vec<u8>,
    #[serde(with = "super::hex_bytes")]
    pub proof: Vec<u8>,
}

pub(crate) fn encode_fields(fields: &[FieldElement]) -> Vec<u8> {
    fields.iter().flat_map(|f| f.to_be_bytes()).collect()
}

pub(crate) fn decode_fields(bytes: &[u8]) -> Option<Vec<FieldElement>> {
    if bytes.len() % 32 != 0 {
        return None;
    }
    bytes
        .chunks_exact(32)
        .map(|c| FieldElement::from_be_bytes_canonical(c.try_into().expect("32-byte chunk")).ok())
        .collect()
}

fn put_block(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

fn take_block<'a>(input: &mut &'a [u8]) -> Result<&'a [u8], ProofError> {
    if input.len() < 4 {
        return Err(ProofError::Malformed("truncated length prefix".into()));
    }
    let (len, rest) = input.split_at(4);
    let len = u32::from_be_bytes(len.try_into().unwrap()) as usize;
    if rest.len() < len {
        return Err(ProofError::Malformed("truncated block".into()));
    }
    let (block, rest) = rest.split_at(len);
    *input = rest;
    Ok(block)
}

impl ProofBundle {
    /// Statement fields decoded from their 32-byte encodings.
    pub fn statement_fields(&self) -> Option<Vec<FieldElement>> {
        decode_fields(&self.statement)
    }

    /// Length-prefixed layout: backend id, statement, proof.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + self.backend_id.len() + self.statement.len() + self.proof.len());
        put_block(&mut out, self.backend_id.as_bytes());
        put_block(&mut out, &self.statement);
        put_block(&mut out, &self.proof);
        out
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self, ProofError> {
        let input = &mut bytes;
        let backend_id = String::from_utf8(take_block(input)?.to_vec())
            .map_err(|_| ProofError::Malformed("backend id is not utf-8".into()))?;
        let statement = take_block(input)?.to_vec();
        let proof = take_block(input)?.to_vec();
        if !input.is_empty() {
            return Err(ProofError::Malformed("trailing bytes".into()));
        }
        if statement.len() % 32 != 0 {
            return Err(ProofError::Malformed("statement is not a sequence of field encodings".into()));
        }
        Ok(Self { backend_id, statement, proof })
    }
}
