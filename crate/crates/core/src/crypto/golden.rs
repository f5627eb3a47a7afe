//! Golden-vector file format for `hash_fields` and `digest_document`.

use serde::{Deserialize, Serialize};

use super::{digest_document, hash_fields, FieldElement};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorKind {
    HashFields,
    DigestDocument,
}

/// One `{input_hex[], output_hex}` pair. For `hash_fields` each input is a
/// 32-byte field encoding; for `digest_document` the single input is the raw
/// document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenVector {
    pub kind: VectorKind,
    pub input_hex: Vec<String>,
    pub output_hex: String,
}

impl GoldenVector {
    pub fn hash_fields(inputs: &[FieldElement]) -> Self {
        Self {
            kind: VectorKind::HashFields,
            input_hex: inputs.iter().map(|x| x.to_hex()).collect(),
            output_hex: hash_fields(inputs).expect("golden inputs within arity").to_hex(),
        }
    }

    pub fn digest_document(doc: &[u8]) -> Self {
        Self {
            kind: VectorKind::DigestDocument,
            input_hex: vec![hex::encode(doc)],
            output_hex: digest_document(doc).to_hex(),
        }
    }

    /// Recomputes the output and compares it with the stored one.
    pub fn check(&self) -> Result<(), String> {
        let actual = match self.kind {
            VectorKind::HashFields => {
                let inputs = self
                    .input_hex
                    .iter()
                    .map(|h| FieldElement::from_hex(h).map_err(|e| e.to_string()))
                    .collect::<Result<Vec<_>, _>>()?;
                hash_fields(&inputs).map_err(|e| e.to_string())?.to_hex()
            }
            VectorKind::DigestDocument => {
                let doc = match self.input_hex.as_slice() {
                    [one] => hex::decode(one).map_err(|e| e.to_string())?,
                    _ => return Err("digest vector needs exactly one input".into()),
                };
                digest_document(&doc).to_hex()
            }
        };
        if actual == self.output_hex {
            Ok(())
        } else {
            Err(format!("expected {}, got {actual}", self.output_hex))
        }
    }
}

/// The standard vector set shipped with the crate.
pub fn standard_vectors() -> Vec<GoldenVector> {
    let fe = FieldElement::from_u64;
    let mut out = vec![
        GoldenVector::hash_fields(&[fe(0)]),
        GoldenVector::hash_fields(&[fe(1)]),
        GoldenVector::hash_fields(&[fe(1), fe(2)]),
        GoldenVector::hash_fields(&[fe(0), fe(0)]),
        GoldenVector::hash_fields(&[-FieldElement::ONE, FieldElement::ONE, fe(0)]),
    ];
    for n in [4usize, 8, 12, 13, 16] {
        let inputs: Vec<_> = (1..=n as u64).map(fe).collect();
        out.push(GoldenVector::hash_fields(&inputs));
    }
    for doc in [&b""[..], b"abc", &[0u8; 31], &[0u8; 32], b"zk-agreements rental deposit"] {
        out.push(GoldenVector::digest_document(doc));
    }
    out
}
