use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::amount::{serde_i128, serde_u128};
use super::logic::{self, Expr, Type, Value};
use super::ClcError;
use crate::crypto::{digest_document, Digest, PublicKey};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Party {
    pub display_name: String,
    pub pk: PublicKey,
}

/// Which parties sign the contract and which key acts as evaluator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignerRoles {
    pub buyer: String,
    pub seller: String,
    pub evaluator: String,
}

/// Who receives `rat * v` and who receives the remainder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoutRoleMap {
    pub ratio_payee: String,
    pub complement_payee: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum TermValue {
    Amount(#[serde(with = "serde_u128")] u128),
    Int(#[serde(with = "serde_i128")] i128),
    String(String),
    /// Seconds since the Unix epoch.
    Timestamp(i64),
    Bool(bool),
}

impl TermValue {
    pub fn ty(&self) -> Type {
        match self {
            TermValue::Amount(_) | TermValue::Int(_) => Type::Int,
            TermValue::String(_) => Type::Str,
            TermValue::Timestamp(_) => Type::Timestamp,
            TermValue::Bool(_) => Type::Bool,
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            TermValue::Amount(a) => Value::Int(*a as i128),
            TermValue::Int(i) => Value::Int(*i),
            TermValue::String(s) => Value::Str(s.clone()),
            TermValue::Timestamp(t) => Value::Timestamp(*t),
            TermValue::Bool(b) => Value::Bool(*b),
        }
    }
}

/// Declared type of an external input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputType {
    Int,
    /// An integer that may also be written as `"1.5 ETH"`.
    Amount,
    Bool,
    String,
    Bytes,
    Timestamp,
    Enum(String),
}

impl InputType {
    pub fn ty(&self) -> Type {
        match self {
            InputType::Int | InputType::Amount => Type::Int,
            InputType::Bool => Type::Bool,
            InputType::String => Type::Str,
            InputType::Bytes => Type::Bytes,
            InputType::Timestamp => Type::Timestamp,
            InputType::Enum(name) => Type::Enum(name.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDecl {
    #[serde(rename = "type")]
    pub ty: InputType,
    pub optional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicProgram {
    pub expr: Expr,
}

impl LogicProgram {
    pub fn canonical(&self) -> Vec<u8> {
        to_canonical_bytes(self)
    }

    /// Digest of the canonical program; this is the enclave measurement.
    pub fn digest(&self) -> Digest {
        digest_document(&self.canonical())
    }
}

/// A compiled contract: parties, typed terms, escrow value, input schema and
/// evaluation logic. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractDocument {
    pub name: String,
    /// Optional natural-language text of the agreement.
    pub text: Option<String>,
    pub parties: BTreeMap<String, Party>,
    pub signers: SignerRoles,
    pub terms: BTreeMap<String, TermValue>,
    #[serde(with = "serde_u128")]
    pub value_v: u128,
    pub payout: PayoutRoleMap,
    pub enums: BTreeMap<String, Vec<String>>,
    pub data_schema: BTreeMap<String, InputDecl>,
    pub logic: LogicProgram,
}

impl ContractDocument {
    fn party(&self, role: &str) -> Result<&Party, ClcError> {
        self.parties.get(role).ok_or_else(|| ClcError::Schema(format!("unknown party role `{role}`")))
    }

    pub fn buyer_pk(&self) -> Result<PublicKey, ClcError> {
        self.party(&self.signers.buyer).map(|p| p.pk)
    }

    pub fn seller_pk(&self) -> Result<PublicKey, ClcError> {
        self.party(&self.signers.seller).map(|p| p.pk)
    }

    pub fn evaluator_pk(&self) -> Result<PublicKey, ClcError> {
        self.party(&self.signers.evaluator).map(|p| p.pk)
    }

    pub fn ratio_payee_pk(&self) -> Result<PublicKey, ClcError> {
        self.party(&self.payout.ratio_payee).map(|p| p.pk)
    }

    pub fn complement_payee_pk(&self) -> Result<PublicKey, ClcError> {
        self.party(&self.payout.complement_payee).map(|p| p.pk)
    }

    /// Checks the structural invariants and type-checks the logic.
    pub fn validate(&self) -> Result<(), ClcError> {
        if self.value_v == 0 {
            return Err(ClcError::Schema("escrow value must be positive".into()));
        }
        if self.payout.ratio_payee == self.payout.complement_payee {
            return Err(ClcError::Schema("ratio_payee and complement_payee must differ".into()));
        }
        for role in [
            &self.payout.ratio_payee,
            &self.payout.complement_payee,
            &self.signers.buyer,
            &self.signers.seller,
            &self.signers.evaluator,
        ] {
            self.party(role)?;
        }
        if self.signers.buyer == self.signers.seller {
            return Err(ClcError::Schema("buyer and seller must be different parties".into()));
        }
        for (name, variants) in &self.enums {
            if variants.is_empty() {
                return Err(ClcError::Schema(format!("enum `{name}` has no variants")));
            }
        }
        for (name, decl) in &self.data_schema {
            if let InputType::Enum(e) = &decl.ty {
                if !self.enums.contains_key(e) {
                    return Err(ClcError::Schema(format!("input `{name}` uses undeclared enum `{e}`")));
                }
            }
        }
        logic::check_program(self)
    }

    pub fn canonical(&self) -> Vec<u8> {
        canonical(self)
    }

    /// `c = digest_document(canonical(doc))`, the digest both parties sign.
    pub fn digest(&self) -> Digest {
        digest_document(&self.canonical())
    }
}

pub(crate) fn to_canonical_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    // serde_json::Value keeps object keys in a BTreeMap, so keys come out sorted
    let tree = serde_json::to_value(value).expect("document model serializes");
    serde_json::to_vec(&tree).expect("json value serializes")
}

/// Compact JSON with lexicographically sorted keys, decimal integers and
/// lowercase hex for byte fields.
pub fn canonical(doc: &ContractDocument) -> Vec<u8> {
    to_canonical_bytes(doc)
}

pub fn from_canonical(bytes: &[u8]) -> Result<ContractDocument, ClcError> {
    serde_json::from_slice(bytes).map_err(|e| ClcError::Schema(format!("not a canonical document: {e}")))
}
