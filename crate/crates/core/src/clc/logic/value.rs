use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crypto::PublicKey;

/// Static types of logic expressions and schema declarations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Type {
    Int,
    Bool,
    Str,
    Bytes,
    Timestamp,
    PublicKey,
    /// A named enumeration declared in the contract.
    Enum(String),
    Outcome,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::Str => f.write_str("string"),
            Type::Bytes => f.write_str("bytes"),
            Type::Timestamp => f.write_str("timestamp"),
            Type::PublicKey => f.write_str("public_key"),
            Type::Enum(name) => f.write_str(name),
            Type::Outcome => f.write_str("outcome"),
        }
    }
}

/// Runtime values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i128),
    Bool(bool),
    Str(String),
    Bytes(Vec<u8>),
    Timestamp(i64),
    Key(PublicKey),
    Variant { enum_name: String, variant: String },
}

impl Value {
    pub fn type_of(&self) -> Type {
        match self {
            Value::Int(_) => Type::Int,
            Value::Bool(_) => Type::Bool,
            Value::Str(_) => Type::Str,
            Value::Bytes(_) => Type::Bytes,
            Value::Timestamp(_) => Type::Timestamp,
            Value::Key(_) => Type::PublicKey,
            Value::Variant { enum_name, .. } => Type::Enum(enum_name.clone()),
        }
    }
}

/// Result of evaluating a contract's logic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    ApproveFull,
    Reject,
    Ratio {
        #[serde(with = "crate::clc::amount::serde_u128")]
        numerator: u128,
    },
}

impl Outcome {
    /// Amount awarded to the ratio payee out of `v`; `None` for `Reject`.
    pub fn numerator(&self, v: u128) -> Option<u128> {
        match self {
            Outcome::ApproveFull => Some(v),
            Outcome::Ratio { numerator } => Some(*numerator),
            Outcome::Reject => None,
        }
    }

    pub fn is_reject(&self) -> bool {
        matches!(self, Outcome::Reject)
    }

    /// Small integer tag used when the outcome enters a hash.
    pub fn tag(&self) -> u64 {
        match self {
            Outcome::Reject => 0,
            Outcome::ApproveFull => 1,
            Outcome::Ratio { .. } => 2,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::ApproveFull => f.write_str("APPROVE_FULL"),
            Outcome::Reject => f.write_str("REJECT"),
            Outcome::Ratio { numerator } => write!(f, "RATIO({numerator})"),
        }
    }
}
