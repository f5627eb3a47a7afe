use std::collections::BTreeMap;

use serde_json::Value as Json;

use super::value::Value;
use crate::clc::amount::parse_amount;
use crate::clc::document::{ContractDocument, InputType};
use crate::clc::ClcError;

/// Evidence and decisions supplied at evaluation time, keyed by input name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExternalInputs(BTreeMap<String, Value>);

impl ExternalInputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) -> &mut Self {
        self.0.insert(name.into(), value);
        self
    }

    pub fn with(mut self, name: impl Into<String>, value: Value) -> Self {
        self.insert(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    /// Coerces one JSON value according to the declared input type.
    pub fn coerce(doc: &ContractDocument, name: &str, raw: &Json) -> Result<Value, ClcError> {
        let decl = doc.data_schema.get(name).ok_or_else(|| ClcError::SchemaViolation(format!("undeclared input `{name}`")))?;
        let bad = || ClcError::SchemaViolation(format!("input `{name}` does not match type {:?}: {raw}", decl.ty));
        Ok(match (&decl.ty, raw) {
            (InputType::Int, Json::Number(n)) => Value::Int(n.as_i64().ok_or_else(bad)? as i128),
            (InputType::Int, Json::String(s)) => Value::Int(s.parse().map_err(|_| bad())?),
            (InputType::Amount, Json::Number(n)) => Value::Int(n.as_u64().ok_or_else(bad)? as i128),
            (InputType::Amount, Json::String(s)) => {
                Value::Int(i128::try_from(parse_amount(s).map_err(|_| bad())?).map_err(|_| bad())?)
            }
            (InputType::Bool, Json::Bool(b)) => Value::Bool(*b),
            (InputType::String, Json::String(s)) => Value::Str(s.clone()),
            (InputType::Bytes, Json::String(s)) => {
                Value::Bytes(hex::decode(s.strip_prefix("0x").unwrap_or(s)).map_err(|_| bad())?)
            }
            (InputType::Timestamp, Json::Number(n)) => Value::Timestamp(n.as_i64().ok_or_else(bad)?),
            (InputType::Timestamp, Json::String(s)) => Value::Timestamp(
                chrono::DateTime::parse_from_rfc3339(s).map_err(|_| bad())?.timestamp(),
            ),
            (InputType::Enum(enum_name), Json::String(s)) => {
                let variants = doc.enums.get(enum_name).ok_or_else(bad)?;
                if !variants.contains(s) {
                    return Err(bad());
                }
                Value::Variant { enum_name: enum_name.clone(), variant: s.clone() }
            }
            _ => return Err(bad()),
        })
    }

    /// Builds inputs from a JSON object, coercing and checking every entry.
    pub fn from_json(doc: &ContractDocument, raw: &serde_json::Map<String, Json>) -> Result<Self, ClcError> {
        let mut out = Self::new();
        for (name, value) in raw {
            out.insert(name.clone(), Self::coerce(doc, name, value)?);
        }
        check_inputs(doc, &out)?;
        Ok(out)
    }

    /// JSON rendering; bytes as hex, enums by variant name.
    pub fn to_json(&self) -> serde_json::Map<String, Json> {
        self.0
            .iter()
            .map(|(k, v)| {
                let j = match v {
                    Value::Int(n) => Json::String(n.to_string()),
                    Value::Bool(b) => Json::Bool(*b),
                    Value::Str(s) => Json::String(s.clone()),
                    Value::Bytes(b) => Json::String(hex::encode(b)),
                    Value::Timestamp(t) => Json::from(*t),
                    Value::Key(pk) => Json::String(pk.to_hex()),
                    Value::Variant { variant, .. } => Json::String(variant.clone()),
                };
                (k.clone(), j)
            })
            .collect()
    }
}

/// Every required input present, nothing undeclared, every value well-typed.
pub fn check_inputs(doc: &ContractDocument, inputs: &ExternalInputs) -> Result<(), ClcError> {
    for (name, value) in inputs.iter() {
        let decl = doc
            .data_schema
            .get(name)
            .ok_or_else(|| ClcError::SchemaViolation(format!("undeclared input `{name}`")))?;
        if value.type_of() != decl.ty.ty() {
            return Err(ClcError::SchemaViolation(format!(
                "input `{name}` has type {}, declared {}",
                value.type_of(),
                decl.ty.ty()
            )));
        }
        if let Value::Variant { enum_name, variant } = value {
            if !doc.enums.get(enum_name).is_some_and(|vs| vs.contains(variant)) {
                return Err(ClcError::SchemaViolation(format!("`{variant}` is not a variant of {enum_name}")));
            }
        }
    }
    for (name, decl) in &doc.data_schema {
        if !decl.optional && inputs.get(name).is_none() {
            return Err(ClcError::SchemaViolation(format!("missing required input `{name}`")));
        }
    }
    Ok(())
}
