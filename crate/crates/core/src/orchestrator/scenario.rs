use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::clc::Lifecycle;
use crate::fixtures::{PAYMENT_UPON_DELIVERY_TEMPLATE, RENTAL_TEMPLATE};

use super::{SessionError, Step};

/// A scripted end-to-end run, loaded from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Bundled template name (`rental`, `payment_upon_delivery`) or a path
    /// relative to the scenario file.
    pub template: String,
    /// Replacement values for template terms, applied before compiling.
    #[serde(default)]
    pub term_overrides: BTreeMap<String, Json>,
    /// Key seed for every party of the template.
    pub keys: BTreeMap<String, u64>,
    /// Seeds the nullifier and the enclave's attestation key.
    pub seed: u64,
    /// Starting balances by role, as amounts (`"3 ETH"`) or base units.
    #[serde(default)]
    pub funding: BTreeMap<String, String>,
    /// Role whose balance backs the escrow.
    pub depositor: String,
    /// Who actually signs each half; defaults to the designated signer.
    #[serde(default)]
    pub signatures: SignaturePlan,
    /// Evidence handed to the enclave, coerced against the data schema.
    #[serde(default)]
    pub inputs: serde_json::Map<String, Json>,
    /// Inputs produced by signing other inputs.
    #[serde(default)]
    pub signed_inputs: Vec<SignedInput>,
    #[serde(default)]
    pub expect: Expectations,
    #[serde(skip)]
    pub template_source: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignaturePlan {
    pub buyer: Option<String>,
    pub seller: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedInput {
    pub name: String,
    pub signer: String,
    /// Names of the inputs whose values form the signed message.
    pub items: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub lifecycle: Option<Lifecycle>,
    pub outcome: Option<String>,
    #[serde(default)]
    pub balances: BTreeMap<String, String>,
    pub escrow_pool: Option<String>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, SessionError> {
        serde_json::from_str(text).map_err(|e| SessionError::new(Step::Load, e.to_string()))
    }

    /// Reads a scenario and resolves a file template next to it.
    pub fn load(path: &Path) -> Result<Self, SessionError> {
        let text = std::fs::read_to_string(path).map_err(|e| SessionError::new(Step::Load, format!("{}: {e}", path.display())))?;
        let mut scenario = Self::from_json(&text)?;
        if bundled_template(&scenario.template).is_none() {
            let base = path.parent().unwrap_or(Path::new("."));
            let tpath = base.join(&scenario.template);
            let src = std::fs::read_to_string(&tpath)
                .map_err(|e| SessionError::new(Step::Load, format!("{}: {e}", tpath.display())))?;
            scenario.template_source = Some(src);
        }
        Ok(scenario)
    }

    pub(crate) fn template_text(&self) -> Result<String, SessionError> {
        if let Some(src) = &self.template_source {
            return Ok(src.clone());
        }
        bundled_template(&self.template)
            .map(str::to_string)
            .ok_or_else(|| SessionError::new(Step::Load, format!("unknown template `{}`", self.template)))
    }
}

pub fn bundled_template(name: &str) -> Option<&'static str> {
    match name {
        "rental" => Some(RENTAL_TEMPLATE),
        "payment_upon_delivery" => Some(PAYMENT_UPON_DELIVERY_TEMPLATE),
        _ => None,
    }
}

/// Rewrites `[terms]` values in template source.
pub(crate) fn apply_term_overrides(source: &str, overrides: &BTreeMap<String, Json>) -> Result<String, SessionError> {
    if overrides.is_empty() {
        return Ok(source.to_string());
    }
    let err = |m: String| SessionError::new(Step::Compile, m);
    let mut table: toml::Table = toml::from_str(source).map_err(|e| err(e.to_string()))?;
    let terms = table
        .get_mut("terms")
        .and_then(toml::Value::as_table_mut)
        .ok_or_else(|| err("template has no [terms] table".into()))?;
    for (name, value) in overrides {
        let term = terms
            .get_mut(name)
            .and_then(toml::Value::as_table_mut)
            .ok_or_else(|| err(format!("override for unknown term `{name}`")))?;
        let v = match value {
            Json::String(s) => toml::Value::String(s.clone()),
            Json::Bool(b) => toml::Value::Boolean(*b),
            Json::Number(n) => toml::Value::Integer(n.as_i64().ok_or_else(|| err(format!("term `{name}`: integer out of range")))?),
            other => return Err(err(format!("term `{name}`: unsupported override {other}"))),
        };
        term.insert("value".into(), v);
    }
    toml::to_string(&table).map_err(|e| err(e.to_string()))
}
