//! Contract template files (TOML) and their compilation into documents.
//!
//! A template has a `[contract]` header, `[parties.<role>]` tables,
//! `[signers]`, typed `[terms]`, an `[escrow]` section whose `value` is an
//! expression over terms, optional `[enums]` and `[inputs]` declarations, and
//! a `[logic]` table holding the program source.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::amount::parse_amount;
use super::document::{ContractDocument, InputDecl, InputType, LogicProgram, Party, PayoutRoleMap, SignerRoles, TermValue};
use super::lifecycle::LifecycleState;
use super::logic::{self, Expr, Location, Type, Value};
use super::ClcError;
use crate::crypto::PublicKey;

/// Public keys supplied at compile time for parties whose template entry has
/// no `pk`.
pub type KeyBindings = BTreeMap<String, PublicKey>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateFile {
    contract: ContractSection,
    parties: BTreeMap<String, PartySection>,
    signers: SignerRoles,
    #[serde(default)]
    terms: BTreeMap<String, TermSection>,
    escrow: EscrowSection,
    #[serde(default)]
    enums: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    inputs: BTreeMap<String, InputSection>,
    logic: LogicSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContractSection {
    name: String,
    text: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartySection {
    display_name: String,
    pk: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermSection {
    #[serde(rename = "type")]
    ty: String,
    value: toml::Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EscrowSection {
    value: String,
    ratio_payee: String,
    complement_payee: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InputSection {
    #[serde(rename = "type")]
    ty: String,
    #[serde(default)]
    optional: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LogicSection {
    source: toml::Spanned<String>,
}

/// Output of compilation: the document and its initial lifecycle (`INIT`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledContract {
    pub document: ContractDocument,
    pub state: LifecycleState,
}

fn location_of(src: &str, offset: usize) -> Location {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Location { line, column }
}

fn parse_term(name: &str, term: &TermSection) -> Result<TermValue, ClcError> {
    let bad = |why: &str| ClcError::Schema(format!("term `{name}`: {why}"));
    Ok(match (term.ty.as_str(), &term.value) {
        ("amount", toml::Value::String(s)) => TermValue::Amount(parse_amount(s).map_err(|e| bad(&e.to_string()))?),
        ("amount", toml::Value::Integer(i)) => {
            TermValue::Amount(u128::try_from(*i).map_err(|_| bad("amount must be non-negative"))?)
        }
        ("int", toml::Value::Integer(i)) => TermValue::Int(*i as i128),
        ("string", toml::Value::String(s)) => TermValue::String(s.clone()),
        ("bool", toml::Value::Boolean(b)) => TermValue::Bool(*b),
        ("timestamp", toml::Value::Datetime(dt)) => TermValue::Timestamp(parse_timestamp(&dt.to_string()).map_err(bad)?),
        ("timestamp", toml::Value::String(s)) => TermValue::Timestamp(parse_timestamp(s).map_err(bad)?),
        (ty, v) => return Err(bad(&format!("value {v} does not fit type `{ty}`"))),
    })
}

fn parse_timestamp(s: &str) -> Result<i64, &'static str> {
    chrono::DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.timestamp())
        .map_err(|_| "timestamp must be RFC 3339 with an offset")
}

fn parse_input_type(name: &str, ty: &str, enums: &BTreeMap<String, Vec<String>>) -> Result<InputType, ClcError> {
    Ok(match ty {
        "int" => InputType::Int,
        "amount" => InputType::Amount,
        "bool" => InputType::Bool,
        "string" => InputType::String,
        "bytes" => InputType::Bytes,
        "timestamp" => InputType::Timestamp,
        other if enums.contains_key(other) => InputType::Enum(other.to_string()),
        other => return Err(ClcError::Schema(format!("input `{name}` has unknown type `{other}`"))),
    })
}

fn contains_input(expr: &Expr) -> bool {
    match expr {
        Expr::Input(_) => true,
        Expr::Unary { expr, .. } | Expr::Len(expr) | Expr::Ratio(expr) => contains_input(expr),
        Expr::Binary { lhs, rhs, .. } => contains_input(lhs) || contains_input(rhs),
        Expr::If { cond, then, otherwise } => contains_input(cond) || contains_input(then) || contains_input(otherwise),
        Expr::Let { value, body, .. } => contains_input(value) || contains_input(body),
        Expr::Enforce { pred, body } => contains_input(pred) || contains_input(body),
        Expr::VerifySig { key, message, sig } => {
            contains_input(key) || contains_input(sig) || message.iter().any(contains_input)
        }
        _ => false,
    }
}

/// Compiles template source into a validated document in state `INIT`.
pub fn compile_contract(source: &str, keys: &KeyBindings) -> Result<CompiledContract, ClcError> {
    let file: TemplateFile = toml::from_str(source).map_err(|e| ClcError::Parse {
        location: e.span().map(|s| location_of(source, s.start)),
        message: e.message().to_string(),
    })?;

    let mut parties = BTreeMap::new();
    for (role, p) in &file.parties {
        let pk = match (&p.pk, keys.get(role)) {
            (Some(hex), bound) => {
                let pk = PublicKey::from_hex(hex)
                    .map_err(|_| ClcError::Schema(format!("party `{role}` has a malformed public key")))?;
                if bound.is_some_and(|b| *b != pk) {
                    return Err(ClcError::Schema(format!("party `{role}` key conflicts with the supplied binding")));
                }
                pk
            }
            (None, Some(bound)) => *bound,
            (None, None) => return Err(ClcError::Schema(format!("party `{role}` has no public key"))),
        };
        parties.insert(role.clone(), Party { display_name: p.display_name.clone(), pk });
    }
    if let Some(extra) = keys.keys().find(|k| !parties.contains_key(*k)) {
        return Err(ClcError::Schema(format!("key supplied for unknown party `{extra}`")));
    }

    let terms = file
        .terms
        .iter()
        .map(|(name, t)| parse_term(name, t).map(|v| (name.clone(), v)))
        .collect::<Result<BTreeMap<_, _>, _>>()?;

    let data_schema = file
        .inputs
        .iter()
        .map(|(name, i)| {
            parse_input_type(name, &i.ty, &file.enums).map(|ty| (name.clone(), InputDecl { ty, optional: i.optional }))
        })
        .collect::<Result<BTreeMap<_, _>, _>>()?;

    let logic_src = file.logic.source.get_ref();
    let expr = logic::parse(logic_src).map_err(|e| {
        // shift program-relative positions to file positions
        let span = file.logic.source.span();
        let mut start = span.start + 3;
        if source[start..].starts_with('\n') {
            start += 1;
        } else if source[start..].starts_with("\r\n") {
            start += 2;
        }
        let base = location_of(source, start);
        let location = if e.location.line == 1 {
            Location { line: base.line, column: base.column + e.location.column - 1 }
        } else {
            Location { line: base.line + e.location.line - 1, column: e.location.column }
        };
        ClcError::Parse { location: Some(location), message: e.message }
    })?;

    let mut document = ContractDocument {
        name: file.contract.name,
        text: file.contract.text,
        parties,
        signers: file.signers,
        terms,
        value_v: 0,
        payout: PayoutRoleMap { ratio_payee: file.escrow.ratio_payee, complement_payee: file.escrow.complement_payee },
        enums: file.enums,
        data_schema,
        logic: LogicProgram { expr },
    };

    let value_expr = logic::parse(&file.escrow.value)
        .map_err(|e| ClcError::Parse { location: None, message: format!("escrow value: {e}") })?;
    if contains_input(&value_expr) {
        return Err(ClcError::Schema("escrow value may reference terms only".into()));
    }
    let ty = logic::check_term_expr(&document, &value_expr)?;
    if ty != Type::Int {
        return Err(ClcError::Type { expr: value_expr.to_string(), message: format!("escrow value must be int, found {ty}") });
    }
    document.value_v = match logic::evaluate_term_expr(&document, &value_expr) {
        Some(Value::Int(n)) if n > 0 => n as u128,
        _ => return Err(ClcError::Schema(format!("escrow value `{value_expr}` must evaluate to a positive amount"))),
    };

    document.validate()?;
    Ok(CompiledContract { document, state: LifecycleState::init() })
}
