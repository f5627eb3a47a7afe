//! Computable legal contracts: document model, logic, lifecycle, templates
//! and joint signing.

pub mod amount;
mod document;
pub mod lifecycle;
pub mod logic;
mod signing;
mod template;

use thiserror::Error;

pub use document::{
    canonical, from_canonical, ContractDocument, InputDecl, InputType, LogicProgram, Party, PayoutRoleMap, SignerRoles,
    TermValue,
};
pub use lifecycle::{FsmError, Lifecycle, LifecycleEvent, LifecycleState, Phase};
pub use logic::{evaluate, ExternalInputs, Outcome, Value};
pub use signing::{sign_contract, sign_half, SignedContract};
pub use template::{compile_contract, CompiledContract, KeyBindings};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClcError {
    #[error("parse error{}: {message}", location.map(|l| format!(" at {l}")).unwrap_or_default())]
    Parse { location: Option<logic::Location>, message: String },
    #[error("type error in `{expr}`: {message}")]
    Type { expr: String, message: String },
    #[error("logic references undeclared input `{0}`")]
    UndeclaredInput(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("inputs do not match the data schema: {0}")]
    SchemaViolation(String),
    #[error("signature of `{0}` does not verify")]
    BadSignature(String),
}

/// Evaluates the logic of `doc` after checking `inputs` against its schema.
pub fn evaluate_checked(doc: &ContractDocument, inputs: &ExternalInputs) -> Result<Outcome, ClcError> {
    logic::check_inputs(doc, inputs)?;
    Ok(logic::evaluate(doc, inputs))
}
