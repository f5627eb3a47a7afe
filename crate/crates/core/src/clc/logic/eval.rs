use super::ast::{BinaryOp, Expr, UnaryOp};
use super::value::{Outcome, Value};
use super::ExternalInputs;
use crate::clc::document::ContractDocument;
use crate::crypto::{digest_document, hash_fields, public_key_field, verify, Digest, FieldElement, Signature};

/// Evaluation stopped early; the whole program rejects.
#[derive(Debug)]
struct Halt;

enum Flow {
    Value(Value),
    Outcome(Outcome),
}

struct Evaluator<'a> {
    doc: &'a ContractDocument,
    inputs: &'a ExternalInputs,
    scopes: Vec<(String, Value)>,
}

/// Field encoding of a value inside a signed message. Negative integers and
/// timestamps have no encoding.
pub fn value_field(value: &Value) -> Option<FieldElement> {
    Some(match value {
        Value::Int(n) => FieldElement::from_u128(u128::try_from(*n).ok()?),
        Value::Bool(b) => FieldElement::from_u64(*b as u64),
        Value::Str(s) => digest_document(s.as_bytes()).element(),
        Value::Bytes(b) => digest_document(b).element(),
        Value::Timestamp(t) => FieldElement::from_u64(u64::try_from(*t).ok()?),
        Value::Key(pk) => public_key_field(pk),
        Value::Variant { variant, .. } => digest_document(variant.as_bytes()).element(),
    })
}

/// Digest signed by `verify_sig` for a list of message items.
pub fn message_digest(items: &[Value]) -> Option<Digest> {
    let fields = items.iter().map(value_field).collect::<Option<Vec<_>>>()?;
    hash_fields(&fields).ok().map(Digest)
}

impl Evaluator<'_> {
    fn value(&mut self, expr: &Expr) -> Result<Value, Halt> {
        match self.eval(expr)? {
            Flow::Value(v) => Ok(v),
            Flow::Outcome(_) => Err(Halt),
        }
    }

    fn int(&mut self, expr: &Expr) -> Result<i128, Halt> {
        match self.value(expr)? {
            Value::Int(n) => Ok(n),
            _ => Err(Halt),
        }
    }

    fn boolean(&mut self, expr: &Expr) -> Result<bool, Halt> {
        match self.value(expr)? {
            Value::Bool(b) => Ok(b),
            _ => Err(Halt),
        }
    }

    fn outcome(&mut self, expr: &Expr) -> Result<Outcome, Halt> {
        match self.eval(expr)? {
            Flow::Outcome(o) => Ok(o),
            Flow::Value(_) => Err(Halt),
        }
    }

    fn lookup_name(&self, name: &str) -> Result<Value, Halt> {
        if let Some((_, v)) = self.scopes.iter().rev().find(|(n, _)| n == name) {
            return Ok(v.clone());
        }
        self.doc
            .enums
            .iter()
            .find(|(_, vs)| vs.iter().any(|v| v == name))
            .map(|(enum_name, _)| Value::Variant { enum_name: enum_name.clone(), variant: name.to_string() })
            .ok_or(Halt)
    }

    fn eval(&mut self, expr: &Expr) -> Result<Flow, Halt> {
        let v = match expr {
            Expr::Int(n) => Value::Int(*n),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Str(s) => Value::Str(s.clone()),
            Expr::ContractValue => Value::Int(i128::try_from(self.doc.value_v).map_err(|_| Halt)?),
            Expr::Term(name) => self.doc.terms.get(name).ok_or(Halt)?.to_value(),
            // absent optional inputs reject the evaluation
            Expr::Input(name) => self.inputs.get(name).cloned().ok_or(Halt)?,
            Expr::Party(role) => Value::Key(self.doc.parties.get(role).ok_or(Halt)?.pk),
            Expr::Name(name) => self.lookup_name(name)?,
            Expr::Unary { op: UnaryOp::Not, expr } => Value::Bool(!self.boolean(expr)?),
            Expr::Unary { op: UnaryOp::Neg, expr } => Value::Int(self.int(expr)?.checked_neg().ok_or(Halt)?),
            Expr::Binary { op, lhs, rhs } => self.binary(*op, lhs, rhs)?,
            Expr::If { cond, then, otherwise } => {
                return if self.boolean(cond)? { self.eval(then) } else { self.eval(otherwise) };
            }
            Expr::Let { name, value, body } => {
                let bound = self.value(value)?;
                self.scopes.push((name.clone(), bound));
                let out = self.eval(body);
                self.scopes.pop();
                return out;
            }
            Expr::Enforce { pred, body } => {
                if !self.boolean(pred)? {
                    return Err(Halt);
                }
                return self.eval(body);
            }
            Expr::Len(inner) => match self.value(inner)? {
                Value::Str(s) => Value::Int(s.len() as i128),
                Value::Bytes(b) => Value::Int(b.len() as i128),
                _ => return Err(Halt),
            },
            Expr::VerifySig { key, message, sig } => {
                let Value::Key(pk) = self.value(key)? else { return Err(Halt) };
                let items = message.iter().map(|m| self.value(m)).collect::<Result<Vec<_>, _>>()?;
                let Value::Bytes(sig_bytes) = self.value(sig)? else { return Err(Halt) };
                let digest = message_digest(&items).ok_or(Halt)?;
                let sig = Signature::from_slice(&sig_bytes).ok_or(Halt)?;
                if !verify(&pk, &digest, &sig) {
                    return Err(Halt);
                }
                Value::Bool(true)
            }
            Expr::Approve => return Ok(Flow::Outcome(Outcome::ApproveFull)),
            Expr::Reject => return Ok(Flow::Outcome(Outcome::Reject)),
            Expr::Ratio(inner) => {
                let n = self.int(inner)?;
                let numerator = u128::try_from(n).map_err(|_| Halt)?;
                if numerator > self.doc.value_v {
                    return Err(Halt);
                }
                return Ok(Flow::Outcome(Outcome::Ratio { numerator }));
            }
        };
        Ok(Flow::Value(v))
    }

    fn binary(&mut self, op: BinaryOp, lhs: &Expr, rhs: &Expr) -> Result<Value, Halt> {
        use BinaryOp::*;
        Ok(match op {
            And => Value::Bool(self.boolean(lhs)? && self.boolean(rhs)?),
            Or => Value::Bool(self.boolean(lhs)? || self.boolean(rhs)?),
            Add | Sub | Mul | Div | Rem => {
                let (a, b) = (self.int(lhs)?, self.int(rhs)?);
                let r = match op {
                    Add => a.checked_add(b),
                    Sub => a.checked_sub(b),
                    Mul => a.checked_mul(b),
                    Div => a.checked_div(b),
                    _ => a.checked_rem(b),
                };
                Value::Int(r.ok_or(Halt)?)
            }
            Eq | Ne => {
                let (a, b) = (self.value(lhs)?, self.value(rhs)?);
                Value::Bool((a == b) == (op == Eq))
            }
            Lt | Le | Gt | Ge => {
                let ord = match (self.value(lhs)?, self.value(rhs)?) {
                    (Value::Int(a), Value::Int(b)) => a.cmp(&b),
                    (Value::Timestamp(a), Value::Timestamp(b)) => a.cmp(&b),
                    _ => return Err(Halt),
                };
                Value::Bool(match op {
                    Lt => ord.is_lt(),
                    Le => ord.is_le(),
                    Gt => ord.is_gt(),
                    _ => ord.is_ge(),
                })
            }
        })
    }
}

/// Evaluates the contract's logic. Every failure (enforce, signature check,
/// arithmetic overflow, missing optional input, out-of-range ratio) yields
/// `Outcome::Reject`.
pub fn evaluate(doc: &ContractDocument, inputs: &ExternalInputs) -> Outcome {
    let mut ev = Evaluator { doc, inputs, scopes: Vec::new() };
    ev.outcome(&doc.logic.expr).unwrap_or(Outcome::Reject)
}

/// Evaluates a closed term expression (no inputs), e.g. the escrow value.
pub(crate) fn evaluate_term_expr(doc: &ContractDocument, expr: &Expr) -> Option<Value> {
    let empty = ExternalInputs::default();
    let mut ev = Evaluator { doc, inputs: &empty, scopes: Vec::new() };
    ev.value(expr).ok()
}
