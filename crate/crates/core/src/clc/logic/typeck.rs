
use super::ast::{BinaryOp, Expr, UnaryOp};
use super::value::Type;
use crate::clc::document::ContractDocument;
use crate::clc::ClcError;
use crate::crypto::MAX_HASH_INPUTS;

struct Checker<'a> {
    doc: &'a ContractDocument,
    scopes: Vec<(String, Type)>,
}

fn type_error(expr: &Expr, message: impl Into<String>) -> ClcError {
    ClcError::Type { expr: expr.to_string(), message: message.into() }
}

impl Checker<'_> {
    fn expect(&mut self, expr: &Expr, want: &Type) -> Result<(), ClcError> {
        let got = self.infer(expr)?;
        if &got == want {
            Ok(())
        } else {
            Err(type_error(expr, format!("expected {want}, found {got}")))
        }
    }

    fn variant_type(&self, name: &str) -> Option<Result<Type, ()>> {
        let owners: Vec<&String> =
            self.doc.enums.iter().filter(|(_, vs)| vs.iter().any(|v| v == name)).map(|(n, _)| n).collect();
        match owners.as_slice() {
            [] => None,
            [one] => Some(Ok(Type::Enum((*one).clone()))),
            _ => Some(Err(())),
        }
    }

    fn infer(&mut self, expr: &Expr) -> Result<Type, ClcError> {
        Ok(match expr {
            Expr::Int(_) | Expr::ContractValue => Type::Int,
            Expr::Bool(_) => Type::Bool,
            Expr::Str(_) => Type::Str,
            Expr::Term(name) => self
                .doc
                .terms
                .get(name)
                .map(|t| t.ty())
                .ok_or_else(|| type_error(expr, format!("unknown term `{name}`")))?,
            Expr::Input(name) => self
                .doc
                .data_schema
                .get(name)
                .map(|d| d.ty.ty())
                .ok_or_else(|| ClcError::UndeclaredInput(name.clone()))?,
            Expr::Party(role) => {
                if !self.doc.parties.contains_key(role) {
                    return Err(type_error(expr, format!("unknown party `{role}`")));
                }
                Type::PublicKey
            }
            Expr::Name(name) => {
                if let Some((_, ty)) = self.scopes.iter().rev().find(|(n, _)| n == name) {
                    ty.clone()
                } else {
                    match self.variant_type(name) {
                        Some(Ok(ty)) => ty,
                        Some(Err(())) => return Err(type_error(expr, "variant belongs to more than one enum")),
                        None => return Err(type_error(expr, format!("unknown name `{name}`"))),
                    }
                }
            }
            Expr::Unary { op: UnaryOp::Not, expr: inner } => {
                self.expect(inner, &Type::Bool)?;
                Type::Bool
            }
            Expr::Unary { op: UnaryOp::Neg, expr: inner } => {
                self.expect(inner, &Type::Int)?;
                Type::Int
            }
            Expr::Binary { op, lhs, rhs } => match op {
                BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => {
                    self.expect(lhs, &Type::Int)?;
                    self.expect(rhs, &Type::Int)?;
                    Type::Int
                }
                BinaryOp::And | BinaryOp::Or => {
                    self.expect(lhs, &Type::Bool)?;
                    self.expect(rhs, &Type::Bool)?;
                    Type::Bool
                }
                BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                    let lt = self.infer(lhs)?;
                    if lt != Type::Int && lt != Type::Timestamp {
                        return Err(type_error(expr, format!("cannot order values of type {lt}")));
                    }
                    self.expect(rhs, &lt)?;
                    Type::Bool
                }
                BinaryOp::Eq | BinaryOp::Ne => {
                    let lt = self.infer(lhs)?;
                    if lt == Type::Outcome {
                        return Err(type_error(expr, "outcomes cannot be compared"));
                    }
                    self.expect(rhs, &lt)?;
                    Type::Bool
                }
            },
            Expr::If { cond, then, otherwise } => {
                self.expect(cond, &Type::Bool)?;
                let t = self.infer(then)?;
                self.expect(otherwise, &t)?;
                t
            }
            Expr::Let { name, value, body } => {
                let ty = self.infer(value)?;
                self.scopes.push((name.clone(), ty));
                let out = self.infer(body);
                self.scopes.pop();
                out?
            }
            Expr::Enforce { pred, body } => {
                self.expect(pred, &Type::Bool)?;
                self.expect(body, &Type::Outcome)?;
                Type::Outcome
            }
            Expr::Len(inner) => {
                let t = self.infer(inner)?;
                if t != Type::Str && t != Type::Bytes {
                    return Err(type_error(expr, format!("len() needs string or bytes, found {t}")));
                }
                Type::Int
            }
            Expr::VerifySig { key, message, sig } => {
                self.expect(key, &Type::PublicKey)?;
                if message.is_empty() || message.len() > MAX_HASH_INPUTS {
                    return Err(type_error(expr, format!("signed message needs 1..={MAX_HASH_INPUTS} items")));
                }
                for item in message {
                    let t = self.infer(item)?;
                    if t == Type::Outcome {
                        return Err(type_error(item, "outcomes cannot be signed"));
                    }
                }
                self.expect(sig, &Type::Bytes)?;
                Type::Bool
            }
            Expr::Approve | Expr::Reject => Type::Outcome,
            Expr::Ratio(inner) => {
                self.expect(inner, &Type::Int)?;
                Type::Outcome
            }
        })
    }
}

/// Type-checks `doc.logic`; the program must produce an outcome.
pub fn check_program(doc: &ContractDocument) -> Result<(), ClcError> {
    let mut checker = Checker { doc, scopes: Vec::new() };
    let root = &doc.logic.expr;
    let ty = checker.infer(root)?;
    if ty != Type::Outcome {
        return Err(type_error(root, format!("program must produce an outcome, found {ty}")));
    }
    Ok(())
}

/// Type of a closed expression over terms only, used for the escrow value.
pub fn check_term_expr(doc: &ContractDocument, expr: &Expr) -> Result<Type, ClcError> {
    let mut checker = Checker { doc, scopes: Vec::new() };
    checker.infer(expr)
}

