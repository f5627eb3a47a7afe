use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clc::amount::serde_i128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }
}

/// Contract evaluation logic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Int(#[serde(with = "serde_i128")] i128),
    Bool(bool),
    Str(String),
    /// `term.<name>`
    Term(String),
    /// `input.<name>`
    Input(String),
    /// `party.<role>`, the role's public key
    Party(String),
    /// `value`, the escrowed amount
    ContractValue,
    /// A `let`-bound name or an enum variant.
    Name(String),
    Unary {
        op: UnaryOp,
        expr: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    If {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    Let {
        name: String,
        value: Box<Expr>,
        body: Box<Expr>,
    },
    Enforce {
        pred: Box<Expr>,
        body: Box<Expr>,
    },
    /// `len(x)` for strings and byte strings.
    Len(Box<Expr>),
    VerifySig {
        key: Box<Expr>,
        message: Vec<Expr>,
        sig: Box<Expr>,
    },
    Approve,
    Reject,
    Ratio(Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Str(s) => write!(f, "{s:?}"),
            Expr::Term(n) => write!(f, "term.{n}"),
            Expr::Input(n) => write!(f, "input.{n}"),
            Expr::Party(n) => write!(f, "party.{n}"),
            Expr::ContractValue => f.write_str("value"),
            Expr::Name(n) => f.write_str(n),
            Expr::Unary { op: UnaryOp::Not, expr } => write!(f, "!{expr}"),
            Expr::Unary { op: UnaryOp::Neg, expr } => write!(f, "-{expr}"),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Expr::If { cond, then, otherwise } => write!(f, "if {cond} then {then} else {otherwise}"),
            Expr::Let { name, value, body } => write!(f, "let {name} = {value}; {body}"),
            Expr::Enforce { pred, body } => write!(f, "enforce {pred}; {body}"),
            Expr::Len(e) => write!(f, "len({e})"),
            Expr::VerifySig { key, message, sig } => {
                write!(f, "verify_sig({key}, [")?;
                for (i, m) in message.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "], {sig})")
            }
            Expr::Approve => f.write_str("approve"),
            Expr::Reject => f.write_str("reject"),
            Expr::Ratio(e) => write!(f, "ratio({e})"),
        }
    }
}
