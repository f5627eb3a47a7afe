//! Contract logic: a small expression language whose programs evaluate to an
//! outcome (`approve`, `reject` or `ratio(n)`).

mod ast;
mod eval;
mod inputs;
mod parser;
mod typeck;
mod value;

pub use ast::{BinaryOp, Expr, UnaryOp};
pub use eval::{evaluate, message_digest, value_field};
pub(crate) use eval::evaluate_term_expr;
pub use inputs::{check_inputs, ExternalInputs};
pub use parser::{parse, Location, SyntaxError};
pub use typeck::{check_program, check_term_expr};
pub use value::{Outcome, Type, Value};
