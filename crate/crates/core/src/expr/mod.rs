//! Text syntax for multivector expressions, as written by the LLM.
//!
//! ```text
//! expr    = term  { ("+" | "-") term } ;
//! term    = unary { ("*" | "^" | "|") unary } ;
//! unary   = "-" unary | primary ;
//! primary = number | symbol | "(" expr ")" ;
//! number  = digits [ "." digits ] | "." digits ;
//! symbol  = "eo" | "einf" | "e" ascending-digits-from-1-to-5 ;
//! ```
//!
//! `*` is the geometric product, `^` the outer product and `|` the left
//! contraction. The three products share one precedence level and associate
//! to the left. Multiplication is never implicit: `2e1` is rejected, write
//! `2*e1`.

mod ast;
mod parser;

pub use ast::{BinaryOp, Expr, Symbol};
pub use parser::{parse, parse_bytes, MAX_DEPTH, MAX_SOURCE_LEN};

use crate::cga::{blade_name, Multivector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
    },
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { offset: usize, name: String },
    #[error("number at byte {offset} is out of range")]
    NumberOutOfRange { offset: usize },
    #[error("expression nests deeper than {MAX_DEPTH} levels (byte {offset})")]
    TooDeep { offset: usize },
    #[error("expression is empty")]
    Empty,
    #[error("expression is longer than {MAX_SOURCE_LEN} bytes")]
    TooLong,
    #[error("input is not valid UTF-8 (byte {offset})")]
    InvalidUtf8 { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownSymbol { offset, .. }
            | ParseError::NumberOutOfRange { offset }
            | ParseError::TooDeep { offset }
            | ParseError::InvalidUtf8 { offset } => Some(*offset),
            ParseError::Empty | ParseError::TooLong => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("expression overflowed to a non-finite value")]
    NonFinite,
}

/// Folds an expression into a multivector.
pub fn evaluate(expr: &Expr) -> Result<Multivector, EvalError> {
    let value = match expr {
        Expr::Number(x) => Multivector::scalar(*x),
        Expr::Symbol(sym) => sym.value(),
        Expr::Neg(inner) => -evaluate(inner)?,
        Expr::Group(inner) => evaluate(inner)?,
        Expr::Binary { op, lhs, rhs } => {
            let a = evaluate(lhs)?;
            let b = evaluate(rhs)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Geometric => a.geometric_product(&b),
                BinaryOp::Outer => a.outer_product(&b),
                BinaryOp::Inner => a.inner_product(&b),
            }
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::NonFinite)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Parses and evaluates in one step.
pub fn eval_str(src: &str) -> Result<Multivector, ExprError> {
    Ok(evaluate(&parse(src)?)?)
}

/// Prints a multivector in the expression syntax, e.g.
/// `1 + -0.5*e14 + -0.5*e15`. Evaluating the text gives back the same
/// coefficients bit for bit.
pub fn canonical_print(mv: &Multivector) -> String {
    let mut terms = Vec::new();
    for (index, coeff) in mv.terms() {
        if index == 0 {
            terms.push(format!("{coeff}"));
        } else {
            terms.push(format!("{coeff}*{}", blade_name(index)));
        }
    }
    if terms.is_empty() {
        "0".to_owned()
    } else {
        terms.join(" + ")
    }
}
