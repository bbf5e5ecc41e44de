use std::fmt;

use crate::cga::{blade_from_name, blade_name, Multivector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    /// A canonical basis blade such as `e1` or `e123`.
    Blade(usize),
    Eo,
    Einf,
}

impl Symbol {
    pub fn from_name(name: &str) -> Option<Symbol> {
        match name {
            "eo" => Some(Symbol::Eo),
            "einf" => Some(Symbol::Einf),
            _ => blade_from_name(name).map(Symbol::Blade),
        }
    }

    pub fn value(&self) -> Multivector {
        match self {
            Symbol::Blade(index) => Multivector::basis(*index),
            Symbol::Eo => Multivector::eo(),
            Symbol::Einf => Multivector::einf(),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Blade(index) => f.write_str(&blade_name(*index)),
            Symbol::Eo => f.write_str("eo"),
            Symbol::Einf => f.write_str("einf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    /// `*`
    Geometric,
    /// `^`
    Outer,
    /// `|`
    Inner,
}

impl BinaryOp {
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Geometric | BinaryOp::Outer | BinaryOp::Inner => 2,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Geometric => "*",
            BinaryOp::Outer => "^",
            BinaryOp::Inner => "|",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Symbol(Symbol),
    Neg(Box<Expr>),
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    /// Explicit parentheses, kept so printing reproduces the source shape.
    Group(Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            _ => u8::MAX,
        }
    }
}

/// Prints with single spaces around binary operators. Parentheses are added
/// only where the tree could not otherwise be reparsed into the same shape.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(x) => write!(f, "{x}"),
            Expr::Symbol(sym) => write!(f, "{sym}"),
            Expr::Neg(inner) => {
                if matches!(**inner, Expr::Binary { .. }) || matches!(**inner, Expr::Number(x) if x < 0.0) {
                    write!(f, "-({inner})")
                } else {
                    write!(f, "-{inner}")
                }
            }
            Expr::Group(inner) => write!(f, "({inner})"),
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                if lhs.precedence() < p {
                    write!(f, "({lhs})")?;
                } else {
                    write!(f, "{lhs}")?;
                }
                write!(f, " {} ", op.token())?;
                if rhs.precedence() <= p {
                    write!(f, "({rhs})")
                } else {
                    write!(f, "{rhs}")
                }
            }
        }
    }
}
