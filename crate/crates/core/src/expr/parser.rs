use super::ast::{BinaryOp, Expr, Symbol};
use super::ParseError;

/// Longest accepted source text, in bytes.
pub const MAX_SOURCE_LEN: usize = 64 * 1024;

/// Deepest accepted tree, counting nested groups, unary minus and chained
/// binary operators.
pub const MAX_DEPTH: usize = 256;

const EXPECT_OPERAND: &[&str] = &["number", "symbol", "'('", "'-'"];
const EXPECT_OPERATOR: &[&str] = &["'+'", "'-'", "'*'", "'^'", "'|'", "end of input"];

#[derive(Debug, Clone, Copy, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident,
    Op(BinaryOp),
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Token {
    kind: TokenKind,
    start: usize,
    end: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let kind = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => TokenKind::Op(BinaryOp::Add),
            b'-' => TokenKind::Op(BinaryOp::Sub),
            b'*' => TokenKind::Op(BinaryOp::Geometric),
            b'^' => TokenKind::Op(BinaryOp::Outer),
            b'|' => TokenKind::Op(BinaryOp::Inner),
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let int_digits = i - start;
                let mut frac_digits = 0;
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let frac_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    frac_digits = i - frac_start;
                }
                if int_digits == 0 && frac_digits == 0 {
                    return Err(ParseError::Syntax {
                        offset: start,
                        expected: vec!["digit"],
                    });
                }
                if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                    // `2e1` and friends: multiplication must be explicit
                    return Err(ParseError::Syntax {
                        offset: i,
                        expected: EXPECT_OPERATOR.to_vec(),
                    });
                }
                let value: f64 = src[start..i].parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: vec!["number"],
                })?;
                if !value.is_finite() {
                    return Err(ParseError::NumberOutOfRange { offset: start });
                }
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    start,
                    end: i,
                });
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident,
                    start,
                    end: i,
                });
                continue;
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: vec!["operator", "operand", "whitespace"],
                })
            }
        };
        i += 1;
        tokens.push(Token {
            kind,
            start,
            end: i,
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        start: bytes.len(),
        end: bytes.len(),
    });
    Ok(tokens)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

/// A subtree with its depth, so limits can be enforced while building.
type Node = (Expr, usize);

impl<'a> Parser<'a> {
    fn peek(&self) -> Token {
        self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos];
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn check_depth(depth: usize, offset: usize) -> Result<(), ParseError> {
        if depth > MAX_DEPTH {
            Err(ParseError::TooDeep { offset })
        } else {
            Ok(())
        }
    }

    fn expr(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.chain(depth, 1)
    }

    /// Left-associative chain of operators at `level` (1: `+ -`, 2: products).
    fn chain(&mut self, depth: usize, level: u8) -> Result<Node, ParseError> {
        let (mut lhs, mut lhs_depth) = if level == 1 {
            self.chain(depth, 2)?
        } else {
            self.unary(depth)?
        };
        loop {
            let tok = self.peek();
            let op = match tok.kind {
                TokenKind::Op(op) if op.precedence() == level => op,
                _ => break,
            };
            self.bump();
            let (rhs, rhs_depth) = if level == 1 {
                self.chain(depth, 2)?
            } else {
                self.unary(depth)?
            };
            let node_depth = lhs_depth.max(rhs_depth) + 1;
            Self::check_depth(depth + node_depth, tok.start)?;
            lhs = Expr::binary(op, lhs, rhs);
            lhs_depth = node_depth;
        }
        Ok((lhs, lhs_depth))
    }

    fn unary(&mut self, depth: usize) -> Result<Node, ParseError> {
        let tok = self.peek();
        if tok.kind == TokenKind::Op(BinaryOp::Sub) {
            self.bump();
            Self::check_depth(depth + 1, tok.start)?;
            let (inner, inner_depth) = self.unary(depth + 1)?;
            return Ok((Expr::Neg(Box::new(inner)), inner_depth + 1));
        }
        self.primary(depth)
    }

    fn primary(&mut self, depth: usize) -> Result<Node, ParseError> {
        let tok = self.bump();
        match tok.kind {
            TokenKind::Number(x) => Ok((Expr::Number(x), 1)),
            TokenKind::Ident => {
                let name = &self.src[tok.start..tok.end];
                match Symbol::from_name(name) {
                    Some(sym) => Ok((Expr::Symbol(sym), 1)),
                    None => Err(ParseError::UnknownSymbol {
                        offset: tok.start,
                        name: name.to_owned(),
                    }),
                }
            }
            TokenKind::LParen => {
                Self::check_depth(depth + 1, tok.start)?;
                let (inner, inner_depth) = self.expr(depth + 1)?;
                let close = self.bump();
                if close.kind != TokenKind::RParen {
                    return Err(ParseError::Syntax {
                        offset: close.start,
                        expected: vec!["')'", "operator"],
                    });
                }
                Ok((Expr::Group(Box::new(inner)), inner_depth + 1))
            }
            _ => Err(ParseError::Syntax {
                offset: tok.start,
                expected: EXPECT_OPERAND.to_vec(),
            }),
        }
    }
}

/// Parses an expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    if src.len() > MAX_SOURCE_LEN {
        return Err(ParseError::TooLong);
    }
    if src.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        src,
        tokens,
        pos: 0,
    };
    let (expr, _) = parser.expr(0)?;
    let tail = parser.peek();
    if tail.kind != TokenKind::Eof {
        return Err(ParseError::Syntax {
            offset: tail.start,
            expected: EXPECT_OPERATOR.to_vec(),
        });
    }
    Ok(expr)
}

/// Parses raw bytes, rejecting invalid UTF-8.
pub fn parse_bytes(src: &[u8]) -> Result<Expr, ParseError> {
    if src.len() > MAX_SOURCE_LEN {
        return Err(ParseError::TooLong);
    }
    let text = std::str::from_utf8(src).map_err(|e| ParseError::InvalidUtf8 {
        offset: e.valid_up_to(),
    })?;
    parse(text)
}
