use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::lexer::{describe, Tok, Tokens};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    Param(u32),
    /// `name[comp]_suffix`
    Var { name: String, comp: Option<u16>, suffix: String },
    /// `name'''(args)`
    Call { name: String, primes: u32, args: Vec<Expr> },
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    List(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: usize,
    pub col: usize,
}

impl Expr {
    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col, msg)
    }
}

/// Parses a complete expression from the cursor.
fn starts_expr(t: &Tokens) -> bool {
    matches!(t.peek().tok, Tok::Int(_) | Tok::Ident(_) | Tok::Punct("#" | "(" | "[" | "-"))
}

/// Consumes the operator token, reporting a dangling operator at its own position.
fn operator(t: &mut Tokens) -> Result<()> {
    let op = t.next();
    if !starts_expr(t) {
        let sym = describe(&op.tok);
        return Err(Error::parse(op.line, op.col, format!("dangling {sym}: expected an expression after it, found {}", describe(&t.peek().tok))));
    }
    Ok(())
}

pub fn parse_expr(t: &mut Tokens) -> Result<Expr> {
    let mut lhs = parse_term(t)?;
    loop {
        let op = if t.is_punct("+") {
            BinOp::Add
        } else if t.is_punct("-") {
            BinOp::Sub
        } else {
            break;
        };
        operator(t)?;
        let rhs = parse_term(t)?;
        let (line, col) = (lhs.line, lhs.col);
        lhs = Expr { kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), line, col };
    }
    Ok(lhs)
}

fn parse_term(t: &mut Tokens) -> Result<Expr> {
    let mut lhs = parse_unary(t)?;
    loop {
        let op = if t.is_punct("*") {
            BinOp::Mul
        } else if t.is_punct("/") {
            BinOp::Div
        } else {
            break;
        };
        operator(t)?;
        let rhs = parse_unary(t)?;
        let (line, col) = (lhs.line, lhs.col);
        lhs = Expr { kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), line, col };
    }
    Ok(lhs)
}

fn parse_unary(t: &mut Tokens) -> Result<Expr> {
    let tok = t.peek().clone();
    if t.is_punct("-") {
        operator(t)?;
        let inner = parse_unary(t)?;
        return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), line: tok.line, col: tok.col });
    }
    parse_power(t)
}

fn small_int(t: &mut Tokens, what: &str) -> Result<u32> {
    let tok = t.peek().clone();
    let n = t.expect_int()?;
    n.to_u32().ok_or_else(|| Error::parse(tok.line, tok.col, format!("{what} out of range")))
}

fn parse_power(t: &mut Tokens) -> Result<Expr> {
    let base = parse_primary(t)?;
    if t.eat_punct("^") {
        let k = small_int(t, "exponent")?;
        let (line, col) = (base.line, base.col);
        return Ok(Expr { kind: ExprKind::Pow(Box::new(base), k), line, col });
    }
    Ok(base)
}

fn parse_args(t: &mut Tokens, close: &str) -> Result<Vec<Expr>> {
    let mut args = Vec::new();
    if t.eat_punct(close) {
        return Ok(args);
    }
    loop {
        args.push(parse_expr(t)?);
        if t.eat_punct(",") {
            continue;
        }
        t.expect_punct(close)?;
        return Ok(args);
    }
}

fn parse_primary(t: &mut Tokens) -> Result<Expr> {
    let tok = t.peek().clone();
    let (line, col) = (tok.line, tok.col);
    let kind = match tok.tok {
        Tok::Int(n) => {
            t.next();
            ExprKind::Int(n)
        }
        Tok::Punct("#") => {
            t.next();
            ExprKind::Param(small_int(t, "parameter index")?)
        }
        Tok::Punct("(") => {
            t.next();
            let e = parse_expr(t)?;
            t.expect_punct(")")?;
            return Ok(e);
        }
        Tok::Punct("[") => {
            t.next();
            ExprKind::List(parse_args(t, "]")?)
        }
        Tok::Ident(name) => {
            t.next();
            let mut primes = 0;
            while t.eat_punct("'") {
                primes += 1;
            }
            if primes > 0 && !t.is_punct("(") {
                return Err(t.error_here("expected `(` after derivative primes"));
            }
            if t.eat_punct("(") {
                ExprKind::Call { name, primes, args: parse_args(t, ")")? }
            } else {
                let mut comp = None;
                if t.eat_punct("[") {
                    let c = small_int(t, "component index")?;
                    comp = Some(u16::try_from(c).map_err(|_| Error::parse(line, col, "component index out of range"))?);
                    t.expect_punct("]")?;
                }
                let mut suffix = String::new();
                while t.eat_punct("_") {
                    match t.next().tok {
                        Tok::Ident(s) => suffix.push_str(&s),
                        other => {
                            return Err(Error::parse(line, col, format!("expected derivative letters, found {}", describe(&other))))
                        }
                    }
                }
                ExprKind::Var { name, comp, suffix }
            }
        }
        other => return Err(Error::parse(line, col, format!("expected an expression, found {}", describe(&other)))),
    };
    Ok(Expr { kind, line, col })
}

/// Parses `src` as a single expression with nothing trailing.
pub fn parse_expression_str(src: &str) -> Result<Expr> {
    let mut t = Tokens::new(src)?;
    let e = parse_expr(&mut t)?;
    if !t.at_eof() {
        return Err(t.error_here(format!("unexpected {}", describe(&t.peek().tok))));
    }
    Ok(e)
}
