use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const PUNCTS: &[&str] = &[
    "->", "+", "-", "*", "/", "^", "(", ")", "[", "]", "{", "}", ",", ";", ":", "=", "_", "'", "#", "|",
];

fn ident_start(c: char) -> bool {
    c.is_alphabetic()
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '†'
}

/// Splits source text into tokens; `//` starts a comment running to the end of the line.
pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        if ident_start(c) {
            let start = i;
            while i < chars.len() && ident_continue(chars[i]) {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Int(s.parse().expect("digits")), line: l0, col: c0 });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.chars().count();
                col += p.chars().count();
                out.push(Token { tok: Tok::Punct(p), line: l0, col: c0 });
            }
            None => return Err(Error::parse(l0, c0, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Cursor over a token list with diagnostics.
#[derive(Clone, Debug)]
pub struct Tokens {
    toks: Vec<Token>,
    pos: usize,
}

impl Tokens {
    pub fn new(src: &str) -> Result<Tokens> {
        Ok(Tokens { toks: tokenize(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)]
    }

    pub fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    /// Whether token `k + 1` starts right where token `k` ends, counted from the cursor.
    pub fn adjacent(&self, k: usize) -> bool {
        let (a, b) = (self.peek_at(k), self.peek_at(k + 1));
        let width = match &a.tok {
            Tok::Ident(s) => s.chars().count(),
            Tok::Int(n) => n.to_string().len(),
            Tok::Punct(p) => p.chars().count(),
            Tok::Eof => return false,
        };
        a.line == b.line && a.col + width == b.col
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(q) if q == s)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn eat_ident(&mut self, s: &str) -> bool {
        if self.is_ident(s) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn error_here(&self, msg: impl Into<String>) -> Error {
        let t = self.peek();
        Error::parse(t.line, t.col, msg)
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{p}`, found {}", describe(&self.peek().tok))))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, usize, usize)> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(s) => {
                self.next();
                Ok((s, t.line, t.col))
            }
            other => Err(self.error_here(format!("expected identifier, found {}", describe(&other)))),
        }
    }

    pub fn expect_keyword(&mut self, k: &str) -> Result<()> {
        if self.eat_ident(k) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{k}`, found {}", describe(&self.peek().tok))))
        }
    }

    pub fn expect_int(&mut self) -> Result<BigInt> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            other => Err(self.error_here(format!("expected integer, found {}", describe(&other)))),
        }
    }

    /// A name made of identifiers joined by `_` or `-` without spaces, e.g. `kdv_q2`, `charge-of`.
    pub fn expect_name(&mut self) -> Result<(String, usize, usize)> {
        let (mut s, l, c) = self.expect_ident()?;
        loop {
            let tight = self.pos > 0 && {
                let prev = &self.toks[self.pos - 1];
                let width = match &prev.tok {
                    Tok::Ident(p) => p.chars().count(),
                    Tok::Int(n) => n.to_string().len(),
                    _ => 0,
                };
                prev.line == self.peek().line && prev.col + width == self.peek().col && self.adjacent(0)
            };
            let joiner = if !tight {
                break;
            } else if self.is_punct("_") {
                "_"
            } else if self.is_punct("-") && matches!(self.peek_at(1).tok, Tok::Ident(_) | Tok::Int(_)) {
                "-"
            } else {
                break;
            };
            self.next();
            s.push_str(joiner);
            match self.next().tok {
                Tok::Ident(p) => s.push_str(&p),
                Tok::Int(n) => s.push_str(&n.to_string()),
                other => return Err(self.error_here(format!("expected name part, found {}", describe(&other)))),
            }
        }
        Ok((s, l, c))
    }
}

pub fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of input".to_string(),
    }
}
