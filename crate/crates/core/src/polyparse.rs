//! Recursive-descent parser for polynomial expressions over the integers.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 'x' digits | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x0^2` is `-(x0^2)`. There is no
//! implicit multiplication: `2x0` is a syntax error.

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::BigPoly;

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u64 = 1 << 16;
/// Largest number of variables a source may declare.
pub const MAX_ARITY: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty polynomial expression")]
    Empty,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos} (arity {arity})")]
    UnknownVariable { pos: usize, name: String, arity: usize },
    #[error("exponent at position {pos} exceeds {MAX_EXPONENT}")]
    ExponentOverflow { pos: usize },
    #[error("arity {0} out of range 1..={MAX_ARITY}")]
    ArityOutOfRange(usize),
}

/// Polynomial text together with the number of variables `x0..x{arity−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySource {
    pub text: String,
    pub arity: usize,
}

impl PolySource {
    pub fn new(text: impl Into<String>, arity: usize) -> Self {
        PolySource {
            text: text.into(),
            arity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Var(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v: BigInt = text[start..i].parse().expect("digits parse");
                out.push((start, Tok::Int(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Var(text[start..i].to_string())));
                continue;
            }
            _ => {
                let c = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    at: usize,
    arity: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<BigPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BigPoly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.at += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<BigPoly, ParseError> {
        if let Some(Tok::Minus) = self.peek() {
            self.at += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<BigPoly, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.at += 1;
            let pos = self.pos();
            let Some(Tok::Int(e)) = self.peek().cloned() else {
                return self.syntax("expected a non-negative integer exponent after `^`");
            };
            self.at += 1;
            if e > BigInt::from(MAX_EXPONENT) {
                return Err(ParseError::ExponentOverflow { pos });
            }
            let e: u32 = e.try_into().expect("bounded exponent");
            if let Some(Tok::Caret) = self.peek() {
                return self.syntax("chained `^` needs parentheses");
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BigPoly, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.at += 1;
                Ok(BigPoly::constant(self.arity, v))
            }
            Some(Tok::Var(name)) => {
                self.at += 1;
                let index = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    .filter(|d| d.len() == 1 || !d.starts_with('0'))
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&i| i < self.arity);
                match index {
                    Some(i) => Ok(BigPoly::var(self.arity, i)),
                    None => Err(ParseError::UnknownVariable {
                        pos,
                        name,
                        arity: self.arity,
                    }),
                }
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.at += 1;
                        Ok(inner)
                    }
                    _ => self.syntax("expected `)`"),
                }
            }
            Some(t) => self.syntax(format!("unexpected {}", describe(&t))),
            None => self.syntax("unexpected end of input"),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Int(_) => "integer",
        Tok::Var(_) => "variable",
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Caret => "`^`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
    }
}

/// Parse `src.text` into an exact polynomial in `src.arity` variables.
pub fn parse_poly(src: &PolySource) -> Result<BigPoly, ParseError> {
    if src.arity == 0 || src.arity > MAX_ARITY {
        return Err(ParseError::ArityOutOfRange(src.arity));
    }
    if src.text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let toks = lex(&src.text)?;
    let mut p = Parser {
        toks: &toks,
        at: 0,
        arity: src.arity,
        end: src.text.len(),
    };
    let out = p.expr()?;
    if p.at < toks.len() {
        let t = &toks[p.at].1;
        return p.syntax(format!(
            "unexpected {} (implicit multiplication is not supported)",
            describe(t)
        ));
    }
    Ok(out)
}

/// Parse a list of sources sharing one arity.
pub fn parse_many<S: AsRef<str>>(texts: &[S], arity: usize) -> Result<Vec<BigPoly>, ParseError> {
    texts
        .iter()
        .map(|t| parse_poly(&PolySource::new(t.as_ref(), arity)))
        .collect()
}
