use std::fmt;

use num_traits::{Signed, Zero};

use super::ExprError;
use crate::arith::{Integer, Rational};

/// Parsed integrand or coefficient expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprTree {
    Num(Rational),
    Var(String),
    Neg(Box<ExprTree>),
    Add(Box<ExprTree>, Box<ExprTree>),
    Sub(Box<ExprTree>, Box<ExprTree>),
    Mul(Box<ExprTree>, Box<ExprTree>),
    Div(Box<ExprTree>, Box<ExprTree>),
    Pow(Box<ExprTree>, Box<ExprTree>),
    Exp(Box<ExprTree>),
}

impl ExprTree {
    fn precedence(&self) -> u8 {
        match self {
            ExprTree::Add(..) | ExprTree::Sub(..) => 1,
            ExprTree::Mul(..) | ExprTree::Div(..) => 2,
            ExprTree::Neg(..) => 3,
            ExprTree::Pow(..) => 4,
            ExprTree::Num(r) if r.is_negative() || !r.is_integer() => 2,
            _ => 5,
        }
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &ExprTree, min: u8) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            ExprTree::Num(r) => write!(f, "{r}"),
            ExprTree::Var(v) => write!(f, "{v}"),
            ExprTree::Neg(a) => {
                write!(f, "-")?;
                child(f, a, 4)
            }
            ExprTree::Add(a, b) => {
                child(f, a, 1)?;
                write!(f, " + ")?;
                child(f, b, 2)
            }
            ExprTree::Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, " - ")?;
                child(f, b, 2)
            }
            ExprTree::Mul(a, b) => {
                child(f, a, 2)?;
                write!(f, "*")?;
                child(f, b, 3)
            }
            ExprTree::Div(a, b) => {
                child(f, a, 2)?;
                write!(f, "/")?;
                child(f, b, 3)
            }
            ExprTree::Pow(a, b) => {
                child(f, a, 5)?;
                write!(f, "^")?;
                child(f, b, 5)
            }
            ExprTree::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Integer),
    Ident(String),
    Op(char),
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(text: &str) -> Result<Lexed, ExprError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v: Integer = text[start..i].parse().expect("digits");
            toks.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            toks.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(ExprError::Syntax {
                message: format!("unexpected character '{}'", text[i..].chars().next().unwrap()),
                offset: i,
            });
        }
    }
    Ok(Lexed { toks, end: text.len() })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { message: message.into(), offset: self.offset() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExprTree, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = ExprTree::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = ExprTree::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprTree, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = ExprTree::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = ExprTree::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ExprTree, ExprError> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(match inner {
                ExprTree::Num(r) if !r.is_zero() => ExprTree::Num(-r),
                other => ExprTree::Neg(Box::new(other)),
            });
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprTree, ExprError> {
        let base = self.primary()?;
        if self.eat('^') {
            // right-associative; the exponent may carry its own sign
            let exp = self.unary()?;
            return Ok(ExprTree::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ExprTree, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(ExprTree::Num(Rational::from_integer(v)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Op('(')) {
                    if name != "exp" {
                        return Err(ExprError::Syntax {
                            message: format!("unknown function `{name}`"),
                            offset: self.toks[self.pos - 1].1,
                        });
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return self.error("expected ')'");
                    }
                    return Ok(ExprTree::Exp(Box::new(arg)));
                }
                if name == "exp" {
                    return self.error("expected '(' after exp");
                }
                Ok(ExprTree::Var(name))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.error("expected ')'");
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => self.error(format!("unexpected '{c}'")),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parse expression text. Precedence, tightest first: `^` (right
/// associative), unary minus, `*` `/`, `+` `-`.
pub fn parse(text: &str) -> Result<ExprTree, ExprError> {
    let Lexed { toks, end } = lex(text)?;
    let mut p = Parser { toks, pos: 0, end };
    let tree = p.expr()?;
    if p.pos != p.toks.len() {
        return p.error("unexpected trailing input");
    }
    Ok(tree)
}
