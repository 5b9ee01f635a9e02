//! A small arithmetic language for catalog data: rationals, named values,
//! the variable `x`, `+ - * / ^`, parentheses and `sqrt(.)`.

use std::collections::BTreeMap;

use crate::algebra::field::parse_rational;
use crate::algebra::{FieldElement, RationalFunction};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(FieldElement),
    Var(String),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Sqrt(Box<Expr>),
}

/// Named values; `x` is reserved for the independent variable.
pub type Env = BTreeMap<String, RationalFunction>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} in {:?}", self.src))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Bin('+', Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Bin('-', Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Bin('*', Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Bin('/', Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let k: i64 = n.parse().map_err(|_| self.err("bad exponent"))?;
                Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }))
            }
            _ => Err(self.err("exponent must be an integer literal")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(FieldElement::from_rational(parse_rational(&n)?)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "sqrt" {
                    if !self.eat('(') {
                        return Err(self.err("expected ( after sqrt"));
                    }
                    let e = self.sum()?;
                    if !self.eat(')') {
                        return Err(self.err("unbalanced parentheses"));
                    }
                    return Ok(Expr::Sqrt(Box::new(e)));
                }
                if name == "i" {
                    return Ok(Expr::Num(FieldElement::i()));
                }
                Ok(Expr::Var(name))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("unbalanced parentheses"));
                }
                Ok(e)
            }
            _ => Err(self.err("unexpected end of expression")),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0, src };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl Expr {
    pub fn eval(&self, env: &Env) -> Result<RationalFunction> {
        Ok(match self {
            Expr::Num(c) => RationalFunction::constant(c.clone()),
            Expr::Var(v) if v == "x" => RationalFunction::x(),
            Expr::Var(v) => env.get(v).cloned().ok_or_else(|| Error::Parse(format!("unknown name {v:?}")))?,
            Expr::Neg(e) => -&e.eval(env)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(env)?, b.eval(env)?);
                match op {
                    '+' => a.checked_add(&b)?,
                    '-' => a.checked_sub(&b)?,
                    '*' => a.checked_mul(&b)?,
                    _ => a.checked_div(&b)?,
                }
            }
            Expr::Pow(b, k) => {
                let v = b.eval(env)?;
                let p = v.pow(k.unsigned_abs() as usize);
                if *k < 0 { p.inv()? } else { p }
            }
            Expr::Sqrt(e) => {
                let v = e.eval(env)?;
                let c = v.as_constant().ok_or_else(|| Error::Parse("sqrt of a non-constant".into()))?;
                RationalFunction::constant(c.sqrt()?)
            }
        })
    }

    pub fn eval_constant(&self, env: &Env) -> Result<FieldElement> {
        self.eval(env)?
            .as_constant()
            .ok_or_else(|| Error::Parse("expected a constant".into()))
    }
}

/// Parse and evaluate in one step.
pub fn eval(src: &str, env: &Env) -> Result<RationalFunction> {
    parse(src)?.eval(env)
}

/// Split `"name = expr"`.
pub fn split_binding(s: &str) -> Result<(&str, &str)> {
    let (n, e) = s.split_once('=').ok_or_else(|| Error::Parse(format!("expected name = expr, got {s:?}")))?;
    let n = n.trim();
    if n.is_empty() || !n.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(Error::Parse(format!("bad name in {s:?}")));
    }
    Ok((n, e.trim()))
}

/// Evaluate bindings in order, each seeing the ones before it.
pub fn bind_all(bindings: &[String], env: &mut Env) -> Result<()> {
    for b in bindings {
        let (n, e) = split_binding(b)?;
        let v = eval(e, env)?;
        env.insert(n.to_string(), v);
    }
    Ok(())
}
