//! A small expression language for polynomial and rational-function formulas.
//!
//! Syntax follows computer-algebra conventions: `+ - * / ^`, multiplication by
//! juxtaposition (`2 x^2 y`), parentheses, and calls with square brackets
//! (`Den[x, y]`). Definitions read `Name[a_, b_] := body` (or `=`).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::multipoly::MultiPoly;
use super::rational_fn::RationalFn;
use crate::arith::Rational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(BigInt),
    Sym(String),
    Call(String, Vec<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Op(char),
    Assign,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Num(s.parse().expect("digits parse")));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let mut s: String = chars[start..i].iter().collect();
            // pattern parameters are written `x_`
            if s.ends_with('_') {
                s.pop();
            }
            out.push(Token::Ident(s));
        } else if c == ':' && chars.get(i + 1) == Some(&'=') {
            out.push(Token::Assign);
            i += 2;
        } else if c == '=' {
            out.push(Token::Assign);
            i += 1;
        } else if "+-*/^()[],".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!(
                "unexpected character {c:?} at offset {i}"
            )));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected {c:?} at token {}",
                self.pos
            )))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(
                self.peek(),
                Some(Token::Num(_) | Token::Ident(_) | Token::Op('('))
            ) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let negative = self.eat('-');
        let e = match self.next() {
            Some(Token::Num(n)) => n
                .to_i32()
                .ok_or_else(|| Error::Parse("exponent too large".into()))?,
            _ => return Err(Error::Parse("exponent must be an integer literal".into())),
        };
        if paren {
            self.expect(')')?;
        }
        Ok(Expr::Pow(Box::new(base), if negative { -e } else { e }))
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(n)) => Ok(Expr::Num(n)),
            Some(Token::Ident(name)) => {
                if self.eat('[') {
                    let mut args = Vec::new();
                    if !self.eat(']') {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(']') {
                                break;
                            }
                            self.expect(',')?;
                        }
                    }
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Sym(name))
                }
            }
            Some(Token::Op('(')) => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.tokens.len() {
            return Err(Error::Parse(format!(
                "trailing input at token {}",
                self.pos
            )));
        }
        Ok(())
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses `Name[a_, b_] := body`, returning the name, parameter names and body.
pub fn parse_definition(text: &str) -> Result<(String, Vec<String>, Expr)> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let name = match p.next() {
        Some(Token::Ident(n)) => n,
        _ => return Err(Error::Parse("definition must start with a name".into())),
    };
    let mut params = Vec::new();
    if p.eat('[') && !p.eat(']') {
        loop {
            match p.next() {
                Some(Token::Ident(v)) => params.push(v),
                _ => return Err(Error::Parse("parameters must be names".into())),
            }
            if p.eat(']') {
                break;
            }
            p.expect(',')?;
        }
    }
    if p.next() != Some(Token::Assign) {
        return Err(Error::Parse("expected := in definition".into()));
    }
    let body = p.expr()?;
    p.finish()?;
    Ok((name, params, body))
}

#[derive(Debug, Clone)]
enum Def {
    Formula {
        params: Vec<String>,
        body: Expr,
    },
    Poly {
        params: Vec<String>,
        poly: MultiPoly,
    },
}

/// Evaluation context: ambient variables plus named formulas and polynomials.
#[derive(Debug, Clone)]
pub struct Context {
    vars: Vec<String>,
    defs: HashMap<String, Def>,
    memo: HashMap<(String, Vec<RationalFn>), RationalFn>,
}

impl Context {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Self {
        Context {
            vars: MultiPoly::zero(vars).vars().to_vec(),
            defs: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Adds a formula given as `Name[a_, b_] := body`.
    pub fn define(&mut self, text: &str) -> Result<String> {
        let (name, params, body) = parse_definition(text)?;
        self.defs
            .insert(name.clone(), Def::Formula { params, body });
        self.memo.clear();
        Ok(name)
    }

    /// Binds `name` to a polynomial whose variables are the call parameters.
    pub fn define_poly(&mut self, name: &str, poly: MultiPoly) {
        let params = poly.vars().to_vec();
        self.defs
            .insert(name.to_string(), Def::Poly { params, poly });
        self.memo.clear();
    }

    pub fn eval_str(&mut self, text: &str) -> Result<RationalFn> {
        let e = parse_expr(text)?;
        self.eval(&e)
    }

    pub fn eval(&mut self, e: &Expr) -> Result<RationalFn> {
        self.eval_in(e, &HashMap::new())
    }

    fn eval_in(&mut self, e: &Expr, scope: &HashMap<String, RationalFn>) -> Result<RationalFn> {
        Ok(match e {
            Expr::Num(n) => RationalFn::constant(&self.vars, Rational::from_integer(n.clone())),
            Expr::Sym(s) => {
                if let Some(v) = scope.get(s) {
                    v.clone()
                } else if self.vars.contains(s) {
                    RationalFn::var(&self.vars, s)
                } else if let Some(Def::Formula { params, .. } | Def::Poly { params, .. }) =
                    self.defs.get(s)
                {
                    if params.is_empty() {
                        self.call(s, Vec::new())?
                    } else {
                        return Err(Error::Parse(format!("{s} needs arguments")));
                    }
                } else {
                    return Err(Error::Parse(format!("unknown symbol {s}")));
                }
            }
            Expr::Call(name, args) => {
                let values = args
                    .iter()
                    .map(|a| self.eval_in(a, scope))
                    .collect::<Result<Vec<_>>>()?;
                self.call(name, values)?
            }
            Expr::Neg(a) => self.eval_in(a, scope)?.neg(),
            Expr::Add(a, b) => self.eval_in(a, scope)?.add(&self.eval_in(b, scope)?),
            Expr::Sub(a, b) => self.eval_in(a, scope)?.sub(&self.eval_in(b, scope)?),
            Expr::Mul(a, b) => self.eval_in(a, scope)?.mul(&self.eval_in(b, scope)?),
            Expr::Div(a, b) => self.eval_in(a, scope)?.div(&self.eval_in(b, scope)?)?,
            Expr::Pow(a, k) => {
                let base = self.eval_in(a, scope)?;
                if *k >= 0 {
                    base.pow(*k as u32)
                } else {
                    base.recip()?.pow(k.unsigned_abs())
                }
            }
        })
    }

    fn call(&mut self, name: &str, args: Vec<RationalFn>) -> Result<RationalFn> {
        let key = (name.to_string(), args);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let def = self
            .defs
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Parse(format!("unknown function {name}")))?;
        let args = &key.1;
        let result = match def {
            Def::Formula { params, body } => {
                check_arity(name, params.len(), args.len())?;
                let scope: HashMap<String, RationalFn> =
                    params.into_iter().zip(args.iter().cloned()).collect();
                self.eval_in(&body, &scope)?
            }
            Def::Poly { params, poly } => {
                check_arity(name, params.len(), args.len())?;
                let assignments: HashMap<String, RationalFn> =
                    params.into_iter().zip(args.iter().cloned()).collect();
                let composed = RationalFn::from_poly(&poly).substitute(&assignments)?;
                restrict(&composed, &self.vars)?
            }
        };
        self.memo.insert(key, result.clone());
        Ok(result)
    }
}

fn check_arity(name: &str, want: usize, got: usize) -> Result<()> {
    if want != got {
        return Err(Error::Parse(format!(
            "{name} takes {want} arguments, got {got}"
        )));
    }
    Ok(())
}

/// Re-expresses `f` over `vars`, dropping variables that no longer occur.
fn restrict(f: &RationalFn, vars: &[String]) -> Result<RationalFn> {
    let num = f.num().embed(vars)?;
    if f.is_polynomial() {
        return Ok(RationalFn::from_poly(&num));
    }
    let mut out = RationalFn::from_poly(&num);
    for (g, k) in f.denominator_factors() {
        out = out.div(&RationalFn::from_poly(&g.embed(vars)?).pow(*k))?;
    }
    Ok(out)
}

/// Parses text as a polynomial over `vars`; divisions must be exact.
pub fn parse_polynomial<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<MultiPoly> {
    let mut ctx = Context::new(vars);
    ctx.eval_str(text)?.into_poly()
}

/// Parses a rational constant expression such as `-3/4` or `2^10/3`.
pub fn parse_constant(text: &str) -> Result<Rational> {
    let f = Context::new::<&str>(&[]).eval_str(text)?;
    Ok(f.scalar().clone())
}
