//! Element expressions: rational literals, generator names, `+ - * /`, integer powers.

use num::{BigInt, ToPrimitive, Zero};

use derivlab_core::fields::{FieldElement, Rational, TowerField};

use crate::error::{Pos, Result, ScenarioError};
use crate::lexer::{tokenize, Cursor, Tok, Token};

/// Largest exponent magnitude accepted by the parser.
pub const MAX_EXPONENT: i64 = 1000;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Name(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, i64, Pos),
}

impl Expr {
    /// Identifiers in order of first appearance.
    pub fn names(&self) -> Vec<(String, Pos)> {
        let mut out: Vec<(String, Pos)> = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut Vec<(String, Pos)>) {
        match self {
            Expr::Int(_) => {}
            Expr::Name(n, p) => {
                if !out.iter().any(|(m, _)| m == n) {
                    out.push((n.clone(), *p));
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _, _) => a.collect_names(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) => {
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }
}

/// expr := term (('+' | '-') term)*
pub fn parse_expr(c: &mut Cursor) -> Result<Expr> {
    let mut lhs = parse_term(c)?;
    loop {
        if c.eat_sym('+') {
            lhs = Expr::Add(Box::new(lhs), Box::new(parse_term(c)?));
        } else if c.eat_sym('-') {
            lhs = Expr::Sub(Box::new(lhs), Box::new(parse_term(c)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_term(c: &mut Cursor) -> Result<Expr> {
    let mut lhs = parse_unary(c)?;
    loop {
        if c.eat_sym('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(parse_unary(c)?));
        } else if c.is_sym('/') {
            let pos = c.pos();
            c.next();
            lhs = Expr::Div(Box::new(lhs), Box::new(parse_unary(c)?), pos);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_unary(c: &mut Cursor) -> Result<Expr> {
    if c.eat_sym('-') {
        return Ok(Expr::Neg(Box::new(parse_unary(c)?)));
    }
    parse_power(c)
}

fn parse_power(c: &mut Cursor) -> Result<Expr> {
    let base = parse_atom(c)?;
    if !c.is_sym('^') {
        return Ok(base);
    }
    let pos = c.pos();
    c.next();
    let e = parse_exponent(c)?;
    if c.is_sym('^') {
        return Err(ScenarioError::syntax(c.pos(), "chained exponents need parentheses"));
    }
    Ok(Expr::Pow(Box::new(base), e, pos))
}

fn parse_exponent(c: &mut Cursor) -> Result<i64> {
    let paren = c.eat_sym('(');
    let neg = c.eat_sym('-');
    let (n, pos) = c.expect_int()?;
    if paren {
        c.expect_sym(')')?;
    }
    let n = n
        .to_i64()
        .filter(|v| *v <= MAX_EXPONENT)
        .ok_or_else(|| ScenarioError::syntax(pos, format!("exponent exceeds {MAX_EXPONENT}")))?;
    Ok(if neg { -n } else { n })
}

fn parse_atom(c: &mut Cursor) -> Result<Expr> {
    match c.peek() {
        Some(Token { tok: Tok::Int(n), .. }) => {
            c.next();
            Ok(Expr::Int(n.clone()))
        }
        Some(Token { tok: Tok::Ident(s), pos }) => {
            c.next();
            Ok(Expr::Name(s.clone(), *pos))
        }
        Some(Token { tok: Tok::Sym('('), .. }) => {
            c.next();
            let e = parse_expr(c)?;
            c.expect_sym(')')?;
            Ok(e)
        }
        _ => Err(c.unexpected("a number, name or `(`")),
    }
}

/// Evaluates in `tower`, resolving names as generators.
pub fn eval(e: &Expr, tower: &TowerField) -> Result<FieldElement> {
    match e {
        Expr::Int(n) => Ok(tower.rational(&Rational::from_integer(n.clone()))),
        Expr::Name(n, pos) => tower.generator(n).map_err(|_| ScenarioError::UnknownName {
            pos: *pos,
            name: n.clone(),
        }),
        Expr::Neg(a) => Ok(eval(a, tower)?.neg()),
        Expr::Add(a, b) => Ok(eval(a, tower)?.add(&eval(b, tower)?).expect("same tower")),
        Expr::Sub(a, b) => Ok(eval(a, tower)?.sub(&eval(b, tower)?).expect("same tower")),
        Expr::Mul(a, b) => Ok(eval(a, tower)?.mul(&eval(b, tower)?).expect("same tower")),
        Expr::Div(a, b, pos) => {
            let (x, y) = (eval(a, tower)?, eval(b, tower)?);
            x.div(&y).map_err(|e| ScenarioError::field(*pos, e))
        }
        Expr::Pow(a, k, pos) => eval(a, tower)?.pow(*k).map_err(|e| ScenarioError::field(*pos, e)),
    }
}

/// Polynomial in one variable with coefficients in a tower, lowest degree first.
#[derive(Clone, Debug)]
struct ElemPoly(Vec<FieldElement>);

impl ElemPoly {
    fn constant(x: FieldElement) -> Self {
        ElemPoly(vec![x])
    }

    fn trim(mut self) -> Self {
        while self.0.len() > 1 && self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn add(&self, o: &Self, k: &TowerField) -> Self {
        let n = self.0.len().max(o.0.len());
        let get = |p: &ElemPoly, i: usize| p.0.get(i).cloned().unwrap_or_else(|| k.zero());
        ElemPoly((0..n).map(|i| get(self, i).add(&get(o, i)).expect("same tower")).collect()).trim()
    }

    fn neg(&self) -> Self {
        ElemPoly(self.0.iter().map(|c| c.neg()).collect())
    }

    fn mul(&self, o: &Self, k: &TowerField) -> Self {
        let mut out = vec![k.zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b).expect("same tower")).expect("same tower");
            }
        }
        ElemPoly(out).trim()
    }

    fn as_constant(&self) -> Option<&FieldElement> {
        (self.0.len() == 1).then(|| &self.0[0])
    }
}

/// Evaluates `e` as a polynomial in `var` with coefficients in `tower`; returns coefficients
/// lowest degree first. Division is allowed only by nonzero constants, exponents must be ≥ 0.
pub fn eval_poly(e: &Expr, var: &str, tower: &TowerField) -> Result<Vec<FieldElement>> {
    Ok(eval_poly_inner(e, var, tower)?.0)
}

fn eval_poly_inner(e: &Expr, var: &str, k: &TowerField) -> Result<ElemPoly> {
    Ok(match e {
        Expr::Name(n, _) if n == var => ElemPoly(vec![k.zero(), k.one()]),
        Expr::Int(_) | Expr::Name(..) => ElemPoly::constant(eval(e, k)?),
        Expr::Neg(a) => eval_poly_inner(a, var, k)?.neg(),
        Expr::Add(a, b) => eval_poly_inner(a, var, k)?.add(&eval_poly_inner(b, var, k)?, k),
        Expr::Sub(a, b) => eval_poly_inner(a, var, k)?.add(&eval_poly_inner(b, var, k)?.neg(), k),
        Expr::Mul(a, b) => eval_poly_inner(a, var, k)?.mul(&eval_poly_inner(b, var, k)?, k),
        Expr::Div(a, b, pos) => {
            let num = eval_poly_inner(a, var, k)?;
            let den = eval_poly_inner(b, var, k)?;
            let Some(d) = den.as_constant() else {
                return Err(ScenarioError::syntax(*pos, format!("cannot divide by a polynomial in `{var}`")));
            };
            let inv = d.inv().map_err(|e| ScenarioError::field(*pos, e))?;
            num.mul(&ElemPoly::constant(inv), k)
        }
        Expr::Pow(a, n, pos) => {
            let base = eval_poly_inner(a, var, k)?;
            if *n < 0 {
                match base.as_constant() {
                    Some(c) => ElemPoly::constant(c.pow(*n).map_err(|e| ScenarioError::field(*pos, e))?),
                    None => {
                        return Err(ScenarioError::syntax(*pos, format!("negative power of a polynomial in `{var}`")))
                    }
                }
            } else {
                let mut acc = ElemPoly::constant(k.one());
                for _ in 0..*n {
                    acc = acc.mul(&base, k);
                }
                acc
            }
        }
    })
}

/// Parses a whole string as one element expression.
pub fn parse_expr_str(text: &str) -> Result<Expr> {
    let toks = tokenize(text, 1)?;
    let end = crate::error::Pos::new(1, text.chars().count() + 1);
    let mut c = Cursor::new(&toks, end);
    let e = parse_expr(&mut c)?;
    if !c.at_end() {
        return Err(c.unexpected("an operator or end of input"));
    }
    Ok(e)
}

/// Parses and evaluates `text` in `tower`.
pub fn parse_element(text: &str, tower: &TowerField) -> Result<FieldElement> {
    eval(&parse_expr_str(text)?, tower)
}

/// Parses a rational literal `[-]int[/int]`.
pub fn parse_rational(c: &mut Cursor) -> Result<Rational> {
    let neg = c.eat_sym('-');
    let (n, _) = c.expect_int()?;
    let mut q = Rational::from_integer(n);
    if c.is_sym('/') {
        c.next();
        let (d, pos) = c.expect_int()?;
        if d.is_zero() {
            return Err(ScenarioError::DivisionByZero { pos });
        }
        q /= Rational::from_integer(d);
    }
    Ok(if neg { -q } else { q })
}

/// Parses a signed integer literal.
pub fn parse_integer(c: &mut Cursor) -> Result<(i64, Pos)> {
    let pos = c.pos();
    let neg = c.eat_sym('-');
    let (n, ipos) = c.expect_int()?;
    let n = n
        .to_i64()
        .ok_or_else(|| ScenarioError::out_of_range(ipos, "integer does not fit in 64 bits"))?;
    Ok((if neg { -n } else { n }, pos))
}
