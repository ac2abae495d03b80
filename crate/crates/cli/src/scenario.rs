//! Scenario files: one tower, named maps, a sample choice and a list of checks.
//!
//! Statements end at a newline or `;`. `title` and `anchor` take the rest of their line.

use std::collections::BTreeMap;

use derivlab_core::calculus::MAX_ARITY;
use derivlab_core::fields::{build_tower, rat, FieldElement, GeneratorSpec, MobiusCoeffs, Rational, TowerField};
use derivlab_core::maps::{derivation_extend, matrix_map, quadratic_conjugation, AdditiveMap};
use num::{One, Zero};

use crate::error::{Pos, Result, ScenarioError};
use crate::expr::{eval, eval_poly, parse_expr, parse_integer, parse_rational, Expr};
use crate::lexer::{tokenize, Cursor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Pass,
    Fail,
}

impl Expectation {
    pub fn as_str(self) -> &'static str {
        match self {
            Expectation::Pass => "pass",
            Expectation::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug)]
pub enum SampleSpec {
    Default { size: Option<usize> },
    Random { size: usize, seed: u64 },
    List(Vec<FieldElement>),
}

/// A map argument with the text it was written as.
#[derive(Clone, Debug)]
pub struct MapArg {
    pub text: String,
    pub map: AdditiveMap,
}

#[derive(Clone, Debug)]
pub enum CheckSpec {
    PowerRule { f: MapArg, k: i64 },
    Reciprocal { f: MapArg },
    Nishiyama { f: MapArg, c: Rational, n: i64, m: i64, k: i64 },
    KannappanKurepa { f: MapArg, g: MapArg, n: i64, m: i64 },
    PhiPower { f: MapArg, g: MapArg, n: i64, m: i64 },
    Chi { f: MapArg, g: MapArg },
    Composite { f: MapArg, kappa: Rational, n: i64, m: i64 },
    Linearity { f: MapArg, n: i64 },
    Homogeneity { f: MapArg, g: MapArg, n: i64, m: i64, alpha: i64, rs: Vec<Rational> },
    RationalPower { f: MapArg, p: i64, q: i64 },
    MobiusForward { f: MapArg, alpha: Rational, beta: Rational, n: i64, mat: MobiusCoeffs, g_factor: Option<Rational> },
    Star { f: MapArg, g: MapArg, n: i64, mat: MobiusCoeffs },
    Triangle { f: MapArg, g: MapArg, n: i64, mat: MobiusCoeffs },
    Derivation { f: MapArg },
    Linear { f: MapArg },
    Additive { f: MapArg, rs: Vec<Rational> },
    SymmetrizePower { f: MapArg, g: MapArg, n: usize, m: usize },
    SymmetrizeLinearity { f: MapArg, n: usize },
    Split { d: Rational, det: Rational, n: i64 },
}

#[derive(Clone, Debug)]
pub struct Check {
    /// Canonical check name.
    pub kind: &'static str,
    pub spec: CheckSpec,
    pub expect: Expectation,
    pub pos: Pos,
    /// Parameters as written, for reports.
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub title: Option<String>,
    pub anchor: Option<String>,
    pub tower: TowerField,
    pub maps: Vec<(String, AdditiveMap)>,
    pub samples: SampleSpec,
    pub checks: Vec<Check>,
}

const RESERVED: [&str; 4] = ["id", "zero", "mul", "Q"];

/// Rationals used for homogeneity checks when none are given.
pub fn default_rationals() -> Vec<Rational> {
    vec![rat(-1), rat(2), Rational::new(1.into(), 3.into()), Rational::new((-5).into(), 2.into())]
}

#[derive(Clone, Copy, PartialEq)]
enum ParamType {
    Map,
    Int,
    Rat,
    Matrix,
    RatList,
    Flag,
}

#[derive(Clone, Debug)]
enum Value {
    Map(MapArg),
    Int(i64),
    Rat(Rational),
    Matrix(MobiusCoeffs),
    RatList(Vec<Rational>),
    Flag,
}

struct KindInfo {
    name: &'static str,
    aliases: &'static [&'static str],
    params: &'static [(&'static str, ParamType)],
}

use ParamType::*;

const KINDS: &[KindInfo] = &[
    KindInfo { name: "power_rule", aliases: &[], params: &[("f", Map), ("k", Int)] },
    KindInfo { name: "reciprocal", aliases: &["jurkat_kurepa"], params: &[("f", Map)] },
    KindInfo {
        name: "nishiyama",
        aliases: &[],
        params: &[("f", Map), ("c", Rat), ("n", Int), ("m", Int), ("k", Int)],
    },
    KindInfo {
        name: "kannappan_kurepa",
        aliases: &["theorem1"],
        params: &[("f", Map), ("g", Map), ("n", Int), ("m", Int)],
    },
    KindInfo { name: "phi_power", aliases: &[], params: &[("f", Map), ("g", Map), ("n", Int), ("m", Int)] },
    KindInfo { name: "chi_identity", aliases: &["chi"], params: &[("f", Map), ("g", Map)] },
    KindInfo { name: "composite", aliases: &[], params: &[("f", Map), ("kappa", Rat), ("n", Int), ("m", Int)] },
    KindInfo { name: "linearity", aliases: &[], params: &[("f", Map), ("n", Int)] },
    KindInfo {
        name: "homogeneity",
        aliases: &[],
        params: &[("f", Map), ("g", Map), ("n", Int), ("m", Int), ("alpha", Int), ("r", RatList)],
    },
    KindInfo { name: "rational_power", aliases: &[], params: &[("f", Map), ("p", Int), ("q", Int)] },
    KindInfo {
        name: "mobius_forward",
        aliases: &[],
        params: &[("f", Map), ("alpha", Rat), ("beta", Rat), ("n", Int), ("M", Matrix), ("g_factor", Rat)],
    },
    KindInfo {
        name: "star",
        aliases: &[],
        params: &[("f", Map), ("g", Map), ("n", Int), ("M", Matrix), ("swap_roles", Flag)],
    },
    KindInfo {
        name: "triangle",
        aliases: &[],
        params: &[("f", Map), ("g", Map), ("n", Int), ("M", Matrix), ("swap_roles", Flag)],
    },
    KindInfo { name: "derivation", aliases: &[], params: &[("f", Map)] },
    KindInfo { name: "linear", aliases: &[], params: &[("f", Map)] },
    KindInfo { name: "additive", aliases: &[], params: &[("f", Map), ("r", RatList)] },
    KindInfo { name: "symmetrize_power", aliases: &[], params: &[("f", Map), ("g", Map), ("n", Int), ("m", Int)] },
    KindInfo { name: "symmetrize_linearity", aliases: &[], params: &[("f", Map), ("n", Int)] },
    KindInfo { name: "split_identity", aliases: &[], params: &[("d", Rat), ("D", Rat), ("n", Int)] },
];

/// Canonical names of all check kinds.
pub fn check_kinds() -> Vec<&'static str> {
    KINDS.iter().map(|k| k.name).collect()
}

struct Parser {
    title: Option<String>,
    anchor: Option<String>,
    tower: Option<TowerField>,
    maps: Vec<(String, AdditiveMap)>,
    samples: Option<SampleSpec>,
    checks: Vec<Check>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut p = Parser {
        title: None,
        anchor: None,
        tower: None,
        maps: Vec::new(),
        samples: None,
        checks: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if let Some(rest) = keyword_line(raw, "title") {
            p.title = Some(rest);
            continue;
        }
        if let Some(rest) = keyword_line(raw, "anchor") {
            p.anchor = Some(rest);
            continue;
        }
        let toks = tokenize(raw, line)?;
        let mut c = Cursor::new(&toks, Pos::new(line, raw.chars().count() + 1));
        while !c.at_end() {
            if c.eat_sym(';') {
                continue;
            }
            p.statement(&mut c)?;
            if !c.at_end() && !c.is_sym(';') {
                return Err(c.unexpected("`;` or end of line"));
            }
        }
    }
    let Some(tower) = p.tower else {
        return Err(ScenarioError::syntax(Pos::new(1, 1), "no `tower` statement"));
    };
    Ok(Scenario {
        title: p.title,
        anchor: p.anchor,
        tower,
        maps: p.maps,
        samples: p.samples.unwrap_or(SampleSpec::Default { size: None }),
        checks: p.checks,
    })
}

fn keyword_line(raw: &str, kw: &str) -> Option<String> {
    let t = raw.trim_start();
    let rest = t.strip_prefix(kw)?;
    if rest.is_empty() || rest.starts_with(char::is_whitespace) {
        Some(rest.trim().to_string())
    } else {
        None
    }
}

impl Parser {
    fn tower(&self, pos: Pos) -> Result<&TowerField> {
        self.tower
            .as_ref()
            .ok_or_else(|| ScenarioError::syntax(pos, "a `tower` statement must come first"))
    }

    fn statement(&mut self, c: &mut Cursor) -> Result<()> {
        let (kw, pos) = c.expect_ident()?;
        match kw.as_str() {
            "tower" => {
                if self.tower.is_some() {
                    return Err(ScenarioError::syntax(pos, "only one `tower` statement is allowed"));
                }
                self.tower = Some(parse_tower(c)?);
                Ok(())
            }
            "map" => self.map_statement(c, pos),
            "samples" => self.samples_statement(c, pos),
            "check" => self.check_statement(c, pos),
            other => Err(ScenarioError::syntax(pos, format!("unknown statement `{other}`"))),
        }
    }

    fn map_statement(&mut self, c: &mut Cursor, pos: Pos) -> Result<()> {
        let tower = self.tower(pos)?.clone();
        let (name, npos) = c.expect_ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(ScenarioError::syntax(npos, format!("`{name}` is reserved")));
        }
        if self.maps.iter().any(|(n, _)| *n == name) {
            return Err(ScenarioError::syntax(npos, format!("map `{name}` is already defined")));
        }
        c.expect_sym('=')?;
        let start = c.pos();
        let map = if c.is_ident("d") && c.peek_at(1).is_some_and(|t| t.tok == crate::lexer::Tok::Sym('/')) {
            c.next();
            c.next();
            let (var, vpos) = c.expect_ident()?;
            let gen = var.strip_prefix('d').unwrap_or("");
            if tower.transcendental() != Some(gen) {
                return Err(ScenarioError::UnknownName { pos: vpos, name: gen.to_string() });
            }
            let images = if c.is_ident("with") {
                self.images(c, &name, &tower)?
            } else {
                vec![(gen.to_string(), tower.one())]
            };
            self.derivation(&tower, &images, start)?
        } else if c.eat_ident("derivation") {
            let images = if c.is_ident("with") { self.images(c, &name, &tower)? } else { Vec::new() };
            self.derivation(&tower, &images, start)?
        } else if c.eat_ident("matrix") {
            c.expect_keyword("basis")?;
            let basis = element_list(c, &tower)?;
            c.expect_keyword("images")?;
            let images = element_list(c, &tower)?;
            matrix_map(basis, images).map_err(|e| ScenarioError::field(start, e))?
        } else if c.eat_ident("conjugation") {
            let (g, gpos) = c.expect_ident()?;
            quadratic_conjugation(&tower, &g).map_err(|e| ScenarioError::field(gpos, e))?
        } else {
            parse_map_expr(c, &self.maps, &tower)?
        };
        self.maps.push((name, map));
        Ok(())
    }

    fn images(&self, c: &mut Cursor, name: &str, tower: &TowerField) -> Result<Vec<(String, FieldElement)>> {
        c.expect_keyword("with")?;
        let mut out: Vec<(String, FieldElement)> = Vec::new();
        loop {
            let (m, mpos) = c.expect_ident()?;
            if m != name {
                return Err(ScenarioError::syntax(mpos, format!("expected `{name}`, found `{m}`")));
            }
            c.expect_sym('(')?;
            let (g, gpos) = c.expect_ident()?;
            c.expect_sym(')')?;
            c.expect_sym('=')?;
            let v = eval(&parse_expr(c)?, tower)?;
            if out.iter().any(|(h, _)| *h == g) {
                return Err(ScenarioError::syntax(gpos, format!("image of `{g}` given twice")));
            }
            if tower.generator(&g).is_err() {
                return Err(ScenarioError::UnknownName { pos: gpos, name: g });
            }
            out.push((g, v));
            if !c.eat_sym(',') {
                return Ok(out);
            }
        }
    }

    fn derivation(&self, tower: &TowerField, images: &[(String, FieldElement)], pos: Pos) -> Result<AdditiveMap> {
        let refs: Vec<(&str, FieldElement)> = images.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
        derivation_extend(tower, &refs).map_err(|e| ScenarioError::field(pos, e))
    }

    fn samples_statement(&mut self, c: &mut Cursor, pos: Pos) -> Result<()> {
        let spec = if c.eat_ident("default") {
            let size = if c.at_end() || c.is_sym(';') { None } else { Some(parse_size(c)?) };
            SampleSpec::Default { size }
        } else if c.eat_ident("random") {
            let size = parse_size(c)?;
            let seed = if c.eat_ident("seed") {
                let (s, spos) = c.expect_int()?;
                s.try_into().map_err(|_| ScenarioError::out_of_range(spos, "seed must fit in 64 bits"))?
            } else {
                0
            };
            SampleSpec::Random { size, seed }
        } else if c.eat_ident("list") {
            let tower = self.tower(pos)?.clone();
            let mut xs = vec![eval(&parse_expr(c)?, &tower)?];
            while c.eat_sym(',') {
                xs.push(eval(&parse_expr(c)?, &tower)?);
            }
            SampleSpec::List(xs)
        } else {
            SampleSpec::Default { size: Some(parse_size(c)?) }
        };
        self.samples = Some(spec);
        Ok(())
    }

    fn check_statement(&mut self, c: &mut Cursor, pos: Pos) -> Result<()> {
        let tower = self.tower(pos)?.clone();
        let (kind, kpos) = c.expect_ident()?;
        let Some(info) = KINDS.iter().find(|k| k.name == kind || k.aliases.contains(&kind.as_str())) else {
            return Err(ScenarioError::syntax(kpos, format!("unknown check `{kind}`")));
        };
        let mut values: BTreeMap<&'static str, (Value, Pos)> = BTreeMap::new();
        let mut params = BTreeMap::new();
        let mut expect = Expectation::Pass;
        while !c.at_end() && !c.is_sym(';') {
            let (key, key_pos) = c.expect_ident()?;
            if key == "expect" {
                if !c.eat_sym(':') {
                    c.expect_sym('=')?;
                }
                let (v, vpos) = c.expect_ident()?;
                expect = match v.as_str() {
                    "pass" => Expectation::Pass,
                    "fail" => Expectation::Fail,
                    _ => return Err(ScenarioError::syntax(vpos, "expected `pass` or `fail`")),
                };
                continue;
            }
            let Some(&(pname, ptype)) = info.params.iter().find(|(n, _)| *n == key) else {
                return Err(ScenarioError::syntax(key_pos, format!("unknown parameter `{key}` for check `{}`", info.name)));
            };
            if values.contains_key(pname) {
                return Err(ScenarioError::syntax(key_pos, format!("parameter `{key}` given twice")));
            }
            if ptype == Flag {
                values.insert(pname, (Value::Flag, key_pos));
                params.insert(pname.to_string(), "true".to_string());
                continue;
            }
            c.expect_sym('=')?;
            let start = c.index();
            let vpos = c.pos();
            let v = match ptype {
                Map => Value::Map(parse_map_arg(c, &self.maps, &tower)?),
                Int => Value::Int(parse_integer(c)?.0),
                Rat => Value::Rat(parse_rational(c)?),
                Matrix => Value::Matrix(parse_matrix(c)?),
                RatList => Value::RatList(parse_rat_list(c)?),
                Flag => unreachable!("handled above"),
            };
            params.insert(pname.to_string(), c.text_since(start));
            values.insert(pname, (v, vpos));
        }
        let spec = build_spec(info.name, values, kpos)?;
        self.checks.push(Check {
            kind: info.name,
            spec,
            expect,
            pos: kpos,
            params,
        });
        Ok(())
    }
}

fn parse_size(c: &mut Cursor) -> Result<usize> {
    let (n, pos) = c.expect_int()?;
    let n: usize = n
        .try_into()
        .map_err(|_| ScenarioError::out_of_range(pos, "sample size too large"))?;
    if n == 0 || n > 10_000 {
        return Err(ScenarioError::out_of_range(pos, "sample size must be between 1 and 10000"));
    }
    Ok(n)
}

fn element_list(c: &mut Cursor, tower: &TowerField) -> Result<Vec<FieldElement>> {
    c.expect_sym('(')?;
    let mut out = vec![eval(&parse_expr(c)?, tower)?];
    while c.eat_sym(',') {
        out.push(eval(&parse_expr(c)?, tower)?);
    }
    c.expect_sym(')')?;
    Ok(out)
}

fn parse_matrix(c: &mut Cursor) -> Result<MobiusCoeffs> {
    let pos = c.expect_sym('(')?;
    let a = parse_rational(c)?;
    c.expect_sym(',')?;
    let b = parse_rational(c)?;
    c.expect_sym(';')?;
    let cc = parse_rational(c)?;
    c.expect_sym(',')?;
    let d = parse_rational(c)?;
    c.expect_sym(')')?;
    MobiusCoeffs::new(a, b, cc, d).map_err(|e| ScenarioError::field(pos, e))
}

fn parse_rat_list(c: &mut Cursor) -> Result<Vec<Rational>> {
    let pos = c.pos();
    let list = if c.eat_sym('(') {
        let mut out = vec![parse_rational(c)?];
        while c.eat_sym(',') {
            out.push(parse_rational(c)?);
        }
        c.expect_sym(')')?;
        out
    } else {
        vec![parse_rational(c)?]
    };
    if list.iter().any(|r| r.is_zero()) {
        return Err(ScenarioError::out_of_range(pos, "rationals must be nonzero"));
    }
    Ok(list)
}

/// A map argument: a defined name, `id`, `zero`, `mul(expr)`, or a parenthesized map expression.
fn parse_map_arg(c: &mut Cursor, maps: &[(String, AdditiveMap)], tower: &TowerField) -> Result<MapArg> {
    let start = c.index();
    let map = if c.is_sym('(') {
        c.next();
        let m = parse_map_expr(c, maps, tower)?;
        c.expect_sym(')')?;
        m
    } else {
        map_atom(c, maps, tower)?
    };
    Ok(MapArg { text: c.text_since(start), map })
}

/// mexpr := ['-'] mterm (('+' | '-') mterm)*, mterm := [rational '*'] matom | rational
pub(crate) fn parse_map_expr(c: &mut Cursor, maps: &[(String, AdditiveMap)], tower: &TowerField) -> Result<AdditiveMap> {
    let mut acc = if c.eat_sym('-') {
        map_term(c, maps, tower)?.scaled(&rat(-1))
    } else {
        map_term(c, maps, tower)?
    };
    loop {
        if c.eat_sym('+') {
            acc = acc.plus(&map_term(c, maps, tower)?);
        } else if c.eat_sym('-') {
            acc = acc.plus(&map_term(c, maps, tower)?.scaled(&rat(-1)));
        } else {
            return Ok(acc);
        }
    }
}

fn map_term(c: &mut Cursor, maps: &[(String, AdditiveMap)], tower: &TowerField) -> Result<AdditiveMap> {
    if matches!(c.peek().map(|t| &t.tok), Some(crate::lexer::Tok::Int(_))) {
        let q = parse_rational(c)?;
        if c.eat_sym('*') {
            return Ok(map_atom(c, maps, tower)?.scaled(&q));
        }
        return Ok(AdditiveMap::scaled_identity(q));
    }
    map_atom(c, maps, tower)
}

fn map_atom(c: &mut Cursor, maps: &[(String, AdditiveMap)], tower: &TowerField) -> Result<AdditiveMap> {
    if c.eat_sym('(') {
        let m = parse_map_expr(c, maps, tower)?;
        c.expect_sym(')')?;
        return Ok(m);
    }
    let (name, pos) = c.expect_ident()?;
    match name.as_str() {
        "id" => Ok(AdditiveMap::identity()),
        "zero" => Ok(AdditiveMap::zero()),
        "mul" => {
            c.expect_sym('(')?;
            let x = eval(&parse_expr(c)?, tower)?;
            c.expect_sym(')')?;
            Ok(AdditiveMap::Multiplication(x))
        }
        _ => maps
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, m)| m.clone())
            .ok_or(ScenarioError::UnknownName { pos, name }),
    }
}

fn build_spec(kind: &str, mut v: BTreeMap<&'static str, (Value, Pos)>, pos: Pos) -> Result<CheckSpec> {
    let missing = |k: &str| ScenarioError::syntax(pos, format!("check `{kind}` needs parameter `{k}`"));
    macro_rules! take {
        ($key:expr, $variant:ident) => {
            match v.remove($key) {
                Some((Value::$variant(x), p)) => Ok((x, p)),
                Some(_) => unreachable!("typed by the parameter table"),
                None => Err(missing($key)),
            }
        };
    }
    let nonzero = |x: i64, p: Pos, what: &str| {
        if x == 0 {
            Err(ScenarioError::out_of_range(p, format!("{what} must be nonzero")))
        } else {
            Ok(x)
        }
    };
    let distinct = |n: i64, m: i64| {
        if n == m {
            Err(ScenarioError::out_of_range(pos, format!("n and m must differ, got n = m = {n}")))
        } else {
            Ok(())
        }
    };
    let spec = match kind {
        "power_rule" => {
            let (k, kp) = take!("k", Int)?;
            CheckSpec::PowerRule { f: take!("f", Map)?.0, k: nonzero(k, kp, "k")? }
        }
        "reciprocal" => CheckSpec::Reciprocal { f: take!("f", Map)?.0 },
        "nishiyama" => CheckSpec::Nishiyama {
            f: take!("f", Map)?.0,
            c: take!("c", Rat)?.0,
            n: take!("n", Int)?.0,
            m: take!("m", Int)?.0,
            k: take!("k", Int)?.0,
        },
        "kannappan_kurepa" | "phi_power" | "symmetrize_power" | "homogeneity" | "composite" => {
            let (n, np) = take!("n", Int)?;
            let (m, mp) = take!("m", Int)?;
            let (n, m) = (nonzero(n, np, "n")?, nonzero(m, mp, "m")?);
            distinct(n, m)?;
            match kind {
                "kannappan_kurepa" => CheckSpec::KannappanKurepa { f: take!("f", Map)?.0, g: take!("g", Map)?.0, n, m },
                "phi_power" => CheckSpec::PhiPower { f: take!("f", Map)?.0, g: take!("g", Map)?.0, n, m },
                "composite" => CheckSpec::Composite { f: take!("f", Map)?.0, kappa: take!("kappa", Rat)?.0, n, m },
                "homogeneity" => {
                    let alpha = v.remove("alpha").map(|(x, _)| x);
                    let alpha = match alpha {
                        Some(Value::Int(a)) => a,
                        _ => n,
                    };
                    let rs = match v.remove("r") {
                        Some((Value::RatList(rs), _)) => rs,
                        _ => default_rationals(),
                    };
                    CheckSpec::Homogeneity { f: take!("f", Map)?.0, g: take!("g", Map)?.0, n, m, alpha, rs }
                }
                _ => {
                    if m < 1 || n <= m || n as usize > MAX_ARITY {
                        return Err(ScenarioError::out_of_range(
                            pos,
                            format!("symmetrization needs {MAX_ARITY} >= n > m >= 1, got n = {n}, m = {m}"),
                        ));
                    }
                    CheckSpec::SymmetrizePower { f: take!("f", Map)?.0, g: take!("g", Map)?.0, n: n as usize, m: m as usize }
                }
            }
        }
        "chi_identity" => CheckSpec::Chi { f: take!("f", Map)?.0, g: take!("g", Map)?.0 },
        "linearity" | "symmetrize_linearity" => {
            let (n, np) = take!("n", Int)?;
            if n < 2 || (kind == "symmetrize_linearity" && n as usize > MAX_ARITY) {
                return Err(ScenarioError::out_of_range(np, format!("n must be at least 2, got {n}")));
            }
            let f = take!("f", Map)?.0;
            if kind == "linearity" {
                CheckSpec::Linearity { f, n }
            } else {
                CheckSpec::SymmetrizeLinearity { f, n: n as usize }
            }
        }
        "rational_power" => {
            let (p, pp) = take!("p", Int)?;
            let (q, qp) = take!("q", Int)?;
            if q < 1 {
                return Err(ScenarioError::out_of_range(qp, "q must be positive"));
            }
            if p == 0 || p == q {
                return Err(ScenarioError::out_of_range(pp, "r = p/q must differ from 0 and 1"));
            }
            CheckSpec::RationalPower { f: take!("f", Map)?.0, p, q }
        }
        "mobius_forward" => {
            let (n, np) = take!("n", Int)?;
            let n = nonzero(n, np, "n")?;
            let (mat, mpos) = take!("M", Matrix)?;
            if mat.c().is_zero() && n == 1 {
                return Err(ScenarioError::out_of_range(mpos, "c = 0 requires n != 1"));
            }
            if mat.d().is_zero() && n == -1 {
                return Err(ScenarioError::out_of_range(mpos, "d = 0 requires n != -1"));
            }
            let alpha = take!("alpha", Rat).map(|x| x.0).unwrap_or_else(|_| Rational::zero());
            let beta = take!("beta", Rat).map(|x| x.0).unwrap_or_else(|_| Rational::zero());
            let g_factor = take!("g_factor", Rat).ok().map(|x| x.0);
            CheckSpec::MobiusForward { f: take!("f", Map)?.0, alpha, beta, n, mat, g_factor }
        }
        "star" | "triangle" => {
            let (n, np) = take!("n", Int)?;
            let n = nonzero(n, np, "n")?;
            let mat = take!("M", Matrix)?.0;
            let mut f = take!("f", Map)?.0;
            let mut g = take!("g", Map)?.0;
            if v.remove("swap_roles").is_some() {
                std::mem::swap(&mut f, &mut g);
            }
            if kind == "star" {
                CheckSpec::Star { f, g, n, mat }
            } else {
                CheckSpec::Triangle { f, g, n, mat }
            }
        }
        "derivation" => CheckSpec::Derivation { f: take!("f", Map)?.0 },
        "linear" => CheckSpec::Linear { f: take!("f", Map)?.0 },
        "additive" => {
            let rs = match v.remove("r") {
                Some((Value::RatList(rs), _)) => rs,
                _ => default_rationals(),
            };
            CheckSpec::Additive { f: take!("f", Map)?.0, rs }
        }
        "split_identity" => {
            let (d, dp) = take!("d", Rat)?;
            let (det, detp) = take!("D", Rat)?;
            let (n, np) = take!("n", Int)?;
            if d.is_zero() {
                return Err(ScenarioError::out_of_range(dp, "d must be nonzero"));
            }
            if det.is_zero() {
                return Err(ScenarioError::out_of_range(detp, "D must be nonzero"));
            }
            CheckSpec::Split { d, det, n: nonzero(n, np, "n")? }
        }
        _ => unreachable!("kind table and builder agree"),
    };
    Ok(spec)
}

/// Parses a tower descriptor such as `Q(t, s | s^2 = t)` or `Q(sqrt2 | x^2 - 2)`, followed by
/// an optional `assume_irreducible`.
///
/// A relation defines the last declared generator it mentions. A relation in a placeholder
/// variable (a name that is not a generator) is given to the remaining generators without a
/// relation, taken from the end. Generators without a relation are transcendental.
pub fn parse_tower(c: &mut Cursor) -> Result<TowerField> {
    let qpos = c.expect_keyword("Q")?;
    let mut names: Vec<(String, Pos)> = Vec::new();
    let mut relations: Vec<(Expr, Pos)> = Vec::new();
    if c.eat_sym('(') {
        if !c.is_sym(')') && !c.is_sym('|') {
            loop {
                let (n, p) = c.expect_ident()?;
                if RESERVED.contains(&n.as_str()) {
                    return Err(ScenarioError::syntax(p, format!("`{n}` is reserved")));
                }
                names.push((n, p));
                if !c.eat_sym(',') {
                    break;
                }
            }
        }
        if c.eat_sym('|') {
            loop {
                let p = c.pos();
                let lhs = parse_expr(c)?;
                let e = if c.eat_sym('=') { Expr::Sub(Box::new(lhs), Box::new(parse_expr(c)?)) } else { lhs };
                relations.push((e, p));
                if !c.eat_sym(',') {
                    break;
                }
            }
        }
        c.expect_sym(')')?;
    }
    let assume = c.eat_ident("assume_irreducible");
    let mut assigned: Vec<Option<(Expr, String, Pos)>> = vec![None; names.len()];
    let mut placeholder = Vec::new();
    for (e, p) in relations {
        let mentioned = e.names();
        let gens: Vec<usize> = mentioned
            .iter()
            .filter_map(|(n, _)| names.iter().position(|(m, _)| m == n))
            .collect();
        let others: Vec<&(String, Pos)> = mentioned.iter().filter(|(n, _)| !names.iter().any(|(m, _)| m == n)).collect();
        match others.as_slice() {
            [] => {
                let Some(&target) = gens.iter().max() else {
                    return Err(ScenarioError::syntax(p, "relation mentions no generator"));
                };
                if assigned[target].is_some() {
                    return Err(ScenarioError::syntax(p, format!("second relation for `{}`", names[target].0)));
                }
                assigned[target] = Some((e, names[target].0.clone(), p));
            }
            [(var, _)] => placeholder.push((e, var.clone(), p)),
            [_, (n, npos), ..] => return Err(ScenarioError::UnknownName { pos: *npos, name: n.clone() }),
        }
    }
    let free: Vec<usize> = (0..names.len()).filter(|&i| assigned[i].is_none()).collect();
    if placeholder.len() > free.len() {
        return Err(ScenarioError::syntax(placeholder[free.len()].2, "more relations than generators"));
    }
    let targets = &free[free.len() - placeholder.len()..];
    for (&i, rel) in targets.iter().zip(placeholder) {
        assigned[i] = Some(rel);
    }
    let mut specs: Vec<GeneratorSpec> = Vec::new();
    for (i, (name, _)) in names.iter().enumerate() {
        let spec = match &assigned[i] {
            None => GeneratorSpec::transcendental(name),
            Some((e, var, rpos)) => {
                let below = if specs.is_empty() {
                    TowerField::rationals()
                } else {
                    build_tower(&specs).map_err(|err| ScenarioError::field(qpos, err))?
                };
                for (n, p) in e.names() {
                    if n != *var && below.generator(&n).is_err() {
                        return Err(ScenarioError::syntax(p, format!("`{n}` is not available below `{name}`")));
                    }
                }
                let mut coeffs = eval_poly(e, var, &below)?;
                if let Some(lead) = coeffs.last().and_then(|x| x.as_rational()) {
                    if !lead.is_one() && !lead.is_zero() {
                        let inv = lead.recip();
                        coeffs = coeffs.iter().map(|x| x.scale(&inv)).collect();
                    }
                }
                if coeffs.len() < 3 {
                    return Err(ScenarioError::syntax(*rpos, format!("relation for `{name}` must have degree at least 2")));
                }
                let s = GeneratorSpec::algebraic_over(name, coeffs);
                if assume {
                    s.assume_irreducible()
                } else {
                    s
                }
            }
        };
        specs.push(spec);
    }
    if specs.is_empty() {
        return Ok(TowerField::rationals());
    }
    build_tower(&specs).map_err(|e| ScenarioError::field(qpos, e))
}

/// Parses a standalone tower descriptor string.
pub fn parse_tower_str(text: &str) -> Result<TowerField> {
    let toks = tokenize(text, 1)?;
    let mut c = Cursor::new(&toks, Pos::new(1, text.chars().count() + 1));
    let t = parse_tower(&mut c)?;
    if !c.at_end() {
        return Err(c.unexpected("end of input"));
    }
    Ok(t)
}
