//! Tower fields: Q, optionally extended by one transcendental `t`, then by a
//! chain of algebraic generators, each given by a minimal polynomial over the
//! field built so far.
//!
//! Level 0 is the base field (Q or Q(t)); level `k` is level `k-1` adjoined
//! the `k`-th algebraic generator. An element at level `k` is a residue
//! polynomial in that generator, of degree below the minimal polynomial's,
//! with coefficients at level `k-1`.

use std::fmt;
use std::sync::Arc;

use num::{Integer, One, Signed, Zero};

use super::element::FieldElement;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::rational::{fmt_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Repr {
    Base(RatFunc),
    Alg(Vec<Repr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Level {
    pub(crate) name: String,
    /// Monic minimal polynomial, coefficients at the level below, lowest degree first.
    pub(crate) min_poly: Vec<Repr>,
}

impl Level {
    pub(crate) fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct TowerData {
    pub(crate) transcendental: Option<String>,
    pub(crate) levels: Vec<Level>,
    pub(crate) assumptions: Vec<String>,
}

/// Coefficients of a minimal polynomial, lowest degree first.
#[derive(Clone, Debug)]
pub enum MinPoly {
    /// Rational coefficients; usable at any level.
    Rational(Poly),
    /// Coefficients that are elements of the tower built from the preceding generators.
    Elements(Vec<FieldElement>),
}

#[derive(Clone, Debug)]
pub enum GeneratorKind {
    Transcendental,
    Algebraic {
        min_poly: MinPoly,
        /// Accept a minimal polynomial whose irreducibility cannot be certified.
        assume_irreducible: bool,
    },
}

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub name: String,
    pub kind: GeneratorKind,
}

impl GeneratorSpec {
    pub fn transcendental(name: &str) -> Self {
        GeneratorSpec {
            name: name.to_string(),
            kind: GeneratorKind::Transcendental,
        }
    }

    pub fn algebraic(name: &str, min_poly: Poly) -> Self {
        GeneratorSpec {
            name: name.to_string(),
            kind: GeneratorKind::Algebraic {
                min_poly: MinPoly::Rational(min_poly),
                assume_irreducible: false,
            },
        }
    }

    pub fn algebraic_over(name: &str, coeffs: Vec<FieldElement>) -> Self {
        GeneratorSpec {
            name: name.to_string(),
            kind: GeneratorKind::Algebraic {
                min_poly: MinPoly::Elements(coeffs),
                assume_irreducible: false,
            },
        }
    }

    pub fn assume_irreducible(mut self) -> Self {
        if let GeneratorKind::Algebraic {
            assume_irreducible, ..
        } = &mut self.kind
        {
            *assume_irreducible = true;
        }
        self
    }
}

/// A computable subfield of the reals given by named generators.
///
/// Cloning is cheap; all clones share the same immutable description.
#[derive(Clone, Debug)]
pub struct TowerField {
    pub(crate) data: Arc<TowerData>,
}

impl PartialEq for TowerField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data == other.data
    }
}

impl Eq for TowerField {}

/// Builds a tower from generator specifications, certifying each minimal polynomial.
pub fn build_tower(specs: &[GeneratorSpec]) -> Result<TowerField> {
    let mut data = TowerData::default();
    for (i, spec) in specs.iter().enumerate() {
        if !is_identifier(&spec.name) {
            return Err(Error::InvalidMinPoly {
                generator: spec.name.clone(),
                reason: "generator names must be alphanumeric identifiers".into(),
            });
        }
        let taken = data.transcendental.as_deref() == Some(spec.name.as_str())
            || data.levels.iter().any(|l| l.name == spec.name);
        if taken {
            return Err(Error::DuplicateName(spec.name.clone()));
        }
        match &spec.kind {
            GeneratorKind::Transcendental => {
                if data.transcendental.is_some() {
                    return Err(Error::MultipleTranscendentals);
                }
                if i != 0 {
                    return Err(Error::TranscendentalNotFirst(spec.name.clone()));
                }
                data.transcendental = Some(spec.name.clone());
            }
            GeneratorKind::Algebraic {
                min_poly,
                assume_irreducible,
            } => {
                let prefix = TowerField {
                    data: Arc::new(data.clone()),
                };
                let lvl = data.levels.len();
                let coeffs: Vec<Repr> = match min_poly {
                    MinPoly::Rational(p) => p
                        .coeffs()
                        .iter()
                        .map(|c| data.from_rational(lvl, c))
                        .collect(),
                    MinPoly::Elements(v) => {
                        let mut out = Vec::with_capacity(v.len());
                        for e in v {
                            if e.tower() != &prefix {
                                return Err(Error::TowerMismatch);
                            }
                            out.push(e.repr.clone());
                        }
                        out
                    }
                };
                let min_poly = data.normalize_min_poly(lvl, coeffs, &spec.name)?;
                let level = Level {
                    name: spec.name.clone(),
                    min_poly,
                };
                let note = data.certify(lvl, &level, *assume_irreducible)?;
                if let Some(note) = note {
                    data.assumptions.push(note);
                }
                data.levels.push(level);
            }
        }
    }
    Ok(TowerField {
        data: Arc::new(data),
    })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TowerField {
    /// The field Q.
    pub fn rationals() -> Self {
        TowerField {
            data: Arc::new(TowerData::default()),
        }
    }

    pub(crate) fn top(&self) -> usize {
        self.data.levels.len()
    }

    pub fn transcendental(&self) -> Option<&str> {
        self.data.transcendental.as_deref()
    }

    /// Names of the algebraic generators, in tower order.
    pub fn algebraic_names(&self) -> Vec<&str> {
        self.data.levels.iter().map(|l| l.name.as_str()).collect()
    }

    /// All generator names, in tower order.
    pub fn generator_names(&self) -> Vec<&str> {
        self.transcendental()
            .into_iter()
            .chain(self.algebraic_names())
            .collect()
    }

    /// Degrees of the algebraic levels over their predecessors.
    pub fn algebraic_degrees(&self) -> Vec<usize> {
        self.data.levels.iter().map(Level::degree).collect()
    }

    /// Irreducibility assumptions accepted at construction time.
    pub fn assumptions(&self) -> &[String] {
        &self.data.assumptions
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(self.data.zero(self.top()))
    }

    pub fn one(&self) -> FieldElement {
        self.rational(&Rational::one())
    }

    pub fn rational(&self, q: &Rational) -> FieldElement {
        self.wrap(self.data.from_rational(self.top(), q))
    }

    pub fn integer(&self, n: i64) -> FieldElement {
        self.rational(&Rational::from_integer(n.into()))
    }

    pub fn generator(&self, name: &str) -> Result<FieldElement> {
        if self.transcendental() == Some(name) {
            let r = Repr::Base(RatFunc::var());
            return Ok(self.wrap(self.data.embed(0, self.top(), r)));
        }
        let idx = self
            .data
            .levels
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        let lvl = idx + 1;
        let below = lvl - 1;
        let r = Repr::Alg(vec![self.data.zero(below), self.data.one(below)]);
        Ok(self.wrap(self.data.embed(lvl, self.top(), r)))
    }

    /// Elements of the power basis over the base field (Q or Q(t)), i.e. all
    /// products of algebraic generator powers below their degrees.
    pub fn power_basis(&self) -> Vec<FieldElement> {
        let mut out = vec![self.one()];
        for level in &self.data.levels {
            let g = self.generator(&level.name).expect("declared generator");
            let mut next = Vec::new();
            for b in &out {
                let mut acc = b.clone();
                for _ in 0..level.degree() {
                    next.push(acc.clone());
                    acc = acc.mul(&g).expect("same tower");
                }
            }
            out = next;
        }
        out
    }

    /// Minimal polynomial coefficients of an algebraic generator, embedded at the top level.
    pub fn min_poly(&self, name: &str) -> Result<Vec<FieldElement>> {
        let idx = self
            .data
            .levels
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        Ok(self.data.levels[idx]
            .min_poly
            .iter()
            .map(|c| self.wrap(self.data.embed(idx, self.top(), c.clone())))
            .collect())
    }

    pub(crate) fn wrap(&self, repr: Repr) -> FieldElement {
        FieldElement {
            tower: self.clone(),
            repr,
        }
    }

    /// Embeds a representation at level `lvl` into the top level.
    pub(crate) fn lift(&self, lvl: usize, r: Repr) -> FieldElement {
        self.wrap(self.data.embed(lvl, self.top(), r))
    }

    /// Textual descriptor, e.g. `Q(t, s | s^2 - t)`.
    pub fn descriptor(&self) -> String {
        let mut parts = Vec::new();
        if let Some(t) = self.transcendental() {
            parts.push(t.to_string());
        }
        for (i, level) in self.data.levels.iter().enumerate() {
            let mut terms = Vec::new();
            for (j, c) in level.min_poly.iter().enumerate().rev() {
                if self.data.is_zero(c) {
                    continue;
                }
                let mono = match j {
                    0 => String::new(),
                    1 => level.name.clone(),
                    _ => format!("{}^{}", level.name, j),
                };
                terms.push(self.data.term(i, c, &mono));
            }
            parts.push(format!("{} | {}", level.name, join_terms(terms)));
        }
        let mut out = if parts.is_empty() {
            "Q".to_string()
        } else {
            format!("Q({})", parts.join(", "))
        };
        for a in &self.data.assumptions {
            out.push_str(&format!(" [assumed: {a}]"));
        }
        out
    }
}

impl fmt::Display for TowerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// One printed term: sign and body.
pub(crate) struct Term {
    negative: bool,
    body: String,
}

pub(crate) fn join_terms(terms: Vec<Term>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in terms.into_iter().enumerate() {
        match (i, t.negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&t.body);
    }
    out
}

fn trim(v: &mut Vec<Repr>, data: &TowerData) {
    while v.last().is_some_and(|c| data.is_zero(c)) {
        v.pop();
    }
}

impl TowerData {
    pub(crate) fn zero(&self, lvl: usize) -> Repr {
        if lvl == 0 {
            Repr::Base(RatFunc::zero())
        } else {
            Repr::Alg(Vec::new())
        }
    }

    pub(crate) fn one(&self, lvl: usize) -> Repr {
        self.from_rational(lvl, &Rational::one())
    }

    pub(crate) fn from_rational(&self, lvl: usize, q: &Rational) -> Repr {
        if lvl == 0 {
            Repr::Base(RatFunc::constant(q.clone()))
        } else if q.is_zero() {
            Repr::Alg(Vec::new())
        } else {
            Repr::Alg(vec![self.from_rational(lvl - 1, q)])
        }
    }

    pub(crate) fn embed(&self, from: usize, to: usize, mut r: Repr) -> Repr {
        for _ in from..to {
            r = if self.is_zero(&r) {
                Repr::Alg(Vec::new())
            } else {
                Repr::Alg(vec![r])
            };
        }
        r
    }

    pub(crate) fn is_zero(&self, r: &Repr) -> bool {
        match r {
            Repr::Base(f) => f.is_zero(),
            Repr::Alg(v) => v.is_empty(),
        }
    }

    /// The rational value of `r`, if it lies in Q.
    pub(crate) fn as_rational(&self, r: &Repr) -> Option<Rational> {
        match r {
            Repr::Base(f) => f.as_constant(),
            Repr::Alg(v) => match v.len() {
                0 => Some(Rational::zero()),
                1 => self.as_rational(&v[0]),
                _ => None,
            },
        }
    }

    pub(crate) fn add(&self, lvl: usize, a: &Repr, b: &Repr) -> Repr {
        match (a, b) {
            (Repr::Base(x), Repr::Base(y)) => Repr::Base(x.add(y)),
            (Repr::Alg(x), Repr::Alg(y)) => Repr::Alg(self.poly_add(lvl - 1, x, y)),
            _ => unreachable!("mismatched representation levels"),
        }
    }

    pub(crate) fn neg(&self, lvl: usize, a: &Repr) -> Repr {
        match a {
            Repr::Base(x) => Repr::Base(x.neg()),
            Repr::Alg(v) => Repr::Alg(v.iter().map(|c| self.neg(lvl - 1, c)).collect()),
        }
    }

    pub(crate) fn sub(&self, lvl: usize, a: &Repr, b: &Repr) -> Repr {
        self.add(lvl, a, &self.neg(lvl, b))
    }

    pub(crate) fn scale(&self, lvl: usize, a: &Repr, q: &Rational) -> Repr {
        if q.is_zero() {
            return self.zero(lvl);
        }
        match a {
            Repr::Base(x) => Repr::Base(x.scale(q)),
            Repr::Alg(v) => Repr::Alg(v.iter().map(|c| self.scale(lvl - 1, c, q)).collect()),
        }
    }

    pub(crate) fn mul(&self, lvl: usize, a: &Repr, b: &Repr) -> Repr {
        match (a, b) {
            (Repr::Base(x), Repr::Base(y)) => Repr::Base(x.mul(y)),
            (Repr::Alg(x), Repr::Alg(y)) => {
                let prod = self.poly_mul(lvl - 1, x, y);
                Repr::Alg(self.reduce(lvl, prod))
            }
            _ => unreachable!("mismatched representation levels"),
        }
    }

    pub(crate) fn inv(&self, lvl: usize, a: &Repr) -> Result<Repr> {
        match a {
            Repr::Base(x) => Ok(Repr::Base(x.inv()?)),
            Repr::Alg(v) => {
                if v.is_empty() {
                    return Err(Error::DivisionByZero);
                }
                let c = lvl - 1;
                let level = &self.levels[lvl - 1];
                // Extended Euclid in L_{lvl-1}[X]: s_i * a = r_i (mod p).
                let mut r0 = level.min_poly.clone();
                let mut r1 = v.clone();
                let mut s0: Vec<Repr> = Vec::new();
                let mut s1: Vec<Repr> = vec![self.one(c)];
                while !r1.is_empty() {
                    let (q, r) = self.poly_div_rem(c, &r0, &r1)?;
                    let s2 = self.poly_sub(c, &s0, &self.poly_mul(c, &q, &s1));
                    r0 = std::mem::replace(&mut r1, r);
                    s0 = std::mem::replace(&mut s1, s2);
                }
                if r0.len() != 1 {
                    return Err(Error::ZeroDivisor(level.name.clone()));
                }
                let g_inv = self.inv(c, &r0[0])?;
                let scaled: Vec<Repr> = s0.iter().map(|x| self.mul(c, x, &g_inv)).collect();
                Ok(Repr::Alg(self.reduce(lvl, scaled)))
            }
        }
    }

    fn poly_add(&self, c: usize, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => self.add(c, x, y),
                (Some(x), None) | (None, Some(x)) => x.clone(),
                (None, None) => unreachable!(),
            });
        }
        trim(&mut out, self);
        out
    }

    fn poly_sub(&self, c: usize, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
        let nb: Vec<Repr> = b.iter().map(|x| self.neg(c, x)).collect();
        self.poly_add(c, a, &nb)
    }

    fn poly_mul(&self, c: usize, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(c); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.is_zero(y) {
                    continue;
                }
                out[i + j] = self.add(c, &out[i + j], &self.mul(c, x, y));
            }
        }
        trim(&mut out, self);
        out
    }

    fn poly_div_rem(&self, c: usize, a: &[Repr], b: &[Repr]) -> Result<(Vec<Repr>, Vec<Repr>)> {
        let db = b.len().checked_sub(1).ok_or(Error::DivisionByZero)?;
        let mut rem = a.to_vec();
        if rem.len() <= db {
            return Ok((Vec::new(), rem));
        }
        let lc_inv = self.inv(c, &b[db])?;
        let mut quot = vec![self.zero(c); rem.len() - db];
        for i in (db..rem.len()).rev() {
            if self.is_zero(&rem[i]) {
                continue;
            }
            let k = self.mul(c, &rem[i], &lc_inv);
            for (j, bj) in b.iter().enumerate() {
                let t = self.mul(c, &k, bj);
                rem[i - db + j] = self.sub(c, &rem[i - db + j], &t);
            }
            quot[i - db] = k;
        }
        trim(&mut rem, self);
        trim(&mut quot, self);
        Ok((quot, rem))
    }

    /// Reduces a coefficient vector modulo the (monic) minimal polynomial of level `lvl`.
    fn reduce(&self, lvl: usize, mut v: Vec<Repr>) -> Vec<Repr> {
        let c = lvl - 1;
        let p = &self.levels[lvl - 1].min_poly;
        let d = p.len() - 1;
        while v.len() > d {
            let top = v.pop().expect("nonempty");
            if self.is_zero(&top) {
                continue;
            }
            let shift = v.len() - d;
            for (j, pj) in p.iter().take(d).enumerate() {
                let t = self.mul(c, &top, pj);
                v[shift + j] = self.sub(c, &v[shift + j], &t);
            }
        }
        trim(&mut v, self);
        v
    }

    fn normalize_min_poly(&self, lvl: usize, mut coeffs: Vec<Repr>, name: &str) -> Result<Vec<Repr>> {
        trim(&mut coeffs, self);
        if coeffs.len() < 3 {
            return Err(Error::InvalidMinPoly {
                generator: name.to_string(),
                reason: "degree must be at least 2".into(),
            });
        }
        let lc = coeffs.last().expect("nonempty").clone();
        let inv = self.inv(lvl, &lc)?;
        Ok(coeffs.iter().map(|c| self.mul(lvl, c, &inv)).collect())
    }

    /// Certifies irreducibility of `level`'s minimal polynomial over level `lvl`,
    /// returning an assumption note when it was accepted on the caller's word.
    fn certify(&self, lvl: usize, level: &Level, assume: bool) -> Result<Option<String>> {
        let d = level.degree();
        let name = &level.name;
        let prefix = TowerField {
            data: Arc::new(self.clone()),
        };
        let poly_text = {
            let mut terms = Vec::new();
            for (j, c) in level.min_poly.iter().enumerate().rev() {
                if self.is_zero(c) {
                    continue;
                }
                let mono = match j {
                    0 => String::new(),
                    1 => name.clone(),
                    _ => format!("{name}^{j}"),
                };
                terms.push(self.term(lvl, c, &mono));
            }
            join_terms(terms)
        };
        if self.is_zero(&level.min_poly[0]) {
            return Err(Error::RationalRootFound {
                generator: name.clone(),
                root: "0".into(),
            });
        }
        let assumed = || {
            Some(format!(
                "irreducibility of {poly_text} over {} assumed",
                prefix.descriptor()
            ))
        };

        let rational: Option<Vec<Rational>> =
            level.min_poly.iter().map(|c| self.as_rational(c)).collect();
        if let Some(qs) = rational {
            let p = Poly::from_coeffs(qs);
            match p.rational_roots() {
                Some(roots) if !roots.is_empty() => {
                    return Err(Error::RationalRootFound {
                        generator: name.clone(),
                        root: fmt_rational(&roots[0]),
                    });
                }
                Some(_) => {}
                None => {
                    return if assume {
                        Ok(assumed())
                    } else {
                        Err(Error::UncertifiedIrreducibility(name.clone()))
                    };
                }
            }
            if d >= 4 {
                return if assume {
                    Ok(assumed())
                } else {
                    Err(Error::UncertifiedIrreducibility(name.clone()))
                };
            }
            // A prime-degree polynomial irreducible over Q stays irreducible over
            // an extension whose constant field has degree prime to it; that degree
            // divides the product of the algebraic degrees below.
            let below: usize = self.levels.iter().map(Level::degree).product();
            if below.gcd(&d) == 1 {
                return Ok(None);
            }
            return if assume {
                Ok(assumed())
            } else {
                Err(Error::UncertifiedIrreducibility(name.clone()))
            };
        }

        if d == 2 && lvl == 0 {
            // Monic X^2 + bX + c over Q(t): reducible iff b^2 - 4c is a square in Q(t).
            let (Repr::Base(c0), Repr::Base(b)) = (&level.min_poly[0], &level.min_poly[1]) else {
                unreachable!("base level representation");
            };
            let disc = b.mul(b).sub(&c0.scale(&Rational::from_integer(4.into())));
            let candidate = disc.numer() * disc.denom();
            if let Some(root) = candidate.sqrt() {
                let var = self.transcendental.as_deref().unwrap_or("t");
                let sqrt_disc = RatFunc::new(root, disc.denom().clone())?;
                let half = Rational::new(1.into(), 2.into());
                let r = b.neg().add(&sqrt_disc).scale(&half);
                return Err(Error::RationalRootFound {
                    generator: name.clone(),
                    root: r.fmt_with(var),
                });
            }
            return Ok(None);
        }

        if assume {
            Ok(assumed())
        } else {
            Err(Error::UncertifiedIrreducibility(name.clone()))
        }
    }

    /// Formats `coeff * mono` where `coeff` lives at level `lvl`.
    pub(crate) fn term(&self, lvl: usize, coeff: &Repr, mono: &str) -> Term {
        if let Some(q) = self.as_rational(coeff) {
            let negative = q.is_negative();
            let abs = q.abs();
            let body = if mono.is_empty() {
                fmt_rational(&abs)
            } else if abs.is_one() {
                mono.to_string()
            } else {
                format!("{}*{}", fmt_rational(&abs), mono)
            };
            return Term { negative, body };
        }
        let inner = self.fmt_repr(lvl, coeff);
        if !mono.is_empty() {
            return Term {
                negative: false,
                body: format!("({inner})*{mono}"),
            };
        }
        if inner.starts_with('-') {
            let flipped = self.fmt_repr(lvl, &self.neg(lvl, coeff));
            let body = if flipped.contains(' ') {
                format!("({flipped})")
            } else {
                flipped
            };
            return Term {
                negative: true,
                body,
            };
        }
        Term {
            negative: false,
            body: inner,
        }
    }

    pub(crate) fn fmt_repr(&self, lvl: usize, r: &Repr) -> String {
        match r {
            Repr::Base(f) => f.fmt_with(self.transcendental.as_deref().unwrap_or("t")),
            Repr::Alg(v) => {
                let name = &self.levels[lvl - 1].name;
                let mut terms = Vec::new();
                for (j, c) in v.iter().enumerate() {
                    if self.is_zero(c) {
                        continue;
                    }
                    let mono = match j {
                        0 => String::new(),
                        1 => name.clone(),
                        _ => format!("{name}^{j}"),
                    };
                    terms.push(self.term(lvl - 1, c, &mono));
                }
                join_terms(terms)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> TowerField {
        build_tower(&[GeneratorSpec::algebraic("sqrt2", Poly::from_i64(&[-2, 0, 1]))]).unwrap()
    }

    #[test]
    fn base_constructions() {
        let k = build_tower(&[GeneratorSpec::transcendental("t")]).unwrap();
        assert_eq!(k.descriptor(), "Q(t)");
        let k = sqrt2();
        assert_eq!(k.algebraic_degrees(), vec![2]);
        assert_eq!(k.descriptor(), "Q(sqrt2 | sqrt2^2 - 2)");
    }

    #[test]
    fn rejects_rational_root() {
        let err = build_tower(&[GeneratorSpec::algebraic("a", Poly::from_i64(&[-4, 0, 1]))]).unwrap_err();
        assert!(matches!(err, Error::RationalRootFound { ref root, .. } if root == "2" || root == "-2"));
    }

    #[test]
    fn structural_errors() {
        let t = GeneratorSpec::transcendental("t");
        assert_eq!(
            build_tower(&[t.clone(), GeneratorSpec::transcendental("u")]).unwrap_err(),
            Error::MultipleTranscendentals
        );
        assert_eq!(
            build_tower(&[t.clone(), t.clone()]).unwrap_err(),
            Error::DuplicateName("t".into())
        );
        let a = GeneratorSpec::algebraic("a", Poly::from_i64(&[-2, 0, 1]));
        assert_eq!(
            build_tower(&[a, t]).unwrap_err(),
            Error::TranscendentalNotFirst("t".into())
        );
    }

    #[test]
    fn degree_four_needs_assumption() {
        let p = Poly::from_i64(&[-2, 0, 0, 0, 1]);
        let spec = GeneratorSpec::algebraic("a", p);
        assert_eq!(
            build_tower(std::slice::from_ref(&spec)).unwrap_err(),
            Error::UncertifiedIrreducibility("a".into())
        );
        let k = build_tower(&[spec.assume_irreducible()]).unwrap();
        assert_eq!(k.assumptions().len(), 1);
    }

    #[test]
    fn square_root_of_t_is_certified() {
        let base = build_tower(&[GeneratorSpec::transcendental("t")]).unwrap();
        let t = base.generator("t").unwrap();
        let coeffs = vec![t.neg(), base.zero(), base.one()];
        let k = build_tower(&[
            GeneratorSpec::transcendental("t"),
            GeneratorSpec::algebraic_over("s", coeffs),
        ])
        .unwrap();
        assert!(k.assumptions().is_empty());
        assert_eq!(k.descriptor(), "Q(t, s | s^2 - t)");
    }

    #[test]
    fn square_of_t_is_rejected() {
        let base = build_tower(&[GeneratorSpec::transcendental("t")]).unwrap();
        let t = base.generator("t").unwrap();
        let t2 = t.mul(&t).unwrap();
        let coeffs = vec![t2.neg(), base.zero(), base.one()];
        let err = build_tower(&[
            GeneratorSpec::transcendental("t"),
            GeneratorSpec::algebraic_over("s", coeffs),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::RationalRootFound { .. }));
    }

    #[test]
    fn compatible_degree_over_quadratic_needs_assumption() {
        let err = build_tower(&[
            GeneratorSpec::algebraic("a", Poly::from_i64(&[-2, 0, 1])),
            GeneratorSpec::algebraic("b", Poly::from_i64(&[-3, 0, 1])),
        ])
        .unwrap_err();
        assert_eq!(err, Error::UncertifiedIrreducibility("b".into()));
        // a cubic over a quadratic field is certified by the degree argument
        let k = build_tower(&[
            GeneratorSpec::algebraic("a", Poly::from_i64(&[-2, 0, 1])),
            GeneratorSpec::algebraic("b", Poly::from_i64(&[-2, 0, 0, 1])),
        ])
        .unwrap();
        assert_eq!(k.power_basis().len(), 6);
    }
}
