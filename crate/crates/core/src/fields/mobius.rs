//! Substitutions x ↦ (a·xⁿ + b)/(c·xⁿ + d) with rational, invertible coefficient matrices.

use std::fmt;

use num::Zero;
use serde::{Serialize, Serializer};

use super::element::FieldElement;
use super::rational::{fmt_rational, rat, Rational};
use crate::error::{Error, Result};
use crate::report::{check_identity, NamedElement, VerdictReport};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MobiusCoeffs {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
    det: Rational,
}

impl MobiusCoeffs {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if det.is_zero() {
            return Err(Error::NonInvertible(format!(
                "{}, {}; {}, {}",
                fmt_rational(&a),
                fmt_rational(&b),
                fmt_rational(&c),
                fmt_rational(&d)
            )));
        }
        Ok(MobiusCoeffs { a, b, c, d, det })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(rat(a), rat(b), rat(c), rat(d))
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1).expect("invertible")
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }
    pub fn b(&self) -> &Rational {
        &self.b
    }
    pub fn c(&self) -> &Rational {
        &self.c
    }
    pub fn d(&self) -> &Rational {
        &self.d
    }
    pub fn det(&self) -> &Rational {
        &self.det
    }

    /// c·xⁿ + d.
    pub fn denominator(&self, n: i64, x: &FieldElement) -> Result<FieldElement> {
        Ok(x.pow(n)?.scale(&self.c).add_rational(&self.d))
    }

    /// Whether `x` is a pole of the substitution (including x = 0 for n < 0).
    pub fn is_pole(&self, n: i64, x: &FieldElement) -> bool {
        match self.denominator(n, x) {
            Ok(den) => den.is_zero(),
            Err(_) => true,
        }
    }

    /// (a·y + b)/(c·y + d) for an arbitrary field element y.
    pub fn apply_to(&self, y: &FieldElement) -> Result<FieldElement> {
        let den = y.scale(&self.c).add_rational(&self.d);
        if den.is_zero() {
            return Err(Error::PoleHit(format!("c*y + d vanishes at y = {y}")));
        }
        y.scale(&self.a).add_rational(&self.b).div(&den)
    }

    /// (a·xⁿ + b)/(c·xⁿ + d).
    pub fn apply(&self, n: i64, x: &FieldElement) -> Result<FieldElement> {
        let xn = x.pow(n)?;
        let den = xn.scale(&self.c).add_rational(&self.d);
        if den.is_zero() {
            return Err(Error::PoleHit(format!("c*x^{n} + d vanishes at x = {x}")));
        }
        xn.scale(&self.a).add_rational(&self.b).div(&den)
    }
}

impl fmt::Display for MobiusCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{};{},{})",
            fmt_rational(&self.a),
            fmt_rational(&self.b),
            fmt_rational(&self.c),
            fmt_rational(&self.d)
        )
    }
}

impl Serialize for MobiusCoeffs {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub const SPLIT_ANCHOR: &str = "D/(x^n + d) = D/d - D/((d^(2/n)/x)^n + d)";

/// Checks D/(xⁿ + d) = D/d − D/(d²·x⁻ⁿ + d) after normalizing M to c = 1,
/// where D is the normalized determinant. The term d²·x⁻ⁿ is the n-th power
/// of d^(2/n)/x, so no radical is needed.
pub fn mobius_split_identity(m: &MobiusCoeffs, n: i64, x: &FieldElement) -> Result<VerdictReport> {
    if m.c.is_zero() {
        return Err(Error::ParameterOutOfRange(
            "the split identity normalizes c = 1 and needs c != 0".into(),
        ));
    }
    let d = &m.d / &m.c;
    let det = &m.det / (&m.c * &m.c);
    mobius_split_normalized(&d, &det, n, x)
}

/// The split identity for the normalized matrix with c = 1, bottom-right entry `d` and determinant `det`.
pub fn mobius_split_normalized(d: &Rational, det: &Rational, n: i64, x: &FieldElement) -> Result<VerdictReport> {
    if d.is_zero() {
        return Err(Error::ParameterOutOfRange("the split identity needs d != 0".into()));
    }
    if x.is_zero() {
        return Err(Error::PoleHit("x = 0".into()));
    }
    let tuples = vec![vec![NamedElement::new("x", x)]];
    let report = check_identity("mobius_split_identity", SPLIT_ANCHOR, &tuples, |args| {
        let x = &args[0];
        let k = x.tower();
        let big_d = k.rational(det);
        let xn = x.pow(n)?;
        let den = xn.add_rational(d);
        if den.is_zero() {
            return Err(Error::PoleHit(format!("x^{n} + d vanishes at x = {x}")));
        }
        let lhs = big_d.div(&den)?;
        let inner = x.pow(-n)?.scale(&(d * d)).add_rational(d);
        let rhs = k.rational(&(det / d)).sub(&big_d.div(&inner)?)?;
        Ok((lhs, rhs))
    })?;
    Ok(report
        .with_value("d", fmt_rational(d))
        .with_value("D", fmt_rational(det))
        .with_value("n", n))
}
